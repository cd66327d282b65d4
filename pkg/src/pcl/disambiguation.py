"""Total classes that disambiguate partial ones, and the biclique lower bound.

Two sequential disambiguation procedures are implemented.  Both write a total
extension of a given concept point by point, following a majority vote over
the maintained consistent subclass and updating that subclass only when the
concept forces the minority label:

* the unweighted vote ranks labels by the number of shattered subsets of the
  whole domain (the "strength" potential), giving at most ``log2 s(H)``
  updates per concept;
* the weighted vote ranks labels by a sum of ``1 / max(S)^(d+1)`` over
  shattered subsets of the remaining suffix, giving at most
  ``(d+1) log2(m) + 2`` updates within every prefix of length m.

Each update at least halves the relevant potential, which is what the update
bounds certify.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Mapping, Optional, Sequence

from .core import (
    ONE,
    STAR,
    ZERO,
    ContractViolation,
    PartialConcept,
    PartialConceptClass,
    TotalConceptClass,
    labeled_sample,
)
from .dimensions import multiclass_dimensions, vc_dimension


@dataclass
class Disambiguation:
    """Result of a disambiguation procedure.

    ``extension_of`` maps each input concept to its total extension when the
    procedure is strong (per-concept); it is ``None`` for set-level (weak)
    constructions.  ``update_positions`` records, per concept, the domain
    points where the sequential procedures were forced off the majority.
    """

    totals: TotalConceptClass
    algorithm: str
    extension_of: Optional[dict[PartialConcept, PartialConcept]] = None
    update_positions: Optional[dict[PartialConcept, tuple[int, ...]]] = None
    info: dict = field(default_factory=dict)

    def update_count(self, h: PartialConcept) -> int:
        return len(self.update_positions[h])

    def prefix_update_count(self, h: PartialConcept, m: int) -> int:
        """Updates among the first m domain points (points 0..m-1)."""
        return sum(1 for x in self.update_positions[h] if x < m)


class _ShatterOracle:
    """Shattered-subset bookkeeping over subclasses encoded as concept bitmasks.

    Only subsets of size up to the class VC dimension can be shattered, so
    enumeration is capped there.  Results are cached per (mask, subset) and
    aggregated caches (strength per mask, suffix weight per mask and point)
    are kept as well, because the sequential procedures revisit the same
    subclass at many points.
    """

    def __init__(self, cls: PartialConceptClass, d: int):
        self.n = cls.domain_size
        self.d = d
        self.rows = [h.labels for h in cls.concepts]
        self.full_mask = (1 << len(self.rows)) - 1
        self.label_masks = [[0, 0] for _ in range(self.n)]
        for i, row in enumerate(self.rows):
            for x, v in enumerate(row):
                if v != STAR:
                    self.label_masks[x][v] |= 1 << i
        self.subsets = [
            pts
            for k in range(1, d + 1)
            for pts in combinations(range(self.n), k)
        ]
        self._pattern_table: dict[tuple[int, ...], list[Optional[int]]] = {}
        self._shattered: dict[tuple[int, tuple[int, ...]], bool] = {}
        self._strength: dict[int, int] = {0: 0}
        self._weight: dict[tuple[int, int], Fraction] = {}

    def _patterns_of(self, pts: tuple[int, ...]) -> list[Optional[int]]:
        table = self._pattern_table.get(pts)
        if table is None:
            table = []
            for row in self.rows:
                code = 0
                for i, x in enumerate(pts):
                    v = row[x]
                    if v == STAR:
                        code = -1
                        break
                    code |= v << i
                table.append(None if code < 0 else code)
            self._pattern_table[pts] = table
        return table

    def shattered(self, mask: int, pts: tuple[int, ...]) -> bool:
        key = (mask, pts)
        cached = self._shattered.get(key)
        if cached is not None:
            return cached
        table = self._patterns_of(pts)
        target = 1 << len(pts)
        seen: set[int] = set()
        result = False
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            code = table[i]
            if code is not None:
                seen.add(code)
                if len(seen) == target:
                    result = True
                    break
        self._shattered[key] = result
        return result

    def strength(self, mask: int) -> int:
        cached = self._strength.get(mask)
        if cached is not None:
            return cached
        s = 1 + sum(1 for pts in self.subsets if self.shattered(mask, pts))
        self._strength[mask] = s
        return s

    def suffix_weight(self, mask: int, x: int) -> Fraction:
        """Sum of 1/max(S)^(d+1) over nonempty shattered subsets of {x+1, ..}.

        Points are weighted by their 1-based position, matching the harmonic
        convergence of the potential.
        """
        if mask == 0:
            return Fraction(0)
        key = (mask, x)
        cached = self._weight.get(key)
        if cached is not None:
            return cached
        total = Fraction(0)
        for pts in self.subsets:
            if pts[0] > x and self.shattered(mask, pts):
                total += Fraction(1, (pts[-1] + 1) ** (self.d + 1))
        self._weight[key] = total
        return total


def _run_sequential(
    cls: PartialConceptClass,
    majority: Callable[["_ShatterOracle", int, int], int],
    oracle: _ShatterOracle,
    algorithm: str,
) -> Disambiguation:
    extension: dict[PartialConcept, PartialConcept] = {}
    updates: dict[PartialConcept, tuple[int, ...]] = {}
    for h in cls.concepts:
        mask = oracle.full_mask
        out: list[int] = []
        upd: list[int] = []
        for x in range(cls.domain_size):
            m = majority(oracle, mask, x)
            hx = h[x]
            if hx != STAR and hx != m:
                out.append(hx)
                mask &= oracle.label_masks[x][hx]
                upd.append(x)
            else:
                out.append(m)
        bar = PartialConcept(tuple(out))
        extension[h] = bar
        updates[h] = tuple(upd)
    totals = TotalConceptClass(cls.domain_size, tuple(set(extension.values())))
    return Disambiguation(
        totals=totals,
        algorithm=algorithm,
        extension_of=extension,
        update_positions=updates,
    )


def _strength_majority(oracle: _ShatterOracle, mask: int, x: int) -> int:
    s0 = oracle.strength(mask & oracle.label_masks[x][0])
    s1 = oracle.strength(mask & oracle.label_masks[x][1])
    return ZERO if s0 >= s1 else ONE


def _weighted_majority(oracle: _ShatterOracle, mask: int, x: int) -> int:
    m0 = mask & oracle.label_masks[x][0]
    m1 = mask & oracle.label_masks[x][1]
    # A label nobody realizes must not win the vote: otherwise concepts with
    # no shattered structure left would be forced into spurious updates and
    # the prefix-update bound would fail.
    if not m1:
        return ZERO
    if not m0:
        return ONE
    w0 = oracle.suffix_weight(m0, x)
    w1 = oracle.suffix_weight(m1, x)
    return ZERO if w0 >= w1 else ONE


def vc_majority_disambiguate(cls: PartialConceptClass) -> Disambiguation:
    """Strength-vote sequential disambiguation; u(h) <= log2 s(H) per concept."""
    d = vc_dimension(cls)
    oracle = _ShatterOracle(cls, d)
    res = _run_sequential(cls, _strength_majority, oracle, "majority")
    res.info["vc"] = d
    res.info["strength"] = oracle.strength(oracle.full_mask)
    return res


def weighted_disambiguate(
    cls: PartialConceptClass, d: Optional[int] = None
) -> Disambiguation:
    """Weighted-vote variant with the per-prefix update guarantee."""
    actual = vc_dimension(cls)
    if d is None:
        d = actual
    elif d != actual:
        raise ContractViolation(f"declared dimension {d} but class has VC {actual}")
    oracle = _ShatterOracle(cls, d)
    res = _run_sequential(cls, _weighted_majority, oracle, "weighted")
    res.info["vc"] = d
    return res


def is_disambiguation(
    cls: PartialConceptClass,
    totals: TotalConceptClass,
    mode: str = "strong",
    max_len: int = 3,
    rng: Optional[random.Random] = None,
    samples: int = 2000,
) -> bool:
    if mode == "strong":
        return strong_violation(cls, totals) is None
    if mode == "weak":
        return weak_violation(cls, totals, max_len, rng=rng, samples=samples) is None
    raise ValueError(f"mode must be 'strong' or 'weak', got {mode!r}")


def strong_violation(
    cls: PartialConceptClass, totals: TotalConceptClass
) -> Optional[PartialConcept]:
    """A concept with no agreeing total extension, or None."""
    for h in cls.concepts:
        supp = h.support()
        if not any(all(t[x] == h[x] for x in supp) for t in totals.concepts):
            return h
    return None


def weak_violation(
    cls: PartialConceptClass,
    totals: TotalConceptClass,
    max_len: int,
    rng: Optional[random.Random] = None,
    samples: int = 2000,
):
    """A realizable (points, pattern) pair the totals miss, or None.

    Exhaustive over all distinct-point subsets up to length 6; beyond that a
    seeded random subset sample is checked instead (the combinatorics explode).
    """
    n = cls.domain_size
    max_len = min(max_len, n)

    def violation_on(pts: tuple[int, ...]):
        missing = cls.binary_patterns(pts) - totals.binary_patterns(pts)
        if missing:
            return pts, sorted(missing)[0]
        return None

    if max_len <= 6:
        for k in range(1, max_len + 1):
            for pts in combinations(range(n), k):
                bad = violation_on(pts)
                if bad:
                    return bad
        return None
    rng = rng or random.Random(0)
    for _ in range(samples):
        k = rng.randint(1, max_len)
        pts = tuple(sorted(rng.sample(range(n), k)))
        bad = violation_on(pts)
        if bad:
            return bad
    return None


def compression_to_disambiguation(
    cls: PartialConceptClass,
    scheme,
    k: Optional[int] = None,
    verify_len: int = 3,
    enumeration_budget: int = 200_000,
) -> Disambiguation:
    """Totals obtained by reconstructing from every short realizable subsample.

    ``scheme`` must expose ``size`` and ``reconstruct(sample, bits)`` returning
    a total predictor with ``.labels``.  All realizable subsamples of length at
    most k and all bit strings of length at most k are enumerated; the result
    is then verified to weakly disambiguate the class, and a violation is
    reported as evidence that the scheme was not valid for the class.
    """
    if k is None:
        k = scheme.size
    n = cls.domain_size
    pair_pool = [(x, y) for x in range(n) for y in (ZERO, ONE)]
    total_candidates = sum((2 * n) ** j * 2 ** j for j in range(k + 1))
    if total_candidates > enumeration_budget:
        raise ValueError(
            f"enumeration of {total_candidates} candidates exceeds the budget"
        )
    seen: set[tuple[int, ...]] = set()
    from .core import is_realizable  # local import keeps module load light

    for j in range(k + 1):
        for pairs in product(pair_pool, repeat=j):
            sample = labeled_sample(pairs)
            if not is_realizable(cls, sample):
                continue
            for blen in range(k + 1):
                for bits in product((0, 1), repeat=blen):
                    try:
                        hyp = scheme.reconstruct(sample, bits)
                    except ValueError:
                        continue
                    seen.add(tuple(hyp.labels))
    totals = TotalConceptClass(
        cls.domain_size, tuple(PartialConcept(t) for t in seen)
    )
    bad = weak_violation(cls, totals, verify_len)
    if bad is not None:
        pts, pattern = bad
        raise ContractViolation(
            "reconstruction enumeration misses the realizable sample "
            f"{list(zip(pts, pattern))}; the compression scheme is not valid "
            "for this class"
        )
    return Disambiguation(
        totals=totals,
        algorithm="compression",
        info={"scheme_size": k, "candidates": total_candidates, "verified_len": verify_len},
    )


@dataclass(frozen=True)
class BicliqueInstance:
    """A graph plus a partition of its edges into complete bipartite pieces."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    partition: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "edges",
            tuple(tuple(sorted(e)) for e in self.edges),
        )
        object.__setattr__(
            self,
            "partition",
            tuple(
                (tuple(sorted(left)), tuple(sorted(right)))
                for left, right in self.partition
            ),
        )

    def validate(self) -> None:
        edge_set = set(self.edges)
        if len(edge_set) != len(self.edges):
            raise ValueError("duplicate edges in graph")
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of vertex range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
        covered: set[tuple[int, int]] = set()
        for idx, (left, right) in enumerate(self.partition):
            if set(left) & set(right):
                raise ValueError(f"biclique {idx} has overlapping sides")
            for u in left:
                for v in right:
                    e = tuple(sorted((u, v)))
                    if e not in edge_set:
                        raise ValueError(
                            f"biclique {idx} covers non-edge {e}"
                        )
                    if e in covered:
                        raise ValueError(
                            f"edge {e} covered by more than one biclique"
                        )
                    covered.add(e)
        missing = edge_set - covered
        if missing:
            raise ValueError(f"edges not covered by any biclique: {sorted(missing)}")


def star_partition_instance(m: int) -> BicliqueInstance:
    """K_m with the star partition: biclique i is ({i}, {i+1, .., m-1})."""
    if m < 2:
        raise ValueError("need at least two vertices")
    edges = tuple((u, v) for u in range(m) for v in range(u + 1, m))
    partition = tuple(
        ((i,), tuple(range(i + 1, m))) for i in range(m - 1)
    )
    return BicliqueInstance(m, edges, partition)


def vertex_concept(instance: BicliqueInstance, v: int) -> PartialConcept:
    labels = []
    for left, right in instance.partition:
        if v in left:
            labels.append(ZERO)
        elif v in right:
            labels.append(ONE)
        else:
            labels.append(STAR)
    return PartialConcept(tuple(labels))


def biclique_class(instance: BicliqueInstance) -> PartialConceptClass:
    """One concept per vertex over one coordinate per biclique."""
    instance.validate()
    concepts = tuple(vertex_concept(instance, v) for v in range(instance.n_vertices))
    return PartialConceptClass(len(instance.partition), concepts)


@dataclass
class ColoringCertificate:
    is_proper: bool
    colors_used: int
    violating_edge: Optional[tuple[int, int]] = None


def certify_coloring_lower_bound(
    instance: BicliqueInstance, disamb: Disambiguation
) -> ColoringCertificate:
    """Color each vertex by its concept's total extension and check properness.

    A proper coloring here shows that the disambiguation needs at least the
    chromatic number of the graph many distinct totals.
    """
    if disamb.extension_of is None:
        raise ContractViolation(
            "certification needs a strong disambiguation with per-concept extensions"
        )
    colors: dict[int, PartialConcept] = {}
    for v in range(instance.n_vertices):
        c = vertex_concept(instance, v)
        try:
            colors[v] = disamb.extension_of[c]
        except KeyError:
            raise ContractViolation(
                f"disambiguation does not cover the concept of vertex {v}"
            ) from None
    for u, v in instance.edges:
        if colors[u] == colors[v]:
            return ColoringCertificate(
                is_proper=False,
                colors_used=len(set(colors.values())),
                violating_edge=(u, v),
            )
    return ColoringCertificate(True, len(set(colors.values())))


def support_indicator_disambiguation(cls: PartialConceptClass) -> Disambiguation:
    """Map STAR to 0 pointwise; simple but its VC is tied to the support structure."""
    extension = {
        h: PartialConcept(tuple(ONE if v == ONE else ZERO for v in h.labels))
        for h in cls.concepts
    }
    totals = TotalConceptClass(cls.domain_size, tuple(set(extension.values())))
    bar_vc = vc_dimension(totals)
    graph_dim = multiclass_dimensions(cls).graph
    assert bar_vc <= graph_dim, (
        f"indicator disambiguation VC {bar_vc} exceeds graph dimension {graph_dim}"
    )
    return Disambiguation(
        totals=totals,
        algorithm="support",
        extension_of=extension,
        update_positions={h: () for h in cls.concepts},
        info={"vc": bar_vc, "graph_dimension": graph_dim},
    )


TruthTable = Mapping[tuple[int, ...], int]


def majority_table(k: int) -> dict[tuple[int, ...], int]:
    """Majority of the defined values; STAR on ties or when nothing is defined.

    For k = 2 this is exactly the two-argument majority used in the closure
    failure construction.
    """
    table = {}
    for combo in product((ZERO, ONE, STAR), repeat=k):
        ones = sum(1 for v in combo if v == ONE)
        zeros = sum(1 for v in combo if v == ZERO)
        if ones > zeros:
            table[combo] = ONE
        elif zeros > ones:
            table[combo] = ZERO
        else:
            table[combo] = STAR
    return table


def identity_table() -> dict[tuple[int, ...], int]:
    return {(v,): v for v in (ZERO, ONE, STAR)}


def indicator_table() -> dict[tuple[int, ...], int]:
    return {(v,): (ONE if v == ONE else ZERO) for v in (ZERO, ONE, STAR)}


def majority_compose(
    classes: Sequence[PartialConceptClass],
    table: TruthTable,
    budget: int = 2_000_000,
) -> PartialConceptClass:
    """Pointwise composition { x -> U(h_1(x), .., h_k(x)) } over all tuples."""
    if not classes:
        raise ValueError("need at least one class")
    n = classes[0].domain_size
    if any(c.domain_size != n for c in classes):
        raise ValueError("all classes must share a domain size")
    k = len(classes)
    for combo in product((ZERO, ONE, STAR), repeat=k):
        if combo not in table:
            raise ValueError(f"truth table is missing entry {combo}")
    count = 1
    for c in classes:
        count *= len(c)
    if count > budget:
        raise ValueError(f"composition over {count} tuples exceeds the budget")
    composed: set[PartialConcept] = set()
    for hs in product(*(c.concepts for c in classes)):
        labels = tuple(table[tuple(h[x] for h in hs)] for x in range(n))
        composed.add(PartialConcept(labels))
    return PartialConceptClass(n, tuple(composed))
