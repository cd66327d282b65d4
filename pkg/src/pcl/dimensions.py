"""Exact combinatorial complexity measures of partial concept classes.

Everything here is enumeration-based and exact; the intended scale is desk
size (domains up to ~14 points, classes up to a few dozen concepts).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Optional, Sequence

from .core import (
    ONE,
    STAR,
    ZERO,
    ContractViolation,
    PartialConcept,
    PartialConceptClass,
    TotalConceptClass,
)


def is_shattered(cls: PartialConceptClass, points: Sequence[int]) -> bool:
    """A point set is shattered when every binary pattern on it is realized."""
    pts = tuple(points)
    target = 1 << len(pts)
    seen: set[int] = set()
    for h in cls.concepts:
        code = 0
        ok = True
        for i, x in enumerate(pts):
            v = h[x]
            if v == STAR:
                ok = False
                break
            code |= v << i
        if ok:
            seen.add(code)
            if len(seen) == target:
                return True
    return len(seen) == target


def vc_dimension(cls: PartialConceptClass, witness: bool = False):
    """Largest shattered subset size, by ascending-size enumeration.

    Shattering is downward closed, so the search stops at the first size with
    no shattered subset.  With ``witness=True`` returns ``(value, points)``.
    """
    n = cls.domain_size
    best = 0
    best_set: tuple[int, ...] = ()
    for k in range(1, n + 1):
        found = None
        for pts in combinations(range(n), k):
            if is_shattered(cls, pts):
                found = pts
                break
        if found is None:
            break
        best, best_set = k, found
    if witness:
        return best, best_set
    return best


def shattering_strength(cls: PartialConceptClass) -> int:
    """Number of shattered subsets of the domain, counting the empty set."""
    d = vc_dimension(cls)
    count = 1  # the empty set, shattered by any nonempty class
    for k in range(1, d + 1):
        for pts in combinations(range(cls.domain_size), k):
            if is_shattered(cls, pts):
                count += 1
    return count


class LdSolver:
    """Littlestone-dimension recursion over subclasses encoded as concept bitmasks.

    ``label_masks[x][y]`` holds the set of concepts with label y at point x,
    so restriction is a single AND.  Values are memoized per solver instance;
    build a fresh solver for a fresh cache.
    """

    def __init__(self, cls: PartialConceptClass):
        self.cls = cls
        self.n = cls.domain_size
        rows = [h.labels for h in cls.concepts]
        self.rows = rows
        self.full_mask = (1 << len(rows)) - 1
        self.label_masks = [[0, 0] for _ in range(self.n)]
        for i, row in enumerate(rows):
            for x, v in enumerate(row):
                if v != STAR:
                    self.label_masks[x][v] |= 1 << i
        self._memo: dict[int, int] = {0: -1}

    def restricted(self, mask: int, x: int, y: int) -> int:
        return mask & self.label_masks[x][y]

    def mask_of_sample(self, pairs) -> int:
        mask = self.full_mask
        for x, y in pairs:
            mask &= self.label_masks[x][y]
        return mask

    def ld(self, mask: int) -> int:
        """LD of the subclass given by ``mask``; -1 for the empty subclass."""
        cached = self._memo.get(mask)
        if cached is not None:
            return cached
        best = 0
        for x in range(self.n):
            m0 = mask & self.label_masks[x][0]
            m1 = mask & self.label_masks[x][1]
            if m0 and m1:
                v = 1 + min(self.ld(m0), self.ld(m1))
                if v > best:
                    best = v
        self._memo[mask] = best
        return best


def littlestone_dimension(cls: PartialConceptClass) -> int:
    return LdSolver(cls).ld((1 << len(cls.concepts)) - 1)


def threshold_dimension(cls: PartialConceptClass, witness: bool = False):
    """Longest staircase: points x_1..x_d and concepts h_1..h_d with h_i(x_j)=1[i<=j].

    Depth-first search.  Choosing the next (x, h) with h(x)=1 restricts future
    concepts to those labeling all chosen points 0, and future points to those
    labeled 1 by all chosen concepts.
    """
    rows = [h.labels for h in cls.concepts]
    best = 0
    best_chain: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())

    def extend(points_avail, rows_avail, chain_pts, chain_rows):
        nonlocal best, best_chain
        depth = len(chain_pts)
        if depth + min(len(points_avail), len(rows_avail)) <= best:
            return
        for x in points_avail:
            for r in rows_avail:
                if rows[r][x] == ONE:
                    if depth + 1 > best:
                        best = depth + 1
                        best_chain = (chain_pts + (x,), chain_rows + (r,))
                    nxt_rows = [r2 for r2 in rows_avail if rows[r2][x] == ZERO]
                    nxt_pts = [p for p in points_avail if p != x and rows[r][p] == ONE]
                    extend(nxt_pts, nxt_rows, chain_pts + (x,), chain_rows + (r,))

    extend(list(range(cls.domain_size)), list(range(len(rows))), (), ())
    if witness:
        pts, row_ids = best_chain
        return best, (pts, tuple(cls.concepts[i] for i in row_ids))
    return best


def _ternary_patterns(cls: PartialConceptClass, pts: Sequence[int]) -> set[tuple[int, ...]]:
    return {tuple(h[x] for x in pts) for h in cls.concepts}


def _natarajan_shatters(cls: PartialConceptClass, pts: Sequence[int]) -> bool:
    # Per-coordinate label pairs may involve STAR; a set is N-shattered when
    # some choice of unordered pairs realizes all 2^d selections.
    pats = _ternary_patterns(cls, pts)
    d = len(pts)
    per_coord_values = [set(p[i] for p in pats) for i in range(d)]
    pair_options = []
    for vals in per_coord_values:
        opts = [p for p in ((ZERO, ONE), (ZERO, STAR), (ONE, STAR)) if set(p) <= vals]
        if not opts:
            return False
        pair_options.append(opts)
    for assignment in product(*pair_options):
        if all(
            tuple(assignment[i][b] for i, b in enumerate(bits)) in pats
            for bits in product((0, 1), repeat=d)
        ):
            return True
    return False


def _graph_shatters(cls: PartialConceptClass, pts: Sequence[int]) -> bool:
    # Shattering by agreement indicators against some ternary reference pattern.
    pats = _ternary_patterns(cls, pts)
    d = len(pts)
    target = 1 << d
    for ref in product((ZERO, ONE, STAR), repeat=d):
        masks = set()
        for p in pats:
            masks.add(sum(1 << i for i in range(d) if p[i] == ref[i]))
            if len(masks) == target:
                return True
    return False


def _largest_subset(cls: PartialConceptClass, predicate) -> int:
    n = cls.domain_size
    best = 0
    for k in range(1, n + 1):
        if any(predicate(cls, pts) for pts in combinations(range(n), k)):
            best = k
        else:
            break
    return best


@dataclass(frozen=True)
class MulticlassDimensions:
    natarajan: int
    graph: int
    support_vc: int


def support_class(cls: PartialConceptClass) -> TotalConceptClass:
    """Indicator class of the supports: x maps to 1 iff h is defined at x."""
    rows = tuple(
        PartialConcept(tuple(ONE if v != STAR else ZERO for v in h.labels))
        for h in cls.concepts
    )
    return TotalConceptClass(cls.domain_size, rows)


def multiclass_dimensions(cls: PartialConceptClass) -> MulticlassDimensions:
    """Natarajan and graph dimensions of the three-label view, plus support VC."""
    d_n = _largest_subset(cls, _natarajan_shatters)
    d_g = _largest_subset(cls, _graph_shatters)
    d_supp = vc_dimension(support_class(cls))
    return MulticlassDimensions(natarajan=d_n, graph=d_g, support_vc=d_supp)


def dual_vc_dimension(cls: PartialConceptClass) -> int:
    """VC dimension of the transposed class; defined for total classes only."""
    for h in cls.concepts:
        if not h.is_total():
            raise ContractViolation("dual VC dimension requires a total class")
    n = cls.domain_size
    transposed = {tuple(h[x] for h in cls.concepts) for x in range(n)}
    dual = TotalConceptClass(len(cls.concepts), tuple(PartialConcept(r) for r in transposed))
    d_star = vc_dimension(dual)
    d = vc_dimension(cls)
    assert d_star <= 2 ** (d + 1), f"dual dimension {d_star} exceeds 2^(d+1) for d={d}"
    return d_star


_MEASURES = (
    "vc",
    "ld",
    "td",
    "strength",
    "natarajan",
    "graph",
    "support-vc",
    "dual",
)


@dataclass
class DimensionReport:
    """A computed measure together with an optionally re-checkable witness."""

    measure: str
    value: int
    witness: Optional[object] = None

    def verify(self, cls: PartialConceptClass) -> bool:
        if self.measure == "vc" and self.witness is not None:
            pts = tuple(self.witness)
            return len(pts) == self.value and (self.value == 0 or is_shattered(cls, pts))
        if self.measure == "td" and self.witness is not None:
            pts, hs = self.witness
            if len(pts) != self.value or len(hs) != self.value:
                return False
            return all(
                hs[i][pts[j]] == (ONE if i <= j else ZERO)
                for i in range(self.value)
                for j in range(self.value)
            )
        return True


def measure_report(
    cls: PartialConceptClass, measure: str, witness: bool = False
) -> DimensionReport:
    if measure not in _MEASURES:
        raise ValueError(f"unknown measure {measure!r}; expected one of {_MEASURES}")
    if measure == "vc":
        if witness:
            value, pts = vc_dimension(cls, witness=True)
            return DimensionReport("vc", value, pts)
        return DimensionReport("vc", vc_dimension(cls))
    if measure == "ld":
        return DimensionReport("ld", littlestone_dimension(cls))
    if measure == "td":
        if witness:
            value, chain = threshold_dimension(cls, witness=True)
            return DimensionReport("td", value, chain)
        return DimensionReport("td", threshold_dimension(cls))
    if measure == "strength":
        return DimensionReport("strength", shattering_strength(cls))
    mc = None
    if measure in ("natarajan", "graph", "support-vc"):
        mc = multiclass_dimensions(cls)
    if measure == "natarajan":
        return DimensionReport("natarajan", mc.natarajan)
    if measure == "graph":
        return DimensionReport("graph", mc.graph)
    if measure == "support-vc":
        return DimensionReport("support-vc", mc.support_vc)
    return DimensionReport("dual", dual_vc_dimension(cls))


def sauer_bound(n: int, d: int) -> int:
    """Sum of binomials C(n, 0..d): the ceiling for strength-style counts."""
    return sum(comb(n, i) for i in range(0, min(d, n) + 1))
