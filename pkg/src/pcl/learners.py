"""Batch learners: one-inclusion prediction, the PAC wrapper, boosting
compression, the agnostic reduction, and SRM model selection.

The one-inclusion predictor is transductive: it never materializes a global
hypothesis by itself.  Where a total hypothesis is needed it is evaluated
pointwise over the finite domain.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Optional, Sequence

from .core import (
    ContractViolation,
    LabeledSample,
    PartialConceptClass,
    best_empirical_error,
    is_realizable,
    labeled_sample,
)
from .dimensions import vc_dimension
from .online import Soa


class CompressionFormatError(ValueError):
    """Raised when a compression payload cannot be parsed back."""


class WeakLearnerNotFound(RuntimeError):
    """Exhaustive search found no sufficiently accurate weak hypothesis.

    This should be impossible for realizable inputs and indicates a bug.
    """


class BoostingCapExceeded(RuntimeError):
    """The boosting round cap was hit before the majority became consistent."""


@dataclass(frozen=True)
class Hypothesis:
    """A total predictor materialized over the finite domain."""

    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(v not in (0, 1) for v in self.labels):
            raise ValueError("hypothesis labels must be bits")

    def __call__(self, x: int) -> int:
        return self.labels[x]

    @classmethod
    def majority(cls, hyps: Sequence["Hypothesis"]) -> "Hypothesis":
        n = len(hyps[0].labels)
        labels = []
        for x in range(n):
            ones = sum(h.labels[x] for h in hyps)
            labels.append(1 if 2 * ones > len(hyps) else 0)
        return cls(tuple(labels))

    def sample_error(self, sample: LabeledSample) -> Fraction:
        mistakes = sum(1 for x, y in sample if self.labels[x] != y)
        return Fraction(mistakes, len(sample))


@dataclass(frozen=True)
class CompressionOutput:
    """A subsample plus side-information bits; size is the sum of both lengths."""

    subsample: tuple[tuple[int, int], ...]
    bits: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.subsample) + len(self.bits)


# ---------------------------------------------------------------------------
# one-inclusion prediction


class OneInclusionGraph:
    """Realizable total patterns on a point set, with a low-out-degree orientation.

    Vertices are the 0/1 patterns the class realizes on ``points``; edges join
    patterns differing in one coordinate.  The orientation is repaired by
    reversing a directed path from any vertex above the out-degree target to
    one below it; such a path always exists because every induced subgraph of
    a one-inclusion graph of a VC-d class has edge density at most d.
    """

    def __init__(self, cls: PartialConceptClass, points: tuple[int, ...]):
        self.points = points
        pats = sorted(cls.binary_patterns(points))
        if not pats:
            raise ContractViolation(
                f"no realizable total pattern on points {points}"
            )
        self.patterns = pats
        self.index = {p: i for i, p in enumerate(pats)}
        from .core import PartialConcept

        pattern_cls = PartialConceptClass(
            len(points), tuple(PartialConcept(p) for p in pats)
        )
        self.vc = vc_dimension(pattern_cls)
        self.head: dict[tuple[int, int], int] = {}
        self.out: list[list[int]] = [[] for _ in pats]
        for i, p in enumerate(pats):
            for c in range(len(points)):
                q = p[:c] + (1 - p[c],) + p[c + 1 :]
                j = self.index.get(q)
                if j is not None and j > i:
                    self.head[(i, j)] = j  # initial orientation: toward the larger id
                    self.out[i].append(j)
        self._repair_orientation()

    def _repair_orientation(self) -> None:
        d = self.vc
        guard = 2 * sum(len(o) for o in self.out) + len(self.patterns) + 4
        while True:
            over = next(
                (v for v in range(len(self.patterns)) if len(self.out[v]) > d), None
            )
            if over is None:
                return
            guard -= 1
            assert guard > 0, "orientation repair failed to terminate"
            # BFS along oriented edges for a vertex with spare out-capacity
            parent = {over: None}
            queue = [over]
            target = None
            while queue and target is None:
                u = queue.pop(0)
                for w in self.out[u]:
                    if w not in parent:
                        parent[w] = u
                        if len(self.out[w]) < d:
                            target = w
                            break
                        queue.append(w)
            assert target is not None, (
                "no reversible path found; edge density exceeded the VC bound"
            )
            node = target
            while parent[node] is not None:
                prev = parent[node]
                self.out[prev].remove(node)
                self.out[node].append(prev)
                key = (min(prev, node), max(prev, node))
                self.head[key] = prev
                node = prev

    def out_degree(self, pattern: tuple[int, ...]) -> int:
        return len(self.out[self.index[pattern]])

    def max_out_degree(self) -> int:
        return max(len(o) for o in self.out)

    def oriented_toward(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        """Head pattern of the edge {a, b}."""
        i, j = self.index[a], self.index[b]
        return self.patterns[self.head[(min(i, j), max(i, j))]]


class OneInclusionCache:
    """Memoizes one-inclusion graphs keyed by (class, point set)."""

    def __init__(self) -> None:
        self._graphs: dict[tuple, OneInclusionGraph] = {}

    def graph(self, cls: PartialConceptClass, points: tuple[int, ...]) -> OneInclusionGraph:
        key = (cls.concepts, points)
        g = self._graphs.get(key)
        if g is None:
            g = OneInclusionGraph(cls, points)
            self._graphs[key] = g
        return g


def one_inclusion_predict(
    cls: PartialConceptClass,
    train: LabeledSample,
    test: int,
    cache: Optional[OneInclusionCache] = None,
) -> int:
    """Predict the test label from the oriented one-inclusion graph.

    The patterns consistent with the training labels differ at most in the
    test coordinate; when both completions are realizable the edge between
    them points at the prediction.  When no concept is both consistent with
    the training labels and defined at the test point there is nothing to
    orient, and the prediction defaults to 0; the leave-one-out guarantee
    only concerns samples whose full labeling is realizable, where this
    cannot happen.
    """
    if not is_realizable(cls, train):
        raise ContractViolation("training sample is not realizable by the class")
    constraints: dict[int, int] = {}
    for x, y in train:
        constraints[x] = y
    if test in constraints:
        return constraints[test]
    points = tuple(sorted(set(constraints) | {test}))
    if not cls.binary_patterns(points):
        return 0
    graph = (cache or OneInclusionCache()).graph(cls, points)
    consistent = [
        pat
        for pat in graph.patterns
        if all(pat[points.index(x)] == y for x, y in constraints.items())
    ]
    t = points.index(test)
    if not consistent:
        return 0
    if len(consistent) == 1:
        return consistent[0][t]
    a, b = consistent
    return graph.oriented_toward(a, b)[t]


def materialize_transductive(
    cls: PartialConceptClass,
    train: LabeledSample,
    cache: Optional[OneInclusionCache] = None,
) -> Hypothesis:
    """Evaluate the one-inclusion predictor at every domain point."""
    cache = cache or OneInclusionCache()
    labels = tuple(
        one_inclusion_predict(cls, train, x, cache) for x in range(cls.domain_size)
    )
    return Hypothesis(labels)


def loo_error(
    cls: PartialConceptClass,
    sample: LabeledSample,
    cache: Optional[OneInclusionCache] = None,
) -> Fraction:
    """Exact permutation-averaged leave-one-out error of the predictor.

    The predictor ignores the order of its training sequence, so averaging
    over all |S|! permutations reduces to leaving each entry out once.
    """
    cache = cache or OneInclusionCache()
    n = len(sample)
    mistakes = 0
    for i, (x, y) in enumerate(sample):
        rest = labeled_sample(p for j, p in enumerate(sample) if j != i)
        if one_inclusion_predict(cls, rest, x, cache) != y:
            mistakes += 1
    return Fraction(mistakes, n)


# ---------------------------------------------------------------------------
# realizable PAC wrapper


@dataclass(frozen=True)
class PacSchedule:
    batches: int
    batch_size: int
    validation_size: int

    @property
    def total(self) -> int:
        return self.batches * self.batch_size + self.validation_size


def pac_schedule(vc: int, eps: float, delta: float) -> PacSchedule:
    """Batch-and-validate sizes for target accuracy eps and confidence delta."""
    if not 0 < eps < 1 or not 0 < delta <= 1:
        raise ContractViolation("need 0 < eps < 1 and 0 < delta <= 1")
    d = max(vc, 1)
    k = math.ceil(math.log2(2.0 / delta))
    n = math.floor(4.0 * d / eps)
    t = math.ceil((32.0 / eps) * math.log(2.0 * k / delta))
    return PacSchedule(batches=k, batch_size=n, validation_size=t)


def pac_learn_realizable(
    cls: PartialConceptClass,
    sample: LabeledSample,
    eps: float,
    delta: float,
    seed: int = 0,
    cache: Optional[OneInclusionCache] = None,
) -> Hypothesis:
    """Train one-inclusion on disjoint batches and keep the validation winner."""
    schedule = pac_schedule(vc_dimension(cls), eps, delta)
    if len(sample) < schedule.total:
        raise ContractViolation(
            f"sample of size {len(sample)} is too short; "
            f"the wrapper needs m = {schedule.total} "
            f"({schedule.batches} batches of {schedule.batch_size} "
            f"plus {schedule.validation_size} validation points)"
        )
    cache = cache or OneInclusionCache()
    hyps = []
    for i in range(schedule.batches):
        lo = i * schedule.batch_size
        batch = labeled_sample(sample.pairs[lo : lo + schedule.batch_size])
        hyps.append(materialize_transductive(cls, batch, cache))
    lo = schedule.batches * schedule.batch_size
    validation = sample.pairs[lo : lo + schedule.validation_size]
    scores = [sum(1 for x, y in validation if h.labels[x] != y) for h in hyps]
    return hyps[scores.index(min(scores))]


# ---------------------------------------------------------------------------
# boosting-based compression


def boosting_round_cap(m: int) -> int:
    return math.ceil(72.0 * math.log(m + 2))


def _weak_hypothesis(
    cls: PartialConceptClass,
    pairs: Sequence[tuple[int, int]],
    weights: Sequence[float],
    k: int,
    rng: random.Random,
    cache: OneInclusionCache,
    budget: int,
    exhaustive_cap: int = 200_000,
) -> tuple[Hypothesis, LabeledSample]:
    """A k-point-trained hypothesis with weighted error at most 1/3.

    Random draws from the current distribution almost always work (the
    expected error is below 1/3); exhaustive search over k-multisets of the
    distinct pairs is the fallback.
    """
    total = sum(weights)

    def weighted_error(h: Hypothesis) -> float:
        return (
            sum(w for (x, y), w in zip(pairs, weights) if h.labels[x] != y) / total
        )

    for _ in range(budget):
        drawn = rng.choices(pairs, weights=weights, k=k)
        train = labeled_sample(drawn)
        h = materialize_transductive(cls, train, cache)
        if weighted_error(h) <= 1.0 / 3.0:
            return h, train
    distinct = sorted(set(pairs))
    n_candidates = math.comb(len(distinct) + k - 1, k)
    if n_candidates > exhaustive_cap:
        raise WeakLearnerNotFound(
            f"random search failed and {n_candidates} candidates exceed the cap"
        )
    for combo in combinations_with_replacement(distinct, k):
        train = labeled_sample(combo)
        h = materialize_transductive(cls, train, cache)
        if weighted_error(h) <= 1.0 / 3.0:
            return h, train
    raise WeakLearnerNotFound(
        "no k-point training multiset reaches weighted error 1/3; "
        "this contradicts the expected-error guarantee and indicates a bug"
    )


def alpha_boost_compress(
    cls: PartialConceptClass,
    sample: LabeledSample,
    seed: int = 0,
    cache: Optional[OneInclusionCache] = None,
    weak_budget: int = 256,
) -> tuple[Hypothesis, CompressionOutput]:
    """Boost the one-inclusion weak learner until the majority fits the sample.

    Mistake weights double each round (multiplicative step e^eta = 2 against
    weak error 1/3), which forces consistency well inside the round cap.  The
    compression payload is the concatenated round subsamples; the bits encode
    the round count so the grouping is recoverable.
    """
    if not is_realizable(cls, sample):
        raise ContractViolation("boosting requires a realizable sample")
    cache = cache or OneInclusionCache()
    rng = random.Random(seed)
    pairs = sample.pairs
    m = len(pairs)
    k = 3 * max(vc_dimension(cls), 1)
    cap = boosting_round_cap(m)
    weights = [1.0] * m
    hyps: list[Hypothesis] = []
    trains: list[LabeledSample] = []
    ones_votes = [0] * cls.domain_size
    for t in range(1, cap + 1):
        h, train = _weak_hypothesis(
            cls, pairs, weights, k, rng, cache, budget=weak_budget
        )
        hyps.append(h)
        trains.append(train)
        for x in range(cls.domain_size):
            ones_votes[x] += h.labels[x]
        consistent = all(
            (1 if 2 * ones_votes[x] > t else 0) == y for x, y in pairs
        )
        if consistent:
            break
        for i, (x, y) in enumerate(pairs):
            if h.labels[x] != y:
                weights[i] *= 2.0
        top = max(weights)
        if top > 1e250:  # keep the float weights in range on long runs
            weights = [w / top for w in weights]
    else:
        raise BoostingCapExceeded(
            f"majority still inconsistent after {cap} rounds on {m} points"
        )
    T = len(hyps)
    majority = Hypothesis(
        tuple(1 if 2 * ones_votes[x] > T else 0 for x in range(cls.domain_size))
    )
    subsample = tuple(p for train in trains for p in train.pairs)
    bits = tuple(int(b) for b in format(T, "b"))
    return majority, CompressionOutput(subsample, bits)


def ld_compress(cls: PartialConceptClass, sample: LabeledSample) -> CompressionOutput:
    """Keep exactly the sample points on which SOA trained on the kept set errs.

    Every kept point is an SOA mistake on a realizable sequence, so the kept
    set never exceeds the Littlestone dimension.
    """
    if not is_realizable(cls, sample):
        raise ContractViolation("compression requires a realizable sample")
    soa = Soa(cls)
    kept: list[tuple[int, int]] = []
    while True:
        bad = next(
            ((x, y) for x, y in sample if soa.predict(kept, x) != y), None
        )
        if bad is None:
            break
        kept.append(bad)
    return CompressionOutput(tuple(kept), ())


def ld_reconstruct(cls: PartialConceptClass, comp: CompressionOutput) -> Hypothesis:
    if comp.bits:
        raise CompressionFormatError("kept-set payloads carry no side bits")
    soa = Soa(cls)
    if soa.mask_of(comp.subsample) == 0:
        raise CompressionFormatError("kept set is not realizable by the class")
    return Hypothesis(
        tuple(soa.predict(comp.subsample, x) for x in range(cls.domain_size))
    )


def reconstruct(
    cls: PartialConceptClass,
    comp: CompressionOutput,
    cache: Optional[OneInclusionCache] = None,
) -> Hypothesis:
    """Rebuild the hypothesis from a compression payload.

    Empty bits mean a kept-set payload (SOA reconstruction); otherwise the
    bits are the binary round count of a boosting payload.
    """
    if not comp.bits:
        return ld_reconstruct(cls, comp)
    if any(b not in (0, 1) for b in comp.bits):
        raise CompressionFormatError(f"bits must be binary, got {comp.bits}")
    T = int("".join(str(b) for b in comp.bits), 2)
    if T <= 0:
        raise CompressionFormatError("round count must be positive")
    k = 3 * max(vc_dimension(cls), 1)
    if len(comp.subsample) != T * k:
        raise CompressionFormatError(
            f"subsample length {len(comp.subsample)} does not split into "
            f"{T} rounds of {k} points"
        )
    cache = cache or OneInclusionCache()
    hyps = []
    for t in range(T):
        train = labeled_sample(comp.subsample[t * k : (t + 1) * k])
        if not is_realizable(cls, train):
            raise CompressionFormatError(f"round {t} subsample is not realizable")
        hyps.append(materialize_transductive(cls, train, cache))
    return Hypothesis.majority(hyps)


@dataclass(frozen=True)
class CompressionScheme:
    """Reconstruction interface used by the disambiguation enumerator."""

    size: int
    reconstruct: Callable[[LabeledSample, tuple[int, ...]], Hypothesis]


def ld_compression_scheme(cls: PartialConceptClass) -> CompressionScheme:
    from .dimensions import littlestone_dimension

    soa = Soa(cls)

    def rebuild(sample: LabeledSample, bits: tuple[int, ...]) -> Hypothesis:
        if bits:
            raise CompressionFormatError("kept-set payloads carry no side bits")
        return Hypothesis(
            tuple(soa.predict(sample.pairs, x) for x in range(cls.domain_size))
        )

    return CompressionScheme(size=littlestone_dimension(cls), reconstruct=rebuild)


# ---------------------------------------------------------------------------
# agnostic learning and SRM


def _log(x: float) -> float:
    """max(ln x, 1): keeps the bound expressions monotone near small arguments."""
    return max(math.log(x), 1.0)


@dataclass
class AgnosticReport:
    hypothesis_error: Fraction
    class_error: Fraction
    kept: int
    total: int
    bound: float
    constant: float
    delta: float


def agnostic_bound(
    vc: int, m: int, delta: float, empirical: float, constant: float = 4.0
) -> float:
    """Empirical error plus the compression-style deviation term."""
    rate = (vc * _log(m) ** 2 + _log(1.0 / delta)) / m
    return empirical + constant * math.sqrt(empirical * rate) + constant * rate


def agnostic_learn(
    cls: PartialConceptClass,
    sample: LabeledSample,
    delta: float = 0.05,
    seed: int = 0,
    constant: float = 4.0,
    cache: Optional[OneInclusionCache] = None,
) -> tuple[Hypothesis, AgnosticReport]:
    """Fit the largest realizable subsequence, then boost it to consistency."""
    from .core import max_realizable_subsequence

    kept = max_realizable_subsequence(cls, sample).indices
    if not kept:
        hyp = Hypothesis(tuple([0] * cls.domain_size))
    else:
        hyp, _ = alpha_boost_compress(
            cls, sample.subsample(kept), seed=seed, cache=cache
        )
    err = hyp.sample_error(sample)
    class_err = best_empirical_error(cls, sample)
    assert err <= class_err, "the boosted fit must err at most where the class does"
    report = AgnosticReport(
        hypothesis_error=err,
        class_error=class_err,
        kept=len(kept),
        total=len(sample),
        bound=agnostic_bound(
            vc_dimension(cls), len(sample), delta, float(class_err), constant
        ),
        constant=constant,
        delta=delta,
    )
    return hyp, report


class NoConsistentClass(RuntimeError):
    """Realizable-mode SRM found no class fitting the sample exactly."""


@dataclass
class SrmSelection:
    index: int
    hypothesis: Hypothesis
    bound: float
    mode: str
    per_class_bounds: tuple[float, ...]


def srm_select(
    hierarchy: Sequence[tuple[PartialConceptClass, Callable[[LabeledSample], Hypothesis]]],
    sample: LabeledSample,
    delta: float = 0.05,
    mode: str = "realizable",
    constant: float = 4.0,
) -> SrmSelection:
    """Pick the hierarchy level with the best complexity-penalized bound.

    Realizable mode restricts to levels with zero best empirical error and
    minimizes a * (VC log^2 n + log(1/delta_i)) / n; agnostic mode minimizes
    the empirical error plus the square-root form.  Each level i spends
    confidence delta / (i (i+1)) so the union over levels stays below delta.
    """
    if not hierarchy:
        raise ContractViolation("the hierarchy must be nonempty")
    if mode not in ("realizable", "agnostic"):
        raise ValueError(f"mode must be realizable or agnostic, got {mode!r}")
    n = len(sample)
    bounds = []
    scores = []
    for i, (cls, _) in enumerate(hierarchy, start=1):
        delta_i = delta / (i * (i + 1))
        vc = vc_dimension(cls)
        err = float(best_empirical_error(cls, sample))
        rate = (vc * _log(n) ** 2 + _log(1.0 / delta_i)) / n
        if mode == "realizable":
            b = constant * rate
            scores.append(b if err == 0.0 else math.inf)
        else:
            b = constant * math.sqrt(rate)
            scores.append(err + b)
        bounds.append(b)
    best_score = min(scores)
    if math.isinf(best_score):
        raise NoConsistentClass(
            "no class in the hierarchy fits the sample with zero empirical error"
        )
    idx = scores.index(best_score)
    cls, learner = hierarchy[idx]
    return SrmSelection(
        index=idx,
        hypothesis=learner(sample),
        bound=best_score,
        mode=mode,
        per_class_bounds=tuple(bounds),
    )
