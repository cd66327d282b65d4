"""Ternary concepts over a finite domain, labeled samples, rational distributions.

Domain points are always the indices ``0 .. n-1``.  A concept assigns each
point one of three labels: 0, 1, or ``STAR``.  ``STAR`` means the concept is
undefined at that point, and any comparison against a 0/1 observation there
counts as a mistake.  All probability and error accounting in this module is
exact (``fractions.Fraction``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

ZERO, ONE, STAR = 0, 1, 2

_LABEL_CHARS = {ZERO: "0", ONE: "1", STAR: "*"}
_CHAR_LABELS = {"0": ZERO, "1": ONE, "*": STAR}


class ContractViolation(ValueError):
    """An operation was called outside its stated precondition."""


@dataclass(frozen=True, order=True)
class PartialConcept:
    """A ternary labeling of ``{0, ..., n-1}``; STAR marks undefined points."""

    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        for v in self.labels:
            if v not in (ZERO, ONE, STAR):
                raise ValueError(f"label must be 0, 1 or STAR, got {v!r}")

    @classmethod
    def parse(cls, text: str) -> "PartialConcept":
        try:
            return cls(tuple(_CHAR_LABELS[ch] for ch in text))
        except KeyError as exc:
            raise ValueError(
                f"bad concept character {exc.args[0]!r} in {text!r} (expected 0, 1 or *)"
            ) from None

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, x: int) -> int:
        return self.labels[x]

    def support(self) -> tuple[int, ...]:
        return tuple(x for x, v in enumerate(self.labels) if v != STAR)

    def is_total(self) -> bool:
        return STAR not in self.labels

    def __str__(self) -> str:
        return "".join(_LABEL_CHARS[v] for v in self.labels)


def concept(spec: Union[str, Sequence[int], PartialConcept]) -> PartialConcept:
    """Coerce a string like ``"01*"`` or a label sequence into a concept."""
    if isinstance(spec, PartialConcept):
        return spec
    if isinstance(spec, str):
        return PartialConcept.parse(spec)
    return PartialConcept(tuple(spec))


@dataclass(frozen=True)
class PartialConceptClass:
    """A finite, duplicate-free set of concepts over a shared domain.

    Concepts are deduplicated and stored in a canonical sorted order at
    construction, so equal classes compare equal regardless of input order.
    """

    domain_size: int
    concepts: tuple[PartialConcept, ...]

    def __post_init__(self) -> None:
        if self.domain_size <= 0:
            raise ValueError("domain_size must be positive")
        deduped = tuple(sorted(set(self.concepts)))
        if not deduped:
            raise ValueError("a concept class must contain at least one concept")
        for h in deduped:
            if len(h) != self.domain_size:
                raise ValueError(
                    f"concept {h} has length {len(h)}, expected {self.domain_size}"
                )
        object.__setattr__(self, "concepts", deduped)

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self) -> Iterator[PartialConcept]:
        return iter(self.concepts)

    def __contains__(self, h: PartialConcept) -> bool:
        return h in self.concepts

    def restrict(self, x: int, y: int) -> Optional["PartialConceptClass"]:
        """Subclass with ``h(x) = y`` exactly; ``None`` when no concept qualifies."""
        _check_point(self, x)
        if y not in (ZERO, ONE):
            raise ValueError("restriction label must be 0 or 1")
        kept = tuple(h for h in self.concepts if h[x] == y)
        if not kept:
            return None
        return PartialConceptClass(self.domain_size, kept)

    def binary_patterns(self, points: Sequence[int]) -> set[tuple[int, ...]]:
        """All-0/1 restrictions realized on ``points`` (concepts with a STAR there drop out)."""
        out: set[tuple[int, ...]] = set()
        for h in self.concepts:
            pat = tuple(h[x] for x in points)
            if STAR not in pat:
                out.add(pat)
        return out


@dataclass(frozen=True)
class TotalConceptClass(PartialConceptClass):
    """A concept class in which every label is 0 or 1."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for h in self.concepts:
            if not h.is_total():
                raise ValueError(f"total class contains a partial concept: {h}")


def concept_class(
    domain_size: int, items: Iterable[Union[str, Sequence[int], PartialConcept]]
) -> PartialConceptClass:
    return PartialConceptClass(domain_size, tuple(concept(it) for it in items))


def total_class(
    domain_size: int, items: Iterable[Union[str, Sequence[int], PartialConcept]]
) -> TotalConceptClass:
    return TotalConceptClass(domain_size, tuple(concept(it) for it in items))


@dataclass(frozen=True)
class LabeledSample:
    """An ordered sequence of (point, bit) pairs; repeats are allowed."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for x, y in self.pairs:
            if y not in (ZERO, ONE):
                raise ValueError(f"sample label must be 0 or 1, got {y!r}")
            if x < 0:
                raise ValueError(f"sample point must be a nonnegative index, got {x!r}")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __getitem__(self, i: int) -> tuple[int, int]:
        return self.pairs[i]

    def points(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.pairs)

    def subsample(self, indices: Sequence[int]) -> "LabeledSample":
        return LabeledSample(tuple(self.pairs[i] for i in indices))


def labeled_sample(pairs: Iterable[Sequence[int]]) -> LabeledSample:
    return LabeledSample(tuple((int(x), int(y)) for x, y in pairs))


@dataclass(frozen=True)
class FiniteDistribution:
    """A rational-weighted distribution over (point, bit) pairs."""

    atoms: tuple[tuple[tuple[int, int], Fraction], ...]

    def __post_init__(self) -> None:
        seen = set()
        total = Fraction(0)
        for (x, y), w in self.atoms:
            if y not in (ZERO, ONE):
                raise ValueError(f"atom label must be 0 or 1, got {y!r}")
            if w <= 0:
                raise ValueError(f"atom weight must be positive, got {w}")
            if (x, y) in seen:
                raise ValueError(f"duplicate atom {(x, y)}")
            seen.add((x, y))
            total += w
        if total != 1:
            raise ValueError(f"atom weights must sum to 1 exactly, got {total}")
        object.__setattr__(self, "atoms", tuple(sorted(self.atoms)))

    def support_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(pair for pair, _ in self.atoms)

    def weight(self, pair: tuple[int, int]) -> Fraction:
        for p, w in self.atoms:
            if p == pair:
                return w
        return Fraction(0)

    def sample(self, rng: random.Random, n: int) -> LabeledSample:
        pairs = [p for p, _ in self.atoms]
        weights = [float(w) for _, w in self.atoms]
        return LabeledSample(tuple(rng.choices(pairs, weights=weights, k=n)))


def finite_distribution(
    atoms: Union[Mapping[tuple[int, int], object], Iterable[Sequence[object]]]
) -> FiniteDistribution:
    """Build a distribution from ``{(x, y): weight}`` or ``[(x, y, weight), ...]``."""
    if isinstance(atoms, Mapping):
        items = [((int(x), int(y)), Fraction(w)) for (x, y), w in atoms.items()]
    else:
        items = [((int(x), int(y)), Fraction(w)) for x, y, w in atoms]
    return FiniteDistribution(tuple(items))


def uniform_on(pairs: Iterable[Sequence[int]]) -> FiniteDistribution:
    pairs = [tuple(map(int, p)) for p in pairs]
    w = Fraction(1, len(pairs))
    return FiniteDistribution(tuple(((x, y), w) for x, y in pairs))


def _check_point(cls: PartialConceptClass, x: int) -> None:
    if not 0 <= x < cls.domain_size:
        raise ValueError(
            f"point index {x} out of range for domain of size {cls.domain_size}"
        )


def _check_sample(cls: PartialConceptClass, sample: LabeledSample) -> None:
    for x, _ in sample:
        _check_point(cls, x)


def is_realizable(cls: PartialConceptClass, sample: LabeledSample) -> bool:
    """True iff some concept is defined on all sample points with the observed bits."""
    _check_sample(cls, sample)
    return any(all(h[x] == y for x, y in sample) for h in cls.concepts)


def empirical_error(h: PartialConcept, sample: LabeledSample) -> Fraction:
    """Fraction of sample entries where ``h`` disagrees; STAR always disagrees."""
    if len(sample) == 0:
        raise ContractViolation("empirical error of an empty sample is undefined")
    mistakes = sum(1 for x, y in sample if h[x] != y)
    return Fraction(mistakes, len(sample))


def restrict(
    cls: PartialConceptClass, x: int, y: int
) -> Optional[PartialConceptClass]:
    return cls.restrict(x, y)


def distribution_realizable(cls: PartialConceptClass, dist: FiniteDistribution) -> bool:
    """Realizability of a finite-support distribution = realizability of its support."""
    support = labeled_sample(dist.support_pairs())
    return is_realizable(cls, support)


def min_mistakes(cls: PartialConceptClass, pairs: Sequence[tuple[int, int]]) -> int:
    """Fewest disagreements of any single concept with the pair sequence."""
    best = len(pairs)
    for h in cls.concepts:
        best = min(best, sum(1 for x, y in pairs if h[x] != y))
        if best == 0:
            break
    return best


def best_empirical_error(cls: PartialConceptClass, sample: LabeledSample) -> Fraction:
    if len(sample) == 0:
        raise ContractViolation("empirical error of an empty sample is undefined")
    _check_sample(cls, sample)
    return Fraction(min_mistakes(cls, sample.pairs), len(sample))


@dataclass(frozen=True)
class SubsequenceResult:
    """Indices of a maximum realizable subsequence plus the solve mode used."""

    indices: tuple[int, ...]
    mode: str


def max_realizable_subsequence(
    cls: PartialConceptClass, sample: LabeledSample
) -> SubsequenceResult:
    """Largest index set whose induced subsample is realizable.

    A subsequence is realizable iff a single concept agrees with all of its
    entries, so the maximum is attained by some concept's full agreement set.
    Scanning those sets is exact in O(|H| * |S|); ties between equally large
    sets are broken toward the lexicographically smallest index tuple.
    """
    _check_sample(cls, sample)
    best: tuple[int, ...] = ()
    for h in cls.concepts:
        agree = tuple(i for i, (x, y) in enumerate(sample) if h[x] == y)
        if len(agree) > len(best) or (len(agree) == len(best) and agree < best):
            best = agree
    return SubsequenceResult(best, "exact")


def approximation_error(
    cls: PartialConceptClass,
    dist: FiniteDistribution,
    n: int,
    trials: int = 1000,
    seed: int = 0,
    exact: bool = False,
) -> Fraction:
    """Estimate (or enumerate) the expected best empirical error of size-n samples.

    With ``exact=True`` the value is computed by enumerating all size-n
    multisets of atoms with their multinomial weights, which is feasible for
    small n and small support.
    """
    if n < 1:
        raise ContractViolation("n must be at least 1")
    if exact:
        total = Fraction(0)
        for combo in combinations_with_replacement(dist.atoms, n):
            weight = Fraction(factorial(n))
            counts: dict[tuple[int, int], int] = {}
            for pair, _ in combo:
                counts[pair] = counts.get(pair, 0) + 1
            for c in counts.values():
                weight /= factorial(c)
            for _, w in combo:
                weight *= w
            pairs = [pair for pair, _ in combo]
            total += weight * Fraction(min_mistakes(cls, pairs), n)
        return total
    if trials < 1:
        raise ContractViolation("trials must be at least 1")
    rng = random.Random(seed)
    acc = Fraction(0)
    for _ in range(trials):
        pairs = dist.sample(rng, n).pairs
        acc += Fraction(min_mistakes(cls, pairs), n)
    return acc / trials
