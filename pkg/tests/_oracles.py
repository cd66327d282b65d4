"""Brute-force reference implementations used to pin expected values.

Everything here follows the definitions literally (full enumeration, no
pruning, no memoization) so that the optimized package code is checked
against an independent path.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

from pcl.core import STAR, LabeledSample, PartialConceptClass, is_realizable


def patterns_on(cls: PartialConceptClass, pts) -> set[tuple[int, ...]]:
    out = set()
    for h in cls.concepts:
        pat = tuple(h[x] for x in pts)
        if STAR not in pat:
            out.add(pat)
    return out


def vc_by_definition(cls: PartialConceptClass) -> int:
    """Check every subset of every size against the shattering definition."""
    n = cls.domain_size
    best = 0
    for k in range(1, n + 1):
        for pts in combinations(range(n), k):
            if len(patterns_on(cls, pts)) == 2 ** k:
                best = max(best, k)
    return best


def strength_by_definition(cls: PartialConceptClass) -> int:
    n = cls.domain_size
    count = 1
    for k in range(1, n + 1):
        for pts in combinations(range(n), k):
            if len(patterns_on(cls, pts)) == 2 ** k:
                count += 1
    return count


def _tree_exists(rows: list[tuple[int, ...]], n: int, d: int) -> bool:
    """Is there a depth-d mistake tree with all root-to-leaf paths realizable?"""
    if d == 0:
        return bool(rows)
    for x in range(n):
        r0 = [r for r in rows if r[x] == 0]
        r1 = [r for r in rows if r[x] == 1]
        if r0 and r1 and _tree_exists(r0, n, d - 1) and _tree_exists(r1, n, d - 1):
            return True
    return False


def ld_by_definition(cls: PartialConceptClass) -> int:
    rows = [h.labels for h in cls.concepts]
    n = cls.domain_size
    d = 0
    while _tree_exists(rows, n, d + 1):
        d += 1
    return d


def td_by_definition(cls: PartialConceptClass) -> int:
    """Try every ordered point tuple and concept tuple against the staircase."""
    n = cls.domain_size
    m = len(cls.concepts)
    best = 0
    for d in range(1, min(n, m) + 1):
        found = False
        for pts in product(range(n), repeat=d):
            if len(set(pts)) != d:
                continue
            for hs in product(range(m), repeat=d):
                if len(set(hs)) != d:
                    continue
                if all(
                    cls.concepts[hs[i]][pts[j]] == (1 if i <= j else 0)
                    for i in range(d)
                    for j in range(d)
                ):
                    found = True
                    break
            if found:
                break
        if found:
            best = d
        else:
            break
    return best


def max_realizable_by_enumeration(cls, sample: LabeledSample) -> tuple[int, ...]:
    """Scan all index subsets, largest first, lexicographic tie-break."""
    m = len(sample)
    for k in range(m, -1, -1):
        candidates = [
            idx
            for idx in combinations(range(m), k)
            if is_realizable(cls, sample.subsample(idx))
        ]
        if candidates:
            return min(candidates)
    return ()


def approximation_error_by_product(cls, dist, n: int) -> Fraction:
    """Plain product-space enumeration (not multiset-grouped)."""
    total = Fraction(0)
    for combo in product(dist.atoms, repeat=n):
        weight = Fraction(1)
        for _, w in combo:
            weight *= w
        pairs = [pair for pair, _ in combo]
        best = min(
            sum(1 for x, y in pairs if h[x] != y) for h in cls.concepts
        )
        total += weight * Fraction(best, n)
    return total
