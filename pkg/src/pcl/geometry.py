"""Margin geometry, empirical weak-learnability games, and packing rules.

Numeric conventions: hull-distance and enclosing-ball computations converge to
roughly 1e-12; separability decisions are made at a 1e-6 tolerance and carry a
``marginal`` flag when the measured quantity sits within that tolerance of the
threshold.  The weak-learnability game is solved exactly over the rationals.
"""

from __future__ import annotations

import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .core import ContractViolation, LabeledSample, TotalConceptClass
from .dimensions import dual_vc_dimension
from .learners import Hypothesis

DECISION_TOL = 1e-6
CONVERGE_TOL = 1e-12


@dataclass(eq=False)
class EuclideanDataset:
    """Labeled points in R^D with margin parameters (ball radius, separation)."""

    points: np.ndarray
    labels: np.ndarray
    radius: float
    gamma: float

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.points.ndim != 2 or self.points.shape[1] < 1:
            raise ValueError("points must form an (n, D) array with D >= 1")
        if not np.isfinite(self.points).all():
            raise ValueError("points must be finite")
        if self.labels.shape != (self.points.shape[0],):
            raise ValueError("labels must match the number of points")
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be bits")
        if self.radius <= 0 or self.gamma <= 0:
            raise ValueError("radius and gamma must be positive")


# ---------------------------------------------------------------------------
# minimum enclosing ball (exact Welzl recursion, any dimension)


def _circumball(boundary: list[np.ndarray]) -> tuple[Optional[np.ndarray], float]:
    if not boundary:
        return None, -1.0
    p0 = boundary[0]
    if len(boundary) == 1:
        return p0, 0.0
    A = np.array([p - p0 for p in boundary[1:]])
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    # center lies in the affine hull of the boundary points
    G = A @ A.T
    try:
        mu = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        mu = np.linalg.lstsq(G, rhs, rcond=None)[0]
    center = p0 + A.T @ mu
    return center, float(np.linalg.norm(center - p0))


def min_enclosing_ball(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest ball containing the points (Welzl's randomized recursion)."""
    pts = [np.asarray(p, dtype=float) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    order = list(range(len(pts)))
    random.Random(0x5EED).shuffle(order)
    dim = len(pts[0])
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(pts) + 100))

    def welzl(i: int, boundary: list[np.ndarray]) -> tuple[Optional[np.ndarray], float]:
        if i == len(order) or len(boundary) == dim + 1:
            return _circumball(boundary)
        c, r = welzl(i + 1, boundary)
        p = pts[order[i]]
        if c is not None and np.linalg.norm(p - c) <= r * (1 + 1e-10) + 1e-12:
            return c, r
        return welzl(i + 1, boundary + [p])

    c, r = welzl(0, [])
    return c, r


# ---------------------------------------------------------------------------
# distance between convex hulls (Wolfe's min-norm-point algorithm)


def _affine_minimizer(P: np.ndarray) -> np.ndarray:
    """Coefficients of the min-norm point in the affine hull of the rows of P."""
    k = P.shape[0]
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = P @ P.T
    M[:k, k] = 1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:k]


def min_norm_point(points: np.ndarray, max_iter: int = 10_000) -> np.ndarray:
    """Point of minimum norm in the convex hull of the rows (Wolfe, 1976).

    Finite active-set method; terminates when no point improves the support
    hyperplane by more than a relative tolerance.
    """
    pts = np.asarray(points, dtype=float)
    norms = np.einsum("ij,ij->i", pts, pts)
    start = int(np.argmin(norms))
    corral = [start]
    lam = np.array([1.0])
    x = pts[start].copy()
    scale = max(1.0, norms.max())
    for _ in range(max_iter):
        dots = pts @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= CONVERGE_TOL * scale:
            break
        if j in corral:
            break
        corral.append(j)
        lam = np.append(lam, 0.0)
        while True:
            mu = _affine_minimizer(pts[corral])
            if (mu > 1e-14).all():
                lam = mu
                break
            mask = mu <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(
                    (lam - mu) > 1e-15, lam / np.maximum(lam - mu, 1e-300), np.inf
                )
            theta = min(1.0, float(ratios[mask].min()))
            lam = (1 - theta) * lam + theta * mu
            keep = lam > 1e-14
            if keep.all():
                keep[int(np.argmin(lam))] = False
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ pts[corral]
    return x


def hull_distance(
    side_a: np.ndarray, side_b: np.ndarray
) -> tuple[float, Optional[np.ndarray]]:
    """Distance between conv(A) and conv(B) plus the separating difference vector.

    Returns ``(inf, None)`` when either side is empty.  The second component
    is the min-norm point of the Minkowski difference: its norm is the
    distance and its direction separates the hulls with margin distance/2 on
    each side of the midplane.
    """
    A = np.asarray(side_a, dtype=float)
    B = np.asarray(side_b, dtype=float)
    if A.size == 0 or B.size == 0:
        return math.inf, None
    diffs = (A[:, None, :] - B[None, :, :]).reshape(-1, A.shape[1])
    z = min_norm_point(diffs)
    return float(np.linalg.norm(z)), z


@dataclass
class SeparabilityReport:
    ball_radius: float
    hull_gap: float
    separable: bool
    marginal: bool


def separability_report(
    data: EuclideanDataset, decision_tol: float = DECISION_TOL
) -> SeparabilityReport:
    """Ball-radius and hull-gap checks against the dataset's (R, gamma)."""
    _, r = min_enclosing_ball(data.points)
    gap, _ = hull_distance(
        data.points[data.labels == 1], data.points[data.labels == 0]
    )
    ball_ok = r <= data.radius + decision_tol
    gap_ok = gap >= 2 * data.gamma - decision_tol
    marginal = abs(r - data.radius) <= decision_tol or (
        math.isfinite(gap) and abs(gap - 2 * data.gamma) <= decision_tol
    )
    return SeparabilityReport(r, gap, ball_ok and gap_ok, marginal)


def is_r_gamma_separable(data: EuclideanDataset) -> bool:
    return separability_report(data).separable


# ---------------------------------------------------------------------------
# perceptron with a self-measured margin certificate


@dataclass
class PerceptronReport:
    mistakes: int
    passes: int
    converged: bool
    bound_used: float
    lifted_radius: float
    margin: float
    separator: Optional[np.ndarray]


def _lifted_separator(points: np.ndarray, labels: np.ndarray) -> Optional[np.ndarray]:
    """(w, b) with y-signed margins positive, from the hull gap; None if none found."""
    ones = points[labels == 1]
    zeros = points[labels == 0]
    if len(ones) == 0 or len(zeros) == 0:
        u = np.zeros(points.shape[1] + 1)
        u[-1] = 1.0 if (labels == 1).all() else -1.0
        return u
    gap, z = hull_distance(ones, zeros)
    if not math.isfinite(gap) or gap <= 0:
        return None
    hi0 = float((zeros @ z).max())
    lo1 = float((ones @ z).min())
    b = -0.5 * (hi0 + lo1)
    return np.concatenate([z, [b]])


def perceptron_run(
    points: np.ndarray,
    labels: np.ndarray,
    max_passes: int = 1,
    update_cap: int = 10**6,
) -> PerceptronReport:
    """Classic perceptron on the lifted representation (unit bias coordinate).

    Labels map 0 -> -1.  Runs up to ``max_passes`` over the sequence, early
    stopping after a clean pass.  The reported bound is the classical mistake
    bound evaluated with an explicitly constructed separator, so the
    inequality mistakes <= bound is checkable from the report alone.
    """
    pts = np.asarray(points, dtype=float)
    ys = np.where(np.asarray(labels, dtype=int) == 1, 1.0, -1.0)
    lifted = np.hstack([pts, np.ones((len(pts), 1))])
    w = np.zeros(lifted.shape[1])
    mistakes = 0
    converged = False
    passes_done = 0
    for _ in range(max_passes):
        passes_done += 1
        clean = True
        for x, y in zip(lifted, ys):
            if y * (w @ x) <= 0:
                w = w + y * x
                mistakes += 1
                clean = False
                if mistakes >= update_cap:
                    break
        if mistakes >= update_cap:
            break
        if clean:
            converged = True
            break
    lifted_radius = float(np.sqrt((lifted * lifted).sum(axis=1).max()))
    u = _lifted_separator(pts, np.asarray(labels, dtype=int))
    if u is None:
        bound = math.inf
        margin = 0.0
    else:
        margins = ys * (lifted @ u)
        margin = float(margins.min())
        if margin <= 0:
            bound = math.inf
        else:
            bound = (lifted_radius * float(np.linalg.norm(u)) / margin) ** 2
    return PerceptronReport(
        mistakes=mistakes,
        passes=passes_done,
        converged=converged,
        bound_used=bound,
        lifted_radius=lifted_radius,
        margin=margin,
        separator=u,
    )


# ---------------------------------------------------------------------------
# orthonormal shattering instance


def orthonormal_points(radius: float, gamma: float) -> np.ndarray:
    """The scaled standard basis family: floor(R^2 / gamma^2) axis points."""
    m = math.floor(radius**2 / gamma**2)
    if m < 1:
        raise ContractViolation("need radius^2 / gamma^2 >= 1")
    return radius * np.eye(m)


def orthonormal_shattering_instance(
    radius: float, gamma: float, max_points: int = 12
) -> list[EuclideanDataset]:
    """One dataset per bipartition of the axis family, all sharing the points."""
    pts = orthonormal_points(radius, gamma)
    if len(pts) > max_points:
        raise ValueError(f"{2 ** len(pts)} labelings exceed the enumeration cap")
    return [
        EuclideanDataset(pts, np.array(bits), radius=radius, gamma=gamma)
        for bits in product((0, 1), repeat=len(pts))
    ]


@dataclass
class LabelingCertificate:
    labels: tuple[int, ...]
    witness_ok: bool
    generic_ok: bool
    witness_norm: float


def certify_orthonormal_labelings(
    radius: float, gamma: float, max_points: int = 12
) -> list[LabelingCertificate]:
    """Certify every bipartition of the axis family as (R, gamma)-separable.

    Each labeling is checked twice: by the explicit unit-ball witness vector
    (gamma/R times the signed sum of basis vectors) and by the generic
    ball-plus-hull-gap checker.  Both verdicts are recorded per labeling.
    """
    pts = orthonormal_points(radius, gamma)
    m = len(pts)
    if m > max_points:
        raise ValueError(f"{2**m} labelings exceed the enumeration cap")
    out = []
    for bits in product((0, 1), repeat=m):
        labels = np.array(bits)
        signs = np.where(labels == 1, 1.0, -1.0)
        w = (gamma / radius) * signs  # witness in basis coordinates
        dots = pts @ w
        witness_ok = bool(
            np.linalg.norm(w) <= 1 + 1e-9
            and np.allclose(dots * signs, gamma, atol=1e-9)
        )
        report = separability_report(
            EuclideanDataset(pts, labels, radius=radius, gamma=gamma)
        )
        out.append(
            LabelingCertificate(
                labels=bits,
                witness_ok=witness_ok,
                generic_ok=report.separable,
                witness_norm=float(np.linalg.norm(w)),
            )
        )
    return out


# ---------------------------------------------------------------------------
# empirical weak learnability (the zero-sum game) and boosting to consistency


def _exact_simplex_max(
    c: list[Fraction], A: list[list[Fraction]], b: list[Fraction]
) -> tuple[Fraction, list[Fraction]]:
    """max c.y subject to A y <= b, y >= 0, with b >= 0 (Bland's rule, exact)."""
    m, n = len(A), len(c)
    tab = [row[:] + [Fraction(0)] * m + [b[i]] for i, row in enumerate(A)]
    for i in range(m):
        tab[i][n + i] = Fraction(1)
    cost = [-ci for ci in c] + [Fraction(0)] * (m + 1)
    basis = list(range(n, n + m))
    while True:
        enter = next((j for j in range(n + m) if cost[j] < 0), None)
        if enter is None:
            break
        best_ratio = None
        leave = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            raise ArithmeticError("unbounded game LP; the payoff shift is broken")
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [vi - f * vl for vi, vl in zip(tab[i], tab[leave])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [ci - f * vl for ci, vl in zip(cost, tab[leave])]
        basis[leave] = enter
    y = [Fraction(0)] * n
    for i, bvar in enumerate(basis):
        if bvar < n:
            y[bvar] = tab[i][-1]
    value = sum(ci * yi for ci, yi in zip(c, y))
    return value, y


@dataclass
class WeakGameValue:
    """Value of the distribution-vs-hypothesis error game over a sample."""

    value: Fraction
    mixture: tuple[Fraction, ...]
    columns: tuple[tuple[int, ...], ...]
    exact: bool = True


def weak_learning_game(
    base: TotalConceptClass, sample: LabeledSample
) -> WeakGameValue:
    """Exact minimax error of the base class against distributions on the sample.

    Rows are the distinct sample pairs, columns the distinct base behaviors on
    them; the value is max over distributions of the best single hypothesis's
    error, equal by duality to the best mixture's worst-case error.
    """
    if len(sample) == 0:
        raise ContractViolation("the game needs a nonempty sample")
    pairs = sorted(set(sample.pairs))
    columns = sorted(
        {tuple(1 if h[x] != y else 0 for x, y in pairs) for h in base.concepts}
    )
    one = Fraction(1)
    # shift errors by +1 to make every payoff positive, solve the column LP
    A = [
        [Fraction(columns[j][i] + 1) for j in range(len(columns))]
        for i in range(len(pairs))
    ]
    c = [one] * len(columns)
    b = [one] * len(pairs)
    total, y = _exact_simplex_max(c, A, b)
    if total <= 0:
        raise ArithmeticError("degenerate game LP")
    value = 1 / total - 1
    mixture = tuple(yi / total for yi in y)
    return WeakGameValue(value, mixture, tuple(columns))


def gamma_realizable_check(
    base: TotalConceptClass, sample: LabeledSample, gamma
) -> bool:
    """Is every distribution on the sample weakly learnable with edge gamma/2?"""
    g = Fraction(gamma)
    if not 0 < g <= 1:
        raise ContractViolation("gamma must lie in (0, 1]")
    return weak_learning_game(base, sample).value <= (1 - g) / 2


def approximate_game_value(
    base: TotalConceptClass, sample: LabeledSample, iters: int = 2000
) -> tuple[float, float]:
    """Multiplicative-weights bracket [lo, hi] around the game value.

    Useful when the exact LP would be too large; the gap shrinks like
    sqrt(log(rows)/iters).
    """
    pairs = sorted(set(sample.pairs))
    cols = sorted(
        {tuple(1 if h[x] != y else 0 for x, y in pairs) for h in base.concepts}
    )
    errs = np.array(cols, dtype=float).T  # rows: pairs, cols: hypotheses
    n_rows = len(pairs)
    eta = math.sqrt(math.log(max(n_rows, 2)) / iters)
    cum = np.zeros(n_rows)
    lo = 0.0
    counts = np.zeros(errs.shape[1])
    for _ in range(iters):
        p = np.exp(eta * (cum - cum.max()))
        p /= p.sum()
        col_errs = p @ errs
        j = int(np.argmin(col_errs))
        lo = max(lo, float(col_errs[j]))
        counts[j] += 1
        cum += errs[:, j]
    mix = counts / counts.sum()
    hi = float((errs @ mix).max())
    return lo, hi


class BoostingFailure(RuntimeError):
    """Empirical boosting did not reach consistency within its round cap."""


@dataclass
class MajorityFitReport:
    rounds: int
    cap: int
    dual_dimension: int
    reference_rounds: int


def boosting_disambiguate_sample(
    base: TotalConceptClass,
    sample: LabeledSample,
    gamma,
    domain_size: Optional[int] = None,
) -> tuple[Hypothesis, MajorityFitReport]:
    """Majority of base hypotheses consistent with a weakly-learnable sample.

    Each round reweights the sample and takes the base hypothesis of least
    weighted error, which gamma-realizability keeps at or below (1-gamma)/2.
    The multiplicative step is tuned to that edge, so consistency arrives
    within O(log(m)/gamma^2) rounds.
    """
    g = float(gamma)
    if not 0 < g <= 1:
        raise ContractViolation("gamma must lie in (0, 1]")
    n = domain_size or base.domain_size
    pairs = sample.pairs
    m = len(pairs)
    if m == 0:
        raise ContractViolation("need a nonempty sample")
    step = 3.0 if g >= 1 else (1 + g) / (1 - g)
    cap = math.ceil((16.0 / g**2) * math.log(m + 2))
    weights = [1.0] * m
    threshold = (1.0 - g) / 2.0
    votes = [0] * n
    rows = [h.labels for h in base.concepts]
    errs_per_row = [
        [1 if row[x] != y else 0 for x, y in pairs] for row in rows
    ]
    used = 0
    for t in range(1, cap + 1):
        total_w = sum(weights)
        best_i, best_err = None, None
        for i, errs in enumerate(errs_per_row):
            e = sum(w for w, bad in zip(weights, errs) if bad) / total_w
            if best_err is None or e < best_err:
                best_i, best_err = i, e
        if best_err > threshold + 1e-9:
            raise ContractViolation(
                f"round {t}: best weighted error {best_err:.4f} exceeds "
                f"(1-gamma)/2; the sample is not gamma-realizable at gamma={g}"
            )
        used = t
        row = rows[best_i]
        for x in range(n):
            votes[x] += row[x]
        if all((1 if 2 * votes[x] > t else 0) == y for x, y in pairs):
            break
        for idx, bad in enumerate(errs_per_row[best_i]):
            if bad:
                weights[idx] *= step
        top = max(weights)
        if top > 1e250:
            weights = [w / top for w in weights]
    else:
        raise BoostingFailure(
            f"no consistent majority within {cap} rounds; "
            "the declared gamma is likely overstated"
        )
    hyp = Hypothesis(tuple(1 if 2 * votes[x] > used else 0 for x in range(n)))
    d_star = dual_vc_dimension(base)
    report = MajorityFitReport(
        rounds=used,
        cap=cap,
        dual_dimension=d_star,
        reference_rounds=math.ceil(d_star / g**2),
    )
    return hyp, report


# ---------------------------------------------------------------------------
# greedy packing, Voronoi labeling rule


@dataclass
class PackingResult:
    chosen: tuple[int, ...]
    min_pairwise: float
    cells: tuple[int, ...]
    radius: float


def greedy_packing(points: np.ndarray, gamma: float) -> PackingResult:
    """First-fit maximal (gamma/2)-packing plus nearest-center cell assignment.

    Chosen points are pairwise at least gamma/2 apart and every point lies
    strictly within gamma/2 of some chosen one, so each cell has diameter
    below gamma.  Cell ties go to the earlier chosen center.
    """
    pts = np.asarray(points, dtype=float)
    radius = gamma / 2.0
    chosen: list[int] = []
    for i in range(len(pts)):
        if all(np.linalg.norm(pts[i] - pts[j]) >= radius for j in chosen):
            chosen.append(i)
    centers = pts[chosen]
    cells = []
    for p in pts:
        dists = np.linalg.norm(centers - p, axis=1)
        cells.append(int(np.argmin(dists)))  # argmin takes the first minimum
    if len(chosen) > 1:
        min_pair = min(
            float(np.linalg.norm(pts[a] - pts[b]))
            for k, a in enumerate(chosen)
            for b in chosen[k + 1 :]
        )
    else:
        min_pair = math.inf
    return PackingResult(tuple(chosen), min_pair, tuple(cells), radius)


def is_gamma_separated(
    points: np.ndarray, labeled: Sequence[tuple[int, int]], gamma: float
) -> bool:
    pts = np.asarray(points, dtype=float)
    for i, (a, ya) in enumerate(labeled):
        for b, yb in labeled[i + 1 :]:
            if ya != yb and np.linalg.norm(pts[a] - pts[b]) < gamma:
                return False
    return True


@dataclass
class VoronoiRule:
    """Total labeling rule: the label of the nearest packing center's cell."""

    centers: np.ndarray
    cell_labels: tuple[int, ...]
    packing: PackingResult

    def predict(self, x: np.ndarray) -> int:
        dists = np.linalg.norm(self.centers - np.asarray(x, dtype=float), axis=1)
        return self.cell_labels[int(np.argmin(dists))]

    def labels_for_points(self) -> tuple[int, ...]:
        return tuple(self.cell_labels[c] for c in self.packing.cells)


def voronoi_disambiguate(
    points: np.ndarray, labeled: Sequence[tuple[int, int]], gamma: float
) -> VoronoiRule:
    """Extend a gamma-separated partial labeling to all points via packing cells.

    Every cell has diameter below gamma, so the labeled data inside one cell
    must agree; the cell takes that label, or 0 when it holds no labeled data.
    """
    pts = np.asarray(points, dtype=float)
    packing = greedy_packing(pts, gamma)
    cell_labels = [0] * len(packing.chosen)
    cell_seen: dict[int, int] = {}
    for idx, y in labeled:
        c = packing.cells[idx]
        if c in cell_seen and cell_seen[c] != y:
            raise ContractViolation(
                f"cell {c} holds both labels; the labeling is not "
                f"gamma-separated at gamma={gamma}"
            )
        cell_seen[c] = y
        cell_labels[c] = y
    return VoronoiRule(pts[list(packing.chosen)], tuple(cell_labels), packing)


def brute_force_max_packing(points: np.ndarray, radius: float) -> int:
    """Largest subset with pairwise distances >= radius (exhaustive, small inputs)."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n > 20:
        raise ValueError("brute-force packing is limited to 20 points")
    ok = [
        [np.linalg.norm(pts[i] - pts[j]) >= radius for j in range(n)]
        for i in range(n)
    ]
    best = 0

    def grow(start: int, members: list[int]) -> None:
        nonlocal best
        best = max(best, len(members))
        for i in range(start, n):
            if all(ok[i][j] for j in members):
                grow(i + 1, members + [i])

    grow(0, [])
    return best


# ---------------------------------------------------------------------------
# proper-learner failure simulation


@dataclass
class ProperFailureResult:
    proper_mean_error: Fraction
    improper_mean_error: Fraction
    trials: int


def erm_failure_simulate(
    n: int, m: int, trials: int, seed: int = 0
) -> ProperFailureResult:
    """Half-support concepts: proper learners must guess the hidden support.

    The hidden concept labels a random size-n/2 subset with zeros and is
    undefined elsewhere; examples are uniform over its support.  A proper
    learner answers with some consistent half-support concept (random
    completion); the trivial all-zeros predictor is improper and never errs.
    """
    if n % 2 != 0:
        raise ContractViolation("the domain size n must be even")
    if m < 0 or trials < 1:
        raise ContractViolation("need m >= 0 and trials >= 1")
    half = n // 2
    rng = random.Random(seed)
    total = Fraction(0)
    for _ in range(trials):
        support = set(rng.sample(range(n), half))
        observed = (
            set(rng.choices(sorted(support), k=m)) if m > 0 else set()
        )
        free = sorted(set(range(n)) - observed)
        completion = set(rng.sample(free, half - len(observed)))
        guess = observed | completion
        missed = len(support - guess)
        total += Fraction(missed, half)
    return ProperFailureResult(
        proper_mean_error=total / trials,
        improper_mean_error=Fraction(0),
        trials=trials,
    )
