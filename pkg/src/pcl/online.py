"""Online learning: SOA, experts aggregation, and both lower-bound adversaries.

Learners are callables ``(history, x) -> bit`` where ``history`` is the list
of (point, label) pairs revealed so far.  Predictions are always bits; a
learner is never allowed to output the undefined label.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    ContractViolation,
    PartialConceptClass,
    labeled_sample,
    min_mistakes,
)
from .dimensions import LdSolver, littlestone_dimension

Learner = Callable[[Sequence[tuple[int, int]], int], int]


@dataclass(frozen=True)
class Round:
    x: int
    prediction: int
    y: int
    mistake: bool
    probability: Optional[float] = None


@dataclass
class OnlineTranscript:
    rounds: tuple[Round, ...]
    mistakes: int
    best_in_class: int

    @property
    def regret(self) -> int:
        return self.mistakes - self.best_in_class


def play_sequence(
    cls: PartialConceptClass,
    learner: Learner,
    sequence: Sequence[tuple[int, int]],
) -> OnlineTranscript:
    history: list[tuple[int, int]] = []
    rounds = []
    mistakes = 0
    for x, y in sequence:
        p = learner(history, x)
        if p not in (0, 1):
            raise ValueError("online predictions must be bits")
        bad = p != y
        mistakes += bad
        rounds.append(Round(x, p, y, bad))
        history.append((x, y))
    return OnlineTranscript(tuple(rounds), mistakes, min_mistakes(cls, sequence))


class Soa:
    """Standard optimal algorithm: predict the label whose restriction keeps LD larger.

    Ties break toward 0.  The consistent subclass is tracked as a concept
    bitmask and the LD recursion cache is shared across all calls made through
    one instance, so repeated play over the same class stays cheap.
    """

    def __init__(self, cls: PartialConceptClass):
        self.cls = cls
        self.solver = LdSolver(cls)
        self.full_mask = self.solver.full_mask

    def mask_of(self, history: Sequence[tuple[int, int]]) -> int:
        return self.solver.mask_of_sample(history)

    def predict_mask(self, mask: int, x: int) -> int:
        m0 = mask & self.solver.label_masks[x][0]
        m1 = mask & self.solver.label_masks[x][1]
        ld0 = self.solver.ld(m0) if m0 else -1
        ld1 = self.solver.ld(m1) if m1 else -1
        return 0 if ld0 >= ld1 else 1

    def predict(self, history: Sequence[tuple[int, int]], x: int) -> int:
        return self.predict_mask(self.mask_of(history), x)

    def __call__(self, history: Sequence[tuple[int, int]], x: int) -> int:
        return self.predict(history, x)


def soa_predict(
    cls: PartialConceptClass, history: Sequence[tuple[int, int]], x: int
) -> int:
    soa = Soa(cls)
    mask = soa.mask_of(history)
    if mask == 0:
        raise ContractViolation("history is not realizable by the class")
    return soa.predict_mask(mask, x)


@dataclass(frozen=True)
class LittlestoneTree:
    """A complete binary mistake tree; children are None exactly at the leaves."""

    point: int
    zero: Optional["LittlestoneTree"]
    one: Optional["LittlestoneTree"]

    def depth(self) -> int:
        if self.zero is None:
            return 1
        return 1 + self.zero.depth()

    def paths(self):
        """Yield every root-to-leaf path as a tuple of (point, branch-bit) pairs."""
        if self.zero is None:
            yield ((self.point, 0),)
            yield ((self.point, 1),)
            return
        for tail in self.zero.paths():
            yield ((self.point, 0),) + tail
        for tail in self.one.paths():
            yield ((self.point, 1),) + tail


def littlestone_tree(cls: PartialConceptClass, d: int) -> Optional[LittlestoneTree]:
    """Extract a depth-d witness tree from the LD recursion (None when d = 0)."""
    solver = LdSolver(cls)
    full = solver.full_mask
    if d > solver.ld(full):
        raise ContractViolation(
            f"requested depth {d} exceeds the Littlestone dimension {solver.ld(full)}"
        )
    if d == 0:
        return None

    def build(mask: int, depth: int) -> Optional[LittlestoneTree]:
        if depth == 0:
            return None
        for x in range(cls.domain_size):
            m0 = mask & solver.label_masks[x][0]
            m1 = mask & solver.label_masks[x][1]
            if m0 and m1 and solver.ld(m0) >= depth - 1 and solver.ld(m1) >= depth - 1:
                return LittlestoneTree(x, build(m0, depth - 1), build(m1, depth - 1))
        raise AssertionError("recursion promised a deeper tree than it can build")

    return build(full, d)


def verify_tree(cls: PartialConceptClass, tree: Optional[LittlestoneTree]) -> bool:
    from .core import is_realizable

    if tree is None:
        return True
    return all(is_realizable(cls, labeled_sample(path)) for path in tree.paths())


@dataclass
class MistakeAdversary:
    """Presents tree points along a uniformly random branch; labels are fair coins."""

    cls: PartialConceptClass
    d: int
    tree: Optional[LittlestoneTree]

    def play(self, learner: Learner, rng: random.Random) -> OnlineTranscript:
        bits = tuple(rng.getrandbits(1) for _ in range(self.d))
        return self.play_bits(learner, bits)

    def play_bits(self, learner: Learner, bits: Sequence[int]) -> OnlineTranscript:
        history: list[tuple[int, int]] = []
        rounds = []
        mistakes = 0
        node = self.tree
        for y in bits:
            x = node.point
            p = learner(history, x)
            bad = p != y
            mistakes += bad
            rounds.append(Round(x, p, y, bad))
            history.append((x, y))
            node = node.zero if y == 0 else node.one
        return OnlineTranscript(
            tuple(rounds), mistakes, min_mistakes(self.cls, history)
        )

    def exact_expected_mistakes(self, learner: Learner) -> Fraction:
        """Average mistakes of a deterministic learner over all 2^d branch strings."""
        if self.d == 0:
            return Fraction(0)
        total = 0
        for bits in product((0, 1), repeat=self.d):
            total += self.play_bits(learner, bits).mistakes
        return Fraction(total, 2 ** self.d)


def mistake_adversary(cls: PartialConceptClass, d: int) -> MistakeAdversary:
    return MistakeAdversary(cls, d, littlestone_tree(cls, d))


@dataclass
class ExpertsResult:
    mixtures: np.ndarray
    total_loss: float
    best_expert_loss: float
    regret: float
    regret_bound: float


def experts_aggregate(
    expert_predictions: Sequence[Sequence[float]], outcomes: Sequence[float]
) -> ExpertsResult:
    """Exponential-weights aggregation with absolute loss.

    ``expert_predictions`` is T x N (row t = all expert values for round t),
    entries and outcomes in [0, 1].  The guarantee checked downstream is
    cumulative mixture loss <= best expert loss + sqrt((T/2) ln N).
    """
    preds = np.asarray(expert_predictions, dtype=float)
    ys = np.asarray(outcomes, dtype=float)
    if preds.ndim != 2:
        raise ValueError("expert predictions must be a T x N matrix")
    T, N = preds.shape
    if ys.shape != (T,):
        raise ValueError("outcomes length must match the number of rounds")
    if N < 1 or T < 1:
        raise ValueError("need at least one expert and one round")
    if (preds < 0).any() or (preds > 1).any() or (ys < 0).any() or (ys > 1).any():
        raise ValueError("predictions and outcomes must lie in [0, 1]")
    eta = math.sqrt((8.0 / T) * math.log(N)) if N > 1 else 0.0
    cum_losses = np.zeros(N)
    mixtures = np.zeros(T)
    total = 0.0
    for t in range(T):
        weights = np.exp(-eta * (cum_losses - cum_losses.min()))
        mixtures[t] = float(weights @ preds[t] / weights.sum())
        total += float(abs(mixtures[t] - ys[t]))
        cum_losses += np.abs(preds[t] - ys[t])
    best = float(cum_losses.min())
    bound = math.sqrt((T / 2.0) * math.log(N)) if N > 1 else 0.0
    return ExpertsResult(mixtures, total, best, total - best, bound)


@dataclass
class AgnosticRunResult:
    transcript: OnlineTranscript
    mixtures: np.ndarray
    expected_mistakes: float
    best_in_class: int
    regret_bound: float

    @property
    def expected_regret(self) -> float:
        return self.expected_mistakes - self.best_in_class


class AgnosticOnlineLearner:
    """Exponential weights over SOA variants indexed by mistake-round subsets.

    For each subset J of rounds (|J| <= LD) there is an expert that runs SOA
    but flips its prediction exactly on the rounds in J, feeding itself the
    flipped labels as corrections.  One of these experts tracks the best
    concept in the class, so the experts bound turns into a regret bound.
    """

    def __init__(
        self,
        cls: PartialConceptClass,
        T: int,
        seed: int = 0,
        max_experts: int = 100_000,
    ):
        self.cls = cls
        self.T = T
        self.seed = seed
        self.ld = littlestone_dimension(cls)
        self.n_experts = sum(comb(T, i) for i in range(self.ld + 1))
        if self.n_experts > max_experts:
            raise ValueError(
                f"{self.n_experts} experts exceed the budget of {max_experts}"
            )
        self.flip_sets = [
            frozenset(J)
            for k in range(self.ld + 1)
            for J in combinations(range(T), k)
        ]

    def regret_bound(self) -> float:
        if self.n_experts <= 1:
            return 0.0
        return math.sqrt((self.T / 2.0) * math.log(self.n_experts))

    def run(self, sequence: Sequence[tuple[int, int]]) -> AgnosticRunResult:
        if len(sequence) != self.T:
            raise ValueError(f"sequence length {len(sequence)} != T = {self.T}")
        soa = Soa(self.cls)
        rng = random.Random(self.seed)
        N = self.n_experts
        eta = math.sqrt((8.0 / self.T) * math.log(N)) if N > 1 else 0.0
        masks = [soa.full_mask] * N
        cum_losses = np.zeros(N)
        mixtures = np.zeros(self.T)
        expected = 0.0
        rounds = []
        sampled_mistakes = 0
        for t, (x, y) in enumerate(sequence):
            preds = np.empty(N)
            for i, J in enumerate(self.flip_sets):
                s = soa.predict_mask(masks[i], x)
                preds[i] = 1 - s if t in J else s
            weights = np.exp(-eta * (cum_losses - cum_losses.min()))
            p_one = float(weights @ preds / weights.sum())
            mixtures[t] = p_one
            expected += abs(p_one - y)
            bit = 1 if rng.random() < p_one else 0
            bad = bit != y
            sampled_mistakes += bad
            rounds.append(Round(x, bit, y, bad, probability=p_one))
            cum_losses += np.abs(preds - y)
            for i, J in enumerate(self.flip_sets):
                if t in J:
                    flipped = int(preds[i])
                    masks[i] &= soa.solver.label_masks[x][flipped]
        best = min_mistakes(self.cls, sequence)
        transcript = OnlineTranscript(tuple(rounds), sampled_mistakes, best)
        return AgnosticRunResult(
            transcript, mixtures, expected, best, self.regret_bound()
        )


def agnostic_online_learn(
    cls: PartialConceptClass, T: int, seed: int = 0, max_experts: int = 100_000
) -> AgnosticOnlineLearner:
    return AgnosticOnlineLearner(cls, T, seed=seed, max_experts=max_experts)


@dataclass
class RegretAdversary:
    """Oblivious block sequence: fair-coin labels at tree points chosen by block majorities."""

    cls: PartialConceptClass
    d: int
    T: int
    tree: Optional[LittlestoneTree]

    def block_bounds(self) -> list[tuple[int, int]]:
        k = self.T // self.d
        bounds = []
        start = 0
        for i in range(1, self.d + 1):
            end = self.T if i == self.d else k * i
            bounds.append((start, end))
            start = end
        return bounds

    def generate(self, rng: random.Random) -> list[tuple[int, int]]:
        ys = [rng.getrandbits(1) for _ in range(self.T)]
        xs: list[int] = []
        node = self.tree
        for start, end in self.block_bounds():
            xs.extend([node.point] * (end - start))
            block = ys[start:end]
            majority = 1 if 2 * sum(block) > len(block) else 0
            node = node.zero if majority == 0 else node.one
        return list(zip(xs, ys))


def regret_adversary(
    cls: PartialConceptClass, d: int, T: int, seed: int = 0
) -> RegretAdversary:
    if T < d:
        raise ContractViolation("horizon must be at least the tree depth")
    tree = littlestone_tree(cls, d)
    return RegretAdversary(cls, d, T, tree)


def constant_learner(bit: int) -> Learner:
    def predict(history, x):
        return bit

    return predict


def follow_the_leader() -> Learner:
    """Predict the majority label seen so far at the queried point (ties -> 0)."""

    def predict(history, x):
        ones = sum(1 for p, y in history if p == x and y == 1)
        zeros = sum(1 for p, y in history if p == x and y == 0)
        return 1 if ones > zeros else 0

    return predict
