import math
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings

from pcl.core import ContractViolation, concept_class, labeled_sample, uniform_on
from pcl.dimensions import littlestone_dimension, vc_dimension
from pcl.learners import (
    CompressionFormatError,
    CompressionOutput,
    Hypothesis,
    NoConsistentClass,
    OneInclusionCache,
    agnostic_learn,
    alpha_boost_compress,
    boosting_round_cap,
    ld_compress,
    loo_error,
    one_inclusion_predict,
    pac_learn_realizable,
    pac_schedule,
    reconstruct,
    srm_select,
)

from _strategies import classes
import random


def realizable_samples(cls, max_len):
    """All realizable samples over distinct points, up to max_len points."""
    n = cls.domain_size
    for k in range(1, min(max_len, n) + 1):
        for pts in combinations(range(n), k):
            for pattern in sorted(cls.binary_patterns(pts)):
                yield labeled_sample(zip(pts, pattern))


class TestOneInclusion:
    def test_single_consistent_pattern(self):
        cls = concept_class(3, ["000", "111"])
        train = labeled_sample([(0, 1), (1, 1)])
        assert one_inclusion_predict(cls, train, 2) == 1

    def test_singleton_class(self):
        cls = concept_class(3, ["010"])
        assert one_inclusion_predict(cls, labeled_sample([(0, 0)]), 1) == 1

    def test_unrealizable_train_rejected(self):
        cls = concept_class(2, ["00"])
        with pytest.raises(ContractViolation):
            one_inclusion_predict(cls, labeled_sample([(0, 1)]), 1)

    def test_repeated_test_point_follows_train_label(self):
        cls = concept_class(2, ["01", "10", "00"])
        train = labeled_sample([(0, 0), (0, 0), (1, 1)])
        assert one_inclusion_predict(cls, train, 0) == 0

    def test_order_independence(self):
        cls = concept_class(3, ["011", "101", "110", "000"])
        pairs = [(0, 0), (1, 0), (2, 0)]
        preds = {
            one_inclusion_predict(cls, labeled_sample(p), 2)
            for p in permutations(pairs)
        }
        assert len(preds) == 1

    def test_permutation_average_equals_leave_one_out(self):
        # the n!-term average groups into n leave-one-out terms because the
        # predictor is order-independent
        cls = concept_class(4, ["0110", "1011", "1100", "0001", "01*1"])
        cache = OneInclusionCache()
        for sample in realizable_samples(cls, 4):
            n = len(sample)
            total = 0
            for perm in permutations(range(n)):
                train = labeled_sample(sample.pairs[i] for i in perm[:-1])
                x, y = sample.pairs[perm[-1]]
                total += one_inclusion_predict(cls, train, x, cache) != y
            assert Fraction(total, math.factorial(n)) == loo_error(cls, sample, cache)

    def test_permutation_average_with_repeated_points(self):
        cls = concept_class(3, ["011", "101", "110", "000"])
        cache = OneInclusionCache()
        sample = labeled_sample([(0, 0), (1, 1), (0, 0), (2, 1)])
        n = len(sample)
        total = 0
        for perm in permutations(range(n)):
            train = labeled_sample(sample.pairs[i] for i in perm[:-1])
            x, y = sample.pairs[perm[-1]]
            total += one_inclusion_predict(cls, train, x, cache) != y
        avg = Fraction(total, math.factorial(n))
        assert avg == loo_error(cls, sample, cache)
        assert avg <= Fraction(vc_dimension(cls), n)

    @settings(max_examples=25, deadline=None)
    @given(classes(min_n=2, max_n=4, max_size=10))
    def test_loo_bound_on_random_classes(self, cls):
        cache = OneInclusionCache()
        d = vc_dimension(cls)
        for sample in realizable_samples(cls, 4):
            assert loo_error(cls, sample, cache) <= Fraction(d, len(sample))

    @settings(max_examples=30, deadline=None)
    @given(classes(min_n=2, max_n=5, max_size=12))
    def test_orientation_out_degree_within_vc(self, cls):
        cache = OneInclusionCache()
        for pts in combinations(range(cls.domain_size), min(3, cls.domain_size)):
            if not cls.binary_patterns(pts):
                continue
            graph = cache.graph(cls, pts)
            assert graph.max_out_degree() <= graph.vc
            assert graph.vc <= vc_dimension(cls)


class TestPacWrapper:
    def test_schedule_example(self):
        s = pac_schedule(1, 0.5, 0.25)
        assert s.batches == 3
        assert s.batch_size == 8
        assert s.validation_size == math.ceil(64 * math.log(24))

    def test_delta_one_gives_single_batch(self):
        assert pac_schedule(1, 0.5, 1.0).batches == 1

    def test_short_sample_reports_required_size(self):
        cls = concept_class(2, ["00", "11"])
        with pytest.raises(ContractViolation, match="m ="):
            pac_learn_realizable(cls, labeled_sample([(0, 0)]), 0.5, 0.5)

    def test_monte_carlo_failure_rate(self):
        cls = concept_class(3, ["000", "111"])
        dist = uniform_on([(0, 1), (1, 1), (2, 1)])
        eps, delta = 0.5, 0.25
        schedule = pac_schedule(vc_dimension(cls), eps, delta)
        rng = random.Random(7)
        cache = OneInclusionCache()
        failures = 0
        trials = 300
        for _ in range(trials):
            sample = dist.sample(rng, schedule.total)
            hyp = pac_learn_realizable(cls, sample, eps, delta, cache=cache)
            err = sum(dist.weight((x, y)) for x in range(3) for y in (0, 1)
                      if hyp.labels[x] != y and dist.weight((x, y)) > 0)
            failures += err > eps
        assert failures / trials <= delta + 3 * math.sqrt(delta / trials)


class TestAlphaBoost:
    def test_consistent_on_simple_sample(self):
        cls = concept_class(3, ["000", "111", "0*1"])
        sample = labeled_sample([(0, 1), (1, 1), (2, 1), (0, 1), (1, 1), (2, 1), (0, 1), (1, 1)])
        hyp, comp = alpha_boost_compress(cls, sample)
        assert hyp.sample_error(sample) == 0
        k = 3 * max(vc_dimension(cls), 1)
        assert comp.size <= k * boosting_round_cap(len(sample)) + len(comp.bits)

    def test_single_point_sample(self):
        cls = concept_class(2, ["01", "10"])
        sample = labeled_sample([(0, 0)])
        hyp, comp = alpha_boost_compress(cls, sample)
        assert hyp.labels[0] == 0
        k = 3 * max(vc_dimension(cls), 1)
        assert len(comp.subsample) == k  # one round
        assert comp.bits == (1,)

    def test_unrealizable_sample_rejected(self):
        cls = concept_class(2, ["00"])
        with pytest.raises(ContractViolation):
            alpha_boost_compress(cls, labeled_sample([(0, 1)]))

    @settings(max_examples=15, deadline=None)
    @given(classes(min_n=2, max_n=4, max_size=8))
    def test_round_trip_on_all_short_samples(self, cls):
        cache = OneInclusionCache()
        for sample in realizable_samples(cls, 3):
            hyp, comp = alpha_boost_compress(cls, sample, cache=cache)
            rebuilt = reconstruct(cls, comp, cache=cache)
            assert rebuilt == hyp
            assert rebuilt.sample_error(sample) == 0

    def test_round_trip_every_realizable_five_point_sample(self):
        cls = concept_class(5, ["00000", "11111", "01*10", "1*0*1", "00110"])
        cache = OneInclusionCache()
        count = 0
        for sample in realizable_samples(cls, 5):
            _, comp = alpha_boost_compress(cls, sample, cache=cache)
            assert reconstruct(cls, comp, cache=cache).sample_error(sample) == 0
            count += 1
        assert count >= 90  # the sweep must actually cover the sample space


class TestReconstruct:
    def test_empty_payload_for_singleton_class(self):
        cls = concept_class(3, ["010"])
        comp = ld_compress(cls, labeled_sample([(0, 0), (1, 1)]))
        assert comp.subsample == ()
        assert reconstruct(cls, comp) == Hypothesis((0, 1, 0))

    def test_corrupted_bits_raise_parse_error(self):
        cls = concept_class(2, ["01", "10"])
        sample = labeled_sample([(0, 0), (1, 1)])
        _, comp = alpha_boost_compress(cls, sample)
        bad = CompressionOutput(comp.subsample, comp.bits + (1,))
        with pytest.raises(CompressionFormatError):
            reconstruct(cls, bad)

    def test_non_binary_bits_rejected(self):
        cls = concept_class(2, ["01"])
        with pytest.raises(CompressionFormatError):
            reconstruct(cls, CompressionOutput(((0, 0),), (2,)))


class TestLdCompress:
    def test_two_constants_all_ones(self):
        cls = concept_class(3, ["000", "111"])
        sample = labeled_sample([(0, 1), (1, 1), (2, 1)])
        comp = ld_compress(cls, sample)
        assert comp.subsample == ((0, 1),)
        assert comp.size == 1 == littlestone_dimension(cls)

    def test_sample_already_predicted_keeps_nothing(self):
        cls = concept_class(2, ["00", "11"])
        sample = labeled_sample([(0, 0), (1, 0)])
        assert ld_compress(cls, sample).subsample == ()

    @settings(max_examples=25, deadline=None)
    @given(classes(min_n=2, max_n=4, max_size=10))
    def test_size_bounded_by_ld_and_round_trips(self, cls):
        ld = littlestone_dimension(cls)
        for sample in realizable_samples(cls, 4):
            comp = ld_compress(cls, sample)
            assert comp.size <= ld
            assert reconstruct(cls, comp).sample_error(sample) == 0


class TestAgnosticLearn:
    def test_realizable_sample_fits_exactly(self):
        cls = concept_class(2, ["01"])
        sample = labeled_sample([(0, 0), (1, 1), (0, 0)])
        hyp, report = agnostic_learn(cls, sample)
        assert report.hypothesis_error == 0
        assert report.class_error == 0

    def test_matches_class_optimum_under_noise(self):
        cls = concept_class(2, ["00"])
        sample = labeled_sample([(0, 0), (1, 1), (1, 0)])
        hyp, report = agnostic_learn(cls, sample)
        assert hyp == Hypothesis((0, 0))
        assert report.hypothesis_error == Fraction(1, 3) == report.class_error

    def test_nothing_realizable_returns_zeros(self):
        cls = concept_class(2, ["**"])
        sample = labeled_sample([(0, 1), (1, 1)])
        hyp, report = agnostic_learn(cls, sample)
        assert hyp == Hypothesis((0, 0))
        assert report.kept == 0

    @settings(max_examples=20, deadline=None)
    @given(classes(min_n=2, max_n=4, max_size=8))
    def test_never_worse_than_class(self, cls):
        rng = random.Random(3)
        pairs = [
            (rng.randrange(cls.domain_size), rng.randint(0, 1)) for _ in range(8)
        ]
        hyp, report = agnostic_learn(cls, labeled_sample(pairs))
        assert report.hypothesis_error <= report.class_error <= report.bound

    def test_monte_carlo_generalization_under_noise(self):
        # noisy source: the learner's population error should stay within the
        # deviation bound of the class's expected best fit (generous slack)
        cls = concept_class(2, ["00", "11"])
        dist = uniform_on([(0, 0), (1, 0), (0, 1)])  # label noise at point 0
        m, delta = 60, 0.1
        rng = random.Random(17)
        trials = 200
        err_sum = Fraction(0)
        fit_sum = Fraction(0)
        bound_gap = None
        for _ in range(trials):
            sample = dist.sample(rng, m)
            hyp, report = agnostic_learn(cls, sample, delta=delta, seed=1)
            err_sum += sum(
                w for (x, y), w in dist.atoms if hyp.labels[x] != y
            )
            fit_sum += report.class_error
            bound_gap = report.bound - float(report.class_error)
        mean_err = err_sum / trials
        mean_fit = fit_sum / trials
        sigma = math.sqrt(0.25 / trials)
        assert float(mean_err) <= float(mean_fit) + bound_gap + 3 * sigma


class TestSrm:
    def _hierarchy(self, classes_):
        return [
            (c, lambda s, c=c: agnostic_learn(c, s)[0]) for c in classes_
        ]

    def test_selects_smallest_consistent_class(self):
        small = concept_class(2, ["01"])
        big = concept_class(2, ["00", "01", "10", "11"])
        sample = labeled_sample([(0, 0), (1, 1)])
        sel = srm_select(self._hierarchy([small, big]), sample, mode="realizable")
        assert sel.index == 0
        assert sel.hypothesis.sample_error(sample) == 0

    def test_no_consistent_class_is_reported(self):
        h = concept_class(1, ["0"])
        sample = labeled_sample([(0, 1)])
        with pytest.raises(NoConsistentClass):
            srm_select(self._hierarchy([h]), sample, mode="realizable")

    def test_agnostic_mode_minimizes_penalized_error(self):
        noisy = concept_class(1, ["0"])
        clean = concept_class(1, ["1"])
        sample = labeled_sample([(0, 1), (0, 1), (0, 1)])
        sel = srm_select(
            self._hierarchy([noisy, clean]), sample, mode="agnostic"
        )
        assert sel.index == 1
        # selected score is minimal by construction
        from pcl.core import best_empirical_error

        for i, (cls, _) in enumerate(self._hierarchy([noisy, clean])):
            err = float(best_empirical_error(cls, sample))
            assert sel.bound <= err + sel.per_class_bounds[i] + 1e-12
