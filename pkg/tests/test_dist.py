import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxvar import (
    AllZeroWeights,
    EmptyInput,
    NegativeProb,
    NonFiniteValue,
    OutOfRange,
    SeededSampler,
    abs_expectation,
    affine,
    cdf,
    expectation,
    from_samples,
    quantile,
    sample,
)

from helpers import d4


def finite_floats(lo=-100.0, hi=100.0):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False)


@st.composite
def small_laws(draw, max_atoms=12):
    m = draw(st.integers(1, max_atoms))
    values = draw(
        st.lists(finite_floats(), min_size=m, max_size=m)
    )
    weights = draw(
        st.lists(st.floats(0.01, 1.0, allow_nan=False), min_size=m, max_size=m)
    )
    return from_samples(list(zip(values, weights)))


class TestFromSamples:
    def test_merges_duplicates_and_normalizes(self):
        d = from_samples([(3, 1), (1, 1), (3, 1), (2, 1)])
        assert d.values.tolist() == [1.0, 2.0, 3.0]
        assert d.probs.tolist() == [0.25, 0.25, 0.5]

    def test_single_atom(self):
        d = from_samples([(5, 2)])
        assert d.values.tolist() == [5.0]
        assert d.probs.tolist() == [1.0]

    def test_uniform_weights(self):
        assert d4().probs.tolist() == [0.25] * 4

    def test_zero_weight_atoms_dropped(self):
        d = from_samples([(1, 0), (2, 1)])
        assert d.values.tolist() == [2.0]

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            from_samples([])

    def test_non_finite(self):
        with pytest.raises(NonFiniteValue):
            from_samples([(math.nan, 1)])
        with pytest.raises(NonFiniteValue):
            from_samples([(1, math.inf)])

    def test_all_zero_weights(self):
        with pytest.raises(AllZeroWeights):
            from_samples([(1, 0), (2, 0)])

    def test_negative_weight(self):
        with pytest.raises(NegativeProb):
            from_samples([(1, -0.5), (2, 1)])

    def test_arrays_are_immutable(self):
        d = d4()
        with pytest.raises(ValueError):
            d.values[0] = 99.0


class TestCdf:
    def test_midpoint(self):
        c = cdf(d4(), 2)
        assert c.le_prob == 0.5
        assert c.gt_prob == 0.5

    def test_below_support(self):
        assert cdf(d4(), 0.5).le_prob == 0.0

    def test_full_support(self):
        assert cdf(d4(), 4).le_prob == 1.0

    def test_above_max_and_below_min(self):
        d = d4()
        assert cdf(d, 1e9).le_prob == 1.0
        assert cdf(d, -1e9).le_prob == 0.0

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteValue):
            cdf(d4(), math.nan)

    @given(small_laws(), finite_floats(-150, 150))
    def test_complement_exact(self, d, t):
        c = cdf(d, t)
        assert c.le_prob + c.gt_prob == 1.0

    @given(small_laws())
    def test_boundary_invariants(self, d):
        assert cdf(d, float(d.values[-1])).le_prob == 1.0
        just_below_min = float(np.nextafter(d.values[0], -np.inf))
        assert cdf(d, just_below_min).le_prob == 0.0


class TestQuantile:
    def test_examples(self):
        d = d4()
        assert quantile(d, 0.5) == 2.0
        assert quantile(d, 0.51) == 3.0
        assert quantile(d, 1.0) == 4.0
        assert quantile(d, 0.0) == 1.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            quantile(d4(), 1.5)
        with pytest.raises(OutOfRange):
            quantile(d4(), -0.1)

    @given(small_laws())
    def test_quantile_of_atom_cdf_recovers_atom(self, d):
        for v in d.values:
            assert quantile(d, cdf(d, v).le_prob) == v


class TestExpectation:
    def test_examples(self):
        assert expectation(d4()) == 2.5
        assert expectation(from_samples([(5, 1)])) == 5.0
        assert expectation(from_samples([(0, 1), (1, 1)])) == 0.5

    def test_abs_examples(self):
        assert abs_expectation(d4()) == 2.5
        assert abs_expectation(from_samples([(-1, 1), (1, 1)])) == 1.0
        assert abs_expectation(from_samples([(-3, 1)])) == 3.0

    @given(small_laws(), finite_floats(-10, 10), finite_floats(-10, 10))
    def test_affine_identity(self, d, a, b):
        lhs = expectation(affine(d, a, b))
        rhs = a * expectation(d) + b
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


class TestAffine:
    def test_scale(self):
        d = affine(d4(), 2, 0)
        assert d.values.tolist() == [2.0, 4.0, 6.0, 8.0]

    def test_degenerate(self):
        d = affine(d4(), 0, 7)
        assert d.values.tolist() == [7.0]
        assert d.probs.tolist() == [1.0]

    def test_negation_reorders(self):
        d = affine(d4(), -1, 0)
        assert d.values.tolist() == [-4.0, -3.0, -2.0, -1.0]

    def test_rounding_collision_remerges(self):
        # a huge shift absorbs the 2^-52 gap, colliding the two atoms
        tiny = from_samples([(1.0, 1), (1.0 + 2**-52, 1)])
        squashed = affine(tiny, 1.0, 1e30)
        assert squashed.atom_count == 1
        assert squashed.probs.tolist() == [1.0]

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteValue):
            affine(d4(), math.inf, 0)


class TestSampler:
    def test_degenerate_law(self):
        d = from_samples([(5, 1)])
        draws = sample(d, SeededSampler(123), 3)
        assert draws.tolist() == [5.0, 5.0, 5.0]

    def test_same_seed_same_sequence(self):
        a = sample(d4(), SeededSampler(99, 3), 1000)
        b = sample(d4(), SeededSampler(99, 3), 1000)
        assert np.array_equal(a, b)

    def test_substreams_differ(self):
        a = sample(d4(), SeededSampler(99, 0), 1000)
        b = sample(d4(), SeededSampler(99, 1), 1000)
        assert not np.array_equal(a, b)

    def test_draws_advance_state(self):
        s = SeededSampler(5)
        first = sample(d4(), s, 10)
        second = sample(d4(), s, 10)
        assert not np.array_equal(first, second)

    def test_mean_within_four_se(self):
        # exact variance of d4 is 1.25 -> SE = sqrt(1.25/1e6)
        draws = sample(d4(), SeededSampler(2024), 10**6)
        se = math.sqrt(1.25 / 10**6)
        assert abs(float(np.mean(draws)) - 2.5) <= 4 * se

    def test_seed_must_be_integer(self):
        with pytest.raises(OutOfRange):
            SeededSampler(1.5)

    def test_negative_count_rejected(self):
        with pytest.raises(OutOfRange):
            sample(d4(), SeededSampler(1), -1)

    @settings(max_examples=25, deadline=None)
    @given(small_laws())
    def test_empirical_cdf_within_dkw_band(self, d):
        # DKW band at level 1e-6 for 1e5 draws
        count = 10**5
        eps = math.sqrt(math.log(2.0 / 1e-6) / (2.0 * count))
        draws = sample(d, SeededSampler(7, 1), count)
        for v, f in zip(d.values, d.cumulative):
            emp = float(np.count_nonzero(draws <= v)) / count
            assert abs(emp - f) <= eps
