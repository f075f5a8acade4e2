"""
Tests for order statistics, quadrature and the three-interval structure.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from ..analysis import (
    OrderStatQuery,
    expected_order_stat,
    harmonic,
    harmonic_exact,
    integrate_quantile,
    order_stat,
    order_stat_density,
    order_stat_finite_variance,
    sampled_order_stat,
    three_interval_crossings,
)
from ..core import DivergentExpectationError, EstimateMethod, ParameterError, SampleConfig
from ..distributions import EqualRevenue, Exponential, GeneralizedPareto, ShiftedExponential, TwoPoint, Uniform


class TestDensity:
    """Tests for xi_{k:n}."""

    def test_values(self):
        """Test the density at q = 1/2."""
        assert order_stat_density(1, 3, 0.5) == pytest.approx(0.75)
        assert order_stat_density(2, 4, 0.5) == pytest.approx(0.75)

    def test_normalization(self):
        """Test the density integrates to one."""
        value, _ = integrate.quad(lambda q: order_stat_density(2, 5, q), 0.0, 1.0, epsabs=1e-12)
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_rank_out_of_range(self):
        """Test ranks outside 1..n are rejected."""
        with pytest.raises(ParameterError):
            order_stat_density(4, 3, 0.5)

    def test_vectorized(self):
        """Test array input."""
        q = np.array([0.0, 0.5, 1.0])
        np.testing.assert_allclose(order_stat_density(1, 2, q), [0.0, 1.0, 2.0])


class TestHarmonic:
    """Tests for harmonic numbers."""

    def test_exact(self):
        """Test exact rationals."""
        assert harmonic_exact(4) == Fraction(25, 12)
        assert harmonic_exact(0) == 0

    def test_float_matches_exact(self):
        """Test the float path on both sides of the digamma switch."""
        for n in (1, 10, 64, 65, 500):
            assert harmonic(n) == pytest.approx(float(harmonic_exact(n)), rel=1e-13)


class TestOrderStat:
    """Tests for F_{k:n}."""

    def test_exponential_max(self):
        """Test F_{1:4} = H_4 for the unit exponential."""
        assert order_stat(Exponential(), 1, 4) == pytest.approx(25 / 12)

    def test_exponential_second_quadrature(self):
        """Test the quadrature path against H_4 - 1."""
        assert order_stat(Exponential(), 2, 4, method="quadrature") == pytest.approx(13 / 12, abs=1e-8)

    def test_gp_one_is_exponential(self):
        """Test F_{2:N} = F_{1:N} - 1 at alpha = 1."""
        family = GeneralizedPareto(1.0)
        for N in (2, 5, 9):
            assert order_stat(family, 2, N) == pytest.approx(order_stat(family, 1, N) - 1.0)

    def test_shifted_exponential(self):
        """Test the shift moves every order statistic."""
        assert order_stat(ShiftedExponential(rate=1.0, shift=1.0), 2, 3) == pytest.approx(1.0 + 5 / 6)

    def test_equal_revenue(self):
        """Test n/(k-1) in closed form and by quadrature."""
        assert order_stat(EqualRevenue(), 2, 3) == pytest.approx(3.0)
        assert order_stat(EqualRevenue(), 2, 3, method="quadrature") == pytest.approx(3.0, abs=1e-8)
        assert order_stat(EqualRevenue(), 2, 5, method="quadrature") == pytest.approx(5.0, abs=1e-6)

    def test_uniform(self):
        """Test the uniform closed form."""
        assert order_stat(Uniform(), 1, 2) == pytest.approx(2 / 3)
        assert order_stat(Uniform(lo=1.0, hi=3.0), 2, 3) == pytest.approx(2.0)

    def test_two_point(self):
        """Test binomial tail for atoms."""
        family = TwoPoint(high_value=2.0, high_prob=0.5)
        assert order_stat(family, 1, 2) == pytest.approx(1.5)
        assert order_stat(family, 2, 2) == pytest.approx(0.5)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("k,n", [(1, 1), (1, 3), (2, 3), (2, 10), (3, 7)])
    def test_gp_closed_form_matches_quadrature(self, alpha, k, n):
        """Test the betaln closed form against tail-substituted quadrature."""
        family = GeneralizedPareto(alpha)
        closed = order_stat(family, k, n)
        assert order_stat(family, k, n, method="quadrature") == pytest.approx(closed, rel=1e-8, abs=1e-8)

    def test_gp_mean(self):
        """Test F_{1:1} is the mean 1/alpha - 1."""
        assert order_stat(GeneralizedPareto(0.25), 1, 1) == pytest.approx(3.0)

    def test_gp_second_order_identity(self):
        """Test F_{2:N} = alpha F_{1:N} - (1 - alpha)."""
        for alpha in (0.25, 0.5, 0.75):
            family = GeneralizedPareto(alpha)
            for N in (2, 7, 30):
                expected = alpha * order_stat(family, 1, N) - (1.0 - alpha)
                assert order_stat(family, 2, N, method="quadrature") == pytest.approx(expected, abs=1e-8)

    def test_empty_competitor(self):
        """Test F_{2:1} = 0 by convention."""
        assert order_stat(Exponential(), 2, 1) == 0.0
        assert order_stat(EqualRevenue(), 2, 1) == 0.0

    def test_divergent(self):
        """Test infinite expectations are reported."""
        with pytest.raises(DivergentExpectationError, match="divergent"):
            order_stat(EqualRevenue(), 1, 3)
        with pytest.raises(DivergentExpectationError):
            order_stat(GeneralizedPareto(0.0), 1, 2)

    def test_finite_variance(self):
        """Test second moments need k > 2 gamma."""
        assert not order_stat_finite_variance(EqualRevenue(), 2)
        assert order_stat_finite_variance(EqualRevenue(), 3)
        assert order_stat_finite_variance(GeneralizedPareto(0.6), 1)

    def test_invalid_query(self):
        """Test rank and size validation."""
        with pytest.raises(ParameterError):
            OrderStatQuery(Exponential(), 0, 3)
        with pytest.raises(ParameterError):
            OrderStatQuery(Exponential(), 3, 2)
        with pytest.raises(ParameterError, match="method"):
            expected_order_stat(OrderStatQuery(Exponential(), 1, 2), method="simpson")

    def test_sampled(self):
        """Test Monte Carlo F_{1:2} of the exponential against 3/2."""
        estimate = sampled_order_stat(Exponential(), 1, 2, SampleConfig(seed=42, samples=200_000))
        assert estimate.method is EstimateMethod.MONTE_CARLO
        assert abs(estimate.mean - 1.5) <= 4 * estimate.stderr

    @pytest.mark.parametrize("family", [Exponential(), Uniform()], ids=["exponential", "uniform"])
    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("n", range(1, 7))
    def test_expected_matches_sampled(self, family, k, n):
        """Test F_{k:n} against Monte Carlo for small k and n."""
        exact = expected_order_stat(OrderStatQuery(family, k, n))
        estimate = sampled_order_stat(family, k, n, SampleConfig(seed=100 * n + k, samples=100_000))
        assert abs(estimate.mean - exact) <= 4 * estimate.stderr + 1e-12

    def test_sampled_empty_competitor(self):
        """Test the sampled path honours F_{2:1} = 0."""
        estimate = sampled_order_stat(Uniform(), 2, 1, SampleConfig(seed=1, samples=10))
        assert estimate.mean == 0.0
        assert estimate.is_exact


class TestQuadrature:
    """Tests for quantile-space integration."""

    def test_mean_of_heavy_tail(self):
        """Test the tail substitution on a GP mean."""
        result = integrate_quantile(GeneralizedPareto(0.3), lambda q, s: 1.0)
        assert result.value == pytest.approx(1.0 / 0.3 - 1.0, rel=1e-8)

    def test_partial_range(self):
        """Test an upper quantile limit below one."""
        result = integrate_quantile(Exponential(), lambda q, s: 1.0, upper=1.0 - math.exp(-1.0 / math.e))
        t = 1.0 / math.e
        assert result.value == pytest.approx(1.0 - math.exp(-t) * (1.0 + t), abs=1e-10)

    def test_jumps(self):
        """Test quantile jumps of atom-bearing families."""
        result = integrate_quantile(TwoPoint(high_value=4.0, high_prob=0.25), lambda q, s: 1.0)
        assert result.value == pytest.approx(1.0, abs=1e-9)


class TestThreeInterval:
    """Tests for the crossing points of xi_{2:N} and xi_{1:n}."""

    def test_adjacent(self):
        """Test N = n + 1 starts the interval at zero."""
        crossing = three_interval_crossings(1, 2)
        assert crossing.q_dagger == 0.0
        assert crossing.q_ddagger == pytest.approx(0.5)

        crossing = three_interval_crossings(2, 3)
        assert crossing.q_dagger == 0.0
        assert crossing.q_ddagger == pytest.approx(2 / 3)

    def test_roots(self):
        """Test the crossings are roots of the density gap."""
        crossing = three_interval_crossings(2, 7)
        for q in (crossing.q_dagger, crossing.q_ddagger):
            assert order_stat_density(2, 7, q) == pytest.approx(order_stat_density(1, 2, q), abs=1e-9)
        mid = 0.5 * (crossing.q_dagger + crossing.q_ddagger)
        assert order_stat_density(2, 7, mid) > order_stat_density(1, 2, mid)

    def test_invalid(self):
        """Test N must exceed n."""
        with pytest.raises(ParameterError):
            three_interval_crossings(3, 3)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
