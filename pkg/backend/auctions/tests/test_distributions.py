"""
Tests for value distributions and regularity.
"""

import math

import numpy as np
import pytest

from ..core import DomainError, NoDensityError, ParameterError, RegularityError
from ..distributions import (
    EqualRevenue,
    Exponential,
    FamilySpec,
    GeneralizedPareto,
    ProductPrior,
    ShiftedExponential,
    TwoPoint,
    Uniform,
    gamma_alpha,
    hazard_rate,
    iid_prior,
    is_mhr,
    is_regular,
    make_marginal,
    make_prior,
    mass_above_monopoly_revenue,
    monopoly,
    require_regular,
    revenue_curve,
    revenue_values,
    strong_regularity_coefficient,
    tail_envelope,
    two_point_auxiliary,
    virtual_value,
)

ATOMLESS_FAMILIES = [
    Exponential(),
    Exponential(rate=2.5),
    ShiftedExponential(rate=1.0, shift=1.0),
    GeneralizedPareto(0.0),
    GeneralizedPareto(0.3),
    GeneralizedPareto(0.7),
    EqualRevenue(),
    Uniform(),
    Uniform(lo=1.0, hi=3.0),
]
REGULAR_FAMILIES = [Exponential(), Uniform(), GeneralizedPareto(0.3), GeneralizedPareto(0.7), EqualRevenue()]


class TestFamilies:
    """Tests for the built-in families."""

    def test_generalized_pareto_support(self):
        """Test GP support starts at zero and is unbounded."""
        family = GeneralizedPareto(0.5)
        assert family.lower == 0.0
        assert math.isinf(family.upper)

    def test_alpha_out_of_range(self):
        """Test GP rejects alpha above one."""
        with pytest.raises(ParameterError, match="alpha"):
            GeneralizedPareto(1.2)

    def test_uniform_cdf(self):
        """Test uniform CDF is the identity on [0, 1]."""
        assert Uniform().cdf(0.3) == pytest.approx(0.3)

    def test_quantiles(self):
        """Test closed-form quantiles."""
        assert EqualRevenue().quantile(0.5) == pytest.approx(2.0)
        assert GeneralizedPareto(0.5).quantile(0.75) == pytest.approx(1.0)
        assert Exponential().quantile(1.0 - 1.0 / math.e) == pytest.approx(1.0)
        assert ShiftedExponential(rate=1.0, shift=1.0).quantile(1.0 - 1.0 / math.e) == pytest.approx(2.0)

    def test_quantile_domain(self):
        """Test quantile levels outside [0, 1] and q = 1 on unbounded support."""
        with pytest.raises(DomainError):
            Exponential().quantile(1.5)
        with pytest.raises(DomainError, match="infinite quantile"):
            EqualRevenue().quantile(1.0)
        assert Uniform().quantile(1.0) == 1.0

    def test_isf_exact_in_tail(self):
        """Test inverse survival keeps precision where 1 - q underflows."""
        assert Exponential().isf(1e-300) == pytest.approx(300 * math.log(10))
        assert EqualRevenue().isf(1e-12) == pytest.approx(1e12)

    def test_vectorized(self):
        """Test array inputs return arrays of the same shape."""
        q = np.array([0.1, 0.5, 0.9])
        out = Uniform(lo=1.0, hi=3.0).quantile(q)
        np.testing.assert_allclose(out, [1.2, 2.0, 2.8])

    def test_tail_exponents(self):
        """Test the quantile growth exponents."""
        assert EqualRevenue().tail_exponent == 1.0
        assert GeneralizedPareto(0.3).tail_exponent == pytest.approx(0.7)
        assert GeneralizedPareto(1.0).tail_exponent == 0.0
        assert Uniform().tail_exponent == 0.0

    def test_top_revenue(self):
        """Test revenue carried at q -> 0."""
        assert EqualRevenue().top_revenue == 1.0
        assert GeneralizedPareto(0.0).top_revenue == 1.0
        assert GeneralizedPareto(0.5).top_revenue == 0.0
        assert revenue_curve(EqualRevenue(), 0.0).revenue == 1.0

    def test_two_point_tail_mass(self):
        """Test atoms are counted by tail_mass."""
        family = TwoPoint(high_value=2.0, high_prob=0.25)
        assert family.tail_mass(0.0) == 1.0
        assert family.tail_mass(2.0) == 0.25
        assert family.tail_mass(2.5) == 0.0
        assert family.mean() == pytest.approx(0.5)

    def test_sample_moments(self):
        """Test inverse-transform sampling reproduces the mean."""
        rng = np.random.default_rng(42)
        draws = Exponential(rate=2.0).sample(rng, 200_000)
        assert draws.mean() == pytest.approx(0.5, abs=0.01)

    @pytest.mark.parametrize("family", ATOMLESS_FAMILIES, ids=lambda f: f"{f.kind.value}-{f.params()}")
    def test_cdf_inverts_quantile(self, family):
        """Test F(F^{-1}(q)) = q on random levels."""
        q = np.random.default_rng(42).uniform(size=1000)
        np.testing.assert_allclose(family.cdf(family.quantile(q)), q, rtol=0, atol=1e-10)


class TestSpecs:
    """Tests for family-spec records."""

    def test_make_marginal(self):
        """Test records build the right family."""
        family = make_marginal({"family": "generalized_pareto", "params": {"alpha": 0.3}})
        assert family == GeneralizedPareto(0.3)
        assert make_marginal(FamilySpec(family="er")) == EqualRevenue()

    def test_spec_round_trip(self):
        """Test spec() rebuilds an equal marginal."""
        family = ShiftedExponential(rate=2.0, shift=1.0)
        assert make_marginal(family.spec()) == family

    def test_unknown_family(self):
        """Test unknown family names are rejected."""
        with pytest.raises(ParameterError, match="unknown"):
            make_marginal({"family": "lognormal"})

    def test_unknown_parameter(self):
        """Test parameters of another family are rejected."""
        with pytest.raises(ParameterError, match="rate"):
            make_marginal({"family": "uniform", "params": {"rate": 1.0}})

    def test_missing_alpha(self):
        """Test GP requires alpha."""
        with pytest.raises(ParameterError, match="alpha"):
            make_marginal({"family": "generalized_pareto"})

    def test_product_prior(self):
        """Test priors from records and i.i.d. copies."""
        prior = make_prior([{"family": "exponential"}, {"family": "uniform"}])
        assert prior.m == 2
        assert not prior.is_iid
        assert iid_prior(Exponential(), 3).is_iid

        rng = np.random.default_rng(42)
        assert prior.sample(rng, (5, 4)).shape == (5, 4, 2)

    def test_empty_prior(self):
        """Test a prior needs at least one item."""
        with pytest.raises(ParameterError):
            ProductPrior(())
        with pytest.raises(ParameterError):
            iid_prior(Exponential(), 0)


class TestRegularity:
    """Tests for virtual values, hazards and regularity coefficients."""

    def test_virtual_values(self):
        """Test closed-form virtual values."""
        assert virtual_value(GeneralizedPareto(0.5), 3.0) == pytest.approx(1.0)
        assert virtual_value(Exponential(), 1.0) == pytest.approx(0.0)
        assert virtual_value(EqualRevenue(), 7.0) == pytest.approx(0.0)
        assert virtual_value(Uniform(), 0.75) == pytest.approx(0.5)

    def test_virtual_value_errors(self):
        """Test atoms and out-of-support values are rejected."""
        with pytest.raises(NoDensityError, match="no density"):
            virtual_value(TwoPoint(high_value=1.0), 0.5)
        with pytest.raises(DomainError, match="hazard undefined"):
            virtual_value(EqualRevenue(), 0.5)

    def test_hazard_rate(self):
        """Test hazard of exponential and equal revenue."""
        assert hazard_rate(Exponential(rate=3.0), 2.0) == pytest.approx(3.0)
        assert hazard_rate(EqualRevenue(), 4.0) == pytest.approx(0.25)

    def test_strong_regularity_coefficient(self):
        """Test coefficients on the default grid."""
        assert strong_regularity_coefficient(Exponential()) == pytest.approx(1.0, abs=1e-9)
        assert strong_regularity_coefficient(EqualRevenue()) == pytest.approx(0.0, abs=1e-9)
        assert strong_regularity_coefficient(GeneralizedPareto(0.3)) == pytest.approx(0.3, abs=1e-9)

    def test_custom_grid(self):
        """Test coefficient on a caller-supplied grid."""
        assert strong_regularity_coefficient(Uniform(), [0.1, 0.4, 0.9]) == pytest.approx(2.0)
        with pytest.raises(DomainError):
            strong_regularity_coefficient(Uniform(), [0.5, 0.2])

    def test_classes(self):
        """Test regular and MHR classification."""
        assert is_mhr(Exponential())
        assert is_mhr(Uniform())
        assert not is_mhr(GeneralizedPareto(0.5))
        assert is_regular(EqualRevenue())
        assert not is_regular(TwoPoint(high_value=1.0))

    def test_require_regular(self):
        """Test atom-bearing marginals fail the regularity requirement."""
        require_regular([Exponential(), EqualRevenue()])
        with pytest.raises(RegularityError):
            require_regular(TwoPoint(high_value=1.0))

    @pytest.mark.parametrize("family", REGULAR_FAMILIES, ids=lambda f: f"{f.kind.value}-{f.params()}")
    def test_revenue_curve_concave(self, family):
        """Test R((a + b) / 2) >= (R(a) + R(b)) / 2 on random pairs of sale probabilities."""
        rng = np.random.default_rng(42)
        a, b = rng.uniform(size=1000), rng.uniform(size=1000)
        midpoint = revenue_values(family, (a + b) / 2)
        chord = (revenue_values(family, a) + revenue_values(family, b)) / 2
        assert np.all(midpoint >= chord - 1e-12)


class TestEnvelope:
    """Tests for the Gamma_alpha tail envelope."""

    def test_gamma_alpha_values(self):
        """Test Gamma_0 and Gamma_1 closed forms."""
        assert gamma_alpha(0.0, 1.0) == pytest.approx(0.5)
        assert gamma_alpha(1.0, 0.0) == pytest.approx(1.0)
        assert gamma_alpha(1.0, 2.0) == pytest.approx(math.exp(-2.0))

    def test_gamma_alpha_inverse(self):
        """Test the inverse recovers the argument."""
        assert gamma_alpha(0.5, gamma_alpha(0.5, 2.0), inverse=True) == pytest.approx(2.0)

    def test_gamma_alpha_domain(self):
        """Test argument checks."""
        with pytest.raises(DomainError):
            gamma_alpha(0.5, -1.0)
        with pytest.raises(DomainError):
            gamma_alpha(0.5, 0.0, inverse=True)

    def test_envelope_met_by_generalized_pareto(self):
        """Test GP survival lies on the envelope through its own anchors."""
        alpha = 0.4
        family = GeneralizedPareto(alpha)
        v = np.array([0.5, 1.0, 3.0, 10.0])
        envelope = tail_envelope(alpha, v, 0.0, 1.0, 2.0, family.survival(2.0))
        np.testing.assert_allclose(envelope, family.survival(v), rtol=1e-12)

    def test_envelope_met_by_exponential(self):
        """Test the exponential meets the alpha = 1 envelope."""
        family = Exponential()
        envelope = tail_envelope(1.0, 4.0, 1.0, family.survival(1.0), 2.0, family.survival(2.0))
        assert envelope == pytest.approx(family.survival(4.0))


class TestMonopoly:
    """Tests for monopoly pricing and the two-point auxiliary."""

    def test_exponential(self):
        """Test reserve 1 and revenue 1/e."""
        result = monopoly(Exponential())
        assert result.reserve == pytest.approx(1.0, abs=1e-6)
        assert result.revenue == pytest.approx(1.0 / math.e, abs=1e-9)

    def test_uniform(self):
        """Test reserve 1/2 and revenue 1/4."""
        reserve, revenue = monopoly(Uniform())
        assert reserve == pytest.approx(0.5, abs=1e-6)
        assert revenue == pytest.approx(0.25, abs=1e-12)

    def test_equal_revenue_ties(self):
        """Test flat revenue curves resolve to the largest sale probability."""
        result = monopoly(EqualRevenue())
        assert result.revenue == pytest.approx(1.0)
        assert result.quantile == pytest.approx(1.0)
        assert result.reserve == pytest.approx(1.0)

    def test_two_point(self):
        """Test the closed-form two-point monopoly."""
        result = monopoly(TwoPoint(high_value=3.0, high_prob=0.4))
        assert result.reserve == 3.0
        assert result.revenue == pytest.approx(1.2)

    def test_two_point_auxiliary(self):
        """Test atoms at 0 and OPT_1 with mass one half each."""
        aux = two_point_auxiliary(Exponential())
        assert aux.high_value == pytest.approx(1.0 / math.e, abs=1e-9)
        assert aux.high_prob == 0.5
        assert two_point_auxiliary(Uniform()).high_value == pytest.approx(0.25)
        assert two_point_auxiliary(EqualRevenue()).high_value == pytest.approx(1.0)

    @pytest.mark.parametrize("family", REGULAR_FAMILIES, ids=lambda f: f"{f.kind.value}-{f.params()}")
    def test_two_point_auxiliary_dominated(self, family):
        """Test the auxiliary sits below the marginal in first-order dominance."""
        aux = two_point_auxiliary(family)
        v = np.linspace(0.0, 20.0, 4001)
        assert np.all(aux.cdf(v) >= family.cdf(v))

    def test_mass_above_monopoly_revenue(self):
        """Test at least half the mass sits above OPT_1 for regular marginals."""
        for family in (Exponential(), Uniform(), GeneralizedPareto(0.3), EqualRevenue()):
            assert mass_above_monopoly_revenue(family) >= 0.5
        assert mass_above_monopoly_revenue(Exponential()) == pytest.approx(math.exp(-1.0 / math.e), abs=1e-9)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
