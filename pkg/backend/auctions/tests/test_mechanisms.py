"""
Tests for mechanism evaluation.
"""

import math

import numpy as np
import pytest

from ..core import (
    DegenerateCoreError,
    Estimate,
    EstimateMethod,
    MechanismKind,
    ParameterError,
    RegularityError,
    SampleConfig,
    combine_stderr,
)
from ..distributions import (
    EqualRevenue,
    Exponential,
    ProductPrior,
    ShiftedExponential,
    TwoPoint,
    Uniform,
    iid_prior,
)
from ..mechanisms import (
    best_posted_price,
    bundle_hazard_profile,
    bundle_price_revenue,
    bundling_gap_experiment,
    eval_brev,
    eval_cdw,
    eval_core,
    eval_simple,
    eval_srev,
    revenue_upper_bounds,
    tariff_fee,
    top_two,
    two_part_tariff,
)
from ..sampling import chunk_sizes, derive_seed, monte_carlo


def _cfg(samples: int = 200_000, seed: int = 42, **kwargs) -> SampleConfig:
    return SampleConfig(seed=seed, samples=samples, **kwargs)


def _close(estimate: Estimate, target: float, width: float = 4.0) -> bool:
    return abs(estimate.mean - target) <= width * estimate.stderr + 1e-12


QUADRATURE = _cfg(method=EstimateMethod.QUADRATURE)


class TestSampling:
    """Tests for the deterministic Monte Carlo driver."""

    def test_chunk_sizes(self):
        """Test draws are split as evenly as possible."""
        assert chunk_sizes(10, 3) == [4, 3, 3]
        assert sum(chunk_sizes(200_001, 8)) == 200_001

    def test_derive_seed(self):
        """Test derived seeds are stable and distinct."""
        assert derive_seed(1, 2) == derive_seed(1, 2)
        assert derive_seed(1, 2) != derive_seed(2, 1)

    def test_reproducible(self):
        """Test identical configs give bit-identical estimates."""
        prior = iid_prior(Exponential(), 3)
        first = eval_simple(MechanismKind.BSPA, prior, 3, _cfg(20_000))
        second = eval_simple(MechanismKind.BSPA, prior, 3, _cfg(20_000))
        assert first == second

    def test_worker_count_does_not_change_results(self):
        """Test the estimate does not depend on n_jobs."""
        prior = iid_prior(Uniform(), 2)
        serial = eval_simple(MechanismKind.VCG, prior, 3, _cfg(20_000, n_jobs=1))
        parallel = eval_simple(MechanismKind.VCG, prior, 3, _cfg(20_000, n_jobs=2))
        assert serial.mean == parallel.mean
        assert serial.stderr == parallel.stderr

    def test_seed_changes_results(self):
        """Test different seeds draw different samples."""
        prior = iid_prior(Uniform(), 2)
        a = eval_simple(MechanismKind.WEL, prior, 2, _cfg(5_000, seed=1))
        b = eval_simple(MechanismKind.WEL, prior, 2, _cfg(5_000, seed=2))
        assert a.mean != b.mean

    def test_invalid_config(self):
        """Test sampling parameter validation."""
        with pytest.raises(ParameterError, match="samples"):
            SampleConfig(samples=0)
        with pytest.raises(ParameterError, match="seed"):
            SampleConfig(seed=-1)

    def test_capped_batch(self):
        """Test wide instances shrink the batch size."""
        cfg = SampleConfig(batch_size=65_536).capped(100 * 50)
        assert cfg.batch_size * 5000 <= 1 << 22
        assert SampleConfig(batch_size=10).capped(3).batch_size == 10

    def test_combine_stderr(self):
        """Test independent errors add in quadrature."""
        a = Estimate(1.0, 3.0, 10, 0, EstimateMethod.MONTE_CARLO)
        b = Estimate(1.0, 4.0, 10, 0, EstimateMethod.MONTE_CARLO)
        assert combine_stderr(a, b) == pytest.approx(5.0)

    def test_constant_statistic(self):
        """Test a constant statistic has zero spread but stays a sampled estimate."""
        estimate = monte_carlo(lambda rng, batch: np.zeros(batch), _cfg(1_000))
        assert estimate.mean == 0.0
        assert estimate.stderr == 0.0
        assert estimate.method is EstimateMethod.MONTE_CARLO
        assert not estimate.is_exact


class TestSimpleMechanisms:
    """Tests for WEL, VCG and BSPA."""

    def test_welfare_one_bidder(self):
        """Test WEL of one uniform item and one bidder is its mean."""
        estimate = eval_simple(MechanismKind.WEL, iid_prior(Uniform(), 1), 1, _cfg())
        assert _close(estimate, 0.5)

    def test_welfare_quadrature(self):
        """Test the additive quadrature path for several items."""
        estimate = eval_simple(MechanismKind.WEL, iid_prior(Exponential(), 3), 2, QUADRATURE)
        assert estimate.is_exact
        assert estimate.mean == pytest.approx(4.5)

    def test_vcg_exponential(self):
        """Test VCG with four bidders on one exponential item is H_4 - 1."""
        estimate = eval_simple(MechanismKind.VCG, iid_prior(Exponential(), 1), 4, QUADRATURE)
        assert estimate.mean == pytest.approx(13 / 12, abs=1e-8)

    def test_equal_revenue_second_prices(self):
        """Test BSPA with 3 and VCG with 5 bidders on one equal-revenue item."""
        prior = iid_prior(EqualRevenue(), 1)
        assert eval_simple(MechanismKind.BSPA, prior, 3, QUADRATURE).mean == pytest.approx(3.0, abs=1e-6)
        assert eval_simple(MechanismKind.VCG, prior, 5, QUADRATURE).mean == pytest.approx(5.0, abs=1e-6)

    def test_heavy_single_item_uses_quadrature(self):
        """Test infinite-variance single items skip Monte Carlo."""
        estimate = eval_simple(MechanismKind.VCG, iid_prior(EqualRevenue(), 1), 3, _cfg(1000))
        assert estimate.method is EstimateMethod.QUADRATURE
        assert estimate.mean == pytest.approx(3.0)

    def test_infinite_welfare(self):
        """Test divergent welfare is a flagged result, not an error."""
        estimate = eval_simple(MechanismKind.WEL, iid_prior(EqualRevenue(), 2), 2, _cfg(1000))
        assert math.isinf(estimate.mean)
        assert estimate.is_infinite

    def test_single_bidder_second_price(self):
        """Test a lone bidder pays nothing."""
        estimate = eval_simple(MechanismKind.BSPA, iid_prior(Exponential(), 4), 1, _cfg(1000))
        assert estimate.mean == 0.0
        assert estimate.is_exact

    def test_bspa_monte_carlo(self):
        """Test BSPA with two bidders on two uniform items against its exact value."""
        # E[min(S1, S2)] = 1 - E|S1 - S2| / 2 for two triangular bundle values
        estimate = eval_simple(MechanismKind.BSPA, iid_prior(Uniform(), 2), 2, _cfg())
        assert _close(estimate, 1.0 - 7.0 / 30.0)

    def test_heavy_tail_flag(self):
        """Test median-of-means reporting for an infinite-variance bundle price."""
        estimate = eval_simple(MechanismKind.BSPA, iid_prior(EqualRevenue(), 2), 2, _cfg(50_000))
        assert "infinite_variance" in estimate.flags

    def test_string_kind_and_errors(self):
        """Test kind parsing and argument checks."""
        prior = iid_prior(Uniform(), 1)
        assert eval_simple("WEL", prior, 1, QUADRATURE).mean == pytest.approx(0.5)
        with pytest.raises(ParameterError):
            eval_simple(MechanismKind.SREV, prior, 1, QUADRATURE)
        with pytest.raises(ParameterError, match="bidders"):
            eval_simple(MechanismKind.WEL, prior, 0, QUADRATURE)

    def test_top_two(self):
        """Test top two along an axis, zero second for one entry."""
        top, second = top_two(np.array([[3.0, 1.0, 2.0]]), axis=1)
        assert top[0] == 3.0 and second[0] == 2.0
        top, second = top_two(np.array([[5.0]]), axis=1)
        assert top[0] == 5.0 and second[0] == 0.0


class TestPricing:
    """Tests for SRev and BRev."""

    def test_srev_single_bidder(self):
        """Test per-item monopoly revenues add up."""
        assert eval_srev(iid_prior(Exponential(), 3), 1, _cfg()).mean == pytest.approx(3 / math.e, abs=1e-9)
        assert eval_srev(iid_prior(EqualRevenue(), 4), 1, _cfg()).mean == pytest.approx(4.0)
        assert eval_srev(iid_prior(Uniform(), 2), 1, _cfg()).mean == pytest.approx(0.5)

    def test_srev_two_bidders(self):
        """Test Myerson revenue of one uniform item and two bidders is 5/12."""
        estimate = eval_srev(iid_prior(Uniform(), 1), 2, _cfg())
        assert _close(estimate, 5 / 12)

    def test_srev_boundary_term(self):
        """Test tail revenue at q -> 0 is added per bidder."""
        estimate = eval_srev(iid_prior(EqualRevenue(), 1), 2, _cfg(20_000))
        assert estimate.details["boundary"] == 2.0
        assert estimate.mean == pytest.approx(2.0)

    def test_srev_rejects_irregular(self):
        """Test several bidders need regular marginals."""
        with pytest.raises(RegularityError):
            eval_srev(ProductPrior((TwoPoint(high_value=1.0),)), 2, _cfg(1000))

    def test_brev_single_item(self):
        """Test the bundle of one item is the item."""
        estimate = eval_brev(iid_prior(Exponential(), 1), 1, _cfg())
        assert estimate.mean == pytest.approx(1 / math.e, abs=0.01)
        assert estimate.details["price"] > 0

    def test_four_brev_covers_srev(self):
        """Test 4 BRev_1 >= SRev_1 on two exponentials."""
        prior = iid_prior(Exponential(), 2)
        brev = eval_brev(prior, 1, _cfg())
        assert 4 * brev.mean >= eval_srev(prior, 1, _cfg()).mean
        assert brev.mean >= 0.1839

    def test_brev_reserve(self):
        """Test the reserve auction on the bundle beats no reserve."""
        prior = iid_prior(Uniform(), 2)
        brev = eval_brev(prior, 2, _cfg(100_000))
        bspa = eval_simple(MechanismKind.BSPA, prior, 2, _cfg(100_000))
        assert "reserve" in brev.details
        assert brev.mean >= bspa.mean - 4 * combine_stderr(brev, bspa)

    def test_fixed_price(self):
        """Test a posted bundle price against its exact revenue."""
        estimate = bundle_price_revenue(iid_prior(Uniform(), 1), 0.5, _cfg())
        assert _close(estimate, 0.25)
        with pytest.raises(ParameterError):
            eval_brev(iid_prior(Uniform(), 1), 2, _cfg(), price=0.5)

    def test_best_posted_price(self):
        """Test the empirical revenue maximizer."""
        bundles = np.arange(1.0, 101.0)
        assert best_posted_price(bundles) == 50.0


class TestBenchmarks:
    """Tests for the quantile-duality benchmark and the core."""

    def test_cdw_equal_revenue(self):
        """Test CDW_1 of one equal-revenue item is 1."""
        estimate = eval_cdw(iid_prior(EqualRevenue(), 1), 1, _cfg())
        assert estimate.is_exact
        assert estimate.mean == pytest.approx(1.0, abs=1e-9)

    def test_cdw_single_exponential(self):
        """Test CDW_1 of one exponential item is 1/e by quadrature and sampling."""
        prior = iid_prior(Exponential(), 1)
        assert eval_cdw(prior, 1, QUADRATURE).mean == pytest.approx(1 / math.e, abs=1e-8)
        assert _close(eval_cdw(prior, 1, _cfg()), 1 / math.e)

    def test_cdw_two_exponentials(self):
        """Test CDW_1 of two exponentials against E[(max - 1)+] + E[min]."""
        expected = 2 / math.e - math.exp(-2) / 2 + 0.5
        assert _close(eval_cdw(iid_prior(Exponential(), 2), 1, _cfg()), expected)

    def test_cdw_dominates_srev(self):
        """Test the benchmark sits above separate selling."""
        prior = iid_prior(Uniform(), 2)
        cdw = eval_cdw(prior, 2, _cfg(100_000))
        srev = eval_srev(prior, 2, _cfg(100_000))
        assert cdw.mean >= srev.mean - 4 * combine_stderr(cdw, srev)

    def test_cdw_errors(self):
        """Test tail revenue with several bidders and irregular marginals."""
        with pytest.raises(ParameterError):
            eval_cdw(iid_prior(EqualRevenue(), 1), 2, _cfg())
        with pytest.raises(RegularityError):
            eval_cdw(ProductPrior((TwoPoint(high_value=1.0),)), 1, _cfg())

    def test_core_conditional_uniform(self):
        """Test E[v | v <= 1/4] = 1/8 for one uniform item."""
        prior = iid_prior(Uniform(), 1)
        assert eval_core(prior, QUADRATURE, "conditional").mean == pytest.approx(0.125, abs=1e-9)
        assert _close(eval_core(prior, _cfg(), "conditional"), 0.125)

    def test_core_truncated_exponential(self):
        """Test the truncated core of one exponential item below 1/e."""
        t = 1 / math.e
        expected = 1 - math.exp(-t) * (1 + t)
        prior = iid_prior(Exponential(), 1)
        assert eval_core(prior, QUADRATURE).mean == pytest.approx(expected, abs=1e-8)
        estimate = eval_core(prior, _cfg())
        assert _close(estimate, expected)
        assert estimate.details["threshold"] == pytest.approx(t)

    def test_degenerate_core(self):
        """Test conditioning on an empty event."""
        with pytest.raises(DegenerateCoreError, match="degenerate core"):
            eval_core(iid_prior(EqualRevenue(), 1), QUADRATURE, "conditional")
        with pytest.raises(DegenerateCoreError):
            eval_core(iid_prior(ShiftedExponential(rate=1.0, shift=5.0), 1), _cfg(), "conditional")

    def test_upper_bounds(self):
        """Test the core-tail report on two uniform items."""
        report = revenue_upper_bounds(iid_prior(Uniform(), 2), _cfg(100_000))
        assert report.case in ("small_core", "large_core")
        assert report.separate_bundle_bound == pytest.approx(2 * report.brev.mean + 4 * report.srev.mean)
        assert report.bspa_ratio <= 48
        assert report.brev_ratio <= 18
        assert set(report.to_dict()) >= {"srev", "brev", "core", "case", "separate_bundle_bound", "core_tail_bound"}


class TestTariff:
    """Tests for the two-part tariff and the bundling gap."""

    def test_fee(self):
        """Test fee m (z_n / n - epsilon) and its clamp at zero."""
        prior = iid_prior(Exponential(), 10)
        fee, z_n = tariff_fee(prior, 2, 0.1)
        assert z_n == pytest.approx(1.0)
        assert fee == pytest.approx(10 * (0.5 - 0.1))
        assert tariff_fee(prior, 2, 1.0)[0] == 0.0

    def test_single_bidder(self):
        """Test one bidder on 100 exponential items pays close to the mean."""
        prior = iid_prior(Exponential(), 100)
        estimate = two_part_tariff(prior, 1, 0.3, _cfg(4000))
        assert estimate.mean / prior.m >= 0.69
        assert estimate.details["fee"] == pytest.approx(70.0)

    def test_zero_fee_is_vcg(self):
        """Test a clamped fee leaves per-item second-price revenue."""
        prior = iid_prior(Uniform(), 5)
        cfg = _cfg(50_000)
        tariff = two_part_tariff(prior, 3, 1.0, cfg)
        vcg = eval_simple(MechanismKind.VCG, prior, 3, QUADRATURE)
        assert tariff.details["fee"] == 0.0
        assert _close(tariff, vcg.mean)

    def test_errors(self):
        """Test epsilon and prior checks."""
        with pytest.raises(ParameterError, match="epsilon"):
            two_part_tariff(iid_prior(Uniform(), 2), 2, 0.0, _cfg(100))
        with pytest.raises(ParameterError, match="identical"):
            two_part_tariff(ProductPrior((Uniform(), Exponential())), 2, 0.1, _cfg(100))

    def test_bundling_gap_single_item(self):
        """Test many extra bidders win on one item."""
        gap = bundling_gap_experiment(1, 2, 98, _cfg(20_000))
        assert gap.bspa_per_item > gap.wel_per_item
        assert gap.wel_per_item == pytest.approx(2 / 3, abs=0.01)

    def test_bundling_gap_no_extra(self):
        """Test revenue never exceeds welfare without extra bidders."""
        gap = bundling_gap_experiment(5, 2, 0, _cfg(20_000))
        assert gap.bspa_per_item <= gap.wel_per_item + 2 * np.hypot(gap.bspa_stderr, gap.wel_stderr)

    def test_bundling_gap_errors(self):
        """Test base bidder validation."""
        with pytest.raises(ParameterError):
            bundling_gap_experiment(5, 1, 3, _cfg(100))


class TestHazard:
    """Tests for the bundle hazard profile."""

    def test_mhr_sum(self):
        """Test the hazard of Exponential + Uniform does not decrease."""
        profile = bundle_hazard_profile(ProductPrior((Exponential(), Uniform())), _cfg(400_000), bins=40)
        assert profile.hazard.shape == (40,)
        assert profile.is_nondecreasing
        assert profile.first_violation is None

    def test_arguments(self):
        """Test bin and quantile checks."""
        prior = iid_prior(Uniform(), 1)
        with pytest.raises(ParameterError):
            bundle_hazard_profile(prior, _cfg(100), bins=1)
        with pytest.raises(ParameterError):
            bundle_hazard_profile(prior, _cfg(100), upper_quantile=1.0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
