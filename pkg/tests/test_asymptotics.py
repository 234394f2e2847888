"""Tests for the dense-limit oracle: sampler, quadrature, and bounds."""

import math

import numpy as np
import pytest

from densify.antenna import UlaScaling
from densify.asymptotics import (
    LimitParams,
    ase_slope_bounds,
    evaluate_mean_limit,
    mean_sinr_bounds,
    sample_limit_sinr,
)
from densify.fading import Deterministic, LinkFadingConfig, NakagamiPower, RayleighPower
from densify.pathloss import BoundedSingleSlope, StretchedExponential
from densify.streams import substream

TWO_PI = 2.0 * math.pi

# gain integral 1/6 (exponent-4 bounded slope at unit breakpoint)
SIXTH_MODEL = BoundedSingleSlope(gain0=1.0, exponent=4.0, breakpoint_m=1.0)
# gain integral 1 (unit-decay exponential)
UNIT_MODEL = StretchedExponential(gain0=1.0, decay_m=1.0, shape=1.0)

DET = LinkFadingConfig(desired=Deterministic(), mainlobe=Deterministic(), sidelobe=Deterministic())


def worked_params(**overrides):
    kwargs = dict(
        gain_at_zero=1.0,
        gain_integral=1.0 / 6.0,
        gain_ratio_slope=14.41,
        beamwidth_scale=1.782,
        antennas_per_density=1.0,
        model=SIXTH_MODEL,
        fading=LinkFadingConfig(),
    )
    kwargs.update(overrides)
    return LimitParams(**kwargs)


class TestLimitParams:
    def test_gain_integral_consistency_enforced(self):
        with pytest.raises(ValueError, match="disagrees"):
            worked_params(gain_integral=0.2)

    def test_gain_at_zero_consistency_enforced(self):
        with pytest.raises(ValueError, match="gain_at_zero"):
            worked_params(gain_at_zero=2.0)

    def test_from_scaling_requires_linear_exponent(self):
        with pytest.raises(ValueError, match="linear"):
            LimitParams.from_scaling(SIXTH_MODEL, UlaScaling(density_exponent=0.5))

    def test_from_scaling_converts_units(self):
        model = StretchedExponential(gain0=1.0, decay_m=1000.0, shape=1.0)
        params = LimitParams.from_scaling(model, UlaScaling())
        # decay of 1 km -> unit gain integral in km^2
        assert params.gain_integral == pytest.approx(1.0, rel=1e-7)
        assert params.gain_ratio_slope == pytest.approx(math.pi / 0.218, rel=1e-12)
        assert params.interferer_intensity == pytest.approx(1.782 / TWO_PI, rel=1e-12)

    def test_positivity_checks(self):
        with pytest.raises(ValueError):
            worked_params(gain_ratio_slope=0.0)
        with pytest.raises(ValueError):
            worked_params(beamwidth_scale=-1.0)


class TestClosedFormBounds:
    def test_mean_sinr_bounds_worked_values(self):
        # Arithmetic oracle evaluated inline.
        p = worked_params()
        lower, upper = mean_sinr_bounds(p)
        assert lower == pytest.approx(14.41 / ((1 / 6) * (TWO_PI + 14.41 * 1.782)), rel=1e-12)
        assert upper == pytest.approx(14.41 * 6 / TWO_PI, rel=1e-12)
        assert lower == pytest.approx(2.70510, abs=2e-5)
        assert upper == pytest.approx(13.76054, abs=2e-5)

    def test_ase_slope_bounds_worked_values(self):
        p = worked_params()
        lower, upper = ase_slope_bounds(p)
        ln2 = math.log(2.0)
        oracle_lower = (14.41 / ((1 / 6) * 14.41 * 1.782 + TWO_PI / 6 + 14.41)) / ln2
        assert lower == pytest.approx(oracle_lower, rel=1e-12)
        assert upper == pytest.approx(14.41 * 6 / (TWO_PI * ln2), rel=1e-12)
        assert lower == pytest.approx(1.05331, abs=2e-5)
        assert upper == pytest.approx(19.85226, abs=2e-5)
        assert 0.0 < lower < upper < math.inf

    def test_bounds_collapse_as_ratio_beamwidth_product_vanishes(self):
        p = worked_params(beamwidth_scale=1e-4)
        lower, upper = mean_sinr_bounds(p)
        assert lower / upper == pytest.approx(1.0, abs=1e-3)

    def test_bounds_linear_in_antenna_coefficient(self):
        base = worked_params()
        scaled = worked_params(antennas_per_density=3.0)
        for a, b in zip(mean_sinr_bounds(base), mean_sinr_bounds(scaled)):
            assert b == pytest.approx(3.0 * a, rel=1e-12)
        lo1, up1 = ase_slope_bounds(base)
        lo3, up3 = ase_slope_bounds(scaled)
        assert up3 == pytest.approx(3.0 * up1, rel=1e-12)
        assert lo3 > lo1  # lower bound grows sub-linearly but grows


class TestEvaluateMeanLimit:
    def test_no_mainlobe_closed_form(self):
        # Zero beamwidth scale leaves only the side-lobe floor in the
        # denominator, so the mean is gain_at_zero / floor exactly.
        p = worked_params(beamwidth_scale=0.0)
        value = evaluate_mean_limit(p)
        assert value == pytest.approx(14.41 * 6.0 / TWO_PI, rel=1e-6)

    def test_within_sandwich(self):
        p = worked_params()
        lower, upper = mean_sinr_bounds(p)
        assert lower < evaluate_mean_limit(p) < upper

    def test_refinement_agreement(self):
        p = worked_params()
        coarse = evaluate_mean_limit(p, rel_tol=1e-4)
        fine = evaluate_mean_limit(p, rel_tol=1e-7)
        assert coarse == pytest.approx(fine, rel=2e-4)

    def test_sandwich_over_random_parameters(self):
        rng = np.random.default_rng(2026)
        for _ in range(8):
            slope = rng.uniform(1.0, 30.0)
            width = rng.uniform(0.5, 3.0)
            coeff = rng.uniform(0.25, 4.0)
            model = SIXTH_MODEL if rng.random() < 0.5 else UNIT_MODEL
            params = LimitParams(
                gain_at_zero=1.0,
                gain_integral=1.0 / 6.0 if model is SIXTH_MODEL else 1.0,
                gain_ratio_slope=slope,
                beamwidth_scale=width,
                antennas_per_density=coeff,
                model=model,
                fading=LinkFadingConfig(),
            )
            lower, upper = mean_sinr_bounds(params)
            value = evaluate_mean_limit(params)
            assert lower < value < upper


class TestSampler:
    def test_empty_process_is_deterministic_ratio(self):
        p = worked_params(beamwidth_scale=0.0, fading=DET)
        draws = sample_limit_sinr(p, substream(400), 100)
        np.testing.assert_allclose(draws, 14.41 * 6.0 / TWO_PI, rtol=1e-12)

    def test_scalar_draw(self):
        value = sample_limit_sinr(worked_params(), substream(401))
        assert np.isscalar(value) and value > 0

    def test_reproducible(self):
        a = sample_limit_sinr(worked_params(), substream(402), 50)
        b = sample_limit_sinr(worked_params(), substream(402), 50)
        np.testing.assert_array_equal(a, b)

    def test_floor_guard(self):
        p = worked_params(gain_ratio_slope=1e30)
        with pytest.raises(ValueError, match="floor"):
            sample_limit_sinr(p, substream(403), 10)

    @pytest.mark.parametrize(
        "seed, interferer",
        [(11, RayleighPower()), (12, NakagamiPower(4.0)), (13, Deterministic())],
        ids=["rayleigh", "nakagami4", "deterministic"],
    )
    def test_monte_carlo_matches_quadrature(self, seed, interferer):
        fading = LinkFadingConfig(
            desired=NakagamiPower(4.0), mainlobe=interferer, sidelobe=RayleighPower()
        )
        params = LimitParams(
            gain_at_zero=1.0,
            gain_integral=1.0,
            gain_ratio_slope=14.41,
            beamwidth_scale=1.782,
            antennas_per_density=1.0,
            model=UNIT_MODEL,
            fading=fading,
        )
        value = evaluate_mean_limit(params)
        draws = sample_limit_sinr(params, substream(404, seed), 30_000)
        z = (draws.mean() - value) / (draws.std(ddof=1) / math.sqrt(draws.size))
        assert abs(z) < 3.0
