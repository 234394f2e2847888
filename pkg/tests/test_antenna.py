"""Tests for beam patterns, scaling families, and the array-response check."""

import math

import numpy as np
import pytest

from densify.antenna import (
    BeamPattern,
    ParametricStepScaling,
    UlaScaling,
    ula_array_response,
    ula_gain_ratio_slope,
)

TWO_PI = 2.0 * math.pi


class TestUlaPattern:
    def test_ten_antennas(self):
        p = UlaScaling().pattern_for(10)
        assert p.main_gain == 10.0
        assert p.beamwidth_rad == pytest.approx(0.1782, rel=1e-12)
        assert p.side_gain == pytest.approx(2.18 / (10.0 * math.pi - 1.782), rel=1e-12)

    def test_single_antenna(self):
        p = UlaScaling().pattern_for(1)
        assert p.main_gain == 1.0
        assert p.beamwidth_rad == pytest.approx(1.782, rel=1e-12)
        assert p.side_gain == pytest.approx(0.218 / (math.pi - 1.782), rel=1e-12)

    def test_beamwidth_coefficient_exact(self):
        scaling = UlaScaling()
        for n in range(1, 1001):
            assert scaling.pattern_for(n).beamwidth_rad * n == pytest.approx(1.782, rel=1e-14)

    def test_ratio_slope_converges(self):
        scaling = UlaScaling()
        slope = ula_gain_ratio_slope("tabulated")
        assert slope == pytest.approx(math.pi / 0.218, rel=1e-14)
        for n in (256, 512, 1024, 4096):
            p = scaling.pattern_for(n)
            assert abs(p.main_gain / p.side_gain / n - slope) < 0.05

    def test_monotone_in_count(self):
        scaling = UlaScaling()
        patterns = [scaling.pattern_for(n) for n in range(1, 200)]
        mains = [p.main_gain for p in patterns]
        widths = [p.beamwidth_rad for p in patterns]
        assert all(a <= b for a, b in zip(mains, mains[1:]))
        assert all(a >= b for a, b in zip(widths, widths[1:]))

    def test_zero_count_rejected(self):
        with pytest.raises(ValueError):
            UlaScaling().pattern_for(0)

    def test_power_conserving_rule(self):
        scaling = UlaScaling(gmin_rule="power_conserving")
        for n in (1, 4, 32, 1000):
            p = scaling.pattern_for(n)
            frac = p.beamwidth_rad / TWO_PI
            radiated = frac * p.main_gain + (1.0 - frac) * p.side_gain
            assert radiated == pytest.approx(1.0, rel=1e-12)
        # One antenna radiates isotropically.
        p1 = scaling.pattern_for(1)
        assert p1.side_gain == pytest.approx(p1.main_gain, rel=1e-12)

    def test_unknown_rule_rejected(self):
        with pytest.raises(ValueError):
            UlaScaling(gmin_rule="bogus")


class TestParametricStep:
    def test_example_pattern(self):
        scaling = ParametricStepScaling(ratio_slope=14.41, beamwidth_coeff=1.782)
        p = scaling.pattern_for(100)
        assert p.main_gain == 100.0
        assert p.beamwidth_rad == pytest.approx(0.01782, rel=1e-12)
        assert p.side_gain == pytest.approx(100.0 / 1441.0, rel=1e-12)

    def test_ratio_exact_for_all_counts(self):
        scaling = ParametricStepScaling(ratio_slope=7.5)
        for n in (1, 2, 17, 1000):
            p = scaling.pattern_for(n)
            assert p.main_gain / p.side_gain == pytest.approx(7.5 * n, rel=1e-12)

    def test_beamwidth_clamped_to_full_circle(self):
        p = ParametricStepScaling(beamwidth_coeff=10.0).pattern_for(1)
        assert p.beamwidth_rad == TWO_PI
        assert p.mainlobe_probability == 1.0


class TestDensityMap:
    def test_linear(self):
        assert UlaScaling(antennas_per_density=1.0).antennas_for_density(100.0) == 100

    def test_square_root(self):
        scaling = UlaScaling(antennas_per_density=1.0, density_exponent=0.5)
        assert scaling.antennas_for_density(100.0) == 10

    def test_superlinear_with_coefficient(self):
        scaling = UlaScaling(antennas_per_density=2.0, density_exponent=1.5)
        assert scaling.antennas_for_density(100.0) == 2000

    def test_floor_of_one(self):
        assert UlaScaling().antennas_for_density(1e-6) == 1

    def test_nonpositive_density_rejected(self):
        with pytest.raises(ValueError):
            UlaScaling().antennas_for_density(0.0)


class TestArrayResponse:
    def test_zero_angle(self):
        np.testing.assert_allclose(ula_array_response(4, 0.0), np.full(4, 0.5))

    def test_unit_norm(self):
        for n in (1, 3, 8, 64):
            a = ula_array_response(n, 0.37)
            assert np.linalg.norm(a) == pytest.approx(1.0, rel=1e-12)

    def test_boresight_gain_matches_step_pattern(self):
        n = 8
        theta0 = 0.21
        a0 = ula_array_response(n, theta0)
        gain = n * abs(np.vdot(a0, a0)) ** 2
        assert gain == pytest.approx(UlaScaling().pattern_for(n).main_gain, rel=1e-12)

    def test_half_power_at_tabulated_beamwidth(self):
        # The tabulated 1.782/N beamwidth is in physical angle; near boresight
        # with half-wavelength spacing the normalized spatial angle is half of
        # it, so the half-power point sits at theta = 1.782/(4N).
        n = 64
        a0 = ula_array_response(n, 0.0)
        edge = ula_array_response(n, 1.782 / (4.0 * n))
        rel = abs(np.vdot(a0, edge)) ** 2
        assert rel == pytest.approx(0.5, abs=0.02)


def test_invalid_patterns_rejected():
    with pytest.raises(ValueError):
        BeamPattern(main_gain=1.0, side_gain=2.0, beamwidth_rad=0.1)
    with pytest.raises(ValueError):
        BeamPattern(main_gain=1.0, side_gain=0.5, beamwidth_rad=7.0)
