"""Sectored beam patterns and their scaling with antenna count.

A pattern is the usual two-level abstraction: constant main-lobe gain over
the beamwidth, constant side-lobe gain elsewhere.  A scaling family maps an
antenna count to a pattern and a base-station density to an antenna count,
which is the knob the densification experiments sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ULA_MAX_GAIN_SLOPE",
    "ULA_BEAMWIDTH_COEFF",
    "ULA_SIDELOBE_COEFF",
    "ula_gain_ratio_slope",
    "BeamPattern",
    "UlaScaling",
    "ParametricStepScaling",
    "ula_array_response",
]

# Half-power beamwidth of an N-element uniform linear array is
# ULA_BEAMWIDTH_COEFF / N in normalized spatial angle; boresight gain is N.
ULA_MAX_GAIN_SLOPE = 1.0
ULA_BEAMWIDTH_COEFF = 1.782
ULA_SIDELOBE_COEFF = 0.218

_TWO_PI = 2.0 * math.pi


def ula_gain_ratio_slope(gmin_rule: str = "tabulated") -> float:
    """Asymptotic slope of (main gain / side gain) / N for the ULA rules."""
    if gmin_rule == "tabulated":
        return math.pi / ULA_SIDELOBE_COEFF
    if gmin_rule == "power_conserving":
        return _TWO_PI / (_TWO_PI - ULA_BEAMWIDTH_COEFF)
    raise ValueError(f"unknown gmin_rule {gmin_rule!r}")


@dataclass(frozen=True)
class BeamPattern:
    """Step beam: main-lobe gain over `beamwidth_rad`, side-lobe gain elsewhere."""

    main_gain: float
    side_gain: float
    beamwidth_rad: float

    def __post_init__(self):
        if not 0.0 < self.side_gain <= self.main_gain:
            raise ValueError("need main_gain >= side_gain > 0")
        if not 0.0 < self.beamwidth_rad <= _TWO_PI:
            raise ValueError("beamwidth must lie in (0, 2*pi]")

    @property
    def mainlobe_probability(self) -> float:
        """Chance a uniformly pointed beam covers a given direction."""
        return min(1.0, self.beamwidth_rad / _TWO_PI)

    @property
    def mean_gain(self) -> float:
        p = self.mainlobe_probability
        return p * self.main_gain + (1.0 - p) * self.side_gain


class AntennaScaling:
    """Base: maps density -> antenna count -> beam pattern."""

    #: antennas per unit BS density; N(density) = ceil(coeff * density^exponent)
    antennas_per_density: float
    density_exponent: float

    def antennas_for_density(self, density_per_km2: float) -> int:
        """N = max(1, ceil(coeff * density^exponent)); density in BS/km^2."""
        if density_per_km2 <= 0:
            raise ValueError("density must be positive")
        n = self.antennas_per_density * density_per_km2**self.density_exponent
        return max(1, math.ceil(n - 1e-9))

    def pattern_for(self, n_antennas: int) -> BeamPattern:
        raise NotImplementedError

    def pattern_for_density(self, density_per_km2: float) -> BeamPattern:
        return self.pattern_for(self.antennas_for_density(density_per_km2))

    @property
    def gain_ratio_slope(self) -> float:
        """Asymptotic (main/side gain)/N slope; defined per family."""
        raise NotImplementedError

    @property
    def beamwidth_scale(self) -> float:
        """Coefficient b in beamwidth = b / N."""
        raise NotImplementedError

    def _check_count(self, n) -> int:
        if int(n) != n or n < 1:
            raise ValueError(f"antenna count must be a positive integer, got {n}")
        return int(n)


@dataclass(frozen=True)
class UlaScaling(AntennaScaling):
    """Uniform linear array: main gain N, half-power beamwidth 1.782/N.

    `gmin_rule` picks the side-lobe level: "tabulated" uses the classical
    0.218 N / (pi N - 1.782) table value; "power_conserving" solves
    (B/2pi) g_max + (1 - B/2pi) g_min = 1 so the radiated power is exactly
    independent of N.  Both give a gain ratio that grows linearly in N.
    """

    antennas_per_density: float = 1.0
    density_exponent: float = 1.0
    gmin_rule: str = "tabulated"

    def __post_init__(self):
        if self.antennas_per_density <= 0 or self.density_exponent <= 0:
            raise ValueError("antennas_per_density and density_exponent must be positive")
        ula_gain_ratio_slope(self.gmin_rule)

    def pattern_for(self, n_antennas: int) -> BeamPattern:
        n = self._check_count(n_antennas)
        beamwidth = min(_TWO_PI, ULA_BEAMWIDTH_COEFF / n)
        if self.gmin_rule == "tabulated":
            side = ULA_SIDELOBE_COEFF * n / (math.pi * n - ULA_BEAMWIDTH_COEFF)
        else:
            frac = beamwidth / _TWO_PI
            side = (1.0 - frac * n) / (1.0 - frac)
        return BeamPattern(main_gain=float(n), side_gain=side, beamwidth_rad=beamwidth)

    @property
    def gain_ratio_slope(self) -> float:
        return ula_gain_ratio_slope(self.gmin_rule)

    @property
    def beamwidth_scale(self) -> float:
        return ULA_BEAMWIDTH_COEFF


@dataclass(frozen=True)
class ParametricStepScaling(AntennaScaling):
    """Idealized family with exact scaling laws.

    main gain = gmax_coeff * N, beamwidth = beamwidth_coeff / N, and
    side gain = main gain / (ratio_slope * N) so the main/side ratio is
    exactly ratio_slope * N for every N.
    """

    ratio_slope: float = math.pi / ULA_SIDELOBE_COEFF
    beamwidth_coeff: float = ULA_BEAMWIDTH_COEFF
    gmax_coeff: float = 1.0
    antennas_per_density: float = 1.0
    density_exponent: float = 1.0

    def __post_init__(self):
        if min(self.ratio_slope, self.beamwidth_coeff, self.gmax_coeff) <= 0:
            raise ValueError("ratio_slope, beamwidth_coeff and gmax_coeff must be positive")
        if self.antennas_per_density <= 0 or self.density_exponent <= 0:
            raise ValueError("antennas_per_density and density_exponent must be positive")

    def pattern_for(self, n_antennas: int) -> BeamPattern:
        n = self._check_count(n_antennas)
        main = self.gmax_coeff * n
        return BeamPattern(
            main_gain=main,
            side_gain=main / (self.ratio_slope * n),
            beamwidth_rad=min(_TWO_PI, self.beamwidth_coeff / n),
        )

    @property
    def gain_ratio_slope(self) -> float:
        return self.ratio_slope

    @property
    def beamwidth_scale(self) -> float:
        return self.beamwidth_coeff


def ula_array_response(n_antennas: int, theta: float) -> np.ndarray:
    """Unit-norm ULA response vector at normalized spatial angle theta.

    Entry k is exp(-2j*pi*k*theta)/sqrt(N).  Useful for validating the step
    abstraction: N * |a(theta0)^H a(theta)|^2 is the physical beam gain.
    """
    if int(n_antennas) != n_antennas or n_antennas < 1:
        raise ValueError("antenna count must be a positive integer")
    k = np.arange(int(n_antennas))
    return np.exp(-2j * np.pi * k * theta) / np.sqrt(n_antennas)
