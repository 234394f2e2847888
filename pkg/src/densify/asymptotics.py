"""Analytical oracle for the dense-network limit under linear antenna scaling.

When the antenna count grows linearly with density (count = zeta * density),
narrower beams thin the main-lobe interferers to a density-independent
Poisson process of intensity beamwidth_scale / (2 pi zeta), while the
side-lobe aggregate concentrates on the constant
2 pi gain_integral / (ratio_slope * zeta).  The SINR then converges to

    gain_at_zero * desired_fading / (sum over the thinned process of
    L(r_i) h_i  +  that side-lobe constant),

whose mean admits both an exact double-quadrature expression (through the
probability generating functional of the thinned process) and closed-form
lower/upper bounds.  This module evaluates all three, plus a direct sampler
of the limiting SINR for cross-checking, plus the matching per-station ASE
bounds.

Unit convention: `gain_integral`, `antennas_per_density` and the thinned
intensity all live in the density unit's length scale; `distance_unit_m`
says how many meters one such length unit is (1000 when densities are per
km^2 and the model takes meters).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .antenna import AntennaScaling
from .fading import LinkFadingConfig
from .pathloss import PathLossModel, radial_gain_integral, tail_radius

__all__ = [
    "LimitParams",
    "sample_limit_sinr",
    "evaluate_mean_limit",
    "mean_sinr_bounds",
    "ase_slope_bounds",
]

_TWO_PI = 2.0 * math.pi
_LN2 = math.log(2.0)

#: Reject sampling when the deterministic denominator term is this small:
#: the ratio would be numerically meaningless rather than physically large.
_FLOOR_GUARD = 1e-12


def _quad_silent(func, a, b, epsrel, limit):
    """quad with QUADPACK's conservative roundoff warning muted.

    The reported error estimate is returned so callers can still reject
    genuinely failed integrations.
    """
    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(func, a, b, epsabs=0.0, epsrel=epsrel, limit=limit)
    return value, err


@dataclass(frozen=True)
class LimitParams:
    """Inputs of the limit formulas, checked for internal consistency.

    `gain_integral` must equal the model's radial gain integral expressed in
    the density-unit system (i.e. divided by distance_unit_m^2); construction
    recomputes it and rejects mismatches beyond 1e-6 relative.
    """

    gain_at_zero: float
    gain_integral: float
    gain_ratio_slope: float
    beamwidth_scale: float
    antennas_per_density: float
    model: PathLossModel
    fading: LinkFadingConfig = field(default_factory=LinkFadingConfig)
    distance_unit_m: float = 1.0

    def __post_init__(self):
        if min(self.gain_at_zero, self.gain_integral, self.gain_ratio_slope) <= 0:
            raise ValueError("gain_at_zero, gain_integral and gain_ratio_slope must be positive")
        if self.antennas_per_density <= 0 or self.distance_unit_m <= 0:
            raise ValueError("antennas_per_density and distance_unit_m must be positive")
        if self.beamwidth_scale < 0:
            raise ValueError("beamwidth_scale must be nonnegative")
        recomputed = radial_gain_integral(self.model, rel_tol=1e-8) / self.distance_unit_m**2
        if abs(recomputed - self.gain_integral) > 1e-6 * recomputed:
            raise ValueError(
                f"gain_integral {self.gain_integral:g} disagrees with the model's "
                f"value {recomputed:g} (unit {self.distance_unit_m:g} m)"
            )
        if abs(self.gain_at_zero - self.model.gain_at_zero) > 1e-9 * self.gain_at_zero:
            raise ValueError("gain_at_zero disagrees with the model")

    @classmethod
    def from_scaling(
        cls,
        model: PathLossModel,
        scaling: AntennaScaling,
        fading: LinkFadingConfig | None = None,
        distance_unit_m: float = 1000.0,
    ) -> "LimitParams":
        """Parameters matching a simulation setup (densities per km^2 by default)."""
        if scaling.density_exponent != 1.0:
            raise ValueError("the dense-network limit requires linear antenna scaling")
        return cls(
            gain_at_zero=model.gain_at_zero,
            gain_integral=radial_gain_integral(model, rel_tol=1e-8) / distance_unit_m**2,
            gain_ratio_slope=scaling.gain_ratio_slope,
            beamwidth_scale=scaling.beamwidth_scale,
            antennas_per_density=scaling.antennas_per_density,
            model=model,
            fading=fading or LinkFadingConfig(),
            distance_unit_m=distance_unit_m,
        )

    @property
    def interferer_intensity(self) -> float:
        """Density of surviving main-lobe interferers, per unit area."""
        return self.beamwidth_scale / (_TWO_PI * self.antennas_per_density)

    @property
    def sidelobe_floor(self) -> float:
        """Deterministic side-lobe term in the limiting denominator."""
        return (
            _TWO_PI
            * self.gain_integral
            / (self.gain_ratio_slope * self.antennas_per_density)
        )

    def _window_radius(self, tail_frac: float = 1e-4) -> float:
        """Radius (density units) certifying the truncated interferer sum."""
        return tail_radius(self.model, tail_frac) / self.distance_unit_m


def sample_limit_sinr(
    params: LimitParams, rng: np.random.Generator, size: int | None = None
):
    """Draw the limiting SINR; scalar for size=None, else a vector.

    The thinned interferer process is realized on a disk big enough that the
    neglected tail is below 1e-4 of the mean interferer sum.
    """
    floor = params.sidelobe_floor
    if floor < _FLOOR_GUARD:
        raise ValueError(
            f"side-lobe floor {floor:.3g} is below {_FLOOR_GUARD:g}; the limiting "
            "ratio is numerically meaningless at this corner"
        )
    radius = params._window_radius()
    mean_count = params.interferer_intensity * math.pi * radius**2
    n_draws = 1 if size is None else int(size)
    counts = rng.poisson(mean_count, n_draws)
    total = int(counts.sum())
    if total:
        radii = radius * np.sqrt(rng.random(total))
        gains = params.model.evaluate(radii * params.distance_unit_m)
        weights = gains * params.fading.mainlobe.sample(rng, total)
        offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
        sums = np.add.reduceat(weights, np.minimum(offsets, total - 1))
        sums[counts == 0] = 0.0
    else:
        sums = np.zeros(n_draws)
    desired = params.fading.desired.sample(rng, n_draws)
    sinr = params.gain_at_zero * desired / (sums + floor)
    return float(sinr[0]) if size is None else sinr


def evaluate_mean_limit(
    params: LimitParams, rel_tol: float = 1e-6, inner_rel_tol: float = 1e-8
) -> float:
    """Mean of the limiting SINR by nested quadrature.

    Writes the mean as an integral over t of
    exp(-floor * t) * PGFL of the thinned process at t, where the PGFL
    exponent integrates the main-lobe fading's exponential-moment complement
    against the path loss.  The outer truncation rides the exp(-floor * t)
    envelope; the inner truncation reuses the certified path-loss tail.
    """
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must be in (0, 1)")
    floor = params.sidelobe_floor
    thin = params.beamwidth_scale / params.antennas_per_density  # 2*pi*intensity
    kernel = params.fading.mainlobe.one_minus_exp_moment
    model = params.model
    unit = params.distance_unit_m

    # Substituting w = u^2/2 turns the radial integral into the integral of
    # kernel(t * L(sqrt(2w))), a smooth monotone-decreasing function of w that
    # the infinite-interval quadrature handles without manual truncation.
    kink_ws = sorted(
        (p / unit) ** 2 / 2.0 for p in model.quad_points() if p > 0.0
    )

    def pgfl_exponent(t: float) -> float:
        if t == 0.0:
            return 0.0

        def integrand(w):
            return kernel(t * float(model.evaluate(math.sqrt(2.0 * w) * unit)))

        value = 0.0
        error = 0.0
        start = 0.0
        for wk in kink_ws:
            seg, err = _quad_silent(integrand, start, wk, inner_rel_tol, limit=200)
            value += seg
            error += err
            start = wk
        tail, err = _quad_silent(integrand, start, np.inf, inner_rel_tol, limit=400)
        value += tail
        error += err
        if error > 1e-4 * abs(value):
            raise ArithmeticError(
                f"inner quadrature error {error:.3g} too large against {value:.3g} "
                f"for {model!r} at t={t:g}"
            )
        return value

    def outer_integrand(t):
        if thin == 0.0:
            return math.exp(-floor * t)
        return math.exp(-floor * t - thin * pgfl_exponent(t))

    upper = -math.log(0.5 * rel_tol) / floor
    total = 0.0
    start = 0.0
    while True:
        seg, _ = _quad_silent(outer_integrand, start, upper, rel_tol / 4.0, limit=200)
        total += seg
        remainder = math.exp(-floor * upper) / floor
        if remainder <= rel_tol / 4.0 * total:
            break
        start = upper
        upper *= 2.0
    return params.gain_at_zero * total


def mean_sinr_bounds(params: LimitParams) -> tuple[float, float]:
    """Closed-form sandwich for the limiting mean SINR.

    The lower bound keeps the mean interferer sum in the denominator; the
    upper bound drops the interferer sum entirely.
    """
    l0 = params.gain_at_zero
    slope = params.gain_ratio_slope
    zeta = params.antennas_per_density
    gamma = params.gain_integral
    lower = l0 * slope * zeta / (gamma * (_TWO_PI + slope * params.beamwidth_scale))
    upper = l0 * slope * zeta / (_TWO_PI * gamma)
    return lower, upper


def ase_slope_bounds(params: LimitParams) -> tuple[float, float]:
    """Bounds on the limiting ASE per station (bps/Hz per BS).

    Dividing area spectral efficiency by density leaves the mean per-user
    spectral efficiency, which is sandwiched between a harmonic-mean style
    lower bound and the linearized upper bound of the SINR mean.
    """
    l0 = params.gain_at_zero
    slope = params.gain_ratio_slope
    zeta = params.antennas_per_density
    gamma = params.gain_integral
    lower = (
        slope
        * zeta
        * l0
        / (gamma * slope * params.beamwidth_scale + _TWO_PI * gamma + l0 * slope * zeta)
        / _LN2
    )
    upper = l0 * slope * zeta / (_TWO_PI * gamma * _LN2)
    return lower, upper
