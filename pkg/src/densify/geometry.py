"""Poisson network geometry around a tagged user at the origin.

Base stations are dropped as a homogeneous Poisson process in a finite
window centered on the user; the nearest one serves, the rest interfere.
Each interferer's beam covers the user independently with probability
beamwidth/(2*pi).  Window truncation is certified against the path-loss
tail so neglected out-of-window interference is provably small.

Units: densities are BS per km^2 and window extents are km (the scales the
experiments are quoted in); every coordinate and distance handed to or from
this module is in meters.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .antenna import AntennaScaling, BeamPattern
from .fading import LinkFadingConfig
from .pathloss import PathLossModel, radial_gain_integral, tail_radius

__all__ = [
    "CapacityError",
    "EmptyNetworkError",
    "Square",
    "Disk",
    "NetworkRealization",
    "sample_ppp",
    "realize",
    "serving_distances",
    "serving_distance_quantile",
    "window_truncation_ratio",
    "check_window_adequacy",
    "adequate_window",
    "dump_realization",
]

#: Expected-point ceiling per realization; guards runaway memory use.
POINT_CAP = 100_000_000

#: Expected points below which a window triggers the small-sample warning.
MIN_EXPECTED_POINTS = 100.0

#: Neglected out-of-window interference must stay below this fraction of the
#: in-window estimate (plus noise).
TRUNCATION_FRACTION = 1e-3


class CapacityError(Exception):
    """Expected point count exceeds the configured memory cap."""


class EmptyNetworkError(Exception):
    """No base station landed in the window after the allowed resamples."""


@dataclass(frozen=True)
class Square:
    """Axis-aligned square window of the given side, centered on the user."""

    side_km: float

    def __post_init__(self):
        if self.side_km <= 0:
            raise ValueError("side_km must be positive")

    @property
    def area_km2(self) -> float:
        return self.side_km**2

    @property
    def min_half_extent_m(self) -> float:
        return self.side_km * 500.0

    def sample_points(self, rng: np.random.Generator, n: int) -> np.ndarray:
        half = self.min_half_extent_m
        return rng.uniform(-half, half, size=(n, 2))


@dataclass(frozen=True)
class Disk:
    """Disk window of the given radius, centered on the user."""

    radius_km: float

    def __post_init__(self):
        if self.radius_km <= 0:
            raise ValueError("radius_km must be positive")

    @property
    def area_km2(self) -> float:
        return math.pi * self.radius_km**2

    @property
    def min_half_extent_m(self) -> float:
        return self.radius_km * 1000.0

    def sample_radii(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.min_half_extent_m * np.sqrt(rng.random(n))

    def sample_points(self, rng, n):
        radii = self.sample_radii(rng, n)
        angles = rng.uniform(0.0, 2.0 * math.pi, n)
        return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))


Window = Square | Disk


def _poisson_count(density_per_km2: float, window: Window, rng) -> int:
    if density_per_km2 <= 0:
        raise ValueError("density must be positive")
    expected = density_per_km2 * window.area_km2
    if expected > POINT_CAP:
        raise CapacityError(
            f"expected {expected:.3g} points exceeds the cap of {POINT_CAP:g}; "
            "use a smaller window"
        )
    return int(rng.poisson(expected))


def sample_ppp(density_per_km2: float, window: Window, rng: np.random.Generator) -> np.ndarray:
    """One Poisson drop: (n, 2) positions in meters, n ~ Poisson(density*area)."""
    n = _poisson_count(density_per_km2, window, rng)
    return window.sample_points(rng, n)


@dataclass
class NetworkRealization:
    """One sampled network: distances, beam flags and fading per base station.

    `fading[serving_index]` holds the desired-link draw; every other entry
    holds the main-lobe or side-lobe interferer draw according to its flag
    (the serving station's flag is always False).  Cartesian positions are
    materialized on demand: for disk windows only radial distances are drawn
    up front and the isotropic angles come from a spawned side stream.
    """

    density_per_km2: float
    n_antennas: int
    pattern: BeamPattern
    distances_m: np.ndarray = field(repr=False)
    serving_index: int = field(repr=False)
    mainlobe_flags: np.ndarray = field(repr=False)
    fading: np.ndarray = field(repr=False)
    gain_uniforms: np.ndarray | None = field(default=None, repr=False)
    seed: tuple[int, ...] | None = None
    _positions: np.ndarray | None = field(default=None, repr=False)
    _angle_rng: np.random.Generator | None = field(default=None, repr=False)

    @property
    def n_points(self) -> int:
        return self.distances_m.size

    @property
    def n_interferers(self) -> int:
        return self.n_points - 1

    @property
    def serving_distance_m(self) -> float:
        return float(self.distances_m[self.serving_index])

    @property
    def positions_m(self) -> np.ndarray:
        if self._positions is None:
            angles = self._angle_rng.uniform(0.0, 2.0 * math.pi, self.n_points)
            self._positions = np.column_stack(
                (self.distances_m * np.cos(angles), self.distances_m * np.sin(angles))
            )
        return self._positions


def realize(
    density_per_km2: float,
    window: Window,
    scaling: AntennaScaling,
    fading: LinkFadingConfig,
    rng: np.random.Generator,
    *,
    pattern_override: BeamPattern | None = None,
    stochastic_gains: bool = False,
    max_resamples: int = 100,
    seed: tuple[int, ...] | None = None,
) -> NetworkRealization:
    """Sample one network realization.

    Draw order is fixed (count, geometry, beam flags, gain uniforms, desired
    fading, side-lobe fading, main-lobe fading), so a given generator state
    always produces the same realization.  Empty drops are resampled up to
    `max_resamples` times before `EmptyNetworkError`.
    """
    n_antennas = scaling.antennas_for_density(density_per_km2)
    pattern = pattern_override or scaling.pattern_for(n_antennas)

    n = 0
    for _ in range(max_resamples + 1):
        n = _poisson_count(density_per_km2, window, rng)
        if n > 0:
            break
    if n == 0:
        raise EmptyNetworkError(
            f"window {window} stayed empty after {max_resamples} resamples "
            f"at density {density_per_km2} per km^2"
        )

    positions = None
    angle_rng = None
    if isinstance(window, Disk):
        distances = window.sample_radii(rng, n)
        angle_rng = rng.spawn(1)[0]
    else:
        positions = window.sample_points(rng, n)
        distances = np.hypot(positions[:, 0], positions[:, 1])

    serving = int(np.argmin(distances))
    # One binomial draw plus a uniform index subset is the same joint law as a
    # Bernoulli flip per station, and far cheaper when the beams are narrow.
    flags = np.zeros(n, dtype=bool)
    n_flagged = int(rng.binomial(n, pattern.mainlobe_probability))
    if n_flagged:
        flags[rng.choice(n, size=n_flagged, replace=False, shuffle=False)] = True
    flags[serving] = False

    gain_uniforms = rng.random(n) if stochastic_gains else None

    fade = np.empty(n, dtype=float)
    desired_draw = fading.desired.sample(rng, None)
    fade[:] = fading.sidelobe.sample(rng, n)
    flagged = np.flatnonzero(flags)
    if flagged.size:
        fade[flagged] = fading.mainlobe.sample(rng, flagged.size)
    fade[serving] = desired_draw

    return NetworkRealization(
        density_per_km2=density_per_km2,
        n_antennas=n_antennas,
        pattern=pattern,
        distances_m=distances,
        serving_index=serving,
        mainlobe_flags=flags,
        fading=fade,
        gain_uniforms=gain_uniforms,
        seed=seed,
        _positions=positions,
        _angle_rng=angle_rng,
    )


def serving_distances(
    density_per_km2: float, window: Window, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Batched nearest-station distances (meters) over `count` drops."""
    if count < 1:
        raise ValueError("count must be positive")
    expected = density_per_km2 * window.area_km2
    if expected * count > POINT_CAP:
        raise CapacityError("batch too large; lower count or use a smaller window")
    counts = rng.poisson(expected, count)
    empty = counts == 0
    while np.any(empty):
        counts[empty] = rng.poisson(expected, int(empty.sum()))
        empty = counts == 0
    total = int(counts.sum())
    if isinstance(window, Disk):
        dist = window.sample_radii(rng, total)
    else:
        pts = window.sample_points(rng, total)
        dist = np.hypot(pts[:, 0], pts[:, 1])
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    return np.minimum.reduceat(dist, offsets)


def serving_distance_quantile(density_per_km2: float, p: float) -> float:
    """Quantile (meters) of the nearest-station distance on the infinite plane.

    The nearest-point distance of a Poisson process has CDF
    1 - exp(-pi * density * r^2), so the p-quantile is
    sqrt(-ln(1-p) / (pi * density)).
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if density_per_km2 <= 0:
        raise ValueError("density must be positive")
    density_m2 = density_per_km2 * 1e-6
    return math.sqrt(-math.log1p(-p) / (math.pi * density_m2))


# ---------------------------------------------------------------------------
# Window adequacy
# ---------------------------------------------------------------------------


def window_truncation_ratio(
    model: PathLossModel,
    window: Window,
    density_per_km2: float,
    pattern: BeamPattern,
    sigma2: float = 0.0,
) -> float:
    """Neglected out-of-window interference over (noise + in-window estimate).

    Both sides are Campbell-formula means with the interferers' average beam
    gain; the out-of-window bound is taken from half the minimum window
    half-extent, which over-covers square corners and off-center users.
    """
    lam_m2 = density_per_km2 * 1e-6
    r_eff = window.min_half_extent_m / 2.0
    total = radial_gain_integral(model, rel_tol=1e-6)
    tail = radial_gain_integral(model, rel_tol=1e-4, lower=r_eff)
    mean_gain = pattern.mean_gain
    neglected = 2.0 * math.pi * lam_m2 * mean_gain * tail
    in_window = 2.0 * math.pi * lam_m2 * mean_gain * (total - tail)
    return neglected / (sigma2 + in_window)


def check_window_adequacy(
    model: PathLossModel,
    window: Window,
    density_per_km2: float,
    pattern: BeamPattern,
    sigma2: float = 0.0,
) -> bool:
    """Warn when the window undercounts interference or expected points."""
    adequate = True
    expected = density_per_km2 * window.area_km2
    if expected < MIN_EXPECTED_POINTS * (1.0 - 1e-9):
        warnings.warn(
            f"window {window} holds only {expected:.3g} expected points at "
            f"{density_per_km2} BS/km^2 (threshold {MIN_EXPECTED_POINTS:g})",
            stacklevel=2,
        )
        adequate = False
    ratio = window_truncation_ratio(model, window, density_per_km2, pattern, sigma2)
    if ratio > TRUNCATION_FRACTION:
        suggested = 4.0 * tail_radius(model, TRUNCATION_FRACTION) / 1000.0
        warnings.warn(
            f"window {window} neglects an estimated {ratio:.2e} of the "
            f"interference (limit {TRUNCATION_FRACTION:g}); a square side or "
            f"disk diameter of at least {suggested:.3g} km would be adequate",
            stacklevel=2,
        )
        adequate = False
    return adequate


def adequate_window(
    model: PathLossModel,
    density_per_km2: float,
    min_expected_points: float = MIN_EXPECTED_POINTS,
) -> Disk:
    """Smallest disk window passing both adequacy rules for this model."""
    radius_km = 2.0 * tail_radius(model, TRUNCATION_FRACTION) / 1000.0
    floor_km = math.sqrt(min_expected_points / (math.pi * density_per_km2))
    return Disk(radius_km=max(radius_km, floor_km))


def dump_realization(realization: NetworkRealization, path) -> None:
    """Write one realization as CSV (x_m, y_m, is_serving, mainlobe_flag, fading)."""
    pts = realization.positions_m
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x_m,y_m,is_serving,mainlobe_flag,fading\n")
        for i in range(realization.n_points):
            fh.write(
                f"{float(pts[i, 0])!r},{float(pts[i, 1])!r},{int(i == realization.serving_index)},"
                f"{int(realization.mainlobe_flags[i])},{float(realization.fading[i])!r}\n"
            )
