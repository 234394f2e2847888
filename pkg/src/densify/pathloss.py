"""Physically feasible large-scale path-loss models.

A model maps distance r (meters) to a dimensionless mean channel gain L(r).
"Physically feasible" means: L is finite everywhere, bounded by its value at
zero distance, nonincreasing, and has a finite radial gain integral
``integral_0^inf r L(r) dr``.  That integral is what ties aggregate far-field
interference to the network density, so every estimator in this package
refuses to run on models where it diverges.

Built-in families: bounded single-slope, bounded multi-slope, stretched
exponential, an urban-macro (UMa) model with distance-dependent blockage, and
user-defined piecewise tables (linear interpolation in log-distance/dB space).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

__all__ = [
    "DivergenceError",
    "PathLossModel",
    "BoundedSingleSlope",
    "MultiSlope",
    "StretchedExponential",
    "UrbanMacro",
    "PiecewiseTable",
    "Violation",
    "FeasibilityReport",
    "validate",
    "radial_gain_integral",
    "tail_radius",
    "load_gain_table",
]

_SPEED_OF_LIGHT = 299_792_458.0

# Hard ceiling on the quadrature cutoff, relative to the model scale.
_MAX_DOUBLINGS = 60


class DivergenceError(Exception):
    """Raised when the radial gain integral of a model does not converge."""


class PathLossModel:
    """Base class: a deterministic, nonincreasing gain function of distance."""

    #: True when the per-link gain is random (e.g. LoS/NLoS blockage draws).
    is_stochastic: bool = False

    def evaluate(self, r):
        """Mean linear gain at distance r >= 0 (meters). Accepts arrays."""
        raise NotImplementedError

    def __call__(self, r):
        return self.evaluate(r)

    @property
    def gain_at_zero(self) -> float:
        """L(0), the gain ceiling of a feasible model."""
        return float(self.evaluate(0.0))

    def scaled(self, factor: float) -> "PathLossModel":
        """Copy of the model with every gain multiplied by `factor`."""
        raise NotImplementedError

    def sample_gain(self, r, u):
        """Per-link gain given uniform draws u; deterministic models ignore u."""
        return self.evaluate(r)

    def scale_hint(self) -> float:
        """Characteristic distance (meters) used to seed quadrature grids."""
        return 1.0

    def quad_points(self) -> list[float]:
        """Radii where the gain function has kinks (quadrature boundaries)."""
        return []

    def _check_radius(self, r) -> np.ndarray:
        arr = np.asarray(r, dtype=float)
        if np.any(arr < 0.0):
            raise ValueError(f"distance must be nonnegative, got {arr.min()}")
        return arr


@dataclass(frozen=True)
class BoundedSingleSlope(PathLossModel):
    """L(r) = gain0 * (1 + r/breakpoint_m)^(-exponent).

    Bounded at the origin; feasible iff exponent > 2.
    """

    gain0: float = 1.0
    exponent: float = 4.0
    breakpoint_m: float = 1.0

    def __post_init__(self):
        if self.gain0 <= 0 or self.breakpoint_m <= 0:
            raise ValueError("gain0 and breakpoint_m must be positive")
        if self.exponent <= 0:
            raise ValueError("exponent must be positive")

    def evaluate(self, r):
        r = self._check_radius(r)
        return self.gain0 * (1.0 + r / self.breakpoint_m) ** (-self.exponent)

    def scaled(self, factor):
        return BoundedSingleSlope(self.gain0 * factor, self.exponent, self.breakpoint_m)

    def scale_hint(self):
        return self.breakpoint_m


@dataclass(frozen=True)
class MultiSlope(PathLossModel):
    """Flat gain up to the first breakpoint, then continuous power segments.

    ``exponents[k]`` applies between ``breakpoints_m[k]`` and the next
    breakpoint; the last exponent governs the tail (feasible iff > 2).
    """

    gain0: float = 1.0
    breakpoints_m: tuple[float, ...] = (100.0,)
    exponents: tuple[float, ...] = (4.0,)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints_m)
        exps = tuple(float(e) for e in self.exponents)
        object.__setattr__(self, "breakpoints_m", bps)
        object.__setattr__(self, "exponents", exps)
        if self.gain0 <= 0:
            raise ValueError("gain0 must be positive")
        if len(bps) != len(exps) or not bps:
            raise ValueError("need one exponent per breakpoint")
        if any(b <= 0 for b in bps) or any(x > y for x, y in zip(bps, bps[1:], strict=False)):
            raise ValueError("breakpoints must be positive and increasing")
        if any(e < 0 for e in exps):
            raise ValueError("exponents must be nonnegative")
        # Segment-start gains, precomputed for continuity.
        gains = [self.gain0]
        for k in range(1, len(bps)):
            gains.append(gains[-1] * (bps[k] / bps[k - 1]) ** (-exps[k - 1]))
        object.__setattr__(self, "_knot_gains", tuple(gains))

    def evaluate(self, r):
        r = self._check_radius(r)
        scalar = r.ndim == 0
        rr = np.atleast_1d(r).astype(float)
        idx = np.searchsorted(np.asarray(self.breakpoints_m), rr, side="right")
        out = np.full_like(rr, self.gain0)
        for k, (bp, ex) in enumerate(zip(self.breakpoints_m, self.exponents)):
            seg = idx == k + 1
            if np.any(seg):
                out[seg] = self._knot_gains[k] * (rr[seg] / bp) ** (-ex)
        return float(out[0]) if scalar else out

    def scaled(self, factor):
        return MultiSlope(self.gain0 * factor, self.breakpoints_m, self.exponents)

    def scale_hint(self):
        return self.breakpoints_m[0]

    def quad_points(self):
        return list(self.breakpoints_m)


@dataclass(frozen=True)
class StretchedExponential(PathLossModel):
    """L(r) = gain0 * exp(-(r/decay_m)^shape); always feasible for shape > 0."""

    gain0: float = 1.0
    decay_m: float = 1000.0
    shape: float = 1.0

    def __post_init__(self):
        if self.gain0 <= 0 or self.decay_m <= 0 or self.shape <= 0:
            raise ValueError("gain0, decay_m and shape must be positive")

    def evaluate(self, r):
        r = self._check_radius(r)
        x = r / self.decay_m
        if self.shape == 1.0:
            return self.gain0 * np.exp(-x)
        if self.shape == 2.0:
            return self.gain0 * np.exp(-(x * x))
        return self.gain0 * np.exp(-(x**self.shape))

    def scaled(self, factor):
        return StretchedExponential(self.gain0 * factor, self.decay_m, self.shape)

    def scale_hint(self):
        return self.decay_m


@dataclass(frozen=True)
class UrbanMacro(PathLossModel):
    """Urban-macro model: dual-slope LoS/NLoS segments plus a distance-dependent
    LoS probability, mapped through the BS/UE height difference so the gain is
    finite at zero ground distance.

    The constants follow the common urban-macro parameterization (22/40
    dB-per-decade LoS slopes around a height-dependent breakpoint, 39.08
    dB-per-decade NLoS slope, ``18/r + exp(-r/63)(1-18/r)`` LoS probability).
    They are defaults, not gospel: every acceptance property of this package
    depends only on the model being bounded, monotone and integrable.

    `evaluate` returns the blockage-averaged gain.  `sample_gain` draws the
    LoS/NLoS branch per link from the LoS probability.
    """

    carrier_ghz: float = 28.0
    bs_height_m: float = 25.0
    ue_height_m: float = 1.5
    env_height_m: float = 1.0
    power_scale: float = 1.0

    is_stochastic = True

    def __post_init__(self):
        if self.carrier_ghz <= 0 or self.power_scale <= 0:
            raise ValueError("carrier_ghz and power_scale must be positive")
        if not (0 < self.ue_height_m < self.bs_height_m):
            raise ValueError("need 0 < ue_height_m < bs_height_m")
        breakpoint_m = (
            4.0
            * (self.bs_height_m - self.env_height_m)
            * (self.ue_height_m - self.env_height_m)
            * self.carrier_ghz
            * 1e9
            / _SPEED_OF_LIGHT
        )
        object.__setattr__(self, "_breakpoint_m", breakpoint_m)

    def _d3(self, r):
        dh = self.bs_height_m - self.ue_height_m
        return np.sqrt(r * r + dh * dh)

    def los_probability(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            far = 18.0 / r + np.exp(-r / 63.0) * (1.0 - 18.0 / r)
        return np.where(r <= 18.0, 1.0, far)

    def _los_gain(self, r):
        d3 = self._d3(np.asarray(r, dtype=float))
        dh = self.bs_height_m - self.ue_height_m
        fterm = 20.0 * np.log10(self.carrier_ghz)
        pl1 = 28.0 + 22.0 * np.log10(d3) + fterm
        pl2 = 28.0 + 40.0 * np.log10(d3) + fterm - 9.0 * np.log10(self._breakpoint_m**2 + dh * dh)
        pl = np.where(np.asarray(r, dtype=float) <= self._breakpoint_m, pl1, pl2)
        return np.minimum(1.0, 10.0 ** (-pl / 10.0)) * self.power_scale

    def _nlos_gain(self, r):
        d3 = self._d3(np.asarray(r, dtype=float))
        pl = (
            13.54
            + 39.08 * np.log10(d3)
            + 20.0 * np.log10(self.carrier_ghz)
            - 0.6 * (self.ue_height_m - 1.5)
        )
        pl_db = np.maximum(pl, -10.0 * np.log10(self._los_gain(r) / self.power_scale))
        return np.minimum(1.0, 10.0 ** (-pl_db / 10.0)) * self.power_scale

    def evaluate(self, r):
        if isinstance(r, (int, float)) or np.ndim(r) == 0:
            return self._evaluate_scalar(float(r))
        r = self._check_radius(r)
        p = self.los_probability(r)
        return p * self._los_gain(r) + (1.0 - p) * self._nlos_gain(r)

    def _evaluate_scalar(self, r: float) -> float:
        # Pure-math twin of the vector path; nested quadrature calls this at
        # tens of thousands of points, where array dispatch dominates.
        if r < 0.0:
            raise ValueError(f"distance must be nonnegative, got {r}")
        dh = self.bs_height_m - self.ue_height_m
        d3 = math.hypot(r, dh)
        fterm = 20.0 * math.log10(self.carrier_ghz)
        if r <= self._breakpoint_m:
            pl_los = 28.0 + 22.0 * math.log10(d3) + fterm
        else:
            pl_los = (
                28.0
                + 40.0 * math.log10(d3)
                + fterm
                - 9.0 * math.log10(self._breakpoint_m**2 + dh * dh)
            )
        pl_nlos = max(
            13.54 + 39.08 * math.log10(d3) + fterm - 0.6 * (self.ue_height_m - 1.5),
            pl_los,
        )
        los = min(1.0, 10.0 ** (-pl_los / 10.0)) * self.power_scale
        nlos = min(1.0, 10.0 ** (-pl_nlos / 10.0)) * self.power_scale
        if r <= 18.0:
            p = 1.0
        else:
            p = 18.0 / r + math.exp(-r / 63.0) * (1.0 - 18.0 / r)
        return p * los + (1.0 - p) * nlos

    def sample_gain(self, r, u):
        r = self._check_radius(r)
        return np.where(np.asarray(u) < self.los_probability(r), self._los_gain(r), self._nlos_gain(r))

    def scaled(self, factor):
        return UrbanMacro(
            self.carrier_ghz,
            self.bs_height_m,
            self.ue_height_m,
            self.env_height_m,
            self.power_scale * factor,
        )

    def scale_hint(self):
        return self.bs_height_m - self.ue_height_m

    def quad_points(self):
        return [18.0, self._breakpoint_m]


class PiecewiseTable(PathLossModel):
    """Gain table interpolated linearly in (log-distance, dB) space.

    Between positive knots the gain is a power law; beyond the table it is
    extrapolated with the first/last segment slopes, which lets a sampled
    power law keep its singularity at the origin (and be rejected by the
    feasibility check, as it should be).  A knot at r = 0 pins the origin
    instead, with dB-linear interpolation over the first segment.
    """

    def __init__(self, radii_m, gains):
        radii = np.asarray(radii_m, dtype=float)
        gains = np.asarray(gains, dtype=float)
        if radii.ndim != 1 or radii.shape != gains.shape or radii.size < 2:
            raise ValueError("need two equal-length 1-D columns with >= 2 rows")
        if np.any(np.diff(radii) <= 0) or radii[0] < 0:
            raise ValueError("radii must be nonnegative and strictly increasing")
        if np.any(gains <= 0) or not np.all(np.isfinite(gains)):
            raise ValueError("gains must be positive and finite")
        self.radii_m = radii
        self.gains = gains
        self._has_origin = radii[0] == 0.0
        pos = radii[1:] if self._has_origin else radii
        pg = gains[1:] if self._has_origin else gains
        self._log_r = np.log(pos)
        self._log_g = np.log(pg)
        self._head_slope = (self._log_g[1] - self._log_g[0]) / (self._log_r[1] - self._log_r[0])
        self._tail_slope = (self._log_g[-1] - self._log_g[-2]) / (self._log_r[-1] - self._log_r[-2])

    def evaluate(self, r):
        r = self._check_radius(r)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        with np.errstate(divide="ignore", over="ignore"):
            logr = np.log(r)
            out = np.exp(np.interp(logr, self._log_r, self._log_g))
            below = logr < self._log_r[0]
            if np.any(below):
                if self._has_origin:
                    # dB-linear in r between the origin knot and the first positive knot.
                    frac = r / self.radii_m[1]
                    head = self.gains[0] * (self.gains[1] / self.gains[0]) ** frac
                else:
                    head = np.exp(self._log_g[0] + self._head_slope * (logr - self._log_r[0]))
                out = np.where(below, head, out)
            above = logr > self._log_r[-1]
            if np.any(above):
                tail = np.exp(self._log_g[-1] + self._tail_slope * (logr - self._log_r[-1]))
                out = np.where(above, tail, out)
        return float(out[0]) if scalar else out

    @property
    def gain_at_zero(self) -> float:
        if self._has_origin:
            return float(self.gains[0])
        if self._head_slope < 0:
            return math.inf
        if self._head_slope > 0:
            return 0.0
        return float(np.exp(self._log_g[0]))

    def scaled(self, factor):
        return PiecewiseTable(self.radii_m, self.gains * factor)

    def scale_hint(self):
        return float(self.radii_m[1] if self._has_origin else self.radii_m[0])

    def quad_points(self):
        return [float(r) for r in self.radii_m if r > 0]

    def analytic_radial_integral(self) -> float:
        """Exact integral of r*L(r) over [0, inf) using per-segment power laws."""
        if self._tail_slope >= -2.0:
            raise DivergenceError(f"radial gain integral diverges in the tail for {self!r}")
        total = 0.0
        # Head piece below the first positive knot.
        r1 = float(np.exp(self._log_r[0]))
        g1 = float(np.exp(self._log_g[0]))
        if self._has_origin:
            total += float(integrate.quad(lambda x: x * self.evaluate(x), 0.0, r1, limit=200)[0])
        else:
            s = self._head_slope
            if s <= -2.0:
                raise DivergenceError(f"radial gain integral diverges at the origin for {self!r}")
            total += g1 * r1 * r1 / (s + 2.0)
        # Interior power segments.
        for k in range(len(self._log_r) - 1):
            ra, rb = np.exp(self._log_r[k]), np.exp(self._log_r[k + 1])
            ga = np.exp(self._log_g[k])
            s = (self._log_g[k + 1] - self._log_g[k]) / (self._log_r[k + 1] - self._log_r[k])
            if abs(s + 2.0) < 1e-12:
                total += ga * ra * ra * math.log(rb / ra)
            else:
                total += ga * ra ** (-s) * (rb ** (s + 2.0) - ra ** (s + 2.0)) / (s + 2.0)
        # Extrapolated tail.
        rn = float(np.exp(self._log_r[-1]))
        gn = float(np.exp(self._log_g[-1]))
        total += -gn * rn * rn / (self._tail_slope + 2.0)
        return total

    def __repr__(self):
        return f"PiecewiseTable({len(self.radii_m)} knots, r in [{self.radii_m[0]:g}, {self.radii_m[-1]:g}] m)"


def load_gain_table(path) -> PiecewiseTable:
    """Load a user-defined model from a two-column CSV (r_meters, linear_gain).

    A header row is required; rows must be sorted by increasing radius.
    """
    raw = np.genfromtxt(path, delimiter=",", skip_header=1, dtype=float)
    if raw.ndim != 2 or raw.shape[1] != 2 or raw.shape[0] < 2:
        raise ValueError(f"{path}: expected a header row plus >=2 rows of (r_meters, linear_gain)")
    if np.any(np.isnan(raw)):
        raise ValueError(f"{path}: non-numeric cell (is the header row present exactly once?)")
    return PiecewiseTable(raw[:, 0], raw[:, 1])


# ---------------------------------------------------------------------------
# Radial gain integral (adaptive quadrature with certified tail truncation)
# ---------------------------------------------------------------------------


def _tail_estimate(model: PathLossModel, r: float) -> float:
    """Estimate integral_r^inf x L(x) dx by a local power-law extension.

    The slope is measured over a short 1.1x step so the extension tracks even
    steep stretched-exponential decay to within a small factor (callers apply
    a safety margin).  Returns inf while the local decay is too shallow to
    bound the tail, which is how divergence is detected.
    """
    g1 = float(model.evaluate(r))
    g2 = float(model.evaluate(1.1 * r))
    if g2 <= 0.0 or g1 <= 0.0:
        return 0.0
    slope = math.log(g2 / g1) / math.log(1.1)
    if slope >= -2.0 - 1e-9:
        return math.inf
    return g1 * r * r / (-slope - 2.0)


def radial_gain_integral(
    model: PathLossModel, rel_tol: float = 1e-8, lower: float = 0.0
) -> float:
    """integral_lower^inf r L(r) dr with relative error below `rel_tol`.

    The infinite upper limit is handled by doubling the cutoff until the
    estimated tail contribution drops below the tolerance.  Raises
    `DivergenceError` when the tail never shrinks or the origin is singular.
    """
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must be in (0, 1)")
    if lower < 0.0:
        raise ValueError("lower must be nonnegative")

    analytic = getattr(model, "analytic_radial_integral", None)
    if analytic is not None and lower == 0.0:
        value = analytic()
        if value is not None:
            return float(value)

    origin = model.evaluate(max(lower, 0.0))
    if not np.isfinite(origin):
        raise DivergenceError(f"radial gain integral diverges: unbounded at origin for {model!r}")

    def integrand(x):
        return x * float(model.evaluate(x))

    kinks = sorted(p for p in model.quad_points() if p > lower)
    seg_tol = rel_tol / 8.0
    start = lower
    cutoff = max(model.scale_hint(), lower * 2.0, 1e-12)
    total = 0.0
    previous = None
    for _ in range(_MAX_DOUBLINGS):
        pts = [start] + [p for p in kinks if start < p < cutoff] + [cutoff]
        for a, b in zip(pts, pts[1:]):
            val, _err = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=seg_tol, limit=500)
            total += val
        tail = _tail_estimate(model, cutoff)
        if math.isfinite(tail):
            # The extension is exact for power tails and a close under-estimate
            # for steeper decay, so consecutive agreement certifies the value.
            candidate = total + tail
            converged = (
                previous is not None
                and abs(candidate - previous) <= seg_tol * abs(candidate)
                and tail <= 0.25 * abs(candidate)
            )
            if converged:
                return candidate
            previous = candidate
        else:
            previous = None
        start = cutoff
        cutoff *= 2.0
    raise DivergenceError(
        f"radial gain integral did not converge by r={cutoff:g} m for {model!r}"
    )


def tail_radius(model: PathLossModel, rel_frac: float = 1e-3) -> float:
    """Smallest radius R with integral_R^inf r L dr <= rel_frac * total."""
    total = radial_gain_integral(model, rel_tol=min(1e-6, rel_frac / 10.0))
    threshold = rel_frac * total

    def passes(r):
        return 2.0 * _tail_estimate(model, r) <= threshold

    hi = max(model.scale_hint(), 1e-12)
    for _ in range(_MAX_DOUBLINGS):
        if passes(hi):
            break
        hi *= 2.0
    else:
        raise DivergenceError(f"tail of {model!r} never fell below {rel_frac} of its integral")
    lo = hi / 2.0
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Feasibility validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One named feasibility failure, with the offending radius when local."""

    name: str
    radius_m: float | None = None


@dataclass(frozen=True)
class FeasibilityReport:
    is_feasible: bool
    gain_integral: float = math.nan
    violations: tuple[Violation, ...] = field(default_factory=tuple)


def _check_grid(model: PathLossModel) -> np.ndarray:
    scale = model.scale_hint()
    grid = np.geomspace(scale * 1e-4, scale * 1e6, 400)
    pts = np.asarray(model.quad_points(), dtype=float)
    return np.unique(np.concatenate([[0.0], grid, pts]))


def validate(model: PathLossModel, tol: float = 1e-9) -> FeasibilityReport:
    """Check boundedness, monotonicity and gain-integral convergence.

    Failures are reported, never raised.  Built-in models get their analytic
    shortcuts through the same code path: the dense-grid scan is cheap and
    catches parameterization mistakes uniformly.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    violations: list[Violation] = []

    ceiling = model.gain_at_zero
    if not math.isfinite(ceiling):
        violations.append(Violation("unbounded at origin", 0.0))
    else:
        grid = _check_grid(model)
        gains = np.asarray(model.evaluate(grid), dtype=float)
        bad = ~np.isfinite(gains)
        if np.any(bad):
            violations.append(Violation("non-finite gain", float(grid[bad][0])))
        else:
            over = gains > ceiling * (1.0 + tol)
            if np.any(over):
                violations.append(Violation("gain exceeds value at zero", float(grid[over][0])))
            rising = np.diff(gains) > tol * np.maximum(gains[:-1], 1e-300)
            if np.any(rising):
                violations.append(
                    Violation("gain increases with distance", float(grid[1:][rising][0]))
                )

    gain_integral = math.nan
    if not violations:
        try:
            gain_integral = radial_gain_integral(model, rel_tol=1e-8)
        except DivergenceError as exc:
            name = "unbounded at origin" if "origin" in str(exc) else "gain integral diverges"
            violations.append(Violation(name))
    else:
        try:
            gain_integral = radial_gain_integral(model, rel_tol=1e-6, lower=0.0)
        except (DivergenceError, ValueError):
            pass

    return FeasibilityReport(
        is_feasible=not violations,
        gain_integral=gain_integral,
        violations=tuple(violations),
    )
