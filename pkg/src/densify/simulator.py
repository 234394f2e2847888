"""Monte Carlo estimation of SINR, spectral efficiency and ASE.

Each trial composes one network realization with the conditional SINR: the
serving station contributes main-lobe gain times desired fading, main-lobe
interferers add at full gain, the rest at the side-lobe gain, plus noise.
Per-density estimates aggregate independent trials whose random streams are
keyed by (master seed, sweep path, point index, trial index), so a sweep is
bit-reproducible regardless of worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .antenna import AntennaScaling, BeamPattern
from .fading import LinkFadingConfig
from .geometry import (
    NetworkRealization,
    Window,
    adequate_window,
    check_window_adequacy,
    realize,
)
from .pathloss import PathLossModel
from .streams import substream

__all__ = [
    "SimulationError",
    "SimConfig",
    "SinrSample",
    "DensityPointEstimate",
    "PointFailure",
    "resolve_workers",
    "sinr_of",
    "estimate_point",
    "sweep",
]

_LN2 = math.log(2.0)


class SimulationError(Exception):
    """A trial failed; carries the density point and trial index."""


def resolve_workers(explicit: int | None = None) -> int:
    """Worker count: explicit argument, else DENSIFY_THREADS, else CPU count."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("DENSIFY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SimConfig:
    """Everything one density point needs, bundled for workers.

    `window=None` resizes the window per density with the adequacy rule.
    `stochastic_gains=None` draws per-link path-loss branches exactly when the
    model is stochastic (set False to force the blockage-averaged gain).
    `block_trials` fixes the trial chunking; it must not depend on the worker
    count or the output bytes would.
    """

    model: PathLossModel
    scaling: AntennaScaling
    fading: LinkFadingConfig = LinkFadingConfig()
    window: Window | None = None
    sigma2: float = 0.0
    trials: int = 20_000
    master_seed: int = 0
    seed_path: tuple[int, ...] = ()
    stochastic_gains: bool | None = None
    check_windows: bool = True
    workers: int | None = None
    block_trials: int = 512

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")
        if self.trials < 2:
            raise ValueError("need at least 2 trials")
        if self.block_trials < 1:
            raise ValueError("block_trials must be positive")

    @property
    def draws_stochastic_gains(self) -> bool:
        if self.stochastic_gains is None:
            return self.model.is_stochastic
        return self.stochastic_gains


@dataclass(frozen=True)
class SinrSample:
    """One conditional SINR evaluation with its power components."""

    sinr: float
    signal: float
    interference_main: float
    interference_side: float
    noise: float
    serving_distance_m: float


@dataclass(frozen=True)
class DensityPointEstimate:
    """Aggregates for one density: means with 95% half-widths, plus ASE.

    `ase_bps_hz_m2` is density (converted to per m^2) times the mean
    spectral efficiency, the network throughput per unit area.
    """

    density_per_km2: float
    n_antennas: int
    trials: int
    mean_sinr: float
    sinr_ci: float
    median_sinr: float
    mean_se_bps_hz: float
    se_ci: float
    ase_bps_hz_m2: float
    master_seed: int


@dataclass(frozen=True)
class PointFailure:
    density_per_km2: float
    point_index: int
    message: str


def sinr_of(
    realization: NetworkRealization,
    model: PathLossModel,
    pattern: BeamPattern,
    sigma2: float,
) -> SinrSample:
    """Conditional SINR of one realization; pure given its draws."""
    gains = _link_gains(realization, model)
    contrib = gains * realization.fading
    serving_term = float(contrib[realization.serving_index])
    main_sum = float(contrib[realization.mainlobe_flags].sum())
    side_sum = max(float(contrib.sum()) - main_sum - serving_term, 0.0)

    signal = pattern.main_gain * serving_term
    interference_main = pattern.main_gain * main_sum
    interference_side = pattern.side_gain * side_sum
    denominator = interference_main + interference_side + sigma2
    if denominator > 0.0:
        sinr = signal / denominator
    else:
        # Noise-free and interference-free: infinite ratio if any power
        # arrives, zero if the signal underflowed too.
        sinr = math.inf if signal > 0.0 else 0.0
    return SinrSample(
        sinr=sinr,
        signal=signal,
        interference_main=interference_main,
        interference_side=interference_side,
        noise=sigma2,
        serving_distance_m=realization.serving_distance_m,
    )


def _link_gains(realization: NetworkRealization, model: PathLossModel) -> np.ndarray:
    if model.is_stochastic and realization.gain_uniforms is not None:
        return model.sample_gain(realization.distances_m, realization.gain_uniforms)
    return model.evaluate(realization.distances_m)


def _run_block(args) -> np.ndarray:
    """Worker: SINR values for trials [start, stop) of one density point."""
    (config, density, window, pattern, point_index, start, stop) = args
    out = np.empty(stop - start)
    stochastic = config.draws_stochastic_gains
    for t in range(start, stop):
        rng = substream(config.master_seed, *config.seed_path, point_index, t)
        try:
            real = realize(
                density,
                window,
                config.scaling,
                config.fading,
                rng,
                pattern_override=pattern,
                stochastic_gains=stochastic,
                seed=(config.master_seed, *config.seed_path, point_index, t),
            )
        except Exception as exc:
            raise SimulationError(
                f"trial {t} at density {density} per km^2 failed: {exc}"
            ) from exc
        out[t - start] = sinr_of(real, config.model, pattern, config.sigma2).sinr
    return out


def _trial_sinrs(config: SimConfig, density: float, point_index: int) -> np.ndarray:
    window = config.window or adequate_window(config.model, density)
    n_antennas = config.scaling.antennas_for_density(density)
    pattern = config.scaling.pattern_for(n_antennas)
    if config.check_windows:
        check_window_adequacy(config.model, window, density, pattern, config.sigma2)

    blocks = [
        (config, density, window, pattern, point_index, start, min(start + config.block_trials, config.trials))
        for start in range(0, config.trials, config.block_trials)
    ]
    workers = resolve_workers(config.workers)
    if workers == 1 or len(blocks) == 1:
        parts = [_run_block(b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(blocks))) as pool:
            parts = list(pool.map(_run_block, blocks))
    return np.concatenate(parts)


def estimate_point(
    density_per_km2: float, config: SimConfig, point_index: int = 0
) -> DensityPointEstimate:
    """Monte Carlo estimate at one density; deterministic given the config."""
    sinr = _trial_sinrs(config, density_per_km2, point_index)
    se = np.log1p(sinr) / _LN2
    n = sinr.size
    mean_sinr = float(sinr.mean())
    mean_se = float(se.mean())
    return DensityPointEstimate(
        density_per_km2=density_per_km2,
        n_antennas=config.scaling.antennas_for_density(density_per_km2),
        trials=n,
        mean_sinr=mean_sinr,
        sinr_ci=float(1.96 * sinr.std(ddof=1) / math.sqrt(n)),
        median_sinr=float(np.median(sinr)),
        mean_se_bps_hz=mean_se,
        se_ci=float(1.96 * se.std(ddof=1) / math.sqrt(n)),
        ase_bps_hz_m2=density_per_km2 * 1e-6 * mean_se,
        master_seed=config.master_seed,
    )


def sweep(
    densities, config: SimConfig
) -> list[DensityPointEstimate | PointFailure]:
    """One estimate per density, in order; failures are recorded, not raised.

    Every point derives its own streams from (master seed, point index), so
    points are independent and a partial rerun reproduces the same numbers.
    """
    densities = [float(d) for d in densities]
    if any(b <= a for a, b in zip(densities, densities[1:])):
        raise ValueError("densities must be strictly increasing")
    results: list[DensityPointEstimate | PointFailure] = []
    for index, density in enumerate(densities):
        try:
            results.append(estimate_point(density, config, point_index=index))
        except Exception as exc:  # collected per point; the sweep continues
            results.append(PointFailure(density, index, str(exc)))
    return results
