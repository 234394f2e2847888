"""densify: density scaling of SINR and ASE in beamforming cellular networks.

A stochastic-geometry Monte Carlo simulator plus an analytical oracle for
the dense-network limit.  Base stations form a Poisson process; each carries
an antenna array whose count scales with density; the package quantifies how
the SINR of a typical user and the area spectral efficiency behave as the
network densifies under sub-linear, linear, and super-linear antenna scaling.
"""

__version__ = "0.1.0"

from .antenna import BeamPattern, ParametricStepScaling, UlaScaling, ula_array_response
from .asymptotics import (
    LimitParams,
    ase_slope_bounds,
    evaluate_mean_limit,
    mean_sinr_bounds,
    sample_limit_sinr,
)
from .fading import (
    Deterministic,
    LinkFadingConfig,
    NakagamiPower,
    RayleighPower,
    RicianPower,
)
from .geometry import (
    Disk,
    NetworkRealization,
    Square,
    adequate_window,
    realize,
    sample_ppp,
    serving_distance_quantile,
    serving_distances,
)
from .pathloss import (
    BoundedSingleSlope,
    FeasibilityReport,
    MultiSlope,
    PiecewiseTable,
    StretchedExponential,
    UrbanMacro,
    load_gain_table,
    radial_gain_integral,
    validate,
)
from .simulator import (
    DensityPointEstimate,
    SimConfig,
    SinrSample,
    estimate_point,
    sinr_of,
    sweep,
)
from .streams import substream

__all__ = [
    "__version__",
    "BeamPattern",
    "ParametricStepScaling",
    "UlaScaling",
    "ula_array_response",
    "LimitParams",
    "ase_slope_bounds",
    "evaluate_mean_limit",
    "mean_sinr_bounds",
    "sample_limit_sinr",
    "Deterministic",
    "LinkFadingConfig",
    "NakagamiPower",
    "RayleighPower",
    "RicianPower",
    "Disk",
    "NetworkRealization",
    "Square",
    "adequate_window",
    "realize",
    "sample_ppp",
    "serving_distance_quantile",
    "serving_distances",
    "BoundedSingleSlope",
    "FeasibilityReport",
    "MultiSlope",
    "PiecewiseTable",
    "StretchedExponential",
    "UrbanMacro",
    "load_gain_table",
    "radial_gain_integral",
    "validate",
    "DensityPointEstimate",
    "SimConfig",
    "SinrSample",
    "estimate_point",
    "sinr_of",
    "sweep",
    "substream",
]
