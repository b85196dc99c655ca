"""Key rates for reference-frame-independent QKD with flawed sources.

The pipeline: describe the transmitter (SourceSpec), the channel
(ChannelParams) and the protocol overheads (ProtocolParams), then ask
for key-rate points.  Lower layers (coefficients, yield simulation,
transmission-rate polytopes, phase-error bounds) are importable on their
own for testing and exploration.
"""

from .channel import (BASIS_LABELS, ChannelParams, StatsTable,
                      single_photon_yields, wcs_statistics)
from .config import (ConfigError, RunConfig, VariantConfig, load_config,
                     load_preset, preset_names)
from .polytope import BACKEND, EmptyPolytopeError, Polytope
from .qubit import BlochVector, PureQubitState, binary_entropy, eig2
from .rate import (KeyRatePoint, ProtocolParams, evaluate_point,
                   optimize_intensity, secret_key_rate, sweep_distance)
from .security import (DegenerateSystemError, InfeasibleStatisticsError,
                       SecurityAbort, SecuritySummary, TransmissionRates,
                       UndefinedStatisticsError, analyze)
from .source import (STATE_LABELS, CoefficientSet, SourceSpec,
                     build_coefficients)

__version__ = "0.1.0"

__all__ = [
    "BASIS_LABELS", "BACKEND", "BlochVector", "ChannelParams",
    "CoefficientSet", "ConfigError", "DegenerateSystemError",
    "EmptyPolytopeError", "InfeasibleStatisticsError", "KeyRatePoint",
    "Polytope", "ProtocolParams", "PureQubitState", "RunConfig",
    "STATE_LABELS", "SecurityAbort", "SecuritySummary", "SourceSpec",
    "StatsTable", "TransmissionRates", "UndefinedStatisticsError",
    "VariantConfig", "analyze", "binary_entropy", "build_coefficients",
    "eig2", "evaluate_point", "load_config", "load_preset",
    "optimize_intensity", "preset_names", "secret_key_rate",
    "single_photon_yields", "sweep_distance", "wcs_statistics",
    "__version__",
]
