"""Time propagation in phase space and in Hilbert space, and their comparison."""
from .compare import compare_evolutions
from .liouville import liouville_reference, shear
from .model import MONITOR_NAMES, ErrorReport, EvolutionConfig, PotentialSpec, TrajectoryRecord
from .semiquantum import (
    STABILITY_LIMIT,
    BlowUpError,
    correction_terms,
    integrate,
    momentum_derivative,
    semiquantum_rhs,
    spectral_radius_bound,
)

__all__ = [
    "PotentialSpec",
    "EvolutionConfig",
    "TrajectoryRecord",
    "ErrorReport",
    "MONITOR_NAMES",
    "liouville_reference",
    "shear",
    "momentum_derivative",
    "correction_terms",
    "semiquantum_rhs",
    "spectral_radius_bound",
    "STABILITY_LIMIT",
    "integrate",
    "BlowUpError",
    "compare_evolutions",
]
