"""Sampled Weyl-Wigner calculus on uniform periodic grids."""
from .grid import FIELD_ROLES, MATRIX_ROLES, GridMismatchError, GridSpec, OperatorMatrix, PhaseField
from .transform import (
    fourier_shift,
    inverse_weyl,
    momentum_matrix,
    odot_kernel_quadrature,
    odot_numeric,
    operator_from_symbol,
    phase_expectation,
    position_matrix,
    sample_symbol,
    trace_expectation,
    weyl_transform,
    wigner_of,
)
from .snapshot import SnapshotError, export_csv, read_snapshot, write_snapshot

__all__ = [
    "GridSpec",
    "PhaseField",
    "OperatorMatrix",
    "GridMismatchError",
    "FIELD_ROLES",
    "MATRIX_ROLES",
    "fourier_shift",
    "weyl_transform",
    "inverse_weyl",
    "wigner_of",
    "trace_expectation",
    "phase_expectation",
    "odot_numeric",
    "odot_kernel_quadrature",
    "sample_symbol",
    "position_matrix",
    "momentum_matrix",
    "operator_from_symbol",
    "write_snapshot",
    "read_snapshot",
    "export_csv",
    "SnapshotError",
]
