"""Uniform phase-space grid and the two sampled data types living on it."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "PhaseField",
    "OperatorMatrix",
    "GridMismatchError",
    "FIELD_ROLES",
    "MATRIX_ROLES",
]

FIELD_ROLES = ("symbol", "density")
MATRIX_ROLES = ("operator", "observable", "quasidensity", "density")


class GridMismatchError(ValueError):
    """Two objects combined in one operation live on different grids."""


@dataclass(frozen=True)
class GridSpec:
    """Position lattice x_j = x_min + j dx and its Fourier-conjugate momentum lattice.

    The momentum lattice is p_k = (k - n/2) dp with dp = 2 pi hbar / (n dx), so
    both axes hold ``n`` points and ``n dx dp = 2 pi hbar``.
    """

    n: int = 128
    x_min: float = -8.0
    x_max: float = 8.0
    hbar: float = 1.0

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 8, got {n!r}")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise ValueError(f"need finite x_max > x_min, got [{self.x_min}, {self.x_max})")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dp(self) -> float:
        return 2 * np.pi * self.hbar / (self.n * self.dx)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def p(self) -> np.ndarray:
        return self.dp * (np.arange(self.n) - self.n // 2)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(q, p) arrays of shape (n, n) indexed [q-index, p-index]."""
        return np.meshgrid(self.x, self.p, indexing="ij")

    def with_hbar(self, hbar: float) -> "GridSpec":
        return GridSpec(self.n, self.x_min, self.x_max, hbar)

    def as_dict(self) -> dict:
        return {"n": int(self.n), "x_min": float(self.x_min), "x_max": float(self.x_max), "hbar": float(self.hbar)}


def _check_values(values: np.ndarray, n: int, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.shape != (n, n):
        raise ValueError(f"{what} must have shape ({n}, {n}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    return arr.astype(complex, copy=False)


@dataclass(frozen=True)
class PhaseField:
    """Complex samples A(q_i, p_k) on the grid, indexed [q-index, p-index]."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    role: str = "symbol"

    def __post_init__(self):
        if self.role not in FIELD_ROLES:
            raise ValueError(f"unknown field role {self.role!r}")
        object.__setattr__(self, "values", _check_values(self.values, self.grid.n, "field values"))

    @property
    def cell(self) -> float:
        return self.grid.dx * self.grid.dp

    def integral(self) -> complex:
        return complex(self.values.sum() * self.cell)

    def check_density(self, tol: float = 1e-6, imag_tol: float = 1e-10) -> None:
        """Raise ValueError unless values are real and integrate to one."""
        scale = max(np.abs(self.values).max(), 1e-300)
        if np.abs(self.values.imag).max() > imag_tol * scale:
            raise ValueError("density field has a non-negligible imaginary part")
        total = self.integral().real
        if abs(total - 1.0) > tol:
            raise ValueError(f"density is not normalized: integral = {total!r}")

    def with_values(self, values, role=None) -> "PhaseField":
        return PhaseField(self.grid, values, role or self.role)

    def __add__(self, other):
        _same_grid(self, other)
        return PhaseField(self.grid, self.values + other.values, "symbol")

    def __sub__(self, other):
        _same_grid(self, other)
        return PhaseField(self.grid, self.values - other.values, "symbol")

    def __mul__(self, scalar):
        return PhaseField(self.grid, self.values * scalar, "symbol")

    __rmul__ = __mul__


@dataclass(frozen=True)
class OperatorMatrix:
    """Discretized kernel: ``entries[i, j] = A_K(x_i, x_j) * dx``.

    The single factor of dx absorbed here makes composition a plain matrix
    product and the trace a plain diagonal sum.
    """

    grid: GridSpec
    entries: np.ndarray = field(repr=False)
    role: str = "operator"

    def __post_init__(self):
        if self.role not in MATRIX_ROLES:
            raise ValueError(f"unknown matrix role {self.role!r}")
        object.__setattr__(self, "entries", _check_values(self.entries, self.grid.n, "matrix entries"))

    @classmethod
    def from_kernel(cls, grid: GridSpec, kernel, role: str = "operator") -> "OperatorMatrix":
        """Sample a callable kernel(x, y) on the grid."""
        x = grid.x
        return cls(grid, kernel(x[:, None], x[None, :]) * grid.dx, role)

    @property
    def kernel(self) -> np.ndarray:
        return self.entries / self.grid.dx

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, self.entries.conj().T, self.role)

    def hermiticity_residual(self) -> float:
        """max |A - A^dagger| relative to max |A|."""
        scale = max(np.abs(self.entries).max(), 1e-300)
        return float(np.abs(self.entries - self.entries.conj().T).max() / scale)

    def hermitian_part(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, 0.5 * (self.entries + self.entries.conj().T), self.role)

    def with_entries(self, entries, role=None) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, entries, role or self.role)

    def __matmul__(self, other):
        _same_grid(self, other)
        return OperatorMatrix(self.grid, self.entries @ other.entries)

    def __add__(self, other):
        _same_grid(self, other)
        return OperatorMatrix(self.grid, self.entries + other.entries)

    def __sub__(self, other):
        _same_grid(self, other)
        return OperatorMatrix(self.grid, self.entries - other.entries)

    def __mul__(self, scalar):
        return OperatorMatrix(self.grid, self.entries * scalar, self.role)

    __rmul__ = __mul__


def _same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")
