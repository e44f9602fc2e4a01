"""Groenewold quasidensity operators and their spectral diagnostics.

A classical phase-space density rho_C maps to the Hermitian, unit-trace
operator 2 pi hbar W^-1(rho_C). For the Gaussian family
rho_C = (sqrt(alpha beta)/pi) exp(-(alpha q^2 + beta p^2)) the kernel is known
in closed form and the spectrum is (1 - r) r^n with r = (1 - k)/(1 + k),
k = hbar sqrt(alpha beta), so the operator is a pure state exactly when
alpha beta hbar^2 = 1 and has negative eigenvalues once it exceeds 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .io import dumps
from .numeric.grid import GridSpec, OperatorMatrix, PhaseField
from .numeric.transform import inverse_weyl

__all__ = [
    "QuasidensityOperator",
    "SpectrumReport",
    "groenewold_from_density",
    "gaussian_density",
    "gaussian_quasidensity",
    "mix_quasidensities",
    "spectrum_diagnostics",
    "point_density",
    "point_density_diagnostic",
    "grid_for_gaussian",
    "NEGATIVITY_THRESHOLD",
    "MIN_SAMPLES_PER_SD",
]

#: Normalization slack accepted on input densities.
NORMALIZATION_TOL = 1e-6
#: Largest relative anti-Hermitian part tolerated when building from a density.
HERMITIAN_TOL = 1e-6
#: Most-negative eigenvalue below -NEGATIVITY_THRESHOLD counts as genuine negativity.
NEGATIVITY_THRESHOLD = 1e-4
#: Closed-form kernels must resolve each Gaussian width by this many samples.
MIN_SAMPLES_PER_SD = 4


@dataclass(frozen=True)
class QuasidensityOperator:
    """Hermitian unit-trace matrix with a note on where it came from.

    ``construction_residual`` is the relative anti-Hermitian part that was
    projected away when the matrix was built (zero for closed forms).
    """

    matrix: OperatorMatrix
    provenance: str
    construction_residual: float = 0.0

    def __post_init__(self):
        if self.matrix.role != "quasidensity":
            object.__setattr__(self, "matrix", self.matrix.with_entries(self.matrix.entries, "quasidensity"))
        res = self.matrix.hermiticity_residual()
        if res > 1e-12:
            raise ValueError(f"quasidensity matrix is not Hermitian (residual {res:.3e})")
        tr = self.matrix.trace()
        if abs(tr - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"quasidensity trace is {tr.real!r}, expected 1")

    @property
    def grid(self) -> GridSpec:
        return self.matrix.grid

    @property
    def largest_singular_value(self) -> float:
        return float(np.linalg.norm(self.matrix.entries, 2))


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray = field(repr=False)
    trace: float
    purity: float
    min_eigenvalue: float
    negativity_mass: float
    largest_singular_value: float
    antihermitian_residual: float

    @property
    def is_negative(self) -> bool:
        return self.min_eigenvalue < -NEGATIVITY_THRESHOLD

    def to_dict(self) -> dict:
        return {
            "trace": self.trace,
            "purity": self.purity,
            "min_eigenvalue": self.min_eigenvalue,
            "negativity_mass": self.negativity_mass,
            "largest_singular_value": self.largest_singular_value,
            "antihermitian_residual": self.antihermitian_residual,
            "eigenvalues": [float(v) for v in self.eigenvalues],
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _hermitize(op: OperatorMatrix, tol: float, what: str) -> tuple[OperatorMatrix, float]:
    residual = op.hermiticity_residual()
    if residual > tol:
        raise ValueError(
            f"{what} is not Hermitian to {tol:g} (residual {residual:.3e}); "
            "the domain is probably too short for the kernel's off-diagonal extent"
        )
    return op.hermitian_part(), residual


def groenewold_from_density(
    rho_c: PhaseField, provenance: str = "sampled density", hermitian_tol: float = HERMITIAN_TOL
) -> QuasidensityOperator:
    """2 pi hbar W^-1(rho_c) as a quasidensity operator.

    Raises:
        ValueError: if ``rho_c`` is not a real density normalized to within
            1e-6, or if the result is not Hermitian to ``hermitian_tol``.
    """
    if rho_c.role != "density":
        raise ValueError(f"expected a field tagged 'density', got {rho_c.role!r}")
    rho_c.check_density(tol=NORMALIZATION_TOL)
    raw = inverse_weyl(rho_c.with_values(rho_c.values.real), "quasidensity") * (2 * np.pi * rho_c.grid.hbar)
    mat, residual = _hermitize(raw, hermitian_tol, "Groenewold operator")
    return QuasidensityOperator(mat, provenance, residual)


def gaussian_density(grid: GridSpec, alpha: float, beta: float, q0: float = 0.0, p0: float = 0.0) -> PhaseField:
    """Samples of (sqrt(alpha beta)/pi) exp(-alpha (q-q0)^2 - beta (p-p0)^2)."""
    _check_widths(alpha, beta)
    q, p = grid.mesh()
    values = np.sqrt(alpha * beta) / np.pi * np.exp(-alpha * (q - q0) ** 2 - beta * (p - p0) ** 2)
    return PhaseField(grid, values, "density")


def _check_widths(alpha, beta):
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not (np.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be positive, got {v!r}")


def grid_for_gaussian(
    alpha: float, beta: float, hbar: float, n: int = 128, q0: float = 0.0, p0: float = 0.0, tails: float = 5.0
) -> GridSpec:
    """Symmetric grid [-X, X) holding the Gaussian density and its Groenewold kernel.

    X is the smallest half-width putting the density ``tails`` e-folds-squared
    (exp(-tails^2)) below its peak at the boundary, both along q and along the
    kernel's separation axis. The momentum half-range pi hbar n / (2 X) must
    then hold the density in p as well.

    Raises:
        ValueError: if no half-width satisfies all three at this ``n``.
    """
    _check_widths(alpha, beta)
    half = max(abs(q0) + tails / np.sqrt(alpha), 2 * tails * hbar * np.sqrt(beta))
    p_half = np.pi * hbar * n / (2 * half)
    if p_half < abs(p0) + tails / np.sqrt(beta):
        raise ValueError(f"n={n} cannot hold the state in both q and p; increase n")
    return GridSpec(n, -half, half, hbar)


def gaussian_quasidensity(
    alpha: float, beta: float, grid: GridSpec, q0: float = 0.0, p0: float = 0.0
) -> QuasidensityOperator:
    """Closed-form Groenewold kernel of the Gaussian density, sampled on the grid.

    K(x, y) = sqrt(alpha/pi) exp(-alpha (c - q0)^2) exp(-(x - y)^2 / (4 beta hbar^2)) exp(i p0 (x - y)/hbar)
    with c = (x + y)/2.

    Raises:
        ValueError: if either Gaussian width (1/sqrt(2 alpha) along the
            diagonal, hbar sqrt(2 beta) across it) spans fewer than
            ``MIN_SAMPLES_PER_SD`` grid cells, or the state is not contained
            in the domain (trace off by more than 1e-6).
    """
    _check_widths(alpha, beta)
    hbar = grid.hbar
    widths = {"center": 1 / np.sqrt(2 * alpha), "separation": hbar * np.sqrt(2 * beta)}
    for name, sd in widths.items():
        if sd / grid.dx < MIN_SAMPLES_PER_SD:
            raise ValueError(
                f"{name} width {sd:.4g} is resolved by only {sd / grid.dx:.2f} samples "
                f"(need {MIN_SAMPLES_PER_SD}); refine the grid"
            )

    def kernel(x, y):
        c, s = (x + y) / 2, x - y
        return (
            np.sqrt(alpha / np.pi)
            * np.exp(-alpha * (c - q0) ** 2 - s**2 / (4 * beta * hbar**2))
            * np.exp(1j * p0 * s / hbar)
        )

    mat = OperatorMatrix.from_kernel(grid, kernel, "quasidensity")
    if abs(mat.trace() - 1) > NORMALIZATION_TOL:
        raise ValueError("Gaussian state is not contained in the grid domain")
    # the sampled kernel is Hermitian up to rounding in the phase factor
    mat = mat.hermitian_part()
    return QuasidensityOperator(mat, f"gaussian alpha={alpha!r} beta={beta!r} q0={q0!r} p0={p0!r}")


def mix_quasidensities(weights, states) -> QuasidensityOperator:
    """Convex combination sum_k w_k rho_k (weights nonnegative, summing to 1)."""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(states) or not len(states):
        raise ValueError("need one weight per state")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    grid = states[0].grid
    total = np.zeros((grid.n, grid.n), dtype=complex)
    for w, st in zip(weights, states):
        if st.grid != grid:
            raise ValueError("mixture components live on different grids")
        total += w * st.matrix.entries
    note = " + ".join(f"{w:g}*[{st.provenance}]" for w, st in zip(weights, states))
    return QuasidensityOperator(OperatorMatrix(grid, total, "quasidensity").hermitian_part(), note)


def spectrum_diagnostics(rho, tol: float = 1e-8) -> SpectrumReport:
    """Eigen-decomposition of the Hermitian part of ``rho``.

    Accepts a QuasidensityOperator or an OperatorMatrix.

    Raises:
        ValueError: if the relative anti-Hermitian part exceeds ``tol``.
    """
    mat = rho.matrix if isinstance(rho, QuasidensityOperator) else rho
    residual = mat.hermiticity_residual()
    if residual > tol:
        raise ValueError(f"matrix is not Hermitian (residual {residual:.3e})")
    herm = 0.5 * (mat.entries + mat.entries.conj().T)
    eig = np.linalg.eigvalsh(herm)[::-1]
    negative = eig[eig < 0]
    return SpectrumReport(
        eigenvalues=eig,
        trace=float(np.trace(herm).real),
        purity=float(np.sum(np.abs(herm) ** 2)),
        min_eigenvalue=float(eig[-1]),
        negativity_mass=float(-negative.sum()) if negative.size else 0.0,
        largest_singular_value=float(np.abs(eig).max()),
        antihermitian_residual=residual,
    )


def point_density(grid: GridSpec, q_index: int | None = None, p_index: int | None = None) -> PhaseField:
    """delta(q - q_i) delta(p - p_k) as 1/(dx dp) at one node (defaults to the node nearest the origin)."""
    n = grid.n
    i = int(np.argmin(np.abs(grid.x))) if q_index is None else q_index
    k = n // 2 if p_index is None else p_index
    values = np.zeros((n, n))
    values[i, k] = 1.0 / (grid.dx * grid.dp)
    return PhaseField(grid, values, "density")


def point_density_diagnostic(grid: GridSpec) -> dict:
    """Where the discrete Groenewold map sends a point density at the origin.

    The continuum image is the kernel 2 delta(x + y). On the grid, the pairs
    with x + y = 0 exactly carry 1/dx, and the odd-separation neighbours carry
    the band-limited half-cell spread of the same delta, so every column
    integrates to about 2. The result is distributional: it is not Hermitian
    in the wrapped Nyquist separation and must not be propagated.
    """
    rho = point_density(grid)
    raw = inverse_weyl(rho, "quasidensity") * (2 * np.pi * grid.hbar)
    kern = raw.kernel
    x = grid.x
    on_anti = np.isclose(x[:, None] + x[None, :], 0.0, atol=grid.dx * 1e-6) & (
        np.abs(x[:, None] - x[None, :]) < grid.length / 2
    )
    centre = int(np.argmin(np.abs(x)))
    return {
        "trace": float(raw.trace().real),
        "antidiagonal_kernel": kern[on_anti].real,
        "column_weight": complex(kern[:, centre].sum() * grid.dx).real,
        "inverse_dx": 1.0 / grid.dx,
        "hermiticity_residual": raw.hermiticity_residual(),
    }
