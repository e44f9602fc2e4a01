"""Hilbert-space propagation of a quasidensity operator under the truncated series.

For H = p^2/(2m) + V(q) the classical flow, written in operator form, is

    d rho/dt = (1/i hbar) [H, rho]
               - (i hbar / 24) [V''(q), rho_pp]
               - (7 i hbar^3 / 5760) [V''''(q), rho_pppp] - ...

where rho_p = (1/i hbar) [q, rho]. The k-th correction carries V^(2k), so a
potential of degree at most 2k+1 makes everything past order k vanish and
degree <= 6 is exact at order 2. On the grid every potential term is a
commutator with a diagonal matrix, so it acts entrywise.
"""
from __future__ import annotations

import math

import numpy as np

from ..numeric.grid import OperatorMatrix
from ..numeric.transform import momentum_matrix
from ..quasidensity import QuasidensityOperator, spectrum_diagnostics
from .model import EvolutionConfig, PotentialSpec, TrajectoryRecord

__all__ = [
    "CORRECTION_COEFFICIENTS",
    "BlowUpError",
    "momentum_derivative",
    "correction_terms",
    "semiquantum_rhs",
    "spectral_radius_bound",
    "STABILITY_LIMIT",
    "integrate",
]

#: -(i hbar / 24) and -(7 i hbar^3 / 5760) as (numerator, denominator, hbar power)
CORRECTION_COEFFICIENTS = ((1, 24, 1), (7, 5760, 3))
#: RK4's stability interval on the imaginary axis is |z| <= 2 sqrt(2); keep a margin.
STABILITY_LIMIT = 2.8
BLOWUP_LIMIT = 1e6
BOUNDARY_FRACTION = 0.1
BOUNDARY_MASS_TOL = 1e-8


class BlowUpError(RuntimeError):
    """A monitor left the finite range; ``record`` holds the run up to that point."""

    def __init__(self, message: str, record: TrajectoryRecord):
        super().__init__(message)
        self.record = record


def _separation(grid) -> np.ndarray:
    x = grid.x
    return x[:, None] - x[None, :]


def momentum_derivative(a: OperatorMatrix, order: int) -> OperatorMatrix:
    """Apply X -> (1/i hbar)[q, X] ``order`` times (order 1, 2 or 4).

    With q diagonal this multiplies entry (i, j) by ((x_i - x_j)/(i hbar))^order.
    """
    if order not in (1, 2, 4):
        raise ValueError(f"momentum_derivative supports orders 1, 2, 4; got {order!r}")
    factor = (_separation(a.grid) / (1j * a.grid.hbar)) ** order
    return a.with_entries(a.entries * factor, "operator")


def _diag_commutator(f_values: np.ndarray, entries: np.ndarray) -> np.ndarray:
    """[diag(f), A] entrywise: (f_i - f_j) A_ij."""
    return (f_values[:, None] - f_values[None, :]) * entries


def correction_terms(rho: OperatorMatrix, pot: PotentialSpec) -> list:
    """The first two corrections, each a commutator, as matrices.

    A term whose potential derivative is constant is returned as an exact
    zero matrix without any arithmetic on ``rho``.
    """
    grid, hbar = rho.grid, rho.grid.hbar
    out = []
    for k, (num, den, power) in enumerate(CORRECTION_COEFFICIENTS, start=1):
        if pot.degree <= 2 * k:
            out.append(np.zeros_like(rho.entries))
            continue
        deriv = pot.V(grid.x, order=2 * k)
        rho_p = momentum_derivative(rho, 2 * k).entries
        out.append(-1j * (num / den) * hbar**power * _diag_commutator(deriv, rho_p))
    return out


def _kinetic(grid, mass: float) -> np.ndarray:
    t = momentum_matrix(grid, 2).entries / (2 * mass)
    return 0.5 * (t + t.conj().T)


def semiquantum_rhs(rho: OperatorMatrix, pot: PotentialSpec, truncation_order: int, hbar: float | None = None) -> OperatorMatrix:
    """Leading commutator plus the first ``truncation_order`` corrections.

    Raises:
        ValueError: for truncation_order outside {0, 1, 2}, or an ``hbar``
            that disagrees with the grid.
    """
    if truncation_order not in (0, 1, 2):
        raise ValueError(f"truncation_order must be 0, 1 or 2, got {truncation_order!r}")
    grid = rho.grid
    if hbar is not None and not math.isclose(hbar, grid.hbar, rel_tol=1e-15):
        raise ValueError(f"hbar={hbar!r} differs from the grid's {grid.hbar!r}")
    t = _kinetic(grid, pot.mass)
    a = rho.entries
    total = ((t @ a - a @ t) + _diag_commutator(pot.V(grid.x), a)) / (1j * grid.hbar)
    for term in correction_terms(rho, pot)[:truncation_order]:
        total = total + term
    return OperatorMatrix(grid, total)


class _Generator:
    """The right-hand side with its entrywise part folded into one multiplier."""

    def __init__(self, grid, pot: PotentialSpec, truncation_order: int):
        hbar = grid.hbar
        self.t = _kinetic(grid, pot.mass) / (1j * hbar)
        mult = (pot.V(grid.x)[:, None] - pot.V(grid.x)[None, :]) / (1j * hbar)
        sep = _separation(grid) / (1j * hbar)
        self.correction_bound = 0.0
        for k, (num, den, power) in enumerate(CORRECTION_COEFFICIENTS[:truncation_order], start=1):
            if pot.degree <= 2 * k:
                continue
            d = pot.V(grid.x, order=2 * k)
            term = -1j * (num / den) * hbar**power * (d[:, None] - d[None, :]) * sep ** (2 * k)
            self.correction_bound += np.abs(term).max()
            mult = mult + term
        self.mult = mult
        kin = np.linalg.eigvalsh(_kinetic(grid, pot.mass))
        v = pot.V(grid.x)
        self.radius = (kin.max() - kin.min() + v.max() - v.min()) / hbar + self.correction_bound

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return (self.t @ a - a @ self.t) + self.mult * a


def spectral_radius_bound(grid, pot: PotentialSpec, truncation_order: int) -> float:
    """Upper bound on the RHS spectral radius.

    The RHS is skew-Hermitian in the Frobenius inner product, so its radius
    is at most the kinetic plus potential energy spans over hbar plus the
    largest correction multiplier.
    """
    return _Generator(grid, pot, truncation_order).radius


class _Monitors:
    def __init__(self, grid, pot: PotentialSpec):
        self.x = grid.x
        p = momentum_matrix(grid, 1).entries
        p2 = momentum_matrix(grid, 2).entries
        self.p, self.p2 = p, p2
        self.v = pot.V(grid.x)
        self.mass = pot.mass

    def __call__(self, a: np.ndarray, residual: float, with_spectrum: bool, grid) -> dict:
        diag = np.diagonal(a).real
        p2 = np.einsum("ij,ji->", self.p2, a).real
        out = {
            "trace": float(np.trace(a).real),
            "hermiticity_residual": residual,
            "q": float(diag @ self.x),
            "p": float(np.einsum("ij,ji->", self.p, a).real),
            "q2": float(diag @ self.x**2),
            "p2": float(p2),
            "energy": float(p2 / (2 * self.mass) + diag @ self.v),
            "purity": float(np.sum(np.abs(a) ** 2)),
        }
        if with_spectrum:
            out["min_eigenvalue"] = spectrum_diagnostics(OperatorMatrix(grid, a)).min_eigenvalue
        return out


def _check_support(rho: QuasidensityOperator) -> None:
    if rho.provenance.startswith("point"):
        raise ValueError("point densities are diagnostics only and cannot be propagated")
    n = rho.grid.n
    band = max(1, int(n * BOUNDARY_FRACTION))
    diag = np.abs(np.diagonal(rho.matrix.entries))
    edge = diag[:band].sum() + diag[-band:].sum()
    if edge > BOUNDARY_MASS_TOL:
        raise ValueError(f"initial state has weight {edge:.2e} in the outer boundary band; enlarge the domain")


def integrate(rho0: QuasidensityOperator, pot: PotentialSpec, cfg: EvolutionConfig) -> TrajectoryRecord:
    """Classic RK4 with fixed dt, re-Hermitizing after every step.

    Raises:
        ValueError: if the stability guard dt * radius < 2.8 fails, or the
            initial state reaches into the outer boundary band.
        BlowUpError: if any monitor becomes non-finite or exceeds 1e6.
    """
    if not isinstance(rho0, QuasidensityOperator):
        raise TypeError("integrate expects a QuasidensityOperator")
    _check_support(rho0)
    grid = rho0.grid
    gen = _Generator(grid, pot, cfg.truncation_order)
    if cfg.dt * gen.radius >= STABILITY_LIMIT:
        raise ValueError(
            f"stability guard: dt * radius = {cfg.dt * gen.radius:.3f} >= {STABILITY_LIMIT}; "
            f"use dt < {STABILITY_LIMIT / gen.radius:.3e}"
        )
    monitor = _Monitors(grid, pot)
    record = TrajectoryRecord()
    a = rho0.matrix.entries.copy()
    record.append(0.0, monitor(a, rho0.matrix.hermiticity_residual(), True, grid))
    record.snapshots[0] = OperatorMatrix(grid, a, "quasidensity")
    h = cfg.dt
    for step in range(1, cfg.n_steps + 1):
        k1 = gen(a)
        k2 = gen(a + (h / 2) * k1)
        k3 = gen(a + (h / 2) * k2)
        k4 = gen(a + h * k3)
        a = a + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        scale = np.abs(a).max()
        residual = float(np.abs(a - a.conj().T).max() / scale) if np.isfinite(scale) and scale > 0 else math.inf
        a = 0.5 * (a + a.conj().T)
        keep = step % cfg.snapshot_stride == 0 or step == cfg.n_steps
        values = monitor(a, residual, keep and np.all(np.isfinite(a)), grid)
        record.append(cfg.time(step), values)
        bad = [k for k, v in values.items() if not math.isfinite(v) or abs(v) > BLOWUP_LIMIT]
        if bad:
            record.aborted = True
            record.diagnostic = f"monitors {bad} left the finite range at t={cfg.time(step):.6g}"
            raise BlowUpError(record.diagnostic, record)
        if keep:
            record.snapshots[step] = OperatorMatrix(grid, a, "quasidensity")
    return record
