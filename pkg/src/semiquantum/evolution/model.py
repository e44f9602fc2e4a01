"""Value types for time propagation: potentials, run settings, and records."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..io import dumps, write_csv

__all__ = ["PotentialSpec", "EvolutionConfig", "TrajectoryRecord", "ErrorReport", "MONITOR_NAMES"]

_MAX_DEGREE = {"harmonic": 2, "quartic": 4, "polynomial": 6}
_DEFAULT_COEFFS = {"harmonic": (0.0, 0.0, 0.5), "quartic": (0.0, 0.0, 0.0, 0.0, 0.1)}

MONITOR_NAMES = ("trace", "hermiticity_residual", "q", "p", "q2", "p2", "energy", "purity", "min_eigenvalue")


@dataclass(frozen=True)
class PotentialSpec:
    """H(q, p) = p^2/(2 mass) + sum_k coefficients[k] q^k.

    ``kind`` caps the degree: harmonic 2, quartic 4, polynomial 6.
    """

    kind: str = "harmonic"
    coefficients: tuple = ()
    mass: float = 1.0

    def __post_init__(self):
        if self.kind not in _MAX_DEGREE:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        coeffs = tuple(float(c) for c in self.coefficients) or _DEFAULT_COEFFS.get(self.kind, (0.0,))
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("potential coefficients must be finite")
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if len(coeffs) - 1 > _MAX_DEGREE[self.kind]:
            raise ValueError(f"{self.kind} potential has degree {len(coeffs) - 1} > {_MAX_DEGREE[self.kind]}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"mass must be positive, got {self.mass!r}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def derivative_coefficients(self, order: int) -> tuple:
        """Coefficients of V^(order), by exact integer falling factorials."""
        out = []
        for k in range(order, len(self.coefficients)):
            out.append(self.coefficients[k] * math.perm(k, order))
        return tuple(out) or (0.0,)

    def V(self, q, order: int = 0):
        """V^(order)(q) by Horner evaluation."""
        coeffs = self.derivative_coefficients(order)
        q = np.asarray(q, dtype=float)
        acc = np.full_like(q, coeffs[-1])
        for c in reversed(coeffs[:-1]):
            acc = acc * q + c
        return acc

    def hamiltonian(self, q, p):
        return np.asarray(p) ** 2 / (2 * self.mass) + self.V(q)

    @property
    def is_quadratic(self) -> bool:
        return self.degree <= 2

    def period(self) -> float:
        """Classical period 2 pi sqrt(m / V'') of a quadratic potential."""
        if not self.is_quadratic or self.degree < 2 or self.coefficients[2] <= 0:
            raise ValueError("period is defined only for a confining quadratic potential")
        return 2 * math.pi * math.sqrt(self.mass / (2 * self.coefficients[2]))

    def as_dict(self) -> dict:
        return {"kind": self.kind, "coefficients": list(self.coefficients), "mass": self.mass}


@dataclass(frozen=True)
class EvolutionConfig:
    """Fixed-step run settings. ``t_final`` must be a whole number of steps."""

    dt: float = 1e-3
    t_final: float = 1.0
    truncation_order: int = 2
    snapshot_stride: int = 100

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (math.isfinite(self.t_final) and self.t_final >= 0):
            raise ValueError(f"t_final must be nonnegative, got {self.t_final!r}")
        if self.truncation_order not in (0, 1, 2):
            raise ValueError(f"truncation_order must be 0, 1 or 2, got {self.truncation_order!r}")
        if not (isinstance(self.snapshot_stride, (int, np.integer)) and self.snapshot_stride >= 1):
            raise ValueError(f"snapshot_stride must be a positive integer, got {self.snapshot_stride!r}")
        steps = self.t_final / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f"t_final={self.t_final!r} is not a whole number of steps dt={self.dt!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def time(self, step: int) -> float:
        return step * self.dt

    def as_dict(self) -> dict:
        return {
            "dt": self.dt,
            "t_final": self.t_final,
            "truncation_order": self.truncation_order,
            "snapshot_stride": self.snapshot_stride,
        }


@dataclass
class TrajectoryRecord:
    """Per-step monitors and the states kept at snapshot strides.

    ``min_eigenvalue`` is NaN between strides. ``snapshots`` maps step index
    to the OperatorMatrix at that step.
    """

    times: list = field(default_factory=list)
    monitors: dict = field(default_factory=lambda: {name: [] for name in MONITOR_NAMES})
    snapshots: dict = field(default_factory=dict)
    aborted: bool = False
    diagnostic: str = ""

    def append(self, t: float, values: dict) -> None:
        self.times.append(float(t))
        for name in MONITOR_NAMES:
            self.monitors[name].append(float(values.get(name, math.nan)))

    def __len__(self) -> int:
        return len(self.times)

    def array(self, name: str) -> np.ndarray:
        return np.asarray(self.monitors[name])

    @property
    def final_state(self):
        return self.snapshots[max(self.snapshots)] if self.snapshots else None

    def to_csv(self, path) -> Path:
        rows = ([t] + [self.monitors[name][i] for name in MONITOR_NAMES] for i, t in enumerate(self.times))
        return write_csv(path, ("time",) + MONITOR_NAMES, rows)


@dataclass
class ErrorReport:
    """Per-snapshot differences between the Hilbert-space and phase-space runs."""

    times: list = field(default_factory=list)
    field_distance: list = field(default_factory=list)
    dq: list = field(default_factory=list)
    dp: list = field(default_factory=list)
    dq2: list = field(default_factory=list)
    dH: list = field(default_factory=list)

    KEYS = ("times", "field_distance", "dq", "dp", "dq2", "dH")

    def to_dict(self) -> dict:
        return {k: [float(v) for v in getattr(self, k)] for k in self.KEYS}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @property
    def final(self) -> dict:
        return {k: getattr(self, k)[-1] for k in self.KEYS}
