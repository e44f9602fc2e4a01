"""Side-by-side runs of the phase-space and Hilbert-space propagators."""
from __future__ import annotations

import numpy as np

from ..numeric.grid import PhaseField
from ..numeric.transform import phase_expectation, sample_symbol, wigner_of
from ..quasidensity import groenewold_from_density
from .liouville import liouville_reference
from .model import ErrorReport, EvolutionConfig, PotentialSpec
from .semiquantum import integrate

__all__ = ["compare_evolutions"]


def compare_evolutions(rho0: PhaseField, pot: PotentialSpec, cfg: EvolutionConfig, details: bool = False):
    """Propagate ``rho0`` both ways and difference them at every snapshot.

    field_distance is the absolute max-norm gap between the Wigner function of
    the propagated operator and the classical density; dq, dp, dq2 and dH
    are absolute gaps in the corresponding averages.

    Returns:
        ErrorReport, or (ErrorReport, TrajectoryRecord, classical snapshots)
        when ``details`` is true.
    """
    classical = liouville_reference(rho0, pot, cfg)
    record = integrate(groenewold_from_density(rho0, "compare initial density"), pot, cfg)
    grid = rho0.grid
    observables = {
        "q": sample_symbol(grid, lambda q, p: q),
        "p": sample_symbol(grid, lambda q, p: p),
        "q2": sample_symbol(grid, lambda q, p: q**2),
        "energy": sample_symbol(grid, pot.hamiltonian),
    }
    step_of = {round(t / cfg.dt): i for i, t in enumerate(record.times)}
    report = ErrorReport()
    for t, field in classical:
        step = round(t / cfg.dt)
        state = record.snapshots[step]
        wig = wigner_of(state).values
        i = step_of[step]
        report.times.append(t)
        report.field_distance.append(float(np.abs(wig - field.values).max()))
        for key, name in (("dq", "q"), ("dp", "p"), ("dq2", "q2"), ("dH", "energy")):
            classical_mean = phase_expectation(observables[name], field)
            getattr(report, key).append(abs(record.monitors[name][i] - classical_mean))
    if details:
        return report, record, classical
    return report
