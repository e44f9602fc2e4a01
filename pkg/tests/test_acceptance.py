"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are printed
even when output capture is on.
"""
import time
from contextlib import contextmanager

import numpy as np
import pytest

from semiquantum.evolution import (
    EvolutionConfig,
    PotentialSpec,
    compare_evolutions,
    correction_terms,
    integrate,
    semiquantum_rhs,
)
from semiquantum.numeric import (
    GridSpec,
    PhaseField,
    inverse_weyl,
    operator_from_symbol,
    phase_expectation,
    sample_symbol,
    trace_expectation,
    weyl_transform,
)
from semiquantum.quasidensity import (
    gaussian_density,
    gaussian_quasidensity,
    grid_for_gaussian,
    groenewold_from_density,
    spectrum_diagnostics,
)
from semiquantum.symbolic import odot_product, parse_operator, parse_phase, render, star_product
from semiquantum.symbolic.audit import worked_example_checks, run_symbolic_audit, star_discrepancy_record

HARMONIC = PotentialSpec("harmonic", (0, 0, 0.5))
QUARTIC = PotentialSpec("quartic", (0, 0, 0, 0, 0.1))
# one period of the harmonic oscillator on a domain wide enough that the coherent
# state's kernel never reaches the wrapped separations
HARMONIC_GRID = GridSpec(n=128, x_min=-10, x_max=10)


@contextmanager
def criterion(capsys, number, title):
    start = time.perf_counter()
    detail = ""
    try:
        yield
    except BaseException as exc:
        detail = str(exc).splitlines()[0][:160] if str(exc) else type(exc).__name__
        status = "FAIL"
        raise
    else:
        status = "PASS"
    finally:
        with capsys.disabled():
            suffix = f" -- {detail}" if detail else ""
            print(f"\n[acceptance {number:>2}] {status} {title} ({time.perf_counter() - start:.1f}s){suffix}")


def closed_form_kernel(grid, alpha, beta, q0=0.0, p0=0.0):
    """Matrix entries dx * rho(x, y) of the Gaussian, integrated over p by hand."""
    x, y = np.meshgrid(grid.x, grid.x, indexing="ij")
    c, s = (x + y) / 2, x - y
    kern = np.sqrt(alpha / np.pi) * np.exp(-alpha * (c - q0) ** 2 - s**2 / (4 * beta * grid.hbar**2))
    return kern * np.exp(1j * p0 * s / grid.hbar) * grid.dx


def harmonic_return_error(steps):
    rho0 = gaussian_quasidensity(1.0, 1.0, HARMONIC_GRID, q0=2.0, p0=0.5)
    T = HARMONIC.period()
    rec = integrate(rho0, HARMONIC, EvolutionConfig(dt=T / steps, t_final=T, truncation_order=2, snapshot_stride=steps))
    return float(np.abs(rec.final_state.entries - rho0.matrix.entries).max()), rec


def test_criterion_01_symbolic_exactness(capsys):
    with criterion(capsys, 1, "symbolic identities exact on 200 instances of degree <= 4 in < 30 s"):
        start = time.perf_counter()
        report = run_symbolic_audit(instances=200, max_degree=4, seed=0)
        elapsed = time.perf_counter() - start
        failed = [r.name for r in report.identities if not r.ok]
        assert not failed, f"identities failed: {failed}"
        assert all(r.total >= 200 for r in report.identities)
        assert report.worked_examples["monomial_product_law"]
        assert elapsed < 30, f"audit took {elapsed:.1f}s"


def test_criterion_02_worked_values(capsys):
    with criterion(capsys, 2, "worked product values and the q^2 star p^3 record"):
        checks = worked_example_checks()
        for name in ("q_star_p", "q_odot_p", "p_odot_q", "q2_odot_p3", "p3_odot_q2"):
            assert checks[name], name
        assert star_product(parse_phase("q"), parse_phase("p")) == parse_phase("q*p + i*hbar/2")
        assert odot_product(parse_operator("q^2"), parse_operator("p^3")) == parse_operator(
            "(q^2*p^3 + 2*q*p^3*q + p^3*q^2)/4"
        )
        record = star_discrepancy_record()
        assert record["printed_value"] and record["computed_value"]
        assert record["computed_value"] == render(star_product(parse_phase("q^2"), parse_phase("p^3")))
        assert record["printed_value"] != record["computed_value"]


def test_criterion_03_transform_fidelity(capsys):
    with criterion(capsys, 3, "Weyl-Wigner roundtrip <= 1e-8 on Gaussian-enveloped fields, n=128, < 1 s"):
        grid = GridSpec()
        q, p = grid.mesh()
        rng = np.random.default_rng(2024)
        for _ in range(4):
            a, b, q0, p0 = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(-2, 2), rng.uniform(-2, 2)
            poly = sum(rng.normal() * q**i * p**j for i in range(3) for j in range(3))
            field = PhaseField(grid, poly * np.exp(-a * (q - q0) ** 2 - b * (p - p0) ** 2), "symbol")
            start = time.perf_counter()
            back = weyl_transform(inverse_weyl(field))
            elapsed = time.perf_counter() - start
            assert np.abs(back.values - field.values).max() <= 1e-8
            assert elapsed < 1.0, f"roundtrip took {elapsed:.2f}s"


def test_criterion_04_groenewold_gaussian(capsys):
    with criterion(capsys, 4, "numerical Groenewold operator matches the closed-form kernel, (alpha, beta) in {0.5,1,2}^2"):
        grid = GridSpec(n=256, x_min=-16, x_max=16)
        worst = 0.0
        for alpha in (0.5, 1.0, 2.0):
            for beta in (0.5, 1.0, 2.0):
                numeric = groenewold_from_density(gaussian_density(grid, alpha, beta)).matrix.entries
                closed = closed_form_kernel(grid, alpha, beta)
                worst = max(worst, np.abs(numeric - closed).max() / np.abs(closed).max())
        assert worst <= 1e-6, f"relative max-norm error {worst:.2e}"


def test_criterion_05_coherent_factorization(capsys):
    with criterion(capsys, 5, "purity 1 at alpha beta hbar^2 = 1, negativity at 4"):
        for hbar in (0.5, 1.0):
            grid = GridSpec(hbar=hbar)
            pure = spectrum_diagnostics(gaussian_quasidensity(1.0, 1 / hbar**2, grid))
            assert abs(pure.purity - 1) <= 1e-7
            assert pure.min_eigenvalue >= -1e-7
            neg = spectrum_diagnostics(gaussian_quasidensity(1.0, 4 / hbar**2, grid))
            assert neg.min_eigenvalue < -1e-4


OBSERVABLES = ["1", "q", "p", "q^2", "p^2", "q*p", "q^2 + 3*p^2 - q*p + 2*q - 5"]


def test_criterion_06_expectation_equivalence(capsys):
    with criterion(capsys, 6, "trace expectation = phase-space integral, invariant under hbar in {0.5,1,2}"):
        alpha, beta, q0, p0 = 0.8, 1.2, 0.5, -0.3
        # moments of the Gaussian by hand
        exact = {
            "1": 1.0,
            "q": q0,
            "p": p0,
            "q^2": q0**2 + 1 / (2 * alpha),
            "p^2": p0**2 + 1 / (2 * beta),
            "q*p": q0 * p0,
        }
        exact["q^2 + 3*p^2 - q*p + 2*q - 5"] = exact["q^2"] + 3 * exact["p^2"] - exact["q*p"] + 2 * q0 - 5
        for obs in OBSERVABLES:
            poly = parse_phase(obs)
            values = []
            for hbar in (0.5, 1.0, 2.0):
                grid = grid_for_gaussian(alpha, beta, hbar, q0=q0, p0=p0)
                dens = gaussian_density(grid, alpha, beta, q0, p0)
                rho = groenewold_from_density(dens)
                quantum = trace_expectation(operator_from_symbol(grid, poly), rho.matrix)
                classical = phase_expectation(sample_symbol(grid, poly), dens)
                scale = max(abs(classical), 1.0)
                assert abs(quantum - classical) <= 1e-6 * scale, (obs, hbar, quantum, classical)
                assert abs(quantum - exact[obs]) <= 1e-6 * scale, (obs, hbar, quantum, exact[obs])
                values.append(quantum)
            assert np.ptp(values) <= 1e-6 * max(1.0, abs(values[0])), (obs, values)


def test_criterion_07_quadratic_dynamics(capsys):
    with criterion(capsys, 7, "harmonic coherent state returns after one period, trace drift <= 1e-8, zero corrections"):
        err, rec = harmonic_return_error(700)
        assert err <= 1e-6, f"period-return error {err:.2e}"
        assert np.abs(rec.array("trace") - 1).max() <= 1e-8
        assert rec.array("hermiticity_residual").max() <= 1e-9
        state = rec.final_state
        for term in correction_terms(state, HARMONIC):
            assert not np.any(term)
        base = semiquantum_rhs(state, HARMONIC, 0).entries
        for order in (1, 2):
            assert np.array_equal(semiquantum_rhs(state, HARMONIC, order).entries, base)


def test_criterion_08_terminating_series(capsys):
    with criterion(capsys, 8, "quartic truncation 2 vs Liouville within 1e-4 at t=1, n=128, dt=1e-3, < 5 min"):
        start = time.perf_counter()
        rho0 = gaussian_density(GridSpec(), 1.0, 0.5, q0=1.0)
        cfg = EvolutionConfig(dt=1e-3, t_final=1.0, truncation_order=2, snapshot_stride=250)
        report = compare_evolutions(rho0, QUARTIC, cfg)
        elapsed = time.perf_counter() - start
        assert report.times[-1] == pytest.approx(1.0)
        assert report.field_distance[-1] <= 1e-4, f"field distance {report.field_distance[-1]:.2e}"
        assert report.dq2[-1] <= 1e-4, f"<q^2> gap {report.dq2[-1]:.2e}"
        assert elapsed < 300, f"took {elapsed:.0f}s"


def test_criterion_09_deformation_ordering(capsys):
    with criterion(capsys, 9, "truncation-0 error exceeds truncation-2 and shrinks with hbar over {1, 0.5, 0.25}"):
        errors = {}
        for hbar in (1.0, 0.5, 0.25):
            rho0 = gaussian_density(GridSpec(hbar=hbar), 1.0, 0.5, q0=1.0)
            for order in (0, 2):
                cfg = EvolutionConfig(dt=5e-4, t_final=1.0, truncation_order=order, snapshot_stride=2000)
                errors[hbar, order] = compare_evolutions(rho0, QUARTIC, cfg).field_distance[-1]
        for hbar in (1.0, 0.5, 0.25):
            assert errors[hbar, 0] > errors[hbar, 2], (hbar, errors[hbar, 0], errors[hbar, 2])
        assert errors[1.0, 0] > errors[0.5, 0] > errors[0.25, 0], [errors[h, 0] for h in (1.0, 0.5, 0.25)]


def test_criterion_10_integrator_order(capsys):
    with criterion(capsys, 10, "halving dt cuts the harmonic period-return error by a factor in [12, 20]"):
        coarse, _ = harmonic_return_error(700)
        fine, _ = harmonic_return_error(1400)
        factor = coarse / fine
        assert 12 <= factor <= 20, f"factor {factor:.2f} ({coarse:.2e} -> {fine:.2e})"
