import csv
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from semiquantum.evolution import (
    BlowUpError,
    ErrorReport,
    EvolutionConfig,
    MONITOR_NAMES,
    PotentialSpec,
    compare_evolutions,
    correction_terms,
    integrate,
    liouville_reference,
    momentum_derivative,
    semiquantum_rhs,
    spectral_radius_bound,
)
from semiquantum.evolution import semiquantum as sq
from semiquantum.numeric import GridSpec, OperatorMatrix, momentum_matrix, position_matrix, weyl_transform
from semiquantum.quasidensity import (
    gaussian_density,
    gaussian_quasidensity,
    groenewold_from_density,
    point_density,
)
from semiquantum.symbolic import (
    odot_bracket_series_term,
    parse_phase,
    subscript_derivative,
    weyl_quantize,
)
from semiquantum.symbolic.series import theta_over_sin_coefficient

GRID = GridSpec()
WIDE10 = GridSpec(n=128, x_min=-10, x_max=10)
HARMONIC = PotentialSpec("harmonic", (0, 0, 0.5))
QUARTIC = PotentialSpec("quartic", (0, 0, 0, 0, 0.1))
SEXTIC = PotentialSpec("polynomial", (0, 0, 0.5, 0, 0.05, 0, 0.002))


def random_hermitian(grid, seed, width=1.0):
    """A smooth, localized Hermitian matrix (not normalized)."""
    rng = np.random.default_rng(seed)
    x = grid.x
    vecs = [np.exp(-((x - rng.normal()) ** 2) / (2 * width**2)) * np.exp(1j * rng.normal() * x) for _ in range(3)]
    a = sum(rng.uniform(0.2, 1) * np.outer(v, v.conj()) for v in vecs) * grid.dx
    return OperatorMatrix(grid, a, "quasidensity")


# -- value types ----------------------------------------------------------------

def test_potential_defaults_and_derivatives():
    assert PotentialSpec("harmonic").coefficients == (0.0, 0.0, 0.5)
    assert QUARTIC.degree == 4
    assert QUARTIC.derivative_coefficients(2) == (0.0, 0.0, 0.1 * 12)
    assert QUARTIC.derivative_coefficients(4) == (0.1 * 24,)
    assert QUARTIC.derivative_coefficients(5) == (0.0,)
    q = np.linspace(-2, 2, 7)
    assert np.allclose(SEXTIC.V(q), np.polyval([0.002, 0, 0.05, 0, 0.5, 0, 0], q))
    assert np.allclose(SEXTIC.V(q, 1), np.polyval([0.012, 0, 0.2, 0, 1.0, 0], q))
    assert HARMONIC.period() == pytest.approx(2 * np.pi)
    assert PotentialSpec("harmonic", (0, 0, 2.0), mass=4.0).period() == pytest.approx(2 * np.pi)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "cubic"},
        {"kind": "harmonic", "coefficients": (0, 0, 0, 1)},
        {"kind": "quartic", "coefficients": (0, 0, 0, 0, 0, 1)},
        {"kind": "polynomial", "coefficients": (0,) * 7 + (1,)},
        {"kind": "harmonic", "mass": 0.0},
        {"kind": "harmonic", "coefficients": (0, float("nan"))},
    ],
)
def test_potential_validation(kwargs):
    with pytest.raises(ValueError):
        PotentialSpec(**kwargs)


def test_trailing_zero_coefficients_trimmed():
    assert PotentialSpec("harmonic", (0, 0, 0.5, 0, 0, 0)).degree == 2


@pytest.mark.parametrize(
    "kwargs",
    [{"dt": -0.1}, {"dt": 0.0}, {"t_final": -1}, {"truncation_order": 3}, {"snapshot_stride": 0}, {"dt": 0.3, "t_final": 1.0}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        EvolutionConfig(**kwargs)


def test_config_steps():
    assert EvolutionConfig(dt=1e-3, t_final=1.0).n_steps == 1000
    assert EvolutionConfig(dt=2 * np.pi / 700, t_final=2 * np.pi).n_steps == 700
    assert EvolutionConfig(t_final=0.0).n_steps == 0


# -- Liouville reference ------------------------------------------------------------

def test_liouville_zero_time_is_identity():
    rho0 = gaussian_density(GRID, 1, 1, q0=1.0)
    out = liouville_reference(rho0, QUARTIC, EvolutionConfig(dt=0.01, t_final=0.0))
    assert len(out) == 1 and out[0][1] is rho0


def test_liouville_free_particle_shear():
    g = GridSpec(n=128, x_min=-12, x_max=12)
    free = PotentialSpec("polynomial", (0.0,), mass=2.0)
    rho0 = gaussian_density(g, 1.0, 2.0, q0=-1.0, p0=0.5)
    cfg = EvolutionConfig(dt=0.05, t_final=1.0, snapshot_stride=20)
    t, field = liouville_reference(rho0, free, cfg)[-1]
    q, p = g.mesh()
    exact = np.sqrt(2.0) / np.pi * np.exp(-((q - p * t / 2.0 + 1.0) ** 2) - 2.0 * (p - 0.5) ** 2)
    assert t == pytest.approx(1.0)
    assert np.abs(field.values - exact).max() < 1e-10


def test_liouville_harmonic_rotation():
    rho0 = gaussian_density(GRID, 1.0, 0.5, q0=1.5)
    cfg = EvolutionConfig(dt=1e-3, t_final=1.0, snapshot_stride=500)
    out = liouville_reference(rho0, HARMONIC, cfg)
    q, p = GRID.mesh()
    for t, field in out:
        q_back = q * np.cos(t) - p * np.sin(t)
        p_back = p * np.cos(t) + q * np.sin(t)
        exact = np.sqrt(0.5) / np.pi * np.exp(-((q_back - 1.5) ** 2) - 0.5 * p_back**2)
        # Strang splitting is second order in dt
        assert np.abs(field.values - exact).max() < 1e-6


def test_liouville_conserves_mass():
    rho0 = gaussian_density(GRID, 1.0, 1.0, q0=1.0)
    cfg = EvolutionConfig(dt=1e-2, t_final=0.5, snapshot_stride=1)
    masses = [f.integral().real for _, f in liouville_reference(rho0, QUARTIC, cfg)]
    assert np.abs(np.diff(masses)).max() <= 1e-9


def test_liouville_rejects_large_substeps_and_non_density():
    rho0 = gaussian_density(GRID, 1.0, 1.0)
    with pytest.raises(ValueError, match="half the domain"):
        liouville_reference(rho0, QUARTIC, EvolutionConfig(dt=1.0, t_final=1.0))
    with pytest.raises(ValueError):
        liouville_reference(rho0.with_values(rho0.values, "symbol"), QUARTIC, EvolutionConfig())


# -- momentum derivative ---------------------------------------------------------------

def test_momentum_derivative_of_p_squared_is_twice_identity():
    x = GRID.x
    r = momentum_derivative(momentum_matrix(GRID, 2), 2).entries
    interior = np.abs(x) < 6
    for psi in (np.exp(-(x**2)), np.exp(-((x - 1) ** 2) / 2) * np.cos(2 * x)):
        assert np.abs(r @ psi - 2 * psi)[interior].max() < 1e-8


def test_momentum_derivative_kills_functions_of_q():
    f = OperatorMatrix(GRID, np.diag(np.cos(GRID.x) + GRID.x**3))
    assert not np.any(momentum_derivative(f, 1).entries)


@pytest.mark.parametrize("order", [1, 2, 4])
def test_momentum_derivative_is_symbol_p_derivative(order):
    rho = gaussian_quasidensity(1.0, 0.5, GRID, q0=0.5, p0=0.3).matrix
    lhs = weyl_transform(momentum_derivative(rho, order)).values
    w = weyl_transform(rho).values
    kappa = 2 * np.pi * np.fft.fftfreq(GRID.n, d=GRID.dp)
    rhs = np.fft.ifft((1j * kappa) ** order * np.fft.fft(w, axis=1), axis=1)
    assert np.abs(lhs - rhs).max() <= 1e-6 * np.abs(rhs).max()


def test_momentum_derivative_rejects_order():
    with pytest.raises(ValueError):
        momentum_derivative(position_matrix(GRID), 3)


# -- right-hand side ---------------------------------------------------------------------

def test_correction_coefficients_follow_series():
    for k, (num, den, power) in enumerate(sq.CORRECTION_COEFFICIENTS, start=1):
        assert Fraction(num, den) == theta_over_sin_coefficient(k) / 4**k
        assert power == 2 * k - 1


@pytest.mark.parametrize("potential", ["1/2*p^2 + 3*q^4", "p^2 + q^6 - q^5 + 2*q^4"])
def test_symbolic_series_terms_reduce_to_potential_form(potential):
    """For H = p^2/2m + V(q) the k-th series term is c_k (hbar/2)^(2k) [V^(2k)(q), rho_(p^2k)]."""
    h_symbol = parse_phase(potential)
    h = weyl_quantize(h_symbol)
    rho = weyl_quantize(parse_phase("q^3*p^2 - 2*q*p^4 + p^5 + q^2"))
    for k in (1, 2):
        v_deriv = weyl_quantize(h_symbol.derivative("q", 2 * k))
        rho_p = rho
        for _ in range(2 * k):
            rho_p = subscript_derivative(rho_p, "p")
        coeff = theta_over_sin_coefficient(k) / 4**k
        expected = (v_deriv * rho_p - rho_p * v_deriv).scale(coeff).times_hbar(2 * k)
        assert odot_bracket_series_term(h, rho, k) == expected


@pytest.mark.parametrize("seed", range(2))
def test_quadratic_potential_corrections_vanish(seed):
    rho = random_hermitian(GRID, seed)
    terms = correction_terms(rho, HARMONIC)
    assert all(not np.any(t) for t in terms)
    base = semiquantum_rhs(rho, HARMONIC, 0).entries
    for order in (1, 2):
        assert np.array_equal(semiquantum_rhs(rho, HARMONIC, order).entries, base)


def test_quartic_first_correction_explicit():
    lam = 0.1
    rho = random_hermitian(GRID, 3)
    hbar = GRID.hbar
    first, second = correction_terms(rho, QUARTIC)
    v2 = OperatorMatrix(GRID, np.diag(12 * lam * GRID.x**2))
    rho_pp = momentum_derivative(rho, 2)
    expected = -1j * hbar / 24 * (v2.entries @ rho_pp.entries - rho_pp.entries @ v2.entries)
    assert np.abs(first - expected).max() <= 1e-12 * np.abs(expected).max()
    assert not np.any(second)


def test_sextic_second_correction_present():
    rho = random_hermitian(GRID, 4)
    first, second = correction_terms(rho, SEXTIC)
    assert np.abs(second).max() > 0
    full = semiquantum_rhs(rho, SEXTIC, 2).entries
    base = semiquantum_rhs(rho, SEXTIC, 0).entries
    assert np.abs(full - base - first - second).max() <= 1e-12 * np.abs(full).max()


@pytest.mark.parametrize("pot", [HARMONIC, QUARTIC, SEXTIC])
@pytest.mark.parametrize("order", [0, 1, 2])
def test_rhs_traceless_and_hermitian(pot, order):
    rho = random_hermitian(GRID, 5)
    rhs = semiquantum_rhs(rho, pot, order, hbar=GRID.hbar)
    scale = np.abs(rhs.entries).max()
    assert abs(rhs.trace()) <= 1e-12 * scale * GRID.n
    assert rhs.hermiticity_residual() <= 1e-12


def test_rhs_matches_fast_generator():
    rho = random_hermitian(GRID, 6)
    gen = sq._Generator(GRID, SEXTIC, 2)
    assert np.abs(gen(rho.entries) - semiquantum_rhs(rho, SEXTIC, 2).entries).max() <= 1e-10 * np.abs(gen(rho.entries)).max()


def test_rhs_errors():
    rho = random_hermitian(GRID, 7)
    with pytest.raises(ValueError):
        semiquantum_rhs(rho, QUARTIC, 3)
    with pytest.raises(ValueError):
        semiquantum_rhs(rho, QUARTIC, 1, hbar=0.5)


# -- integrator ------------------------------------------------------------------------------

def test_zero_time_record_has_initial_monitors_only():
    rho0 = gaussian_quasidensity(1.0, 1.0, GRID, q0=1.0)
    rec = integrate(rho0, QUARTIC, EvolutionConfig(dt=1e-3, t_final=0.0))
    assert rec.times == [0.0]
    assert rec.monitors["trace"][0] == pytest.approx(1.0)
    assert rec.monitors["q"][0] == pytest.approx(1.0, abs=1e-10)
    assert rec.monitors["purity"][0] == pytest.approx(1.0, abs=1e-10)


def test_harmonic_period_return():
    rho0 = gaussian_quasidensity(1.0, 1.0, WIDE10, q0=1.5, p0=-0.5)
    T = HARMONIC.period()
    cfg = EvolutionConfig(dt=T / 800, t_final=T, truncation_order=2, snapshot_stride=200)
    rec = integrate(rho0, HARMONIC, cfg)
    assert np.abs(rec.final_state.entries - rho0.matrix.entries).max() < 1e-6
    assert np.abs(rec.array("trace") - 1).max() <= 1e-8
    assert rec.array("hermiticity_residual").max() <= 1e-9
    assert np.ptp(rec.array("energy")) <= 1e-6
    # a quarter period maps (q, p) to (p, -q)
    quarter = rec.monitors["q"][200], rec.monitors["p"][200]
    assert quarter == pytest.approx((-0.5, -1.5), abs=1e-6)


def test_monitor_shapes_and_spectrum_strides():
    rho0 = gaussian_quasidensity(1.0, 1.0, GRID, q0=1.0)
    rec = integrate(rho0, QUARTIC, EvolutionConfig(dt=2e-3, t_final=0.04, snapshot_stride=5))
    assert all(len(rec.monitors[name]) == len(rec.times) == 21 for name in MONITOR_NAMES)
    eig = rec.array("min_eigenvalue")
    assert np.all(np.isfinite(eig[::5])) and np.all(np.isnan(np.delete(eig, np.arange(0, 21, 5))))
    assert sorted(rec.snapshots) == [0, 5, 10, 15, 20]
    # a pure state starts on the positivity boundary; the anharmonic classical flow
    # does not preserve operator positivity, so the spectrum dips below zero
    assert eig[0] == pytest.approx(0.0, abs=1e-10)
    assert eig[-1] < -1e-6


def test_stability_guard():
    rho0 = gaussian_quasidensity(1.0, 1.0, GRID)
    radius = spectral_radius_bound(GRID, QUARTIC, 2)
    with pytest.raises(ValueError, match="stability"):
        integrate(rho0, QUARTIC, EvolutionConfig(dt=3.0 / radius * 1.0000001, t_final=3.0 / radius * 1.0000001))


def test_blow_up_aborts_with_partial_record(monkeypatch):
    monkeypatch.setattr(sq, "STABILITY_LIMIT", math.inf)
    rho0 = gaussian_quasidensity(1.0, 1.0, GRID, q0=1.0)
    radius = spectral_radius_bound(GRID, QUARTIC, 2)
    dt = 8.0 / radius
    with pytest.raises(BlowUpError) as info:
        integrate(rho0, QUARTIC, EvolutionConfig(dt=dt, t_final=200 * dt))
    rec = info.value.record
    assert rec.aborted and "finite range" in rec.diagnostic
    assert 1 < len(rec) < 201


def test_integrate_rejects_point_and_boundary_states():
    with pytest.raises(ValueError):
        integrate(groenewold_from_density(point_density(GRID), "point", hermitian_tol=np.inf), HARMONIC, EvolutionConfig())
    with pytest.raises(ValueError, match="boundary"):
        integrate(gaussian_quasidensity(2.0, 1.0, GRID, q0=4.5), HARMONIC, EvolutionConfig())
    with pytest.raises(TypeError):
        integrate(gaussian_quasidensity(1.0, 1.0, GRID).matrix, HARMONIC, EvolutionConfig())


def test_record_csv(tmp_path):
    rho0 = gaussian_quasidensity(1.0, 1.0, GRID, q0=1.0)
    rec = integrate(rho0, HARMONIC, EvolutionConfig(dt=0.005, t_final=0.025, snapshot_stride=5))
    path = rec.to_csv(tmp_path / "traj.csv")
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["time", *MONITOR_NAMES]
    assert len(rows) == 7
    assert float(rows[1][1]) == rec.monitors["trace"][0]
    assert rows[2][-1] == "nan"


# -- comparison -----------------------------------------------------------------------------------

def test_compare_harmonic_one_period():
    # the Strang-split reference is second order in dt, so this needs a finer step
    # than the Hilbert-space side alone would
    rho0 = gaussian_density(GRID, 1.0, 1.0, q0=1.0)
    T = HARMONIC.period()
    rep = compare_evolutions(rho0, HARMONIC, EvolutionConfig(dt=T / 1400, t_final=T, snapshot_stride=350))
    assert len(rep.times) == 5
    assert max(rep.field_distance) <= 1e-5
    assert max(rep.dq2) <= 1e-5 and max(rep.dH) <= 1e-5


def test_compare_quartic_orders_short_time():
    rho0 = gaussian_density(GRID, 1.0, 0.5, q0=1.0)
    errs = {}
    for order in (0, 2):
        cfg = EvolutionConfig(dt=2e-3, t_final=0.4, truncation_order=order, snapshot_stride=100)
        errs[order] = compare_evolutions(rho0, QUARTIC, cfg)
    assert errs[0].field_distance[-1] > errs[2].field_distance[-1]
    assert errs[0].field_distance[-1] > errs[0].field_distance[1] > 0
    assert errs[2].field_distance[-1] < 1e-5


def test_error_report_json():
    rep = ErrorReport([0.0, 0.5], [0.0, 1e-7], [0, 0], [0, 0], [0, 1e-9], [0, 0])
    data = json.loads(rep.to_json())
    assert list(data) == ["times", "field_distance", "dq", "dp", "dq2", "dH"]
    assert data["field_distance"][1] == 1e-7
    assert rep.final["dq2"] == 1e-9


@pytest.mark.slow
def test_quartic_field_distance_drops_under_refinement():
    # doubling n at fixed dx halves dp = 2 pi hbar / L; at fixed L, dp would not
    # change and the late-time filaments in p stay under-resolved
    errs = {}
    for n, half in ((128, 8.0), (256, 16.0)):
        grid = GridSpec(n=n, x_min=-half, x_max=half)
        cfg = EvolutionConfig(dt=2e-4, t_final=1.0, truncation_order=2, snapshot_stride=5000)
        errs[n] = compare_evolutions(gaussian_density(grid, 1.0, 0.5, q0=1.0), QUARTIC, cfg).field_distance[-1]
    assert errs[128] >= 4 * errs[256]
