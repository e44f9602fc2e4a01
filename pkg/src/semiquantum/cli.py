"""Configuration-driven scenario runner.

Usage::

    semiquantum run --config scenario.json [--out DIR] [--seed N]
    semiquantum schema
    semiquantum version

Exit codes: 0 success, 2 unreadable or malformed configuration, 3 unknown key,
4 constraint violation, 5 runtime failure (partial outputs are removed).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .evolution import EvolutionConfig, PotentialSpec, compare_evolutions, integrate
from .io import dumps, write_csv, write_json
from .numeric import GridSpec, OperatorMatrix, PhaseField, inverse_weyl, weyl_transform, wigner_of, write_snapshot
from .quasidensity import (
    gaussian_density,
    gaussian_quasidensity,
    groenewold_from_density,
    spectrum_diagnostics,
)
from .symbolic.audit import run_symbolic_audit

__all__ = [
    "SCENARIOS",
    "CONFIG_SCHEMA",
    "ConfigError",
    "ConfigSyntaxError",
    "UnknownKeyError",
    "ConstraintError",
    "ScenarioConfig",
    "parse_config",
    "run_scenario",
    "main",
]

MANIFEST_VERSION = "semiquantum-manifest/1"
SCENARIOS = ("roundtrip", "gaussian-spectrum", "symbolic-audit", "evolve", "compare")

#: Fixed scenario parameters that are not part of the configuration document.
AUDIT_INSTANCES = 200
AUDIT_MAX_DEGREE = 4
SPECTRUM_PRODUCTS = tuple(float(c) for c in np.geomspace(0.25, 4.0, 9))
ROUNDTRIP_DRAWS = 4
HARMONIC_STEPS_PER_PERIOD = 1400

EXIT_OK, EXIT_SYNTAX, EXIT_UNKNOWN_KEY, EXIT_CONSTRAINT, EXIT_RUNTIME = 0, 2, 3, 4, 5

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_gaussian_props = {
    "alpha": {**_positive, "default": 1.0, "description": "position precision of the Gaussian"},
    "beta": {**_positive, "default": 1.0, "description": "momentum precision of the Gaussian"},
    "q0": {**_number, "default": 1.0, "description": "center in position"},
    "p0": {**_number, "default": 0.0, "description": "center in momentum"},
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "semiquantum scenario",
    "type": "object",
    "additionalProperties": False,
    "required": ["scenario"],
    "properties": {
        "scenario": {"enum": list(SCENARIOS)},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 8, "default": 128, "description": "points per axis, a power of two"},
                "x_min": {**_number, "default": -8.0},
                "x_max": {**_number, "default": 8.0},
                "hbar": {**_positive, "default": 1.0},
            },
        },
        "density": {
            "type": "object",
            "additionalProperties": False,
            "description": "a single Gaussian (alpha, beta, q0, p0) or a weighted mixture of Gaussians",
            "properties": {
                **_gaussian_props,
                "mixture": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["weight"],
                        "properties": {"weight": _positive, **_gaussian_props},
                    },
                },
            },
        },
        "potential": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["harmonic", "quartic", "polynomial"], "default": "harmonic"},
                "coefficients": {
                    "type": "array",
                    "items": _number,
                    "maxItems": 7,
                    "description": "c_k of V(q) = sum c_k q^k; empty selects the kind's default",
                    "default": [],
                },
                "mass": {**_positive, "default": 1.0},
            },
        },
        "evolution": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": {
                    "type": ["number", "null"],
                    "exclusiveMinimum": 0,
                    "default": None,
                    "description": "null: one period / 1400 for a quadratic potential, else 1e-3",
                },
                "t_final": {
                    "type": ["number", "null"],
                    "minimum": 0,
                    "default": None,
                    "description": "null: one period for a quadratic potential, else 1.0",
                },
                "truncation_order": {"enum": [0, 1, 2], "default": 2},
                "snapshot_stride": {
                    "type": ["integer", "null"],
                    "minimum": 1,
                    "default": None,
                    "description": "null: a quarter of the run",
                },
            },
        },
        "output_dir": {"type": "string", "minLength": 1, "default": "out"},
        "seed": {"type": "integer", "minimum": 0, "default": 0},
    },
}


class ConfigError(ValueError):
    """Base class of configuration failures; ``exit_code`` is the process status."""

    exit_code = EXIT_CONSTRAINT


class ConfigSyntaxError(ConfigError):
    exit_code = EXIT_SYNTAX


class UnknownKeyError(ConfigError):
    exit_code = EXIT_UNKNOWN_KEY


class ConstraintError(ConfigError):
    exit_code = EXIT_CONSTRAINT


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated configuration with every default filled in.

    ``density`` is a tuple of (weight, alpha, beta, q0, p0) components.
    """

    scenario: str
    grid: GridSpec
    density: tuple
    potential: PotentialSpec
    evolution: EvolutionConfig
    output_dir: Path
    seed: int

    def as_dict(self) -> dict:
        keys = ("weight", "alpha", "beta", "q0", "p0")
        return {
            "scenario": self.scenario,
            "grid": self.grid.as_dict(),
            "density": {"mixture": [dict(zip(keys, comp)) for comp in self.density]},
            "potential": self.potential.as_dict(),
            "evolution": self.evolution.as_dict(),
            "output_dir": str(self.output_dir),
            "seed": self.seed,
        }


def _defaults(schema: dict) -> dict:
    return {k: v["default"] for k, v in schema["properties"].items() if "default" in v}


def _where(path) -> str:
    return ".".join(str(p) for p in path) or "<root>"


def _schema_errors(doc) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.validator))
    unknown = [e for e in errors if e.validator == "additionalProperties"]
    if unknown:
        e = unknown[0]
        extra = sorted(set(e.instance) - set(e.schema.get("properties", {})))
        keys = ", ".join(_where([*e.absolute_path, k]) for k in extra)
        raise UnknownKeyError(f"unknown key {keys}")
    if errors:
        e = errors[0]
        raise ConstraintError(f"{_where(e.absolute_path)}: {e.message}")


def _resolve_evolution(section: dict, potential: PotentialSpec) -> EvolutionConfig:
    merged = {**_defaults(CONFIG_SCHEMA["properties"]["evolution"]), **section}
    dt, t_final = merged["dt"], merged["t_final"]
    if potential.is_quadratic and potential.degree == 2 and potential.coefficients[2] > 0:
        period = potential.period()
        dt = period / HARMONIC_STEPS_PER_PERIOD if dt is None else dt
        t_final = period if t_final is None else t_final
    dt = 1e-3 if dt is None else dt
    t_final = 1.0 if t_final is None else t_final
    stride = merged["snapshot_stride"]
    if stride is None:
        stride = max(1, int(round(t_final / dt)) // 4)
    return EvolutionConfig(float(dt), float(t_final), merged["truncation_order"], stride)


def _resolve_density(section: dict) -> tuple:
    gauss = _defaults(CONFIG_SCHEMA["properties"]["density"])
    if "mixture" in section:
        stray = sorted(set(section) - {"mixture"})
        if stray:
            raise ConstraintError(f"density: give either mixture or {', '.join(stray)}, not both")
        comps = [{**gauss, **item} for item in section["mixture"]]
        total = sum(c["weight"] for c in comps)
        if abs(total - 1.0) > 1e-12:
            raise ConstraintError(f"density.mixture: weights sum to {total!r}, not 1")
    else:
        comps = [{"weight": 1.0, **gauss, **section}]
    return tuple(tuple(float(c[k]) for k in ("weight", "alpha", "beta", "q0", "p0")) for c in comps)


def _reject_constant(name: str):
    raise json.JSONDecodeError(f"{name} is not a JSON number", name, 0)


def parse_config(text) -> ScenarioConfig:
    """Validate a JSON configuration document and apply every default.

    Raises:
        ConfigSyntaxError: the text is not a JSON object (exit code 2).
        UnknownKeyError: a key outside the schema (exit code 3).
        ConstraintError: any value outside its allowed range (exit code 4).
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigSyntaxError(f"configuration is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"configuration is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigSyntaxError("configuration must be a JSON object")
    _schema_errors(doc)
    section = "grid"
    try:
        grid = GridSpec(**{**_defaults(CONFIG_SCHEMA["properties"]["grid"]), **doc.get("grid", {})})
        section = "potential"
        pot = PotentialSpec(**{**_defaults(CONFIG_SCHEMA["properties"]["potential"]), **doc.get("potential", {})})
        section = "evolution"
        evo = _resolve_evolution(doc.get("evolution", {}), pot)
    except ValueError as exc:
        raise ConstraintError(f"{section}: {exc}") from None
    density = _resolve_density(doc.get("density", {}))
    top = _defaults(CONFIG_SCHEMA)
    return ScenarioConfig(
        scenario=doc["scenario"],
        grid=grid,
        density=density,
        potential=pot,
        evolution=evo,
        output_dir=Path(doc.get("output_dir", top["output_dir"])),
        seed=int(doc.get("seed", top["seed"])),
    )


# -- scenarios --------------------------------------------------------------------------------------


def _initial_density(cfg: ScenarioConfig) -> PhaseField:
    values = sum(w * gaussian_density(cfg.grid, a, b, q0, p0).values for w, a, b, q0, p0 in cfg.density)
    return PhaseField(cfg.grid, values, "density")


def _random_hermitian(grid: GridSpec, rng: np.random.Generator) -> OperatorMatrix:
    z = rng.standard_normal((grid.n, grid.n)) + 1j * rng.standard_normal((grid.n, grid.n))
    return OperatorMatrix(grid, (z + z.conj().T) / 2)


def _roundtrip(cfg: ScenarioConfig, out: Path) -> list:
    rng = np.random.default_rng(cfg.seed)
    cases = [(f"random_hermitian_{k}", _random_hermitian(cfg.grid, rng)) for k in range(ROUNDTRIP_DRAWS)]
    cases.append(("initial_state", groenewold_from_density(_initial_density(cfg), "configured density").matrix))
    rows = []
    for label, op in cases:
        back = inverse_weyl(weyl_transform(op))
        err = float(np.abs(back.entries - op.entries).max())
        rows.append({"case": label, "max_abs_error": err, "relative_error": err / float(np.abs(op.entries).max())})
    density = _initial_density(cfg)
    rho = groenewold_from_density(density, "configured density")
    field_err = float(np.abs(wigner_of(rho.matrix).values - density.values).max())
    return [write_json(out / "roundtrip.json", {"operators": rows, "density_field_max_error": field_err})]


def _gaussian_spectrum(cfg: ScenarioConfig, out: Path) -> list:
    hbar = cfg.grid.hbar
    rows, reports = [], []
    for c in SPECTRUM_PRODUCTS:
        alpha = beta = math.sqrt(c) / hbar
        report = spectrum_diagnostics(gaussian_quasidensity(alpha, beta, cfg.grid))
        reports.append({"alpha_beta_hbar2": c, "alpha": alpha, "beta": beta, **report.to_dict()})
        rows.append(
            [c, alpha, beta, report.trace, report.purity, report.min_eigenvalue, report.negativity_mass, report.largest_singular_value]
        )
    header = ("alpha_beta_hbar2", "alpha", "beta", "trace", "purity", "min_eigenvalue", "negativity_mass", "largest_singular_value")
    return [write_json(out / "spectrum.json", reports), write_csv(out / "spectrum.csv", header, rows)]


def _symbolic_audit(cfg: ScenarioConfig, out: Path) -> list:
    report = run_symbolic_audit(AUDIT_INSTANCES, AUDIT_MAX_DEGREE, cfg.seed)
    rows = [[r.name, r.passed, r.total, "pass" if r.ok else "FAIL"] for r in report.identities]
    rows += [[name, int(ok), 1, "pass" if ok else "FAIL"] for name, ok in report.worked_examples.items()]
    table = write_csv(out / "audit.csv", ("check", "passed", "total", "status"), rows)
    detail = {
        "ok": report.ok,
        "identities": {r.name: {"passed": r.passed, "total": r.total} for r in report.identities},
        "worked_examples": report.worked_examples,
        "q2_star_p3_discrepancy": report.star_discrepancy,
    }
    return [table, write_json(out / "audit.json", detail)]


def _evolve(cfg: ScenarioConfig, out: Path) -> list:
    rho0 = groenewold_from_density(_initial_density(cfg), "configured density")
    record = integrate(rho0, cfg.potential, cfg.evolution)
    files = [record.to_csv(out / "trajectory.csv")]
    snapdir = out / "snapshots"
    snapdir.mkdir()
    for step, state in sorted(record.snapshots.items()):
        files.append(write_snapshot(snapdir / f"state_{step:08d}.sqs", state))
    return files


def _compare(cfg: ScenarioConfig, out: Path) -> list:
    report = compare_evolutions(_initial_density(cfg), cfg.potential, cfg.evolution)
    summary = {"max": {k: max(getattr(report, k)) for k in report.KEYS[1:]}, **report.to_dict()}
    return [write_json(out / "error_report.json", summary)]


_RUNNERS = {
    "roundtrip": _roundtrip,
    "gaussian-spectrum": _gaussian_spectrum,
    "symbolic-audit": _symbolic_audit,
    "evolve": _evolve,
    "compare": _compare,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _remove(out: Path, created: bool) -> None:
    for path in sorted(out.rglob("*"), key=lambda p: len(p.parts), reverse=True):
        path.rmdir() if path.is_dir() else path.unlink()
    if created:
        out.rmdir()


def run_scenario(cfg: ScenarioConfig) -> Path:
    """Run one scenario into ``cfg.output_dir`` and write its manifest.

    The output directory must be absent or empty. On any failure everything
    written so far is removed and the exception propagates.

    Returns:
        path of manifest.json.
    """
    out = cfg.output_dir
    if out.exists() and (not out.is_dir() or any(out.iterdir())):
        raise FileExistsError(f"output directory {out} exists and is not empty")
    created = not out.exists()
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        files = _RUNNERS[cfg.scenario](cfg, out)
        manifest = {
            "manifest_version": MANIFEST_VERSION,
            "tool_version": __version__,
            "scenario": cfg.scenario,
            "config": cfg.as_dict(),
            "versions": {"python": platform.python_version(), "numpy": np.__version__, "semiquantum": __version__},
            "wall_time_seconds": time.perf_counter() - start,
            "files": [
                {"path": p.relative_to(out).as_posix(), "bytes": p.stat().st_size, "sha256": _sha256(p)}
                for p in sorted(files)
            ],
        }
        return write_json(out / "manifest.json", manifest)
    except BaseException:
        _remove(out, created)
        raise


# -- command line -----------------------------------------------------------------------------------


def _help_defaults() -> str:
    lines = ["configuration defaults:"]
    for name, sub in CONFIG_SCHEMA["properties"].items():
        if "properties" in sub:
            for key, spec in sub["properties"].items():
                if "default" in spec:
                    note = f"  ({spec['description']})" if "description" in spec and spec["default"] is None else ""
                    lines.append(f"  {name}.{key} = {json.dumps(spec['default'])}{note}")
        elif "default" in sub:
            lines.append(f"  {name} = {json.dumps(sub['default'])}")
    lines.append(f"scenarios: {', '.join(SCENARIOS)}")
    lines.append("exit codes: 0 ok, 2 syntax, 3 unknown key, 4 constraint, 5 runtime")
    return "\n".join(lines)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiquantum",
        description="Run phase-space quantization scenarios from a JSON configuration.",
        epilog=_help_defaults(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario", epilog=_help_defaults(), formatter_class=argparse.RawDescriptionHelpFormatter)
    run.add_argument("--config", required=True, type=Path, help="JSON configuration file")
    run.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    run.add_argument("--seed", type=int, help="seed for randomized sweeps (overrides seed)")
    sub.add_parser("schema", help="print the configuration schema")
    sub.add_parser("version", help="print the tool and manifest version")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "schema":
        sys.stdout.write(dumps(CONFIG_SCHEMA))
        return EXIT_OK
    if args.command == "version":
        print(f"semiquantum {__version__} ({MANIFEST_VERSION})")
        return EXIT_OK
    try:
        cfg = parse_config(args.config.read_bytes())
        if args.seed is not None and args.seed < 0:
            raise ConstraintError(f"--seed must be nonnegative, got {args.seed}")
        overrides = {}
        if args.out is not None:
            overrides["output_dir"] = args.out
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            cfg = ScenarioConfig(**{**cfg.__dict__, **overrides})
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    try:
        manifest = run_scenario(cfg)
    except Exception as exc:  # every module failure maps to the runtime exit code
        print(f"error: {cfg.scenario} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
