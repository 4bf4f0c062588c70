"""Run configuration: schema, named data shapes, and experiment orchestration.

A run is described by one YAML (or JSON) document validated against
CONFIG_SCHEMA.  Reruns of an identical config reproduce every CSV/JSON
artifact byte for byte: artifacts carry no timestamps, float formatting is
fixed, and JSON keys are sorted.  Wall time lives only on the in-process
RunReport.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml
from jsonschema import Draft202012Validator

from .boundary_data import BoundaryTriple
from .boundary_integral import QuadConfig, wbdr_apply
from .compat import check_compat
from .errors import ConfigError
from .grids import (
    Field,
    Grid1D,
    TimeGrid,
    Trajectory,
    trajectory_to_csv,
    trajectory_to_json,
)
from .picard import picard_solve
from .reference_solver import energy_report, solve_linear, solve_nonlinear_direct
from .svgplot import svg_line_plot

__all__ = ["CONFIG_SCHEMA", "RunConfig", "RunReport", "load_config", "run", "run_many"]

_SHAPE_SCHEMA = {
    "type": "object",
    "properties": {
        "shape": {
            "enum": [
                "zero",
                "sine",
                "gaussian",
                "cubic-window",
                "neg-right-bump",
                "sinsq",
                "poly-bump",
            ]
        },
        "amplitude": {"type": "number"},
        "mode": {"type": "integer", "minimum": 1},
        "center": {"type": "number"},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "file": {"type": "string"},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["problem", "numerics", "solver"],
    "properties": {
        "problem": {
            "type": "object",
            "required": ["L", "T", "s"],
            "properties": {
                "L": {"type": "number", "exclusiveMinimum": 0},
                "T": {"type": "number", "exclusiveMinimum": 0},
                "s": {"type": "number", "minimum": -1, "maximum": 6},
            },
            "additionalProperties": False,
        },
        "data": {
            "type": "object",
            "properties": {
                "phi": _SHAPE_SCHEMA,
                "h1": _SHAPE_SCHEMA,
                "h2": _SHAPE_SCHEMA,
                "h3": _SHAPE_SCHEMA,
            },
            "additionalProperties": False,
        },
        "solver": {"enum": ["fd", "spectral", "picard", "direct"]},
        "numerics": {
            "type": "object",
            "required": ["n", "m"],
            "properties": {
                "n": {"type": "integer", "minimum": 8},
                "m": {"type": "integer", "minimum": 4},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 2},
                "quad": {
                    "type": "object",
                    "properties": {
                        "rho_max": {"type": "number", "minimum": 10},
                        "panels": {"type": "integer", "minimum": 32},
                        "tol": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "probes": {
            "type": "array",
            "items": {"enum": ["energy", "compat", "plots"]},
        },
        "output_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run description."""

    doc: dict

    @property
    def problem(self) -> dict:
        return self.doc["problem"]

    @property
    def numerics(self) -> dict:
        return self.doc["numerics"]

    @property
    def solver(self) -> str:
        return self.doc["solver"]

    @property
    def probes(self) -> list[str]:
        return list(self.doc.get("probes", []))

    @property
    def seed(self) -> int:
        return int(self.doc.get("seed", 0))

    def config_hash(self) -> str:
        canonical = json.dumps(self.doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def output_dir(self) -> Path:
        root = Path(os.environ.get("KDVLAB_OUTPUT_ROOT", "."))
        sub = self.doc.get("output_dir", f"run-{self.config_hash()}")
        return root / sub

    def quad_config(self) -> QuadConfig:
        q = self.numerics.get("quad", {})
        return QuadConfig(
            rho_max=q.get("rho_max", 40.0),
            panels=q.get("panels", 64),
            tol=q.get("tol", 1e-6),
        )


@dataclass(frozen=True)
class RunReport:
    """In-process summary of one run."""

    config_hash: str
    output_dir: str
    artifacts: tuple[str, ...]
    warnings: tuple[str, ...]
    wall_time: float


def validate_config(doc: dict) -> dict:
    validator = Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: e.json_path)
    if errors:
        first = errors[0]
        raise ConfigError(first.json_path, first.message)
    return doc


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError("$", f"config is not parseable YAML/JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("$", "config must be a mapping")
    return RunConfig(validate_config(doc))


# ---------------------------------------------------------------------------
# Named data shapes
# ---------------------------------------------------------------------------

def _field_shape(spec: dict | None, grid: Grid1D) -> Field:
    if spec is None:
        return Field.zeros(grid)
    if "file" in spec:
        data = np.loadtxt(spec["file"], delimiter=",", skiprows=1)
        vals = np.asarray(data[:, 1], dtype=float)
        if len(vals) != grid.n:
            raise ConfigError("data.phi.file", f"file has {len(vals)} samples, grid wants {grid.n}")
        return Field(grid, vals)
    amp = spec.get("amplitude", 1.0)
    kind = spec.get("shape", "zero")
    xi = grid.nodes / grid.L
    if kind == "zero":
        return Field.zeros(grid)
    if kind == "sine":
        mode = spec.get("mode", 1)
        return Field(grid, amp * np.sin(mode * np.pi * xi))
    if kind == "gaussian":
        c = spec.get("center", 0.5)
        wdt = spec.get("width", 0.15)
        return Field(grid, amp * np.exp(-(((xi - c) / wdt) ** 2)))
    if kind == "cubic-window":
        return Field(grid, amp * ((xi - 1.0) ** 3 + 1.0))
    if kind == "neg-right-bump":
        c = spec.get("center", 0.75)
        wdt = spec.get("width", 0.18)
        return Field(grid, -amp * np.exp(-(((xi - c) / wdt) ** 2)))
    raise ConfigError("data.phi.shape", f"shape {kind!r} is not a spatial shape")


def _signal_shape(spec: dict | None, tgrid: TimeGrid, name: str) -> np.ndarray:
    if spec is None:
        return np.zeros(tgrid.m + 1)
    if "file" in spec:
        data = np.loadtxt(spec["file"], delimiter=",", skiprows=1)
        vals = np.asarray(data[:, 1], dtype=float)
        if len(vals) != tgrid.m + 1:
            raise ConfigError(
                f"data.{name}.file", f"file has {len(vals)} samples, grid wants {tgrid.m + 1}"
            )
        return vals
    amp = spec.get("amplitude", 1.0)
    kind = spec.get("shape", "zero")
    t = tgrid.nodes / tgrid.T
    if kind == "zero":
        return np.zeros(tgrid.m + 1)
    if kind == "sinsq":
        mode = spec.get("mode", 1)
        return amp * np.sin(mode * np.pi * t) ** 2
    if kind == "poly-bump":
        return amp * 16.0 * t**2 * (1.0 - t) ** 2
    raise ConfigError(f"data.{name}.shape", f"shape {kind!r} is not a time-signal shape")


def build_data(cfg: RunConfig) -> tuple[Grid1D, TimeGrid, Field, BoundaryTriple]:
    prob, num = cfg.problem, cfg.numerics
    grid = Grid1D(prob["L"], num["n"])
    tgrid = TimeGrid(prob["T"], num["m"])
    data = cfg.doc.get("data", {})
    phi = _field_shape(data.get("phi"), grid)
    h = BoundaryTriple(
        _signal_shape(data.get("h1"), tgrid, "h1"),
        _signal_shape(data.get("h2"), tgrid, "h2"),
        _signal_shape(data.get("h3"), tgrid, "h3"),
        tgrid,
        prob["s"],
    )
    return grid, tgrid, phi, h


def _excluded_index(s: float) -> bool:
    # the excluded set s = (2j - 1)/2, j = 1, 2, ...
    twice = 2.0 * s
    return s > 0 and abs(twice - round(twice)) < 1e-12 and int(round(twice)) % 2 == 1


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def run(config_path: str | Path, solver_override: str | None = None) -> RunReport:
    """Execute the configured pipeline and write artifacts."""
    start = time.perf_counter()
    cfg = load_config(config_path)
    if solver_override is not None:
        doc = dict(cfg.doc)
        doc["solver"] = solver_override
        cfg = RunConfig(validate_config(doc))
    notes: list[str] = []
    s = cfg.problem["s"]
    if _excluded_index(s):
        msg = f"s={s} lies in the excluded index set (2j-1)/2; proceeding anyway"
        warnings.warn(msg)
        notes.append(msg)

    grid, tgrid, phi, h = build_data(cfg)
    solver = cfg.solver
    tol = cfg.numerics.get("tol", 1e-9)
    max_iter = cfg.numerics.get("max_iter", 25)

    if solver == "fd":
        traj = solve_linear(phi, None, h, grid, tgrid)
    elif solver == "spectral":
        if np.any(phi.values):
            raise ConfigError(
                "data.phi", "the spectral solver covers the pure boundary-forcing problem; set phi to zero"
            )
        traj = wbdr_apply(h, grid, tgrid, cfg.quad_config())
    elif solver == "picard":
        traj, diag = picard_solve(phi, h, grid, tgrid, tol=tol, max_iter=max_iter)
        notes.append(
            f"picard converged in {diag.iterates} sweeps"
            + (f", terminal ratio {diag.terminal_ratio:.4g}" if diag.ratios else "")
        )
    else:
        traj = solve_nonlinear_direct(phi, h, grid, tgrid)

    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    artifacts: list[str] = []

    trajectory_to_csv(traj, str(out / "trajectory.csv"))
    artifacts.append("trajectory.csv")
    (out / "trajectory.json").write_text(trajectory_to_json(traj))
    artifacts.append("trajectory.json")

    if "energy" in cfg.probes:
        identity = "linear" if solver in ("fd", "spectral") else "nonlinear"
        rep = energy_report(traj, identity=identity)
        (out / "energy_report.json").write_text(rep.to_json())
        artifacts.append("energy_report.json")
        if "plots" in cfg.probes:
            svg_line_plot(
                str(out / "energy_residuals.svg"),
                tgrid.nodes[1:],
                {"residual": rep.residuals},
                "energy identity residual",
            )
            artifacts.append("energy_residuals.svg")

    if "compat" in cfg.probes:
        verdict = check_compat(phi, h, s)
        (out / "compat_verdict.json").write_text(verdict.to_json())
        artifacts.append("compat_verdict.json")

    if "plots" in cfg.probes:
        mid = tgrid.m // 2
        svg_line_plot(
            str(out / "trajectory.svg"),
            grid.nodes,
            {
                "t=0": traj.values[0],
                f"t={tgrid.nodes[mid]:g}": traj.values[mid],
                f"t={tgrid.T:g}": traj.values[-1],
            },
            f"{solver} solution frames",
        )
        artifacts.append("trajectory.svg")

    report = {
        "config_hash": cfg.config_hash(),
        "artifacts": sorted(artifacts),
        "warnings": notes,
    }
    (out / "report.json").write_text(json.dumps(report, indent=1, sort_keys=True))
    artifacts.append("report.json")

    return RunReport(
        config_hash=cfg.config_hash(),
        output_dir=str(out),
        artifacts=tuple(sorted(artifacts)),
        warnings=tuple(notes),
        wall_time=time.perf_counter() - start,
    )


def run_many(config_paths, workers: int = 1) -> list[RunReport]:
    """Fan a config matrix out across worker processes; runs are isolated."""
    paths = [str(p) for p in config_paths]
    if workers <= 1 or len(paths) <= 1:
        return [run(p) for p in paths]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, paths))
