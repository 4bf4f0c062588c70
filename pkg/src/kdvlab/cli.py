"""Command-line front door for batch experimenters."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import characteristic as chars
from .bourgain import bilinear_ratio, ensemble_field
from .compat import check_compat
from .errors import KdvLabError
from .gauge import kdvb_residual, to_kdvb
from .grids import Field, Grid1D, TimeGrid
from .picard import estimate_existence_time
from .reference_solver import convergence_order, solve_nonlinear_direct
from .runconfig import build_data, load_config, run as run_config, run_many

_FLOAT = "%.17g"


def _echo_json(doc) -> None:
    click.echo(json.dumps(doc, indent=1, sort_keys=True))


@click.group()
def main() -> None:
    """Numerical laboratory for the KdV equation on a finite interval."""


@main.command("run")
@click.argument("configs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--workers", default=1, show_default=True, help="parallel runs for config sweeps")
def run_cmd(configs, workers: int) -> None:
    """Execute one or more run configurations."""
    try:
        reports = run_many(configs, workers=workers)
    except KdvLabError as exc:
        raise click.ClickException(str(exc)) from exc
    for rep in reports:
        click.echo(
            f"{rep.config_hash}  {rep.output_dir}  "
            f"({len(rep.artifacts)} artifacts, {rep.wall_time:.2f}s)"
        )
        for note in rep.warnings:
            click.echo(f"  note: {note}")


@main.command("solve-linear")
@click.option("-c", "--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["fd", "spectral"]), default="fd", show_default=True)
def solve_linear_cmd(config_path, method) -> None:
    """Solve the linear IBVP with the selected backend."""
    try:
        rep = run_config(config_path, solver_override=method)
    except KdvLabError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"wrote {', '.join(rep.artifacts)} to {rep.output_dir}")


@main.command("solve-nonlinear")
@click.option("-c", "--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["picard", "direct"]), default="picard", show_default=True)
def solve_nonlinear_cmd(config_path, method) -> None:
    """Solve the nonlinear IBVP by fixed-point iteration or directly."""
    try:
        rep = run_config(config_path, solver_override=method)
    except KdvLabError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"wrote {', '.join(rep.artifacts)} to {rep.output_dir}")
    for note in rep.warnings:
        click.echo(f"note: {note}")


@main.command("check-compat")
@click.option("-c", "--config", "config_path", required=True, type=click.Path(exists=True))
def check_compat_cmd(config_path) -> None:
    """Evaluate the s-compatibility verdict for the configured data."""
    cfg = load_config(config_path)
    grid, tgrid, phi, h = build_data(cfg)
    try:
        verdict = check_compat(phi, h, cfg.problem["s"])
    except KdvLabError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(verdict.to_json())
    sys.exit(0 if verdict.compatible else 1)


@main.command("roots")
@click.option("--rho", type=float, required=True, help="parameter rho > 1")
def roots_cmd(rho: float) -> None:
    """Print the characteristic root triple at rho and its residuals."""
    try:
        triple = chars.lambda_plus(rho)
    except KdvLabError as exc:
        raise click.ClickException(str(exc)) from exc
    res = triple.residuals()
    _echo_json(
        {
            "rho": rho,
            "s": [triple.s.real, triple.s.imag],
            "roots": [[lam.real, lam.imag] for lam in triple.as_array()],
            "residuals": [float(r) for r in res],
        }
    )


@main.command("ratios")
@click.option("--rho-min", default=50.0, show_default=True)
@click.option("--rho-max", default=500.0, show_default=True)
@click.option("--count", default=160, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV dump of log-magnitudes")
def ratios_cmd(rho_min, rho_max, count, out) -> None:
    """Fit the large-rho laws of the determinant ratios and print the table."""
    decay, poly = chars.fit_ratio_asymptotics(rho_min, rho_max, count)
    if out:
        chars.dump_ratios_csv(out, np.geomspace(rho_min, rho_max, count))
        click.echo(f"wrote {out}")
    _echo_json(
        {
            "fitted_decay": [[float(v) for v in row] for row in decay],
            "fitted_poly": [[float(v) for v in row] for row in poly],
            "expected_decay": [[float(v) for v in row] for row in chars.EXPECTED_DECAY],
            "expected_poly": [[float(v) for v in row] for row in chars.EXPECTED_POLY],
        }
    )


@main.command("probe-bilinear")
@click.option("--draws", default=100, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--size", default=64, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="output directory")
def probe_bilinear_cmd(draws, seed, size, out) -> None:
    """Monte-Carlo probe of the bilinear-estimate ratio."""
    s, b, alpha = -0.5, 0.45, 0.55
    supports = (1.0, 0.5, 0.25, 0.125)
    rows = []
    max_by_support = {}
    for t_support in supports:
        best = 0.0
        for d in range(draws):
            u = ensemble_field(seed, 2 * d, s, size=size, t_support=t_support)
            v = ensemble_field(seed, 2 * d + 1, s, size=size, t_support=t_support)
            ratio = bilinear_ratio(u, v, s, b, alpha, t_support)
            rows.append((d, t_support, ratio))
            best = max(best, ratio)
        max_by_support[t_support] = best
    slope = float(
        np.polyfit(np.log(list(max_by_support)), np.log(list(max_by_support.values())), 1)[0]
    )
    summary = {
        "draws": draws,
        "seed": seed,
        "size": size,
        "indices": {"s": s, "b": b, "alpha": alpha},
        "max_ratio": {str(k): v for k, v in max_by_support.items()},
        "fitted_t_exponent": slope,
    }
    if out:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "bilinear_ratios.csv", "w") as fh:
            fh.write("draw,t_support,ratio\n")
            for d, ts, r in rows:
                fh.write(f"{d},{_FLOAT % ts},{_FLOAT % r}\n")
        (outdir / "bilinear_summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True))
        click.echo(f"wrote bilinear_ratios.csv, bilinear_summary.json to {outdir}")
    _echo_json(summary)


@main.command("transform-check")
@click.option("-c", "--config", "config_path", required=True, type=click.Path(exists=True))
def transform_check_cmd(config_path) -> None:
    """Residual of the transformed equation on a solved trajectory, two levels."""
    cfg = load_config(config_path)
    grid, tgrid, phi, h = build_data(cfg)
    levels = []
    for factor in (1, 2):
        g = Grid1D(grid.L, (grid.n - 1) * factor + 1)
        tg = TimeGrid(tgrid.T, tgrid.m * factor)
        phi_f = Field.from_callable(
            g, lambda x: np.interp(x, grid.nodes, phi.values)
        )
        try:
            u = solve_nonlinear_direct(phi_f, None, g, tg)
        except KdvLabError as exc:
            raise click.ClickException(str(exc)) from exc
        res = kdvb_residual(to_kdvb(u))
        levels.append(float(np.max(res[tg.m // 4 :])))
    _echo_json(
        {
            "residuals": levels,
            "order_estimate": convergence_order(levels),
        }
    )


@main.command("existence-time")
@click.option("-c", "--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--amplitudes", default="0.05,0.1,0.2,0.4,0.8", show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV table path")
def existence_time_cmd(config_path, amplitudes, out) -> None:
    """Empirical local-existence horizon against data amplitude."""
    cfg = load_config(config_path)
    grid, tgrid, phi, h = build_data(cfg)
    r_list = [float(v) for v in amplitudes.split(",")]
    try:
        table = estimate_existence_time(
            r_list, phi, grid, t_cap=tgrid.T, m=max(tgrid.m, 16)
        )
    except KdvLabError as exc:
        raise click.ClickException(str(exc)) from exc
    if out:
        with open(out, "w") as fh:
            fh.write("r,t_star\n")
            for r, tstar in table:
                fh.write(f"{_FLOAT % r},{_FLOAT % tstar}\n")
        click.echo(f"wrote {out}")
    _echo_json({"table": [[r, t] for r, t in table]})


if __name__ == "__main__":
    main()
