"""Fixed-point solver for the integral form of the nonlinear problem.

The nonlinear IBVP is solved by iterating the affine-plus-quadratic map

    Gamma(w) = W0(t) phi + Wbdr(t) h - int_0^t W0(t - tau) (w w_x)(tau) dtau,

whose fixed point is the solution.  The affine part is computed once; each
sweep costs one linear Duhamel solve.  Contraction is monitored through the
successive-difference norms in sup_t L^2_x (the computable face of the
solution-space norms); three consecutive non-decreasing differences signal
that the horizon is too large for the data size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary_data import BoundaryTriple
from .boundary_integral import QuadConfig, wbdr_apply
from .errors import InvalidArgumentError, NoConvergenceError, NonContractiveError
from .grids import (
    Field,
    Grid1D,
    TimeGrid,
    Trajectory,
    differentiate_values,
    quadrature_weights,
)
from .reference_solver import solve_linear
from .sobolev import hs_norm_samples

__all__ = [
    "PicardDiagnostics",
    "duhamel",
    "picard_solve",
    "estimate_existence_time",
    "forcing_ratio_curve",
]


@dataclass(frozen=True)
class PicardDiagnostics:
    """Contraction record of one fixed-point run."""

    iterates: int
    residuals: tuple[float, ...]
    ratios: tuple[float, ...]
    converged: bool

    @property
    def terminal_ratio(self) -> float | None:
        return self.ratios[-1] if self.ratios else None


def duhamel(F, grid: Grid1D, tgrid: TimeGrid) -> Trajectory:
    """int_0^t W0(t - tau) F(tau) d tau: the forced solve with zero data."""
    return solve_linear(Field.zeros(grid), F, None, grid, tgrid)


def _sup_l2(values: np.ndarray, grid: Grid1D) -> float:
    w = quadrature_weights(grid.n, grid.dx)
    return float(np.sqrt(np.max((values**2) @ w)))


def _nonlinear_forcing(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """w w_x frame by frame, in conservative form (w^2/2)_x."""
    return differentiate_values(0.5 * values**2, grid.dx, 1)


def picard_solve(
    phi: Field,
    h: BoundaryTriple | None,
    grid: Grid1D,
    tgrid: TimeGrid,
    tol: float = 1e-9,
    max_iter: int = 25,
    lifting: str = "fd",
    cfg: QuadConfig | None = None,
) -> tuple[Trajectory, PicardDiagnostics]:
    """Iterate the Duhamel map to a fixed point.

    lifting selects how the affine part carries the boundary data: "fd" uses
    the finite-difference solve (any L); "spectral" uses the boundary-integral
    operator for the h part (L = 1 only), as an independent cross-check path.

    Raises NonContractiveError when three consecutive difference ratios reach
    1 (the horizon is too large for this data size) and NoConvergenceError
    when the iteration budget runs out; both carry the diagnostics.
    """
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    if max_iter < 2:
        raise InvalidArgumentError("max_iter must be at least 2")
    if lifting not in ("fd", "spectral"):
        raise InvalidArgumentError(f"unknown lifting {lifting!r}")

    if lifting == "fd" or h is None:
        affine = solve_linear(phi, None, h, grid, tgrid).values
    else:
        free = solve_linear(phi, None, None, grid, tgrid).values
        lifted = wbdr_apply(h, grid, tgrid, cfg).values
        affine = free + lifted

    v = affine.copy()
    residuals: list[float] = []
    ratios: list[float] = []
    rising = 0
    for _ in range(max_iter):
        forcing = _nonlinear_forcing(v, grid)
        v_next = affine - duhamel(forcing, grid, tgrid).values
        res = _sup_l2(v_next - v, grid)
        if residuals:
            prev = residuals[-1]
            ratio = float(res / prev) if prev > 0 else 0.0
            if not np.isfinite(ratio):
                ratio = np.inf
            ratios.append(ratio)
            rising = rising + 1 if ratio >= 1.0 else 0
        residuals.append(float(res))
        v = v_next
        if not np.all(np.isfinite(v)):
            diag = PicardDiagnostics(len(residuals), tuple(residuals), tuple(ratios), False)
            raise NonContractiveError(diag, "iterates diverged to non-finite values")
        if rising >= 3:
            diag = PicardDiagnostics(len(residuals), tuple(residuals), tuple(ratios), False)
            raise NonContractiveError(diag)
        if res <= tol:
            diag = PicardDiagnostics(len(residuals), tuple(residuals), tuple(ratios), True)
            return Trajectory.from_values(grid, tgrid, v), diag

    diag = PicardDiagnostics(len(residuals), tuple(residuals), tuple(ratios), False)
    raise NoConvergenceError(diag)


def estimate_existence_time(
    r_list,
    shape: Field,
    grid: Grid1D,
    t_cap: float = 1.0,
    m: int = 64,
    tol: float = 1e-8,
    max_iter: int = 30,
    ratio_cap: float = 0.9,
    bisect_steps: int = 8,
) -> list[tuple[float, float]]:
    """Empirical local-existence horizon T*(r) for amplitudes r.

    For each amplitude the largest horizon (up to the probe ceiling t_cap)
    where the fixed-point iteration converges with terminal ratio below
    ratio_cap is located by halving and bisection.  Non-convergence is data
    here, not an error.
    """
    if any(r < 0 for r in r_list):
        raise InvalidArgumentError("amplitudes must be non-negative")
    if shape.grid != grid:
        raise InvalidArgumentError("shape grid does not match")

    def converges(r: float, horizon: float) -> bool:
        if r == 0.0:
            return True
        phi = Field(grid, r * shape.values)
        try:
            _, diag = picard_solve(phi, None, grid, TimeGrid(horizon, m), tol, max_iter)
        except (NonContractiveError, NoConvergenceError):
            return False
        term = diag.terminal_ratio
        return term is None or term <= ratio_cap

    table: list[tuple[float, float]] = []
    floor = t_cap / 2**10
    for r in r_list:
        if converges(r, t_cap):
            table.append((float(r), float(t_cap)))
            continue
        hi = t_cap
        lo = t_cap / 2.0
        while lo > floor and not converges(r, lo):
            hi = lo
            lo /= 2.0
        if lo <= floor:
            table.append((float(r), 0.0))
            continue
        for _ in range(bisect_steps):
            mid = 0.5 * (lo + hi)
            if converges(r, mid):
                lo = mid
            else:
                hi = mid
        table.append((float(r), float(lo)))
    return table


def forcing_ratio_curve(traj: Trajectory, horizons) -> list[tuple[float, float]]:
    """Probe of the forcing estimate: int_0^T ||u u_x|| dt over ||u||_Z^2.

    The Z-norm face used is sup_{t<=T} L^2_x plus the L^2-in-time H^1_x
    component; horizons must be nodes of the trajectory's time grid.
    """
    grid, tgrid = traj.grid, traj.tgrid
    wx = quadrature_weights(grid.n, grid.dx)
    uux = traj.values * differentiate_values(traj.values, grid.dx, 1)
    uux_l2 = np.sqrt((uux**2) @ wx)
    l2_t = np.sqrt((traj.values**2) @ wx)
    h1_t = np.array(
        [hs_norm_samples(traj.values[k], grid.dx, 1.0) for k in range(tgrid.m + 1)]
    )
    out = []
    for T in horizons:
        k = T / tgrid.dt
        if abs(k - round(k)) > 1e-9 or not (4 <= round(k) <= tgrid.m):
            raise InvalidArgumentError(f"horizon {T} is not a usable node of the time grid")
        k = int(round(k))
        wt = quadrature_weights(k + 1, tgrid.dt)
        numer = float(wt @ uux_l2[: k + 1])
        znorm = float(np.max(l2_t[: k + 1])) + float(np.sqrt(wt @ h1_t[: k + 1] ** 2))
        if znorm == 0.0:
            raise InvalidArgumentError("zero trajectory has an undefined forcing ratio")
        out.append((float(T), numer / znorm**2))
    return out
