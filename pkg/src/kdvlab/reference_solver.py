"""Finite-difference oracle for the linear and nonlinear IBVP.

The spatial operator A v = -v''' - v' is discretized on the grid with
second-order stencils and the three boundary conditions v(0) = h1,
v_x(L) = h2, v_xx(L) = h3 imposed by row replacement, which keeps the system
banded with bandwidth (3, 3).  Time stepping is Crank-Nicolson (implicit
midpoint for the nonlinear term), unconditionally stable and second order in
dt and dx on smooth compatible data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded

from .boundary_data import BoundaryTriple
from .errors import (
    BlowupSuspectedError,
    InvalidArgumentError,
    SolverFailureError,
)
from .grids import (
    Field,
    Grid1D,
    TimeGrid,
    Trajectory,
    differentiate,
    quadrature_weights,
)

__all__ = [
    "OperatorMatrix",
    "build_operator",
    "solve_linear",
    "semigroup_apply",
    "solve_nonlinear_direct",
    "EnergyReport",
    "energy_report",
    "convergence_order",
]

_BANDS = (3, 3)  # lower, upper bandwidth


def _banded_zeros(n: int) -> np.ndarray:
    return np.zeros((_BANDS[0] + _BANDS[1] + 1, n))


def _banded_add(ab: np.ndarray, row: int, offsets, coeffs) -> None:
    # scipy convention: ab[u + i - j, j] = a[i, j]
    for off, c in zip(offsets, coeffs):
        ab[_BANDS[1] - off, row + off] += c


def _banded_matvec(ab: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = len(v)
    out = np.zeros(n)
    for off in range(-_BANDS[1], _BANDS[0] + 1):
        # out[i] += a[i, i - off] * v[i - off]
        diag = ab[_BANDS[1] + off]
        if off >= 0:
            out[off:] += diag[: n - off] * v[: n - off]
        else:
            out[: n + off] += diag[-off:] * v[-off:]
    return out


@dataclass(frozen=True)
class OperatorMatrix:
    """Banded discretization of the spatial operator plus boundary rows.

    ``pde`` carries v_x + v_xxx on the interior rows (zero on boundary rows);
    ``bc`` carries the three boundary-condition stencils on rows
    0, n-2, n-1; ``interior`` masks the PDE rows.
    """

    grid: Grid1D
    pde: np.ndarray
    bc: np.ndarray
    interior: np.ndarray

    def apply_pde(self, v: np.ndarray) -> np.ndarray:
        return _banded_matvec(self.pde, v)

    def apply_bc(self, v: np.ndarray) -> np.ndarray:
        return _banded_matvec(self.bc, v)


@lru_cache(maxsize=32)
def _cached_operator(L: float, n: int) -> OperatorMatrix:
    grid = Grid1D(L, n)
    dx = grid.dx
    pde = _banded_zeros(n)
    bc = _banded_zeros(n)
    interior = np.zeros(n, dtype=bool)
    interior[1 : n - 2] = True

    d1 = np.array([-0.5, 0.0, 0.5]) / dx
    d3c = np.array([-0.5, 1.0, 0.0, -1.0, 0.5]) / dx**3
    d3b = np.array([-1.5, 5.0, -6.0, 3.0, -0.5]) / dx**3  # offsets -1..3, 2nd order
    for i in range(1, n - 2):
        _banded_add(pde, i, (-1, 0, 1), d1)
        if i == 1:
            _banded_add(pde, i, (-1, 0, 1, 2, 3), d3b)
        else:
            _banded_add(pde, i, (-2, -1, 0, 1, 2), d3c)

    # v(0) = h1
    _banded_add(bc, 0, (0,), (1.0,))
    # v_x(L) = h2, one-sided second order
    _banded_add(bc, n - 2, (-1, 0, 1), np.array([1.0, -4.0, 3.0]) / (2.0 * dx))
    # v_xx(L) = h3, one-sided second order
    _banded_add(bc, n - 1, (-3, -2, -1, 0), np.array([-1.0, 4.0, -5.0, 2.0]) / dx**2)
    return OperatorMatrix(grid, pde, bc, interior)


def build_operator(grid: Grid1D) -> OperatorMatrix:
    return _cached_operator(grid.L, grid.n)


def _forcing_frames(f, tgrid: TimeGrid, n: int) -> np.ndarray:
    if f is None:
        return np.zeros((tgrid.m + 1, n))
    if isinstance(f, Trajectory):
        return f.values
    arr = np.asarray(f, dtype=float)
    if arr.shape != (tgrid.m + 1, n):
        raise InvalidArgumentError(f"forcing shape {arr.shape} != {(tgrid.m + 1, n)}")
    return arr


def _bc_values(h: BoundaryTriple | None, tgrid: TimeGrid) -> np.ndarray:
    if h is None:
        return np.zeros((3, tgrid.m + 1))
    if h.tgrid != tgrid:
        raise InvalidArgumentError("boundary data time grid does not match")
    return np.vstack([h.h1, h.h2, h.h3])


def solve_linear(
    phi: Field,
    f,
    h: BoundaryTriple | None,
    grid: Grid1D,
    tgrid: TimeGrid,
) -> Trajectory:
    """Crank-Nicolson solve of v_t + v_x + v_xxx = f with the three
    nonhomogeneous boundary conditions carried on the boundary rows."""
    if phi.grid != grid:
        raise InvalidArgumentError("initial field grid does not match")
    op = build_operator(grid)
    n, m, dt = grid.n, tgrid.m, tgrid.dt
    forcing = _forcing_frames(f, tgrid, n)
    bc = _bc_values(h, tgrid)

    lhs = op.bc + 0.5 * op.pde
    lhs[_BANDS[1], :][op.interior] += 1.0 / dt

    values = np.empty((m + 1, n))
    values[0] = phi.values
    v = phi.values.copy()
    for k in range(m):
        rhs = np.zeros(n)
        inner = v / dt - 0.5 * op.apply_pde(v)
        rhs[op.interior] = inner[op.interior]
        rhs[op.interior] += 0.5 * (forcing[k] + forcing[k + 1])[op.interior]
        rhs[0] = bc[0, k + 1]
        rhs[n - 2] = bc[1, k + 1]
        rhs[n - 1] = bc[2, k + 1]
        try:
            v = solve_banded(_BANDS, lhs, rhs)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise SolverFailureError(f"banded solve failed at step {k}: {exc}") from exc
        if not np.all(np.isfinite(v)):
            raise SolverFailureError(f"non-finite state at step {k}")
        values[k + 1] = v
    return Trajectory.from_values(grid, tgrid, values)


def semigroup_apply(phi: Field, t: float, tgrid: TimeGrid) -> Field:
    """W_0(t) phi: homogeneous-data solve read off at a grid time t."""
    k = t / tgrid.dt
    if abs(k - round(k)) > 1e-9 or not (0 <= round(k) <= tgrid.m):
        raise InvalidArgumentError(f"t={t} is not a node of the time grid")
    traj = solve_linear(phi, None, None, phi.grid, tgrid)
    return traj.frame(int(round(k)))


def solve_nonlinear_direct(
    phi: Field,
    h: BoundaryTriple | None,
    grid: Grid1D,
    tgrid: TimeGrid,
    newton_tol: float = 1e-11,
    newton_max: int = 30,
) -> Trajectory:
    """Implicit-midpoint solve of u_t + u_x + u_xxx + u u_x = 0.

    The nonlinear term is kept in conservative form (u^2/2)_x so the discrete
    energy flux telescopes cleanly.  Newton divergence inside a step raises
    BlowupSuspectedError with the step index.
    """
    if phi.grid != grid:
        raise InvalidArgumentError("initial field grid does not match")
    op = build_operator(grid)
    n, m, dt = grid.n, tgrid.m, tgrid.dt
    dx = grid.dx
    bc = _bc_values(h, tgrid)
    interior = op.interior

    def nonlin(u: np.ndarray) -> np.ndarray:
        # (u^2/2)_x with centered differences on the PDE rows
        g = 0.5 * u * u
        out = np.zeros(n)
        out[1 : n - 2] = (g[2 : n - 1] - g[0 : n - 3]) / (2.0 * dx)
        return out

    values = np.empty((m + 1, n))
    values[0] = phi.values
    v = phi.values.copy()
    for k in range(m):
        w = v.copy()  # Newton iterate for the new time level
        ok = False
        prev_res = np.inf
        for _ in range(newton_max):
            mid = 0.5 * (w + v)
            g = np.zeros(n)
            g[interior] = ((w - v) / dt + op.apply_pde(mid) + nonlin(mid))[interior]
            g[0] = w[0] - bc[0, k + 1]
            g[n - 2] = op.apply_bc(w)[n - 2] - bc[1, k + 1]
            g[n - 1] = op.apply_bc(w)[n - 1] - bc[2, k + 1]
            res = float(np.max(np.abs(g)))
            if not np.isfinite(res) or res > 1e6 * max(1.0, prev_res):
                raise BlowupSuspectedError(k)
            jac = op.bc + 0.5 * op.pde
            jac[_BANDS[1], :][interior] += 1.0 / dt
            # derivative of the midpoint nonlinearity: 0.5 * D1(mid * delta)
            for i in range(1, n - 2):
                jac[_BANDS[1] - 1, i + 1] += 0.25 * mid[i + 1] / dx
                jac[_BANDS[1] + 1, i - 1] -= 0.25 * mid[i - 1] / dx
            try:
                step = solve_banded(_BANDS, jac, g)
            except np.linalg.LinAlgError as exc:
                raise SolverFailureError(f"Newton linear solve failed at step {k}: {exc}") from exc
            w = w - step
            # Newton converges quadratically; a small correction ends the step
            if np.max(np.abs(step)) <= newton_tol * max(1.0, float(np.max(np.abs(w)))):
                ok = True
                break
            prev_res = res
        if not ok:
            raise BlowupSuspectedError(k, f"Newton stalled at step {k} (residual {prev_res:.3e})")
        v = w
        values[k + 1] = v
    return Trajectory.from_values(grid, tgrid, values)


# ---------------------------------------------------------------------------
# Energy identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyReport:
    """Per-step residuals of a tested energy identity."""

    identity: str
    residuals: np.ndarray
    max_residual: float
    order_estimate: float | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "identity": self.identity,
                "residuals": [float(r) for r in self.residuals],
                "max_residual": self.max_residual,
                "order_estimate": self.order_estimate,
            },
            indent=1,
            sort_keys=True,
        )


def energy_report(traj: Trajectory, f=None, identity: str = "linear") -> EnergyReport:
    """Residual of an energy identity along a trajectory.

    linear:     d/dt int v^2 + v(L)^2 + v_x(0)^2 - 2 int f v = 0
    nonlinear:  d/dt int u^2 + u(L)^2 + u_x(0)^2 + (2/3) u(L)^3 = 0
    weighted:   d/dt int x v^2 + L v(L)^2 + 3 int v_x^2 - int v^2 - 2 int x f v = 0

    The identities hold for homogeneous boundary data; time derivatives are
    centered per step, so residuals are O(dt^2 + dx^2) on smooth solutions.
    """
    if traj.traces is None:
        raise InvalidArgumentError("trajectory has no trace channels")
    if identity not in ("linear", "nonlinear", "weighted"):
        raise InvalidArgumentError(f"unknown identity {identity!r}")
    grid, tgrid = traj.grid, traj.tgrid
    w = quadrature_weights(grid.n, grid.dx)
    x = grid.nodes
    dt = tgrid.dt
    vals = traj.values
    forcing = _forcing_frames(f, tgrid, grid.n)
    uL = traj.traces.uL
    ux0 = traj.traces.ux0

    if identity == "weighted":
        energy = (vals**2 * x) @ w
        vx2 = np.array(
            [w @ (differentiate(traj.frame(k), 1).values ** 2) for k in range(tgrid.m + 1)]
        )
        source = (forcing * vals * x) @ w
        flux = grid.L * uL**2 + 3.0 * vx2 - vals**2 @ w - 2.0 * source
    else:
        energy = vals**2 @ w
        flux = uL**2 + ux0**2
        if identity == "nonlinear":
            flux = flux + (2.0 / 3.0) * uL**3
        else:
            flux = flux - 2.0 * (forcing * vals) @ w

    avg_flux = 0.5 * (flux[1:] + flux[:-1])
    residuals = np.diff(energy) / dt + avg_flux
    return EnergyReport(identity, residuals, float(np.max(np.abs(residuals))))


def convergence_order(values, factor: float = 2.0) -> float:
    """Least-squares order p from errors at successive refinements by `factor`."""
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise InvalidArgumentError("convergence order needs positive error values")
    steps = np.arange(len(values))
    slope = np.polyfit(steps, np.log(values), 1)[0]
    return float(-slope / np.log(factor))
