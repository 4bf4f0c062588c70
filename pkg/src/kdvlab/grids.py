"""Uniform grids, sampled fields, trajectories, differentiation and quadrature.

Everything downstream (solvers, norms, probes) is built on these types.  All
types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Grid1D",
    "TimeGrid",
    "Field",
    "TraceSet",
    "Trajectory",
    "make_grid",
    "make_time_grid",
    "differentiate",
    "differentiate_values",
    "l2_norm",
    "l2_inner",
    "quadrature_weights",
    "trace_consistency",
    "field_to_csv",
    "trajectory_to_csv",
    "trajectory_to_json",
    "trajectory_from_json",
]

_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial lattice x_i = i*dx on [0, L] with n nodes."""

    L: float
    n: int

    def __post_init__(self) -> None:
        if not (self.L > 0 and np.isfinite(self.L)):
            raise InvalidArgumentError(f"interval length must be positive, got {self.L}")
        if self.n < 8:
            raise InvalidArgumentError(f"need at least 8 nodes, got {self.n}")

    @property
    def dx(self) -> float:
        return self.L / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform temporal lattice t_k = k*dt on [0, T] with m steps (m+1 nodes)."""

    T: float
    m: int

    def __post_init__(self) -> None:
        if not (self.T > 0 and np.isfinite(self.T)):
            raise InvalidArgumentError(f"horizon must be positive, got {self.T}")
        if self.m < 4:
            raise InvalidArgumentError(f"need at least 4 time steps, got {self.m}")

    @property
    def dt(self) -> float:
        return self.T / self.m

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.m + 1)


def make_grid(L: float, n: int) -> Grid1D:
    """Build a uniform spatial grid covering [0, L]."""
    return Grid1D(float(L), int(n))


def make_time_grid(T: float, m: int) -> TimeGrid:
    return TimeGrid(float(T), int(m))


def _as_readonly(values: np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=float).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Field:
    """Real-valued samples on a Grid1D."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_readonly(self.values)
        if arr.ndim != 1 or arr.shape[0] != self.grid.n:
            raise InvalidArgumentError(
                f"field length {arr.shape} does not match grid with n={self.grid.n}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("field contains non-finite entries")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_callable(cls, grid: Grid1D, f: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(grid, np.asarray(f(grid.nodes), dtype=float))

    @classmethod
    def zeros(cls, grid: Grid1D) -> "Field":
        return cls(grid, np.zeros(grid.n))


@dataclass(frozen=True)
class TraceSet:
    """Boundary-trace channels of a trajectory: u(0,.), u(L,.), u_x(0,.), u_x(L,.), u_xx(L,.)."""

    u0: np.ndarray
    uL: np.ndarray
    ux0: np.ndarray
    uxL: np.ndarray
    uxxL: np.ndarray

    def __post_init__(self) -> None:
        for name in ("u0", "uL", "ux0", "uxL", "uxxL"):
            object.__setattr__(self, name, _as_readonly(getattr(self, name)))

    def as_dict(self) -> dict[str, np.ndarray]:
        return {k: getattr(self, k) for k in ("u0", "uL", "ux0", "uxL", "uxxL")}


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed sequence of Fields with boundary-trace channels.

    ``values[k, i]`` holds u(x_i, t_k); traces are stored explicitly because
    the spectral solver produces them independently of the frames.
    """

    grid: Grid1D
    tgrid: TimeGrid
    values: np.ndarray
    traces: TraceSet | None = field(default=None)

    def __post_init__(self) -> None:
        arr = _as_readonly(self.values)
        if arr.shape != (self.tgrid.m + 1, self.grid.n):
            raise InvalidArgumentError(
                f"trajectory shape {arr.shape} does not match "
                f"(m+1, n) = ({self.tgrid.m + 1}, {self.grid.n})"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("trajectory contains non-finite entries")
        object.__setattr__(self, "values", arr)
        if self.traces is not None:
            for ch in self.traces.as_dict().values():
                if ch.shape != (self.tgrid.m + 1,):
                    raise InvalidArgumentError("trace channels must have m+1 samples")

    def frame(self, k: int) -> Field:
        return Field(self.grid, self.values[k])

    @property
    def frames(self) -> list[Field]:
        return [self.frame(k) for k in range(self.tgrid.m + 1)]

    @classmethod
    def from_values(
        cls, grid: Grid1D, tgrid: TimeGrid, values: np.ndarray, with_traces: bool = True
    ) -> "Trajectory":
        traces = traces_from_frames(grid, values) if with_traces else None
        return cls(grid, tgrid, values, traces)

    @classmethod
    def zeros(cls, grid: Grid1D, tgrid: TimeGrid) -> "Trajectory":
        values = np.zeros((tgrid.m + 1, grid.n))
        return cls.from_values(grid, tgrid, values)


def traces_from_frames(grid: Grid1D, values: np.ndarray) -> TraceSet:
    """One-sided O(dx^2) boundary traces read off the frames."""
    dx = grid.dx
    v = np.asarray(values, dtype=float)
    u0 = v[:, 0]
    uL = v[:, -1]
    ux0 = (-3.0 * v[:, 0] + 4.0 * v[:, 1] - v[:, 2]) / (2.0 * dx)
    uxL = (3.0 * v[:, -1] - 4.0 * v[:, -2] + v[:, -3]) / (2.0 * dx)
    uxxL = (2.0 * v[:, -1] - 5.0 * v[:, -2] + 4.0 * v[:, -3] - v[:, -4]) / dx**2
    return TraceSet(u0, uL, ux0, uxL, uxxL)


def trace_consistency(traj: Trajectory) -> float:
    """Max deviation between stored traces and one-sided differences of frames."""
    if traj.traces is None:
        raise InvalidArgumentError("trajectory has no trace channels")
    fd = traces_from_frames(traj.grid, traj.values)
    dev = 0.0
    for name, chan in traj.traces.as_dict().items():
        dev = max(dev, float(np.max(np.abs(chan - getattr(fd, name)))))
    return dev


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def _fornberg_weights(x0: float, xs: np.ndarray, der: int) -> np.ndarray:
    """Finite-difference weights for the der-th derivative at x0 on nodes xs."""
    n = len(xs)
    c = np.zeros((n, der + 1))
    c1, c4 = 1.0, xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, der)
        c2, c5 = 1.0, c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, der]


@lru_cache(maxsize=64)
def _diff_stencils(order: int) -> tuple[np.ndarray, np.ndarray]:
    """(centered 4th-order interior stencil, one-sided 2nd-order edge stencil).

    Stencils are on the unit-spaced lattice; scale by dx**-order at use.
    """
    half = 3 if order == 3 else 2
    centered = _fornberg_weights(0.0, np.arange(-half, half + 1, dtype=float), order)
    width = order + 2  # minimal width for 2nd-order one-sided
    onesided = _fornberg_weights(0.0, np.arange(width, dtype=float), order)
    return centered, onesided


def differentiate_values(values: np.ndarray, dx: float, order: int) -> np.ndarray:
    """Row-wise spatial derivative of sampled values of shape (..., n).

    Centered 4th-order stencils in the interior, one-sided 2nd-order at the
    boundaries.  Exact on polynomials up to the stencil degree.
    """
    if order not in (1, 2, 3):
        raise InvalidArgumentError(f"derivative order must be 1, 2 or 3, got {order}")
    v = np.asarray(values, dtype=float)
    n = v.shape[-1]
    if n < order + 4:
        raise InvalidArgumentError(f"need at least {order + 4} nodes for order {order}")
    centered, onesided = _diff_stencils(order)
    half = (len(centered) - 1) // 2
    width = len(onesided)
    out = np.empty_like(v)
    acc = np.zeros(v.shape[:-1] + (n - 2 * half,))
    for k, w in enumerate(centered):
        if w != 0.0:
            acc += w * v[..., k : k + n - 2 * half]
    out[..., half : n - half] = acc
    # edges: shifted one-sided stencils anchored toward each boundary
    sign = (-1.0) ** order
    for i in range(half):
        out[..., i] = v[..., i : i + width] @ onesided
        out[..., n - 1 - i] = sign * (v[..., n - i - width : n - i][..., ::-1] @ onesided)
    out /= dx**order
    return out


def differentiate(f: Field, order: int) -> Field:
    """Spatial derivative of a sampled field (see differentiate_values)."""
    return Field(f.grid, differentiate_values(f.values, f.grid.dx, order))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights on n uniform nodes (3/8 rule tail when the
    interval count is odd).  All weights positive, exact on cubics."""
    if n < 4:
        raise InvalidArgumentError("need at least 4 nodes for quadrature")
    w = np.zeros(n)
    intervals = n - 1
    if intervals % 2 == 0:
        w[0] = w[-1] = 1.0 / 3.0
        w[1:-1:2] = 4.0 / 3.0
        w[2:-2:2] = 2.0 / 3.0
    else:
        # Simpson on the first (n-4) intervals, 3/8 rule on the last three
        head = n - 3
        w[:head] = _simpson_weights(head)
        w[head - 1] += 3.0 / 8.0
        w[head] = w[head + 1] = 9.0 / 8.0
        w[head + 2] = 3.0 / 8.0
    return w


def quadrature_weights(n: int, dx: float) -> np.ndarray:
    """Positive quadrature weights, exact for polynomials of degree <= 3."""
    return _simpson_weights(n) * dx


def l2_norm(f: Field) -> float:
    """L^2(0, L) norm by composite Simpson quadrature."""
    w = quadrature_weights(f.grid.n, f.grid.dx)
    return float(np.sqrt(w @ (f.values**2)))


def space_time_l2(values: np.ndarray, grid: Grid1D, tgrid: TimeGrid) -> float:
    """L^2(0,T; L^2(0,L)) norm of trajectory values."""
    wx = quadrature_weights(grid.n, grid.dx)
    wt = quadrature_weights(tgrid.m + 1, tgrid.dt)
    return float(np.sqrt(wt @ ((np.asarray(values) ** 2) @ wx)))


def relative_space_time_error(a: Trajectory, b: Trajectory) -> float:
    """Relative L^2(0,T; L^2) distance between two trajectories, scaled by b."""
    if a.grid != b.grid or a.tgrid != b.tgrid:
        raise InvalidArgumentError("trajectories live on different grids")
    ref = space_time_l2(b.values, b.grid, b.tgrid)
    if ref == 0.0:
        raise InvalidArgumentError("reference trajectory is zero")
    return space_time_l2(a.values - b.values, a.grid, a.tgrid) / ref


def l2_inner(f: Field, g: Field) -> float:
    """L^2 inner product; symmetric and bilinear on a shared grid."""
    if f.grid != g.grid:
        raise InvalidArgumentError("fields live on different grids")
    w = quadrature_weights(f.grid.n, f.grid.dx)
    return float(w @ (f.values * g.values))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


def field_to_csv(f: Field, path: str) -> None:
    """One row per node: x, value."""
    with open(path, "w") as fh:
        fh.write("x,value\n")
        for x, v in zip(f.grid.nodes, f.values):
            fh.write(f"{_fmt(x)},{_fmt(v)}\n")


def trajectory_to_csv(traj: Trajectory, path: str) -> None:
    """One row per time node: t, u(x_0), ..., u(x_{n-1})."""
    with open(path, "w") as fh:
        header = "t," + ",".join(f"u{i}" for i in range(traj.grid.n))
        fh.write(header + "\n")
        for t, row in zip(traj.tgrid.nodes, traj.values):
            fh.write(_fmt(t) + "," + ",".join(_fmt(v) for v in row) + "\n")


def trajectory_to_json(traj: Trajectory) -> str:
    """Self-describing JSON container with grid metadata."""
    doc: dict = {
        "grid": {"L": traj.grid.L, "n": traj.grid.n},
        "tgrid": {"T": traj.tgrid.T, "m": traj.tgrid.m},
        "frames": [[float(v) for v in row] for row in traj.values],
    }
    if traj.traces is not None:
        doc["traces"] = {k: [float(v) for v in ch] for k, ch in traj.traces.as_dict().items()}
    return json.dumps(doc, indent=1, sort_keys=True)


def trajectory_from_json(text: str) -> Trajectory:
    doc = json.loads(text)
    grid = Grid1D(doc["grid"]["L"], doc["grid"]["n"])
    tgrid = TimeGrid(doc["tgrid"]["T"], doc["tgrid"]["m"])
    values = np.asarray(doc["frames"], dtype=float)
    traces = None
    if "traces" in doc:
        traces = TraceSet(**{k: np.asarray(v, dtype=float) for k, v in doc["traces"].items()})
    return Trajectory(grid, tgrid, values, traces)
