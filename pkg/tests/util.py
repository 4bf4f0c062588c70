"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from kdvlab.boundary_data import BoundaryTriple
from kdvlab.grids import Field, Grid1D, TimeGrid
from kdvlab.sobolev import data_norm

# geometry for the nonlinear cross-oracle suite: long interval and horizon so
# that the x100-amplified data sits deep in the non-contractive regime
SUITE_L = 8.0
SUITE_T = 2.0
SUITE_N = 193
SUITE_M = 192


def suite_grids() -> tuple[Grid1D, TimeGrid]:
    return Grid1D(SUITE_L, SUITE_N), TimeGrid(SUITE_T, SUITE_M)


def small_data_case(seed: int, norm: float = 0.1) -> tuple[Field, BoundaryTriple]:
    """One randomized smooth-data case with data_norm normalized to `norm`.

    The shapes lean negative toward the right end, where the boundary energy
    flux can pump energy in, so large amplitudes genuinely break contraction.
    """
    grid, tgrid = suite_grids()
    xx, tt = grid.nodes, tgrid.nodes
    rng = np.random.default_rng(np.random.SeedSequence([2026, seed]))
    center = rng.uniform(0.6, 0.8)
    width = rng.uniform(0.14, 0.22)
    base = -np.exp(-(((xx / grid.L - center) / width) ** 2))
    base = base + 0.15 * rng.normal() * np.sin(np.pi * xx / grid.L) ** 2
    h1 = 0.05 * rng.uniform(0.3, 1.0) * np.sin(np.pi * tt / tgrid.T) ** 2
    zeros = np.zeros(tgrid.m + 1)
    phi = Field(grid, base)
    h = BoundaryTriple(h1, zeros, zeros.copy(), tgrid)
    scale = norm / data_norm(phi, h, 0.0, tgrid.T)
    return (
        Field(grid, scale * base),
        BoundaryTriple(scale * h1, zeros, zeros.copy(), tgrid),
    )


def scaled_case(seed: int, factor: float) -> tuple[Field, BoundaryTriple]:
    phi, h = small_data_case(seed)
    return Field(phi.grid, factor * phi.values), BoundaryTriple(
        factor * h.h1, factor * h.h2, factor * h.h3, h.tgrid
    )


def zero_bc_manufactured(n: int, m: int):
    """Smooth manufactured solution with homogeneous CG boundary traces.

    v*(x, t) = e^{-t} p(x) with p = (x - 1)^3 + 1 on (0, 1), which satisfies
    p(0) = p'(1) = p''(1) = 0; the matching forcing is returned alongside.
    """
    grid, tgrid = Grid1D(1.0, n), TimeGrid(1.0, m)
    x, t = grid.nodes, tgrid.nodes
    p = (x - 1.0) ** 3 + 1.0
    exact = np.exp(-t)[:, None] * p[None, :]
    forcing = np.exp(-t)[:, None] * (-p + 3.0 * (x - 1.0) ** 2 + 6.0)[None, :]
    return grid, tgrid, Field(grid, p), exact, forcing
