import numpy as np
import pytest

from kdvlab.boundary_data import BoundaryTriple
from kdvlab.errors import (
    InvalidArgumentError,
    NoConvergenceError,
    NonContractiveError,
)
from kdvlab.grids import (
    Field,
    Grid1D,
    TimeGrid,
    Trajectory,
    l2_norm,
    relative_space_time_error,
)
from kdvlab.picard import (
    duhamel,
    estimate_existence_time,
    forcing_ratio_curve,
    picard_solve,
)
from kdvlab.reference_solver import solve_linear, solve_nonlinear_direct
from util import scaled_case, small_data_case, suite_grids


def test_duhamel_zero_forcing():
    grid, tgrid = Grid1D(1.0, 33), TimeGrid(1.0, 16)
    out = duhamel(np.zeros((17, 33)), grid, tgrid)
    assert np.max(np.abs(out.values)) == 0.0


def test_duhamel_small_time_taylor():
    grid, tgrid = Grid1D(1.0, 65), TimeGrid(0.1, 64)
    x = grid.nodes
    f_profile = np.sin(np.pi * x) * x * (1 - x)
    forcing = np.tile(f_profile, (tgrid.m + 1, 1))
    out = duhamel(forcing, grid, tgrid)
    err = np.max(np.abs(out.values[1] - tgrid.dt * f_profile))
    assert err <= 5.0 * tgrid.dt**2


def test_duhamel_linear_in_forcing():
    grid, tgrid = Grid1D(1.0, 33), TimeGrid(1.0, 16)
    rng = np.random.default_rng(0)
    f1 = rng.normal(size=(17, 33))
    f2 = rng.normal(size=(17, 33))
    combo = duhamel(2.0 * f1 - 0.5 * f2, grid, tgrid).values
    split = 2.0 * duhamel(f1, grid, tgrid).values - 0.5 * duhamel(f2, grid, tgrid).values
    assert np.max(np.abs(combo - split)) <= 1e-10 * max(1.0, np.max(np.abs(combo)))


def test_zero_data_converges_in_one_sweep():
    grid, tgrid = Grid1D(1.0, 33), TimeGrid(1.0, 16)
    traj, diag = picard_solve(Field.zeros(grid), None, grid, tgrid)
    assert np.max(np.abs(traj.values)) == 0.0
    assert diag.converged and diag.iterates == 1


def test_argument_validation():
    grid, tgrid = Grid1D(1.0, 33), TimeGrid(1.0, 16)
    with pytest.raises(InvalidArgumentError):
        picard_solve(Field.zeros(grid), None, grid, tgrid, tol=-1.0)
    with pytest.raises(InvalidArgumentError):
        picard_solve(Field.zeros(grid), None, grid, tgrid, max_iter=1)
    with pytest.raises(InvalidArgumentError):
        picard_solve(Field.zeros(grid), None, grid, tgrid, lifting="bogus")


@pytest.mark.parametrize("seed", [0, 4, 9])
def test_small_data_agreement_with_direct_solver(seed):
    grid, tgrid = suite_grids()
    phi, h = small_data_case(seed)
    traj_p, diag = picard_solve(phi, h, grid, tgrid, tol=1e-10)
    traj_d = solve_nonlinear_direct(phi, h, grid, tgrid)
    assert diag.converged
    assert relative_space_time_error(traj_p, traj_d) < 0.02
    if diag.ratios:
        assert diag.ratios[-1] < 0.5


def test_amplified_data_non_contractive():
    grid, tgrid = suite_grids()
    phi, h = scaled_case(0, 100.0)
    with pytest.raises(NonContractiveError) as err:
        picard_solve(phi, h, grid, tgrid, tol=1e-10)
    assert err.value.diagnostics is not None
    assert not err.value.diagnostics.converged


def test_fixed_point_residual_of_returned_trajectory():
    from kdvlab.grids import differentiate_values, quadrature_weights

    grid, tgrid = suite_grids()
    phi, h = small_data_case(3)
    tol = 1e-9
    traj, diag = picard_solve(phi, h, grid, tgrid, tol=tol)
    affine = solve_linear(phi, None, h, grid, tgrid).values
    forcing = differentiate_values(0.5 * traj.values**2, grid.dx, 1)
    gamma = affine - duhamel(forcing, grid, tgrid).values
    w = quadrature_weights(grid.n, grid.dx)
    residual = float(np.sqrt(np.max(((gamma - traj.values) ** 2) @ w)))
    assert residual <= 2.0 * tol


def test_contraction_onset_monotone_in_amplitude():
    grid = Grid1D(8.0, 129)
    tgrid = TimeGrid(0.75, 96)
    xx = grid.nodes
    bump = -np.exp(-(((xx / grid.L - 0.7) / 0.18) ** 2))
    bump /= l2_norm(Field(grid, bump))
    terminal = []
    for amp in (0.5, 1.0, 2.0, 4.0, 8.0):
        traj, diag = picard_solve(Field(grid, amp * bump), None, grid, tgrid, tol=1e-10, max_iter=60)
        terminal.append(diag.ratios[-1])
    assert all(b >= a - 1e-6 for a, b in zip(terminal, terminal[1:]))


def test_spectral_lifting_cross_check():
    grid, tgrid = Grid1D(1.0, 97), TimeGrid(1.0, 128)
    t = tgrid.nodes
    h = BoundaryTriple(
        0.05 * np.sin(np.pi * t) ** 2, np.zeros(tgrid.m + 1), np.zeros(tgrid.m + 1), tgrid
    )
    phi = Field.from_callable(grid, lambda x: 0.05 * ((x - 1.0) ** 3 + 1.0))
    fd_traj, _ = picard_solve(phi, h, grid, tgrid, tol=1e-10)
    sp_traj, _ = picard_solve(phi, h, grid, tgrid, tol=1e-10, lifting="spectral")
    assert relative_space_time_error(sp_traj, fd_traj) < 0.02


def test_existence_time_zero_amplitude_reaches_ceiling():
    grid = Grid1D(8.0, 65)
    xx = grid.nodes
    shape = Field(grid, -np.exp(-(((xx / 8.0 - 0.7) / 0.18) ** 2)))
    table = estimate_existence_time([0.0], shape, grid, t_cap=1.0, m=16)
    assert table == [(0.0, 1.0)]


def test_existence_time_non_increasing_small_table():
    grid = Grid1D(8.0, 65)
    xx = grid.nodes
    bump = -np.exp(-(((xx / 8.0 - 0.7) / 0.18) ** 2))
    bump = bump / l2_norm(Field(grid, bump)) * 40.0
    shape = Field(grid, bump)
    table = estimate_existence_time([0.1, 0.4, 0.8], shape, grid, t_cap=2.0, m=64)
    tstars = [t for _, t in table]
    assert all(a >= b - 1e-12 for a, b in zip(tstars, tstars[1:]))
    assert tstars[0] == 2.0  # small data reaches the probe ceiling


def test_forcing_ratio_probe_positive_slope():
    grid, tgrid = Grid1D(4.0, 129), TimeGrid(1.0, 128)
    phi = Field.from_callable(grid, lambda x: 0.1 * np.sin(np.pi * x / 4.0))
    traj, _ = picard_solve(phi, None, grid, tgrid, tol=1e-11)
    curve = forcing_ratio_curve(traj, [1.0, 0.5, 0.25, 0.125])
    ts = np.log([c[0] for c in curve])
    qs = np.log([c[1] for c in curve])
    slope = np.polyfit(ts, qs, 1)[0]
    assert 0.2 <= slope <= 0.6


def test_forcing_ratio_rejects_bad_horizon():
    grid, tgrid = Grid1D(1.0, 33), TimeGrid(1.0, 16)
    traj = Trajectory.zeros(grid, tgrid)
    with pytest.raises(InvalidArgumentError):
        forcing_ratio_curve(traj, [0.3])


def test_no_convergence_budget():
    grid, tgrid = suite_grids()
    phi, h = small_data_case(1)
    with pytest.raises(NoConvergenceError):
        picard_solve(phi, h, grid, tgrid, tol=1e-16, max_iter=2)
