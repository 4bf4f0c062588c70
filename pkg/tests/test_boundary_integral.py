import numpy as np
import pytest

from kdvlab.boundary_data import BoundaryTriple, combine
from kdvlab.boundary_integral import (
    QuadConfig,
    laplace_hat,
    laplace_of_samples,
    wbdr_apply,
    wbdr_linearity_check,
)
from kdvlab.errors import InvalidArgumentError
from kdvlab.grids import (
    Field,
    Grid1D,
    TimeGrid,
    quadrature_weights,
    relative_space_time_error,
)
from kdvlab.reference_solver import solve_linear


def _smooth_triple(tgrid, a1=1.0, a2=0.0, a3=0.0):
    t = tgrid.nodes
    z = np.zeros(tgrid.m + 1)
    h1 = a1 * np.sin(np.pi * t / tgrid.T) ** 2
    h2 = a2 * np.sin(2 * np.pi * t / tgrid.T) ** 2 * (t / tgrid.T)
    h3 = a3 * (1 - np.cos(2 * np.pi * t / tgrid.T)) * (t / tgrid.T)
    return BoundaryTriple(h1, h2 if a2 else z, h3 if a3 else z.copy(), tgrid)


def test_laplace_hat_zero():
    tg = TimeGrid(1.0, 32)
    assert laplace_hat(np.zeros(33), tg, 1.0 + 2j) == 0.0


def test_laplace_hat_exponential():
    tg = TimeGrid(20.0, 512)
    h = np.exp(-tg.nodes)
    val = laplace_hat(h, tg, 1.0)
    assert abs(val - 0.5) < 1e-6  # tail e^{-40} negligible


def test_laplace_hat_constant_imaginary_argument():
    tg = TimeGrid(1.0, 64)
    val = laplace_hat(np.ones(65), tg, 1j)
    exact = (1.0 - np.exp(-1j)) / 1j
    assert abs(val - exact) < 1e-8


def test_laplace_hat_large_frequency():
    tg = TimeGrid(1.0, 256)
    h = np.sin(np.pi * tg.nodes) ** 2
    sig = 2000.0
    # closed form by integration by parts: endpoints contribute h''; the
    # interior brings the cos(2 pi t) resonance
    from scipy.integrate import quad

    re = quad(lambda t: np.cos(sig * t) * np.sin(np.pi * t) ** 2, 0, 1, limit=800)[0]
    im = -quad(lambda t: np.sin(sig * t) * np.sin(np.pi * t) ** 2, 0, 1, limit=800)[0]
    assert abs(laplace_hat(h, tg, 1j * sig) - (re + 1j * im)) < 1e-9


def test_laplace_requires_nonnegative_real_part():
    tg = TimeGrid(1.0, 32)
    with pytest.raises(InvalidArgumentError):
        laplace_hat(np.ones(33), tg, -1.0)


def test_laplace_vectorized_matches_scalar():
    tg = TimeGrid(1.0, 64)
    h = np.cos(tg.nodes)
    s = np.array([0.5, 1j * 3.0, 2.0 + 40j])
    vec = laplace_of_samples(h, tg.dt, s)
    for i, si in enumerate(s):
        assert abs(vec[i] - laplace_of_samples(h, tg.dt, si)) < 1e-13


def test_zero_boundary_data_gives_zero_trajectory():
    grid, tgrid = Grid1D(1.0, 33), TimeGrid(1.0, 32)
    traj = wbdr_apply(BoundaryTriple.zeros(tgrid), grid, tgrid)
    assert np.all(traj.values == 0.0)
    assert np.all(traj.traces.uxxL == 0.0)


def test_requires_unit_interval():
    grid, tgrid = Grid1D(2.0, 33), TimeGrid(1.0, 32)
    with pytest.raises(InvalidArgumentError):
        wbdr_apply(BoundaryTriple.zeros(tgrid), grid, tgrid)


def test_agreement_with_fd_oracle():
    grid, tgrid = Grid1D(1.0, 129), TimeGrid(1.0, 256)
    h = _smooth_triple(tgrid)
    spec = wbdr_apply(h, grid, tgrid)
    fd = solve_linear(Field.zeros(grid), None, h, grid, tgrid)
    assert relative_space_time_error(spec, fd) < 0.02


def test_output_real_and_finite():
    grid, tgrid = Grid1D(1.0, 65), TimeGrid(1.0, 64)
    traj = wbdr_apply(_smooth_triple(tgrid), grid, tgrid)
    assert traj.values.dtype == np.float64
    assert np.all(np.isfinite(traj.values))
    # the conjugate-pair structure W = U + conj(U) makes the imaginary part
    # vanish identically; the stored values are the real representative


def test_traces_reproduce_boundary_inputs():
    grid, tgrid = Grid1D(1.0, 129), TimeGrid(1.0, 256)
    h = _smooth_triple(tgrid, a1=1.0, a2=0.3, a3=0.2)
    traj = wbdr_apply(h, grid, tgrid)
    wt = quadrature_weights(tgrid.m + 1, tgrid.dt)

    def rel(a, b):
        return np.sqrt(wt @ (a - b) ** 2) / np.sqrt(wt @ b**2)

    assert rel(traj.traces.u0, h.h1) < 0.05
    assert rel(traj.traces.uxL, h.h2) < 0.05
    assert rel(traj.traces.uxxL, h.h3) < 0.05


def test_linearity_trivial_combinations():
    grid, tgrid = Grid1D(1.0, 49), TimeGrid(1.0, 48)
    h = _smooth_triple(tgrid)
    g = _smooth_triple(tgrid, a1=0.0, a2=1.0, a3=0.5)
    cfg = QuadConfig(rho_max=12.0)
    assert wbdr_linearity_check(h, g, 1.0, 0.0, grid, tgrid, cfg) < 1e-12
    assert wbdr_linearity_check(h, g, 0.0, 0.0, grid, tgrid, cfg) < 1e-12


def test_linearity_random_combination():
    grid, tgrid = Grid1D(1.0, 49), TimeGrid(1.0, 48)
    h = _smooth_triple(tgrid)
    g = _smooth_triple(tgrid, a1=0.2, a2=1.0, a3=0.7)
    rng = np.random.default_rng(7)
    a, b = rng.normal(size=2)
    assert wbdr_linearity_check(h, g, a, b, grid, tgrid, QuadConfig(rho_max=12.0)) < 1e-8


def test_combine_helper():
    tg = TimeGrid(1.0, 32)
    h = _smooth_triple(tg)
    g = _smooth_triple(tg, a1=0.0, a2=1.0)
    mix = combine(2.0, h, -1.0, g)
    assert np.allclose(mix.h1, 2.0 * h.h1 - g.h1)
    assert np.allclose(mix.h2, 2.0 * h.h2 - g.h2)


def test_smoothing_stable_under_refinement():
    from kdvlab.sobolev import hs_norm_samples

    def h1_time_integral(traj):
        h1 = np.array(
            [
                hs_norm_samples(traj.values[k], traj.grid.dx, 1.0)
                for k in range(traj.tgrid.m + 1)
            ]
        )
        wt = quadrature_weights(traj.tgrid.m + 1, traj.tgrid.dt)
        return float(wt @ h1**2)

    vals = []
    for n, m in ((65, 128), (129, 256)):
        grid, tgrid = Grid1D(1.0, n), TimeGrid(1.0, m)
        vals.append(h1_time_integral(wbdr_apply(_smooth_triple(tgrid), grid, tgrid)))
    assert 0.8 <= vals[1] / vals[0] <= 1.25


def test_quad_config_validation():
    with pytest.raises(InvalidArgumentError):
        QuadConfig(rho_max=5.0)
    with pytest.raises(InvalidArgumentError):
        QuadConfig(panels=8)
    with pytest.raises(InvalidArgumentError):
        QuadConfig(tol=2.0)
