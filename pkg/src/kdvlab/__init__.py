"""kdvlab: numerical laboratory for the KdV initial-boundary-value problem
on a finite interval with Colin-Ghidaglia boundary conditions."""

from .boundary_data import BoundaryTriple, combine
from .boundary_integral import QuadConfig, laplace_hat, wbdr_apply, wbdr_linearity_check
from .characteristic import (
    RatioMatrix,
    RootTriple,
    char_roots,
    delta_ratios,
    lambda_plus,
    system_matrix,
)
from .compat import CompatVerdict, check_compat, phi_k
from .gauge import GaugePair, from_kdvb, kdvb_boundary_map, kdvb_residual, to_kdvb
from .grids import (
    Field,
    Grid1D,
    TimeGrid,
    TraceSet,
    Trajectory,
    differentiate,
    l2_inner,
    l2_norm,
    make_grid,
    make_time_grid,
)
from .picard import PicardDiagnostics, duhamel, estimate_existence_time, picard_solve
from .reference_solver import (
    EnergyReport,
    energy_report,
    semigroup_apply,
    solve_linear,
    solve_nonlinear_direct,
)
from .sobolev import data_norm, hs_norm, hs_norm_samples

__version__ = "0.1.0"
