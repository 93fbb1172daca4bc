"""Nonlinear heat equations with the p-sub-Laplacian on stratified groups.

Grids, horizontal calculus, an explicit solver with a comparison harness,
and the explicit barrier giving a global-in-time bound.
"""

from .barrier import (
    BarrierParams,
    barrier_function,
    barrier_params,
    barrier_value,
    choose_x0,
    global_bound,
    inflate_L,
    make_barrier,
    mp_operator,
    r_prime,
    verify_inequality_39,
)
from .calculus import HorizontalField, horizontal_divergence, horizontal_gradient, p_flux, p_sub_laplacian
from .errors import (
    ConfigError,
    InfeasibleError,
    InvalidArgument,
    MaxStepsExceeded,
    NumericalBlowUp,
    PreconditionError,
    SingularCoefficientError,
)
from .grid import BoxDomain, Grid, GridFunction, quadrature, read_csv, sobolev_norm, write_csv
from .group import (
    GroupDescriptor,
    by_name,
    coefficient_matrix,
    dilate,
    euclidean,
    heisenberg,
    horizontal_norm,
    multiply,
    vector_field,
)
from .inequalities import (
    GronwallReport,
    GronwallSample,
    gronwall_check,
    lindqvist_lower_bound,
    odd_power_gap,
    pairing_gap,
    signed_power,
)
from .solver import (
    CompareReport,
    ProblemSpec,
    SolverConfig,
    Trajectory,
    compare,
    comparison_gronwall,
    positive_part,
    reaction,
    rhs,
    solve,
    solve_many,
    stable_dt,
    step,
    weak_residual,
)

__version__ = "0.1.0"
