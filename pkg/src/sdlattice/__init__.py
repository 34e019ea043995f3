"""Lattices of finitely-supported distributions under stochastic dominance orders."""

from .core import (
    ContractError,
    DiscreteDistribution,
    DominanceError,
    PiecewiseLinearFunction,
    StepFunction,
    cdf_function,
    dirac,
    from_icv_transform,
    from_icx_transform,
    icv_transform,
    icx_transform,
    make_discrete,
    mean,
    reflect,
    survival,
    survival_function,
)
from .first_order import OrderWitness, inf_st, join_st, leq_st, meet_st, st_functional, sup_st
from .flows import (
    AtomicMeasureSpace,
    Flow,
    UnboundedError,
    ess_extremum_flow,
    ess_sup_countable,
    flow_functional,
    leq_flow,
)
from .integrability import (
    ExplicitFamily,
    NonnegMeasure,
    NotTightError,
    NotUniformlyIntegrableError,
    TailOracle,
    build_psi_dlvp,
    build_psi_strict,
    build_psi_tight,
    check_convex_criterion,
    tail_sup,
    ui_tail,
)
from .lattice import extremum, functional, join, leq, meet
from .metrics import DirectedFamily, NotDirectedError, kolmogorov, levy, monotone_sup_approx, wasserstein1
from .second_order import (
    extremum_family,
    icv_functional,
    icx_functional,
    join_icv,
    join_icx,
    leq_cx,
    leq_icv,
    leq_icx,
    leq_order,
    lower_convex_envelope,
    meet_icv,
    meet_icx,
    upper_concave_envelope,
)

__version__ = "0.1.0"
