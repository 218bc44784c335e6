"""Coupled fixed points of mixed monotone operators on generalized metric spaces.

The distance functions handled here may be infinite, may have nonzero
self-distance, and satisfy a limsup-based substitute for the triangle
inequality.  The package provides the spaces, the pair products and
order, coupled-operator iteration with a hypothesis audit, uniqueness
and component-equality probes, an exhaustive finite-instance oracle,
and a CLI that writes JSON reports, delimited traces, and figures.
"""

from .extreal import (
    INF,
    NEG_INF,
    ExtReal,
    IndeterminateForm,
    as_extreal,
    ext_abs,
    ext_add,
    ext_scale,
    ext_sub,
    format_extreal,
    parse_extreal,
)
from .operators import (
    ContractionEstimate,
    CoupledOperator,
    DeltaEstimate,
    EvaluationError,
    Trajectory,
    apply_tf,
    catalog_operator,
    check_mixed_monotone,
    delta_f,
    delta_tf,
    estimate_contraction,
    iterate,
)
from .oracle import (
    FiniteInstance,
    OracleMismatch,
    cross_check,
    engineered_instance,
    enumerate_coupled_fixed_points,
    exact_contraction_constant,
)
from .product import (
    OrderedSpace,
    d_max,
    d_plus,
    lift_space,
    ordered_space,
    pair_leq,
    pairs_comparable,
)
from .solver import (
    HypothesisReport,
    PreconditionFailed,
    ProbeReport,
    RateReport,
    SolveConfig,
    SolveReport,
    check_hypotheses,
    probe_component_equality,
    probe_uniqueness_bridged,
    probe_uniqueness_comparable,
    solve,
    verify_rate,
)
from .spaces import (
    BadParams,
    CheckReport,
    DomainViolation,
    MetricSpace,
    NotConvergent,
    builtin_d3_trials,
    builtin_space,
    check_d1,
    check_d2,
    check_d3,
    distance,
    is_convergent,
)

__version__ = "0.1.0"
