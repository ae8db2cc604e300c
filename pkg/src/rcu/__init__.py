"""Sequential decisions under belief-function uncertainty.

Choquet expected utility over capacities, generalized Bayesian conditioning,
and strategy selection on decision trees: sophisticated, justifiable and
resolute (unlimited or slack-limited) choice, with a dominance oracle and
money-pump / price-of-information audits.
"""

from .audits import (
    AuditVerdict,
    audit_information_price,
    audit_money_pump,
    build_information_tree,
    build_money_pump_gadget,
    run_method,
    seu_dynamic_consistency_check,
)
from .criteria import (
    IDENTITY,
    Affine,
    CriterionConfig,
    Identity,
    PiecewiseLinear,
    choquet_value,
    linear_value,
    local_value,
    seu_value,
)
from .errors import (
    CapExceeded,
    ConditioningOnImplausibleEvent,
    InvalidModel,
    InvalidStrategy,
    RCUError,
    SpaceMismatch,
)
from .solve import (
    AlphaSystem,
    DominanceVerdict,
    Relation,
    SolveReport,
    alpha_strategy,
    build_T0,
    build_T1,
    dominates,
    generate_weight_systems,
    justifiable,
    make_alpha_systems,
    resolute_limited,
    resolute_unlimited,
    sophisticated,
    undominated_strategies,
)
from .tree import (
    DecisionTree,
    GainMapping,
    Strategy,
    SubtreeMask,
    chance,
    decision,
    enumerate_strategies,
    gain_mapping,
    leaf,
    path_event,
    restrict,
    validate_tree,
)
from .uncertainty import (
    Capacity,
    EventSet,
    EventSpace,
    MassAssignment,
    ProbabilityVector,
    capacity_from_masses,
    condition,
    core_extreme_points,
    lower_probability,
    min_envelope,
    mobius_inversion,
    validate_capacity,
)

__version__ = "0.1.0"
