"""Exact and simulated counterfactual contrasts in a binary mediator model with collider bias."""

from .estimands import (
    EstimandReport,
    RiskPair,
    delta_as,
    delta_cde,
    delta_cde_a1m1,
    delta_cde_m1,
    delta_ce,
    delta_sp,
    odds_ratio,
    report,
    total_effect,
)
from .scm import (
    DegenerateModelError,
    InvalidParameterError,
    JointTable,
    MechanismTables,
    Model,
    ScmParams,
    UndefinedOddsError,
    ZeroProbabilityError,
    build_mechanisms,
    condition_u,
    expit,
    joint_factual,
    resolve_intercepts,
)

__version__ = "0.1.0"
