"""Closed-form associational and causal contrasts of A on Y.

Every estimand is a contrast of two risks (the a=1 and a=0 arms), reported as
a difference and as an odds ratio. The controlled direct effects and the
associational/Sperrin contrasts share the per-stratum contrast
``p_Y(1,1,u) - p_Y(0,1,u)`` (or the arm-specific risks) and differ only in the
law of U used to average it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

from .scm import (
    BINARY,
    DegenerateModelError,
    UndefinedOddsError,
    ZeroProbabilityError,
    as_model,
    condition_u,
)

# estimands in report order; total effect has no odds-ratio field
ESTIMANDS = ("as", "sp", "ce", "cde", "cde_m1", "cde_a1m1")


@dataclass(frozen=True)
class RiskPair:
    risk1: float
    risk0: float

    @property
    def delta(self) -> float:
        return self.risk1 - self.risk0


def odds_ratio(pair: RiskPair) -> float:
    r1, r0 = pair.risk1, pair.risk0
    if not (0.0 < r1 < 1.0 and 0.0 < r0 < 1.0):
        raise UndefinedOddsError(f"odds ratio undefined for boundary risks ({r1!r}, {r0!r})")
    return (r1 / (1.0 - r1)) / (r0 / (1.0 - r0))


def _weighted(m, weights, a: int) -> float:
    return math.fsum(w * m.tables.p_y[(a, 1, u)] for u, w in zip(BINARY, weights))


def risk_as(model) -> RiskPair:
    """P(Y=1 | A=a, M=1) for both arms, read off the factual joint law."""
    m = as_model(model)
    j = m.joint
    return RiskPair(
        j.conditional({"y": 1}, {"a": 1, "m": 1}),
        j.conditional({"y": 1}, {"a": 0, "m": 1}),
    )


def risk_sp(model) -> RiskPair:
    """Factual stratum risks E[Y | M=1, A=a, U=u] averaged over P(U=u | M=1)."""
    m = as_model(model)
    j = m.joint
    w = condition_u(j, m=1)
    risks = []
    for a in (1, 0):
        strata = [j.conditional({"y": 1}, {"a": a, "m": 1, "u": u}) for u in BINARY]
        risks.append(math.fsum(wu * s for wu, s in zip(w, strata)))
    return RiskPair(*risks)


def _p_m1(m) -> float:
    p = m.joint.prob(m=1)
    if p <= 0.0:
        raise ZeroProbabilityError("M=1")
    return p


def risk_ce(model) -> RiskPair:
    """P(Y^{A=a}=1 | M=1) under the shared-disturbance coupling of M and M^{A=a}.

    With a common uniform disturbance for the mediator, a unit in stratum
    (i_A, i_U) with M=1 has M^{A=a}=1 exactly when its disturbance is below
    min(p_M(i_A, i_U), p_M(a, i_U)).
    """
    m = as_model(model)
    pm, py = m.tables.p_m, m.tables.p_y
    p_m1 = _p_m1(m)
    risks = []
    for a in (1, 0):
        terms = []
        for ia in BINARY:
            for iu in BINARY:
                w = m.p_a[ia] * m.p_u[iu]
                both = min(pm[(ia, iu)], pm[(a, iu)])
                terms.append(w * (py[(a, 1, iu)] * both + py[(a, 0, iu)] * (pm[(ia, iu)] - both)))
        risks.append(math.fsum(terms) / p_m1)
    return RiskPair(*risks)


def risk_cde(model) -> RiskPair:
    m = as_model(model)
    return RiskPair(_weighted(m, m.p_u, 1), _weighted(m, m.p_u, 0))


def risk_cde_m1(model) -> RiskPair:
    """P(Y^{a,1}=1 | M=1).

    Y^{a,1} is a function of (U, eps_Y) only and eps_Y is independent of
    (A, U, M), so conditioning on M=1 only reweights U.
    """
    m = as_model(model)
    w = condition_u(m.joint, m=1)
    return RiskPair(_weighted(m, w, 1), _weighted(m, w, 0))


def risk_cde_a1m1(model) -> RiskPair:
    m = as_model(model)
    w = condition_u(m.joint, a=1, m=1)
    return RiskPair(_weighted(m, w, 1), _weighted(m, w, 0))


def risk_total(model) -> RiskPair:
    """P(Y^{A=a}=1) by the g-formula, adjusting for U."""
    m = as_model(model)
    pm, py = m.tables.p_m, m.tables.p_y
    risks = []
    for a in (1, 0):
        risks.append(
            math.fsum(
                m.p_u[u] * (pm[(a, u)] * py[(a, 1, u)] + (1.0 - pm[(a, u)]) * py[(a, 0, u)])
                for u in BINARY
            )
        )
    return RiskPair(*risks)


RISKS = {
    "as": risk_as,
    "sp": risk_sp,
    "ce": risk_ce,
    "cde": risk_cde,
    "cde_m1": risk_cde_m1,
    "cde_a1m1": risk_cde_a1m1,
    "total": risk_total,
}


def delta_as(model) -> float:
    return risk_as(model).delta


def delta_sp(model) -> float:
    return risk_sp(model).delta


def delta_ce(model) -> float:
    return risk_ce(model).delta


def delta_cde(model) -> float:
    return risk_cde(model).delta


def delta_cde_m1(model) -> float:
    return risk_cde_m1(model).delta


def delta_cde_a1m1(model) -> float:
    return risk_cde_a1m1(model).delta


def total_effect(model) -> float:
    return risk_total(model).delta


@dataclass(frozen=True)
class EstimandReport:
    delta_as: float
    delta_sp: float
    delta_ce: float
    delta_cde: float
    delta_cde_m1: float
    delta_cde_a1m1: float
    total_effect: float
    # None marks an undefined odds ratio (only in non-strict reports)
    or_as: Optional[float]
    or_sp: Optional[float]
    or_ce: Optional[float]
    or_cde: Optional[float]
    or_cde_m1: Optional[float]
    or_cde_a1m1: Optional[float]
    p_m1: float
    p_y1: float
    risks: Dict[str, RiskPair] = field(default_factory=dict, repr=False)
    source: str = "exact"
    n: Optional[int] = None
    seed: Optional[int] = None
    se: Optional[Dict[str, float]] = None

    def additive(self) -> Dict[str, float]:
        return {f"delta_{k}": getattr(self, f"delta_{k}") for k in ESTIMANDS}

    def odds_ratios(self) -> Dict[str, Optional[float]]:
        return {f"or_{k}": getattr(self, f"or_{k}") for k in ESTIMANDS}


def report_from_risks(risks: Dict[str, RiskPair], p_m1: float, p_y1: float, strict: bool = True, **extra) -> EstimandReport:
    ors = {}
    for k in ESTIMANDS:
        try:
            ors[f"or_{k}"] = odds_ratio(risks[k])
        except UndefinedOddsError as exc:
            if strict:
                raise UndefinedOddsError(f"or_{k}: {exc}") from None
            ors[f"or_{k}"] = None
    return EstimandReport(
        **{f"delta_{k}": risks[k].delta for k in ESTIMANDS},
        total_effect=risks["total"].delta,
        **ors,
        p_m1=p_m1,
        p_y1=p_y1,
        risks=dict(risks),
        **extra,
    )


def report(model, strict: bool = True) -> EstimandReport:
    """Exact report of every estimand on both scales.

    With ``strict=False`` undefined odds ratios become None instead of raising;
    zero-probability conditioning events always raise.
    """
    m = as_model(model)
    risks = {}
    for name, fn in RISKS.items():
        try:
            risks[name] = fn(m)
        except ZeroProbabilityError as exc:
            raise ZeroProbabilityError(exc.event, estimand=name) from None
        except DegenerateModelError as exc:
            raise type(exc)(f"{name}: {exc}") from None
    return report_from_risks(risks, m.joint.prob(m=1), m.joint.prob(y=1), strict=strict)
