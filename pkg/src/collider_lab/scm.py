"""Binary four-variable structural causal model A -> M -> Y, U -> (M, Y), A -> Y.

A and U are independent Bernoulli draws; M and Y are threshold indicators of
uniform disturbances against logistic mechanism probabilities::

    p_M(a, u)    = expit(alpha_0 + alpha_A a + alpha_U u + alpha_AU a u)
    p_Y(a, m, u) = expit(beta_0 + beta_A a + beta_U u + beta_M m + beta_AU a u
                         + beta_AM a m + beta_UM u m + beta_AUM a u m)

By default the intercepts are centered so that the linear predictors vanish at
the midpoint of the binary covariates (shifted by ``nu`` for Y).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Optional, Tuple

BINARY = (0, 1)

# the ten free coefficients, in the order used for sweeps and config files
COEFFICIENTS = (
    "alpha_A",
    "alpha_U",
    "alpha_AU",
    "beta_A",
    "beta_U",
    "beta_M",
    "beta_AU",
    "beta_AM",
    "beta_UM",
    "beta_AUM",
)


class InvalidParameterError(ValueError):
    pass


class DegenerateModelError(ArithmeticError):
    """A quantity is undefined for the given parameters."""


class ZeroProbabilityError(DegenerateModelError):
    def __init__(self, event: str, estimand: Optional[str] = None):
        msg = f"conditioning event {{{event}}} has probability zero"
        super().__init__(f"{estimand}: {msg}" if estimand else msg)
        self.event = event
        self.estimand = estimand


class UndefinedOddsError(DegenerateModelError):
    pass


def expit(x: float) -> float:
    """Logistic sigmoid 1 / (1 + exp(-x))."""
    if not math.isfinite(x):
        raise ValueError(f"expit requires a finite input, got {x!r}")
    # branch keeps exp() from overflowing for large |x|
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@dataclass(frozen=True)
class ScmParams:
    """Full parameter vector of the generative model.

    Leaving ``alpha_0`` and ``beta_0`` unset selects centered intercepts; setting
    both pins them explicitly (``nu`` is then ignored).
    """

    p_A: float = 0.5
    p_U: float = 0.5
    alpha_A: float = 0.0
    alpha_U: float = 0.0
    alpha_AU: float = 0.0
    beta_A: float = 0.0
    beta_U: float = 0.0
    beta_M: float = 0.0
    beta_AU: float = 0.0
    beta_AM: float = 0.0
    beta_UM: float = 0.0
    beta_AUM: float = 0.0
    nu: float = 0.0
    alpha_0: Optional[float] = None
    beta_0: Optional[float] = None

    def __post_init__(self):
        for name in ("p_A", "p_U"):
            p = getattr(self, name)
            if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
                raise InvalidParameterError(f"{name} must lie strictly inside (0, 1), got {p!r}")
        for name in COEFFICIENTS + ("nu",):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.nu < 0:
            raise InvalidParameterError(f"nu must be >= 0, got {self.nu!r}")
        if (self.alpha_0 is None) != (self.beta_0 is None):
            raise InvalidParameterError("explicit intercepts need both alpha_0 and beta_0")
        if self.alpha_0 is not None and not (
            math.isfinite(self.alpha_0) and math.isfinite(self.beta_0)
        ):
            raise InvalidParameterError("explicit intercepts must be finite")

    @property
    def centered(self) -> bool:
        return self.alpha_0 is None

    def with_values(self, **changes) -> "ScmParams":
        return replace(self, **changes)

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


PARAM_NAMES = tuple(f.name for f in fields(ScmParams))


def resolve_intercepts(params: ScmParams) -> Tuple[float, float]:
    """Centered intercepts (alpha_0, beta_0)."""
    if not params.centered:
        raise InvalidParameterError("resolve_intercepts applies to centered parameters only")
    p = params
    alpha_0 = -0.5 * (p.alpha_A + p.alpha_U + 0.5 * p.alpha_AU)
    beta_0 = -0.5 * (
        p.beta_A
        + p.beta_M
        + p.beta_U
        + 0.5 * (p.beta_AM + p.beta_AU + p.beta_UM)
        + 0.25 * p.beta_AUM
        - p.nu
    )
    return alpha_0, beta_0


def _intercepts(params: ScmParams) -> Tuple[float, float]:
    if params.centered:
        return resolve_intercepts(params)
    return params.alpha_0, params.beta_0


def linear_predictor_m(params: ScmParams, a: float, u: float) -> float:
    alpha_0, _ = _intercepts(params)
    p = params
    return alpha_0 + p.alpha_A * a + p.alpha_U * u + p.alpha_AU * a * u


def linear_predictor_y(params: ScmParams, a: float, m: float, u: float) -> float:
    # covariates may be non-binary here (the centering check evaluates at 1/2)
    _, beta_0 = _intercepts(params)
    p = params
    return (
        beta_0
        + p.beta_A * a
        + p.beta_U * u
        + p.beta_M * m
        + p.beta_AU * a * u
        + p.beta_AM * a * m
        + p.beta_UM * u * m
        + p.beta_AUM * a * u * m
    )


@dataclass(frozen=True)
class MechanismTables:
    p_m: Dict[Tuple[int, int], float]
    p_y: Dict[Tuple[int, int, int], float]
    alpha_0: float
    beta_0: float


def build_mechanisms(params: ScmParams) -> MechanismTables:
    alpha_0, beta_0 = _intercepts(params)
    p_m = {(a, u): expit(linear_predictor_m(params, a, u)) for a in BINARY for u in BINARY}
    p_y = {
        (a, m, u): expit(linear_predictor_y(params, a, m, u))
        for a in BINARY
        for m in BINARY
        for u in BINARY
    }
    return MechanismTables(p_m=p_m, p_y=p_y, alpha_0=alpha_0, beta_0=beta_0)


def _bern(p: float, x: int) -> float:
    return p if x else 1.0 - p


@dataclass(frozen=True)
class JointTable:
    """Exact factual law of (A, U, M, Y) as 16 cells keyed by (a, u, m, y)."""

    cells: Dict[Tuple[int, int, int, int], float]

    def prob(self, a=None, u=None, m=None, y=None) -> float:
        """Probability of the event fixing any subset of the four variables."""
        want = (a, u, m, y)
        return math.fsum(
            p
            for key, p in self.cells.items()
            if all(w is None or w == k for w, k in zip(want, key))
        )

    def conditional(self, target: dict, given: dict) -> float:
        """P(target | given); both are keyword dicts over a, u, m, y."""
        denom = self.prob(**given)
        if denom <= 0.0:
            raise ZeroProbabilityError(_event_name(given))
        overlap = dict(given)
        for k, v in target.items():
            if k in overlap and overlap[k] != v:
                return 0.0
            overlap[k] = v
        return self.prob(**overlap) / denom


def _event_name(event: dict) -> str:
    if not event:
        return "everything"
    return ", ".join(f"{k.upper()}={v}" for k, v in event.items())


def joint_factual(tables: MechanismTables, p_A: float, p_U: float) -> JointTable:
    if not (0.0 <= p_A <= 1.0 and 0.0 <= p_U <= 1.0):
        raise InvalidParameterError("prevalences must lie in [0, 1]")
    cells = {}
    for a, u, m, y in itertools.product(BINARY, repeat=4):
        cells[(a, u, m, y)] = (
            _bern(p_A, a)
            * _bern(p_U, u)
            * _bern(tables.p_m[(a, u)], m)
            * _bern(tables.p_y[(a, m, u)], y)
        )
    return JointTable(cells)


def condition_u(joint: JointTable, a: Optional[int] = None, m: Optional[int] = None) -> Tuple[float, float]:
    """(P(U=0 | given), P(U=1 | given)) for the event {A=a, M=m}; None leaves a variable free."""
    given = {k: v for k, v in (("a", a), ("m", m)) if v is not None}
    denom = joint.prob(**given)
    if denom <= 0.0:
        raise ZeroProbabilityError(_event_name(given))
    p1 = joint.prob(u=1, **given) / denom
    p0 = joint.prob(u=0, **given) / denom
    return p0, p1


@dataclass(frozen=True)
class Model:
    """Parameters bundled with their mechanism tables and factual joint law."""

    params: ScmParams
    tables: MechanismTables = field(repr=False)
    joint: JointTable = field(repr=False)

    @classmethod
    def from_params(cls, params: ScmParams) -> "Model":
        tables = build_mechanisms(params)
        return cls(params, tables, joint_factual(tables, params.p_A, params.p_U))

    @property
    def p_u(self) -> Tuple[float, float]:
        return 1.0 - self.params.p_U, self.params.p_U

    @property
    def p_a(self) -> Tuple[float, float]:
        return 1.0 - self.params.p_A, self.params.p_A


def as_model(model) -> Model:
    if isinstance(model, Model):
        return model
    if isinstance(model, ScmParams):
        return Model.from_params(model)
    raise TypeError(f"expected Model or ScmParams, got {type(model).__name__}")
