"""One-parameter sweeps over the model coefficients, including the figure presets."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from .estimands import EstimandReport, report
from .scm import COEFFICIENTS, DegenerateModelError, InvalidParameterError, ScmParams

FIG2_AXES = ("alpha_A", "alpha_U", "beta_U", "alpha_AU")
FIG3_AXES = ("alpha_AU", "beta_M", "beta_AU", "beta_AUM")
DEFAULT_STEPS = 61

FIG2_BASE = ScmParams(alpha_A=1.0, alpha_U=1.0, beta_U=1.0)
FIG3_BASE = ScmParams(
    alpha_A=2.0,
    alpha_U=2.0,
    beta_A=2.0,
    beta_UM=2.0,
    beta_U=3.0,
    beta_AM=-2.0,
    alpha_AU=1.0,
    beta_M=1.0,
    beta_AU=1.0,
    beta_AUM=1.0,
)

PRESETS = {
    "zero": ScmParams(),
    "fig2-top": FIG2_BASE,
    "fig2-bottom": replace(FIG2_BASE, beta_M=1.0),
    "fig3": FIG3_BASE,
    "fig3-base": FIG3_BASE,
}


@dataclass(frozen=True)
class SweepSpec:
    base: ScmParams
    vary: str
    start: float = -3.0
    stop: float = 3.0
    steps: int = DEFAULT_STEPS
    scales: Tuple[str, ...] = ("additive", "odds_ratio")

    def __post_init__(self):
        if self.vary not in COEFFICIENTS:
            raise InvalidParameterError(f"cannot sweep {self.vary!r}; choose one of {', '.join(COEFFICIENTS)}")
        if not self.start < self.stop:
            raise InvalidParameterError("sweep range needs start < stop")
        if self.steps < 2:
            raise InvalidParameterError("a sweep needs at least 2 steps")
        if not self.scales or not set(self.scales) <= {"additive", "odds_ratio"}:
            raise InvalidParameterError(f"unknown scales {self.scales!r}")

    def grid(self) -> List[float]:
        width = self.stop - self.start
        return [self.start + k * width / (self.steps - 1) for k in range(self.steps)]


@dataclass(frozen=True)
class SweepRow:
    param: str
    param_value: float
    report: Optional[EstimandReport]
    error: Optional[str] = None


def preset_fig2(beta_m: float, vary: str, steps: int = DEFAULT_STEPS) -> SweepSpec:
    """Mediator-only outcome model (every A-containing beta term is 0).

    Defaults are 1 for alpha_A, alpha_U, beta_U and 0 for alpha_AU; ``beta_m``
    selects the top (0) or bottom (1) row.
    """
    if vary not in FIG2_AXES:
        raise InvalidParameterError(f"{vary!r} is not a fig2 axis ({', '.join(FIG2_AXES)})")
    if beta_m not in (0, 1):
        raise InvalidParameterError("fig2 uses beta_M in {0, 1}")
    return SweepSpec(replace(FIG2_BASE, beta_M=float(beta_m)), vary, steps=steps)


def preset_fig3(vary: str, steps: int = DEFAULT_STEPS) -> SweepSpec:
    """Interaction-rich configuration.

    alpha_A = alpha_U = beta_A = beta_UM = 2, beta_U = 3, beta_AM = -2; the
    swept member of (alpha_AU, beta_M, beta_AU, beta_AUM) runs over the grid
    and the other three stay at 1. The figure caption reads
    "alpha_A = alpha_U = 2 = beta_A = beta_UM = 2", taken here as all four
    equal to 2.
    """
    if vary not in FIG3_AXES:
        raise InvalidParameterError(f"{vary!r} is not a fig3 axis ({', '.join(FIG3_AXES)})")
    return SweepSpec(FIG3_BASE, vary, steps=steps)


def preset_spec(preset: str, vary: str, steps: int = DEFAULT_STEPS) -> SweepSpec:
    if preset == "fig2-top":
        return preset_fig2(0, vary, steps)
    if preset == "fig2-bottom":
        return preset_fig2(1, vary, steps)
    if preset in ("fig3", "fig3-base"):
        return preset_fig3(vary, steps)
    raise InvalidParameterError(f"unknown sweep preset {preset!r}")


def _row(spec: SweepSpec, value: float) -> SweepRow:
    params = replace(spec.base, **{spec.vary: value})
    try:
        return SweepRow(spec.vary, value, report(params, strict=False))
    except DegenerateModelError as exc:
        return SweepRow(spec.vary, value, None, str(exc))


def run_sweep(spec: SweepSpec, workers: int = 1) -> List[SweepRow]:
    grid = spec.grid()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda v: _row(spec, v), grid))
    return [_row(spec, v) for v in grid]


def run_panels(preset: str, axes: Optional[Sequence[str]] = None, steps: int = DEFAULT_STEPS):
    """All panels of a figure preset, keyed by swept coefficient."""
    if axes is None:
        axes = FIG3_AXES if preset.startswith("fig3") else FIG2_AXES
    return {axis: run_sweep(preset_spec(preset, axis, steps)) for axis in axes}
