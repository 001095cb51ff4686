"""Monte Carlo oracle: sample the structural equations with shared disturbances.

Every factual and counterfactual variable of a unit is computed from the same
four uniforms, so contrasts between counterfactual arms are paired per sample.
Sampling runs in fixed-size batches, each with its own Philox substream keyed
by ``(seed, batch_index)``; the batches only contribute integer counts, so the
result does not depend on how many workers evaluate them.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict

import numpy as np

from .estimands import ESTIMANDS, RiskPair, report_from_risks
from .scm import BINARY, DegenerateModelError, Model, as_model

BATCH_SIZE = 1 << 17
MIN_N = 10_000
# conditional estimates on fewer samples than this are refused
MIN_SUBSET = 100


class SubsetTooSmallError(DegenerateModelError):
    def __init__(self, subset: str, size: int):
        super().__init__(f"subset {{{subset}}} has only {size} samples (< {MIN_SUBSET})")
        self.subset = subset
        self.size = size


def batch_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


@dataclass(frozen=True)
class WorldSample:
    eps_a: float
    eps_u: float
    eps_m: float
    eps_y: float
    a: int
    u: int
    m: int
    y: int
    m_do: Dict[int, int]
    y_do_a: Dict[int, int]
    y_do_am: Dict[tuple, int]


def world_from_disturbances(model, eps_a, eps_u, eps_m, eps_y) -> WorldSample:
    """Evaluate every factual and counterfactual variable for one disturbance draw."""
    mdl = as_model(model)
    pm, py = mdl.tables.p_m, mdl.tables.p_y
    a = int(eps_a <= mdl.params.p_A)
    u = int(eps_u <= mdl.params.p_U)
    m = int(eps_m <= pm[(a, u)])
    y = int(eps_y <= py[(a, m, u)])
    m_do = {x: int(eps_m <= pm[(x, u)]) for x in BINARY}
    y_do_am = {(x, k): int(eps_y <= py[(x, k, u)]) for x in BINARY for k in BINARY}
    y_do_a = {x: y_do_am[(x, m_do[x])] for x in BINARY}
    return WorldSample(eps_a, eps_u, eps_m, eps_y, a, u, m, y, m_do, y_do_a, y_do_am)


def sample_world(model, rng: np.random.Generator) -> WorldSample:
    eps = rng.random(4)
    return world_from_disturbances(model, *map(float, eps))


@dataclass
class WorldBatch:
    """Column-oriented batch of worlds; counterfactual arrays are indexed by arm."""

    eps: np.ndarray
    a: np.ndarray
    u: np.ndarray
    m: np.ndarray
    y: np.ndarray
    m_do: np.ndarray  # (2, n): M^{A=a'}
    y_do_a: np.ndarray  # (2, n): Y^{A=a'}
    y_do_am: np.ndarray  # (2, 2, n): Y^{a',m'}

    def __len__(self):
        return self.a.shape[0]


def _tables(mdl: Model):
    pm = np.array([[mdl.tables.p_m[(a, u)] for u in BINARY] for a in BINARY])
    py = np.array(
        [[[mdl.tables.p_y[(a, m, u)] for u in BINARY] for m in BINARY] for a in BINARY]
    )
    return pm, py


def sample_worlds(model, n: int, rng: np.random.Generator) -> WorldBatch:
    mdl = as_model(model)
    pm, py = _tables(mdl)
    eps = rng.random((4, n))
    eps_a, eps_u, eps_m, eps_y = eps
    a = (eps_a <= mdl.params.p_A).astype(np.int8)
    u = (eps_u <= mdl.params.p_U).astype(np.int8)
    # factual equations evaluated directly, not by selecting counterfactuals
    m = (eps_m <= pm[a, u]).astype(np.int8)
    y = (eps_y <= py[a, m, u]).astype(np.int8)
    m_do = np.stack([(eps_m <= pm[x, u]) for x in BINARY]).astype(np.int8)
    y_do_am = np.stack(
        [np.stack([(eps_y <= py[x, k, u]) for k in BINARY]) for x in BINARY]
    ).astype(np.int8)
    y_do_a = np.stack([np.where(m_do[x] == 1, y_do_am[x, 1], y_do_am[x, 0]) for x in BINARY])
    return WorldBatch(eps, a, u, m, y, m_do, y_do_a, y_do_am)


# subsets over which paired counterfactual contrasts are tallied
_PAIRED = {
    "ce": ("M=1", "do_a"),
    "cde": ("all", "do_am"),
    "cde_m1": ("M=1", "do_am"),
    "cde_a1m1": ("A=1,M=1", "do_am"),
    "total": ("all", "do_a"),
}


def tally(batch: WorldBatch) -> Counter:
    """Integer sufficient statistics of one batch."""
    c = Counter()
    a, u, m, y = batch.a, batch.u, batch.m, batch.y
    c["n"] += len(batch)
    c["m1"] += int(m.sum())
    c["y1"] += int(y.sum())
    for x in BINARY:
        arm = (a == x) & (m == 1)
        c[f"as_n{x}"] += int(arm.sum())
        c[f"as_y{x}"] += int(y[arm].sum())
        for k in BINARY:
            cell = arm & (u == k)
            c[f"sp_n{x}{k}"] += int(cell.sum())
            c[f"sp_y{x}{k}"] += int(y[cell].sum())
    c["m1_u1"] += int(((m == 1) & (u == 1)).sum())
    subsets = {"all": slice(None), "M=1": m == 1, "A=1,M=1": (a == 1) & (m == 1)}
    pairs = {"do_a": (batch.y_do_a[1], batch.y_do_a[0]), "do_am": (batch.y_do_am[1, 1], batch.y_do_am[0, 1])}
    for sub, mask in subsets.items():
        c[f"n[{sub}]"] += int(np.count_nonzero(mask)) if sub != "all" else len(batch)
        for pname, (y1, y0) in pairs.items():
            s1, s0 = y1[mask], y0[mask]
            c[f"{pname}[{sub}]1"] += int(s1.sum())
            c[f"{pname}[{sub}]0"] += int(s0.sum())
            c[f"{pname}[{sub}]10"] += int((s1 & s0).sum())
    return c


def collect(model, n: int, seed: int, workers: int = 1) -> Counter:
    mdl = as_model(model)
    sizes = [BATCH_SIZE] * (n // BATCH_SIZE)
    if n % BATCH_SIZE:
        sizes.append(n % BATCH_SIZE)

    def run(item):
        index, size = item
        return tally(sample_worlds(mdl, size, batch_rng(seed, index)))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, enumerate(sizes)))
    else:
        parts = [run(item) for item in enumerate(sizes)]
    total = Counter()
    for part in parts:
        total.update(part)
    return total


@dataclass(frozen=True)
class McEstimate:
    value: float
    se: float
    n_effective: int


def _need(c: Counter, key: str, label: str) -> int:
    size = c[key]
    if size < MIN_SUBSET:
        raise SubsetTooSmallError(label, size)
    return size


def _paired(c: Counter, sub: str, pname: str):
    """Risk pair, its variances and covariance from paired per-sample indicators."""
    n = _need(c, f"n[{sub}]", sub)
    r1 = c[f"{pname}[{sub}]1"] / n
    r0 = c[f"{pname}[{sub}]0"] / n
    r10 = c[f"{pname}[{sub}]10"] / n
    return RiskPair(r1, r0), r1 * (1 - r1) / n, r0 * (1 - r0) / n, (r10 - r1 * r0) / n, n


def _estimates(c: Counter):
    """Per-estimand (pair, var1, var0, cov, n_effective)."""
    out = {}
    # association: disjoint factual arms, independent
    n1 = _need(c, "as_n1", "A=1,M=1")
    n0 = _need(c, "as_n0", "A=0,M=1")
    r1, r0 = c["as_y1"] / n1, c["as_y0"] / n0
    out["as"] = (RiskPair(r1, r0), r1 * (1 - r1) / n1, r0 * (1 - r0) / n0, 0.0, n1 + n0)

    # factual plug-in of the stratified contrast; delta method over strata and U|M=1
    n_m1 = _need(c, "m1", "M=1")
    w1 = c["m1_u1"] / n_m1
    w = (1 - w1, w1)
    var_w1 = w1 * (1 - w1) / n_m1
    strata, risks, var = {}, {}, {}
    for x in BINARY:
        for k in BINARY:
            nk = _need(c, f"sp_n{x}{k}", f"A={x},M=1,U={k}")
            p = c[f"sp_y{x}{k}"] / nk
            strata[(x, k)] = (p, p * (1 - p) / nk)
        risks[x] = w[0] * strata[(x, 0)][0] + w[1] * strata[(x, 1)][0]
        slope = strata[(x, 1)][0] - strata[(x, 0)][0]
        var[x] = w[0] ** 2 * strata[(x, 0)][1] + w[1] ** 2 * strata[(x, 1)][1] + slope**2 * var_w1
    cov = (strata[(1, 1)][0] - strata[(1, 0)][0]) * (strata[(0, 1)][0] - strata[(0, 0)][0]) * var_w1
    out["sp"] = (RiskPair(risks[1], risks[0]), var[1], var[0], cov, n_m1)

    for name, (sub, pname) in _PAIRED.items():
        out[name] = _paired(c, sub, pname)
    return out


def estimate_report(model, n: int, seed: int, workers: int = 1, strict: bool = True):
    """Monte Carlo EstimandReport with standard errors.

    ``se`` holds the standard error of every ``delta_*`` (and ``total_effect``)
    and of every log odds ratio under the key ``log_or_*``.
    """
    if n < MIN_N:
        raise ValueError(f"n must be at least {MIN_N}, got {n}")
    c = collect(model, n, seed, workers)
    est = _estimates(c)
    se = {}
    for name, (pair, v1, v0, cov, _) in est.items():
        key = "total_effect" if name == "total" else f"delta_{name}"
        se[key] = math.sqrt(max(v1 + v0 - 2 * cov, 0.0))
        if name == "total":
            continue
        r1, r0 = pair.risk1, pair.risk0
        if 0 < r1 < 1 and 0 < r0 < 1:
            g1, g0 = 1 / (r1 * (1 - r1)), 1 / (r0 * (1 - r0))
            se[f"log_or_{name}"] = math.sqrt(max(g1 * g1 * v1 + g0 * g0 * v0 - 2 * g1 * g0 * cov, 0.0))
    risks = {name: v[0] for name, v in est.items()}
    return report_from_risks(
        risks,
        c["m1"] / c["n"],
        c["y1"] / c["n"],
        strict=strict,
        source="monte_carlo",
        n=n,
        seed=seed,
        se=se,
    )


def estimate(model, name: str, n: int, seed: int) -> McEstimate:
    """Single additive estimand with its standard error and effective sample size."""
    est = _estimates(collect(model, n, seed))
    pair, v1, v0, cov, n_eff = est[name]
    return McEstimate(pair.delta, math.sqrt(max(v1 + v0 - 2 * cov, 0.0)), n_eff)


@dataclass(frozen=True)
class EventSets:
    p_m_factual: float
    p_m_do0: float
    p_m_do1: float
    se: Dict[str, float]
    # Jaccard overlap |S ∩ T| / |S ∪ T| of the event sets
    overlap: Dict[str, float]
    comonotone_fraction: float


def event_set_divergence(model, n: int, seed: int) -> EventSets:
    """Compare the random sets {M=1}, {M^{A=0}=1} and {M^{A=1}=1} on shared draws."""
    if n < MIN_N:
        raise ValueError(f"n must be at least {MIN_N}, got {n}")
    mdl = as_model(model)
    c = Counter()
    sizes = [BATCH_SIZE] * (n // BATCH_SIZE) + ([n % BATCH_SIZE] if n % BATCH_SIZE else [])
    for index, size in enumerate(sizes):
        b = sample_worlds(mdl, size, batch_rng(seed, index))
        sets = {"M": b.m == 1, "M0": b.m_do[0] == 1, "M1": b.m_do[1] == 1}
        for k, s in sets.items():
            c[k] += int(s.sum())
        for s, t in (("M", "M0"), ("M", "M1"), ("M0", "M1")):
            c[f"{s}&{t}"] += int((sets[s] & sets[t]).sum())
            c[f"{s}|{t}"] += int((sets[s] | sets[t]).sum())
        c["mono"] += int((b.m_do[1] >= b.m_do[0]).sum())
    probs = {k: c[k] / n for k in ("M", "M0", "M1")}
    overlap = {
        f"{s}~{t}": (c[f"{s}&{t}"] / c[f"{s}|{t}"] if c[f"{s}|{t}"] else 1.0)
        for s, t in (("M", "M0"), ("M", "M1"), ("M0", "M1"))
    }
    se = {k: math.sqrt(p * (1 - p) / n) for k, p in probs.items()}
    return EventSets(probs["M"], probs["M0"], probs["M1"], se, overlap, c["mono"] / n)


@dataclass(frozen=True)
class SampleInvariants:
    n: int
    consistency_fraction: float
    # max |mean(Y^{A=a}) - sum_m mean(Y^{A=a} | M=m) P(M=m)| over a
    tower_gap: float
    # per arm a: (P(Y^{A=a}=1 | M=1), P(Y=1 | A=a, M=1), P(Y^{A=a}=1 | M^{A=a}=1)) with SEs
    cross_world: Dict[int, Dict[str, McEstimate]]


def _prop(x: np.ndarray) -> McEstimate:
    n = x.shape[0]
    p = float(x.mean())
    return McEstimate(p, math.sqrt(p * (1 - p) / n), n)


def sample_invariants(model, n: int, seed: int) -> SampleInvariants:
    """Consistency, tower-rule and cross-world conditioning checks on one sample of size n."""
    b = sample_worlds(model, n, batch_rng(seed, 0))
    ok = np.ones(n, dtype=bool)
    for x in BINARY:
        factual = b.a == x
        ok &= ~factual | ((b.m_do[x] == b.m) & (b.y_do_a[x] == b.y))
    gap = 0.0
    cross = {}
    for x in BINARY:
        ya = b.y_do_a[x]
        mixture = sum(ya[b.m == k].mean() * np.mean(b.m == k) for k in BINARY if np.any(b.m == k))
        gap = max(gap, abs(float(ya.mean()) - float(mixture)))
        cross[x] = {
            "cf_given_m": _prop(ya[b.m == 1]),
            "factual": _prop(b.y[(b.a == x) & (b.m == 1)]),
            "cf_given_m_cf": _prop(ya[b.m_do[x] == 1]),
        }
    return SampleInvariants(n, float(ok.mean()), gap, cross)


def compare(exact, mc, tol_se: float = 4.0, floor: float = 1e-12) -> Dict[str, dict]:
    """Per-field agreement of an exact report with a Monte Carlo one.

    Odds ratios are compared on the log scale. ``floor`` absorbs the case where
    a paired contrast is identically zero on every sample (SE exactly 0).
    """
    rows = {}
    keys = [f"delta_{k}" for k in ESTIMANDS] + ["total_effect"]
    for key in keys:
        e, m, s = getattr(exact, key), getattr(mc, key), mc.se[key]
        rows[key] = _row(e, m, s, tol_se, floor)
    for k in ESTIMANDS:
        e, m = getattr(exact, f"or_{k}"), getattr(mc, f"or_{k}")
        s = mc.se.get(f"log_or_{k}")
        if e is None or m is None or s is None:
            rows[f"or_{k}"] = {"exact": e, "mc": m, "se": s, "z": math.nan, "ok": False}
            continue
        row = _row(math.log(e), math.log(m), s, tol_se, floor)
        row.update(exact=e, mc=m)
        rows[f"or_{k}"] = row
    return rows


def _row(e, m, s, tol_se, floor):
    diff = abs(m - e)
    z = diff / s if s > 0 else (0.0 if diff <= floor else math.inf)
    return {"exact": e, "mc": m, "se": s, "z": z, "ok": diff <= tol_se * s + floor}
