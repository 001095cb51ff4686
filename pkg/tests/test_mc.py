import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collider_lab import mc
from collider_lab.estimands import report
from collider_lab.scm import Model, ScmParams

from conftest import LN3, scm_params

unit = st.floats(0.0, 1.0)


def within(value, target, se, k=4.0):
    return abs(value - target) <= k * se + 1e-12


def test_world_single_threshold():
    # every p_M equals 3/4 and eps_M = 0.3 lies below it
    p = ScmParams(alpha_0=LN3, beta_0=0.0)
    w = mc.world_from_disturbances(p, 0.2, 0.9, 0.3, 0.5)
    assert w.m == w.m_do[0] == w.m_do[1] == 1


def test_world_zero_model():
    w = mc.world_from_disturbances(ScmParams(), 0.4, 0.6, 0.5, 0.49)
    assert (w.a, w.u, w.m, w.y) == (1, 0, 1, 1)


@given(scm_params(prevalence=True), unit, unit, unit, unit)
def test_world_invariants(params, ea, eu, em, ey):
    m = Model.from_params(params)
    w = mc.world_from_disturbances(m, ea, eu, em, ey)
    pm, py = m.tables.p_m, m.tables.p_y
    assert w.a == int(ea <= params.p_A) and w.u == int(eu <= params.p_U)
    assert w.m == int(em <= pm[(w.a, w.u)])
    assert w.y == int(ey <= py[(w.a, w.m, w.u)])
    for x in (0, 1):
        assert w.m_do[x] == int(em <= pm[(x, w.u)])
        for k in (0, 1):
            assert w.y_do_am[(x, k)] == int(ey <= py[(x, k, w.u)])
        assert w.y_do_a[x] == w.y_do_am[(x, w.m_do[x])]
    assert w.m_do[w.a] == w.m and w.y_do_a[w.a] == w.y


def test_sample_world_matches_batch_columns():
    m = Model.from_params(ScmParams(alpha_A=1.5, alpha_U=-1, beta_M=2, beta_AU=1))
    batch = mc.sample_worlds(m, 500, mc.batch_rng(3, 0))
    for i in range(500):
        w = mc.world_from_disturbances(m, *batch.eps[:, i])
        assert (w.a, w.u, w.m, w.y) == (batch.a[i], batch.u[i], batch.m[i], batch.y[i])
        assert w.y_do_a == {0: batch.y_do_a[0, i], 1: batch.y_do_a[1, i]}
    w = mc.sample_world(m, np.random.default_rng(0))
    assert w.m_do[w.a] == w.m


def test_mediator_counterfactual_prevalence(simple_ln3):
    b = mc.sample_worlds(simple_ln3, 200_000, mc.batch_rng(11, 0))
    frac = b.m_do[1].mean()
    assert within(frac, 0.75, math.sqrt(0.75 * 0.25 / 200_000))


def test_estimate_report_zero_model():
    rep = mc.estimate_report(ScmParams(), 10**6, seed=1)
    for key, value in rep.additive().items():
        assert within(value, 0.0, rep.se[key]), key
    assert within(rep.total_effect, 0.0, rep.se["total_effect"])
    for k in ("as", "sp", "ce", "cde", "cde_m1", "cde_a1m1"):
        assert within(math.log(getattr(rep, f"or_{k}")), 0.0, rep.se[f"log_or_{k}"])
    assert rep.source == "monte_carlo" and rep.n == 10**6 and rep.seed == 1


def test_estimate_report_worked_case(simple_ln3):
    rep = mc.estimate_report(simple_ln3, 10**6, seed=2)
    assert within(rep.delta_ce, 0.25, rep.se["delta_ce"])


def test_estimate_report_fig2_top_or_ce():
    rep = mc.estimate_report(ScmParams(alpha_A=1, alpha_U=1, beta_U=1), 10**6, seed=3)
    assert within(math.log(rep.or_ce), 0.0, rep.se["log_or_ce"])


@pytest.mark.slow
def test_fig2_bottom_prevalences_and_association(fig2_bottom):
    n = 10**7
    exact = report(fig2_bottom)
    rep = mc.estimate_report(fig2_bottom, n, seed=4, workers=4)
    assert within(rep.p_m1, exact.p_m1, math.sqrt(exact.p_m1 * (1 - exact.p_m1) / n))
    assert within(rep.p_y1, exact.p_y1, math.sqrt(exact.p_y1 * (1 - exact.p_y1) / n))
    strong = fig2_bottom.with_values(alpha_A=3.0)
    rep = mc.estimate_report(strong, n, seed=5, workers=4)
    exact = report(strong)
    assert rep.or_as < 1
    assert within(rep.delta_as, exact.delta_as, rep.se["delta_as"])


def test_fig3_oracle_agreement(fig3):
    rows = mc.compare(report(fig3), mc.estimate_report(fig3, 10**6, seed=6))
    assert all(r["ok"] for r in rows.values()), {k: r["z"] for k, r in rows.items()}


def test_single_estimate(fig3):
    e = mc.estimate(fig3, "cde_a1m1", 100_000, seed=9)
    assert 0 < e.n_effective < 100_000
    assert within(e.value, report(fig3).delta_cde_a1m1, e.se)


def test_minimum_n():
    with pytest.raises(ValueError):
        mc.estimate_report(ScmParams(), 9_999, seed=0)


def test_subset_too_small():
    p = ScmParams(alpha_0=-12.0, beta_0=0.0)
    with pytest.raises(mc.SubsetTooSmallError) as info:
        mc.estimate_report(p, 10_000, seed=0)
    assert info.value.subset == "A=1,M=1"


def test_deterministic_and_worker_independent(fig3):
    n = 3 * mc.BATCH_SIZE + 12_345
    a = mc.estimate_report(fig3, n, seed=77)
    b = mc.estimate_report(fig3, n, seed=77)
    c = mc.estimate_report(fig3, n, seed=77, workers=3)
    assert a == b == c
    assert mc.estimate_report(fig3, n, seed=78) != a


def test_compare_zero_se_floor():
    exact = report(ScmParams())
    rows = mc.compare(exact, mc.estimate_report(ScmParams(), 20_000, seed=0))
    assert rows["delta_cde"]["se"] == 0.0 and rows["delta_cde"]["ok"]


def test_event_sets_no_exposure_effect():
    ev = mc.event_set_divergence(ScmParams(alpha_U=1.0), 200_000, seed=1)
    assert ev.p_m_factual == ev.p_m_do0 == ev.p_m_do1
    assert ev.overlap == {"M~M0": 1.0, "M~M1": 1.0, "M0~M1": 1.0}


def test_event_sets_simple_model(simple_ln3):
    n = 10**6
    ev = mc.event_set_divergence(simple_ln3, n, seed=2)
    assert within(ev.p_m_do0, 0.25, ev.se["M0"])
    assert within(ev.p_m_do1, 0.75, ev.se["M1"])
    assert within(ev.p_m_factual, 0.5, ev.se["M"])
    # {M^{A=0}=1} is strictly inside {M^{A=1}=1}: overlap 1/4 over 3/4
    assert within(ev.overlap["M0~M1"], 1 / 3, 0.002)
    assert ev.comonotone_fraction == 1.0


@settings(max_examples=10)
@given(scm_params())
def test_comonotone_coupling(params):
    p = params.with_values(alpha_A=abs(params.alpha_A), alpha_AU=abs(params.alpha_AU))
    assert mc.event_set_divergence(p, 10_000, seed=0).comonotone_fraction == 1.0


def test_sample_invariants_simple_model():
    inv = mc.sample_invariants(ScmParams(alpha_A=2.0, beta_M=2.0), 200_000, seed=5)
    assert inv.consistency_fraction == 1.0
    assert inv.tower_gap <= 1e-12
