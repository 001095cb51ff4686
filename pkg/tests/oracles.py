"""Independent exact oracle: enumerate counterfactual worlds cell by cell.

The unit square of each disturbance is cut at every threshold the structural
equations can compare it with. Inside a cell every factual and counterfactual
variable is constant, so evaluating the equations at the cell midpoint and
weighting by the cell volume gives the exact joint law of all variables.
Estimands are then computed straight from their definitions as conditional
expectations, sharing no code with the closed forms.
"""

import math


def _sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def mechanisms(params):
    """p_M and p_Y written out from the model definition."""
    q = params
    if q.alpha_0 is None:
        a0 = -(q.alpha_A + q.alpha_U + q.alpha_AU / 2) / 2
        b0 = -(q.beta_A + q.beta_M + q.beta_U + (q.beta_AM + q.beta_AU + q.beta_UM) / 2 + q.beta_AUM / 4 - q.nu) / 2
    else:
        a0, b0 = q.alpha_0, q.beta_0
    pm = {}
    py = {}
    for a in (0, 1):
        for u in (0, 1):
            pm[a, u] = _sigmoid(a0 + q.alpha_A * a + q.alpha_U * u + q.alpha_AU * a * u)
            for m in (0, 1):
                lp = b0 + q.beta_A * a + q.beta_U * u + q.beta_M * m
                lp += q.beta_AU * a * u + q.beta_AM * a * m + q.beta_UM * u * m + q.beta_AUM * a * u * m
                py[a, m, u] = _sigmoid(lp)
    return pm, py


def _cells(cuts):
    pts = sorted(set([0.0, 1.0] + [c for c in cuts if 0.0 < c < 1.0]))
    return [((lo + hi) / 2, hi - lo) for lo, hi in zip(pts, pts[1:])]


def enumerate_worlds(params):
    """List of (probability, world) with world a dict of all variables."""
    pm, py = mechanisms(params)
    out = []
    for a, pa in ((1, params.p_A), (0, 1 - params.p_A)):
        for u, pu in ((1, params.p_U), (0, 1 - params.p_U)):
            for em, wm in _cells([pm[x, u] for x in (0, 1)]):
                for ey, wy in _cells([py[x, k, u] for x in (0, 1) for k in (0, 1)]):
                    m = int(em <= pm[a, u])
                    y = int(ey <= py[a, m, u])
                    m_do = {x: int(em <= pm[x, u]) for x in (0, 1)}
                    y_am = {(x, k): int(ey <= py[x, k, u]) for x in (0, 1) for k in (0, 1)}
                    world = dict(a=a, u=u, m=m, y=y, m_do=m_do, y_am=y_am,
                                 y_a={x: y_am[x, m_do[x]] for x in (0, 1)})
                    out.append((pa * pu * wm * wy, world))
    return out


def expect(worlds, value, given=lambda w: True):
    num = math.fsum(p * value(w) for p, w in worlds if given(w))
    den = math.fsum(p for p, w in worlds if given(w))
    return num / den


def oracle_risks(params):
    """Risk pairs (arm 1, arm 0) of every estimand, from definitions."""
    W = enumerate_worlds(params)
    m1 = lambda w: w["m"] == 1
    r = {}
    r["as"] = tuple(expect(W, lambda w: w["y"], lambda w, a=a: w["a"] == a and w["m"] == 1) for a in (1, 0))
    pu_m1 = {u: expect(W, lambda w, u=u: w["u"] == u, m1) for u in (0, 1)}
    r["sp"] = tuple(
        math.fsum(
            expect(W, lambda w: w["y"], lambda w, a=a, u=u: w["m"] == 1 and w["a"] == a and w["u"] == u) * pu_m1[u]
            for u in (0, 1)
        )
        for a in (1, 0)
    )
    r["ce"] = tuple(expect(W, lambda w, a=a: w["y_a"][a], m1) for a in (1, 0))
    r["cde"] = tuple(expect(W, lambda w, a=a: w["y_am"][a, 1]) for a in (1, 0))
    r["cde_m1"] = tuple(expect(W, lambda w, a=a: w["y_am"][a, 1], m1) for a in (1, 0))
    r["cde_a1m1"] = tuple(
        expect(W, lambda w, a=a: w["y_am"][a, 1], lambda w: w["a"] == 1 and w["m"] == 1) for a in (1, 0)
    )
    r["total"] = tuple(expect(W, lambda w, a=a: w["y_a"][a]) for a in (1, 0))
    r["p_m1"] = expect(W, lambda w: w["m"])
    r["p_y1"] = expect(W, lambda w: w["y"])
    return r
