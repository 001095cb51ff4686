import math
import os
import sys

import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

from collider_lab.scm import COEFFICIENTS, ScmParams

sys.path.insert(0, os.path.dirname(__file__))

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

LN3 = math.log(3.0)

coef = st.floats(-3.0, 3.0, allow_nan=False)


@st.composite
def scm_params(draw, prevalence=False):
    values = {name: draw(coef) for name in COEFFICIENTS}
    values["nu"] = draw(st.sampled_from([0.0, 1.0]))
    if prevalence:
        values["p_A"] = draw(st.floats(0.05, 0.95))
        values["p_U"] = draw(st.floats(0.05, 0.95))
    return ScmParams(**values)


def random_params(count, seed=20240611):
    """Seeded parameter vectors: coefficients uniform on [-3, 3], nu in {0, 1}."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        coefs = rng.uniform(-3.0, 3.0, len(COEFFICIENTS))
        nu = float(rng.integers(0, 2))
        out.append(ScmParams(**dict(zip(COEFFICIENTS, map(float, coefs))), nu=nu))
    return out


@pytest.fixture
def fig3():
    return ScmParams(alpha_A=2, alpha_U=2, beta_A=2, beta_UM=2, beta_U=3, beta_AM=-2,
                     alpha_AU=1, beta_M=1, beta_AU=1, beta_AUM=1)


@pytest.fixture
def fig2_bottom():
    return ScmParams(alpha_A=1, alpha_U=1, beta_U=1, beta_M=1)


@pytest.fixture
def simple_ln3():
    # p_M(0) = p_Y(m=0) = 1/4 and p_M(1) = p_Y(m=1) = 3/4
    return ScmParams(alpha_A=2 * LN3, beta_M=2 * LN3)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (passed, detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if passed else 'FAIL'}: {detail}")
