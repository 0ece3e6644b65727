"""The compiled and pure-Python kernels must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from ewg import kernels

BACKENDS = kernels.available_backends()
needs_both = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_backend_reported():
    assert kernels.BACKEND in BACKENDS


def test_pure_python_forced_by_environment():
    env = dict(os.environ, EWG_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import ewg; print(ewg.BACKEND)"], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_both
@given(st.floats(0.05, 60.0), st.floats(0.0, 120.0))
def test_incomplete_gamma_parity(s, t):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    assert_allclose(cy.upper_gamma(s, t), py.upper_gamma(s, t), rtol=1e-14, atol=1e-300)
    assert_allclose(cy.lower_gamma(s, t), py.lower_gamma(s, t), rtol=1e-14, atol=1e-300)


@needs_both
@given(st.floats(-3.0, 40.0), st.floats(0.5, 4.0))
def test_binomial_head_parity(a, power):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    args = (a, 1.0, power, 0, 5000, 1.0, 0.0, 1e-12, 1e-300, 3)
    r_py, r_cy = py.binom_power_head(*args), cy.binom_power_head(*args)
    assert r_py[2:] == pytest.approx(r_cy[2:], rel=1e-13)
    # alternating sums: compare against the absolute-value partial
    assert_allclose(r_cy[0], r_py[0], rtol=0, atol=1e-13 * r_py[1])
    assert_allclose(r_cy[1], r_py[1], rtol=1e-13)
    gargs = (a, power, 0.3, 0, 5000, 1.0, 0.0, 1e-12, 1e-300, 3)
    g_py, g_cy = py.binom_gamma_head(*gargs), cy.binom_gamma_head(*gargs)
    assert g_py[2:] == pytest.approx(g_cy[2:], rel=1e-13)
    assert_allclose(g_cy[0], g_py[0], rtol=0, atol=1e-13 * g_py[1])


@needs_both
@given(st.floats(0.2, 6), st.floats(0.2, 4), st.floats(0.3, 4), st.floats(0, 0.97),
       st.integers(0, 2**31))
def test_loglik_score_parity(a, b, g, th, seed):
    y = np.random.default_rng(seed).weibull(g, 200) / b + 1e-9
    r_py = np.array(BACKENDS["python"].loglik_score(a, b, g, th, y))
    r_cy = np.array(BACKENDS["cython"].loglik_score(a, b, g, th, y))
    assert_allclose(r_cy, r_py, rtol=1e-11, atol=1e-9)
