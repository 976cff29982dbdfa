import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from cddiso.model_density import (DegenerateRegimeError, ModelParams, SupportInterval,
                                  check_ode_residual, eval_j, log_derivative_j, log_eval_j,
                                  support_j)

finite_m = st.floats(min_value=0.2, max_value=30.0)
any_m = st.one_of(finite_m, st.just(math.inf))
small = st.floats(min_value=-3.0, max_value=3.0)


def test_normalization_at_origin():
    for H, rho, m in [(0.0, 1.0, 1.0), (2.0, -1.0, 3.5), (-1.5, 0.0, 2.0), (0.3, 2.0, math.inf)]:
        assert eval_j(ModelParams(H, rho, m), 0.0) == 1.0


def test_constant_branch():
    assert eval_j(ModelParams(0.0, 0.0, 5.0), 3.7) == 1.0


def test_exponential_identity():
    assert eval_j(ModelParams(1.0, -1.0, 1.0), 2.0) == pytest.approx(math.e**2, rel=1e-14)


def test_cosine_branch():
    p = ModelParams(0.0, 1.0, 1.0)
    assert eval_j(p, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert eval_j(p, math.pi / 4) == pytest.approx(math.cos(math.pi / 4), rel=1e-14)


def test_cosine_branch_matches_ode_integration():
    # integrate y'' = -delta y, y(0) = 1, y'(0) = H/m with RK4 and compare y^m
    H, rho, m = 0.4, 1.0, 1.0
    delta = rho / m
    y, dy, h = 1.0, H / m, 1e-4
    for _ in range(int(round(0.8 / h))):
        def acc(state):
            return np.array([state[1], -delta * state[0]])
        s = np.array([y, dy])
        k1 = acc(s)
        k2 = acc(s + 0.5 * h * k1)
        k3 = acc(s + 0.5 * h * k2)
        k4 = acc(s + h * k3)
        y, dy = s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert eval_j(ModelParams(H, rho, m), 0.8) == pytest.approx(y**m, rel=1e-10)


def test_vectorized_matches_scalar():
    p = ModelParams(0.8, -0.7, 2.5)
    ts = np.linspace(-3, 3, 11)
    assert np.allclose(eval_j(p, ts), [eval_j(p, float(t)) for t in ts], rtol=0, atol=0)


def test_m_zero_indicators():
    assert eval_j(ModelParams(3.0, 1.0, 0.0), 0.0) == 1.0
    assert eval_j(ModelParams(3.0, 1.0, 0.0), 0.1) == 0.0
    assert eval_j(ModelParams(2.0, -1.0, 0.0), 0.5) == 1.0
    assert eval_j(ModelParams(2.0, -1.0, 0.0), -0.5) == 0.0
    with pytest.raises(DegenerateRegimeError):
        support_j(ModelParams(1.0, 1.0, 0.0))


def test_support_examples():
    s = support_j(ModelParams(0.0, 1.0, 1.0))
    assert s.lo == pytest.approx(-math.pi / 2) and s.hi == pytest.approx(math.pi / 2)
    s = support_j(ModelParams(2.0, 0.0, 1.0))
    assert s.lo == pytest.approx(-0.5) and s.hi == math.inf
    s = support_j(ModelParams(3.0, -1.0, 1.0))
    root = brentq(lambda t: math.cosh(t) + 3 * math.sinh(t), -1.0, 0.0, xtol=1e-15)
    assert s.hi == math.inf
    assert s.lo == pytest.approx(root, abs=1e-13)
    assert s.lo == pytest.approx(-math.atanh(1 / 3), abs=1e-14)
    assert support_j(ModelParams(0.5, -1.0, 1.0)) == SupportInterval(-math.inf, math.inf)
    assert support_j(ModelParams(5.0, 2.0, math.inf)) == SupportInterval(-math.inf, math.inf)


@given(st.floats(min_value=-20, max_value=20), st.floats(min_value=0.01, max_value=5.0), finite_m)
def test_positive_curvature_support_length(H, rho, m):
    s = support_j(ModelParams(H, rho, m))
    assert s.lo <= 0 <= s.hi
    assert s.length == pytest.approx(math.pi / math.sqrt(rho / m), rel=1e-12)


def test_support_interval_invariant():
    with pytest.raises(ValueError):
        SupportInterval(1.0, 0.0)


def test_outside_support_is_zero():
    p = ModelParams(1.0, 1.0, 2.0)
    s = support_j(p)
    assert eval_j(p, s.hi + 0.1) == 0.0
    assert eval_j(p, s.lo - 0.1) == 0.0
    assert log_eval_j(p, s.hi + 0.1) == -math.inf


def test_ode_residual_examples():
    assert abs(check_ode_residual(ModelParams(0.0, 0.0, 3.0), 1.0, 1e-4)) < 1e-12
    assert abs(check_ode_residual(ModelParams(1.0, -1.0, 2.0), 0.5, 1e-4)) < 1e-6
    assert abs(check_ode_residual(ModelParams(1.0, 2.0, math.inf), -0.3, 1e-4)) < 1e-6


def test_ode_residual_rejects_boundary():
    p = ModelParams(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        check_ode_residual(p, math.pi / 2 - 1e-5, 1e-4)


def test_ode_residual_is_second_order():
    p = ModelParams(0.7, 1.3, 2.0)
    r1 = abs(check_ode_residual(p, 0.4, 1e-2))
    r2 = abs(check_ode_residual(p, 0.4, 5e-3))
    assert r2 < r1 / 3


@settings(max_examples=60, deadline=None)
@given(small, st.floats(min_value=-2, max_value=2), any_m, st.floats(min_value=0.05, max_value=0.95))
def test_ode_residual_property(H, rho, m, frac):
    p = ModelParams(H, rho, m)
    s = support_j(p)
    lo, hi = max(s.lo, -2.0), min(s.hi, 2.0)
    t = lo + frac * (hi - lo)
    h = 1e-4
    if not (s.lo + 4 * h < t < s.hi - 4 * h) or log_eval_j(p, t) > 30:
        return
    # relative to the size of the terms being cancelled
    slope = log_derivative_j(p, t)
    assert abs(check_ode_residual(p, t, h)) < 1e-5 * (1.0 + abs(rho) + slope**2)


@given(small, st.floats(min_value=-2, max_value=2), any_m, st.floats(min_value=-2, max_value=2))
def test_reflection(H, rho, m, t):
    a = eval_j(ModelParams(-H, rho, m), t)
    b = eval_j(ModelParams(H, rho, m), -t)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@settings(max_examples=80)
@given(small, st.floats(min_value=-2, max_value=2), finite_m, st.floats(min_value=-2, max_value=2),
       st.floats(min_value=0.1, max_value=10))
def test_scale_covariance(H, rho, m, t, lam):
    a = eval_j(ModelParams(H / lam, rho / lam**2, m), lam * t)
    b = eval_j(ModelParams(H, rho, m), t)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


@settings(max_examples=80)
@given(small, st.floats(min_value=-2, max_value=2), st.floats(min_value=-2, max_value=2))
def test_monotone_in_m(H, rho, t):
    ms = [0.5, 1.0, 2.0, 5.0, 20.0, 100.0, math.inf]
    vals = [eval_j(ModelParams(H, rho, m), t) for m in ms]
    for lo, hi in zip(vals, vals[1:]):
        assert lo <= hi * (1 + 1e-10) + 1e-300


@settings(max_examples=80)
@given(small, any_m, st.floats(min_value=-2, max_value=2))
def test_monotone_in_rho(H, m, t):
    rhos = [-3.0, -1.0, -0.1, 0.0, 0.1, 1.0, 3.0]
    vals = [eval_j(ModelParams(H, rho, m), t) for rho in rhos]
    for a, b in zip(vals, vals[1:]):
        assert b <= a * (1 + 1e-10) + 1e-300


def test_gaussian_limit():
    ts = np.linspace(-1.5, 1.5, 13)
    gauss = eval_j(ModelParams(0.7, 1.2, math.inf), ts)
    errs = [np.max(np.abs(eval_j(ModelParams(0.7, 1.2, m), ts) - gauss)) for m in (10, 1e2, 1e3, 1e4)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3


def test_flat_branch_continuity():
    # tiny |delta| goes through the rho = 0 formula; it must agree with the curved branches
    for rho in (1e-13, -1e-13):
        p0 = ModelParams(0.8, rho, 2.0)
        assert p0._branch[0] == "flat"
        p1 = ModelParams(0.8, rho * 1e5, 2.0)
        assert eval_j(p0, 0.9) == pytest.approx(eval_j(p1, 0.9), rel=1e-7)


def test_hyperbolic_boundary_beta_one():
    # beta = +-1 gives pure exponentials
    m, rho = 2.0, -2.0
    k = math.sqrt(-rho / m)
    assert eval_j(ModelParams(m * k, rho, m), 0.7) == pytest.approx(math.exp(m * k * 0.7), rel=1e-14)
    assert eval_j(ModelParams(-m * k, rho, m), 0.7) == pytest.approx(math.exp(-m * k * 0.7), rel=1e-14)


def test_no_overflow_nan_in_large_arguments():
    p = ModelParams(5.0, -4.0, 20.0)
    val = eval_j(p, 300.0)
    assert val == math.inf or val > 0
    assert not math.isnan(log_eval_j(p, 300.0))


def test_invalid_params():
    with pytest.raises(ValueError):
        ModelParams(0.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        ModelParams(math.nan, 1.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(0.0, 1.0, math.inf).delta
