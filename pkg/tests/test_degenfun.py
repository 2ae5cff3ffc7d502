import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deglap.degenfun import (
    Lambda,
    deg_angle,
    deg_gamma,
    deg_gamma_int,
    deg_hyp,
    deg_pow,
    deg_trig,
    log1p_pow,
    log_gamma,
)
from deglap.errors import DomainError
from deglap.numlap import fd_derivative

E1 = math.e - 1


@pytest.mark.parametrize("lam, a, t, expected", [
    (1.0, 1.0, 3.0, 4.0),
    (0.5, -1.0, 2.0, 0.25),
    (0.0, 2.0, 1.0, math.exp(2.0)),
])
def test_deg_pow_examples(lam, a, t, expected):
    assert deg_pow(lam, a, t) == pytest.approx(expected, rel=1e-14)


def test_deg_pow_matches_direct_power():
    for lam, a, t in [(0.3, 1.7, 2.2), (2.0, -0.5, 0.4), (0.01, 3.0, 10.0)]:
        assert deg_pow(lam, a, t) == pytest.approx((1 + lam * t) ** (a / lam), rel=1e-13)


def test_deg_pow_rejects_nonpositive_base():
    with pytest.raises(DomainError):
        deg_pow(1.0, 1.0, -1.0)


def test_deg_pow_overflow_is_reported():
    with pytest.raises(OverflowError):
        deg_pow(0.0, 1.0, 1e4)


def test_lambda_validation():
    assert Lambda(0.0).degenerate is False
    assert Lambda(0.2).degenerate
    for bad in (-0.1, float("nan"), float("inf")):
        with pytest.raises(DomainError):
            Lambda(bad)


@pytest.mark.parametrize("lam", [0.0, 0.3, 2.0])
def test_deg_trig_at_zero(lam):
    assert deg_trig(lam, 1.7, 0.0) == (1.0, 0.0)
    assert deg_hyp(lam, 1.7, 0.0) == (1.0, 0.0)


def test_deg_trig_example_against_complex_power():
    c, s = deg_trig(1.0, 1.0, E1)
    z = (1 + E1) ** 1j  # (1 + lam t)^(i a / lam)
    assert c == pytest.approx(z.real, abs=1e-14)
    assert s == pytest.approx(z.imag, abs=1e-14)
    assert (round(c, 7), round(s, 7)) == (0.5403023, 0.841471)


def test_deg_trig_classical_branch():
    c, s = deg_trig(0.0, 2.0, 0.75)
    assert (c, s) == (math.cos(1.5), math.sin(1.5))


def test_deg_hyp_examples():
    assert deg_hyp(1.0, 1.0, 3.0) == pytest.approx((2.125, 1.875), rel=1e-14)
    assert deg_hyp(0.3, 0.0, 5.0) == (1.0, 0.0)


def test_vectorized_inputs():
    t = np.linspace(0, 5, 11)
    c, s = deg_trig(0.4, 2.0, t)
    assert c.shape == t.shape
    np.testing.assert_allclose(c, np.cos(2.0 * np.log1p(0.4 * t) / 0.4), rtol=1e-14)


@pytest.mark.parametrize("lam, n, t, expected", [
    (0.7, 0, 9.0, 1.0),
    (0.5, 2, 2.0, math.log(2.0) ** 2),
    (0.0, 1, 5.0, 0.0),
])
def test_log1p_pow_examples(lam, n, t, expected):
    assert log1p_pow(lam, n, t) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.5, 10.0, 37.3, 171.5])
def test_log_gamma_vs_mpmath(x):
    assert log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-14, abs=1e-15)


def test_log_gamma_examples():
    assert log_gamma(1) == 0.0
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)
    assert log_gamma(10) == pytest.approx(math.log(362880), rel=1e-14)
    with pytest.raises(DomainError):
        log_gamma(0.0)


def _mp_deg_gamma(lam, s):
    mpmath.mp.dps = 30
    return float(mpmath.quad(lambda t: (1 + lam * t) ** (-1 / mpmath.mpf(lam)) * t ** (s - 1), [0, 1, mpmath.inf]))


@pytest.mark.parametrize("lam, s", [(0.5, 1.0), (0.1, 3.0), (0.1, 0.5), (0.25, 2.7)])
def test_deg_gamma_vs_mpmath_integral(lam, s):
    assert deg_gamma(lam, s) == pytest.approx(_mp_deg_gamma(lam, s), rel=1e-10)


def test_deg_gamma_examples():
    assert deg_gamma(0.5, 1) == pytest.approx(2.0, rel=1e-14)
    assert deg_gamma(0.1, 3) == pytest.approx(2 / (0.9 * 0.8 * 0.7), rel=1e-13)
    assert deg_gamma(0.0, 4.0) == pytest.approx(6.0, rel=1e-15)
    with pytest.raises(DomainError):
        deg_gamma(0.1, 10)
    with pytest.raises(DomainError):
        deg_gamma(0.1, -1)


def test_deg_gamma_small_lambda_is_stable():
    # 1/lam = 1e8 would overflow a naive Gamma ratio
    assert deg_gamma(1e-8, 3.5) == pytest.approx(math.gamma(3.5), rel=1e-6)


def test_deg_gamma_int_examples():
    assert deg_gamma_int(0.2, 1) == pytest.approx(1.25, rel=1e-15)
    assert deg_gamma_int(0.1, 3) == pytest.approx(3.968253968253968, rel=1e-14)
    assert deg_gamma_int(0.0, 4) == 6
    with pytest.raises(DomainError):
        deg_gamma_int(0.25, 4)


@given(st.floats(0.01, 0.5), st.integers(1, 40))
def test_product_and_beta_forms_agree(lam, k):
    if not k * lam < 1:
        return
    assert deg_gamma(lam, k) == pytest.approx(deg_gamma_int(lam, k), rel=1e-11)


# Pointwise identities.  The angle is bounded so the hyperbolic pair stays
# O(1) and an absolute tolerance is meaningful.

lams = st.floats(0.0, 5.0)
ts = st.floats(0.0, 50.0)


@settings(max_examples=1000)
@given(lams, st.floats(-20.0, 20.0), ts)
def test_pythagorean_identity(lam, a, t):
    c, s = deg_trig(lam, a, t)
    assert abs(c * c + s * s - 1.0) <= 1e-12


@settings(max_examples=1000)
@given(lams, st.floats(-3.0, 3.0), ts)
def test_hyperbolic_identity(lam, a, t):
    theta = float(deg_angle(lam, a, t))
    if abs(theta) > 3:
        return
    c, s = deg_hyp(lam, a, t)
    assert abs(c * c - s * s - 1.0) <= 1e-12


@settings(max_examples=300)
@given(st.floats(0.01, 3.0), st.floats(-5.0, 5.0), st.floats(0.0, 20.0))
def test_euler_formula(lam, a, t):
    c, s = deg_trig(lam, a, t)
    z = cmath.exp(1j * a * math.log1p(lam * t) / lam)
    assert abs(complex(c, s) - z) <= 1e-12


@settings(max_examples=300)
@given(st.floats(0.05, 3.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(0.0, 5.0))
def test_deg_pow_multiplicative(lam, a, b, t):
    lhs = deg_pow(lam, a, t) * deg_pow(lam, b, t)
    assert lhs == pytest.approx(deg_pow(lam, a + b, t), rel=1e-12)


@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0])
@pytest.mark.parametrize("a", [1.0, 2.0])
@pytest.mark.parametrize("t", [0.3, 1.0, 4.0])
def test_derivative_identities_fd(lam, a, t):
    r = a / (1 + lam * t)
    c, s = deg_trig(lam, a, t)
    ch, sh = deg_hyp(lam, a, t)
    cases = [
        (lambda x: deg_trig(lam, a, x)[0], -r * s),
        (lambda x: deg_trig(lam, a, x)[1], r * c),
        (lambda x: deg_hyp(lam, a, x)[0], r * sh),
        (lambda x: deg_hyp(lam, a, x)[1], r * ch),
    ]
    for fn, expected in cases:
        assert fd_derivative(fn, t, 1) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("lam", [5e-324, 1e-300, 1e-12])
def test_tiny_lambda_keeps_t_dependence(lam):
    c, s = deg_trig(lam, 1.0, 1.0)
    assert (c, s) == pytest.approx((math.cos(1.0), math.sin(1.0)), rel=1e-12)
    assert deg_pow(lam, 1.0, 2.0) == pytest.approx(math.exp(2.0), rel=1e-11)
