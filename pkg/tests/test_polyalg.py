import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levinson.polyalg import (
    BivariatePolynomial,
    MainTermParams,
    Polynomial,
    bipoly_integrate_unit_square_weighted,
    exp_moment,
    exp_moments,
    parse_coeffs,
    poly_shift,
)

coef = st.floats(-10, 10, allow_nan=False)
coeff_lists = st.lists(coef, min_size=1, max_size=6)


def test_trailing_zeros_dropped():
    p = Polynomial([1.0, 2.0, 0.0, 0.0])
    assert p.coeffs == (1.0, 2.0)
    assert p.degree == 1
    assert Polynomial([0.0, 0.0]).is_zero()


def test_string_round_trip():
    p = Polynomial([0.1, -1 / 3, 2.5e-17])
    assert Polynomial.from_string(p.to_string()) == p
    assert parse_coeffs(" 0, 1 ") == [0.0, 1.0]
    with pytest.raises(ValueError):
        parse_coeffs("1,,2")
    with pytest.raises(ValueError):
        parse_coeffs("a,b")


@given(coeff_lists, coeff_lists, st.floats(-2, 2))
def test_arithmetic_matches_pointwise(a, b, x):
    p, q = Polynomial(a), Polynomial(b)
    scale = 1 + abs(p(x)) * abs(q(x)) + abs(p(x)) + abs(q(x))
    assert abs((p * q)(x) - p(x) * q(x)) < 1e-9 * scale
    assert abs((p + q)(x) - (p(x) + q(x))) < 1e-9 * scale
    assert abs((p - q)(x) - (p(x) - q(x))) < 1e-9 * scale


@given(coeff_lists)
def test_derivative_matches_numpy(a):
    dp = Polynomial(a).derivative()
    ref = np.polynomial.polynomial.polyder(a)
    x = np.linspace(-1.5, 1.5, 7)
    np.testing.assert_allclose(dp(x), np.polynomial.polynomial.polyval(x, ref), atol=1e-9)


@given(coeff_lists)
def test_integral_unit_matches_numpy(a):
    p = Polynomial(a)
    anti = np.polynomial.polynomial.polyint(a)
    assert math.isclose(p.integral_unit(), np.polynomial.polynomial.polyval(1.0, anti), rel_tol=1e-12, abs_tol=1e-12)


def test_vectorised_and_complex_eval():
    p = Polynomial([1.0, -2.0, 3.0])
    x = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(p(x), 1 - 2 * x + 3 * x * x)
    z = 0.3 + 0.4j
    assert abs(p(z) - (1 - 2 * z + 3 * z * z)) < 1e-15


@given(coeff_lists, coeff_lists, coeff_lists)
@settings(max_examples=50)
def test_bivariate_product_pointwise(a, b, c):
    f = BivariatePolynomial.outer(Polynomial(a), Polynomial(b))
    g = BivariatePolynomial.outer(Polynomial(c), Polynomial(a))
    for u, v in [(0.3, 0.7), (-1.0, 0.5), (1.0, 1.0)]:
        expect = f(u, v) * g(u, v)
        assert abs((f * g)(u, v) - expect) <= 1e-9 * (1 + abs(expect))
        assert abs((f + g)(u, v) - (f(u, v) + g(u, v))) <= 1e-9 * (1 + abs(f(u, v)) + abs(g(u, v)))


def test_bivariate_is_read_only():
    f = BivariatePolynomial([[1.0, 2.0]])
    with pytest.raises(ValueError):
        f.coeffs[0, 0] = 3.0


@given(coeff_lists, st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_poly_shift_expands_translate(a, x, u, scale):
    p = Polynomial(a)
    expand = poly_shift(p, "u", scale)
    expect = p(u + scale * x)
    assert abs(expand(x, u) - expect) <= 1e-8 * (1 + abs(expect))
    assert expand.names == ("x", "u")


def _mp_moment(k, R):
    mpmath.mp.dps = 40
    return float(mpmath.quad(lambda v: mpmath.e ** (2 * R * v) * v**k, [0, 1]))


@pytest.mark.parametrize("R", [-3.0, -0.5, -0.1, 0.0, 1e-9, 0.3, 1.3, 4.0, 20.0])
def test_exp_moments_against_mpmath(R):
    E = exp_moments(12, R)
    for k in range(13):
        assert math.isclose(E[k], _mp_moment(k, R), rel_tol=1e-13), (k, R)


def test_exp_moment_at_zero():
    assert [exp_moment(k, 0.0) for k in range(5)] == [1 / (k + 1) for k in range(5)]
    with pytest.raises(ValueError):
        exp_moment(-1, 1.0)


def test_weighted_square_integral_against_quadrature():
    from scipy.integrate import dblquad

    g = BivariatePolynomial([[1.0, -2.0, 0.5], [3.0, 0.0, 1.0]])
    R = 0.8
    exact = bipoly_integrate_unit_square_weighted(g, R)
    num, _ = dblquad(lambda v, u: math.exp(2 * R * v) * g(u, v), 0, 1, 0, 1, epsabs=1e-13)
    assert math.isclose(exact, num, rel_tol=1e-11)


def test_params_validation():
    P, Q = Polynomial([0.0, 1.0]), Polynomial([1.0, -1.0])
    MainTermParams(P, Q, 0.0, 0.3)
    for bad in [
        dict(P=Polynomial([0.1, 0.9])),
        dict(P=Polynomial([0.0, 0.5])),
        dict(Q=Polynomial([0.5, 1.0])),
        dict(R=-0.1),
        dict(theta=0.0),
        dict(theta=0.6),
    ]:
        kw = dict(P=P, Q=Q, R=1.3, theta=0.5) | bad
        with pytest.raises(ValueError):
            MainTermParams(**kw)
    assert MainTermParams(P, Q, 1.3, 0.5).boundary_theta
    assert MainTermParams(P, Q, 1.3, 0.5).warnings
    assert not MainTermParams(P, Q, 1.3, 0.4).warnings
