import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_P, random_Q
from levinson.mainterm import (
    ShiftPair,
    _cauchy_mixed_derivatives,
    apply_Q_operator,
    c1_derivative_form,
    c1_integral_form,
    c_general,
    exp_moment_identity,
    inner_derivative,
    kappa_bound,
    main_term_closed,
    main_term_quadrature,
    q_operator_path,
)
from levinson.polyalg import MainTermParams, Polynomial

X = Polynomial([0.0, 1.0])
ONE_MINUS_X = Polynomial([1.0, -1.0])


def test_classical_preset_against_mpmath():
    mpmath.mp.dps = 30
    R, th = 1.3, 0.5

    def g(u, v):
        # P = u, Q = 1 - v
        return R * th * u * (1 - v) + (1 - v) - th * u

    oracle = 1 + mpmath.quad(lambda u, v: mpmath.e ** (2 * R * v) * g(u, v) ** 2, [0, 1], [0, 1]) / th
    c = main_term_closed(MainTermParams(X, ONE_MINUS_X, R, th)).c_value
    assert math.isclose(c, float(oracle), rel_tol=1e-14)
    assert 2.34 <= c <= 2.36


def test_inner_derivative_pointwise(rng):
    P, Q = random_P(rng, 3), random_Q(rng, 2)
    params = MainTermParams(P, Q, 0.9, 0.37)
    g = inner_derivative(params)
    for u, v in rng.uniform(0, 1, size=(5, 2)):
        expect = (0.9 * 0.37 * P(u) + P.derivative()(u)) * Q(v) + 0.37 * P(u) * Q.derivative()(v)
        assert abs(g(u, v) - expect) < 1e-12 * (1 + abs(expect))


def test_closed_vs_quadrature_random(rng):
    for _ in range(20):
        P, Q = random_P(rng, int(rng.integers(1, 5))), random_Q(rng, int(rng.integers(0, 5)))
        params = MainTermParams(P, Q, float(rng.uniform(0, 3)), float(rng.uniform(0.1, 0.5)))
        a = main_term_closed(params).c_value
        b = main_term_quadrature(params).c_value
        assert abs(a - b) / a < 1e-12


def test_main_term_at_least_one(rng):
    for _ in range(10):
        params = MainTermParams(random_P(rng, 3), random_Q(rng, 3), rng.uniform(0, 3), rng.uniform(0.1, 0.5))
        assert main_term_closed(params).c_value >= 1.0


def test_kappa_bound():
    assert math.isclose(kappa_bound(1.3, 2.350067776118448), 1 - math.log(2.350067776118448) / 1.3)
    with pytest.raises(ValueError):
        kappa_bound(0.0, 2.0)
    with pytest.raises(ValueError):
        kappa_bound(1.0, 0.5)
    assert math.isnan(main_term_closed(MainTermParams(X, ONE_MINUS_X, 0.0, 0.5)).kappa_bound)


@given(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.integers(0, 2**31)
)
@settings(max_examples=60)
def test_c1_bracket_and_forms(ar, ai, br, bi, seed):
    rng = np.random.default_rng(seed)
    P = random_P(rng, int(rng.integers(1, 6)))
    L = 30.0
    alpha, beta = complex(ar, ai) / L, complex(br, bi) / L
    if abs(alpha + beta) * L < 1e-3:
        return
    sh = ShiftPair.from_theta(alpha, beta, L, 0.4)
    c1 = c1_integral_form(sh, P)
    scale = 1 + abs(c1)
    assert abs(c1 + c1_integral_form(sh.mirrored(), P) - 1.0) < 1e-10 * scale
    assert abs(c1 - c1_derivative_form(sh, P)) < 1e-10 * scale


def test_c1_pole_rejected():
    sh = ShiftPair.from_theta(0.1, -0.1, 10.0, 0.5)
    with pytest.raises(ValueError):
        c1_integral_form(sh, X)
    with pytest.raises(ValueError):
        c1_derivative_form(sh, X)


def test_exp_moment_identity():
    for a, b in [(0.05, 0.02), (-0.03 + 0.01j, 0.01 - 0.02j), (0.2, 0.2)]:
        lhs, rhs = exp_moment_identity(ShiftPair.from_theta(a, b, 25.0, 0.45))
        assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))


def test_c_general_with_constant_Q_matches_main_term(rng):
    # Q = 1: c(alpha, beta) at alpha = beta = -R/L is the main term itself
    for _ in range(5):
        P = random_P(rng, 3)
        R, th, L = rng.uniform(0.1, 3), rng.uniform(0.1, 0.5), 40.0
        c = c_general(ShiftPair.from_theta(-R / L, -R / L, L, th), P)
        ref = main_term_closed(MainTermParams(P, Polynomial([1.0]), R, th)).c_value
        assert abs(c - ref) < 1e-12 * ref


def test_c_general_removable_singularity():
    P = Polynomial([0.0, 2.0, -1.0])
    near = c_general(ShiftPair.from_theta(1e-9, -1e-9 + 1e-12, 20.0, 0.5), P)
    at = c_general(ShiftPair.from_theta(0.0, 0.0, 20.0, 0.5), P)
    assert abs(near - at) < 1e-9


def test_cauchy_derivatives_exact():
    f = lambda a, b: cmath.exp(a + 2 * b) * (1 + a * b)
    D = _cauchy_mixed_derivatives(f, 0.1, -0.2, 0.5, 3, 32)
    mpmath.mp.dps = 30
    for j in range(4):
        for k in range(4):
            ref = mpmath.diff(lambda a, b: mpmath.exp(a + 2 * b) * (1 + a * b), (0.1, -0.2), (j, k))
            assert abs(D[j, k] - complex(ref)) < 1e-11 * (1 + abs(complex(ref)))


def test_q_operator_path_independent_of_L(rng):
    for _ in range(5):
        P, Q = random_P(rng, int(rng.integers(1, 4))), random_Q(rng, int(rng.integers(1, 4)))
        params = MainTermParams(P, Q, float(rng.uniform(0.3, 2.5)), float(rng.uniform(0.2, 0.5)))
        ref = main_term_closed(params).c_value
        for L in (15.0, 60.0):
            assert abs(q_operator_path(params, L) - ref) < 1e-10 * ref


def test_apply_Q_operator():
    Q = Polynomial([1.0, -1.0])
    # Q(-(1/L) d/da) X^{-a} = Q(log X / L) X^{-a}
    L, logX = 10.0, 4.0
    assert apply_Q_operator(Q, L, logX) == Q(0.4)
    with pytest.raises(ValueError):
        apply_Q_operator(Q, 0.0, 1.0)
