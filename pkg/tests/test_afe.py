import math
import warnings

import mpmath
import numpy as np
import pytest

from levinson.afe import (
    AfeShifts,
    ContourSpec,
    G_weight,
    QuadratureWarning,
    V_weight,
    X_factor,
    afe_residual,
    afe_sides,
    arith_factor_check,
    divisor_mobius_sums,
    g_factor,
)

WIDE = AfeShifts(1 / math.log(200), 1 / math.log(200))


def test_shift_validation():
    with pytest.raises(ValueError):
        AfeShifts(0.5, 0.1)
    m = AfeShifts(0.1, 0.2 + 0.1j).mirrored()
    assert m.alpha == -(0.2 + 0.1j) and m.beta == -0.1


def test_G_weight_values():
    sh = AfeShifts(0.1, 0.05)
    assert abs(G_weight(0.0, sh) - 1.0) < 1e-15
    assert abs(G_weight(-sh.total / 2, sh)) < 1e-15
    assert abs(G_weight(sh.total / 2, sh)) < 1e-15
    with pytest.raises(ValueError):
        G_weight(0.3, AfeShifts(0.1, -0.1))


def test_V_weight_against_mpmath():
    sh = AfeShifts(0.2, 0.15)
    x, t = 37.0, 120.0
    mpmath.mp.dps = 25
    a, b = mpmath.mpf(0.2), mpmath.mpf(0.15)

    def integrand(y):
        s = 1 + 1j * y
        G = mpmath.exp(s * s) * ((a + b) ** 2 - 4 * s * s) / (a + b) ** 2
        g = mpmath.pi ** (-s) * mpmath.exp(
            mpmath.loggamma((0.5 + a + s + 1j * t) / 2) - mpmath.loggamma((0.5 + a + 1j * t) / 2)
            + mpmath.loggamma((0.5 + b + s - 1j * t) / 2) - mpmath.loggamma((0.5 + b - 1j * t) / 2)
        )
        return G / s * g * mpmath.mpf(x) ** (-s)

    ref = complex(mpmath.quad(integrand, [-12, -4, 0, 4, 12]) / (2 * mpmath.pi))
    assert abs(V_weight(x, t, sh) - ref) < 1e-12


def test_V_weight_limits():
    sh = AfeShifts(0.2, 0.2)
    assert abs(V_weight(1e6, 100.0, sh)) < 1e-8
    vals = V_weight(np.array([1e5, 1e7]), 100.0, sh)
    assert vals.shape == (2,) and abs(vals[1]) < abs(vals[0])
    with pytest.raises(ValueError):
        V_weight(0.0, 100.0, sh)


def test_V_weight_quadrature_converged():
    sh = AfeShifts(0.2, 0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        V_weight(1000.0, 1000.0, sh, check=True)
    with pytest.warns(QuadratureWarning):
        V_weight(1000.0, 1000.0, sh, ContourSpec(half_len=3.0, nodes=16), check=True)


def test_gamma_factors_stirling():
    t = 1000.0
    sh = AfeShifts(0.05, -0.02)
    for s in (0.5, 1.0, 1 + 1j, 1 - 2j):
        ratio = g_factor(s, t, sh) / (t / (2 * math.pi)) ** s
        assert abs(ratio - 1) < 1e-3
    assert abs(X_factor(t, sh) / (t / (2 * math.pi)) ** (-sh.total) - 1) < 1e-4
    a, b = sh.alpha, sh.beta
    G = lambda z: mpmath.gamma(complex(z))
    exact = complex(
        mpmath.pi ** (a + b) * G((0.5 - a - 1j * t) / 2) / G((0.5 + a + 1j * t) / 2)
        * G((0.5 - b + 1j * t) / 2) / G((0.5 + b - 1j * t) / 2)
    )
    assert abs(X_factor(t, sh) - exact) < 1e-12
    assert abs(X_factor(t, AfeShifts(0.0, 0.0)) - 1.0) < 1e-14


def test_height_guard():
    with pytest.raises(ValueError):
        g_factor(1.0, 0.5, WIDE)
    with pytest.raises(ValueError):
        X_factor(0.0, WIDE)


def test_afe_residual_decreases():
    r1 = afe_residual(100.0, WIDE, 25000)
    r2 = afe_residual(100.0, WIDE, 50000)
    assert r2 < r1
    assert afe_residual(100.0, WIDE, 100000) < 1e-4


def test_afe_sides_conjugate_symmetry():
    # real shifts: the product zeta(s) zeta(conj s) is real
    lhs, rhs = afe_sides(100.0, WIDE, 50000)
    assert abs(lhs.imag) < 1e-12
    assert abs(rhs.imag) < 1e-10


def test_divisor_mobius_blocks():
    blocks = divisor_mobius_sums(5000)
    assert blocks[0] == 1
    assert not np.any(blocks[1:])
    with pytest.raises(ValueError):
        divisor_mobius_sums(0)


@pytest.mark.parametrize("s_re", [0.1, 0.5, 2.0])
def test_arith_factor(s_re):
    assert arith_factor_check(s_re, 3000) == 1.0
    with pytest.raises(ValueError):
        arith_factor_check(0.0, 10)
