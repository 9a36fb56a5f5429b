"""Main term of the mollified second moment and its two-shift precursors.

``c(P, Q, R, theta)`` is evaluated exactly (polynomial algebra plus
exponential moments) and, independently, by tensor Gauss-Legendre
quadrature. The shifted main terms ``c(alpha, beta)`` and
``c_1(alpha, beta)`` accept complex shifts; the differential operator
``Q(-(1/L) d/d alpha) Q(-(1/L) d/d beta)`` is applied to ``c(alpha, beta)``
through Cauchy-circle derivatives, giving a route to ``c(P, Q, R, theta)``
that shares nothing with the closed form beyond the polynomial class.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .polyalg import (
    BivariatePolynomial,
    MainTermParams,
    Polynomial,
    bipoly_integrate_unit_square_weighted,
    poly_shift,
)

__all__ = [
    "ShiftPair",
    "MainTermResult",
    "inner_derivative",
    "main_term_closed",
    "main_term_quadrature",
    "c1_integral_form",
    "c1_derivative_form",
    "c_general",
    "exp_moment_identity",
    "apply_Q_operator",
    "q_operator_path",
    "kappa_bound",
]


@dataclass(frozen=True)
class ShiftPair:
    """Shifts ``alpha, beta`` together with ``L = log T`` and ``log M``."""

    alpha: complex
    beta: complex
    logT: float
    logM: float

    def __post_init__(self):
        if not self.logT > 0 or not self.logM > 0:
            raise ValueError("logT and logM must be positive")

    @classmethod
    def from_theta(cls, alpha, beta, logT: float, theta: float) -> "ShiftPair":
        return cls(complex(alpha), complex(beta), float(logT), theta * float(logT))

    @property
    def theta(self) -> float:
        return self.logM / self.logT

    def mirrored(self) -> "ShiftPair":
        """``(alpha, beta) -> (-beta, -alpha)``."""
        return ShiftPair(-self.beta, -self.alpha, self.logT, self.logM)


@dataclass(frozen=True)
class MainTermResult:
    c_value: float
    kappa_bound: float
    method: str


def kappa_bound(R: float, c: float) -> float:
    """Lower bound ``1 - log(c) / R`` for the critical-zero proportion."""
    if not R > 0:
        raise ValueError(f"R must be positive, got {R!r}")
    if not c >= 1.0:
        raise ValueError(f"the mollified moment cannot be below 1, got c = {c!r}")
    return 1.0 - math.log(c) / R


def _kappa_or_nan(R: float, c: float) -> float:
    try:
        return kappa_bound(R, c)
    except ValueError:
        return float("nan")


def inner_derivative(params: MainTermParams) -> BivariatePolynomial:
    """``d/dx [e^{R theta x} P(x+u) Q(v+theta x)]`` at ``x = 0``, in ``(u, v)``."""
    Pu = poly_shift(params.P, "u", 1.0)
    Qv = poly_shift(params.Q, "v", params.theta)
    P0, P1 = Pu.first_coefficient(0), Pu.first_coefficient(1)
    Q0, Q1 = Qv.first_coefficient(0), Qv.first_coefficient(1)
    # x-coefficient of (1 + R theta x)(P0 + P1 x)(Q0 + Q1 x)
    g = BivariatePolynomial.outer(P0, Q0) * (params.R * params.theta)
    g = g + BivariatePolynomial.outer(P1, Q0)
    g = g + BivariatePolynomial.outer(P0, Q1)
    return g


def main_term_closed(params: MainTermParams) -> MainTermResult:
    if not params.theta > 0:
        raise ValueError("theta must be positive")
    g = inner_derivative(params)
    c = 1.0 + bipoly_integrate_unit_square_weighted(g * g, params.R) / params.theta
    return MainTermResult(c, _kappa_or_nan(params.R, c), "closed-form")


@lru_cache(maxsize=None)
def _gauss_legendre_unit(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def main_term_quadrature(params: MainTermParams, n_nodes: int = 64) -> MainTermResult:
    """Tensor Gauss-Legendre evaluation of the same double integral."""
    if n_nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    if not params.theta > 0:
        raise ValueError("theta must be positive")
    x, w = _gauss_legendre_unit(n_nodes)
    P, Q, R, th = params.P, params.Q, params.R, params.theta
    dP, dQ = P.derivative(), Q.derivative()
    u = x[:, None]
    v = x[None, :]
    g = (R * th * P(u) + dP(u)) * Q(v) + th * P(u) * dQ(v)
    integrand = np.exp(2.0 * R * v) * g * g
    c = 1.0 + float(w @ integrand @ w) / th
    return MainTermResult(c, _kappa_or_nan(R, c), "quadrature")


def _check_pole(shifts: ShiftPair) -> complex:
    s = shifts.alpha + shifts.beta
    if s == 0:
        raise ValueError("alpha + beta = 0 is a pole of c_1; use the symmetrized sum")
    return s


def c1_integral_form(shifts: ShiftPair, P: Polynomial) -> complex:
    """``c_1`` from the integral of ``(P' + a P)(P' + b P)``, ``a = alpha log M``."""
    s = _check_pole(shifts)
    a = shifts.alpha * shifts.logM
    b = shifts.beta * shifts.logM
    dP = P.derivative()
    i_dd = (dP * dP).integral_unit()
    i_dp = (dP * P).integral_unit()
    i_pp = (P * P).integral_unit()
    return (i_dd + (a + b) * i_dp + a * b * i_pp) / (s * shifts.logM)


def _overlap_matrix(P: Polynomial) -> np.ndarray:
    """Coefficients of ``int_0^1 P(x+u) P(y+u) du`` as a polynomial in ``(x, y)``."""
    rows = poly_shift(P, "u", 1.0)
    n = rows.shape[0]
    F = np.empty((n, n))
    for i in range(n):
        Ai = rows.first_coefficient(i)
        for j in range(n):
            F[i, j] = (Ai * rows.first_coefficient(j)).integral_unit()
    return F


def _mixed_derivative_exp(F: np.ndarray, a: complex, b: complex) -> complex:
    # d^2/dxdy [e^{ax + by} F(x, y)] at x = y = 0
    F00 = F[0, 0]
    F10 = F[1, 0] if F.shape[0] > 1 else 0.0
    F01 = F[0, 1] if F.shape[1] > 1 else 0.0
    F11 = F[1, 1] if min(F.shape) > 1 else 0.0
    return F11 + a * F01 + b * F10 + a * b * F00


def c1_derivative_form(shifts: ShiftPair, P: Polynomial) -> complex:
    """``c_1`` as a mixed derivative of ``M^{alpha x + beta y} int P(x+u)P(y+u) du``."""
    s = _check_pole(shifts)
    F = _overlap_matrix(P)
    D = _mixed_derivative_exp(F, shifts.alpha * shifts.logM, shifts.beta * shifts.logM)
    return D / (s * shifts.logM)


def _expm1_ratio(z: complex) -> complex:
    """``(1 - e^{-z}) / z`` with the removable singularity at 0 filled in."""
    if abs(z) < 1e-4:
        return 1.0 - z / 2.0 + z * z / 6.0 - z**3 / 24.0
    return (1.0 - cmath.exp(-z)) / z


def c_general(shifts: ShiftPair, P: Polynomial, theta: float | None = None) -> complex:
    """``c(alpha, beta)``; the v-integral ``int_0^1 T^{-v(alpha+beta)} dv`` is done in closed form."""
    th = shifts.theta if theta is None else theta
    if not th > 0:
        raise ValueError("theta must be positive")
    if theta is not None and not math.isclose(theta, shifts.theta, rel_tol=1e-12):
        raise ValueError("theta disagrees with logM / logT of the shift pair")
    v_int = _expm1_ratio((shifts.alpha + shifts.beta) * shifts.logT)
    F = _overlap_matrix(P)
    D = _mixed_derivative_exp(F, -shifts.beta * shifts.logM, -shifts.alpha * shifts.logM)
    return 1.0 + v_int * D / th


def exp_moment_identity(shifts: ShiftPair, nodes: int = 64) -> tuple[complex, complex]:
    """Both sides of ``(1 - T^{-a-b}) / ((a+b) log M) = (1/theta) int_0^1 T^{-v(a+b)} dv``.

    The left side uses the closed expression, the right side Gauss-Legendre
    quadrature in ``v``.
    """
    s = _check_pole(shifts)
    lhs = (1.0 - cmath.exp(-s * shifts.logT)) / (s * shifts.logM)
    x, w = _gauss_legendre_unit(nodes)
    rhs = complex(np.dot(w, np.exp(-x * s * shifts.logT))) / shifts.theta
    return lhs, rhs


def apply_Q_operator(Q: Polynomial, logT: float, base_log: float) -> float:
    """Multiplier for ``Q(-(1/log T) d/d alpha)`` acting on ``X^{-alpha}``.

    ``base_log`` is ``log X``; the image is ``Q(log X / log T) X^{-alpha}``.
    """
    if not logT > 0:
        raise ValueError("logT must be positive")
    return Q(base_log / logT)


def _cauchy_mixed_derivatives(f, a0: complex, b0: complex, radius: float, order: int, nodes: int):
    """Table ``D[j, k] = d^{j+k} f / d a^j d b^k`` at ``(a0, b0)`` from circle samples."""
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = np.empty((nodes, nodes), dtype=complex)
    for i, wa in enumerate(w):
        for k, wb in enumerate(w):
            vals[i, k] = f(a0 + radius * wa, b0 + radius * wb)
    # 2-D DFT gives Taylor coefficients scaled by radius^{j+k}
    taylor = np.fft.fft2(vals) / nodes**2
    D = np.empty((order + 1, order + 1), dtype=complex)
    for j in range(order + 1):
        for k in range(order + 1):
            D[j, k] = taylor[j, k] * math.factorial(j) * math.factorial(k) / radius ** (j + k)
    return D


def q_operator_path(
    params: MainTermParams,
    logT: float = 20.0,
    radius_scale: float = 1.0,
    nodes: int = 32,
) -> float:
    """Apply ``Q(-(1/L) d/d alpha) Q(-(1/L) d/d beta)`` to ``c(alpha, beta)`` at ``-R/L``.

    Derivatives are taken by Cauchy's formula on circles of radius
    ``radius_scale / L``. The result should not depend on ``logT``.
    """
    P, Q, R, th = params.P, params.Q, params.R, params.theta
    logM = th * logT

    def f(a, b):
        return c_general(ShiftPair(a, b, logT, logM), P)

    deg = Q.degree
    D = _cauchy_mixed_derivatives(f, -R / logT, -R / logT, radius_scale / logT, deg, nodes)
    q = np.array(Q.coeffs)
    scale = (-1.0 / logT) ** np.arange(deg + 1)
    qs = q * scale
    return float((qs @ D @ qs).real)
