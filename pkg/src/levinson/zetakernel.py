"""Riemann zeta by Euler-Maclaurin summation, the Moebius sieve, the mollifier.

Derivatives of zeta are obtained by carrying every Euler-Maclaurin term as a
truncated Taylor series ("jet") in a perturbation ``s + eps``: the boundary
terms ``N^{1-s}/(s-1)``, ``N^{-s}/2`` and the Bernoulli corrections are
products of exponentials, reciprocals and linear factors, all of which have
simple jet forms. The ``j``-th derivative is ``j!`` times the ``eps^j``
coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import bernoulli

from .polyalg import Polynomial

__all__ = [
    "ZetaContext",
    "MollifierSpec",
    "mobius_sieve",
    "zeta_em",
    "zeta_derivative",
    "zeta_derivatives",
    "V_eval",
    "psi_eval",
    "em_tail_jets",
]

MAX_DERIVATIVE = 8


@dataclass(frozen=True)
class ZetaContext:
    """Truncation settings for Euler-Maclaurin evaluation.

    ``em_terms = None`` picks ``N = max(50, ceil(height_factor*|t|/(2 pi)) + 20)``
    per evaluation point. The default ``height_factor`` keeps the neglected
    remainder near ``(1/(2 height_factor))^(2 em_order)``, far below 1e-12.
    """

    em_terms: int | None = None
    em_order: int = 8
    t_max: float = 1e6
    height_factor: float = 2 * math.pi

    def __post_init__(self):
        if not 2 <= self.em_order <= 12:
            raise ValueError("em_order must lie between 2 and 12")
        if self.em_terms is not None:
            if self.em_terms < 2:
                raise ValueError("em_terms must be at least 2")
            if self.em_terms < math.ceil(self.t_max / (2 * math.pi)):
                raise ValueError("em_terms too small for t_max; the corrections would not decay")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")

    def terms_for(self, t: float) -> int:
        if self.em_terms is not None:
            return self.em_terms
        return max(50, math.ceil(self.height_factor * abs(t) / (2 * math.pi)) + 20)


@lru_cache(maxsize=None)
def _bernoulli_ratios(order: int) -> np.ndarray:
    """``B_{2k} / (2k)!`` for ``k = 1..order``."""
    B = bernoulli(2 * order)
    return np.array([B[2 * k] / math.factorial(2 * k) for k in range(1, order + 1)])


@lru_cache(maxsize=8)
def _mobius_cached(limit: int) -> np.ndarray:
    mu = np.zeros(limit + 1, dtype=np.int8)
    mu[1] = 1
    is_comp = bytearray(limit + 1)
    primes: list[int] = []
    for i in range(2, limit + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > limit:
                break
            is_comp[ip] = 1
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    mu.setflags(write=False)
    return mu


def mobius_sieve(limit: int) -> np.ndarray:
    """``mu(n)`` for ``0 <= n <= limit`` (index 0 unused, set to 0); linear sieve."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    return _mobius_cached(int(limit))


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    J = a.shape[0] - 1
    out = np.zeros_like(a, dtype=complex)
    for i in range(J + 1):
        for k in range(J + 1 - i):
            out[i + k] += a[i] * b[k]
    return out


def _jet_mul_linear(a: np.ndarray, c, scale) -> np.ndarray:
    """Multiply jet ``a`` by ``(c + eps) * scale``."""
    out = a * c
    out[1:] += a[:-1]
    return out * scale


def em_tail_jets(s, N, order: int, nder: int) -> np.ndarray:
    """Taylor coefficients in ``eps`` of the Euler-Maclaurin tail at ``s + eps``.

    The tail is ``N^{1-s}/(s-1) + N^{-s}/2 + sum_k B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}``.
    ``s`` and ``N`` broadcast together; the result has shape
    ``(nder + 1,) + broadcast shape``.
    """
    s = np.asarray(s, dtype=complex)
    N = np.asarray(N, dtype=float)
    s, N = np.broadcast_arrays(s, N)
    shape = (nder + 1,) + s.shape
    logN = np.log(N)
    base = N ** (-s)
    m = np.arange(nder + 1).reshape((-1,) + (1,) * s.ndim)
    fact = np.array([math.factorial(k) for k in range(nder + 1)], dtype=float).reshape(m.shape)
    # N^{-s-eps}
    E = base[None] * (-logN[None]) ** m / fact
    # 1/(s-1+eps)
    inv = (-1.0) ** m / (s[None] - 1.0) ** (m + 1)
    tail = N[None] * _jet_mul(E, inv) + 0.5 * E
    prod = _jet_mul_linear(np.broadcast_to(E, shape).astype(complex), s[None], 1.0 / N[None])
    ratios = _bernoulli_ratios(order)
    for k in range(1, order + 1):
        if k > 1:
            prod = _jet_mul_linear(prod, s[None] + (2 * k - 3), 1.0 / N[None])
            prod = _jet_mul_linear(prod, s[None] + (2 * k - 2), 1.0 / N[None])
        tail = tail + ratios[k - 1] * prod
    return tail


def _check_point(s: complex, ctx: ZetaContext) -> None:
    if s == 1:
        raise ValueError("zeta has a pole at s = 1")
    if not s.real > 0:
        raise ValueError(f"Re(s) must be positive, got {s!r}")
    if abs(s.imag) > ctx.t_max:
        raise ValueError(f"|Im(s)| = {abs(s.imag):g} exceeds t_max = {ctx.t_max:g}")


def zeta_derivatives(s: complex, nder: int, ctx: ZetaContext = ZetaContext()) -> np.ndarray:
    """``[zeta(s), zeta'(s), ..., zeta^{(nder)}(s)]`` at a single point."""
    s = complex(s)
    if not 0 <= nder <= MAX_DERIVATIVE:
        raise ValueError(f"derivative order must lie in [0, {MAX_DERIVATIVE}]")
    _check_point(s, ctx)
    N = ctx.terms_for(s.imag)
    n = np.arange(1, N, dtype=float)
    logn = np.log(n)
    terms = np.exp(-s * logn)
    out = np.empty(nder + 1, dtype=complex)
    tail = em_tail_jets(s, N, ctx.em_order, nder)
    power = np.ones_like(logn)
    for j in range(nder + 1):
        # reversed summation adds the small terms first
        out[j] = np.sum((terms * power)[::-1]) + math.factorial(j) * tail[j]
        power = power * -logn
    return out


def zeta_em(s: complex, ctx: ZetaContext = ZetaContext()) -> complex:
    return complex(zeta_derivatives(s, 0, ctx)[0])


def zeta_derivative(s: complex, j: int, ctx: ZetaContext = ZetaContext()) -> complex:
    if not 1 <= j <= MAX_DERIVATIVE:
        raise ValueError(f"derivative order must lie in [1, {MAX_DERIVATIVE}]")
    return complex(zeta_derivatives(s, j, ctx)[j])


def V_eval(s: complex, Q: Polynomial, logT: float, ctx: ZetaContext = ZetaContext()) -> complex:
    """``Q(-(1/L) d/ds) zeta(s)`` with ``L = logT``."""
    if abs(Q(0.0) - 1.0) > 1e-12:
        raise ValueError("Q(0) must be 1")
    if not logT > 0:
        raise ValueError("logT must be positive")
    d = zeta_derivatives(s, Q.degree, ctx)
    q = np.array(Q.coeffs)
    return complex(np.sum(q * (-1.0 / logT) ** np.arange(Q.degree + 1) * d))


@dataclass(frozen=True)
class MollifierSpec:
    """Mollifier ``psi(s) = sum_{h<=M} mu(h) h^{-(s + 1/2 - sigma0)} P(log(M/h)/log M)``.

    ``sigma0 = 1/2 - R/logT`` where ``R`` is ``sigma0_offset``.
    """

    P: Polynomial
    M: int
    sigma0_offset: float
    logT: float

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("mollifier length M must be at least 2")
        if abs(self.P(0.0)) > 1e-12 or abs(self.P(1.0) - 1.0) > 1e-12:
            raise ValueError("P must satisfy P(0) = 0 and P(1) = 1")
        if not self.logT > 0:
            raise ValueError("logT must be positive")

    @property
    def sigma0(self) -> float:
        return 0.5 - self.sigma0_offset / self.logT

    @cached_property
    def coefficients(self) -> np.ndarray:
        """``mu(h) P(log(M/h)/log M)`` for ``h = 1..M``."""
        h = np.arange(1, self.M + 1, dtype=float)
        mu = mobius_sieve(self.M)[1:].astype(float)
        return mu * self.P(np.log(self.M / h) / math.log(self.M))

    @cached_property
    def log_h(self) -> np.ndarray:
        return np.log(np.arange(1, self.M + 1, dtype=float))


def psi_eval(s, spec: MollifierSpec):
    """Evaluate the mollifier at a point or an array of points."""
    s_arr = np.asarray(s, dtype=complex)
    expo = s_arr[..., None] + 0.5 - spec.sigma0
    vals = np.exp(-expo * spec.log_h) @ spec.coefficients
    return complex(vals) if vals.ndim == 0 else vals
