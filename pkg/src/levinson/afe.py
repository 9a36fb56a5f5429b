"""Approximate functional equation for ``zeta(1/2+alpha+it) zeta(1/2+beta-it)``.

The smooth weight ``V_{alpha,beta}(x, t)`` is a vertical-line integral of
``G(s)/s * g_{alpha,beta}(s, t) * x^{-s}`` with ``G(s) = e^{s^2} p(s)``; the
polynomial ``p`` vanishes at ``s = -(alpha+beta)/2``, which cancels the
pole of ``zeta(1 + alpha + beta + 2s)`` in later manipulations. Gamma
ratios are formed as differences of log-gamma values so nothing overflows
at large ``t``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .quadrature import composite_nodes
from .special import loggamma
from .zetakernel import ZetaContext, mobius_sieve, zeta_em

__all__ = [
    "AfeShifts",
    "ContourSpec",
    "QuadratureWarning",
    "G_weight",
    "g_factor",
    "X_factor",
    "V_weight",
    "afe_residual",
    "afe_sides",
    "divisor_mobius_sums",
    "arith_factor_check",
]


class QuadratureWarning(RuntimeWarning):
    """Doubling the contour nodes moved the value by more than the tolerance."""


@dataclass(frozen=True)
class AfeShifts:
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not (self.alpha.real < 0.5 and self.beta.real < 0.5):
            raise ValueError("shifts must have real part below 1/2")

    @property
    def total(self) -> complex:
        return self.alpha + self.beta

    def mirrored(self) -> "AfeShifts":
        """``(alpha, beta) -> (-beta, -alpha)``, the shifts of the dual sum."""
        return AfeShifts(-self.beta, -self.alpha)


@dataclass(frozen=True)
class ContourSpec:
    """Truncated line ``Re s = line_re``, ``|Im s| <= half_len``, Gauss-Legendre panels.

    ``|G|`` decays like ``e^{-y^2}`` times ``|p(s)|``, which can be as large as
    ``4|s|^2/|alpha+beta|^2``; ``half_len = 8`` leaves a truncation error
    around ``e^{-63}`` times that factor.
    """

    line_re: float = 1.0
    half_len: float = 8.0
    nodes: int = 512
    panel_nodes: int = 16

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError("need at least 16 contour nodes")
        if not self.line_re > 0:
            raise ValueError("the contour must lie right of the pole at s = 0")
        if not self.half_len > 0:
            raise ValueError("half_len must be positive")

    def doubled(self) -> "ContourSpec":
        return ContourSpec(self.line_re, self.half_len, 2 * self.nodes, self.panel_nodes)

    def rule(self):
        panels = max(1, self.nodes // self.panel_nodes)
        y, w = composite_nodes(-self.half_len, self.half_len, panels, self.panel_nodes)
        return self.line_re + 1j * y, w


def G_weight(s, shifts: AfeShifts):
    """``e^{s^2} ((alpha+beta)^2 - (2s)^2) / (alpha+beta)^2``."""
    ab = shifts.total
    if ab == 0:
        raise ValueError("G is undefined for alpha + beta = 0")
    s = np.asarray(s, dtype=complex)
    out = np.exp(s * s) * (ab * ab - 4.0 * s * s) / (ab * ab)
    return complex(out) if out.ndim == 0 else out


_POLE_TOL = 1e-8


def _check_gamma_args(*zs) -> None:
    for z in zs:
        z = np.asarray(z)
        near = (np.abs(z.imag) < _POLE_TOL) & (z.real < _POLE_TOL) & (
            np.abs(z.real - np.round(z.real)) < _POLE_TOL
        )
        if np.any(near):
            raise ValueError("gamma argument within 1e-8 of a pole")


def _check_height(t: float) -> None:
    if not abs(t) >= 1:
        raise ValueError(f"need |t| >= 1, got {t!r}")


def g_factor(s, t: float, shifts: AfeShifts):
    """``pi^{-s}`` times the ratio of the four gamma values at height ``t``."""
    _check_height(t)
    s = np.asarray(s, dtype=complex)
    a, b = shifts.alpha, shifts.beta
    z1 = (0.5 + a + s + 1j * t) / 2
    z2 = (0.5 + b + s - 1j * t) / 2
    z1_0 = (0.5 + a + 1j * t) / 2
    z2_0 = (0.5 + b - 1j * t) / 2
    _check_gamma_args(z1, z2, z1_0, z2_0)
    logratio = loggamma(z1) - loggamma(z1_0) + loggamma(z2) - loggamma(z2_0)
    out = np.exp(-s * math.log(math.pi) + logratio)
    return complex(out) if out.ndim == 0 else out


def X_factor(t: float, shifts: AfeShifts) -> complex:
    """Functional-equation factor relating the two sums of the approximate functional equation."""
    _check_height(t)
    a, b = shifts.alpha, shifts.beta
    z = [
        (0.5 - a - 1j * t) / 2,
        (0.5 + a + 1j * t) / 2,
        (0.5 - b + 1j * t) / 2,
        (0.5 + b - 1j * t) / 2,
    ]
    _check_gamma_args(*z)
    lg = loggamma(np.array(z))
    return complex(np.exp((a + b) * math.log(math.pi) + lg[0] - lg[1] + lg[2] - lg[3]))


def _V_raw(x, t, shifts, contour, chunk=8192):
    s, w = contour.rule()
    F = G_weight(s, shifts) / s * g_factor(s, t, shifts) * w / (2 * math.pi)
    x = np.asarray(x, dtype=float)
    logx = np.log(np.atleast_1d(x)).ravel()
    out = np.empty(logx.shape, dtype=complex)
    for i in range(0, logx.size, chunk):
        lx = logx[i : i + chunk]
        out[i : i + chunk] = np.exp(-np.outer(lx, s)) @ F
    return out.reshape(x.shape)


def V_weight(x, t: float, shifts: AfeShifts, contour: ContourSpec = ContourSpec(), check: bool = False):
    """``V_{alpha,beta}(x, t)`` by quadrature on the line ``Re s = contour.line_re``.

    Accepts scalar or array ``x``. With ``check=True`` the value is recomputed
    on twice as many nodes and a :class:`QuadratureWarning` is issued when the
    two differ by more than 1e-6.
    """
    if np.any(np.asarray(x) <= 0):
        raise ValueError("x must be positive")
    val = _V_raw(x, t, shifts, contour)
    if check:
        val2 = _V_raw(x, t, shifts, contour.doubled())
        if np.max(np.abs(val2 - val), initial=0.0) > 1e-6:
            warnings.warn("contour quadrature has not converged", QuadratureWarning, stacklevel=2)
    return complex(val) if val.ndim == 0 else val


def _pair_indices(limit: int):
    m = np.arange(1, limit + 1)
    counts = limit // m
    mm = np.repeat(m, counts)
    start = np.repeat(np.cumsum(counts) - counts, counts)
    nn = np.arange(mm.size) - start + 1
    return mm.astype(float), nn.astype(float)


def _grouped_sum(limit, mm, nn, expo_m, expo_n):
    # sum over mn = N of m^{-expo_m} n^{-expo_n}, for every N <= limit
    vals = np.exp(-expo_m * np.log(mm) - expo_n * np.log(nn))
    N = (mm * nn).astype(np.int64)
    re = np.bincount(N, weights=vals.real, minlength=limit + 1)
    im = np.bincount(N, weights=vals.imag, minlength=limit + 1)
    return (re + 1j * im)[1:]


def afe_sides(
    t: float,
    shifts: AfeShifts,
    truncation: int,
    ctx: ZetaContext = ZetaContext(),
    contour: ContourSpec = ContourSpec(),
) -> tuple[complex, complex]:
    """Left side (zeta product) and truncated right side of the functional equation."""
    if truncation < 1:
        raise ValueError("truncation must be at least 1")
    a, b = shifts.alpha, shifts.beta
    lhs = zeta_em(0.5 + a + 1j * t, ctx) * zeta_em(0.5 + b - 1j * t, ctx)
    mm, nn = _pair_indices(truncation)
    N = np.arange(1, truncation + 1, dtype=float)
    # (m/n)^{-it} is folded into the exponents
    d1 = _grouped_sum(truncation, mm, nn, 0.5 + a + 1j * t, 0.5 + b - 1j * t)
    d2 = _grouped_sum(truncation, mm, nn, 0.5 - b + 1j * t, 0.5 - a - 1j * t)
    v1 = V_weight(N, t, shifts, contour)
    v2 = V_weight(N, t, shifts.mirrored(), contour)
    rhs = np.sum((v1 * d1)[::-1]) + X_factor(t, shifts) * np.sum((v2 * d2)[::-1])
    return complex(lhs), complex(rhs)


def afe_residual(
    t: float,
    shifts: AfeShifts,
    truncation: int,
    ctx: ZetaContext = ZetaContext(),
    contour: ContourSpec = ContourSpec(),
) -> float:
    """``|zeta(1/2+alpha+it) zeta(1/2+beta-it) - (truncated sums)|``."""
    lhs, rhs = afe_sides(t, shifts, truncation, ctx, contour)
    return abs(lhs - rhs)


def divisor_mobius_sums(cap: int) -> np.ndarray:
    """``sum_{d | N} mu(d)`` for ``N = 1..cap``, as exact integers."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    mu = mobius_sieve(cap).astype(np.int64)
    out = np.zeros(cap + 1, dtype=np.int64)
    for d in range(1, cap + 1):
        if mu[d]:
            out[d::d] += mu[d]
    return out[1:]


def arith_factor_check(s_re: float, cap: int) -> float:
    """Diagonal arithmetical factor summed over ``hm = kn = N <= cap``.

    Grouping by the common value ``N`` turns the four-fold sum into
    ``sum_N N^{-1-2s} (sum_{h|N} mu(h)) (sum_{k|N} mu(k))``.
    """
    if not s_re > 0:
        raise ValueError("s_re must be positive")
    blocks = divisor_mobius_sums(cap)
    N = np.arange(1, cap + 1, dtype=float)
    terms = (blocks * blocks).astype(float) * N ** (-1.0 - 2.0 * s_re)
    return math.fsum(terms)
