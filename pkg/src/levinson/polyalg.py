"""Dense real-coefficient polynomials in one and two variables.

Everything the main-term machinery needs is polynomial in the integration
variables except a single exponential weight ``e^{2Rv}``, so the weighted
double integral over the unit square reduces to the one-dimensional
exponential moments computed by :func:`exp_moment`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.signal import convolve2d

__all__ = [
    "Polynomial",
    "BivariatePolynomial",
    "MainTermParams",
    "poly_eval",
    "poly_derivative",
    "poly_shift",
    "exp_moment",
    "exp_moments",
    "bipoly_integrate_unit_square_weighted",
    "parse_coeffs",
]


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    c = [float(a) for a in coeffs]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    if not c:
        c = [0.0]
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial ``sum_j coeffs[j] x**j`` with real coefficients.

    Trailing zero coefficients are dropped on construction, so ``degree`` is
    exact. The zero polynomial is stored as ``(0.0,)`` and has degree 0.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float]):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def from_string(cls, text: str) -> "Polynomial":
        """Parse ``"0,1"`` (lowest degree first) into a polynomial."""
        return cls(parse_coeffs(text))

    def to_string(self) -> str:
        return ",".join(repr(a) for a in self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, x):
        # Horner; works for scalars, complex values and numpy arrays
        acc = 0.0 * x + self.coeffs[-1]
        for a in reversed(self.coeffs[:-1]):
            acc = acc * x + a
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0.0])
        return Polynomial([j * a for j, a in enumerate(self.coeffs)][1:])

    def __add__(self, other: "Polynomial | float") -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return Polynomial(a)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial([-a for a in self.coeffs])

    def __sub__(self, other: "Polynomial | float") -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return self + (-other)

    def __rsub__(self, other: float) -> "Polynomial":
        return Polynomial([other]) - self

    def __mul__(self, other: "Polynomial | float") -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial(np.convolve(self.coeffs, other.coeffs))
        return Polynomial([a * other for a in self.coeffs])

    __rmul__ = __mul__

    def integral_unit(self) -> float:
        """Exact value of the integral over [0, 1]."""
        return math.fsum(a / (j + 1) for j, a in enumerate(self.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"


def parse_coeffs(text: str) -> list[float]:
    parts = [p.strip() for p in str(text).split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(f"malformed coefficient list: {text!r}")
    return [float(p) for p in parts]


def poly_eval(p: Polynomial, x):
    return p(x)


def poly_derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


@dataclass(frozen=True)
class BivariatePolynomial:
    """Polynomial ``sum_{i,k} coeffs[i, k] a**i b**k`` in two variables.

    ``names`` only labels the two variables; the default ``("u", "v")``
    matches the unit-square integrals of the main term.
    """

    coeffs: np.ndarray
    names: tuple[str, str] = field(default=("u", "v"))

    def __init__(self, coeffs, names: tuple[str, str] = ("u", "v")):
        c = np.array(coeffs, dtype=float, ndmin=2)
        if c.ndim != 2:
            raise ValueError("bivariate coefficients must form a 2-D grid")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "names", tuple(names))

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape

    def __call__(self, a, b):
        return np.polynomial.polynomial.polyval2d(a, b, self.coeffs)

    def _padded(self, other: "BivariatePolynomial"):
        n = max(self.shape[0], other.shape[0])
        m = max(self.shape[1], other.shape[1])
        x = np.zeros((n, m))
        y = np.zeros((n, m))
        x[: self.shape[0], : self.shape[1]] = self.coeffs
        y[: other.shape[0], : other.shape[1]] = other.coeffs
        return x, y

    def __add__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        x, y = self._padded(other)
        return BivariatePolynomial(x + y, self.names)

    def __sub__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        x, y = self._padded(other)
        return BivariatePolynomial(x - y, self.names)

    def __mul__(self, other) -> "BivariatePolynomial":
        if not isinstance(other, BivariatePolynomial):
            return BivariatePolynomial(self.coeffs * float(other), self.names)
        out = convolve2d(self.coeffs, other.coeffs)
        return BivariatePolynomial(out, self.names)

    __rmul__ = __mul__

    @classmethod
    def outer(cls, p: Polynomial, q: Polynomial, names=("u", "v")) -> "BivariatePolynomial":
        """The product ``p(a) * q(b)``."""
        return cls(np.outer(p.coeffs, q.coeffs), names)

    def first_coefficient(self, i: int) -> Polynomial:
        """Coefficient of ``a**i`` as a polynomial in the second variable."""
        if i >= self.shape[0]:
            return Polynomial([0.0])
        return Polynomial(self.coeffs[i])


def poly_shift(p: Polynomial, var: str = "u", scale: float = 1.0) -> BivariatePolynomial:
    """Expand ``p(var + scale*x)`` as a polynomial in ``(x, var)``.

    Entry ``[i, k]`` of the result is the coefficient of ``x**i var**k``, so
    row 0 is ``p`` itself and row 1 is ``scale * p'``.
    """
    n = len(p.coeffs)
    out = np.zeros((n, n))
    for j, a in enumerate(p.coeffs):
        for i in range(j + 1):
            out[i, j - i] += a * math.comb(j, i) * scale**i
    return BivariatePolynomial(out, ("x", var))


_SERIES_TOL = 1e-18


def _exp_moments_series(kmax: int, R: float) -> np.ndarray:
    # int_0^1 e^{2Rv} v^k dv = sum_m (2R)^m / (m! (k+m+1))
    z = 2.0 * R
    ks = np.arange(kmax + 1, dtype=float)
    out = np.zeros(kmax + 1)
    term = 1.0
    m = 0
    while True:
        contrib = term / (ks + m + 1.0)
        out += contrib
        if m > abs(z) and abs(term) < _SERIES_TOL * np.min(np.abs(out)):
            break
        m += 1
        term *= z / m
    return out


@lru_cache(maxsize=None)
def _gl_unit(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _exp_moments_quadrature(kmax: int, R: float) -> np.ndarray:
    x, w = _gl_unit(96)
    vals = np.exp(2.0 * R * x) * w
    return np.array([np.dot(vals, x**k) for k in range(kmax + 1)])


def exp_moments(kmax: int, R: float) -> np.ndarray:
    """Vector of ``int_0^1 e^{2Rv} v^k dv`` for ``k = 0..kmax``.

    The upward recurrence ``E_k = (e^{2R} - k E_{k-1}) / 2R`` amplifies
    rounding by ``k / 2R`` per step, so it is only used while ``k <= 2R``.
    Higher moments come from the positive power series (no cancellation for
    ``R >= 0``). Strongly negative ``R`` falls back to Gauss-Legendre.
    """
    if kmax < 0:
        raise ValueError("moment index must be non-negative")
    R = float(R)
    if R < -0.5:
        return _exp_moments_quadrature(kmax, R)
    out = _exp_moments_series(kmax, R)
    if R >= 0.5:
        e2r = math.exp(2.0 * R)
        prev = math.expm1(2.0 * R) / (2.0 * R)
        out[0] = prev
        for k in range(1, min(kmax, int(2.0 * R)) + 1):
            prev = (e2r - k * prev) / (2.0 * R)
            out[k] = prev
    return out


def exp_moment(k: int, R: float) -> float:
    """``int_0^1 e^{2Rv} v^k dv``; equals ``1/(k+1)`` at ``R = 0``."""
    if k < 0:
        raise ValueError("moment index must be non-negative")
    return float(exp_moments(k, R)[k])


def bipoly_integrate_unit_square_weighted(g2: BivariatePolynomial, R: float) -> float:
    """Exact ``int_0^1 int_0^1 e^{2Rv} g2(u, v) du dv``."""
    c = g2.coeffs
    E = exp_moments(c.shape[1] - 1, R)
    u_int = 1.0 / np.arange(1, c.shape[0] + 1)
    return float(u_int @ c @ E)


@dataclass(frozen=True)
class MainTermParams:
    """The argument list ``(P, Q, R, theta)`` of the main term.

    ``theta = 1/2`` is accepted (the classical evaluation point) but sits on
    the edge of the range where the moment asymptotic is proved; callers can
    inspect ``boundary_theta`` and attach a warning to their output.
    """

    P: Polynomial
    Q: Polynomial
    R: float
    theta: float
    check: bool = True

    def __post_init__(self):
        if self.check:
            self.validate()

    def validate(self, tol: float = 1e-12) -> None:
        if abs(self.P(0.0)) > tol:
            raise ValueError(f"P(0) must be 0, got {self.P(0.0)!r}")
        if abs(self.P(1.0) - 1.0) > tol:
            raise ValueError(f"P(1) must be 1, got {self.P(1.0)!r}")
        if abs(self.Q(0.0) - 1.0) > tol:
            raise ValueError(f"Q(0) must be 1, got {self.Q(0.0)!r}")
        if not self.R >= 0.0:
            raise ValueError(f"R must be non-negative, got {self.R!r}")
        if not 0.0 < self.theta <= 0.5:
            raise ValueError(f"theta must lie in (0, 1/2], got {self.theta!r}")

    @property
    def boundary_theta(self) -> bool:
        return self.theta == 0.5

    @property
    def warnings(self) -> list[str]:
        if self.boundary_theta:
            return ["theta = 1/2 is the boundary of the admissible range (0, 1/2)"]
        return []
