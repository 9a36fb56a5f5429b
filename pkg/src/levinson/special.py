"""Complex log-gamma from Stirling's series."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli

_B = bernoulli(24)
# B_{2k} / (2k (2k-1)), k = 1..12
_STIRLING = np.array([_B[2 * k] / (2 * k * (2 * k - 1)) for k in range(1, 13)])
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_SHIFT_RADIUS = 16.0


def loggamma(z):
    """Principal branch of ``log Gamma(z)`` for complex ``z`` off the poles.

    Points with ``|z| < 16`` or ``Re z < 0`` are pushed right with
    ``log Gamma(z) = log Gamma(z + n) - sum_{k<n} log(z + k)``; the principal
    logs keep the branch continuous away from the negative real axis, which
    is where the standard branch cut lies. The series is then truncated after
    twelve Bernoulli terms (error below 1e-16 for ``|z| >= 16``).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any((z.real <= 0) & (np.abs(z.imag) < 1e-300) & (z.real == np.round(z.real))):
        raise ValueError("log-gamma pole at a non-positive integer")
    need = np.where(
        (np.abs(z) < _SHIFT_RADIUS) | (z.real < 0),
        np.ceil(np.maximum(_SHIFT_RADIUS - z.real, 0.0)),
        0.0,
    ).astype(int)
    correction = np.zeros_like(z)
    w = z.copy()
    for k in range(int(need.max(initial=0))):
        active = need > k
        correction[active] += np.log(w[active])
        w[active] += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    out = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series * inv - correction
    return out[0] if scalar else out
