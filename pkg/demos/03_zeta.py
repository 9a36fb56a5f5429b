"""Euler-Maclaurin zeta against known values, and the first zeros.

Zeros on the critical line are sign changes of Hardy's Z(t), which is real;
bisection on Z pins them to machine precision.
"""
import math

import numpy as np
from scipy.optimize import brentq

from levinson import zeta_em
from levinson.special import loggamma
from levinson.zetakernel import zeta_derivatives

print(f"zeta(2) - pi^2/6 = {abs(zeta_em(2.0) - math.pi ** 2 / 6):.2e}")
print(f"zeta(1/2)        = {zeta_em(0.5).real:.15f}")
d = zeta_derivatives(0.5 + 0j, 3)
print("zeta^(j)(1/2)    =", ", ".join(f"{x.real:.10f}" for x in d))


def hardy_Z(t):
    theta = loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)
    return (np.exp(1j * theta) * zeta_em(0.5 + 1j * t)).real


grid = np.linspace(10, 50, 801)
vals = [hardy_Z(t) for t in grid]
zeros = [brentq(hardy_Z, a, b, xtol=1e-14) for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]) if fa * fb < 0]
print("\nzeros with 10 < t < 50:")
for z in zeros:
    print(f"  {z:.12f}   |zeta| there = {abs(zeta_em(0.5 + 1j * z)):.1e}")
