"""Approximate functional equation: truncated sums against the zeta product.

The weight G(s) carries the factor 1/(alpha + beta)^2, so tiny shifts blow
up the tail of the sums and V(x, t) itself strays far from 1 for small x.
Shifts of size 1/log t behave well.
"""
import math

from levinson import AfeShifts, V_weight, afe_sides

t = 100.0
for a in (0.01, 0.05, 1 / math.log(200)):
    sh = AfeShifts(a, a)
    print(f"alpha = beta = {a:.4f}:  V(1, 1000) = {V_weight(1.0, 1000.0, sh).real:.6f}")
    for trunc in (25_000, 50_000, 100_000, 200_000):
        lhs, rhs = afe_sides(t, sh, trunc)
        print(f"    truncation {trunc:>7d}   residual {abs(lhs - rhs):.3e}")
