"""Compiled Dirichlet-polynomial sums over Gauss-Legendre panels."""
from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is too old for numba; the portable workqueue layer suffices
numba.config.THREADING_LAYER = "workqueue"


@njit(parallel=True, cache=True)
def panel_dirichlet_sums(starts, phase_re, phase_im, logn, coef, ncut):
    """``out[p, k] = sum_{i < ncut[p]} coef[i] exp(-1j (starts[p] + offset_k) logn[i])``.

    ``phase_re[i, k] + 1j phase_im[i, k] = exp(-1j offset_k logn[i])`` is shared by all
    panels, so each panel costs one sin/cos per term plus one complex
    multiply-add per node. Panels are independent and written to disjoint
    rows, so the result does not depend on the thread count.
    """
    n_panels = starts.shape[0]
    n_nodes = phase_re.shape[1]
    out = np.zeros((n_panels, n_nodes), dtype=np.complex128)
    for p in prange(n_panels):
        t0 = starts[p]
        acc_re = np.zeros(n_nodes)
        acc_im = np.zeros(n_nodes)
        # reversed order adds the small terms first
        for i in range(ncut[p] - 1, -1, -1):
            ph = t0 * logn[i]
            zr = coef[i] * np.cos(ph)
            zi = -coef[i] * np.sin(ph)
            for k in range(n_nodes):
                er = phase_re[i, k]
                ei = phase_im[i, k]
                acc_re[k] += zr * er - zi * ei
                acc_im[k] += zr * ei + zi * er
        for k in range(n_nodes):
            out[p, k] = acc_re[k] + 1j * acc_im[k]
    return out
