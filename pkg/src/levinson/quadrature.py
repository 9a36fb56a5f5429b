"""Composite Gauss-Legendre rules."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]; cached, read-only."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(a: float, b: float, n_panels: int, nodes: int = 16):
    """Equal-width panels on ``[a, b]``.

    Returns ``(starts, width, offsets, weights)``: node ``k`` of panel ``p``
    sits at ``starts[p] + offsets[k]`` with weight ``weights[k]``.
    """
    if n_panels < 1:
        raise ValueError("need at least one panel")
    width = (b - a) / n_panels
    x, w = gauss_legendre(nodes)
    starts = a + width * np.arange(n_panels)
    offsets = 0.5 * width * (x + 1.0)
    weights = 0.5 * width * w
    return starts, width, offsets, weights


def composite_nodes(a: float, b: float, n_panels: int, nodes: int = 16):
    """Flat arrays ``(t, w)`` of a composite rule on ``[a, b]``."""
    starts, _, offsets, weights = panel_rule(a, b, n_panels, nodes)
    t = (starts[:, None] + offsets[None, :]).ravel()
    w = np.broadcast_to(weights, (n_panels, nodes)).ravel()
    return t, w
