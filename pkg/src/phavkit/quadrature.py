"""Composite Gauss-Legendre rules for radial integrals on ``[0, R]``."""

import functools
import math

import numpy as np

GL_ORDER = 16


@functools.lru_cache(maxsize=8)
def _gauss_legendre(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(upper, max_width, order=GL_ORDER):
    """Nodes and weights of equal panels (width <= ``max_width``) tiling ``[0, upper]``."""
    n_panels = max(1, math.ceil(upper / max_width))
    width = upper / n_panels
    x, w = _gauss_legendre(order)
    left = width * np.arange(n_panels)[:, None]
    nodes = left + 0.5 * width * (x[None, :] + 1.0)
    weights = np.broadcast_to(0.5 * width * w, nodes.shape)
    return nodes.ravel(), weights.ravel().copy()


def gaussian_cutoff(rate, floor=1e-17):
    """Smallest ``R`` with ``R * exp(-rate * R**2) < floor``.

    Bounds where a radial integrand with Gaussian envelope ``exp(-rate r^2)``
    can be cut off.
    """
    r = math.sqrt(-math.log(floor) / rate)
    while r * math.exp(-rate * r * r) >= floor:
        r *= 1.05
    return r
