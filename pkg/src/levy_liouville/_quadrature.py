"""Shared quadrature helpers: Gauss-Legendre panels, angular rules, dyadic shells.

Jump measures are integrated over dyadic shells 2^j <= |y| < 2^(j+1) (and the
mirrored inner scales).  Each shell uses composite Gauss-Legendre panels; the
panel count grows with the expected oscillation z = |y|*|xi| so that the rule
stays accurate for moderately large frequencies.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_nodes(a: float, b: float, n_panels: int, n_gl: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = gl_rule(n_gl)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=8)
def angular_rule(dimension: int, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Directions and weights integrating over the unit sphere S^{d-1}.

    d=1 uses the two signs, d=2 a trapezoid rule in the angle, d=3 a product
    of Gauss-Legendre in cos(theta) with a trapezoid in phi.
    """
    if dimension == 1:
        dirs = np.array([[1.0], [-1.0]])
        wts = np.array([1.0, 1.0])
    elif dimension == 2:
        theta = 2.0 * np.pi * np.arange(order) / order
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        wts = np.full(order, 2.0 * np.pi / order)
    elif dimension == 3:
        u, wu = gl_rule(order)
        phi = 2.0 * np.pi * np.arange(order) / order
        su = np.sqrt(1.0 - u**2)
        dirs = np.stack(
            [
                np.outer(su, np.cos(phi)).ravel(),
                np.outer(su, np.sin(phi)).ravel(),
                np.outer(u, np.ones_like(phi)).ravel(),
            ],
            axis=1,
        )
        wts = np.outer(wu, np.full(order, 2.0 * np.pi / order)).ravel()
    else:
        raise ValueError(f"angular rule only available for d in 1..3, got {dimension}")
    return dirs, wts


def sphere_area(dimension: int) -> float:
    """Surface measure of S^{d-1}."""
    return 2.0 * math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0)


def geometric_tail(last: complex, prev: complex, ratio_cap: float = 0.995) -> complex:
    """Extrapolated tail of a (near-)geometric shell-sum sequence.

    Exact for pure power-law shells; returns 0 when the sequence has already
    hit zero.
    """
    mag_last = abs(last)
    mag_prev = abs(prev)
    if mag_last == 0.0 or mag_prev == 0.0:
        return 0.0 * last
    rho = min(mag_last / mag_prev, ratio_cap)
    return last * rho / (1.0 - rho)


def geometric_tail_array(last: np.ndarray, prev: np.ndarray,
                         ratio_cap: float = 0.995) -> np.ndarray:
    """Vectorised geometric_tail over batches of shell sums."""
    mag_last = np.abs(last)
    mag_prev = np.abs(prev)
    rho = np.where(mag_prev > 0.0,
                   np.minimum(mag_last / np.maximum(mag_prev, 1e-300), ratio_cap),
                   0.0)
    return last * rho / (1.0 - rho)


def fit_loglog_slope(radii: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and intercept of log(values) against log(radii)."""
    lx = np.log(np.asarray(radii, dtype=float))
    ly = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def pairwise_sum(values: np.ndarray) -> float:
    """Deterministic pairwise summation (numpy's default reduction)."""
    return float(np.sum(values))
