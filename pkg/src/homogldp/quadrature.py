"""Quadrature rules used by the solver, corrector and ldp modules.

Two families are provided:

- fixed-order Gauss-Legendre rules on panel grids, for integrands that are
  smooth between known breakpoints (cell edges, the observation point, the
  breakpoints of f);
- adaptive Simpson quadrature to an absolute tolerance, for the homogenized
  integrals whose integrand may have kinks at unknown positions.
"""

__docformat__ = 'google'

__all__ = [
    'gauss_legendre',
    'panel_edges',
    'panel_rule',
    'simpson',
    'integrate_segments'
]

import logging
from functools import cache
from typing import Callable

import numpy as np

from homogldp.errors import NumericalError

log = logging.getLogger(__name__)

@cache
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [−1, 1]."""
    if order < 1:
        raise ValueError(f'Gauss order must be positive, got {order}')
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights

def panel_edges(*splits: np.ndarray | float | list[float], n_uniform: int = 0) -> np.ndarray:
    """Sorted unique panel edges over [0, 1].

    Args:
        *splits: Points that must be panel edges
        n_uniform: Number of uniform panels to merge in

    Examples:
        >>> panel_edges(0.5, [0.25, 0.5]).tolist()
        [0.0, 0.25, 0.5, 1.0]
        >>> panel_edges(n_uniform=2).tolist()
        [0.0, 0.5, 1.0]
    """
    parts = [np.array([0.0, 1.0])]
    if n_uniform > 0:
        parts.append(np.linspace(0.0, 1.0, n_uniform + 1))
    for split in splits:
        parts.append(np.atleast_1d(np.asarray(split, dtype=float)))
    edges = np.unique(np.concatenate(parts))
    if edges[0] < 0.0 or edges[-1] > 1.0:
        raise NumericalError('panel split outside [0, 1]')
    # merge edges closer than rounding noise
    keep = np.concatenate(([True], np.diff(edges) > 1e-14))
    return edges[keep]

def panel_rule(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule of the given order on every panel [edges[p], edges[p+1]].

    Returns:
        nodes and weights, both of shape (n_panels, order)

    Examples:
        >>> nodes, weights = panel_rule(np.array([0.0, 0.5, 1.0]), 2)
        >>> round(float(np.sum(weights * nodes ** 3)), 12)
        0.25
    """
    ref_nodes, ref_weights = gauss_legendre(order)
    lo = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]
    nodes = lo + half * (ref_nodes[None, :] + 1.0)
    weights = half * ref_weights[None, :]
    return nodes, weights

_MAX_INTERVALS = 2 ** 20

def _values(func: Callable[[np.ndarray], np.ndarray], s: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(func(s), dtype=float), s.shape)

def simpson(
        func: Callable[[np.ndarray], np.ndarray],
        a: float,
        b: float,
        tol: float = 1e-10,
        max_depth: int = 50,
        min_depth: int = 3) -> float:
    """Integrate a vectorized function on [a, b] by adaptive Simpson quadrature.

    Every interval is compared with the sum of its two halves; it is accepted
    with a Richardson correction once the difference is below 15 times its
    share of `tol`, and split otherwise. Each share halves with its interval,
    so the accepted errors add up to at most `tol`. All unresolved intervals
    of one depth are evaluated in a single call of `func`.

    Raises:
        NumericalError: intervals still unresolved after `max_depth` splits, or
            more than `_MAX_INTERVALS` of them pending at once

    Examples:
        >>> round(simpson(lambda s: s ** 2, 0.0, 1.0), 12)
        0.333333333333
        >>> round(simpson(np.abs, -1.0, 2.0), 8)
        2.5
    """
    if b <= a:
        return 0.0
    lo, hi = np.array([a], dtype=float), np.array([b], dtype=float)
    mid = 0.5 * (lo + hi)
    ends = _values(func, np.concatenate([lo, mid, hi]))
    f_lo, f_mid, f_hi = ends[:1], ends[1:2], ends[2:]
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    share = np.array([tol], dtype=float)
    total = 0.0
    for depth in range(max_depth + 1):
        n = len(lo)
        quarters = _values(func, np.concatenate([0.5 * (lo + mid), 0.5 * (mid + hi)]))
        f_left, f_right = quarters[:n], quarters[n:]
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_left + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_right + f_hi)
        error = (left + right - whole) / 15.0
        done = np.abs(error) <= share if depth >= min_depth else np.zeros(n, dtype=bool)
        total += float(np.sum((left + right + error)[done]))
        split = ~done
        if not np.any(split):
            log.debug('Simpson on [%g, %g] converged at depth %d', a, b, depth)
            return total
        lo, hi = np.concatenate([lo[split], mid[split]]), np.concatenate([mid[split], hi[split]])
        f_lo = np.concatenate([f_lo[split], f_mid[split]])
        f_hi = np.concatenate([f_mid[split], f_hi[split]])
        f_mid = np.concatenate([f_left[split], f_right[split]])
        whole = np.concatenate([left[split], right[split]])
        share = np.tile(0.5 * share[split], 2)
        mid = 0.5 * (lo + hi)
        if len(lo) > _MAX_INTERVALS:
            break
    raise NumericalError(f'Simpson rule did not reach tolerance {tol:g} on [{a:g}, {b:g}]')

def integrate_segments(
        func: Callable[[np.ndarray], np.ndarray],
        edges: np.ndarray,
        tol: float = 1e-10) -> np.ndarray:
    """Integral of `func` over each segment [edges[i], edges[i+1]].

    The total tolerance is shared among segments in proportion to their length.
    """
    total = float(edges[-1] - edges[0]) or 1.0
    return np.array([
        simpson(func, float(lo), float(hi), tol * max((hi - lo) / total, 1e-3))
        for lo, hi in zip(edges[:-1], edges[1:])
    ])
