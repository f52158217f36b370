"""Path-wise solution of −(A_ε u')' = f on (0, 1) with u(0) = u(1) = 0.

The problem integrates in closed form:

    u_ε(x) = g(Z) = −Z₁ + Z₂ Z₃ / Z₄,   Z_i = ∫₀¹ H_i(s) / A_ε(s) ds,

with H = (F·1_(0,x), F, 1_(0,x), 1) and F the antiderivative of f. The same
formula with A₀ in place of A_ε gives the homogenized solution u₀, and
expanding g around the homogenized integrals splits u_ε = u₀ + v_ε + R_ε.

All integrals against 1/A_ε use a Gauss rule on panels cut at the cell edges,
at x and at the breakpoints of f, so the integrand is smooth on every panel.
"""

__docformat__ = 'google'

__all__ = [
    'antiderivative',
    'second_antiderivative',
    'CellPanels',
    'cell_panels',
    'HomogenizedIntegrals',
    'homogenized_integrals',
    'homogenized_profile',
    'z_batch',
    'z_vector',
    'solve_point',
    'solve_batch',
    'solve_homogenized',
    'green_kernel',
    'expansion_from_z',
    'expansion_terms',
    'solve_path',
    'linearized_point',
    'l2_distance'
]

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np
from scipy.integrate import trapezoid

from homogldp.entities import (
    MediaModel,
    ParameterizedCoarse,
    ConvolvedCoarse,
    FieldRealization,
    SourceSpec,
    ZVector,
    SolutionPath
)
from homogldp.errors import DomainError
from homogldp.lookups import Defaults
from homogldp.media import coarse_field, cells_for, inv_homogenized
from homogldp.quadrature import panel_edges, panel_rule, integrate_segments

log = logging.getLogger(__name__)

_CHUNK = 1024

def _check_point(x: float) -> None:
    if not 0.0 < x < 1.0:
        raise DomainError(f'x must lie in (0, 1), got {x}')

def antiderivative(f: SourceSpec, s: Any) -> Any:
    """F(s) = ∫₀ˢ f, exact for piecewise-constant f.

    Examples:
        >>> antiderivative(SourceSpec(), 0.4)
        0.0
        >>> round(antiderivative(SourceSpec(), 0.5), 12)
        0.05
        >>> round(antiderivative(SourceSpec(), 1.0), 12)
        0.1
    """
    s = np.asarray(s, dtype=float)
    edges = f.edges
    covered = np.clip(np.subtract.outer(s, edges[:-1]), 0.0, np.diff(edges))
    result = covered @ f.values
    return float(result) if result.ndim == 0 else result

def second_antiderivative(f: SourceSpec, s: Any) -> Any:
    """∫₀ˢ F, exact for piecewise-constant f.

    Examples:
        >>> round(second_antiderivative(SourceSpec(), 0.5), 12)
        0.00125
    """
    s = np.asarray(s, dtype=float)
    edges = f.edges
    starts = antiderivative(f, edges[:-1])
    covered = np.clip(np.subtract.outer(s, edges[:-1]), 0.0, np.diff(edges))
    result = (covered * starts + 0.5 * covered ** 2 * f.values).sum(axis=-1)
    return float(result) if result.ndim == 0 else result

@dataclass(frozen=True, eq=False)
class CellPanels:
    """
    Gauss rule on [0, 1] cut at the cells of width ε, at x and at the
    breakpoints of f.

    Args:
        epsilon: Cell width
        x: Observation point
        edges: Panel edges
        cell: Cell index of every panel
        nodes: Quadrature nodes, shape (panels, order)
        weights: Quadrature weights, shape (panels, order)
        h: H(s) at the nodes, shape (panels, order, 4)
    """
    epsilon: float
    x: float
    edges: np.ndarray
    cell: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    h: np.ndarray

    @property
    def weighted_h(self) -> np.ndarray:
        return self.weights[..., None] * self.h

    def cell_moments(self, n_cells: int) -> np.ndarray:
        """∫_cell H(s) ds for every cell, shape (n_cells, 4)."""
        moments = np.zeros((n_cells, 4))
        np.add.at(moments, self.cell, self.weighted_h.sum(axis=1))
        return moments

@lru_cache(maxsize=64)
def cell_panels(epsilon: float, f: SourceSpec, x: float, order: int) -> CellPanels:
    _check_point(x)
    n = cells_for(epsilon)
    edges = panel_edges(x, f.breakpoints, n_uniform=n)
    nodes, weights = panel_rule(edges, order)
    midpoints = 0.5 * (edges[:-1] + edges[1:])
    cell = np.minimum((midpoints / epsilon).astype(int), n - 1)
    big_f = antiderivative(f, nodes)
    inside = (nodes < x).astype(float)
    h = np.stack([big_f * inside, big_f, inside, np.ones_like(nodes)], axis=-1)
    return CellPanels(epsilon, x, edges, cell, nodes, weights, h)

def _default_order() -> int:
    return int(Defaults.get_lookup().numeric('gauss_order'))

def _default_tol() -> float:
    return float(Defaults.get_lookup().numeric('simpson_tol'))

@dataclass(frozen=True)
class HomogenizedIntegrals:
    """
    The integrals against 1/A₀ that enter u₀, G and the expansion terms.

    Args:
        inv_mean: a = ∫₀¹ 1/A₀
        flux_mean: b = ∫₀¹ F/A₀
        inv_to_x: P_x = ∫₀ˣ 1/A₀
        flux_to_x: Q_x = ∫₀ˣ F/A₀
    """
    inv_mean: float
    flux_mean: float
    inv_to_x: Any
    flux_to_x: Any

    @property
    def ratio(self) -> float:
        return self.flux_mean / self.inv_mean

    @property
    def u0(self) -> Any:
        return -self.flux_to_x + self.ratio * self.inv_to_x

    def z_mean(self) -> np.ndarray:
        """The mean vector z* = (Q_x, b, P_x, a) of Z_ε."""
        return np.array([self.flux_to_x, self.flux_mean, self.inv_to_x, self.inv_mean])

def homogenized_profile(
        model: MediaModel,
        f: SourceSpec,
        grid: np.ndarray,
        tol: float | None = None) -> HomogenizedIntegrals:
    """Homogenized integrals with P_x and Q_x evaluated on a whole grid.

    Constant A₀ (convolved media) is integrated exactly. Varying A₀ is
    integrated segment by segment between the grid points and the
    breakpoints of f with the Simpson rule.
    """
    grid = np.asarray(grid, dtype=float)
    coarse = model.coarse
    if not isinstance(coarse, ParameterizedCoarse):
        inv = coarse.xi * coarse.h_norm
        return HomogenizedIntegrals(
            inv,
            inv * second_antiderivative(f, 1.0),
            inv * grid,
            inv * second_antiderivative(f, grid)
        )
    tol = _default_tol() if tol is None else tol
    edges = panel_edges(grid, f.breakpoints)
    inv_parts = integrate_segments(lambda s: inv_homogenized(model, s), edges, tol)
    flux_parts = integrate_segments(lambda s: antiderivative(f, s) * inv_homogenized(model, s), edges, tol)
    inv_cum = np.concatenate(([0.0], np.cumsum(inv_parts)))
    flux_cum = np.concatenate(([0.0], np.cumsum(flux_parts)))
    index = np.clip(np.searchsorted(edges, grid - 1e-14), 0, len(edges) - 1)
    return HomogenizedIntegrals(float(inv_cum[-1]), float(flux_cum[-1]), inv_cum[index], flux_cum[index])

@lru_cache(maxsize=256)
def homogenized_integrals(
        model: MediaModel,
        f: SourceSpec,
        x: float,
        tol: float | None = None) -> HomogenizedIntegrals:
    """Cached homogenized integrals (a, b, P_x, Q_x) at a single point."""
    profile = homogenized_profile(model, f, np.array([x]), tol)
    return HomogenizedIntegrals(
        profile.inv_mean,
        profile.flux_mean,
        float(profile.inv_to_x[0]),
        float(profile.flux_to_x[0])
    )

def _inv_at_nodes(model: MediaModel, cells: np.ndarray, panels: CellPanels) -> np.ndarray:
    """1/A_ε at the panel nodes for a batch of realizations, shape (batch, panels, order)."""
    coarse = model.coarse
    values = cells[:, panels.cell]
    if isinstance(coarse, ParameterizedCoarse):
        alpha = coarse_field(coarse, panels.nodes)
        return 1.0 / (alpha[None, :, :] + coarse.nu_b * values[:, :, None])
    return np.broadcast_to(values[:, :, None], values.shape + (panels.nodes.shape[1],))

def z_batch(model: MediaModel, cells: np.ndarray, panels: CellPanels) -> np.ndarray:
    """Z_ε for a batch of realizations given by their cell values, shape (batch, 4).

    `cells` holds θ (parameterized) or γ (convolved) with one row per
    realization.
    """
    cells = np.atleast_2d(cells)
    if not model.is_parameterized:
        return cells @ panels.cell_moments(cells.shape[1])
    weighted_h = panels.weighted_h
    chunks = [
        np.einsum('bpk,pki->bi', _inv_at_nodes(model, cells[start:start + _CHUNK], panels), weighted_h)
        for start in range(0, cells.shape[0], _CHUNK)
    ]
    return np.concatenate(chunks, axis=0)

def _g(z: np.ndarray) -> np.ndarray:
    return -z[..., 0] + z[..., 1] * z[..., 2] / z[..., 3]

def z_vector(
        model: MediaModel,
        realization: FieldRealization,
        f: SourceSpec,
        x: float,
        order: int | None = None) -> ZVector:
    """The integral vector Z_ε of one realization at x.

    Examples:
        >>> flat = MediaModel(ParameterizedCoarse((0.0,) * 8, nu_b=0.0))
        >>> z = z_vector(flat, FieldRealization(0.1, np.zeros(10)), SourceSpec(), 0.5)
        >>> [round(v, 12) for v in z.as_array()]
        [0.00125, 0.05, 0.5, 1.0]
    """
    order = _default_order() if order is None else order
    panels = cell_panels(realization.epsilon, f, float(x), order)
    return ZVector.from_array(z_batch(model, realization.inv_cells[None, :], panels)[0])

def solve_point(
        model: MediaModel,
        realization: FieldRealization,
        f: SourceSpec,
        x: float,
        order: int | None = None) -> float:
    """u_ε(x) = −z1 + z2·z3/z4."""
    return z_vector(model, realization, f, x, order).g

def solve_batch(
        model: MediaModel,
        cells: np.ndarray,
        f: SourceSpec,
        x: float,
        epsilon: float,
        order: int | None = None) -> np.ndarray:
    """u_ε(x) for a batch of realizations (one row of cell values each)."""
    order = _default_order() if order is None else order
    return _g(z_batch(model, cells, cell_panels(epsilon, f, float(x), order)))

def solve_homogenized(model: MediaModel, f: SourceSpec, grid: Any, tol: float | None = None) -> SolutionPath:
    """u₀ on a grid; exact for constant A₀, Simpson to `tol` otherwise."""
    grid = np.asarray(grid, dtype=float)
    if np.any((grid < 0) | (grid > 1)):
        raise DomainError('grid must lie in [0, 1]')
    u0 = np.asarray(homogenized_profile(model, f, grid, tol).u0, dtype=float)
    u0[(grid == 0.0) | (grid == 1.0)] = 0.0
    return SolutionPath(grid, u0, u0=u0)

def green_kernel(
        model: MediaModel,
        f: SourceSpec,
        x: float,
        s: Any,
        integrals: HomogenizedIntegrals | None = None) -> Any:
    """Kernel G(x, s) with v_ε(x) = ∫ G(x, s)(1/A_ε − 1/A₀)(s) ds.

    G = (F(s) − b/a)(P_x/a − 1) for s ≤ x and (F(s) − b/a) P_x/a for s > x.

    Examples:
        >>> unit = MediaModel(ConvolvedCoarse(1))
        >>> round(green_kernel(unit, SourceSpec(), 0.5, 0.2), 12)
        0.025
        >>> round(green_kernel(unit, SourceSpec(), 0.5, 0.8), 12)
        0.025
    """
    integrals = integrals or homogenized_integrals(model, f, float(x))
    s = np.asarray(s, dtype=float)
    shifted = antiderivative(f, s) - integrals.ratio
    fraction = integrals.inv_to_x / integrals.inv_mean
    result = shifted * np.where(s <= x, fraction - 1.0, fraction)
    return float(result) if np.ndim(result) == 0 else result

def expansion_from_z(z: np.ndarray, integrals: HomogenizedIntegrals) -> tuple[Any, Any]:
    """Split g(z) − u₀ into the first-order term v_ε and the remainder R_ε.

    With X_x = z3 − P_x, Y_x = z1 − Q_x, X_1 = z4 − a, Y_1 = z2 − b:

        v_ε = −Y_x + (Y_1 − X_1 b/a) P_x/a + X_x b/a
        R_ε = Y_1 X_x/a − X_1 (Y_1 P_x + b X_x + Y_1 X_x)/a² + X_1² z2 z3/(a² z4)

    so that g(z) = u₀ + v_ε + R_ε exactly.
    """
    z = np.asarray(z, dtype=float)
    a, b = integrals.inv_mean, integrals.flux_mean
    p, q = integrals.inv_to_x, integrals.flux_to_x
    x_x, y_x = z[..., 2] - p, z[..., 0] - q
    x_1, y_1 = z[..., 3] - a, z[..., 1] - b
    v = -y_x + (y_1 - x_1 * b / a) * p / a + x_x * b / a
    r = (
        y_1 * x_x / a
        - x_1 * (y_1 * p + b * x_x + y_1 * x_x) / a ** 2
        + x_1 ** 2 * z[..., 1] * z[..., 2] / (a ** 2 * z[..., 3])
    )
    return v, r

def expansion_terms(
        model: MediaModel,
        realization: FieldRealization,
        f: SourceSpec,
        x: float,
        order: int | None = None) -> tuple[float, float]:
    """(v_ε(x), R_ε(x)) of one realization."""
    z = z_vector(model, realization, f, x, order).as_array()
    v, r = expansion_from_z(z, homogenized_integrals(model, f, float(x)))
    return float(v), float(r)

def linearized_point(
        model: MediaModel,
        realization: FieldRealization,
        f: SourceSpec,
        x: float,
        order: int | None = None) -> float:
    """u₀(x) + v_ε(x)."""
    v, _ = expansion_terms(model, realization, f, x, order)
    return homogenized_integrals(model, f, float(x)).u0 + v

def solve_path(
        model: MediaModel,
        realization: FieldRealization,
        f: SourceSpec,
        grid: Any,
        order: int | None = None) -> SolutionPath:
    """u_ε with its components u₀, v_ε, R_ε on a grid in [0, 1].

    The cumulative integrals of 1/A_ε and F/A_ε are accumulated over panels
    cut at the cells, the grid points and the breakpoints of f.
    """
    order = _default_order() if order is None else order
    grid = np.asarray(grid, dtype=float)
    if np.any((grid < 0) | (grid > 1)) or np.any(np.diff(grid) < 0):
        raise DomainError('grid must be sorted and lie in [0, 1]')
    epsilon = realization.epsilon
    n = cells_for(epsilon)
    edges = panel_edges(grid, f.breakpoints, n_uniform=n)
    nodes, weights = panel_rule(edges, order)
    midpoints = 0.5 * (edges[:-1] + edges[1:])
    cell = np.minimum((midpoints / epsilon).astype(int), n - 1)
    values = realization.inv_cells[cell][:, None]
    coarse = model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        inv = 1.0 / (coarse_field(coarse, nodes) + coarse.nu_b * values)
    else:
        inv = np.broadcast_to(values, nodes.shape)
    inv_cum = np.concatenate(([0.0], np.cumsum(np.sum(weights * inv, axis=1))))
    flux_cum = np.concatenate(([0.0], np.cumsum(np.sum(weights * antiderivative(f, nodes) * inv, axis=1))))
    index = np.clip(np.searchsorted(edges, grid - 1e-14), 0, len(edges) - 1)
    z = np.stack([
        flux_cum[index],
        np.full(grid.shape, flux_cum[-1]),
        inv_cum[index],
        np.full(grid.shape, inv_cum[-1])
    ], axis=-1)
    u = _g(z)
    integrals = homogenized_profile(model, f, grid)
    v, r = expansion_from_z(z, integrals)
    u0 = np.asarray(integrals.u0, dtype=float)
    boundary = (grid == 0.0) | (grid == 1.0)
    for column in (u, u0, v, r):
        column[boundary] = 0.0
    return SolutionPath(grid, u, u0=u0, v_eps=v, r_eps=r)

def l2_distance(first: np.ndarray, second: np.ndarray, grid: np.ndarray) -> float:
    """L² distance of two grid functions by the trapezoid rule."""
    return float(np.sqrt(trapezoid((np.asarray(first) - np.asarray(second)) ** 2, grid)))
