"""Gaussian corrector of the homogenized solution.

(u_ε − u₀)/√ε converges in law to v(x) = ∫₀¹ G(x,t) σ(t) dW_t, a centered
Gaussian process with variance C_c(x) = ∫₀¹ G(x,t)² σ²(t) dt.
"""

__docformat__ = 'google'

__all__ = [
    'corrector_variance',
    'corrector_covariance',
    'corrector_kernel_matrix',
    'sample_corrector_paths',
    'sample_corrector',
    'gaussian_rate',
    'ValidityReport',
    'clt_validity',
    'corrector_empirical_rate'
]

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, stats

from homogldp.entities import CorrectorSpec, ConvolvedCoarse, MediaModel, SolutionPath
from homogldp.errors import DomainError, NumericalError
from homogldp.lookups import Defaults
from homogldp.media import sigma_sq
from homogldp.quadrature import panel_edges
from homogldp.rng import Rng, map_blocks
from homogldp.solver import antiderivative, homogenized_integrals, green_kernel

log = logging.getLogger(__name__)

def _integrate_pieces(func: Callable[[float], float], edges: np.ndarray, epsabs: float) -> float:
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        result = integrate.quad(func, lo, hi, epsabs=epsabs, epsrel=1e-10, limit=200, full_output=True)
        value, error = result[0], result[1]
        if len(result) > 3 and error > max(1e3 * epsabs, 1e-10 * abs(value)):
            raise NumericalError(f'corrector quadrature failed on [{lo:g}, {hi:g}]: {result[3]}')
        total += value
    return total

def corrector_covariance(spec: CorrectorSpec, x1: float, x2: float, tol: float = 1e-12) -> float:
    """Cov(v(x1), v(x2)) = ∫₀¹ G(x1,t) G(x2,t) σ²(t) dt.

    Raises:
        DomainError: a point lies outside (0, 1)
        NumericalError: the adaptive quadrature did not converge
    """
    for x in (x1, x2):
        if not 0.0 < x < 1.0:
            raise DomainError(f'x must lie in (0, 1), got {x}')
    model, f = spec.model, spec.f
    first = homogenized_integrals(model, f, float(x1))
    second = homogenized_integrals(model, f, float(x2))

    def integrand(t: float) -> float:
        return (
            green_kernel(model, f, x1, t, first)
            * green_kernel(model, f, x2, t, second)
            * sigma_sq(model, t)
        )

    edges = panel_edges(x1, x2, f.breakpoints)
    return _integrate_pieces(integrand, edges, tol / max(len(edges) - 1, 1))

def corrector_variance(spec: CorrectorSpec, x: float, tol: float = 1e-12) -> float:
    """C_c(x) = ∫₀¹ G(x,t)² σ²(t) dt by adaptive quadrature split at x and
    at the breakpoints of f.

    Examples:
        >>> spec = CorrectorSpec(MediaModel(ConvolvedCoarse(1)))
        >>> round(corrector_variance(spec, 0.5), 9)
        0.001166667
    """
    return corrector_covariance(spec, x, x, tol)

def corrector_kernel_matrix(spec: CorrectorSpec, grid: np.ndarray) -> np.ndarray:
    """Discretized Wiener-integral kernel G(x_j, t_i) σ(t_i) √Δt_i.

    The t-grid is uniform with `spec.wiener_grid_size` intervals, refined at
    the breakpoints of f and at the grid points so that every interval lies
    on one branch of G; each interval is represented by its midpoint.

    Returns:
        Array of shape (len(grid), n_intervals)
    """
    model, f = spec.model, spec.f
    edges = panel_edges(grid, f.breakpoints, n_uniform=spec.wiener_grid_size)
    midpoints = 0.5 * (edges[:-1] + edges[1:])
    scale = np.sqrt(np.asarray(sigma_sq(model, midpoints)) * np.diff(edges))
    big_f = antiderivative(f, midpoints)
    rows = []
    for x in grid:
        integrals = homogenized_integrals(model, f, float(x))
        fraction = integrals.inv_to_x / integrals.inv_mean
        branch = np.where(midpoints <= x, fraction - 1.0, fraction)
        rows.append((big_f - integrals.ratio) * branch * scale)
    return np.array(rows)

def sample_corrector_paths(
        spec: CorrectorSpec,
        grid: np.ndarray,
        rng: Rng,
        n_paths: int,
        block_size: int | None = None,
        threads: int = 1) -> np.ndarray:
    """Draw corrector paths on a grid, shape (n_paths, len(grid)).

    One standard normal vector per path drives every grid point, so the
    joint law across x is preserved. Paths are drawn in blocks, block b from
    `rng.substream(b)`.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any((grid <= 0) | (grid >= 1)):
        raise DomainError('corrector grid must lie in (0, 1)')
    block_size = block_size or int(Defaults.get_lookup().numeric('block_size'))
    kernel = corrector_kernel_matrix(spec, grid)

    def draw(start: int, stop: int, stream: Rng) -> np.ndarray:
        noise = stream.generator().standard_normal((stop - start, kernel.shape[1]))
        return noise @ kernel.T

    blocks = map_blocks(draw, n_paths, rng, block_size, threads)
    if not blocks:
        return np.zeros((0, len(grid)))
    return np.concatenate(blocks, axis=0)

def sample_corrector(spec: CorrectorSpec, grid: np.ndarray, rng: Rng) -> SolutionPath:
    """One corrector path v on the grid."""
    grid = np.asarray(grid, dtype=float)
    values = sample_corrector_paths(spec, grid, rng, 1)[0]
    return SolutionPath(grid, values, v_eps=values)

def gaussian_rate(u0: float, c_c: float, ell: float) -> float:
    """Rate function of the Gaussian approximation, (ℓ − u₀)²/(2 C_c).

    Examples:
        >>> round(gaussian_rate(0.02375, 1.1667e-3, 0.1), 3)
        2.492
        >>> gaussian_rate(0.02375, 1.1667e-3, 0.02375)
        0.0
    """
    if c_c <= 0:
        raise DomainError(f'corrector variance must be positive, got {c_c}')
    return (ell - u0) ** 2 / (2.0 * c_c)

@dataclass(frozen=True)
class ValidityReport:
    """
    Whether a level is deep enough in the tail for the Gaussian corrector to
    describe it: the log-correction `lhs` must be small next to the
    exponent `rhs`.
    """
    lhs: float
    rhs: float
    valid: bool

def clt_validity(
        u0: float,
        c_c: float,
        epsilon: float,
        ell: float,
        factor: float | None = None) -> ValidityReport:
    """Check |log(C_c ε/(ℓ−u₀)²)| ≪ (ℓ−u₀)²/(C_c ε).

    "≪" is read as factor · max(|lhs|, 1) < rhs, with the factor (default 10)
    from the package defaults.

    Examples:
        >>> clt_validity(0.0, 1.0, 1.0, 1.0).valid
        False
        >>> report = clt_validity(0.02375, 1.1667e-3, 0.01, 0.1)
        >>> round(report.rhs, 1), report.valid
        (498.3, True)
    """
    if c_c <= 0 or epsilon <= 0:
        raise DomainError('corrector variance and epsilon must be positive')
    if ell == u0:
        raise DomainError('level must differ from the homogenized solution')
    factor = factor if factor is not None else float(Defaults.get_lookup().numeric('validity_factor'))
    ratio = (ell - u0) ** 2 / (c_c * epsilon)
    lhs = -math.log(ratio)
    return ValidityReport(lhs, ratio, factor * max(abs(lhs), 1.0) < ratio)

def corrector_empirical_rate(u0: float, c_c: float, epsilon: float, ell: float) -> float:
    """ε·log P[N(u₀, ε C_c) ≥ ℓ] above u₀, ε·log P[N(u₀, ε C_c) ≤ ℓ] below.

    The tail of the Gaussian prediction u₀ + √ε v, in the sign convention of
    `homogldp.montecarlo.empirical_rate`.
    """
    if c_c <= 0:
        raise DomainError(f'corrector variance must be positive, got {c_c}')
    scale = math.sqrt(epsilon * c_c)
    if ell >= u0:
        return float(epsilon * stats.norm.logsf(ell, loc=u0, scale=scale))
    return float(epsilon * stats.norm.logcdf(ell, loc=u0, scale=scale))
