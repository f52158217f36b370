"""The two random media families and their pointwise statistics.

Parameterized media:
    A_ε(x) = a(x, ξ) + ν_b θ_n on cell n, θ_n iid U[−1, 1], with the coarse
    field a(x, ξ) = max{1 + (2/3) Σ ξ_m r^m sin((2m+1)πx), 17/32}.

Convolved media:
    1/A_ε = γ_n on cell n, γ_n = Σ_k h_k β_{n−k}, β iid chi-squared(ξ).

Cells are [nε, (n+1)ε) with 0-based n. Evaluators accept scalars or numpy
arrays and are pure.
"""

__docformat__ = 'google'

__all__ = [
    'coarse_field',
    'parameterized_bounds',
    'geometric_from_uniform',
    'sample_coarse',
    'cells_for',
    'draw_theta',
    'draw_beta',
    'convolve_window',
    'sample_fine',
    'inv_coeff_at',
    'valpha_moments',
    'inv_homogenized',
    'homogenized_coeff',
    'sigma_sq',
    'covariance_integral',
    'media_to_config',
    'media_from_config',
    'realization_columns'
]

import logging
import math
from typing import Any

import numpy as np

from homogldp._vendor import cells_per_unit
from homogldp.constants import N_MODES, GEOMETRIC_P
from homogldp.entities import (
    MediaFamily,
    MediaModel,
    ParameterizedCoarse,
    ConvolvedCoarse,
    FieldRealization
)
from homogldp.errors import DomainError
from homogldp.rng import Rng

log = logging.getLogger(__name__)

_MODES = np.arange(N_MODES)

def _scalar_or_array(values: np.ndarray) -> Any:
    return float(values) if np.ndim(values) == 0 else values

def coarse_field(coarse: ParameterizedCoarse, x: Any) -> Any:
    """Coarse field a(x, ξ), floored at `coarse.floor`.

    Examples:
        >>> coarse_field(ParameterizedCoarse((0.0,) * 8), 0.3)
        1.0
        >>> round(coarse_field(ParameterizedCoarse((1.0,) + (0.0,) * 7), 0.5), 12)
        1.666666666667
    """
    x = np.asarray(x, dtype=float)
    weights = np.asarray(coarse.xi) * coarse.r ** _MODES
    phases = np.multiply.outer(x, (2 * _MODES + 1) * np.pi)
    series = np.sin(phases) @ weights
    return _scalar_or_array(np.maximum(1.0 + coarse.amplitude * series, coarse.floor))

def parameterized_bounds(coarse: ParameterizedCoarse, resolution: int = 4096) -> tuple[float, float]:
    """Ellipticity bounds (ν₁, ν₂) with ν₁ ≤ A_ε ≤ ν₂ for every realization.

    The extrema of a(x, ξ) are taken over a uniform grid of `resolution`
    intervals, then widened by ±ν_b.
    """
    values = coarse_field(coarse, np.linspace(0.0, 1.0, resolution + 1))
    return float(np.min(values)) - coarse.nu_b, float(np.max(values)) + coarse.nu_b

def geometric_from_uniform(u: float, p: float = GEOMETRIC_P) -> int:
    """Invert the CDF of the geometric law on {1, 2, ...}.

    Examples:
        >>> geometric_from_uniform(1e-12)
        1
        >>> geometric_from_uniform(0.2)
        1
        >>> geometric_from_uniform(0.21)
        2
    """
    if not 0 <= u < 1:
        raise DomainError(f'u must lie in [0, 1), got {u}')
    return max(1, math.ceil(math.log1p(-u) / math.log1p(-p) - 1e-12))

def sample_coarse(
        family: MediaFamily | str,
        rng: Rng,
        *,
        r: float = 0.75,
        nu_b: float = 0.5,
        h_norm: float = 1.0,
        kappa: int = 1) -> MediaModel:
    """Draw the coarse parameter ξ from its prior.

    Parameterized media draw 8 iid U[−1, 1] mode weights; convolved media draw
    the chi-squared degrees of freedom from Geometric(1/5) and use a box
    kernel of mass `h_norm` over `kappa` cells.
    """
    family = MediaFamily(family)
    generator = rng.generator()
    if family is MediaFamily.PARAMETERIZED:
        xi = generator.uniform(-1.0, 1.0, N_MODES)
        return MediaModel(ParameterizedCoarse(tuple(xi), r=r, nu_b=nu_b))
    xi = geometric_from_uniform(float(generator.random()))
    log.debug('sampled convolved coarse parameter xi=%d', xi)
    return MediaModel(ConvolvedCoarse.box(xi, h_norm=h_norm, kappa=kappa))

def cells_for(epsilon: float) -> int:
    """Number of cells 1/ε.

    Raises:
        DomainError: 1/ε is not an integer
    """
    n = cells_per_unit(epsilon)
    if n is None:
        raise DomainError(f'1/epsilon must be a positive integer, got epsilon={epsilon}')
    return n

def draw_theta(generator: np.random.Generator, shape: int | tuple[int, ...]) -> np.ndarray:
    return generator.uniform(-1.0, 1.0, shape)

def draw_beta(
        generator: np.random.Generator,
        xi: int,
        shape: int | tuple[int, ...],
        eta: float = 0.0) -> np.ndarray:
    """Chi-squared(ξ) draws, exponentially tilted by η when η ≠ 0.

    The tilted law is Gamma(ξ/2, scale 2/(1 − 2η)).
    """
    if eta >= 0.5:
        raise DomainError(f'tilt eta must be below 1/2, got {eta}')
    return generator.gamma(0.5 * xi, 2.0 / (1.0 - 2.0 * eta), shape)

def convolve_window(beta: np.ndarray, kernel: tuple[float, ...]) -> np.ndarray:
    """γ_n = Σ_k h_k β_{n−k} along the last axis.

    `beta` holds the padded window: its first κ − 1 entries precede cell 0.

    Examples:
        >>> convolve_window(np.array([1.0, 2.0, 3.0]), (0.5, 0.5)).tolist()
        [1.5, 2.5]
    """
    k = len(kernel)
    n = beta.shape[-1] - k + 1
    gamma = np.zeros(beta.shape[:-1] + (n,))
    for lag, weight in enumerate(kernel):
        if weight:
            gamma += weight * beta[..., k - 1 - lag:k - 1 - lag + n]
    return gamma

def sample_fine(model: MediaModel, epsilon: float, rng: Rng) -> FieldRealization:
    """Draw one fine-scale realization at scale ε."""
    n = cells_for(epsilon)
    generator = rng.generator()
    coarse = model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        return FieldRealization(epsilon, draw_theta(generator, n))
    beta = draw_beta(generator, coarse.xi, n + coarse.kappa - 1)
    return FieldRealization(epsilon, convolve_window(beta, coarse.kernel), beta)

def inv_coeff_at(model: MediaModel, realization: FieldRealization, s: Any) -> Any:
    """Pointwise 1/A_ε(s) of a realization.

    Raises:
        DomainError: the parameterized coefficient is not positive at s
    """
    s = np.asarray(s, dtype=float)
    cells = np.minimum((s / realization.epsilon).astype(int), realization.n_cells - 1)
    values = realization.inv_cells[cells]
    coarse = model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        denominator = coarse_field(coarse, s) + coarse.nu_b * values
        if np.any(np.asarray(denominator) <= 0):
            raise DomainError('coefficient is not positive; realization violates the media bounds')
        values = 1.0 / denominator
    return _scalar_or_array(np.asarray(values, dtype=float))

def valpha_moments(alpha: Any, nu_b: float) -> tuple[Any, Any]:
    """First two moments of V_α = 1/(α + ν_b θ), θ ~ U[−1, 1].

    V_α has density 1/(2ν_b v²) on (1/(α+ν_b), 1/(α−ν_b)).

    Returns:
        (E V_α, E V_α²)

    Examples:
        >>> mean, second = valpha_moments(1.0, 0.5)
        >>> round(mean, 10), round(second, 10)
        (1.0986122887, 1.3333333333)
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha - nu_b <= 0):
        raise DomainError(f'alpha must exceed nu_b={nu_b}')
    if nu_b == 0:
        return _scalar_or_array(1.0 / alpha), _scalar_or_array(1.0 / alpha ** 2)
    mean = np.log((alpha + nu_b) / (alpha - nu_b)) / (2.0 * nu_b)
    second = 1.0 / (alpha ** 2 - nu_b ** 2)
    return _scalar_or_array(mean), _scalar_or_array(second)

def inv_homogenized(model: MediaModel, x: Any) -> Any:
    """1/A₀(x) = E[1/A(x, ·)]."""
    coarse = model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        mean, _ = valpha_moments(coarse_field(coarse, x), coarse.nu_b)
        return mean
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(np.full(x.shape, coarse.xi * coarse.h_norm))

def homogenized_coeff(model: MediaModel, x: Any) -> Any:
    """Homogenized coefficient A₀(x) = (E[1/A(x, ·)])⁻¹.

    Examples:
        >>> homogenized_coeff(MediaModel(ConvolvedCoarse(3)), 0.5)
        0.3333333333333333
        >>> round(homogenized_coeff(MediaModel(ParameterizedCoarse((0.0,) * 8)), 0.2), 5)
        0.91024
    """
    return _scalar_or_array(1.0 / np.asarray(inv_homogenized(model, x)))

def sigma_sq(model: MediaModel, t: Any) -> Any:
    """Local variance σ²(t) of 1/A integrated over the fine-scale lag.

    Examples:
        >>> sigma_sq(MediaModel(ConvolvedCoarse.box(2, h_norm=0.5)), 0.1)
        1.0
        >>> round(sigma_sq(MediaModel(ParameterizedCoarse((0.0,) * 8)), 0.1), 6)
        0.126384
    """
    coarse = model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        mean, second = valpha_moments(coarse_field(coarse, t), coarse.nu_b)
        return _scalar_or_array(np.maximum(np.asarray(second) - np.asarray(mean) ** 2, 0.0))
    t = np.asarray(t, dtype=float)
    return _scalar_or_array(np.full(t.shape, 2.0 * coarse.xi * coarse.h_norm ** 2))

def covariance_integral(model: MediaModel, resolution: int = 4096) -> float:
    """Integrated covariance bound C_{A⁻¹} of 1/A.

    Parameterized media: the largest Var(V_α) over x (a uniform grid of
    `resolution` intervals). Convolved media: the sum over all lags of the
    cell covariance 2ξ Σ_j h_j h_{j+k}.
    """
    coarse = model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        return float(np.max(sigma_sq(model, np.linspace(0.0, 1.0, resolution + 1))))
    kernel = np.asarray(coarse.kernel)
    return float(2.0 * coarse.xi * np.sum(np.correlate(kernel, kernel, mode='full')))

def media_to_config(model: MediaModel) -> dict[str, Any]:
    coarse = model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        return {
            'family': MediaFamily.PARAMETERIZED.value,
            'xi': list(coarse.xi),
            'r': coarse.r,
            'nu_b': coarse.nu_b
        }
    return {
        'family': MediaFamily.CONVOLVED.value,
        'xi': coarse.xi,
        'kernel': list(coarse.kernel)
    }

def media_from_config(block: dict[str, Any], rng: Rng | None = None) -> MediaModel:
    """Build a MediaModel from a validated `media` config block.

    A missing ``xi`` is drawn from the prior using `rng`; a ``kernel`` entry
    takes precedence over ``kappa``/``h_norm``.
    """
    family = MediaFamily(block['family'])
    xi = block.get('xi')
    if xi is None:
        if rng is None:
            raise DomainError('media.xi is not set and no random stream was given')
        return sample_coarse(
            family, rng,
            r=block.get('r', 0.75), nu_b=block.get('nu_b', 0.5),
            h_norm=block.get('h_norm', 1.0), kappa=block.get('kappa', 1)
        )
    if family is MediaFamily.PARAMETERIZED:
        return MediaModel(ParameterizedCoarse(tuple(xi), r=block.get('r', 0.75), nu_b=block.get('nu_b', 0.5)))
    if block.get('kernel'):
        return MediaModel(ConvolvedCoarse(xi, tuple(block['kernel'])))
    return MediaModel(ConvolvedCoarse.box(xi, h_norm=block.get('h_norm', 1.0), kappa=block.get('kappa', 1)))

def realization_columns(model: MediaModel, realization: FieldRealization) -> dict[str, np.ndarray]:
    """CSV columns for a realization: cell index and the cell value of 1/A_ε
    at the cell midpoint."""
    midpoints = (np.arange(realization.n_cells) + 0.5) * realization.epsilon
    return {
        'cell_index': np.arange(realization.n_cells),
        'inv_value': np.asarray(inv_coeff_at(model, realization, midpoints))
    }
