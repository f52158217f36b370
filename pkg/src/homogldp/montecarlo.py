"""Direct and importance-sampled Monte Carlo of u_ε(x) and empirical rate functions.

Parameterized media are tilted by drawing θ from a Bradford law that favours
θ = −1 (small coefficient, large solution); convolved media by exponentially
tilting the chi-squared draws β. Every draw carries its log likelihood
ratio, and the empirical rate

    E(W, ℓ) = ε log (1/N) Σ w_j 1{X_j ≥ ℓ}    for ℓ above the center Ŵ,
    E(W, ℓ) = ε log (1/N) Σ w_j 1{X_j ≤ ℓ}    below it,

is reported with the self-normalized variant and the effective sample size
of the draws in the tail.

Draws are made in blocks; block b always uses substream b of the run's
stream, so results do not depend on the thread count.
"""

__docformat__ = 'google'

__all__ = [
    'QUANTITIES',
    'bradford_quantile',
    'bradford_log_density',
    'bradford_sample',
    'bradford_log_weight',
    'chisq_log_weight',
    'run_parameterized_is',
    'run_convolved_is',
    'run_samples',
    'ess',
    'weighted_mean',
    'empirical_rate',
    'tilt_candidates',
    'select_tilt',
    'estimate_center',
    'run_empirical'
]

import logging
import math
from typing import Any, Callable

import numpy as np
from scipy.special import logsumexp

from homogldp.entities import (
    ConvolvedCoarse,
    EmpiricalRate,
    MediaModel,
    ParameterizedCoarse,
    SourceSpec,
    Tilt,
    TiltFamily,
    WeightedSamples
)
from homogldp.errors import DomainError
from homogldp.lookups import Defaults
from homogldp.media import cells_for, convolve_window, draw_beta, draw_theta
from homogldp.rng import Rng, map_blocks
from homogldp.solver import cell_panels, expansion_from_z, homogenized_integrals, z_batch

log = logging.getLogger(__name__)

QUANTITIES = ('u_eps', 'linearized')
""" Sampled point quantities: the solution u_ε(x) or its linearization u₀(x) + v_ε(x)."""

def _numeric(key: str) -> Any:
    return Defaults.get_lookup().numeric(key)

## Bradford law on (−1, 1)

def bradford_quantile(u: Any, c: float) -> Any:
    """Inverse CDF of π_Brad(θ) = c / (2 log(1+c) (1 + c(θ+1)/2)).

    c = 0 is the uniform law on [−1, 1].

    Examples:
        >>> bradford_quantile(0.0, 5.0)
        -1.0
        >>> round(bradford_quantile(1.0, 5.0), 12)
        1.0
        >>> bradford_quantile(0.25, 0.0)
        -0.5
    """
    if c < 0:
        raise DomainError(f'Bradford parameter must be nonnegative, got {c}')
    u = np.asarray(u, dtype=float)
    if c == 0:
        theta = 2.0 * u - 1.0
    else:
        theta = (2.0 / c) * np.expm1(u * math.log1p(c)) - 1.0
    return float(theta) if theta.ndim == 0 else theta

def bradford_log_density(theta: Any, c: float) -> Any:
    """log π_Brad(θ).

    Examples:
        >>> round(bradford_log_density(0.3, 0.0), 12) == round(math.log(0.5), 12)
        True
    """
    theta = np.asarray(theta, dtype=float)
    if c == 0:
        values = np.full(theta.shape, math.log(0.5))
    else:
        values = math.log(c / (2.0 * math.log1p(c))) - np.log1p(0.5 * c * (theta + 1.0))
    return float(values) if values.ndim == 0 else values

def bradford_sample(c: float, rng: Rng) -> float:
    """One Bradford(c) draw in [−1, 1]; the density concentrates near θ = −1 as c grows."""
    return bradford_quantile(float(rng.generator().random()), c)

def bradford_log_weight(theta: np.ndarray, c: float) -> np.ndarray:
    """Σ over cells of log π_U(θ) − log π_Brad(θ), one value per row."""
    if c == 0:
        return np.zeros(theta.shape[0])
    return np.sum(math.log(0.5) - bradford_log_density(theta, c), axis=-1)

def chisq_log_weight(beta: np.ndarray, xi: int, eta: float) -> np.ndarray:
    """Σ_m [−ηβ_m + (ξ/2) log(1/(1−2η))], one value per row.

    Examples:
        >>> chisq_log_weight(np.ones((2, 3)), 1, 0.0).tolist()
        [0.0, 0.0]
    """
    if eta >= 0.5:
        raise DomainError(f'tilt eta must be below 1/2, got {eta}')
    if eta == 0:
        return np.zeros(beta.shape[0])
    return np.sum(-eta * beta, axis=-1) - 0.5 * xi * beta.shape[-1] * math.log1p(-2.0 * eta)

## Sampling

def _point_values(
        model: MediaModel,
        cells: np.ndarray,
        f: SourceSpec,
        x: float,
        epsilon: float,
        quantity: str,
        order: int) -> np.ndarray:
    z = z_batch(model, cells, cell_panels(epsilon, f, float(x), order))
    if quantity == 'u_eps':
        return -z[:, 0] + z[:, 1] * z[:, 2] / z[:, 3]
    integrals = homogenized_integrals(model, f, float(x))
    v, _ = expansion_from_z(z, integrals)
    return integrals.u0 + v

def _check_quantity(quantity: str) -> None:
    if quantity not in QUANTITIES:
        raise DomainError(f'quantity must be one of {QUANTITIES}, got {quantity!r}')

def _collect(
        draw: Callable[[int, int, Rng], tuple[np.ndarray, np.ndarray]],
        n: int,
        rng: Rng,
        block_size: int | None,
        threads: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise DomainError(f'sample count must be positive, got {n}')
    block_size = block_size or int(_numeric('block_size'))
    blocks = map_blocks(draw, n, rng, block_size, threads)
    values = np.concatenate([b[0] for b in blocks])
    log_weights = np.concatenate([b[1] for b in blocks])
    return values, log_weights

def run_parameterized_is(
        model: MediaModel,
        f: SourceSpec,
        epsilon: float,
        x: float,
        n: int,
        c: float,
        rng: Rng,
        *,
        quantity: str = 'u_eps',
        block_size: int | None = None,
        threads: int = 1,
        order: int | None = None) -> WeightedSamples:
    """N realizations with θ_i ~ Bradford(c); c = 0 is direct sampling."""
    coarse = model.coarse
    if not isinstance(coarse, ParameterizedCoarse):
        raise DomainError('Bradford tilting needs a parameterized medium')
    if c < 0:
        raise DomainError(f'Bradford parameter must be nonnegative, got {c}')
    _check_quantity(quantity)
    n_cells = cells_for(epsilon)
    order = order or int(_numeric('gauss_order'))

    def draw(start: int, stop: int, stream: Rng) -> tuple[np.ndarray, np.ndarray]:
        generator = stream.generator()
        if c == 0:
            theta = draw_theta(generator, (stop - start, n_cells))
        else:
            theta = bradford_quantile(generator.random((stop - start, n_cells)), c)
        return _point_values(model, theta, f, x, epsilon, quantity, order), bradford_log_weight(theta, c)

    values, log_weights = _collect(draw, n, rng, block_size, threads)
    tilt = Tilt(TiltFamily.BRADFORD, float(c)) if c else Tilt()
    return WeightedSamples(values, log_weights, epsilon, float(x), rng.master_seed, tilt, quantity)

def run_convolved_is(
        model: MediaModel,
        f: SourceSpec,
        epsilon: float,
        x: float,
        n: int,
        eta: float,
        rng: Rng,
        *,
        quantity: str = 'u_eps',
        block_size: int | None = None,
        threads: int = 1,
        order: int | None = None) -> WeightedSamples:
    """N realizations with β_m ~ Gamma(ξ/2, scale 2/(1−2η)); η = 0 is direct sampling.

    Raises:
        DomainError: η ≥ 1/2 or a parameterized medium
    """
    coarse = model.coarse
    if not isinstance(coarse, ConvolvedCoarse):
        raise DomainError('chi-squared tilting needs a convolved medium')
    if eta >= 0.5:
        raise DomainError(f'tilt eta must be below 1/2, got {eta}')
    _check_quantity(quantity)
    window = cells_for(epsilon) + coarse.kappa - 1
    order = order or int(_numeric('gauss_order'))

    def draw(start: int, stop: int, stream: Rng) -> tuple[np.ndarray, np.ndarray]:
        beta = draw_beta(stream.generator(), coarse.xi, (stop - start, window), eta)
        gamma = convolve_window(beta, coarse.kernel)
        return _point_values(model, gamma, f, x, epsilon, quantity, order), chisq_log_weight(beta, coarse.xi, eta)

    values, log_weights = _collect(draw, n, rng, block_size, threads)
    tilt = Tilt(TiltFamily.CHISQ, float(eta)) if eta else Tilt()
    return WeightedSamples(values, log_weights, epsilon, float(x), rng.master_seed, tilt, quantity)

def run_samples(
        model: MediaModel,
        f: SourceSpec,
        epsilon: float,
        x: float,
        n: int,
        tilt: Tilt,
        rng: Rng,
        **kwargs: Any) -> WeightedSamples:
    """Dispatch to the sampler of the model's family; a NONE tilt samples directly."""
    if model.is_parameterized:
        if tilt.family is TiltFamily.CHISQ:
            raise DomainError('chi-squared tilting needs a convolved medium')
        return run_parameterized_is(model, f, epsilon, x, n, 0.0 if tilt.is_direct else tilt.parameter, rng, **kwargs)
    if tilt.family is TiltFamily.BRADFORD:
        raise DomainError('Bradford tilting needs a parameterized medium')
    return run_convolved_is(model, f, epsilon, x, n, 0.0 if tilt.is_direct else tilt.parameter, rng, **kwargs)

## Estimators

def ess(log_weights: Any) -> float:
    """Effective sample size (Σw)²/Σw², computed from log weights.

    Examples:
        >>> ess(np.zeros(10))
        10.0
        >>> ess(np.array([]))
        0.0
    """
    log_weights = np.asarray(log_weights, dtype=float)
    if log_weights.size == 0:
        return 0.0
    return float(np.exp(2.0 * logsumexp(log_weights) - logsumexp(2.0 * log_weights)))

def weighted_mean(samples: WeightedSamples) -> float:
    """Self-normalized estimate of the mean."""
    normalized = np.exp(samples.log_weights - logsumexp(samples.log_weights))
    return float(normalized @ samples.values)

def empirical_rate(samples: WeightedSamples, levels: Any, center: float | None = None) -> EmpiricalRate:
    """Empirical rate per level with the tail direction set by `center`.

    Levels at or above the center use the upper tail, levels below use the
    lower tail. `center` defaults to the self-normalized mean of the samples.
    Levels with no samples in their tail get −∞.

    Examples:
        >>> values = np.arange(100, dtype=float)
        >>> samples = WeightedSamples(values, np.zeros(100), 0.01, 0.5, 0)
        >>> round(float(empirical_rate(samples, [90.0]).values[0]), 5)
        -0.02303
    """
    if samples.n == 0:
        raise DomainError('empirical rate needs at least one sample')
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    center = weighted_mean(samples) if center is None else float(center)
    log_n = math.log(samples.n)
    log_total = float(logsumexp(samples.log_weights))
    values = np.full(len(levels), -np.inf)
    normalized = np.full(len(levels), -np.inf)
    ess_per_level = np.zeros(len(levels))
    n_exceed = np.zeros(len(levels), dtype=int)
    for i, ell in enumerate(levels):
        tail = samples.values >= ell if ell >= center else samples.values <= ell
        count = int(np.count_nonzero(tail))
        n_exceed[i] = count
        if not count:
            continue
        log_mass = float(logsumexp(samples.log_weights[tail]))
        log_p = log_mass - log_n
        if log_p > 0:
            log.warning('tail estimate %.4g exceeds 1 at level %g; clipped', math.exp(log_p), ell)
            log_p = 0.0
        values[i] = samples.epsilon * log_p
        normalized[i] = samples.epsilon * min(log_mass - log_total, 0.0)
        ess_per_level[i] = ess(samples.log_weights[tail])
    return EmpiricalRate(levels, values, normalized, ess_per_level, n_exceed, center)

## Tilt selection

def tilt_candidates(model: MediaModel, upper: bool, count: int | None = None) -> list[Tilt]:
    """Candidate sampling laws for an upper or lower tail, direct sampling first.

    Large solutions come from small coefficients: θ near −1 (Bradford) or
    large β (η > 0). Bradford tilting only reaches the upper tail.
    """
    count = count or int(_numeric('tilt_candidates'))
    if model.is_parameterized:
        if not upper:
            return [Tilt()]
        grid = np.geomspace(0.05, 500.0, count - 1)
        return [Tilt()] + [Tilt(TiltFamily.BRADFORD, float(c)) for c in grid]
    grid = np.linspace(0.0, 0.48, count)[1:] if upper else -np.geomspace(0.01, 20.0, count - 1)
    return [Tilt()] + [Tilt(TiltFamily.CHISQ, float(eta)) for eta in grid]

def select_tilt(
        model: MediaModel,
        f: SourceSpec,
        epsilon: float,
        x: float,
        ell: float,
        center: float,
        rng: Rng,
        *,
        pilot: int | None = None,
        candidates: int | None = None,
        **kwargs: Any) -> Tilt:
    """Pick the candidate tilt with the largest ESS among pilot draws in the tail of ℓ.

    Candidate k is run on `rng.substream(k)`; extra keyword arguments go to
    `run_samples`.
    """
    pilot = pilot or int(_numeric('pilot_samples'))
    upper = ell >= center
    best, best_ess = Tilt(), -1.0
    for index, candidate in enumerate(tilt_candidates(model, upper, candidates)):
        samples = run_samples(model, f, epsilon, x, pilot, candidate, rng.substream(index), **kwargs)
        tail = samples.values >= ell if upper else samples.values <= ell
        score = ess(samples.log_weights[tail])
        log.debug('tilt %s %.4g: %d in tail, ess %.4g', candidate.family.value, candidate.parameter, np.count_nonzero(tail), score)
        if score > best_ess:
            best, best_ess = candidate, score
    log.info('level %.6g: tilt %s %.4g (pilot ess %.4g)', ell, best.family.value, best.parameter, best_ess)
    return best

def estimate_center(
        model: MediaModel,
        f: SourceSpec,
        epsilon: float,
        x: float,
        rng: Rng,
        *,
        pilot: int | None = None,
        **kwargs: Any) -> float:
    """Ŵ from a dedicated direct pilot run."""
    pilot = pilot or int(_numeric('pilot_samples'))
    return weighted_mean(run_samples(model, f, epsilon, x, pilot, Tilt(), rng, **kwargs))

def run_empirical(
        model: MediaModel,
        f: SourceSpec,
        epsilon: float,
        x: float,
        n: int,
        levels: Any,
        rng: Rng,
        *,
        tilt: Tilt | str = 'auto',
        pilot: int | None = None,
        candidates: int | None = None,
        **kwargs: Any) -> tuple[EmpiricalRate, list[WeightedSamples]]:
    """Empirical rate curve over `levels`.

    With a fixed tilt one run of N draws serves every level. With 'auto'
    each level gets its own run under the tilt picked by `select_tilt`.
    The center, the pilot runs and the level runs use labelled substreams
    of `rng`. Extra keyword arguments (quantity, threads, block_size, order)
    go to `run_samples`.
    """
    levels = np.sort(np.atleast_1d(np.asarray(levels, dtype=float)))
    center = estimate_center(model, f, epsilon, x, rng.substream('center'), pilot=pilot, **kwargs)
    if isinstance(tilt, Tilt):
        samples = run_samples(model, f, epsilon, x, n, tilt, rng.substream('samples'), **kwargs)
        return empirical_rate(samples, levels, center), [samples]
    if tilt != 'auto':
        raise DomainError(f"tilt must be a Tilt or 'auto', got {tilt!r}")
    runs = []
    rates = []
    for index, ell in enumerate(levels):
        chosen = select_tilt(
            model, f, epsilon, x, float(ell), center, rng.substream(f'pilot-{index}'),
            pilot=pilot, candidates=candidates, **kwargs
        )
        samples = run_samples(model, f, epsilon, x, n, chosen, rng.substream(f'level-{index}'), **kwargs)
        runs.append(samples)
        rates.append(empirical_rate(samples, [ell], center))
    return EmpiricalRate(
        levels,
        np.concatenate([r.values for r in rates]),
        np.concatenate([r.normalized_values for r in rates]),
        np.concatenate([r.ess for r in rates]),
        np.concatenate([r.n_exceed for r in rates]),
        center
    ), runs
