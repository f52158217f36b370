"""Large deviations of the pointwise solution u_ε(x).

The vector Z_ε of integrals against 1/A_ε satisfies an LDP with the Cramér
functional

    Λ(λ) = ∫₀¹ Λ_s(λ·H(s)) ds,

where Λ_s is the log-MGF of the fine-scale value of 1/A at s: the log-MGF of
V_α (α = a(s, ξ)) for parameterized media and Λ_β(‖h‖₁ ·) of a chi-squared
variable for convolved media. The rate function of u_ε(x) = g(Z_ε) follows
by contraction. Linearizing g around the homogenized integrals gives the
scalar functional of u₀ + v_ε,

    Λ̃(λ) = λu₀ + ∫₀¹ [−λ G(s)/A₀(s) + Λ_s(λ G(s))] ds,

whose transform Ĩ approximates the rate function.

Values on or beyond the boundary of an effective domain are `math.inf`;
nothing in the evaluation path raises for them.
"""

__docformat__ = 'google'

__all__ = [
    'log_mgf_chisq',
    'valpha_tilted',
    'log_mgf_valpha',
    'CramerFunctional',
    'cramer_functional',
    'cramer_full',
    'cramer_full_derivatives',
    'cramer_approx',
    'cramer_approx_derivatives',
    'numerical_gradient',
    'LegendreResult',
    'legendre_1d',
    'legendre_4d',
    'envelope_rate',
    'ContractionResult',
    'rate_full',
    'SteepnessReport',
    'comparison_integral_diverges',
    'expansion_order',
    'steepness_check',
    'PrelimitFunctional',
    'prelimit_functional',
    'cramer_prelimit',
    'chernoff_bound',
    'approx_rate_curve',
    'full_rate_curve',
    'gaussian_rate_curve',
    'chernoff_curve'
]

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from homogldp.constants import CHISQ_BOUNDARY
from homogldp.entities import (
    CramerKind,
    MediaModel,
    ParameterizedCoarse,
    ConvolvedCoarse,
    RateCurve,
    RateStatus,
    SourceSpec,
    ZVector
)
from homogldp.errors import DomainError
from homogldp.lookups import Defaults
from homogldp.media import coarse_field, inv_homogenized
from homogldp.quadrature import gauss_legendre, panel_edges, panel_rule
from homogldp.solver import (
    HomogenizedIntegrals,
    antiderivative,
    cell_panels,
    green_kernel,
    homogenized_integrals
)
from homogldp.corrector import gaussian_rate

log = logging.getLogger(__name__)

_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))

_GRADING = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0])
""" Distances from the peak of e^{tv}, in units of 1/|t|, where the V_α
quadrature panels are cut."""

_VALPHA_ORDER = 20

_PENALTY = 1e100

def _numeric(key: str) -> Any:
    return Defaults.get_lookup().numeric(key)

def _scalar_or_array(values: np.ndarray) -> Any:
    return float(values) if np.ndim(values) == 0 else values

## Per-point log-MGFs

def log_mgf_chisq(xi: int, t: Any) -> Any:
    """Log-MGF of a chi-squared(ξ) variable, −(ξ/2) log(1 − 2t) for t < 1/2.

    Examples:
        >>> round(log_mgf_chisq(2, 0.25), 4)
        0.6931
        >>> log_mgf_chisq(3, 0.0)
        0.0
        >>> log_mgf_chisq(1, 0.5)
        inf
    """
    t = np.asarray(t, dtype=float)
    inside = t < CHISQ_BOUNDARY
    with np.errstate(divide='ignore', invalid='ignore'):
        values = np.where(inside, -0.5 * xi * np.log1p(-2.0 * np.where(inside, t, 0.0)), np.inf)
    return _scalar_or_array(values)

def _chisq_derivatives(xi: int, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    inside = tau < CHISQ_BOUNDARY
    gap = np.where(inside, 1.0 - 2.0 * tau, 1.0)
    value = np.where(inside, -0.5 * xi * np.log(gap), np.inf)
    first = np.where(inside, xi / gap, np.inf)
    second = np.where(inside, 2.0 * xi / gap ** 2, np.inf)
    return value, first, second

def valpha_tilted(alpha: Any, nu_b: float, t: Any, order: int = _VALPHA_ORDER) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Log-MGF of V_α at t with the mean and variance of the t-tilted law.

    V_α = 1/(α + ν_b θ), θ ~ U[−1, 1], has density 1/(2ν_b v²) on
    (1/(α+ν_b), 1/(α−ν_b)). The factor e^{t v_peak} at the heavier end is
    taken out of the integral, and the rest is integrated by Gauss rules on
    panels graded geometrically away from that end in units of 1/|t|, so
    the integrand is resolved for every t.

    Returns:
        (log E e^{tV}, E_t V, Var_t V), broadcast over `alpha` and `t`

    Raises:
        DomainError: α ≤ ν_b
    """
    alpha, t = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(t, dtype=float))
    if np.any(alpha - nu_b <= 0):
        raise DomainError(f'alpha must exceed nu_b={nu_b}')
    if nu_b == 0:
        v = 1.0 / alpha
        return t * v, v, np.zeros_like(v)
    v_lo = 1.0 / (alpha + nu_b)
    v_hi = 1.0 / (alpha - nu_b)
    width = v_hi - v_lo
    abs_t = np.abs(t)
    with np.errstate(divide='ignore'):
        unit = np.where(abs_t > 0, 1.0 / np.where(abs_t > 0, abs_t, 1.0), np.inf)
    marks = np.minimum(width[..., None], unit[..., None] * _GRADING)
    edges = np.concatenate([np.zeros(width.shape + (1,)), marks, width[..., None]], axis=-1)
    ref_nodes, ref_weights = gauss_legendre(order)
    lo = edges[..., :-1, None]
    half = 0.5 * np.diff(edges, axis=-1)[..., None]
    distance = lo + half * (ref_nodes + 1.0)
    weights = half * ref_weights
    upward = t >= 0
    peak = np.where(upward, v_hi, v_lo)
    v = peak[..., None, None] + np.where(upward, -1.0, 1.0)[..., None, None] * distance
    mass = weights / (2.0 * nu_b * v ** 2) * np.exp(-abs_t[..., None, None] * distance)
    total = mass.sum(axis=(-2, -1))
    mean = (mass * v).sum(axis=(-2, -1)) / total
    var = (mass * (v - mean[..., None, None]) ** 2).sum(axis=(-2, -1)) / total
    return t * peak + np.log(total), mean, var

def log_mgf_valpha(alpha: Any, nu_b: float, t: Any) -> Any:
    """Log-MGF of V_α, finite for every real t.

    Examples:
        >>> abs(log_mgf_valpha(1.0, 0.5, 0.0)) < 1e-14
        True
    """
    value, _, _ = valpha_tilted(alpha, nu_b, t)
    return _scalar_or_array(value)

## Cramér functionals

@dataclass(frozen=True, eq=False)
class CramerFunctional:
    """
    Quadrature of a Cramér functional over s ∈ [0, 1].

    Args:
        model: Media model
        f: Source term
        x: Observation point
        kind: FULL_4D (argument λ·H(s)) or APPROX_1D (argument λG(s))
        nodes: Quadrature nodes over s, honoring x and the breakpoints of f
        weights: Quadrature weights
        h: H(s) at the nodes, shape (nodes, 4)
        green: G(x, s) at the nodes
        inv_mean: 1/A₀(s) at the nodes
        alpha: a(s, ξ) at the nodes (parameterized media only)
        edge_h: H at both ends of every panel, shape (2·panels, 4)
        edge_green: G at both ends of every panel
        integrals: Homogenized integrals at x
    """
    model: MediaModel
    f: SourceSpec
    x: float
    kind: CramerKind
    nodes: np.ndarray
    weights: np.ndarray
    h: np.ndarray
    green: np.ndarray
    inv_mean: np.ndarray
    alpha: np.ndarray | None
    edge_h: np.ndarray
    edge_green: np.ndarray
    integrals: HomogenizedIntegrals

    @property
    def u0(self) -> float:
        return float(self.integrals.u0)

    @property
    def z_mean(self) -> np.ndarray:
        """∇Λ(0), the mean of Z_ε."""
        return self.weights @ (self.inv_mean[:, None] * self.h)

    def local(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-node log-MGF Λ_s(t) and its first two t-derivatives."""
        coarse = self.model.coarse
        if isinstance(coarse, ParameterizedCoarse):
            assert self.alpha is not None
            value, mean, var = valpha_tilted(self.alpha, coarse.nu_b, t)
            return value, mean, var
        norm = coarse.h_norm
        value, first, second = _chisq_derivatives(coarse.xi, norm * t)
        return value, norm * first, norm ** 2 * second

    def in_domain(self, edge_arguments: np.ndarray) -> bool:
        """Whether Λ_s stays finite for the arguments at the panel ends."""
        coarse = self.model.coarse
        if isinstance(coarse, ParameterizedCoarse):
            return True
        return bool(np.max(coarse.h_norm * edge_arguments) < CHISQ_BOUNDARY)

def cramer_functional(
        model: MediaModel,
        f: SourceSpec,
        x: float,
        kind: CramerKind = CramerKind.FULL_4D,
        panels: int | None = None,
        order: int | None = None) -> CramerFunctional:
    """Build the quadrature of Λ (FULL_4D) or Λ̃ (APPROX_1D) at x.

    The s-grid has `panels` uniform panels (default 512), refined at x and
    at the breakpoints of f, with a Gauss rule of `order` (default 8) per
    panel.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f'x must lie in (0, 1), got {x}')
    panels = panels or int(_numeric('ldp_panels'))
    order = order or int(_numeric('ldp_order'))
    integrals = homogenized_integrals(model, f, float(x))
    edges = panel_edges(x, f.breakpoints, n_uniform=panels)
    nodes, weights = panel_rule(edges, order)
    nodes, weights = nodes.ravel(), weights.ravel()
    big_f = antiderivative(f, nodes)
    inside = (nodes < x).astype(float)
    h = np.stack([big_f * inside, big_f, inside, np.ones_like(nodes)], axis=-1)

    # panel ends, each with the branch of its own panel
    ends = np.stack([edges[:-1], edges[1:]], axis=-1).ravel()
    end_inside = np.repeat((0.5 * (edges[:-1] + edges[1:]) < x).astype(float), 2)
    end_f = antiderivative(f, ends)
    edge_h = np.stack([end_f * end_inside, end_f, end_inside, np.ones_like(ends)], axis=-1)
    fraction = integrals.inv_to_x / integrals.inv_mean
    edge_green = (end_f - integrals.ratio) * np.where(end_inside > 0, fraction - 1.0, fraction)

    coarse = model.coarse
    alpha = coarse_field(coarse, nodes) if isinstance(coarse, ParameterizedCoarse) else None
    return CramerFunctional(
        model=model,
        f=f,
        x=float(x),
        kind=CramerKind(kind),
        nodes=nodes,
        weights=weights,
        h=h,
        green=np.asarray(green_kernel(model, f, x, nodes, integrals)),
        inv_mean=np.asarray(inv_homogenized(model, nodes), dtype=float),
        alpha=alpha,
        edge_h=edge_h,
        edge_green=edge_green,
        integrals=integrals
    )

def cramer_full(cf: CramerFunctional, lam: Any) -> float:
    """Λ(λ) = ∫ Λ_s(λ·H(s)) ds; +∞ when Λ_s is infinite on a set of positive measure.

    Examples:
        >>> cf = cramer_functional(MediaModel(ConvolvedCoarse(1)), SourceSpec(), 0.5, panels=16)
        >>> cramer_full(cf, [0.0, 0.0, 0.0, 0.0])
        0.0
        >>> round(cramer_full(cf, [0.0, 0.0, 0.0, 0.25]), 10) == round(-0.5 * math.log(0.5), 10)
        True
    """
    lam = np.asarray(lam, dtype=float)
    if not cf.in_domain(cf.edge_h @ lam):
        return math.inf
    value, _, _ = cf.local(cf.h @ lam)
    return float(cf.weights @ value)

def cramer_full_derivatives(cf: CramerFunctional, lam: Any) -> tuple[float, np.ndarray, np.ndarray]:
    """Λ(λ) with its gradient and Hessian, each by quadrature of the per-s
    derivative integrands. Outside the domain the value is +∞ and the
    derivatives are NaN."""
    lam = np.asarray(lam, dtype=float)
    if not cf.in_domain(cf.edge_h @ lam):
        return math.inf, np.full(4, np.nan), np.full((4, 4), np.nan)
    value, first, second = cf.local(cf.h @ lam)
    gradient = (cf.weights * first) @ cf.h
    hessian = cf.h.T @ ((cf.weights * second)[:, None] * cf.h)
    return float(cf.weights @ value), gradient, hessian

def cramer_approx(cf: CramerFunctional, lam: float) -> float:
    """Λ̃(λ) = λu₀ + ∫ [−λG/A₀ + Λ_s(λG)] ds.

    Examples:
        >>> cf = cramer_functional(MediaModel(ConvolvedCoarse(1)), SourceSpec(), 0.5, CramerKind.APPROX_1D, panels=16)
        >>> cramer_approx(cf, 0.0)
        0.0
        >>> cramer_approx(cf, 100.0)
        inf
    """
    lam = float(lam)
    if not cf.in_domain(lam * cf.edge_green):
        return math.inf
    value, _, _ = cf.local(lam * cf.green)
    return float(lam * cf.u0 + cf.weights @ (value - lam * cf.green * cf.inv_mean))

def cramer_approx_derivatives(cf: CramerFunctional, lam: float) -> tuple[float, float, float]:
    lam = float(lam)
    if not cf.in_domain(lam * cf.edge_green):
        return math.inf, math.nan, math.nan
    value, first, second = cf.local(lam * cf.green)
    total = lam * cf.u0 + cf.weights @ (value - lam * cf.green * cf.inv_mean)
    slope = cf.u0 + cf.weights @ (cf.green * (first - cf.inv_mean))
    curvature = cf.weights @ (cf.green ** 2 * second)
    return float(total), float(slope), float(curvature)

def numerical_gradient(func: Callable[[np.ndarray], float], lam: Any, rel_step: float = 1e-7) -> np.ndarray:
    """Central-difference gradient with step rel_step·(1 + |λ_i|)."""
    lam = np.asarray(lam, dtype=float)
    gradient = np.empty_like(lam)
    for i in range(lam.size):
        step = rel_step * (1.0 + abs(lam[i]))
        up, down = lam.copy(), lam.copy()
        up[i] += step
        down[i] -= step
        gradient[i] = (func(up) - func(down)) / (2.0 * step)
    return gradient

## Legendre transforms

@dataclass(frozen=True)
class LegendreResult:
    rate: float
    lambda_star: Any
    status: RateStatus

def _slope(phi: Callable[[float], float], lam: float, direction: float, rel_step: float = 1e-7) -> float:
    step = rel_step * (1.0 + abs(lam))
    ahead = phi(lam + direction * step)
    if ahead == -math.inf:
        return -math.inf
    behind = phi(lam - direction * step)
    if behind == -math.inf:
        return (ahead - phi(lam)) / step
    return (ahead - behind) / (2.0 * step)

def _golden_maximize(func: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Golden-section search for the maximizer of a unimodal function on [lo, hi]."""
    inner_lo = lo + _GOLDEN * (hi - lo)
    inner_hi = hi - _GOLDEN * (hi - lo)
    value_lo, value_hi = func(inner_lo), func(inner_hi)
    while hi - lo > tol:
        if value_lo >= value_hi:
            hi, inner_hi, value_hi = inner_hi, inner_lo, value_lo
            inner_lo = lo + _GOLDEN * (hi - lo)
            value_lo = func(inner_lo)
        else:
            lo, inner_lo, value_lo = inner_lo, inner_hi, value_hi
            inner_hi = hi - _GOLDEN * (hi - lo)
            value_hi = func(inner_hi)
    return inner_lo if value_lo >= value_hi else inner_hi

def legendre_1d(
        func: Callable[[float], float],
        ell: float,
        tol: float = 1e-10,
        max_lambda: float = 1e12) -> LegendreResult:
    """sup_λ [λℓ − Λ(λ)] for a convex Λ with Λ(0) = 0.

    The bracket grows geometrically from 0 in the ascent direction until the
    central-difference slope changes sign or Λ becomes infinite; a domain
    boundary is then located by bisection. Golden-section search narrows the
    bracket to `tol`. When the objective still increases at the boundary the
    supremum is the limit along a sequence approaching it
    (status BOUNDARY); when it increases without bound the rate is +∞
    (status INFINITE).

    Examples:
        >>> result = legendre_1d(lambda lam: 0.5 * lam ** 2, 1.0)
        >>> round(result.rate, 8), round(result.lambda_star, 6)
        (0.5, 1.0)
    """
    def phi(lam: float) -> float:
        value = func(lam)
        return -math.inf if not math.isfinite(value) else lam * ell - value

    slope = _slope(phi, 0.0, 1.0)
    if abs(slope) <= 1e-12:
        return LegendreResult(0.0, 0.0, RateStatus.CONVERGED)
    direction = 1.0 if slope > 0 else -1.0

    def along(m: float) -> float:
        return phi(direction * m)

    lo, step = 0.0, 1.0
    while True:
        candidate = lo + step
        if candidate > max_lambda:
            log.debug('Legendre transform diverges at level %g', ell)
            return LegendreResult(math.inf, direction * math.inf, RateStatus.INFINITE)
        if along(candidate) == -math.inf:
            boundary = _bisect_boundary(along, lo, candidate)
            if boundary > lo and _slope(along, boundary, -1.0) < 0:
                # objective still rising at the boundary: approach it
                best = along(boundary)
                for k in range(1, 60):
                    best = max(best, along(boundary - (boundary - lo) * 2.0 ** -k))
                return LegendreResult(best, direction * boundary, RateStatus.BOUNDARY)
            hi = boundary
            break
        if _slope(along, candidate, 1.0) <= 0:
            hi = candidate
            break
        lo, step = candidate, 2.0 * step
    best = _golden_maximize(along, lo, hi, tol)
    return LegendreResult(along(best), direction * best, RateStatus.CONVERGED)

def _bisect_boundary(along: Callable[[float], float], finite: float, infinite: float) -> float:
    """Largest point between `finite` and `infinite` where the objective is finite."""
    for _ in range(200):
        if infinite - finite <= 1e-14 * (1.0 + abs(finite)):
            break
        middle = 0.5 * (finite + infinite)
        if along(middle) == -math.inf:
            infinite = middle
        else:
            finite = middle
    return finite

def envelope_rate(func: Callable[[float], float], envelope: Callable[[float], float], ell: float) -> float:
    """Transform of the pointwise-larger functional Λ + envelope (envelope ≥ 0).

    A larger functional never has a larger transform, so the result is a
    lower bound for `legendre_1d(func, ell).rate`.
    """
    return legendre_1d(lambda lam: func(lam) + envelope(lam), ell).rate

def _ascent(
        cf: CramerFunctional,
        z: np.ndarray,
        start: np.ndarray,
        max_iterations: int) -> LegendreResult:
    lam = np.array(start, dtype=float)
    value, gradient, hessian = cramer_full_derivatives(cf, lam)
    if not math.isfinite(value):
        lam = np.zeros(4)
        value, gradient, hessian = cramer_full_derivatives(cf, lam)
    objective = float(lam @ z - value)
    for iteration in range(max_iterations):
        ascent = z - gradient
        if np.max(np.abs(ascent)) < 1e-8 * (1.0 + abs(objective)):
            return LegendreResult(objective, lam, RateStatus.CONVERGED)
        try:
            direction = np.linalg.solve(hessian + 1e-14 * np.trace(hessian) * np.eye(4), ascent)
            if not np.all(np.isfinite(direction)) or direction @ ascent <= 0:
                direction = ascent
        except np.linalg.LinAlgError:
            direction = ascent
        step = 1.0
        while True:
            candidate = lam + step * direction
            candidate_value = cramer_full(cf, candidate)
            if math.isfinite(candidate_value):
                candidate_objective = float(candidate @ z - candidate_value)
                if candidate_objective >= objective + 1e-4 * step * (direction @ ascent):
                    break
            step *= 0.5
            if step < 1e-16:
                converged = np.max(np.abs(ascent)) < 1e-5 * (1.0 + abs(objective))
                status = RateStatus.CONVERGED if converged else RateStatus.NOT_CONVERGED
                return LegendreResult(objective, lam, status)
        lam, objective = candidate, candidate_objective
        if np.max(np.abs(lam)) > 1e8 or objective > 1e12:
            return LegendreResult(math.inf, lam, RateStatus.INFINITE)
        value, gradient, hessian = cramer_full_derivatives(cf, lam)
    log.warning('Legendre ascent stopped after %d iterations', max_iterations)
    return LegendreResult(objective, lam, RateStatus.NOT_CONVERGED)

def legendre_4d(
        cf: CramerFunctional,
        z: ZVector | Any,
        warm_start: Any = None,
        max_iterations: int = 10_000) -> LegendreResult:
    """Λ*(z) = sup_λ [λ·z − Λ(λ)] by damped Newton ascent with Armijo backtracking.

    Gradient and Hessian come from `cramer_full_derivatives`; the Newton step
    falls back to the gradient when it is not an ascent direction. Runs from
    λ = 0 and from `warm_start`, keeping the larger value.
    """
    z = z.as_array() if isinstance(z, ZVector) else np.asarray(z, dtype=float)
    if z[2] <= 0 or z[3] <= 0:
        raise DomainError('z3 and z4 must be positive')
    starts = [np.zeros(4)]
    if warm_start is not None and np.any(np.asarray(warm_start) != 0):
        starts.append(np.asarray(warm_start, dtype=float))
    results = [_ascent(cf, z, start, max_iterations) for start in starts]
    if any(r.status is RateStatus.INFINITE for r in results):
        return next(r for r in results if r.status is RateStatus.INFINITE)
    return max(results, key=lambda r: (r.status is RateStatus.CONVERGED, r.rate))

## Contraction

@dataclass(frozen=True)
class ContractionResult:
    rate: float
    z_star: ZVector | None
    lambda_star: np.ndarray | None
    status: RateStatus

def _contraction_starts(z_mean: np.ndarray, ell: float, u0: float, count: int) -> list[np.ndarray]:
    rho = float(np.clip(ell / u0, 0.5, 2.0)) if u0 else 1.0
    root = math.sqrt(rho)
    candidates = [
        (1.0, 1.0, 1.0),
        (rho, 1.0, 1.0),
        (1.0, rho, 1.0),
        (1.0, 1.0, 1.0 / rho),
        (root, root, 1.0),
        (root, 1.0, 1.0 / root),
        (1.0, root, 1.0 / root),
        (rho, rho, rho),
        (1.0 / rho, 1.0, 1.0),
        (1.0, 1.0 / rho, 1.0)
    ]
    ratio = z_mean[2] / z_mean[3]
    feasible = [np.array(c) for c in candidates if 0 < c[1] * ratio < c[2]]
    return feasible[:count]

def rate_full(
        cf: CramerFunctional,
        ell: float,
        starts: int | None = None,
        warm_start: Any = None) -> ContractionResult:
    """I(ℓ) = inf {Λ*(z) : g(z) = ℓ} by Nelder-Mead over (z2, z3, z4).

    z1 = z2·z3/z4 − ℓ keeps the constraint exact; (z2, z3, z4) are scaled by
    the mean vector and 0 < z3 < z4 is enforced by a penalty. The inner
    transform is warm-started from the last optimizer found.
    """
    starts = starts or int(_numeric('rate_starts'))
    z_mean = cf.z_mean
    cache = {'lam': None if warm_start is None else np.asarray(warm_start, dtype=float)}
    found: dict[tuple, LegendreResult] = {}

    def objective(y: np.ndarray) -> float:
        z2, z3, z4 = y * z_mean[1:]
        if not 0 < z3 < z4:
            return _PENALTY
        z = np.array([z2 * z3 / z4 - ell, z2, z3, z4])
        result = legendre_4d(cf, z, cache['lam'])
        if not math.isfinite(result.rate):
            return _PENALTY
        if result.status is RateStatus.CONVERGED:
            cache['lam'] = result.lambda_star
        found[tuple(y)] = result
        return result.rate

    best = None
    for y0 in _contraction_starts(z_mean, ell, cf.u0, starts):
        outcome = optimize.minimize(
            objective, y0, method='Nelder-Mead',
            options={'xatol': 1e-6, 'fatol': 1e-10, 'maxiter': 2000, 'adaptive': True}
        )
        log.debug('contraction start %s -> %.6g (%s)', y0, outcome.fun, outcome.message)
        if best is None or outcome.fun < best.fun:
            best = outcome
    if best is None or best.fun >= _PENALTY:
        return ContractionResult(math.inf, None, None, RateStatus.INFINITE)
    z2, z3, z4 = best.x * z_mean[1:]
    z_star = ZVector(z2 * z3 / z4 - ell, z2, z3, z4)
    inner = found.get(tuple(best.x)) or legendre_4d(cf, z_star, cache['lam'])
    status = RateStatus.CONVERGED if best.success else RateStatus.NOT_CONVERGED
    if inner.status is RateStatus.NOT_CONVERGED:
        status = RateStatus.NOT_CONVERGED
    return ContractionResult(max(float(best.fun), 0.0), z_star, inner.lambda_star, status)

## Steepness

@dataclass(frozen=True)
class SteepnessReport:
    """
    Sufficient conditions for steepness of the Cramér functional.

    Args:
        condition1: The per-point log-MGF is finite everywhere
        condition2: F is piecewise C² and the per-point domain is (−∞, b)
        condition3: The comparison integral diverges at b; None when the
            local expansion order could not be determined
        order: Local expansion order r of the loading at its extremizers
    """
    condition1: bool
    condition2: bool
    condition3: bool | None
    order: int | None

    @property
    def steep(self) -> bool:
        return self.condition1 or self.condition2 or bool(self.condition3)

    def as_header(self) -> dict[str, Any]:
        return {
            'steepness_condition1': self.condition1,
            'steepness_condition2': self.condition2,
            'steepness_condition3': self.condition3,
            'steep': self.steep
        }

def comparison_integral_diverges(pole_order: float, r: int) -> bool:
    """Whether ∫_{b−1}^{b} Λ'(t)/(b−t)^{(r−1)/r} dt diverges for Λ'(t) ~ (b−t)^{−p}.

    Examples:
        >>> comparison_integral_diverges(1.0, 1)
        True
        >>> comparison_integral_diverges(0.0, 1)
        False
        >>> comparison_integral_diverges(0.5, 2)
        True
    """
    return pole_order + (r - 1) / r >= 1.0

def expansion_order(f: SourceSpec) -> int | None:
    """Order r of the local expansion of F (and G) at its extremizers.

    Piecewise-constant f makes F piecewise linear, so r = 1 unless F is
    identically zero.

    Examples:
        >>> expansion_order(SourceSpec())
        1
        >>> expansion_order(SourceSpec.constant(0.0)) is None
        True
    """
    return 1 if np.any(f.values != 0) else None

def steepness_check(cf: CramerFunctional) -> SteepnessReport:
    coarse = cf.model.coarse
    if isinstance(coarse, ParameterizedCoarse):
        return SteepnessReport(True, False, False, expansion_order(cf.f))
    order = expansion_order(cf.f)
    condition3 = None if order is None else comparison_integral_diverges(1.0, order)
    return SteepnessReport(False, True, condition3, order)

## Finite-ε functionals

@dataclass(frozen=True, eq=False)
class PrelimitFunctional:
    """
    The exact finite-ε functional λ ↦ ε·log E exp(ε⁻¹ λ·Z_ε) (FULL_4D) or
    ε·log E exp(ε⁻¹ λ(u₀ + v_ε)) (APPROX_1D).

    Args:
        model: Media model
        epsilon: Cell width
        kind: Functional kind
        loads: Per-cell integrals of the loading. Convolved media: ∫_cell H
            or ∫_cell G, shape (cells, 4) or (cells,). Parameterized media:
            ∫_cell H/(a + ν_b θ_j) per θ node, shape (θ nodes, cells, ...)
        theta_weights: Probability weights of the θ nodes
        offset: Deterministic part of u₀ + v_ε (APPROX_1D only)
    """
    model: MediaModel
    epsilon: float
    kind: CramerKind
    loads: np.ndarray
    theta_weights: np.ndarray | None
    offset: float

    def __call__(self, lam: Any) -> float:
        eps = self.epsilon
        lam = np.asarray(lam, dtype=float)
        if self.kind is CramerKind.APPROX_1D:
            exponents = float(lam) * self.loads / eps
            shift = float(lam) * self.offset
        else:
            exponents = self.loads @ lam / eps
            shift = 0.0
        coarse = self.model.coarse
        if isinstance(coarse, ParameterizedCoarse):
            per_cell = logsumexp(exponents, axis=0, b=self.theta_weights[:, None])
            return float(shift + eps * np.sum(per_cell))
        # Σ_n γ_n c_n = Σ_m β_m Σ_k h_k c_{m+k}
        loading = np.convolve(exponents, np.asarray(coarse.kernel)[::-1])
        if np.max(loading) >= CHISQ_BOUNDARY:
            return math.inf
        return float(shift + eps * np.sum(-0.5 * coarse.xi * np.log1p(-2.0 * loading)))

def prelimit_functional(
        model: MediaModel,
        f: SourceSpec,
        x: float,
        epsilon: float,
        kind: CramerKind = CramerKind.FULL_4D,
        order: int | None = None,
        theta_order: int | None = None) -> PrelimitFunctional:
    """Assemble the per-cell loadings of the finite-ε functional."""
    order = order or int(_numeric('gauss_order'))
    panels = cell_panels(epsilon, f, float(x), order)
    n = int(round(1 / epsilon))
    integrals = homogenized_integrals(model, f, float(x))
    if kind is CramerKind.APPROX_1D:
        loading = np.asarray(green_kernel(model, f, x, panels.nodes, integrals))
        inv0 = np.asarray(inv_homogenized(model, panels.nodes), dtype=float)
        offset = float(integrals.u0 - np.sum(panels.weights * loading * inv0))
    else:
        loading = panels.h
        offset = 0.0
    coarse = model.coarse
    if not isinstance(coarse, ParameterizedCoarse):
        weighted = (panels.weights[..., None] * loading) if loading.ndim == 3 else panels.weights * loading
        loads = np.zeros((n,) + weighted.shape[2:])
        np.add.at(loads, panels.cell, weighted.sum(axis=1))
        return PrelimitFunctional(model, epsilon, CramerKind(kind), loads, None, offset)
    theta, theta_weights = gauss_legendre(theta_order or int(_numeric('theta_order')))
    alpha = coarse_field(coarse, panels.nodes)
    loads_per_theta = []
    for value in theta:
        inv = 1.0 / (alpha + coarse.nu_b * value)
        weighted = (panels.weights * inv)[..., None] * loading if loading.ndim == 3 else panels.weights * inv * loading
        cell_loads = np.zeros((n,) + weighted.shape[2:])
        np.add.at(cell_loads, panels.cell, weighted.sum(axis=1))
        loads_per_theta.append(cell_loads)
    return PrelimitFunctional(model, epsilon, CramerKind(kind), np.array(loads_per_theta), 0.5 * np.asarray(theta_weights), offset)

def cramer_prelimit(cf: CramerFunctional, lam: Any, epsilon: float) -> float:
    """ε·log E exp(ε⁻¹ λ·Z_ε) (or of u₀ + v_ε for APPROX_1D) at finite ε.

    Converges to the Cramér functional of `cf` as ε → 0.
    """
    return prelimit_functional(cf.model, cf.f, cf.x, epsilon, cf.kind)(lam)

def _check_chernoff_media(model: MediaModel) -> None:
    coarse = model.coarse
    if isinstance(coarse, ConvolvedCoarse) and coarse.kappa > 1:
        raise DomainError('the Chernoff bound needs independent cells; kappa > 1 is not supported')

def chernoff_bound(
        model: MediaModel,
        f: SourceSpec,
        x: float,
        epsilon: float,
        ell: float,
        prelimit: PrelimitFunctional | None = None) -> float:
    """Upper bound on ε·log P[u₀ + v_ε(x) ≥ ℓ] at finite ε.

    −sup_{λ≥0} [λℓ − ε·Λ_ε(λ/ε)] with Λ_ε the exact log-MGF of the
    linearized solution, a product of per-cell MGFs.

    Raises:
        DomainError: convolved media with κ > 1
    """
    _check_chernoff_media(model)
    prelimit = prelimit or prelimit_functional(model, f, x, epsilon, CramerKind.APPROX_1D)
    result = legendre_1d(prelimit, ell)
    if not float(result.lambda_star) > 0:
        return 0.0
    return -result.rate

## Rate curves

def _curve_order(levels: np.ndarray, center: float) -> list[int]:
    """Level indices sweeping outward from the center on each side."""
    above = [i for i in np.argsort(levels) if levels[i] >= center]
    below = [i for i in np.argsort(levels)[::-1] if levels[i] < center]
    return above + below

def approx_rate_curve(cf: CramerFunctional, levels: Any) -> RateCurve:
    """Ĩ(ℓ) on a level grid."""
    levels = np.sort(np.asarray(levels, dtype=float))
    results = [legendre_1d(lambda lam: cramer_approx(cf, lam), float(ell)) for ell in levels]
    return RateCurve(
        levels,
        np.array([max(r.rate, 0.0) for r in results]),
        np.array([float(r.lambda_star) for r in results]),
        tuple(r.status for r in results),
        'approx'
    )

def full_rate_curve(cf: CramerFunctional, levels: Any, starts: int | None = None) -> RateCurve:
    """I_{u_ε}(ℓ) by contraction, sweeping outward from u₀ with warm starts."""
    levels = np.sort(np.asarray(levels, dtype=float))
    values = np.full(len(levels), math.inf)
    argmax = np.full((len(levels), 4), np.nan)
    status: list[RateStatus] = [RateStatus.NOT_CONVERGED] * len(levels)
    warm = None
    previous_side = None
    for index in _curve_order(levels, cf.u0):
        side = levels[index] >= cf.u0
        if side != previous_side:
            warm = None
        result = rate_full(cf, float(levels[index]), starts, warm_start=warm)
        values[index] = result.rate
        status[index] = result.status
        if result.z_star is not None:
            argmax[index] = result.z_star.as_array()
        if result.lambda_star is not None and result.status is RateStatus.CONVERGED:
            warm = result.lambda_star
        previous_side = side
        log.info('full rate at level %.6g: %.6g (%s)', levels[index], result.rate, result.status.value)
    return RateCurve(levels, values, argmax, tuple(status), 'full')

def gaussian_rate_curve(u0: float, c_c: float, levels: Any) -> RateCurve:
    levels = np.sort(np.asarray(levels, dtype=float))
    values = np.array([gaussian_rate(u0, c_c, float(ell)) for ell in levels])
    return RateCurve(levels, values, np.full(len(levels), np.nan), (RateStatus.CONVERGED,) * len(levels), 'gaussian')

def chernoff_curve(model: MediaModel, f: SourceSpec, x: float, epsilon: float, levels: Any) -> RateCurve:
    """Negated Chernoff bounds −B(ℓ) ≥ 0, comparable with the rate curves."""
    _check_chernoff_media(model)
    levels = np.sort(np.asarray(levels, dtype=float))
    prelimit = prelimit_functional(model, f, x, epsilon, CramerKind.APPROX_1D)
    values = np.array([-chernoff_bound(model, f, x, epsilon, float(ell), prelimit) for ell in levels])
    return RateCurve(levels, values, np.full(len(levels), np.nan), (RateStatus.CONVERGED,) * len(levels), 'chernoff')
