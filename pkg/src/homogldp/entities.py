"""Domain types shared by the media, solver, corrector, ldp and Monte Carlo modules.

Everything here is a plain container. Numerical work lives in the modules
that consume these types.
"""

__docformat__ = 'google'

__all__ = [
    'MediaFamily',
    'ParameterizedCoarse',
    'ConvolvedCoarse',
    'MediaModel',
    'FieldRealization',
    'SourceSpec',
    'ZVector',
    'SolutionPath',
    'CorrectorSpec',
    'CramerKind',
    'RateStatus',
    'RateCurve',
    'TiltFamily',
    'Tilt',
    'WeightedSamples',
    'EmpiricalRate'
]

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from homogldp.constants import (
    N_MODES,
    COARSE_FLOOR,
    COARSE_AMPLITUDE,
    DEFAULT_SOURCE
)
from homogldp.errors import DomainError

class MediaFamily(Enum):
    """
    The two random media families. Values are the tags used in config files.
    """
    PARAMETERIZED = "parameterized"
    CONVOLVED = "convolved"

@dataclass(frozen=True)
class ParameterizedCoarse:
    """
    Coarse parameter of the parameterized medium
    A(x, y) = a(x, ξ) + ν_b θ_⌊y⌋.

    Args:
        xi: The eight mode weights ξ_0, ..., ξ_7, each in [−1, 1]
        r: Geometric decay of the mode weights, in (0, 1)
        floor: Lower cutoff of a(x, ξ)
        amplitude: Prefactor of the sine expansion
        nu_b: Amplitude of the fine-scale uniform perturbation
    """
    xi: tuple[float, ...]
    r: float = 0.75
    floor: float = COARSE_FLOOR
    amplitude: float = COARSE_AMPLITUDE
    nu_b: float = 0.5

    def __post_init__(self) -> None:
        object.__setattr__(self, 'xi', tuple(float(v) for v in self.xi))
        if len(self.xi) != N_MODES:
            raise DomainError(f'xi must have {N_MODES} entries, got {len(self.xi)}')
        if any(abs(v) > 1 for v in self.xi):
            raise DomainError('xi entries must lie in [-1, 1]')
        if not 0 < self.r < 1:
            raise DomainError(f'r must lie in (0, 1), got {self.r}')
        if self.nu_b < 0 or self.floor - self.nu_b <= 0:
            raise DomainError(f'nu_b must lie in [0, floor), got {self.nu_b}')

@dataclass(frozen=True)
class ConvolvedCoarse:
    """
    Coarse parameter of the convolved medium A(y)⁻¹ = γ_⌊y⌋ with
    γ_n = Σ_k h_k β_{n−k} and β iid chi-squared(ξ).

    Args:
        xi: Chi-squared degrees of freedom
        kernel: Nonnegative weights h_k for k = 0, ..., len(kernel) − 1

    The correlation length κ is the kernel length.
    """
    xi: int
    kernel: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'kernel', tuple(float(v) for v in self.kernel))
        if int(self.xi) != self.xi or self.xi < 1:
            raise DomainError(f'xi must be a positive integer, got {self.xi}')
        object.__setattr__(self, 'xi', int(self.xi))
        if not self.kernel or any(v < 0 for v in self.kernel):
            raise DomainError('kernel weights must be nonnegative')
        if sum(self.kernel) <= 0:
            raise DomainError('kernel must have positive mass')

    @classmethod
    def box(cls, xi: int, h_norm: float = 1.0, kappa: int = 1) -> 'ConvolvedCoarse':
        """Box kernel h_k = ‖h‖₁/κ for 0 ≤ k < κ; κ = 1 gives independent cells."""
        if kappa < 1:
            raise DomainError(f'kappa must be a positive integer, got {kappa}')
        return cls(xi, tuple([h_norm / kappa] * kappa))

    @property
    def h_norm(self) -> float:
        return float(sum(self.kernel))

    @property
    def kappa(self) -> int:
        return len(self.kernel)

@dataclass(frozen=True)
class MediaModel:
    """
    One media family with its coarse parameter ξ fixed.
    """
    coarse: ParameterizedCoarse | ConvolvedCoarse

    @property
    def family(self) -> MediaFamily:
        if isinstance(self.coarse, ParameterizedCoarse):
            return MediaFamily.PARAMETERIZED
        return MediaFamily.CONVOLVED

    @property
    def is_parameterized(self) -> bool:
        return self.family is MediaFamily.PARAMETERIZED

@dataclass(frozen=True, eq=False)
class FieldRealization:
    """
    One fine-scale realization at scale ε.

    Args:
        epsilon: Cell width; 1/ε is an integer
        inv_cells: Per-cell fine-scale values. θ_n for parameterized media,
            γ_n (the cell value of 1/A_ε) for convolved media
        beta_window: The chi-squared draws β over the padded window that
            produced γ (convolved media only)
    """
    epsilon: float
    inv_cells: np.ndarray
    beta_window: np.ndarray | None = None

    @property
    def n_cells(self) -> int:
        return len(self.inv_cells)

@dataclass(frozen=True)
class SourceSpec:
    """
    Piecewise-constant right-hand side f.

    Args:
        pieces: (x_lo, x_hi, value) triples partitioning [0, 1] in order
    """
    pieces: tuple[tuple[float, float, float], ...] = DEFAULT_SOURCE

    def __post_init__(self) -> None:
        pieces = tuple((float(lo), float(hi), float(v)) for lo, hi, v in self.pieces)
        object.__setattr__(self, 'pieces', pieces)
        if not pieces:
            raise DomainError('source must have at least one piece')
        if pieces[0][0] != 0.0 or pieces[-1][1] != 1.0:
            raise DomainError('source pieces must cover [0, 1]')
        for (_, hi, _), (lo, _, _) in zip(pieces, pieces[1:]):
            if hi != lo:
                raise DomainError('source pieces must be contiguous')
        if any(lo >= hi for lo, hi, _ in pieces):
            raise DomainError('source pieces must have positive length')

    @classmethod
    def constant(cls, value: float) -> 'SourceSpec':
        return cls(((0.0, 1.0, value),))

    @property
    def breakpoints(self) -> np.ndarray:
        """Interior breakpoints of f, where F has kinks."""
        return np.array([lo for lo, _, _ in self.pieces[1:]], dtype=float)

    @property
    def edges(self) -> np.ndarray:
        return np.array([lo for lo, _, _ in self.pieces] + [1.0], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, _, v in self.pieces], dtype=float)

@dataclass(frozen=True)
class ZVector:
    """
    The integrals Z_i = ∫ H_i / A_ε with H = (F·1_(0,x), F, 1_(0,x), 1).

    u_ε(x) = g(Z) = −z1 + z2·z3/z4.
    """
    z1: float
    z2: float
    z3: float
    z4: float

    @classmethod
    def from_array(cls, values: Any) -> 'ZVector':
        z1, z2, z3, z4 = (float(v) for v in values)
        return cls(z1, z2, z3, z4)

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3, self.z4])

    @property
    def g(self) -> float:
        return -self.z1 + self.z2 * self.z3 / self.z4

@dataclass(frozen=True, eq=False)
class SolutionPath:
    """
    A solution sampled on a grid, optionally with its expansion components.

    Args:
        grid: Sorted points in [0, 1]
        values: Solution values on the grid
        u0: Homogenized solution on the grid
        v_eps: First-order fluctuation v_ε
        r_eps: Remainder R_ε
    """
    grid: np.ndarray
    values: np.ndarray
    u0: np.ndarray | None = None
    v_eps: np.ndarray | None = None
    r_eps: np.ndarray | None = None

@dataclass(frozen=True)
class CorrectorSpec:
    """
    Inputs of the Gaussian corrector v(x) = ∫ G(x,t) σ(t) dW_t.
    """
    model: MediaModel
    f: SourceSpec = field(default_factory=SourceSpec)
    wiener_grid_size: int = 2000

    def __post_init__(self) -> None:
        if self.wiener_grid_size < 10:
            raise DomainError(f'wiener_grid_size must be at least 10, got {self.wiener_grid_size}')

class CramerKind(Enum):
    """
    FULL_4D is the functional of the vector Z_ε; APPROX_1D is the scalar
    functional of the linearized solution u₀ + v_ε.
    """
    FULL_4D = "full"
    APPROX_1D = "approx"

class RateStatus(Enum):
    """
    Outcome of a Legendre transform or rate minimization.
    """
    CONVERGED = "converged"
    BOUNDARY = "boundary"
    INFINITE = "infinite"
    NOT_CONVERGED = "not_converged"

@dataclass(frozen=True, eq=False)
class RateCurve:
    """
    Rate function values on a level grid.

    Args:
        levels: Sorted levels ℓ
        values: Rates in [0, ∞]
        argmax: Optimizer per level, shape (n,) for scalar transforms and
            (n, 4) for the contraction (z* per level)
        status: One `RateStatus` per level
        kind: 'approx', 'full', 'gaussian' or 'chernoff'
    """
    levels: np.ndarray
    values: np.ndarray
    argmax: np.ndarray
    status: tuple[RateStatus, ...]
    kind: str

    @property
    def failure_fraction(self) -> float:
        failed = sum(s is RateStatus.NOT_CONVERGED for s in self.status)
        return failed / max(len(self.status), 1)

class TiltFamily(Enum):
    NONE = "none"
    BRADFORD = "bradford"
    CHISQ = "chisq"

@dataclass(frozen=True)
class Tilt:
    """
    Importance sampling law: Bradford(c) for θ or the exponentially tilted
    chi-squared with parameter η for β. Parameter 0 is direct sampling.
    """
    family: TiltFamily = TiltFamily.NONE
    parameter: float = 0.0

    @property
    def is_direct(self) -> bool:
        return self.family is TiltFamily.NONE or self.parameter == 0.0

@dataclass(frozen=True, eq=False)
class WeightedSamples:
    """
    Monte Carlo draws of a point quantity with log likelihood ratios.

    Args:
        values: Draws of u_ε(x) (or of u₀ + v_ε(x) for linearized runs)
        log_weights: log(π_target / π_sampling) per draw
        epsilon: Cell width
        x: Observation point
        master_seed: Seed the run was drawn from
        tilt: Sampling law
        quantity: 'u_eps' or 'linearized'
    """
    values: np.ndarray
    log_weights: np.ndarray
    epsilon: float
    x: float
    master_seed: int
    tilt: Tilt = field(default_factory=Tilt)
    quantity: str = 'u_eps'

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

@dataclass(frozen=True, eq=False)
class EmpiricalRate:
    """
    Empirical rate function values per level, signed (≤ 0).

    Args:
        levels: Levels ℓ
        values: ε·log of the (unnormalized) tail estimate, −∞ with no exceedances
        normalized_values: Same with the self-normalized estimator
        ess: Effective sample size among the samples in the tail
        n_exceed: Number of samples in the tail
        center: Reference mean Ŵ splitting upper and lower tails
    """
    levels: np.ndarray
    values: np.ndarray
    normalized_values: np.ndarray
    ess: np.ndarray
    n_exceed: np.ndarray
    center: float

    @property
    def neg_values(self) -> np.ndarray:
        """−E per level, comparable with rate curves; +∞ with no exceedances."""
        return 0.0 - self.values

    @property
    def neg_normalized_values(self) -> np.ndarray:
        return 0.0 - self.normalized_values
