"""Fixed constants of the two model media and the default source term.

Tunable numerical settings (Gauss orders, panel counts, tolerances) are not
kept here; they live in `homogldp.data` and are read through
`homogldp.lookups.Defaults`.
"""

__docformat__ = 'google'

N_MODES: int = 8
""" Number of sine modes ξ_0, ..., ξ_7 in the parameterized coarse field."""

COARSE_FLOOR: float = 17 / 32
""" Lower cutoff applied to the parameterized coarse field a(x, ξ).

The floor sits above ν_b = 1/2, so a(x, ξ) + ν_b θ stays positive for every
θ ∈ [−1, 1]."""

COARSE_AMPLITUDE: float = 2 * (1 - 0.75) / 0.75
""" Prefactor 2/3 of the sine expansion in a(x, ξ)."""

COEFF_MIN: float = 1 / 32
""" Smallest value a parameterized coefficient A_ε can take."""

COEFF_MAX: float = 1 + COARSE_AMPLITUDE * (1 - 0.75 ** N_MODES) / (1 - 0.75) + 1 / 2
""" Largest value a parameterized coefficient A_ε can take with r = 3/4 and
ν_b = 1/2, about 3.8997, reached at x = 1/2 when ξ_m = (−1)^m.

Typical draws of ξ stay below 7/2."""

GEOMETRIC_P: float = 1 / 5
""" Success probability of the geometric prior on the chi-squared degrees of
freedom ξ of the convolved medium (support {1, 2, ...}, mean 5)."""

CHISQ_BOUNDARY: float = 1 / 2
""" Right end b of the effective domain (−∞, b) of the chi-squared log-MGF."""

DEFAULT_SOURCE: tuple[tuple[float, float, float], ...] = (
    (0.0, 0.45, 0.0),
    (0.45, 0.55, 1.0),
    (0.55, 1.0, 0.0)
)
""" Pieces (x_lo, x_hi, value) of the default right-hand side f.

f ≡ 1 on (0.45, 0.55) and 0 elsewhere, so F(1) = 0.1."""

DEFAULT_X: float = 0.5
""" Observation point used by the figure recipes and most tests."""
