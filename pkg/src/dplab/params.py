"""Scalar exponents of the double-phase operator and their admissibility relations.

The growth exponents (p, q) drive everything downstream: the flux switches
between p-growth and q-growth, the gap q - p <= 1 gates the regularity
machinery, and the lower-order exponents (beta1, beta2) bound the
right-hand side.  All checks are strict inequalities with no tolerance;
callers that want the borderline q = p + 1 behaviour must set
``borderline_ok``.
"""

from dataclasses import dataclass


class AdmissibilityError(ValueError):
    """Raised when exponent parameters violate a structural hypothesis."""


@dataclass(frozen=True)
class ExponentParams:
    """Exponents (p, q) of the flux and (beta1, beta2, C_f) of the rhs growth bound.

    Requires 1 < p <= q, 1 <= beta1 < p, 1 <= beta2 < q and C_f >= 0.
    ``in_gap_range`` is True iff q <= p + 1.
    """

    p: float
    q: float
    beta1: float = 1.0
    beta2: float = 1.0
    C_f: float = 0.0
    borderline_ok: bool = False

    def __post_init__(self):
        if not self.p > 1.0:
            raise AdmissibilityError(f"require p > 1, got p={self.p}")
        if not self.q >= self.p:
            raise AdmissibilityError(f"require q >= p, got p={self.p}, q={self.q}")
        if not 1.0 <= self.beta1 < self.p:
            raise AdmissibilityError(f"require 1 <= beta1 < p, got beta1={self.beta1}, p={self.p}")
        if not 1.0 <= self.beta2 < self.q:
            raise AdmissibilityError(f"require 1 <= beta2 < q, got beta2={self.beta2}, q={self.q}")
        if self.C_f < 0.0:
            raise AdmissibilityError(f"require C_f >= 0, got {self.C_f}")
        if self.q == self.p + 1.0 and not self.borderline_ok:
            raise AdmissibilityError(
                "q = p + 1 is the borderline case; set borderline_ok=True to allow it"
            )

    @property
    def in_gap_range(self) -> bool:
        return self.q <= self.p + 1.0

    @property
    def singular(self) -> bool:
        """True in the singular regime 1 < p < 2 (flux blows up at zero gradient)."""
        return self.p < 2.0

    @property
    def gamma(self) -> float:
        return gamma_exponent(self)


@dataclass(frozen=True)
class MultiPhaseParams:
    """Exponents of the three-phase flux |xi|^{p-2}xi + a|xi|^{q-2}xi + b|xi|^{s-2}xi."""

    p: float
    q: float
    s: float
    beta1: float = 1.0
    beta2: float = 1.0
    beta3: float = 1.0
    C_f: float = 0.0
    borderline_ok: bool = False

    def __post_init__(self):
        if not self.p > 1.0:
            raise AdmissibilityError(f"require p > 1, got p={self.p}")
        if not self.p <= self.q <= self.s:
            raise AdmissibilityError(
                f"require p <= q <= s, got ({self.p}, {self.q}, {self.s})"
            )
        for name, beta, upper in (
            ("beta1", self.beta1, self.p),
            ("beta2", self.beta2, self.q),
            ("beta3", self.beta3, self.s),
        ):
            if not 1.0 <= beta < upper:
                raise AdmissibilityError(f"require 1 <= {name} < {upper}, got {beta}")
        if self.C_f < 0.0:
            raise AdmissibilityError(f"require C_f >= 0, got {self.C_f}")
        if self.s == self.p + 1.0 and not self.borderline_ok:
            raise AdmissibilityError(
                "s = p + 1 is the borderline case; set borderline_ok=True to allow it"
            )

    @property
    def in_gap_range(self) -> bool:
        return self.s <= self.p + 1.0


def gamma_exponent(params: ExponentParams) -> float:
    """Exponent collecting the lower-order powers of the doubling estimate.

    gamma = max(q - p, beta1 - p + 1, beta2 - q + 1) + 1.
    """
    return max(params.q - params.p, params.beta1 - params.p + 1.0, params.beta2 - params.q + 1.0) + 1.0


def gamma_multiphase(params: MultiPhaseParams) -> float:
    """Three-phase variant: gamma - 1 = max(s-p, beta1-p+1, beta2-q+1, beta3-s+1)."""
    return (
        max(
            params.s - params.p,
            params.beta1 - params.p + 1.0,
            params.beta2 - params.q + 1.0,
            params.beta3 - params.s + 1.0,
        )
        + 1.0
    )


def time_exponent_target(p: float, q: float) -> float:
    """Sharp time-Hoelder exponent: p/(p+q) in the singular range, 1/2 for p >= 2."""
    if not 1.0 < p <= q:
        raise AdmissibilityError(f"require 1 < p <= q, got p={p}, q={q}")
    if p < 2.0:
        return p / (p + q)
    return 0.5


def lipschitz_profile_beta(alpha: float, gamma: float) -> float:
    """Curvature exponent for the Lipschitz profile s - kappa*s^beta.

    beta = min(alpha/2 + 1, (1 + (2 - (alpha/2 + (gamma-1)(1-alpha))))/2),
    admissible only when alpha/2 + (gamma-1)(1-alpha) < 1.  The result lies
    in (1, 2) and satisfies beta <= alpha/2 + 1 together with the strict
    bound beta + alpha/2 + (gamma-1)(1-alpha) < 2.
    """
    if not 0.0 < alpha < 1.0:
        raise AdmissibilityError(f"require alpha in (0,1), got {alpha}")
    crit = alpha / 2.0 + (gamma - 1.0) * (1.0 - alpha)
    if not crit < 1.0:
        raise AdmissibilityError(
            f"alpha/2 + (gamma-1)(1-alpha) = {crit} >= 1: Lipschitz step inapplicable"
        )
    return min(alpha / 2.0 + 1.0, (1.0 + (2.0 - crit)) / 2.0)
