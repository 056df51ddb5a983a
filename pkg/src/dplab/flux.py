"""Pointwise nonlinear operators of the double-phase equation.

The flux A(z, xi) = |xi|^{p-2} xi + a(z) |xi|^{q-2} xi, its delta-smoothed
version, the non-divergence operator F acting on (gradient, Hessian) pairs,
the first-order bound g, and the growth bound on the right-hand side.  All
powers of |xi| treat |xi| < 1e-300 as exactly zero to avoid 0^negative in
the singular range.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

ZERO_CUTOFF = 1e-300


class GradientSingularityError(ValueError):
    """Raised when an operator that needs eta != 0 is fed a zero gradient."""


@dataclass(frozen=True)
class PointState:
    """One evaluation point: location z = (x, t), gradient xi, optional Hessian X."""

    z: tuple
    xi: np.ndarray
    X: Optional[np.ndarray] = None
    a_val: float = 0.0
    b_val: Optional[float] = None

    def __post_init__(self):
        if self.a_val < 0 or (self.b_val is not None and self.b_val < 0):
            raise ValueError("coefficient values must be >= 0")
        if self.X is not None:
            X = np.asarray(self.X, dtype=float)
            if np.max(np.abs(X - X.T)) > 1e-12:
                raise ValueError("Hessian must be symmetric within 1e-12")


def _norm(xi):
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        return np.abs(xi)
    return np.sqrt(np.sum(xi * xi, axis=-1))


def _safe_pow(r, e):
    """r**e with the convention 0**e = 0 for any e (guards the singular range)."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros_like(r_arr)
    mask = r_arr > ZERO_CUTOFF
    if np.any(mask):
        out[mask] = np.exp(e * np.log(r_arr[mask]))
    if np.ndim(r) == 0:
        return float(out[0])
    return out.reshape(np.shape(r))


def hamiltonian_H(params, a_val, xi):
    """H(z, xi) = |xi|^p + a |xi|^q."""
    r = _norm(xi)
    return _safe_pow(r, params.p) + np.asarray(a_val) * _safe_pow(r, params.q)


def flux_A(params, a_val, xi):
    """Double-phase flux |xi|^{p-2} xi + a |xi|^{q-2} xi, with value 0 at xi = 0."""
    xi = np.asarray(xi, dtype=float)
    r = _norm(xi)
    coef = _safe_pow(r, params.p - 2.0) + np.asarray(a_val) * _safe_pow(r, params.q - 2.0)
    return np.asarray(coef)[..., None] * xi if xi.ndim else coef * xi


def flux_regularized(params, a_val, xi, delta):
    """Smoothed flux (delta + |xi|^2)^{(p-2)/2} xi + a (delta + |xi|^2)^{(q-2)/2} xi."""
    if delta <= 0:
        raise ValueError("delta must be > 0")
    xi = np.asarray(xi, dtype=float)
    r2 = delta + (xi * xi if xi.ndim == 0 else np.sum(xi * xi, axis=-1))
    coef = r2 ** ((params.p - 2.0) / 2.0) + np.asarray(a_val) * r2 ** ((params.q - 2.0) / 2.0)
    return np.asarray(coef)[..., None] * xi if xi.ndim else coef * xi


def flux_A_1d(params, a_val, xi):
    """Scalar-batch flux for 1D solves: xi is an array of scalar gradients."""
    xi = np.asarray(xi, dtype=float)
    r = np.abs(xi)
    return (_safe_pow(r, params.p - 2.0) + np.asarray(a_val) * _safe_pow(r, params.q - 2.0)) * xi


def flux_regularized_1d(params, a_val, xi, delta):
    """Scalar-batch smoothed flux for 1D solves."""
    if delta <= 0:
        raise ValueError("delta must be > 0")
    xi = np.asarray(xi, dtype=float)
    r2 = delta + xi * xi
    return (r2 ** ((params.p - 2.0) / 2.0) + np.asarray(a_val) * r2 ** ((params.q - 2.0) / 2.0)) * xi


def flux_regularized_deriv(params, a_val, xi, delta):
    """d/dxi of the 1D smoothed flux; used by the solver's Newton Jacobian."""
    xi = np.asarray(xi, dtype=float)
    r2 = delta + xi * xi
    dp = r2 ** ((params.p - 2.0) / 2.0) * (1.0 + (params.p - 2.0) * xi * xi / r2)
    dq = r2 ** ((params.q - 2.0) / 2.0) * (1.0 + (params.q - 2.0) * xi * xi / r2)
    return dp + np.asarray(a_val) * dq


def operator_F(params, coeff, z, eta, X):
    """Non-divergence operator F((x,t), eta, X); rejects eta = 0.

    F = |eta|^{p-2}(tr X + (p-2) eta'X eta/|eta|^2)
        + a(x,t) |eta|^{q-2}(tr X + (q-2) eta'X eta/|eta|^2).
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    r = float(np.sqrt(np.dot(eta, eta)))
    if r <= ZERO_CUTOFF:
        raise GradientSingularityError("operator_F requires eta != 0")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    tr = float(np.trace(X))
    quad = float(eta @ X @ eta) / (r * r)
    a_val = float(coeff.eval(*z)) if hasattr(coeff, "eval") else float(coeff)
    return _safe_pow(r, params.p - 2.0) * (tr + (params.p - 2.0) * quad) + a_val * _safe_pow(
        r, params.q - 2.0
    ) * (tr + (params.q - 2.0) * quad)


def bound_g(params, coeff, z, eta):
    """First-order bound g = |Da|_inf |eta|^{q-1} + C_f (1 + |eta|^{b1} + a |eta|^{b2})."""
    r = _norm(eta)
    a_val = coeff.eval(*z) if hasattr(coeff, "eval") else coeff
    return coeff.lip_space * _safe_pow(r, params.q - 1.0) + params.C_f * (
        1.0 + _safe_pow(r, params.beta1) + np.asarray(a_val) * _safe_pow(r, params.beta2)
    )


def rhs_growth_bound(params, a_val, xi):
    """Growth bound C_f (1 + |xi|^{beta1} + a |xi|^{beta2}) on the rhs f."""
    r = _norm(xi)
    return params.C_f * (1.0 + _safe_pow(r, params.beta1) + np.asarray(a_val) * _safe_pow(r, params.beta2))


def multiphase_flux(mparams, a_val, b_val, xi):
    """Three-phase flux |xi|^{p-2}xi + a |xi|^{q-2}xi + b |xi|^{s-2}xi."""
    xi = np.asarray(xi, dtype=float)
    r = _norm(xi)
    coef = (
        _safe_pow(r, mparams.p - 2.0)
        + np.asarray(a_val) * _safe_pow(r, mparams.q - 2.0)
        + np.asarray(b_val) * _safe_pow(r, mparams.s - 2.0)
    )
    return np.asarray(coef)[..., None] * xi if xi.ndim else coef * xi


# Vector inequalities behind the comparison estimates.  Each helper returns
# lhs - rhs for batches of vector pairs (A, B of shape (n, N)); the
# inequality holds iff the gap is >= 0.

def _power_map(r_exp, V):
    norm = np.sqrt(np.sum(V * V, axis=-1, keepdims=True))
    coef = np.where(norm > ZERO_CUTOFF, norm, 1.0) ** (r_exp - 2.0)
    return np.where(norm > ZERO_CUTOFF, coef, 0.0) * V


def monotonicity_gap_singular(r_exp, A, B):
    """Gap of (|a|^{r-2}a - |b|^{r-2}b).(a-b) >= (r-1)|a-b|^2 (1+|a|^2+|b|^2)^{(r-2)/2}, 1 < r <= 2."""
    A, B = np.atleast_2d(np.asarray(A, float)), np.atleast_2d(np.asarray(B, float))
    lhs = np.sum((_power_map(r_exp, A) - _power_map(r_exp, B)) * (A - B), axis=-1)
    na2, nb2 = np.sum(A * A, axis=-1), np.sum(B * B, axis=-1)
    d2 = np.sum((A - B) ** 2, axis=-1)
    rhs = (r_exp - 1.0) * d2 * (1.0 + na2 + nb2) ** ((r_exp - 2.0) / 2.0)
    return lhs - rhs


def monotonicity_gap_degenerate(r_exp, A, B):
    """Gap of (|a|^{r-2}a - |b|^{r-2}b).(a-b) >= 2^{2-r}|a-b|^r, for r >= 2."""
    A, B = np.atleast_2d(np.asarray(A, float)), np.atleast_2d(np.asarray(B, float))
    lhs = np.sum((_power_map(r_exp, A) - _power_map(r_exp, B)) * (A - B), axis=-1)
    d = np.sqrt(np.sum((A - B) ** 2, axis=-1))
    rhs = 2.0 ** (2.0 - r_exp) * d**r_exp
    return lhs - rhs


def continuity_gap_singular(r_exp, A, B):
    """Gap of | |a|^{r-2}a - |b|^{r-2}b | <= 2^{2-r} |a-b|^{r-1}, for r < 2."""
    A, B = np.atleast_2d(np.asarray(A, float)), np.atleast_2d(np.asarray(B, float))
    lhs = np.sqrt(np.sum((_power_map(r_exp, A) - _power_map(r_exp, B)) ** 2, axis=-1))
    d = np.sqrt(np.sum((A - B) ** 2, axis=-1))
    rhs = 2.0 ** (2.0 - r_exp) * _safe_pow(d, r_exp - 1.0)
    return rhs - lhs
