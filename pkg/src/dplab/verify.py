"""Inequality checkers turning the structural lemmas into pass/fail reports.

Each checker scans a discrete field (or pair of fields) and reports the
worst margin with its location; pass/fail is always relative to an explicit
tolerance recorded in the report.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from .flux import _safe_pow
from .grid import GridField, integrate_xt


class HypothesisViolation(ValueError):
    """The checker's hypothesis fails (distinct from the checked claim failing)."""


@dataclass
class CheckReport:
    name: str
    passed: bool
    worst_value: float
    worst_location: tuple
    tolerance: float
    metadata: dict = dc_field(default_factory=dict)


def _same_grid(u: GridField, v: GridField):
    if u.values.shape != v.values.shape or not (
        np.allclose(u.grid.x, v.grid.x) and np.allclose(u.grid.t, v.grid.t)
    ):
        raise ValueError("fields must share one grid")


def comparison_check(u: GridField, v: GridField, tol=1e-8) -> CheckReport:
    """Order preservation: u <= v on the parabolic boundary must give u <= v inside.

    Raises HypothesisViolation when the boundary ordering fails (that is a
    broken hypothesis, not a failed conclusion).
    """
    _same_grid(u, v)
    gap = u.values - v.values
    boundary = np.concatenate([gap[:, 0], gap[0, 1:], gap[-1, 1:]])
    if np.max(boundary) > tol:
        raise HypothesisViolation(
            f"u <= v fails on the parabolic boundary by {np.max(boundary):.3e}"
        )
    interior = gap[1:-1, 1:]
    k = int(np.argmax(interior))
    worst = float(interior.flat[k])
    i, m = k // interior.shape[1] + 1, k % interior.shape[1] + 1
    loc = (float(u.grid.x[i]), float(u.grid.t[m]))
    return CheckReport("comparison", worst <= tol, worst, loc, tol, {"boundary_worst": float(np.max(boundary))})


def class_S_check(u: GridField, params, coeff, eta_min=None, tol=None) -> CheckReport:
    """Both relaxed semi-jet inequalities on discrete jets at interior points.

    The jet is (centered dt, centered gradient, second difference); points
    with |eta| < eta_min are skipped (the vanishing-gradient exclusion).
    Checks theta - F + g >= -tol and theta - F - g <= tol.
    """
    g = u.grid
    osc = u.osc()
    if eta_min is None:
        eta_min = 5.0 * g.hx**0.5 * osc
    if tol is None:
        tol = 10.0 * (g.hx + g.ht) * osc

    vals = u.values
    theta = (vals[1:-1, 2:] - vals[1:-1, :-2]) / (2.0 * g.ht)
    eta = (vals[2:, 1:-1] - vals[:-2, 1:-1]) / (2.0 * g.hx)
    Xh = (vals[2:, 1:-1] - 2.0 * vals[1:-1, 1:-1] + vals[:-2, 1:-1]) / g.hx**2
    X, T = np.meshgrid(g.x[1:-1], g.t[1:-1], indexing="ij")
    a_vals = np.asarray(coeff.eval(X, T), dtype=float)

    keep = (np.abs(eta) >= eta_min) & (np.abs(eta) > 0.0)  # eta = 0 is never tested
    n_skipped = int(keep.size - keep.sum())
    if not np.any(keep):
        return CheckReport(
            "class_S", True, 0.0, (float("nan"), float("nan")), tol,
            {"skipped": n_skipped, "checked": 0, "eta_min": eta_min, "vacuous": True},
        )

    r = np.abs(eta[keep])
    F = (params.p - 1.0) * _safe_pow(r, params.p - 2.0) * Xh[keep] + a_vals[keep] * (
        params.q - 1.0
    ) * _safe_pow(r, params.q - 2.0) * Xh[keep]
    gb = coeff.lip_space * _safe_pow(r, params.q - 1.0) + params.C_f * (
        1.0 + _safe_pow(r, params.beta1) + a_vals[keep] * _safe_pow(r, params.beta2)
    )
    core = theta[keep] - F
    sub_margin = -(core + gb)  # violation of theta - F + g >= 0 when positive
    sup_margin = core - gb  # violation of theta - F - g <= 0 when positive
    worst = float(max(np.max(sub_margin), np.max(sup_margin)))

    Xk, Tk = X[keep], T[keep]
    idx = int(np.argmax(np.maximum(sub_margin, sup_margin)))
    loc = (float(Xk[idx]), float(Tk[idx]))
    return CheckReport(
        "class_S", worst <= tol, worst, loc, tol,
        {"skipped": n_skipped, "checked": int(keep.sum()), "eta_min": eta_min, "vacuous": False},
    )


def caccioppoli_check(u: GridField, cutoff, coeff, params, M, C_cap=100.0):
    """Weighted gradient energy against the zeroth-order majorant through a cutoff.

    lhs = int xi^q (|Du|^p + a |Du|^q); rhs = int M^2 |dt xi^q|
    + max(M^p, M^q)(|Dxi|^p + a |Dxi|^q) + (M^{p/(p-b1)} + M^{q/(q-b2)} + M) xi^q,
    with u vertically shifted by its infimum over spt(xi) and M reduced
    accordingly, so the ratio is invariant under adding constants to (u, M).
    The constant is reported, not asserted: pass means ratio <= C_cap.
    """
    g = u.grid
    X, T = np.meshgrid(g.x, g.t, indexing="ij")
    xi = np.asarray(cutoff.value(X, T), dtype=float)
    if np.any(xi < -1e-12) or np.any(xi > 1.0 + 1e-12):
        raise ValueError("cutoff must satisfy 0 <= xi <= 1")
    # lateral support suffices; time-independent cutoffs are admitted (their
    # time term simply vanishes)
    if max(np.max(np.abs(xi[0, :])), np.max(np.abs(xi[-1, :]))) > 1e-12:
        raise ValueError("cutoff must vanish on the lateral boundary")

    spt = xi > 0.0
    sup_u = float(np.max(np.abs(u.values[spt])))
    if M < sup_u:
        raise ValueError(f"M = {M} is below sup |u| = {sup_u:.6g} on spt xi")
    shift = float(np.min(u.values[spt]))
    Mv = M - shift

    p, q, b1, b2 = params.p, params.q, params.beta1, params.beta2
    du = np.abs(u.gradient_x())
    lhs = integrate_xt(g, xi**q * (du**p + _a(coeff, X, T) * du**q))

    xi_t = np.asarray(cutoff.dt(X, T), dtype=float)
    xi_x = np.abs(np.asarray(cutoff.dx(X, T), dtype=float))
    a_vals = _a(coeff, X, T)
    dt_xiq = q * xi ** (q - 1.0) * xi_t
    rhs_integrand = (
        Mv**2 * np.abs(dt_xiq)
        + max(Mv**p, Mv**q) * (xi_x**p + a_vals * xi_x**q)
        + (Mv ** (p / (p - b1)) + Mv ** (q / (q - b2)) + Mv) * xi**q
    )
    rhs = integrate_xt(g, rhs_integrand)
    ratio = 0.0 if lhs == 0.0 else (float("inf") if rhs == 0.0 else lhs / rhs)
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio, "passed": ratio <= C_cap, "C_cap": C_cap}


def _a(coeff, X, T):
    return np.asarray(coeff.eval(X, T), dtype=float)


def lr_modular(u1: GridField, u2: GridField, r1, r2, coeff, params) -> float:
    """Weighted gradient-difference modular int |Du1-Du2|^{r1} + a |Du1-Du2|^{r2}."""
    if not 1.0 < r1 < params.p:
        raise ValueError(f"need 1 < r1 < p, got r1={r1}, p={params.p}")
    if not 1.0 < r2 < params.q:
        raise ValueError(f"need 1 < r2 < q, got r2={r2}, q={params.q}")
    _same_grid(u1, u2)
    g = u1.grid
    d = np.abs(u1.gradient_x() - u2.gradient_x())
    X, T = np.meshgrid(g.x, g.t, indexing="ij")
    return integrate_xt(g, d**r1 + _a(coeff, X, T) * d**r2)
