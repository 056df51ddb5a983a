"""Regularity machinery as computable objects.

The doubling functional with its two comparison profiles (Hoelder power and
Lipschitz-with-convex-correction), the explicit time-regularity barriers for
the singular and degenerate regimes, and modulus-of-continuity estimation
from solved fields.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .grid import GridField


@dataclass(frozen=True)
class PhiProfile:
    """Comparison profile on [0, 2]: either s^alpha or s - kappa s^beta.

    The Lipschitz profile fixes kappa = 2^(-beta-1)/beta, which keeps
    phi' = 1 - 2^(-beta-1) s^(beta-1) inside (3/4, 1] on [0, 2).
    """

    kind: str
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        if self.kind == "holder":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError("holder profile needs alpha in (0,1)")
        elif self.kind == "lipschitz":
            if self.beta is None or not 1.0 < self.beta < 2.0:
                raise ValueError("lipschitz profile needs beta in (1,2)")
        else:
            raise ValueError("profile kind must be 'holder' or 'lipschitz'")

    @property
    def kappa(self) -> float:
        if self.kind != "lipschitz":
            raise AttributeError("kappa only defined for the lipschitz profile")
        return 2.0 ** (-self.beta - 1.0) / self.beta


def _check_s(s, need_positive):
    s = np.asarray(s, dtype=float)
    if np.any(s > 2.0 + 1e-12):
        raise ValueError("profile domain is [0, 2]")
    if need_positive and np.any(s <= 0.0):
        raise ValueError("derivative undefined at s <= 0")
    return s


def phi_eval(profile: PhiProfile, s):
    s = _check_s(s, need_positive=False)
    if np.any(s < 0):
        raise ValueError("profile domain is [0, 2]")
    if profile.kind == "holder":
        return s**profile.alpha
    return s - profile.kappa * s**profile.beta


def phi_d1(profile: PhiProfile, s):
    if profile.kind == "holder":
        s = _check_s(s, need_positive=True)
        return profile.alpha * s ** (profile.alpha - 1.0)
    s = _check_s(s, need_positive=False)
    return 1.0 - profile.kappa * profile.beta * s ** (profile.beta - 1.0)


def phi_d2(profile: PhiProfile, s):
    s = _check_s(s, need_positive=True)
    if profile.kind == "holder":
        return profile.alpha * (profile.alpha - 1.0) * s ** (profile.alpha - 2.0)
    b = profile.beta
    return -profile.kappa * b * (b - 1.0) * s ** (b - 2.0)


def profile_admissible(profile: PhiProfile, s_grid=None):
    """Verify phi(0)=0, phi'' < 0 < phi' and |phi''| < phi'/s on (0,2]."""
    if s_grid is None:
        s_grid = np.linspace(1e-4, 2.0, 400)
    s = np.asarray(s_grid, dtype=float)
    v0 = phi_eval(profile, 0.0)
    d1, d2 = phi_d1(profile, s), phi_d2(profile, s)
    return (
        abs(float(v0)) == 0.0
        and np.all(d2 < 0)
        and np.all(d1 > 0)
        and np.all(np.abs(d2) < d1 / s)
    )


def _grid_index(coords, value, label):
    i = int(np.argmin(np.abs(coords - value)))
    if abs(coords[i] - value) > 1e-9:
        raise ValueError(f"{label} = {value} is not a grid node")
    return i


def doubling_psi(u: GridField, x, y, t, L, profile, anchors, K):
    """Doubling functional u(x,t) - u(y,t) - L phi(|x-y|) - quadratic anchor penalties."""
    x0, y0, t0 = anchors
    g = u.grid
    i = _grid_index(g.x, x, "x")
    j = _grid_index(g.x, y, "y")
    m = _grid_index(g.t, t, "t")
    pen = 0.5 * K * ((x - x0) ** 2 + (y - y0) ** 2 + (t - t0) ** 2)
    return float(u.values[i, m] - u.values[j, m] - L * phi_eval(profile, abs(x - y)) - pen)


def psi_max_scan(u: GridField, L, profile, anchor_set, K=None):
    """Exhaustive maximum of the doubling functional over grid pairs, per anchor.

    K defaults to 8 osc(u); L is the free parameter.  Returns the global
    maximum with its location and a per-anchor table.
    """
    g = u.grid
    if K is None:
        K = 8.0 * u.osc()
    sep = np.abs(g.x[:, None] - g.x[None, :])
    lphi = L * phi_eval(profile, sep)
    np.fill_diagonal(lphi, 0.0)

    best = -math.inf
    best_loc = None
    table = []
    for anchor in anchor_set:
        x0, y0, t0 = anchor
        pen_x = 0.5 * K * (g.x - x0) ** 2
        pen_y = 0.5 * K * (g.x - y0) ** 2
        pen_t = 0.5 * K * (g.t - t0) ** 2
        val, i, j, m = _kernels.psi_pair_scan(u.values, lphi, pen_x, pen_y, pen_t)
        table.append({"anchor": anchor, "max": val, "argmax": (float(g.x[i]), float(g.x[j]), float(g.t[m]))})
        if val > best:
            best = val
            best_loc = table[-1]["argmax"]
    return {"max_value": best, "argmax": best_loc, "per_anchor": table, "K": K}


def psi_threshold_search(u: GridField, profile, anchor_set, K=None, rel_tol=0.01, L_hi=None):
    """Bisect the smallest L with a non-positive doubling scan; returns a certified upper bound."""
    hx = u.grid.hx
    osc = u.osc()
    if osc == 0.0:
        return 0.0
    if L_hi is None:
        L_hi = 10.0 * osc / float(phi_eval(profile, min(hx, 2.0)))
    for _ in range(60):
        if psi_max_scan(u, L_hi, profile, anchor_set, K)["max_value"] <= 0.0:
            break
        L_hi *= 2.0
    else:
        raise RuntimeError("no non-positive scan level found")
    L_lo = 0.0
    while L_hi - L_lo > rel_tol * L_hi:
        mid = 0.5 * (L_lo + L_hi)
        if psi_max_scan(u, mid, profile, anchor_set, K)["max_value"] <= 0.0:
            L_hi = mid
        else:
            L_lo = mid
    return L_hi


@dataclass(frozen=True)
class BarrierSpec:
    """Explicit barrier base + A + Theta (t - t0) + K |x - anchor_x|^beta.

    Singular regime: beta = p/(p-1), A = (s0-t0)^{p/(p+q)},
    K = 2 (osc+1) (L+1)^beta beta A^{1-beta}, rho = A^{(beta-1)/beta}.
    Degenerate regime (p >= 2): beta = 2, A = (s0-t0)^{1/2},
    K = 4 (osc+1) (L+1)^2 / A, rho = 1.
    """

    regime: str
    p: float
    q: float
    anchor_x: float
    t0: float
    s0: float
    A: float
    K: float
    Theta: float
    beta: float
    rho: float
    C0: float
    base: float = 0.0

    def value(self, x, t):
        r = np.abs(np.asarray(x, dtype=float) - self.anchor_x)
        return self.base + self.A + self.Theta * (np.asarray(t, dtype=float) - self.t0) + self.K * r**self.beta

    def grad(self, x):
        d = np.asarray(x, dtype=float) - self.anchor_x
        return self.K * self.beta * np.sign(d) * np.abs(d) ** (self.beta - 1.0)


def barrier_make(regime, params, t0, s0, osc_u, L, anchor_x=0.0, base=0.0, theta=0.0):
    """Barrier constants for the requested regime; Theta left to the search."""
    if not t0 < s0 <= 0.0:
        raise ValueError("need t0 < s0 <= 0")
    gap = s0 - t0
    if gap > 1.0:
        raise ValueError("time gap must be <= 1 on unit-scale cylinders")
    p, q = params.p, params.q
    if regime == "singular":
        beta = p / (p - 1.0)
        if (beta - 1.0) * (q - 1.0) < 1.0 - 1e-12:
            raise ValueError("singular barrier needs (beta-1)(q-1) >= 1")
        A = gap ** (p / (p + q))
        C0 = 2.0 * (osc_u + 1.0) * (L + 1.0) ** beta * beta
        K = C0 * A ** (1.0 - beta)
        rho = A ** ((beta - 1.0) / beta)
    elif regime == "degenerate":
        if p < 2.0:
            raise ValueError("degenerate barrier needs p >= 2")
        beta = 2.0
        A = gap**0.5
        C0 = 4.0 * (osc_u + 1.0) * (L + 1.0) ** 2
        K = C0 / A
        rho = 1.0
    else:
        raise ValueError("regime must be 'singular' or 'degenerate'")
    return BarrierSpec(
        regime=regime, p=p, q=q, anchor_x=anchor_x, t0=t0, s0=s0,
        A=A, K=K, Theta=theta, beta=beta, rho=rho, C0=C0, base=base,
    )


def _barrier_divergence(spec, coeff, xs, ts, dim=1):
    """Exact div(A(z, Dphi)) for the radial barrier, plus nothing else.

    For phi = K r^beta:  Delta_p phi = (K beta)^{p-1} [(beta-1)(p-1) + N - 1]
    r^{(beta-1)(p-1)-1}; the coefficient contributes a Delta_q phi and the
    drift |Dphi|^{q-2} Dphi . Da.
    """
    p, q, beta, K = spec.p, spec.q, spec.beta, spec.K
    r = np.abs(xs - spec.anchor_x)
    if np.any(r <= 0):
        raise ValueError("samples must exclude the barrier anchor x")
    lap_p = (K * beta) ** (p - 1.0) * ((beta - 1.0) * (p - 1.0) + dim - 1.0) * r ** (
        (beta - 1.0) * (p - 1.0) - 1.0
    )
    lap_q = (K * beta) ** (q - 1.0) * ((beta - 1.0) * (q - 1.0) + dim - 1.0) * r ** (
        (beta - 1.0) * (q - 1.0) - 1.0
    )
    X, T = np.meshgrid(xs, ts, indexing="ij")
    a_vals = np.asarray(coeff.eval(X, T), dtype=float)
    da_vals = np.asarray(coeff.dx_at(X, T), dtype=float)
    dphi = spec.grad(xs)[:, None]
    drift = np.abs(dphi) ** (q - 2.0) * dphi * da_vals
    return lap_p[:, None] + a_vals * lap_q[:, None] + drift


def barrier_residual(spec, coeff, rhs, sample_grid, dim=1):
    """Min over samples of d/dt phi - div A(z, Dphi) - f(z, Dphi), exact derivatives.

    sample_grid = (xs, ts) with xs excluding the anchor point.  Samples on
    the kink set of the coefficient (one-sided differences of a disagree)
    are skipped; it has measure zero for the closed-form coefficients.
    """
    from .coefficient import kink_mask

    xs, ts = (np.asarray(v, dtype=float) for v in sample_grid)
    div = _barrier_divergence(spec, coeff, xs, ts, dim)
    if rhs is None:
        fv = 0.0
    else:
        X, T = np.meshgrid(xs, ts, indexing="ij")
        fv = np.asarray(rhs(X, T, spec.grad(xs)[:, None] + 0.0 * T), dtype=float)
    res = spec.Theta - div - fv
    hx = float(np.min(np.abs(np.diff(xs)))) if xs.size > 1 else 1e-6
    Xm, Tm = np.meshgrid(xs, ts, indexing="ij")
    keep = ~kink_mask(coeff, Xm, Tm, hx)
    if not np.any(keep):
        raise ValueError("every sample sits on the coefficient's kink set")
    res = np.where(keep, res, np.inf)
    k = int(np.argmin(res))
    return float(res.flat[k]), (float(xs[k // ts.size]), float(ts[k % ts.size]))


def barrier_theta_search(spec, coeff, rhs, sample_grid, theta0=1e-8, max_doublings=300, dim=1):
    """Smallest doubling-search Theta making the barrier a pointwise supersolution.

    Doubles from theta0 until the residual is >= 0 on the samples, so the
    result overshoots the sharp threshold by at most a factor 2.  Also
    reports the implied prefactor Theta / K^{q/beta}.
    """
    theta = float(theta0)
    for _ in range(max_doublings):
        trial = replace(spec, Theta=theta)
        res, _ = barrier_residual(trial, coeff, rhs, sample_grid, dim)
        if res >= 0.0:
            return theta, {"residual": res, "C1": theta / spec.K ** (spec.q / spec.beta)}
        theta *= 2.0
    raise RuntimeError("theta search exceeded the doubling cap")


def default_barrier_samples(spec, hx, n_x=40, n_t=25):
    """Sample grid over (anchor, rho] x [t0, 0], excluding |x - anchor| < hx."""
    xs = np.linspace(hx, spec.rho, n_x) + spec.anchor_x
    ts = np.linspace(spec.t0, 0.0, n_t)
    return xs, ts


@dataclass
class ModulusReport:
    """Measured space-Lipschitz constant and time-Hoelder exponent with fit quality."""

    lip_space_est: float
    time_alpha_est: float
    alpha_defined: bool
    fit_r2: float
    n_space_pairs: int
    n_time_lags: int


def modulus_estimate(u: GridField, inner_cylinder=None) -> ModulusReport:
    """Estimate the spatial Lipschitz constant and the time-Hoelder exponent.

    Pairs closer than 2 h_x (or lags shorter than 2 h_t) are excluded:
    discretization noise dominates below grid scale.  The time exponent is
    the log-log slope of sup_x |u(x,t) - u(x,s)| against dyadic lags.
    """
    f = u if inner_cylinder is None else u.restrict(*inner_cylinder)
    g = f.grid
    vals = f.values

    lip = 0.0
    n_pairs = 0
    for shift in range(2, g.nx):
        d = np.abs(vals[shift:, :] - vals[:-shift, :]) / (shift * g.hx)
        n_pairs += d.size
        if d.size:
            lip = max(lip, float(np.max(d)))

    lags = []
    lag = 2
    while lag <= (g.nt - 1) // 2:
        lags.append(lag)
        lag *= 2
    sups = [float(np.max(np.abs(vals[:, L:] - vals[:, :-L]))) for L in lags]
    defined = len(lags) >= 3 and all(s > 0.0 for s in sups)
    if defined:
        logs_t = np.log([L * g.ht for L in lags])
        logs_s = np.log(sups)
        slope, intercept = np.polyfit(logs_t, logs_s, 1)
        pred = slope * logs_t + intercept
        ss_res = float(np.sum((logs_s - pred) ** 2))
        ss_tot = float(np.sum((logs_s - np.mean(logs_s)) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        alpha = float(slope)
    else:
        alpha, r2 = float("nan"), 0.0
    return ModulusReport(
        lip_space_est=lip,
        time_alpha_est=alpha,
        alpha_defined=defined,
        fit_r2=max(0.0, min(1.0, r2)),
        n_space_pairs=n_pairs,
        n_time_lags=len(lags),
    )
