"""Approximation devices: Steklov time averages, spatial mollification, inf-convolution.

Each transform comes with the checker for its convergence or structure
claim, including the counter-example showing that Steklov averaging can
leave the weighted gradient class when the coefficient vanishes on the
wrong side in time.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .coefficient import check_almost_increasing
from .grid import Grid, GridField, integrate_xt, trapezoid_weights


def _window_steps(grid: Grid, h: float) -> int:
    w = h / grid.ht
    if not (w > 0.5 and abs(w - round(w)) < 1e-8):
        raise ValueError(f"h = {h} must be a positive multiple of h_t = {grid.ht}")
    w = int(round(w))
    if w >= grid.nt:
        raise ValueError(f"h = {h} exceeds the time extent of the field")
    return w


def _cumint_t(field: GridField) -> np.ndarray:
    """Cumulative trapezoid integral of u along t; I[:, m] = int_{t_0}^{t_m} u ds."""
    u, ht = field.values, field.grid.ht
    I = np.zeros_like(u)
    np.cumsum(0.5 * (u[:, 1:] + u[:, :-1]) * ht, axis=1, out=I[:, 1:])
    return I


def steklov_left(field: GridField, h: float) -> GridField:
    """Trailing window average (1/h) int_{t-h}^t u ds; domain loses h at the start."""
    w = _window_steps(field.grid, h)
    I = _cumint_t(field)
    vals = (I[:, w:] - I[:, :-w]) / h
    return GridField(Grid(field.grid.x, field.grid.t[w:]), vals)


def steklov_right(field: GridField, h: float) -> GridField:
    """Leading window average (1/h) int_t^{t+h} u ds; domain loses h at the end."""
    w = _window_steps(field.grid, h)
    I = _cumint_t(field)
    vals = (I[:, w:] - I[:, :-w]) / h
    return GridField(Grid(field.grid.x, field.grid.t[:-w]), vals)


def _wh_modular(du_diff: np.ndarray, a_vals: np.ndarray, p: float, q: float, grid: Grid) -> float:
    absd = np.abs(du_diff)
    return integrate_xt(grid, absd**p + a_vals * absd**q)


@dataclass
class SweepReport:
    """Convergence table for a transform parameter sweep."""

    name: str
    values: list
    modulars: list
    passed: bool
    tol: float
    details: dict = field(default_factory=dict)


def _monotone_to_tol(modulars, tol, tail_slack=1.05):
    mono = all(m1 <= tail_slack * m0 + 1e-300 for m0, m1 in zip(modulars, modulars[1:]))
    return mono and modulars[-1] <= tol


def steklov_wh_convergence(field, coeff, params, h_sequence, direction="auto", tol=1e-6):
    """Weighted-modular convergence of Steklov averages along a decreasing h-sweep.

    The modular int |D[u]_h - Du|^p + a |D[u]_h - Du|^q is evaluated on the
    time window common to the whole sweep.  direction="auto" picks the right
    average when the coefficient is almost increasing in time, the left one
    when almost decreasing.  Pass: non-increasing up to 5% tail noise and
    below tol at the finest h.
    """
    hs = sorted(float(h) for h in h_sequence)[::-1]
    grid = field.grid
    cyl = (grid.x[0], grid.x[-1], grid.t[0], grid.t[-1])
    note = direction
    if direction == "auto":
        if check_almost_increasing(coeff, cyl, direction="increasing")["ok"]:
            direction = "right"
        elif check_almost_increasing(coeff, cyl, direction="decreasing")["ok"]:
            direction = "left"
        else:
            direction = "right"
            note = "auto: neither monotonicity condition holds; used right average"

    h_max = hs[0]
    w_max = _window_steps(grid, h_max)
    if direction == "right":
        t_window = (grid.t[0], grid.t[-1 - w_max])
        avg_fn = steklov_right
    else:
        t_window = (grid.t[w_max], grid.t[-1])
        avg_fn = steklov_left

    base = field.restrict(t_range=t_window)
    du = base.gradient_x()
    X, T = np.meshgrid(base.grid.x, base.grid.t, indexing="ij")
    a_vals = np.asarray(coeff.eval(X, T), dtype=float)

    modulars = []
    for h in hs:
        avg = avg_fn(field, h).restrict(t_range=t_window)
        modulars.append(_wh_modular(avg.gradient_x() - du, a_vals, params.p, params.q, base.grid))
    passed = _monotone_to_tol(modulars, tol)
    return SweepReport("steklov_wh", hs, modulars, passed, tol, {"direction": direction, "note": note})


def counterexample_divergence(p, q, small_eps, h, grid_sequence, nt_quad=256):
    """Divergence of the a-weighted Steklov energy for the singular product field.

    The field |x|^{1-1/p+eps} max(t,0) with coefficient max(-t,0): the
    leading-window average smears mass into t < 0 where the coefficient is
    positive, and the a-weighted q-integrand carries the non-integrable
    x-power -q/p + eps.  Midpoint quadrature offset half a cell from x = 0
    reproduces the divergence rate q/p - eps - 1 in the cell count, while
    the unweighted p-integral of |Du| stays bounded.
    """
    if not 1.0 <= p < q:
        raise ValueError(f"require 1 <= p < q, got p={p}, q={q}")
    if not q / p - small_eps > 1.0:
        raise ValueError(
            f"q/p - eps = {q / p - small_eps} <= 1: the weighted integral converges, no divergence expected"
        )
    if h <= 0 or h >= 1:
        raise ValueError("need 0 < h < 1")
    ns = [int(n) for n in grid_sequence]
    if any(n < 2 for n in ns) or not ns:
        raise ValueError("grid_sequence must hold integers >= 2")

    c_u = 1.0 - 1.0 / p + small_eps

    # time quadrature on (-h, -h/2): a = -t, averaged gradient factor (t+h)^2/(2h)
    tq = -h + (np.arange(nt_quad) + 0.5) * (h / 2.0) / nt_quad
    wt = (h / 2.0) / nt_quad
    time_factor_q = float(np.sum((-tq) * ((tq + h) ** 2 / (2.0 * h)) ** q) * wt) * c_u**q
    # time quadrature of max(t,0)^p over (-1, 1)
    tp = -1.0 + (np.arange(2 * nt_quad) + 0.5) * (2.0 / (2 * nt_quad))
    time_factor_p = float(np.sum(np.maximum(tp, 0.0) ** p) * (2.0 / (2 * nt_quad))) * c_u**p

    I_vals, J_vals = [], []
    for n in ns:
        xm = (np.arange(n) + 0.5) / n
        I_vals.append(float(np.sum(xm ** (-q / p + small_eps)) / n) * time_factor_q)
        J_vals.append(float(np.sum(xm ** (-1.0 + p * small_eps)) / n) * time_factor_p)

    logs_n, logs_I = np.log(ns), np.log(I_vals)
    slope = float(np.polyfit(logs_n, logs_I, 1)[0])
    slope_ref = q / p - small_eps - 1.0
    rel_changes = [abs(b - a) / abs(b) for a, b in zip(J_vals, J_vals[1:])]
    return {
        "n": ns,
        "I": I_vals,
        "slope": slope,
        "slope_ref": slope_ref,
        "J": J_vals,
        "J_rel_changes": rel_changes,
    }


def _bump_kernel(delta, hx):
    """Compactly supported bump exp(-1/(1-r^2)) on the grid, unit discrete mass."""
    k_max = int(math.floor(delta / hx - 1e-12))
    offs = np.arange(-k_max, k_max + 1)
    r = offs * hx / delta
    w = np.exp(-1.0 / (1.0 - r**2))
    return offs, w / w.sum()


def mollify_space(field: GridField, delta: float, require_support=True, support_tol=1e-14) -> GridField:
    """Convolution in x with a compact bump of radius delta (zero extension outside).

    With require_support, delta must stay below the distance from the field's
    support to the lateral boundary so the mollified field remains compactly
    supported inside the cylinder.
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")
    grid = field.grid
    if require_support:
        live = np.any(np.abs(field.values) > support_tol, axis=1)
        if not np.any(live):
            dist = grid.x[-1] - grid.x[0]
        else:
            i_lo, i_hi = np.argmax(live), len(live) - 1 - np.argmax(live[::-1])
            dist = min(grid.x[i_lo] - grid.x[0], grid.x[-1] - grid.x[i_hi])
        if delta >= dist:
            raise ValueError(
                f"delta = {delta} reaches the lateral boundary (support distance {dist:.3g})"
            )
    if delta <= grid.hx:
        return GridField(grid, field.values.copy())
    offs, w = _bump_kernel(delta, grid.hx)
    out = np.zeros_like(field.values)
    nx = grid.nx
    for k, wk in zip(offs, w):
        lo_src, hi_src = max(0, -k), min(nx, nx - k)
        out[lo_src + k : hi_src + k] += wk * field.values[lo_src:hi_src]
    return GridField(grid, out)


def mollify_modular_sweep(field, coeff, params, delta_sequence, tol=1e-6):
    """Weighted-modular convergence of the mollified gradients along a delta-sweep."""
    deltas = sorted(float(d) for d in delta_sequence)[::-1]
    grid = field.grid
    du = field.gradient_x()
    X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
    a_vals = np.asarray(coeff.eval(X, T), dtype=float)
    modulars = []
    for d in deltas:
        md = mollify_space(field, d, require_support=False)
        modulars.append(_wh_modular(md.gradient_x() - du, a_vals, params.p, params.q, grid))
    passed = _monotone_to_tol(modulars, tol)
    return SweepReport("mollify_wh", deltas, modulars, passed, tol)


def delta_eps(coeff, eps, q, ell, osc_u):
    """Time-penalty weight (omega_a^{-1}(eps^{q(ell-1)}))^2 / (2 osc u)."""
    if eps <= 0 or osc_u <= 0:
        raise ValueError("need eps > 0 and osc_u > 0")
    target = eps ** (q * (ell - 1.0))
    s = coeff.omega_inverse(target)
    return s * s / (2.0 * osc_u)


@dataclass(frozen=True)
class InfConvParams:
    """Inf-convolution parameters; r_eps is derived from eps, ell, delta_eps, osc_u."""

    eps: float
    ell: float
    delta_eps: float
    osc_u: float
    p: Optional[float] = None

    def __post_init__(self):
        if self.eps <= 0 or self.delta_eps <= 0 or self.osc_u < 0:
            raise ValueError("need eps > 0, delta_eps > 0, osc_u >= 0")
        min_ell = 3.0 if self.p is None else max(3.0, self.p / (self.p - 1.0))
        if not self.ell > min_ell:
            raise ValueError(f"need ell > max(3, p/(p-1)) = {min_ell}, got {self.ell}")

    @property
    def r_eps(self) -> float:
        return max(
            (self.ell * self.eps ** (self.ell - 1.0) * self.osc_u) ** (1.0 / self.ell),
            (2.0 * self.delta_eps * self.osc_u) ** 0.5,
        )

    @property
    def semiconcavity_C(self) -> float:
        return (self.ell - 1.0) * self.r_eps ** (self.ell - 2.0) / self.eps ** (self.ell - 1.0)


@dataclass
class InfConvResult:
    """Value field of the inf-convolution plus its argmin map."""

    field: GridField
    icp: InfConvParams
    x_arg: np.ndarray  # argmin x-coordinates per grid point
    t_arg: np.ndarray
    i_arg: np.ndarray  # integer index maps
    n_arg: np.ndarray

    def inner_mask(self) -> np.ndarray:
        """Grid points whose r(eps)-neighbourhood stays inside the cylinder."""
        g = self.field.grid
        r = self.icp.r_eps
        mx = (g.x - g.x[0] >= r - 1e-12) & (g.x[-1] - g.x >= r - 1e-12)
        mt = (g.t - g.t[0] >= r - 1e-12) & (g.t[-1] - g.t >= r - 1e-12)
        return mx[:, None] & mt[None, :]

    def argmin_distances(self):
        g = self.field.grid
        return np.abs(g.x[:, None] - self.x_arg), np.abs(g.t[None, :] - self.t_arg)

    def semiconcavity_margin(self):
        """Largest second difference of u_eps - C|x|^2 - t^2/delta along grid lines (inner region)."""
        g = self.field.grid
        C = self.icp.semiconcavity_C
        w = self.field.values - C * g.x[:, None] ** 2 - (g.t[None, :] ** 2) / self.icp.delta_eps
        inner = self.inner_mask()
        worst = -np.inf
        d2x = w[2:, :] - 2.0 * w[1:-1, :] + w[:-2, :]
        okx = inner[2:, :] & inner[1:-1, :] & inner[:-2, :]
        if np.any(okx):
            worst = max(worst, float(np.max(d2x[okx])))
        d2t = w[:, 2:] - 2.0 * w[:, 1:-1] + w[:, :-2]
        okt = inner[:, 2:] & inner[:, 1:-1] & inner[:, :-2]
        if np.any(okt):
            worst = max(worst, float(np.max(d2t[okt])))
        return worst

    def derivative_identity_errors(self):
        """Centered differences of u_eps vs the argmin formulas, on stencils with a stable argmin.

        Where the minimizer index is constant across the stencil, u_eps is
        locally the smooth penalty function, so dt u_eps = (t - t_eps)/delta
        and Dx u_eps = (x - x_eps)|x - x_eps|^{ell-2}/eps^{ell-1} hold up to
        O(h^2) of the centered differences.
        """
        g = self.field.grid
        u = self.field.values
        inner = self.inner_mask()
        icp = self.icp

        stable_x = (
            (self.i_arg[2:, :] == self.i_arg[1:-1, :])
            & (self.i_arg[:-2, :] == self.i_arg[1:-1, :])
            & (self.n_arg[2:, :] == self.n_arg[1:-1, :])
            & (self.n_arg[:-2, :] == self.n_arg[1:-1, :])
            & inner[2:, :]
            & inner[:-2, :]
        )
        dx_num = (u[2:, :] - u[:-2, :]) / (2.0 * g.hx)
        sep = g.x[1:-1, None] - self.x_arg[1:-1, :]
        dx_ref = sep * np.abs(sep) ** (icp.ell - 2.0) / icp.eps ** (icp.ell - 1.0)
        err_x = float(np.max(np.abs(dx_num - dx_ref)[stable_x])) if np.any(stable_x) else 0.0

        stable_t = (
            (self.n_arg[:, 2:] == self.n_arg[:, 1:-1])
            & (self.n_arg[:, :-2] == self.n_arg[:, 1:-1])
            & (self.i_arg[:, 2:] == self.i_arg[:, 1:-1])
            & (self.i_arg[:, :-2] == self.i_arg[:, 1:-1])
            & inner[:, 2:]
            & inner[:, :-2]
        )
        dt_num = (u[:, 2:] - u[:, :-2]) / (2.0 * g.ht)
        dt_ref = (g.t[None, 1:-1] - self.t_arg[:, 1:-1]) / icp.delta_eps
        err_t = float(np.max(np.abs(dt_num - dt_ref)[stable_t])) if np.any(stable_t) else 0.0
        return err_x, err_t


def inf_convolution(field: GridField, icp: InfConvParams, cutoff: Optional[float] = None) -> InfConvResult:
    """Brute-force inf-convolution over every grid point.

    u_eps(x,t) = min over (y,s) of u(y,s) + |x-y|^ell/(ell eps^{ell-1})
    + |t-s|^2/(2 delta_eps).  ``cutoff`` optionally prunes candidates beyond
    that distance in x and t (results must not change for cutoff >= 2 r_eps;
    asserted in the tests, not here).
    """
    g = field.grid
    wx = np.abs(g.x[:, None] - g.x[None, :]) ** icp.ell / (icp.ell * icp.eps ** (icp.ell - 1.0))
    wt = (g.t[:, None] - g.t[None, :]) ** 2 / (2.0 * icp.delta_eps)
    if cutoff is not None:
        wx = np.where(np.abs(g.x[:, None] - g.x[None, :]) > cutoff, np.inf, wx)
        wt = np.where(np.abs(g.t[:, None] - g.t[None, :]) > cutoff, np.inf, wt)
    vals, arg_j, arg_n = _kernels.infconv_bruteforce(field.values, wx, wt)
    return InfConvResult(
        field=GridField(g, vals),
        icp=icp,
        x_arg=g.x[arg_j],
        t_arg=g.t[arg_n],
        i_arg=arg_j,
        n_arg=arg_n,
    )
