"""Implicit finite-difference solver for the double-phase equation on 1D cylinders.

Backward Euler in time, centered flux differencing in space, with the
delta-regularized flux evaluated at cell faces.  Each step solves the
nonlinear system

    (u_next - u_now)/h_t = div_h A_delta(z, Du_next) + f(z, Du_next)

by damped Newton on a tridiagonal Jacobian, with a lagged-diffusivity
fixed-point fallback.  The scheme is in divergence form: with f = 0 and
reflecting boundaries the discrete mass sum(u) h_x is conserved to solver
tolerance.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from .flux import flux_A_1d, flux_regularized_1d, flux_regularized_deriv, rhs_growth_bound
from .grid import Grid, GridField, trapezoid_weights

INNER_TOL = 1e-10
MAX_NEWTON = 60
MAX_HALVINGS = 30
MAX_PICARD = 500


class SolverError(RuntimeError):
    """Nonlinear iteration failed; carries the last residual norm."""

    def __init__(self, message, residual_norm):
        super().__init__(f"{message} (last residual norm {residual_norm:.3e})")
        self.residual_norm = residual_norm


@dataclass
class BoundaryData:
    """Parabolic boundary data: initial slice plus lateral values or reflection.

    kind="dirichlet" uses left/right trace functions of t; kind="reflecting"
    imposes zero flux on both lateral faces.
    """

    initial: Callable[[np.ndarray], np.ndarray]
    kind: str = "dirichlet"
    left: Callable[[float], float] = lambda t: 0.0
    right: Callable[[float], float] = lambda t: 0.0

    def __post_init__(self):
        if self.kind not in ("dirichlet", "reflecting"):
            raise ValueError("bc kind must be 'dirichlet' or 'reflecting'")


@dataclass
class Problem:
    """A double-phase initial/boundary value problem on (x_lo,x_hi) x (t_lo,t_hi].

    ``rhs`` is f(x, t, xi) (None means 0) and must respect the growth bound
    C_f (1 + |xi|^beta1 + a |xi|^beta2); this is spot-checked on a sample at
    construction.  ``reg_delta`` defaults to 1e-8 for p >= 2 and 1e-6 in the
    singular range, where smaller values degrade Newton conditioning.
    h_t <= h_x is required so the discrete-jet diagnostics stay meaningful.
    """

    params: object
    coeff: object
    domain: tuple
    bc: BoundaryData
    nx: int
    nt: int
    rhs: Optional[Callable] = None
    reg_delta: Optional[float] = None
    _validate_rhs: bool = True

    def __post_init__(self):
        if self.reg_delta is None:
            self.reg_delta = 1e-8 if self.params.p >= 2.0 else 1e-6
        if self.reg_delta <= 0:
            raise ValueError("reg_delta must be > 0")
        if self.nx < 2 or self.nt < 1:
            raise ValueError("need nx >= 2 space cells and nt >= 1 time steps")
        x_lo, x_hi, t_lo, t_hi = self.domain
        if not (x_hi > x_lo and t_hi > t_lo):
            raise ValueError("domain must have positive extent")
        if self.ht > self.hx + 1e-12:
            raise ValueError(f"h_t = {self.ht:.3g} must not exceed h_x = {self.hx:.3g}")
        if self.rhs is not None and self._validate_rhs:
            self._check_growth()

    @property
    def hx(self) -> float:
        x_lo, x_hi, _, _ = self.domain
        return (x_hi - x_lo) / self.nx

    @property
    def ht(self) -> float:
        _, _, t_lo, t_hi = self.domain
        return (t_hi - t_lo) / self.nt

    def make_grid(self) -> Grid:
        x_lo, x_hi, t_lo, t_hi = self.domain
        return Grid.regular(x_lo, x_hi, t_lo, t_hi, self.nx, self.nt)

    def f_eval(self, x, t, xi):
        if self.rhs is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return np.asarray(self.rhs(x, t, xi), dtype=float)

    def _check_growth(self):
        x_lo, x_hi, t_lo, t_hi = self.domain
        xs = np.linspace(x_lo, x_hi, 7)
        for xi in (0.0, 0.5, -1.0, 2.0, -5.0):
            for t in np.linspace(t_lo, t_hi, 5):
                a = self.coeff.eval(xs, t)
                fv = np.abs(self.f_eval(xs, t, xi + 0.0 * xs))
                bound = rhs_growth_bound(self.params, a, xi) + 1e-9
                if np.any(fv > bound):
                    raise ValueError(
                        "rhs violates the growth bound C_f(1+|xi|^b1+a|xi|^b2) "
                        f"at xi={xi}: max |f| = {fv.max():.3g} > {np.max(bound):.3g}"
                    )


def _f_prime(problem, x, t, xi, rel=1e-6):
    h = rel * (1.0 + np.abs(xi))
    return (problem.f_eval(x, t, xi + h) - problem.f_eval(x, t, xi - h)) / (2.0 * h)


def _residual_and_bands(problem, u, u_now, x, t_next, a_face, want_bands=True):
    """Delta-form residual on unknown nodes; optionally the tridiagonal bands.

    Node j couples to faces j-1/2 and j+1/2 (face array index j-1 and j).
    Returns (R, sub, diag, super, unknown_idx): off-diagonals in matrix form.
    """
    p = problem
    hx, ht = p.hx, p.ht
    N = x.size
    xi_face = np.diff(u) / hx
    F = flux_regularized_1d(p.params, a_face, xi_face, p.reg_delta)

    if p.bc.kind == "dirichlet":
        idx = np.arange(1, N - 1)
        div = (F[1:] - F[:-1]) / hx
        Du = (u[2:] - u[:-2]) / (2.0 * hx)
        fv = p.f_eval(x[idx], t_next, Du)
        R = u[idx] - u_now[idx] - ht * (div + fv)
        if not want_bands:
            return R, None, None, None, idx
        D = flux_regularized_deriv(p.params, a_face, xi_face, p.reg_delta)
        diag = 1.0 + ht / hx**2 * (D[1:] + D[:-1])
        upper_j = -ht / hx**2 * D[1:]
        lower_j = -ht / hx**2 * D[:-1]
        if p.rhs is not None:
            fp = _f_prime(p, x[idx], t_next, Du)
            upper_j = upper_j - ht * fp / (2.0 * hx)
            lower_j = lower_j + ht * fp / (2.0 * hx)
        return R, lower_j[1:], diag, upper_j[:-1], idx

    # reflecting: all nodes unknown, zero flux through the end faces
    idx = np.arange(N)
    Fext = np.concatenate(([0.0], F, [0.0]))
    div = (Fext[1:] - Fext[:-1]) / hx
    Du = np.zeros_like(u)
    Du[1:-1] = (u[2:] - u[:-2]) / (2.0 * hx)
    fv = p.f_eval(x, t_next, Du)
    R = u - u_now - ht * (div + fv)
    if not want_bands:
        return R, None, None, None, idx
    D = flux_regularized_deriv(p.params, a_face, xi_face, p.reg_delta)
    Dext = np.concatenate(([0.0], D, [0.0]))
    diag = 1.0 + ht / hx**2 * (Dext[1:] + Dext[:-1])
    upper_j = -ht / hx**2 * D.copy()  # coupling of R_j to u_{j+1}, j = 0..N-2
    lower_j = -ht / hx**2 * D.copy()  # coupling of R_j to u_{j-1}, j = 1..N-1
    if p.rhs is not None:
        fp = _f_prime(p, x[1:-1], t_next, Du[1:-1])
        upper_j[1:] = upper_j[1:] - ht * fp / (2.0 * hx)
        lower_j[:-1] = lower_j[:-1] + ht * fp / (2.0 * hx)
    return R, lower_j, diag, upper_j, idx


def _solve_tridiag(sub, diag, sup, rhs):
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = sup
    ab[1, :] = diag
    ab[2, :-1] = sub
    return solve_banded((1, 1), ab, rhs)


def step_implicit(problem, u_now, t_next):
    """One backward-Euler step: returns the spatial slice at t_next.

    Damped Newton (step halving up to 30 times) with a lagged-diffusivity
    Picard fallback; raises SolverError with the last residual norm on failure.
    """
    p = problem
    x = np.linspace(p.domain[0], p.domain[1], p.nx + 1)
    x_face = 0.5 * (x[:-1] + x[1:])
    a_face = np.asarray(p.coeff.eval(x_face, t_next), dtype=float)
    if np.any(a_face < 0):
        raise ValueError("coefficient must be >= 0")

    u = np.asarray(u_now, dtype=float).copy()
    u_now = u.copy()
    if p.bc.kind == "dirichlet":
        u[0] = p.bc.left(t_next)
        u[-1] = p.bc.right(t_next)

    def norm_of(v):
        R, *_ = _residual_and_bands(p, v, u_now, x, t_next, a_face, want_bands=False)
        return float(np.max(np.abs(R)))

    nrm = None
    for _ in range(MAX_NEWTON):
        R, sub, diag, sup, idx = _residual_and_bands(p, u, u_now, x, t_next, a_face)
        nrm = float(np.max(np.abs(R)))
        if nrm <= INNER_TOL:
            return u
        du = _solve_tridiag(sub, diag, sup, -R)
        s, accepted = 1.0, False
        for _ in range(MAX_HALVINGS):
            u_try = u.copy()
            u_try[idx] += s * du
            if norm_of(u_try) < nrm:
                u, accepted = u_try, True
                break
            s *= 0.5
        if not accepted:
            break

    nrm = norm_of(u)
    if nrm <= INNER_TOL:
        return u
    for _ in range(MAX_PICARD):
        u = _picard_step(p, u, u_now, x, t_next, a_face)
        nrm = norm_of(u)
        if nrm <= INNER_TOL:
            return u
    raise SolverError("implicit step did not converge", nrm)


def _picard_step(problem, u_prev, u_now, x, t_next, a_face):
    """Lagged diffusivity: freeze D(xi) = (delta+xi^2)^{(p-2)/2} + a (.)^{(q-2)/2}."""
    p = problem
    hx, ht = p.hx, p.ht
    xi_face = np.diff(u_prev) / hx
    r2 = p.reg_delta + xi_face**2
    Dlin = r2 ** ((p.params.p - 2.0) / 2.0) + a_face * r2 ** ((p.params.q - 2.0) / 2.0)

    if p.bc.kind == "dirichlet":
        Du = (u_prev[2:] - u_prev[:-2]) / (2.0 * hx)
        fv = p.f_eval(x[1:-1], t_next, Du)
        diag = 1.0 + ht / hx**2 * (Dlin[1:] + Dlin[:-1])
        sup = -ht / hx**2 * Dlin[1:-1]
        sub = -ht / hx**2 * Dlin[1:-1]
        b = u_now[1:-1] + ht * fv
        b[0] += ht / hx**2 * Dlin[0] * u_prev[0]
        b[-1] += ht / hx**2 * Dlin[-1] * u_prev[-1]
        sol = _solve_tridiag(sub, diag, sup, b)
        out = u_prev.copy()
        out[1:-1] = 0.5 * (u_prev[1:-1] + sol)
        return out

    Du = np.zeros_like(u_prev)
    Du[1:-1] = (u_prev[2:] - u_prev[:-2]) / (2.0 * hx)
    fv = p.f_eval(x, t_next, Du)
    Dext = np.concatenate(([0.0], Dlin, [0.0]))
    diag = 1.0 + ht / hx**2 * (Dext[1:] + Dext[:-1])
    sup = -ht / hx**2 * Dlin
    sub = -ht / hx**2 * Dlin
    sol = _solve_tridiag(sub, diag, sup, u_now + ht * fv)
    return 0.5 * (u_prev + sol)


def solve(problem) -> GridField:
    """March the implicit scheme over the time grid; boundary data imposed each step."""
    p = problem
    grid = p.make_grid()
    vals = np.empty((grid.nx, grid.nt))
    u = np.asarray(p.bc.initial(grid.x), dtype=float).copy()
    if p.bc.kind == "dirichlet":
        u[0] = p.bc.left(float(grid.t[0]))
        u[-1] = p.bc.right(float(grid.t[0]))
    vals[:, 0] = u
    for m in range(1, grid.nt):
        u = step_implicit(p, u, float(grid.t[m]))
        vals[:, m] = u
    return GridField(grid, vals)


@dataclass
class TestFunction:
    """Smooth weak-form test function phi with analytic spatial derivative."""

    __test__ = False  # weak-form object, not a pytest class

    value: Callable
    dx: Callable


def residual_weak(u: GridField, problem, phi: TestFunction) -> float:
    """Discrete weak-form residual int -u dphi/dt + A(z,Du).Dphi - phi f(z,Du) dz.

    Midpoint rule in time, with difference quotients for dphi/dt so that
    constant fields pair to exactly zero, and trapezoid in space.  phi must
    vanish on the parabolic boundary and at the final time.
    """
    grid = u.grid
    x, t = grid.x, grid.t
    for tt in (t[0], t[-1]):
        if np.max(np.abs(np.asarray(phi.value(x, tt)))) > 1e-12:
            raise ValueError("phi must vanish at the initial and final times")
    lat = max(float(np.max(np.abs([phi.value(np.array([x[0]]), tt), phi.value(np.array([x[-1]]), tt)]))) for tt in t)
    if lat > 1e-12:
        raise ValueError("phi must vanish on the lateral boundary")

    wx = trapezoid_weights(x)
    grad = u.gradient_x()
    total = 0.0
    for m in range(grid.nt - 1):
        t_mid = 0.5 * (t[m] + t[m + 1])
        dphi_dt = (np.asarray(phi.value(x, t[m + 1]), float) - np.asarray(phi.value(x, t[m]), float)) / grid.ht
        u_mid = 0.5 * (u.values[:, m] + u.values[:, m + 1])
        Du_mid = 0.5 * (grad[:, m] + grad[:, m + 1])
        a_mid = np.asarray(problem.coeff.eval(x, t_mid), dtype=float)
        integrand = (
            -u_mid * dphi_dt
            + flux_A_1d(problem.params, a_mid, Du_mid) * np.asarray(phi.dx(x, t_mid), float)
            - np.asarray(phi.value(x, t_mid), float) * problem.f_eval(x, t_mid, Du_mid)
        )
        total += grid.ht * float(wx @ integrand)
    return total


def make_sub_super_pair(problem, eps):
    """Strict sub/supersolution pair via rhs margins and time-decay perturbations.

    Solves with the rhs shifted to f -/+ eps/(4 T^2), then subtracts/adds
    eps/(T - tau/2), where tau is elapsed time and T the window length; the
    pair brackets the base solution and separates by 2 eps/(T - tau/2) >= 2 eps/T.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    _, _, t_lo, t_hi = problem.domain
    T = t_hi - t_lo
    margin = eps / (4.0 * T**2)

    def shifted(sign):
        base = problem.rhs
        if base is None:
            rhs = lambda x, t, xi, s=sign: s * margin + 0.0 * np.asarray(x, dtype=float)
        else:
            rhs = lambda x, t, xi, s=sign: np.asarray(base(x, t, xi), dtype=float) + s * margin
        params = replace(problem.params, C_f=problem.params.C_f + margin)
        return replace(problem, params=params, rhs=rhs, _validate_rhs=False)

    lo = solve(shifted(-1.0))
    hi = solve(shifted(+1.0))
    tau = lo.grid.t - t_lo
    pert = eps / (T - tau / 2.0)
    sub = GridField(lo.grid, lo.values - pert[None, :])
    super_ = GridField(hi.grid, hi.values + pert[None, :])
    return sub, super_
