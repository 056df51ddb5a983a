import numpy as np
import pytest

from dplab import (
    ExponentParams,
    InfConvParams,
    builtin,
    counterexample_divergence,
    delta_eps,
    inf_convolution,
    mollify_modular_sweep,
    mollify_space,
    steklov_left,
    steklov_right,
    steklov_wh_convergence,
)
from dplab.grid import Grid, GridField, integrate_xt

P23 = ExponentParams(2, 3, borderline_ok=True)
CONST1 = builtin("constant", c=1.0)


# ----------------------------------------------------------------- Steklov


def test_steklov_constant():
    g = Grid.regular(0, 1, 0, 2, 6, 40)
    f = GridField.from_function(g, lambda X, T: 0 * X + 4.0)
    assert np.allclose(steklov_left(f, 0.2).values, 4.0)
    assert np.allclose(steklov_right(f, 0.2).values, 4.0)


def test_steklov_linear_in_time():
    g = Grid.regular(0, 1, 0, 2, 6, 40)
    f = GridField.from_function(g, lambda X, T: T)
    left = steklov_left(f, 0.2)
    right = steklov_right(f, 0.2)
    assert np.allclose(left.values, left.grid.t[None, :] - 0.1, atol=1e-13)
    assert np.allclose(right.values, right.grid.t[None, :] + 0.1, atol=1e-13)


def test_steklov_quadratic_oracle():
    # closed-form oracle: (1/0.2) int_{0.8}^{1} s^2 ds = (1 - 0.512)/0.6 = 0.81333...
    g = Grid.regular(0, 1, 0, 2, 4, 40)
    f = GridField.from_function(g, lambda X, T: T**2)
    left = steklov_left(f, 0.2)
    i = int(np.argmin(np.abs(left.grid.t - 1.0)))
    exact = (1.0**3 - 0.8**3) / 3.0 / 0.2
    # composite trapezoid error for f = s^2 over the window: h_t^2/6
    assert abs(left.values[0, i] - exact) <= g.ht**2 / 6 + 1e-14


def test_steklov_window_errors():
    g = Grid.regular(0, 1, 0, 1, 4, 10)
    f = GridField.from_function(g, lambda X, T: T)
    with pytest.raises(ValueError):
        steklov_left(f, 0.05 * 1.3)  # not a multiple of h_t
    with pytest.raises(ValueError):
        steklov_left(f, 2.0)  # wider than the time extent


def test_steklov_commutes_with_space_differencing():
    g = Grid.regular(0, 1, 0, 1, 24, 60)
    f = GridField.from_function(g, lambda X, T: np.sin(3 * X) * np.cos(T) + X * T)
    a = steklov_left(f, 0.1).gradient_x()
    b = steklov_left(GridField(g, f.gradient_x()), 0.1).values
    assert np.max(np.abs(a - b)) <= 1e-13


def test_steklov_wh_convergence_smooth_rate():
    g = Grid.regular(0, 1, 0, 1, 32, 2000)
    f = GridField.from_function(g, lambda X, T: np.sin(np.pi * X) * (1 + 0.5 * T**2))
    hs = [k * g.ht for k in (8, 16, 32, 64)]
    rep = steklov_wh_convergence(f, CONST1, P23, hs, tol=1e-4)
    assert rep.passed
    rate = np.polyfit(np.log(rep.values), np.log(rep.modulars), 1)[0]
    assert rate >= 1.8  # p = 2 term dominates: O(h^2)


def test_steklov_wh_constant_in_time_is_zero():
    g = Grid.regular(0, 1, 0, 1, 16, 400)
    f = GridField.from_function(g, lambda X, T: np.cos(X))
    rep = steklov_wh_convergence(f, CONST1, P23, [k * g.ht for k in (4, 8)], tol=1e-6)
    assert max(rep.modulars) <= 1e-18


def _counterexample_field(n, p, eps, grid_t):
    gx = np.linspace(0.0, 1.0, n + 1)
    g = Grid(gx, grid_t)
    return GridField.from_function(g, lambda X, T: np.abs(X) ** (1 - 1 / p + eps) * np.maximum(T, 0.0))


def _weighted_energy(avg, coeff, q):
    du = avg.gradient_x()
    X, T = np.meshgrid(avg.grid.x, avg.grid.t, indexing="ij")
    return integrate_xt(avg.grid, coeff.eval(X, T) * np.abs(du) ** q)


def test_right_average_weighted_energy_grows_under_refinement():
    # the counter-example pair: the a-weighted energy of the leading-window
    # average grows like n^{1 + q(eps - 1/p)} as the space grid refines (fixed h),
    # while the trailing average has a weighted energy of exactly zero
    p, q, eps, h = 1.5, 2.5, 0.1, 0.25
    coeff = builtin("neg_time_ramp")
    ns = (32, 128, 512)
    vals = []
    for n in ns:
        grid_t = np.linspace(-1.0, 1.0, 65)
        f = _counterexample_field(n, p, eps, grid_t)
        vals.append(_weighted_energy(steklov_right(f, h), coeff, q))
        assert _weighted_energy(steklov_left(f, h), coeff, q) == 0.0
    assert vals[0] < vals[1] < vals[2]
    slope = np.polyfit(np.log(ns), np.log(vals), 1)[0]
    assert slope == pytest.approx(q / p - q * eps - 1.0, abs=0.15)


def test_steklov_wh_flags_wrong_direction():
    # with the coefficient decreasing in time, the leading average is the
    # wrong mollifier for the singular field: the sweep does not settle below
    # tol, while direction=auto picks the trailing average
    p, q, eps = 1.5, 2.5, 0.1
    params = ExponentParams(p, q, borderline_ok=True)
    coeff = builtin("neg_time_ramp")
    grid_t = np.linspace(-1.0, 1.0, 257)
    f = _counterexample_field(512, p, eps, grid_t)
    ht = grid_t[1] - grid_t[0]
    hs = [k * ht for k in (8, 16, 32)]
    wrong = steklov_wh_convergence(f, coeff, params, hs, direction="right", tol=1e-8)
    good = steklov_wh_convergence(f, coeff, params, hs, direction="auto", tol=1e-8)
    assert not wrong.passed
    assert good.details["direction"] == "left"


# ---------------------------------------------------------- counterexample


def test_counterexample_acceptance_values():
    rep = counterexample_divergence(1.5, 2.5, 0.1, 0.1, [2**k for k in range(10, 15)])
    ref = 2.5 / 1.5 - 0.1 - 1.0
    assert rep["slope_ref"] == pytest.approx(ref)
    assert abs(rep["slope"] - ref) <= 0.10 * ref
    assert rep["J_rel_changes"][-1] < 0.05


def test_counterexample_preconditions():
    with pytest.raises(ValueError):
        counterexample_divergence(2.0, 2.0, 0.1, 0.1, [64])  # needs p < q
    with pytest.raises(ValueError):
        counterexample_divergence(2.0, 2.1, 0.2, 0.1, [64])  # q/p - eps <= 1


# ------------------------------------------------------------------ mollify


def test_mollify_constant_interior():
    g = Grid.regular(-1, 1, 0, 1, 64, 8)
    f = GridField.from_function(g, lambda X, T: 0 * X + 2.5)
    out = mollify_space(f, 0.3, require_support=False)
    inner = slice(12, -12)  # more than delta away from the ends
    assert np.max(np.abs(out.values[inner] - 2.5)) <= 1e-13


def test_mollify_hat_value_convergence_rate():
    g = Grid.regular(-1, 1, 0, 1, 512, 4)
    hat = GridField.from_function(g, lambda X, T: np.maximum(0.4 - np.abs(X), 0.0))
    deltas = [0.2, 0.1, 0.05, 0.025]
    dists = []
    for d in deltas:
        md = mollify_space(hat, d)
        diff = np.abs(md.values - hat.values) ** 2
        dists.append(integrate_xt(g, diff) ** 0.5)
    rate = np.polyfit(np.log(deltas), np.log(dists), 1)[0]
    assert rate >= 1.0


def test_mollify_modular_sweep_converges():
    g = Grid.regular(-1, 1, 0, 1, 128, 8)
    hat = GridField.from_function(g, lambda X, T: np.maximum(0.4 - np.abs(X), 0.0))
    rep = mollify_modular_sweep(hat, CONST1, P23, [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125], tol=1e-6)
    assert rep.passed
    assert rep.modulars[0] > rep.modulars[-2] > 0.0


def test_mollify_support_guard():
    g = Grid.regular(-1, 1, 0, 1, 64, 4)
    hat = GridField.from_function(g, lambda X, T: np.maximum(0.4 - np.abs(X), 0.0))
    with pytest.raises(ValueError):
        mollify_space(hat, 0.7)  # support distance to the boundary is 0.6
    mollify_space(hat, 0.5)


# ----------------------------------------------------------------- delta_eps


def test_delta_eps_examples():
    identity = builtin("neg_time_ramp")  # omega(s) = s
    assert delta_eps(identity, 0.1, 2.0, 4.0, 1.0) == pytest.approx((0.1**6) ** 2 / 2, rel=1e-6)
    double = builtin("line_ramp")  # omega(s) = s as well; scale one manually
    two = builtin("neg_time_ramp")
    two.omega_time = lambda s: 2.0 * s
    assert delta_eps(two, 0.1, 2.0, 4.0, 1.0) == pytest.approx((0.1**6 / 2) ** 2 / 2, rel=1e-6)
    bounded = builtin("neg_time_ramp")
    bounded.omega_time = lambda s: min(s, 0.5)
    bounded.omega_smax = 10.0
    with pytest.raises(ValueError):
        delta_eps(bounded, 0.6 ** (1 / 6.0), 2.0, 4.0, 1.0)  # target 0.6 above range


# ------------------------------------------------------------------- infconv


def test_infconv_params_validation():
    with pytest.raises(ValueError):
        InfConvParams(eps=0.1, ell=2.5, delta_eps=1e-3, osc_u=1.0)  # ell <= 3
    with pytest.raises(ValueError):
        InfConvParams(eps=0.1, ell=3.5, delta_eps=1e-3, osc_u=1.0, p=1.2)  # ell <= p/(p-1) = 6
    icp = InfConvParams(eps=0.1, ell=4.0, delta_eps=1e-3, osc_u=2.0)
    want = max((4 * 0.1**3 * 2.0) ** 0.25, (2 * 1e-3 * 2.0) ** 0.5)
    assert icp.r_eps == pytest.approx(want)


def test_infconv_constant_field():
    g = Grid.regular(0, 1, 0, 1, 12, 10)
    f = GridField.from_function(g, lambda X, T: 0 * X + 1.5)
    res = inf_convolution(f, InfConvParams(eps=0.2, ell=4.0, delta_eps=0.01, osc_u=0.0))
    assert np.allclose(res.field.values, 1.5)
    assert np.array_equal(res.i_arg, np.arange(13)[:, None] + 0 * res.i_arg)
    assert np.array_equal(res.n_arg, np.arange(11)[None, :] + 0 * res.n_arg)


def test_infconv_analytic_1d_minimum():
    g = Grid.regular(-1, 1, 0, 1, 96, 6)
    f = GridField.from_function(g, lambda X, T: X + 0 * T)
    eps = 0.3
    res = inf_convolution(f, InfConvParams(eps=eps, ell=4.0, delta_eps=1e-3, osc_u=f.osc()))
    i0 = int(np.argmin(np.abs(g.x)))
    assert abs(res.field.values[i0, 3] - (-3 * eps / 4)) <= 2 * g.hx * 1.0


def _lipschitz_suite(nx=40, nt=32, eps=0.18):
    coeff = builtin("neg_time_ramp")
    g = Grid.regular(-1, 1, -1, 0, nx, nt)
    f = GridField.from_function(g, lambda X, T: 0.8 * np.abs(X) + 0.4 * np.abs(T + 0.5))
    de = delta_eps(coeff, eps, 2.0, 4.0, f.osc())
    icp = InfConvParams(eps=eps, ell=4.0, delta_eps=de, osc_u=f.osc(), p=1.8)
    return f, icp, coeff, inf_convolution(f, icp)


def test_infconv_properties_on_lipschitz_field():
    f, icp, coeff, res = _lipschitz_suite()
    assert np.max(res.field.values - f.values) <= 0.0  # u_eps <= u, exact
    dx_d, dt_d = res.argmin_distances()
    assert np.max(dx_d) <= icp.r_eps + 1e-12
    assert np.max(dt_d) <= icp.r_eps + 1e-12
    assert np.max(dt_d) <= coeff.omega_inverse(icp.eps ** (2.0 * 3.0)) + 1e-12
    assert res.semiconcavity_margin() <= 1e-9


def test_infconv_pointwise_convergence():
    coeff = builtin("neg_time_ramp")
    g = Grid.regular(-1, 1, -1, 0, 40, 32)
    f = GridField.from_function(g, lambda X, T: 0.8 * np.abs(X) + 0.4 * np.abs(T + 0.5))
    sups = []
    for eps in (0.3, 0.2, 0.1, 0.05):
        de = delta_eps(coeff, eps, 2.0, 4.0, f.osc())
        res = inf_convolution(f, InfConvParams(eps=eps, ell=4.0, delta_eps=de, osc_u=f.osc(), p=1.8))
        sups.append(np.max(f.values - res.field.values))
    assert all(b <= a for a, b in zip(sups, sups[1:]))
    assert sups[-1] < 0.25 * sups[0]


def test_infconv_derivative_identities_refine():
    errs = []
    for nx, nt in ((24, 20), (48, 40)):
        _, _, _, res = _lipschitz_suite(nx, nt)
        ex, et = res.derivative_identity_errors()
        errs.append(max(ex, et))
    assert errs[1] <= 0.6 * errs[0] + 1e-12  # O(h) shrink on stable stencils


def test_infconv_radius_cutoff_is_free():
    f, icp, _, res = _lipschitz_suite(32, 24)
    pruned = inf_convolution(f, icp, cutoff=2.0 * icp.r_eps)
    assert np.array_equal(res.field.values, pruned.field.values)
    assert np.array_equal(res.i_arg, pruned.i_arg)
    assert np.array_equal(res.n_arg, pruned.n_arg)


def test_steklov_linearity():
    g = Grid.regular(0, 1, 0, 1, 10, 60)
    u = GridField.from_function(g, lambda X, T: np.sin(X) * T**2)
    v = GridField.from_function(g, lambda X, T: X + np.cos(3 * T))
    lin = GridField(g, 2.0 * u.values - 0.5 * v.values)
    left = steklov_left(lin, 0.1).values
    parts = 2.0 * steklov_left(u, 0.1).values - 0.5 * steklov_left(v, 0.1).values
    assert np.max(np.abs(left - parts)) <= 1e-14
