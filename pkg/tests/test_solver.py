import numpy as np
import pytest

import dplab.solver as solver_mod
from dplab import (
    BoundaryData,
    ExponentParams,
    Problem,
    SolverError,
    TestFunction,
    builtin,
    make_sub_super_pair,
    residual_weak,
    solve,
    step_implicit,
)
from dplab.grid import GridField

from conftest import heat_exact, heat_problem

CONST1 = builtin("constant", c=1.0)


def test_constants_are_solutions():
    params = ExponentParams(1.5, 2.3)
    bc = BoundaryData(initial=lambda x: 0 * x + 3.0, left=lambda t: 3.0, right=lambda t: 3.0)
    prob = Problem(params=params, coeff=CONST1, domain=(0, 1, 0, 0.1), bc=bc, nx=16, nt=32)
    f = solve(prob)
    assert np.max(np.abs(f.values - 3.0)) <= 1e-10


def test_affine_is_stationary():
    # spatially constant flux has zero divergence
    params = ExponentParams(3.0, 3.5)
    bc = BoundaryData(initial=lambda x: 2 * x - 0.5, left=lambda t: -0.5, right=lambda t: 1.5)
    prob = Problem(params=params, coeff=CONST1, domain=(0, 1, 0, 0.1), bc=bc, nx=16, nt=32)
    f = solve(prob)
    assert np.max(np.abs(f.values - (2 * f.grid.x[:, None] - 0.5))) <= 1e-9


def test_single_heat_step_matches_kernel():
    # one backward-Euler step against the decayed sine; refining h_t shrinks
    # the defect at first order (local truncation ~ h_t^2 per step)
    errs = []
    for nt_scale in (1, 2):
        n = 64
        prob = heat_problem(n)
        prob = Problem(params=prob.params, coeff=prob.coeff, domain=(0, 1, 0, 0.1),
                       bc=prob.bc, nx=n, nt=prob.nt * nt_scale)
        u0 = np.sin(np.pi * prob.make_grid().x)
        t1 = prob.domain[2] + prob.ht
        u1 = step_implicit(prob, u0, t1)
        exact = np.exp(-2 * np.pi**2 * t1) * np.sin(np.pi * prob.make_grid().x)
        errs.append(np.max(np.abs(u1 - exact)))
    assert errs[0] > 0 and errs[1] < errs[0]
    assert errs[0] <= 500.0 * (prob.ht * 2) ** 2  # |u_tt| ~ 4 pi^4 scale


def test_heat_solution_error_and_order(heat_field_64):
    field, _ = heat_field_64
    err64 = np.max(np.abs(field.values - heat_exact(field.grid)))
    assert err64 <= 1e-3
    f32 = solve(heat_problem(32))
    err32 = np.max(np.abs(f32.values - heat_exact(f32.grid)))
    order = np.log2(err32 / err64)
    assert order >= 1.8


def test_conservation_with_reflecting_boundaries():
    bc = BoundaryData(initial=lambda x: np.exp(-20 * (x - 0.5) ** 2), kind="reflecting")
    prob = Problem(params=ExponentParams(3, 3.2), coeff=CONST1, domain=(0, 1, 0, 0.05), bc=bc, nx=30, nt=60)
    f = solve(prob)
    mass = f.values.sum(axis=0) * f.grid.hx
    assert np.max(np.abs(np.diff(mass))) <= 1e-8


def test_delta_robustness_singular():
    # solutions for reg_delta and reg_delta/10 stay within the half-order
    # delta^{1/2} envelope on the singular test
    params = ExponentParams(1.5, 1.8)
    bc = BoundaryData(initial=lambda x: np.sin(np.pi * x), left=lambda t: 0.0, right=lambda t: 0.0)
    sols = {}
    for delta in (1e-4, 1e-5, 1e-6):
        prob = Problem(params=params, coeff=CONST1, domain=(0, 1, 0, 0.05), bc=bc,
                       nx=32, nt=64, reg_delta=delta)
        sols[delta] = solve(prob).values
    d1 = np.max(np.abs(sols[1e-4] - sols[1e-5]))
    d2 = np.max(np.abs(sols[1e-5] - sols[1e-6]))
    assert d1 <= 1.0
    assert d2 <= d1 * 10 ** (-0.5) * 1.5  # observed decay at least half order in delta


def test_reg_delta_defaults():
    bc = BoundaryData(initial=lambda x: 0 * x)
    sing = Problem(params=ExponentParams(1.5, 2.0), coeff=CONST1, domain=(0, 1, 0, 0.1), bc=bc, nx=8, nt=16)
    dege = Problem(params=ExponentParams(2.5, 3.0), coeff=CONST1, domain=(0, 1, 0, 0.1), bc=bc, nx=8, nt=16)
    assert sing.reg_delta == pytest.approx(1e-6)
    assert dege.reg_delta == pytest.approx(1e-8)


def test_problem_validation():
    bc = BoundaryData(initial=lambda x: 0 * x)
    with pytest.raises(ValueError):
        Problem(params=ExponentParams(2, 2), coeff=CONST1, domain=(0, 1, 0, 1), bc=bc, nx=8, nt=4)  # ht > hx
    with pytest.raises(ValueError):
        Problem(params=ExponentParams(2, 2, C_f=0.0), coeff=CONST1, domain=(0, 1, 0, 0.1),
                bc=bc, nx=8, nt=16, rhs=lambda x, t, xi: 1.0 + 0 * np.asarray(x))  # violates (G) with C_f = 0
    Problem(params=ExponentParams(2, 2, C_f=2.0), coeff=CONST1, domain=(0, 1, 0, 0.1),
            bc=bc, nx=8, nt=16, rhs=lambda x, t, xi: 1.0 + 0 * np.asarray(x))


def test_solver_error_carries_residual(monkeypatch):
    monkeypatch.setattr(solver_mod, "MAX_NEWTON", 1)
    monkeypatch.setattr(solver_mod, "MAX_HALVINGS", 1)
    monkeypatch.setattr(solver_mod, "MAX_PICARD", 1)
    params = ExponentParams(1.5, 1.9)
    bc = BoundaryData(initial=lambda x: np.sin(np.pi * x), left=lambda t: 0.0, right=lambda t: 0.0)
    prob = Problem(params=params, coeff=CONST1, domain=(0, 1, 0, 0.1), bc=bc, nx=32, nt=64, reg_delta=1e-10)
    with pytest.raises(SolverError) as err:
        solve(prob)
    assert err.value.residual_norm > 0


def _phi(domain=(0.0, 1.0, 0.0, 0.1)):
    x_lo, x_hi, t_lo, t_hi = domain
    sx, st = x_hi - x_lo, t_hi - t_lo
    return TestFunction(
        value=lambda x, t: np.sin(np.pi * (np.asarray(x) - x_lo) / sx)
        * np.sin(np.pi * (np.asarray(t) - t_lo) / st) ** 2,
        dx=lambda x, t: np.pi / sx * np.cos(np.pi * (np.asarray(x) - x_lo) / sx)
        * np.sin(np.pi * (np.asarray(t) - t_lo) / st) ** 2,
    )


def test_residual_weak_constant_exact(heat_field_64):
    _, prob = heat_field_64
    grid = prob.make_grid()
    const = GridField.from_function(grid, lambda X, T: 0 * X + 2.0)
    assert abs(residual_weak(const, prob, _phi())) <= 1e-12


def test_residual_weak_affine_within_quadrature():
    prob = heat_problem(32)
    grid = prob.make_grid()
    aff = GridField.from_function(grid, lambda X, T: 1.0 + 2.0 * X)
    assert abs(residual_weak(aff, prob, _phi())) <= 1e-10


def test_residual_weak_refinement_slope(heat_field_64):
    f64, p64 = heat_field_64
    r64 = abs(residual_weak(f64, p64, _phi()))
    p128 = heat_problem(128)
    f128 = solve(p128)
    r128 = abs(residual_weak(f128, p128, _phi()))
    assert r128 <= r64 / 2.5  # consistent with O(h_x^2 + h_t)


def test_residual_weak_rejects_nonzero_trace():
    prob = heat_problem(16)
    grid = prob.make_grid()
    u = GridField.from_function(grid, lambda X, T: X)
    bad = TestFunction(value=lambda x, t: 1.0 + 0 * np.asarray(x), dx=lambda x, t: 0 * np.asarray(x))
    with pytest.raises(ValueError):
        residual_weak(u, prob, bad)


def test_sub_super_pair_heat_perturbation():
    prob = Problem(params=ExponentParams(2, 2), coeff=CONST1, domain=(0, 1, 0, 1),
                   bc=BoundaryData(initial=lambda x: np.sin(np.pi * x), left=lambda t: 0.0, right=lambda t: 0.0),
                   nx=24, nt=48)
    sub, sup = make_sub_super_pair(prob, eps=0.1)
    gap = sup.values - sub.values
    tau = sub.grid.t
    pert = 0.2 / (1.0 - tau / 2.0)
    # the 2 eps/(T - tau/2) separation dominates; the +-delta solves differ by O(delta T)
    assert gap[:, 0].min() == pytest.approx(0.2, rel=0.05)
    assert abs(gap[:, -1].max() - 0.4) <= 0.05
    assert np.all(gap >= pert[None, :] * 0.99)


def test_sub_super_pair_eps_zero():
    prob = heat_problem(16)
    sub, sup = make_sub_super_pair(prob, 0.0)
    assert np.array_equal(sub.values, sup.values)
