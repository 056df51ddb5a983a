"""Experiment implementations behind the batch runner.

Each experiment consumes a parsed config dictionary and returns
(csv_header, csv_rows, checks) where checks is a list of
(name, passed, detail) triples.  Everything is deterministic for a fixed
config and seed: fixed iteration orders, no wall-clock content.
"""

import math
from dataclasses import replace

import numpy as np

from . import regularity, transforms, verify
from .coefficient import builtin
from .flux import (
    continuity_gap_singular,
    monotonicity_gap_degenerate,
    monotonicity_gap_singular,
)
from .grid import Grid, GridField
from .params import ExponentParams, time_exponent_target
from .solver import BoundaryData, Problem, make_sub_super_pair, solve


class ConfigError(ValueError):
    """Bad experiment configuration (missing keys, invalid values)."""


def _require(cfg, section, key):
    try:
        return cfg[section][key]
    except KeyError:
        raise ConfigError(f"missing key [{section}] {key}") from None


def _get(cfg, section, key, default=None):
    return cfg.get(section, {}).get(key, default)


def _floats(text):
    vals = [float(v) for v in str(text).split(",") if str(v).strip()]
    if not vals:
        raise ConfigError(f"empty list value {text!r}")
    return vals


def _ints(text):
    return [int(round(v)) for v in _floats(text)]


def _coefficient(cfg, section="coefficient"):
    sec = dict(cfg.get(section, {}))
    name = sec.pop("name", "constant")
    kwargs = {k: float(v) for k, v in sec.items()}
    try:
        return builtin(name, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _params(cfg, p=None, q=None):
    sec = cfg.get("params", {})
    p = float(sec.get("p", p if p is not None else 2.0))
    q = float(sec.get("q", q if q is not None else p))
    try:
        return ExponentParams(
            p=p,
            q=q,
            beta1=float(sec.get("beta1", 1.0)),
            beta2=float(sec.get("beta2", 1.0)),
            C_f=float(sec.get("C_f", 0.0)),
            borderline_ok=str(sec.get("borderline_ok", "false")).lower() == "true",
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _domain(cfg):
    sec = cfg.get("grid", {})
    dom = (
        float(sec.get("x_lo", 0.0)),
        float(sec.get("x_hi", 1.0)),
        float(sec.get("t_lo", 0.0)),
        float(sec.get("t_hi", 0.1)),
    )
    if not (dom[1] > dom[0] and dom[3] > dom[2]):
        raise ConfigError("grid domain must have positive extent")
    return dom


def _boundary(cfg, domain):
    sec = cfg.get("data", {})
    kind = sec.get("initial", "sin_pi")
    amp = float(sec.get("amplitude", 1.0))
    tilt = float(sec.get("tilt", 0.0))
    x_lo, x_hi, _, _ = domain
    span = x_hi - x_lo

    if kind == "sin_pi":
        init = lambda x: amp * np.sin(np.pi * (x - x_lo) / span) + tilt * (x - x_lo)
        return BoundaryData(initial=init, left=lambda t: 0.0, right=lambda t: tilt * span)
    if kind == "bump":
        width = float(sec.get("width", 20.0))
        center = x_lo + 0.5 * span
        init = lambda x: amp * np.exp(-width * (x - center) ** 2)
        return BoundaryData(initial=init, kind="reflecting")
    if kind == "linear":
        init = lambda x: amp + tilt * (x - x_lo)
        return BoundaryData(initial=init, left=lambda t: amp, right=lambda t: amp + tilt * span)
    raise ConfigError(f"unknown initial data kind {kind!r}")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# --------------------------------------------------------------------------
# solve


def run_solve(cfg, seed):
    mode = _get(cfg, "experiment", "mode", "field")
    if mode == "field":
        return _solve_field(cfg)
    if mode == "heat_oracle":
        return _solve_heat_oracle(cfg)
    if mode == "class_s":
        return _solve_class_s(cfg)
    raise ConfigError(f"unknown solve mode {mode!r}")


def _solve_field(cfg):
    params = _params(cfg)
    coeff = _coefficient(cfg)
    domain = _domain(cfg)
    nx = int(_get(cfg, "grid", "nx", 64))
    nt = int(_get(cfg, "grid", "nt", 128))
    bc = _boundary(cfg, domain)
    try:
        prob = Problem(params=params, coeff=coeff, domain=domain, bc=bc, nx=nx, nt=nt)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    field = solve(prob)
    rows = []
    for m, tv in enumerate(field.grid.t):
        for i, xv in enumerate(field.grid.x):
            rows.append([_fmt(float(tv)), _fmt(float(xv)), _fmt(float(field.values[i, m]))])
    checks = [("solve_completed", True, f"osc={field.osc():.6g}")]
    return ["t", "x", "u"], rows, checks


def _heat_problem(n, domain):
    params = ExponentParams(2.0, 2.0)
    coeff = builtin("constant", c=1.0)
    x_lo, x_hi, t_lo, t_hi = domain
    span = x_hi - x_lo
    bc = BoundaryData(
        initial=lambda x: np.sin(np.pi * (x - x_lo) / span),
        left=lambda t: 0.0,
        right=lambda t: 0.0,
    )
    hx = span / n
    nt = max(1, int(round((t_hi - t_lo) / hx**2)))
    return Problem(params=params, coeff=coeff, domain=domain, bc=bc, nx=n, nt=nt)


def _heat_exact(grid, domain):
    x_lo, x_hi, t_lo, _ = domain
    span = x_hi - x_lo
    X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
    return np.exp(-2.0 * np.pi**2 * (T - t_lo) / span**2) * np.sin(np.pi * (X - x_lo) / span)


def _solve_heat_oracle(cfg):
    domain = _domain(cfg)
    ns = _ints(_get(cfg, "oracle", "n_list", "64,128,256"))
    tol = float(_get(cfg, "oracle", "tol", 1e-3))
    order_min = float(_get(cfg, "oracle", "order_min", 1.8))
    errs, rows = [], []
    for n in ns:
        prob = _heat_problem(n, domain)
        field = solve(prob)
        err = float(np.max(np.abs(field.values - _heat_exact(field.grid, domain))))
        errs.append(err)
        rows.append([_fmt(n), _fmt(prob.hx), _fmt(err)])
    hs = [(domain[1] - domain[0]) / n for n in ns]
    order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    checks = [
        ("heat_error", errs[-1] <= tol, f"err={errs[-1]:.3e} tol={tol:.1e} at n={ns[-1]}"),
        ("heat_order", order >= order_min, f"observed order {order:.3f} >= {order_min}"),
    ]
    return ["n", "h_x", "err_inf"], rows, checks


def _solve_class_s(cfg):
    params = _params(cfg)
    coeff = _coefficient(cfg)
    domain = _domain(cfg)
    ns = _ints(_get(cfg, "class_s", "n_list", "32,64"))
    c_cap = float(_get(cfg, "class_s", "c_cap", 10.0))
    rows, consts, all_pass = [], [], True
    for n in ns:
        span = domain[1] - domain[0]
        hx = span / n
        nt = max(4, int(round((domain[3] - domain[2]) / hx**2)))
        prob = Problem(params=params, coeff=coeff, domain=domain, bc=_boundary(cfg, domain), nx=n, nt=nt)
        u = solve(prob)
        rep = verify.class_S_check(u, params, coeff)
        c_impl = rep.worst_value / ((u.grid.hx + u.grid.ht) * u.osc())
        consts.append(c_impl)
        all_pass &= rep.passed
        rows.append(
            [_fmt(n), _fmt(rep.worst_value), _fmt(rep.tolerance), _fmt(c_impl),
             _fmt(rep.metadata["checked"]), _fmt(rep.metadata["skipped"]), _fmt(rep.passed)]
        )
    checks = [
        ("class_s_pass", all_pass, f"worst margins within 10(hx+ht)osc on n={ns}"),
        ("class_s_constant", max(consts) <= c_cap, f"implied constants {[f'{c:.2f}' for c in consts]} <= {c_cap}"),
    ]
    return ["n", "worst_margin", "tol", "implied_c", "checked", "skipped", "passed"], rows, checks


# --------------------------------------------------------------------------
# compare


def run_compare(cfg, seed):
    mode = _get(cfg, "experiment", "mode", "pairs")
    if mode == "pairs":
        return _compare_pairs(cfg, seed)
    if mode == "vector_ineq":
        return _compare_vector_ineq(cfg, seed)
    raise ConfigError(f"unknown compare mode {mode!r}")


def _compare_pairs(cfg, seed):
    sec = cfg.get("compare", {})
    count = int(sec.get("count", 20))
    eps = float(sec.get("eps", 0.05))
    tol = float(sec.get("tol", 1e-8))
    nx = int(sec.get("nx", 24))
    nt = int(sec.get("nt", 48))
    p_list = _floats(sec.get("p_list", "1.5,2,3"))
    gap_list = _floats(sec.get("gap_list", "0,0.5,0.995"))
    coeff_names = [c.strip() for c in str(sec.get("coeff_list", "constant,time_ramp")).split(",")]

    rng = np.random.default_rng(seed)
    rows, all_pass = [], True
    for case in range(count):
        p = p_list[case % len(p_list)]
        gap = gap_list[(case // len(p_list)) % len(gap_list)]
        name = coeff_names[case % len(coeff_names)]
        coeff = builtin(name, c=1.0) if name == "constant" else builtin(name)
        b0, b1 = rng.uniform(-0.5, 0.5, 2)
        amp = rng.uniform(0.1, 0.6)
        r0, r1 = rng.uniform(-0.4, 0.4, 2)
        params = ExponentParams(p, p + gap, C_f=abs(r0) + abs(r1) + 1e-12)
        rhs = lambda x, t, xi, r0=r0, r1=r1: r0 * np.sin(2 * np.pi * np.asarray(x)) + r1 * np.asarray(xi)
        bc = BoundaryData(
            initial=lambda x, b0=b0, b1=b1, amp=amp: b0 + (b1 - b0) * x + amp * np.sin(np.pi * x),
            left=lambda t, b0=b0: b0,
            right=lambda t, b1=b1: b1,
        )
        prob = Problem(params=params, coeff=coeff, domain=(0, 1, 0, 0.2), bc=bc, nx=nx, nt=nt, rhs=rhs)
        sub, sup = make_sub_super_pair(prob, eps)
        rep = verify.comparison_check(sub, sup, tol=tol)
        all_pass &= rep.passed
        rows.append([_fmt(case), _fmt(p), _fmt(p + gap), name, _fmt(rep.worst_value), _fmt(rep.passed)])
    checks = [("comparison_pairs", all_pass, f"{count} seeded sub/super pairs, gap tol {tol:.1e}")]
    return ["case", "p", "q", "coefficient", "worst_gap", "passed"], rows, checks


def _compare_vector_ineq(cfg, seed):
    sec = cfg.get("vector_ineq", {})
    n_pairs = int(sec.get("n_pairs", 1_000_000))
    dim = int(sec.get("dim", 3))
    slack = float(sec.get("slack", 1e-12))
    singular_r = _floats(sec.get("singular_r", "1.2,1.5,1.9,2.0"))
    degenerate_r = _floats(sec.get("degenerate_r", "2,2.5,3,4"))
    continuity_r = _floats(sec.get("continuity_r", "1.2,1.5,1.9"))

    rng = np.random.default_rng(seed)
    scales = rng.choice([1e-3, 1e-1, 1.0, 10.0], size=(n_pairs, 1))
    A = rng.standard_normal((n_pairs, dim)) * scales
    B = rng.standard_normal((n_pairs, dim)) * scales
    near = rng.random(n_pairs) < 0.1
    B[near] = A[near] + 1e-9 * rng.standard_normal((int(near.sum()), dim))
    zero = rng.random(n_pairs) < 0.02
    B[zero] = 0.0

    mag = 1.0 + np.sqrt(np.sum(A * A, axis=-1)) + np.sqrt(np.sum(B * B, axis=-1))
    rows, all_pass = [], True
    for label, fn, r_list in (
        ("monotone_singular", monotonicity_gap_singular, singular_r),
        ("monotone_degenerate", monotonicity_gap_degenerate, degenerate_r),
        ("continuity_singular", continuity_gap_singular, continuity_r),
    ):
        for r in r_list:
            gap = fn(r, A, B)
            rel = np.max(-gap / mag ** max(r, 2.0))
            ok = bool(rel <= slack)
            all_pass &= ok
            rows.append([label, _fmt(r), _fmt(n_pairs), _fmt(float(rel)), _fmt(ok)])
    checks = [("vector_inequalities", all_pass, f"{n_pairs} pairs per inequality, slack {slack:.1e}")]
    return ["inequality", "r", "n_pairs", "worst_relative_violation", "passed"], rows, checks


# --------------------------------------------------------------------------
# barrier


def run_barrier(cfg, seed):
    mode = _get(cfg, "experiment", "mode", "grid")
    if mode == "grid":
        return _barrier_grid(cfg)
    if mode == "scaling":
        return _barrier_scaling(cfg)
    raise ConfigError(f"unknown barrier mode {mode!r}")


def _barrier_samples(spec, n_x, n_t):
    hx = spec.rho / n_x
    xs = spec.anchor_x + np.linspace(hx, spec.rho, n_x)
    ts = np.linspace(spec.t0, 0.0, n_t)
    return xs, ts


def _barrier_grid(cfg):
    sec = cfg.get("barrier", {})
    p_list = _floats(sec.get("p_list", "1.5,2,3"))
    gap_list = _floats(sec.get("gap_list", "0,0.5,1.0"))
    t0 = float(sec.get("t0", -0.04))
    osc = float(sec.get("osc", 1.0))
    L = float(sec.get("L", 1.0))
    n_x = int(sec.get("n_x_samples", 125))
    n_t = int(sec.get("n_t_samples", 8))
    theta0 = float(sec.get("theta0", 1e-6))
    res_tol = float(sec.get("residual_tol", 1e-10))
    coeff = _coefficient(cfg)

    rows, all_ok = [], True
    for p in p_list:
        for gap in gap_list:
            params = ExponentParams(p, p + gap, borderline_ok=True)
            regime = "singular" if p < 2.0 else "degenerate"
            spec = regularity.barrier_make(regime, params, t0=t0, s0=0.0, osc_u=osc, L=L)
            samples = _barrier_samples(spec, n_x, n_t)
            theta, info = regularity.barrier_theta_search(spec, coeff, None, samples, theta0=theta0)
            final = replace(spec, Theta=theta)
            res, _ = regularity.barrier_residual(final, coeff, None, samples)
            ok = res >= -res_tol
            all_ok &= ok
            rows.append(
                [_fmt(p), _fmt(p + gap), regime, _fmt(spec.A), _fmt(spec.K), _fmt(theta),
                 _fmt(info["C1"]), _fmt(res), _fmt(ok)]
            )
    checks = [("barrier_grid", all_ok, f"theta search + residual >= -{res_tol:.0e} on {n_x * n_t} samples")]

    if str(sec.get("heat_check", "true")).lower() == "true":
        spec = regularity.barrier_make("degenerate", ExponentParams(2.0, 2.0), t0=t0, s0=0.0, osc_u=osc, L=L)
        coeff0 = builtin("constant", c=0.0)
        samples = _barrier_samples(spec, n_x, n_t)
        theta, _ = regularity.barrier_theta_search(spec, coeff0, None, samples, theta0=theta0)
        ratio = theta / (2.0 * spec.K)
        ok = 1.0 <= ratio <= 2.0
        checks.append(("barrier_heat_theta", ok, f"found/2KN = {ratio:.3f} in [1,2]"))
        rows.append([_fmt(2.0), _fmt(2.0), "heat", _fmt(spec.A), _fmt(spec.K), _fmt(theta), _fmt(ratio), _fmt(0.0), _fmt(ok)])
    return ["p", "q", "regime", "A", "K", "Theta", "C1_or_ratio", "residual_min", "passed"], rows, checks


def _barrier_scaling(cfg):
    sec = cfg.get("barrier_scaling", {})
    p = float(sec.get("p", 1.5))
    q = float(sec.get("q", 2.4))
    gaps = (float(sec.get("gap1", 0.01)), float(sec.get("gap2", 0.0001)))
    osc = float(sec.get("osc", 1.0))
    L = float(sec.get("L", 1.0))
    factor_tol = float(sec.get("factor_tol", 2.0))
    n_x = int(sec.get("n_x_samples", 1000))
    n_t = int(sec.get("n_t_samples", 5))
    coeff = _coefficient(cfg)
    params = ExponentParams(p, q, borderline_ok=True)

    rows, thetas, Ks = [], [], []
    for gap in gaps:
        spec = regularity.barrier_make("singular", params, t0=-gap, s0=0.0, osc_u=osc, L=L)
        samples = _barrier_samples(spec, n_x, n_t)
        theta, info = regularity.barrier_theta_search(spec, coeff, None, samples, theta0=1e-6)
        thetas.append(theta)
        Ks.append(spec.K)
        rows.append([_fmt(gap), _fmt(spec.A), _fmt(spec.K), _fmt(theta), _fmt(info["C1"])])
    beta = p / (p - 1.0)
    predicted = (Ks[1] / Ks[0]) ** (q / beta)
    factor = (thetas[1] / thetas[0]) / predicted
    ok = 1.0 / factor_tol <= factor <= factor_tol
    checks = [("barrier_scaling", ok, f"Theta ratio / K-ratio^(q/beta) = {factor:.3f} within x{factor_tol}")]
    return ["gap", "A", "K", "Theta", "C1"], rows, checks


# --------------------------------------------------------------------------
# modulus


def run_modulus(cfg, seed):
    sec = cfg.get("modulus", {})
    pq_list = [tuple(float(v) for v in item.split(":")) for item in str(sec.get("pq_list", "1.5:2,2:2.5,3:3.5")).split(",")]
    nx = int(sec.get("nx", 64))
    slack = float(sec.get("slack", 0.05))
    coeff = _coefficient(cfg)

    rows, all_ok = [], True
    for p, q in pq_list:
        params = ExponentParams(p, q, borderline_ok=True)
        domain = (0.0, 1.0, 0.0, 0.1)
        hx = 1.0 / nx
        nt = int(round(0.1 / hx**2))
        bc = BoundaryData(initial=lambda x: np.sin(np.pi * x) + 0.2 * x, left=lambda t: 0.0, right=lambda t: 0.2)
        prob = Problem(params=params, coeff=coeff, domain=domain, bc=bc, nx=nx, nt=nt)
        u = solve(prob)
        rep = regularity.modulus_estimate(u, inner_cylinder=((0.2, 0.8), (0.02, 0.1)))
        target = time_exponent_target(p, q)
        ok = rep.alpha_defined and rep.time_alpha_est >= target - slack
        all_ok &= ok
        rows.append(
            [_fmt(p), _fmt(q), _fmt(target), _fmt(rep.time_alpha_est), _fmt(rep.lip_space_est),
             _fmt(rep.fit_r2), _fmt(ok)]
        )
    checks = [("modulus_alpha", all_ok, f"time_alpha_est >= target - {slack} for all (p,q)")]
    return ["p", "q", "alpha_target", "alpha_est", "lip_est", "fit_r2", "passed"], rows, checks


# --------------------------------------------------------------------------
# steklov (+ mollify)


def run_steklov(cfg, seed):
    sec = cfg.get("steklov", {})
    params = ExponentParams(
        float(sec.get("p", 2.0)), float(sec.get("q", 3.0)), borderline_ok=True
    )
    coeff = _coefficient(cfg)
    nx = int(sec.get("nx", 64))
    nt = int(sec.get("nt", 4000))
    tol = float(sec.get("tol", 1e-6))
    h_steps = _ints(sec.get("h_steps", "4,8,16,32,64,128"))

    grid = Grid.regular(0.0, 1.0, 0.0, 1.0, nx, nt)
    field = GridField.from_function(grid, lambda X, T: np.sin(np.pi * X) * (1.0 + 0.5 * T**2))
    hs = [k * grid.ht for k in h_steps]
    rep = transforms.steklov_wh_convergence(field, coeff, params, hs, tol=tol)
    rows = [["steklov", _fmt(h), _fmt(m)] for h, m in zip(rep.values, rep.modulars)]
    checks = [("steklov_wh", rep.passed, f"monotone to {rep.modulars[-1]:.2e} <= {tol:.0e} ({rep.details['direction']} average)")]

    msec = cfg.get("mollify", {})
    nx_m = int(msec.get("nx", 128))
    deltas = _floats(msec.get("deltas", "0.4,0.2,0.1,0.05,0.025,0.0125"))
    tol_m = float(msec.get("tol", 1e-6))
    grid_m = Grid.regular(-1.0, 1.0, 0.0, 1.0, nx_m, 16)
    hat = GridField.from_function(grid_m, lambda X, T: np.maximum(0.4 - np.abs(X), 0.0) * (1.0 + 0.0 * T))
    mrep = transforms.mollify_modular_sweep(hat, coeff, params, deltas, tol=tol_m)
    rows += [["mollify", _fmt(dv), _fmt(m)] for dv, m in zip(mrep.values, mrep.modulars)]
    checks.append(("mollify_wh", mrep.passed, f"monotone to {mrep.modulars[-1]:.2e} <= {tol_m:.0e}"))
    return ["transform", "parameter", "modular"], rows, checks


# --------------------------------------------------------------------------
# infconv


def run_infconv(cfg, seed):
    sec = cfg.get("infconv", {})
    eps = float(sec.get("eps", 0.18))
    ell = float(sec.get("ell", 4.0))
    q = float(sec.get("q", 2.0))
    p = float(sec.get("p", 1.8))
    nx = int(sec.get("nx", 48))
    nt = int(sec.get("nt", 40))
    semi_tol = float(sec.get("semiconcavity_tol", 1e-9))
    analytic_eps = float(sec.get("analytic_eps", 0.3))

    coeff = builtin("neg_time_ramp")
    grid = Grid.regular(-1.0, 1.0, -1.0, 0.0, nx, nt)
    field = GridField.from_function(grid, lambda X, T: 0.8 * np.abs(X) + 0.4 * np.abs(T + 0.5))
    osc = field.osc()
    de = transforms.delta_eps(coeff, eps, q, ell, osc)
    icp = transforms.InfConvParams(eps=eps, ell=ell, delta_eps=de, osc_u=osc, p=p)
    res = transforms.inf_convolution(field, icp)

    below = float(np.max(res.field.values - field.values))
    dx_d, dt_d = res.argmin_distances()
    t_shift_bound = coeff.omega_inverse(eps ** (q * (ell - 1.0)))
    margin = res.semiconcavity_margin()

    g1 = Grid.regular(-1.0, 1.0, 0.0, 1.0, 2 * nx, 8)
    lin = GridField.from_function(g1, lambda X, T: X + 0.0 * T)
    icp1 = transforms.InfConvParams(eps=analytic_eps, ell=4.0, delta_eps=1e-3, osc_u=lin.osc(), p=p)
    res1 = transforms.inf_convolution(lin, icp1)
    i0 = int(np.argmin(np.abs(g1.x)))
    got = float(res1.field.values[i0, g1.nt // 2])
    want = -3.0 * analytic_eps / 4.0
    analytic_tol = 2.0 * g1.hx * 1.0

    checks = [
        ("infconv_below", below <= 0.0, f"max(u_eps - u) = {below:.2e} <= 0"),
        ("infconv_argmin_radius", bool(np.max(dx_d) <= icp.r_eps + 1e-12 and np.max(dt_d) <= icp.r_eps + 1e-12),
         f"max shifts ({np.max(dx_d):.3f}, {np.max(dt_d):.3f}) <= r(eps) = {icp.r_eps:.3f}"),
        ("infconv_time_shift", bool(np.max(dt_d) <= t_shift_bound + 1e-12),
         f"max |t - t_eps| = {np.max(dt_d):.2e} <= omega^-1 = {t_shift_bound:.2e}"),
        ("infconv_semiconcavity", margin <= semi_tol, f"margin {margin:.2e} <= {semi_tol:.0e}"),
        ("infconv_analytic", abs(got - want) <= analytic_tol,
         f"u_eps(0) = {got:.5f} vs -3eps/4 = {want:.5f} (tol {analytic_tol:.3f})"),
    ]
    rows = [
        ["below", _fmt(below), _fmt(0.0), _fmt(checks[0][1])],
        ["argmin_dx", _fmt(float(np.max(dx_d))), _fmt(icp.r_eps), _fmt(checks[1][1])],
        ["argmin_dt", _fmt(float(np.max(dt_d))), _fmt(t_shift_bound), _fmt(checks[2][1])],
        ["semiconcavity", _fmt(margin), _fmt(semi_tol), _fmt(checks[3][1])],
        ["analytic_value", _fmt(got), _fmt(want), _fmt(checks[4][1])],
    ]
    return ["check", "value", "bound", "passed"], rows, checks


# --------------------------------------------------------------------------
# caccioppoli


class _TensorBump:
    """Smooth space-time cutoff sin^2 profile, compactly supported in the cylinder."""

    def __init__(self, domain):
        self.x_lo, self.x_hi, self.t_lo, self.t_hi = domain
        self.sx = self.x_hi - self.x_lo
        self.st = self.t_hi - self.t_lo

    def _px(self, X):
        return np.sin(np.pi * (X - self.x_lo) / self.sx) ** 2

    def _pt(self, T):
        return np.sin(np.pi * (T - self.t_lo) / self.st) ** 2

    def value(self, X, T):
        return self._px(X) * self._pt(T)

    def dx(self, X, T):
        u = np.pi * (X - self.x_lo) / self.sx
        return 2.0 * np.sin(u) * np.cos(u) * np.pi / self.sx * self._pt(T)

    def dt(self, X, T):
        v = np.pi * (T - self.t_lo) / self.st
        return self._px(X) * 2.0 * np.sin(v) * np.cos(v) * np.pi / self.st


def run_caccioppoli(cfg, seed):
    sec = cfg.get("caccioppoli", {})
    pq_list = [tuple(float(v) for v in item.split(":")) for item in str(sec.get("pq_list", "2:2,1.5:2,3:3.4")).split(",")]
    nx_pair = _ints(sec.get("nx_list", "48,96"))
    c_cap = float(sec.get("c_cap", 100.0))
    stability = float(sec.get("stability", 0.2))
    coeff = _coefficient(cfg)

    domain = (0.0, 1.0, 0.0, 0.1)
    cutoff = _TensorBump(domain)
    rows, all_finite = [], True
    ratios_by_pq = {}
    for p, q in pq_list:
        params = ExponentParams(p, q, borderline_ok=True)
        for nx in nx_pair:
            hx = 1.0 / nx
            nt = int(round(0.1 / hx**2))
            bc = BoundaryData(initial=lambda x: np.sin(np.pi * x), left=lambda t: 0.0, right=lambda t: 0.0)
            prob = Problem(params=params, coeff=coeff, domain=domain, bc=bc, nx=nx, nt=nt)
            u = solve(prob)
            rep = verify.caccioppoli_check(u, cutoff, coeff, params, M=1.0, C_cap=c_cap)
            all_finite &= math.isfinite(rep["ratio"]) and rep["passed"]
            ratios_by_pq.setdefault((p, q), []).append(rep["ratio"])
            rows.append([_fmt(p), _fmt(q), _fmt(nx), _fmt(rep["lhs"]), _fmt(rep["rhs"]), _fmt(rep["ratio"])])
    stable = True
    for (p, q), ratios in ratios_by_pq.items():
        r0, r1 = ratios[0], ratios[-1]
        stable &= abs(r1 - r0) <= stability * max(r0, r1)
    checks = [
        ("caccioppoli_finite", all_finite, f"ratios finite and <= C_cap={c_cap}"),
        ("caccioppoli_stable", stable, f"refinement change within +-{stability * 100:.0f}%"),
    ]
    return ["p", "q", "nx", "lhs", "rhs", "ratio"], rows, checks


# --------------------------------------------------------------------------
# counterexample


def run_counterexample(cfg, seed):
    sec = cfg.get("counterexample", {})
    p = float(sec.get("p", 1.5))
    q = float(sec.get("q", 2.5))
    eps = float(sec.get("eps", 0.1))
    h = float(sec.get("h", 0.1))
    ns = _ints(sec.get("n_list", "1024,2048,4096,8192,16384"))
    slope_tol = float(sec.get("slope_tol_rel", 0.10))
    j_change_max = float(sec.get("j_change_max", 0.05))
    try:
        rep = transforms.counterexample_divergence(p, q, eps, h, ns)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = [
        [_fmt(n), _fmt(v), _fmt(j), _fmt(rep["slope"]), _fmt(rep["slope_ref"])]
        for n, v, j in zip(rep["n"], rep["I"], rep["J"])
    ]
    slope_ok = abs(rep["slope"] - rep["slope_ref"]) <= slope_tol * abs(rep["slope_ref"])
    j_ok = rep["J_rel_changes"][-1] < j_change_max
    checks = [
        ("counterexample_slope", slope_ok,
         f"slope {rep['slope']:.4f} vs q/p-eps-1 = {rep['slope_ref']:.4f} within {slope_tol * 100:.0f}%"),
        ("counterexample_p_integral", j_ok,
         f"final relative change {rep['J_rel_changes'][-1]:.4f} < {j_change_max}"),
    ]
    return ["n", "I_n", "J_n", "slope_fit", "slope_ref"], rows, checks


# --------------------------------------------------------------------------
# psi_scan


def run_psi_scan(cfg, seed):
    sec = cfg.get("psi_scan", {})
    p = float(sec.get("p", 3.0))
    q = float(sec.get("q", 3.4))
    nx = int(sec.get("nx", 48))
    nt = int(sec.get("nt", 60))
    alpha = float(sec.get("alpha", 0.6))
    coeff = _coefficient(cfg)
    params = ExponentParams(p, q, borderline_ok=True)

    bc = BoundaryData(initial=lambda x: 0.5 * np.sin(np.pi * x) + 0.2 * x, left=lambda t: 0.0, right=lambda t: 0.2)
    prob = Problem(params=params, coeff=coeff, domain=(0, 1, -0.25, 0), bc=bc, nx=nx, nt=nt)
    u = solve(prob)
    profile = regularity.PhiProfile("holder", alpha=alpha)
    anchors = [(0.25, 0.75, -0.1), (0.5, 0.5, -0.05), (0.4, 0.6, -0.15)]
    L_star = regularity.psi_threshold_search(u, profile, anchors)
    scan2 = regularity.psi_max_scan(u, 2.0 * L_star, profile, anchors)["max_value"]
    u2 = GridField(u.grid, 2.0 * u.values)
    L_star2 = regularity.psi_threshold_search(u2, profile, anchors)

    checks = [
        ("psi_threshold_finite", math.isfinite(L_star) and L_star > 0, f"L* = {L_star:.4f}"),
        ("psi_nonpositive_at_2L", scan2 <= 0.0, f"scan(2L*) = {scan2:.3e} <= 0"),
        ("psi_amplitude_monotone", L_star2 >= L_star, f"L*(2u) = {L_star2:.4f} >= L*(u) = {L_star:.4f}"),
    ]
    rows = [
        ["L_star", _fmt(L_star)],
        ["scan_at_2L", _fmt(scan2)],
        ["L_star_doubled_field", _fmt(L_star2)],
    ]
    return ["quantity", "value"], rows, checks


RUNNERS = {
    "solve": run_solve,
    "compare": run_compare,
    "barrier": run_barrier,
    "modulus": run_modulus,
    "steklov": run_steklov,
    "infconv": run_infconv,
    "caccioppoli": run_caccioppoli,
    "counterexample": run_counterexample,
    "psi_scan": run_psi_scan,
}
