"""Modulating coefficients a(x, t) with their structural metadata.

Coefficients are closed-form evaluators (never sampled tables) so that
transforms and barriers can query off-grid points exactly.  Each carries a
spatial Lipschitz bound, a monotone time modulus omega_time, and optionally
a monotonicity constant C_a for the almost-increasing condition
a(x,t) <= C_a a(x,s) for t <= s.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass
class Coefficient:
    """Nonnegative weight of the q-phase: Lipschitz in space, continuous in time.

    ``eval``  : (x, t) -> a >= 0, vectorized over numpy inputs.
    ``lip_space`` : bound on |Da| in space.
    ``omega_time``: monotone modulus with omega_time(0) = 0 bounding time increments.
    ``dx``    : spatial derivative where it exists (None -> central differences).
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lip_space: float
    omega_time: Callable[[float], float] = lambda s: 0.0
    omega_smax: float = 1e3
    C_a: Optional[float] = None
    dx: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, x, t):
        return self.eval(x, t)

    def dx_at(self, x, t, h=1e-6):
        if self.dx is not None:
            return self.dx(x, t)
        return (self.eval(np.asarray(x) + h, t) - self.eval(np.asarray(x) - h, t)) / (2.0 * h)

    def omega_inverse(self, target: float, tol: float = 1e-12) -> float:
        """Invert the time modulus by bisection on [0, omega_smax]."""
        if target < 0:
            raise ValueError("modulus inverse target must be >= 0")
        if target == 0.0:
            return 0.0
        hi = self.omega_smax
        if self.omega_time(hi) < target:
            raise ValueError(
                f"target {target} above the range of omega_time on [0, {hi}]"
            )
        lo = 0.0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if self.omega_time(mid) < target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def builtin(name: str, **params) -> Coefficient:
    """Named closed-form coefficient families with exact metadata.

    constant(c)      : a = c
    neg_time_ramp    : a = max(-t, 0)
    time_ramp(shift) : a = max(t + shift, 0), nondecreasing in t
    line_ramp        : a = max(-(x + t + 1), 0)
    smooth_bump(amp, width, center): C^1 cosine bump in x, time-independent
    power_space(power, scale, x_max): a = scale * |x|^power
    """
    if name == "constant":
        c = float(params.get("c", 1.0))
        if c < 0:
            raise ValueError("constant coefficient must be >= 0")
        return Coefficient(
            eval=lambda x, t, c=c: np.broadcast_arrays(np.asarray(x, dtype=float) * 0.0 + c, np.asarray(t, dtype=float))[0],
            lip_space=0.0,
            omega_time=lambda s: 0.0,
            C_a=1.0 if c > 0 else None,
            dx=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            name=name,
            params={"c": c},
        )
    if name == "neg_time_ramp":
        return Coefficient(
            eval=lambda x, t: np.maximum(-np.asarray(t, dtype=float), 0.0) + 0.0 * np.asarray(x, dtype=float),
            lip_space=0.0,
            omega_time=lambda s: float(s),
            dx=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            name=name,
        )
    if name == "time_ramp":
        shift = float(params.get("shift", 1.0))
        return Coefficient(
            eval=lambda x, t, c=shift: np.maximum(np.asarray(t, dtype=float) + c, 0.0) + 0.0 * np.asarray(x, dtype=float),
            lip_space=0.0,
            omega_time=lambda s: float(s),
            C_a=1.0,
            dx=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            name=name,
            params={"shift": shift},
        )
    if name == "line_ramp":
        return Coefficient(
            eval=lambda x, t: np.maximum(-(np.asarray(x, dtype=float) + np.asarray(t, dtype=float) + 1.0), 0.0),
            lip_space=1.0,
            omega_time=lambda s: float(s),
            dx=lambda x, t: np.where(
                np.asarray(x, dtype=float) + np.asarray(t, dtype=float) + 1.0 < 0.0, -1.0, 0.0
            ),
            name=name,
        )
    if name == "smooth_bump":
        amp = float(params.get("amp", 1.0))
        width = float(params.get("width", 0.5))
        center = float(params.get("center", 0.0))
        if amp < 0 or width <= 0:
            raise ValueError("smooth_bump needs amp >= 0 and width > 0")

        def _bump(x, t, amp=amp, w=width, c=center):
            x = np.asarray(x, dtype=float)
            r = np.abs(x - c) / w
            return np.where(r < 1.0, 0.5 * amp * (1.0 + np.cos(math.pi * r)), 0.0) + 0.0 * np.asarray(t, dtype=float)

        def _bump_dx(x, t, amp=amp, w=width, c=center):
            x = np.asarray(x, dtype=float)
            r = (x - c) / w
            inside = np.abs(r) < 1.0
            return np.where(inside, -0.5 * amp * math.pi / w * np.sin(math.pi * np.abs(r)) * np.sign(r), 0.0)

        return Coefficient(
            eval=_bump,
            lip_space=0.5 * amp * math.pi / width,
            omega_time=lambda s: 0.0,
            C_a=None,
            dx=_bump_dx,
            name=name,
            params={"amp": amp, "width": width, "center": center},
        )
    if name == "power_space":
        power = float(params.get("power", 1.0))
        scale = float(params.get("scale", 1.0))
        x_max = float(params.get("x_max", 1.0))
        if power < 1 or scale < 0:
            raise ValueError("power_space needs power >= 1 and scale >= 0")
        return Coefficient(
            eval=lambda x, t, k=power, s=scale: s * np.abs(np.asarray(x, dtype=float)) ** k + 0.0 * np.asarray(t, dtype=float),
            lip_space=scale * power * x_max ** (power - 1.0),
            omega_time=lambda s: 0.0,
            C_a=1.0,
            dx=lambda x, t, k=power, s=scale: s * k * np.sign(np.asarray(x, dtype=float)) * np.abs(np.asarray(x, dtype=float)) ** (k - 1.0),
            name=name,
            params={"power": power, "scale": scale, "x_max": x_max},
        )
    raise ValueError(f"unknown builtin coefficient {name!r}")


def kink_mask(coeff, x, t, hx, factor=10.0):
    """Points where the one-sided spatial differences of a disagree (kink set).

    The non-differentiability set is represented implicitly: a point is
    flagged when the forward and backward difference quotients differ by
    more than factor * hx * lip_space, which closed forms with isolated
    kinks exceed only on a measure-zero neighbourhood.
    """
    x = np.asarray(x, dtype=float)
    fwd = (coeff.eval(x + hx, t) - coeff.eval(x, t)) / hx
    bwd = (coeff.eval(x, t) - coeff.eval(x - hx, t)) / hx
    return np.abs(fwd - bwd) > factor * hx * max(coeff.lip_space, 1e-300)


def check_almost_increasing(coeff, cylinder, sample_count=2000, direction="increasing"):
    """Sample the monotonicity condition a(x,t) <= C a(x,s) on a cylinder.

    ``cylinder`` is (x_lo, x_hi, t_lo, t_hi).  direction="increasing" tests
    pairs with t <= s (the comparison-principle hypothesis);
    direction="decreasing" tests the mirrored s <= t variant.  Returns
    {"ok": bool, "C_a_observed": float} where C is the smallest constant
    valid on the sample (inf when some a(x,s) = 0 < a(x,t)).
    """
    x_lo, x_hi, t_lo, t_hi = cylinder
    n_x = max(3, int(round(math.sqrt(sample_count / 8.0))))
    n_t = max(4, sample_count // max(n_x, 1))
    n_t = min(n_t, 64)
    xs = np.linspace(x_lo, x_hi, n_x)
    ts = np.linspace(t_lo, t_hi, n_t)
    a = coeff.eval(xs[:, None], ts[None, :])  # (n_x, n_t)

    worst = 0.0
    ok = True
    for i in range(n_t):
        for j in range(i + 1, n_t):
            early, late = a[:, i], a[:, j]  # t = ts[i] <= s = ts[j]
            if direction == "increasing":
                num, den = early, late
            elif direction == "decreasing":
                num, den = late, early
            else:
                raise ValueError("direction must be 'increasing' or 'decreasing'")
            bad = (den == 0.0) & (num > 0.0)
            if np.any(bad):
                return {"ok": False, "C_a_observed": math.inf}
            mask = den > 0.0
            if np.any(mask):
                worst = max(worst, float(np.max(num[mask] / den[mask])))
    return {"ok": ok, "C_a_observed": worst}


def spatial_lipschitz_estimate(coeff, region, grid=256):
    """Max finite-difference slope |da|/|dx| of a over a space-time region.

    ``region`` is (x_lo, x_hi, t_lo, t_hi); ``grid`` the number of x cells.
    Edges straddling a kink of a are kept (the estimate is a max, the
    declared lip_space bounds it from above up to O(h_x) slack).
    """
    x_lo, x_hi, t_lo, t_hi = region
    xs = np.linspace(x_lo, x_hi, int(grid) + 1)
    ts = np.linspace(t_lo, t_hi, 16)
    a = coeff.eval(xs[:, None], ts[None, :])
    da = np.abs(np.diff(a, axis=0)) / np.diff(xs)[:, None]
    return float(np.max(da)) if da.size else 0.0
