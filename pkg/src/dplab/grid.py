"""Uniform space-time lattices and scalar fields sampled on them.

Fields are stored as (n_x, n_t) arrays over node coordinates; spatial
differencing is centered in the interior and one-sided at the ends, so it
commutes with any linear time averaging.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Node coordinates of a uniform lattice over [x_lo, x_hi] x [t_lo, t_hi]."""

    x: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        x, t = np.asarray(self.x, float), np.asarray(self.t, float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", t)
        if x.size < 2 or t.size < 2:
            raise ValueError("grid needs at least 2 nodes per axis")
        for arr, label in ((x, "x"), (t, "t")):
            d = np.diff(arr)
            if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-9 * abs(d[0]):
                raise ValueError(f"{label} nodes must be uniformly increasing")

    @classmethod
    def regular(cls, x_lo, x_hi, t_lo, t_hi, nx, nt):
        """nx space cells and nt time steps (nx+1 by nt+1 nodes)."""
        return cls(np.linspace(x_lo, x_hi, nx + 1), np.linspace(t_lo, t_hi, nt + 1))

    @property
    def hx(self):
        return float(self.x[1] - self.x[0])

    @property
    def ht(self):
        return float(self.t[1] - self.t[0])

    @property
    def nx(self):
        return self.x.size

    @property
    def nt(self):
        return self.t.size


@dataclass
class GridField:
    """Scalar field values[i, m] = u(x_i, t_m) on a Grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nx, self.grid.nt):
            raise ValueError(
                f"values shape {v.shape} does not match grid ({self.grid.nx}, {self.grid.nt})"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        self.values = v

    @classmethod
    def from_function(cls, grid, fn):
        X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
        return cls(grid, np.asarray(fn(X, T), dtype=float))

    def osc(self) -> float:
        return float(self.values.max() - self.values.min())

    def gradient_x(self) -> np.ndarray:
        """Spatial derivative on nodes: centered interior, one-sided ends.

        First-order differences at the two end nodes keep constants at an
        exact zero gradient (equal values subtract exactly).
        """
        v, hx = self.values, self.grid.hx
        out = np.empty_like(v)
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * hx)
        out[0] = (v[1] - v[0]) / hx
        out[-1] = (v[-1] - v[-2]) / hx
        return out

    def restrict(self, x_range=None, t_range=None) -> "GridField":
        """Sub-field over node index ranges selected by coordinate windows."""
        x_lo, x_hi = x_range if x_range else (self.grid.x[0], self.grid.x[-1])
        t_lo, t_hi = t_range if t_range else (self.grid.t[0], self.grid.t[-1])
        ix = np.where((self.grid.x >= x_lo - 1e-12) & (self.grid.x <= x_hi + 1e-12))[0]
        it = np.where((self.grid.t >= t_lo - 1e-12) & (self.grid.t <= t_hi + 1e-12))[0]
        if ix.size < 2 or it.size < 2:
            raise ValueError("restriction window contains fewer than 2 nodes per axis")
        sub = Grid(self.grid.x[ix], self.grid.t[it])
        return GridField(sub, self.values[np.ix_(ix, it)])


def trapezoid_weights(coords) -> np.ndarray:
    """Composite trapezoid quadrature weights for uniform node coordinates."""
    coords = np.asarray(coords, float)
    h = coords[1] - coords[0]
    w = np.full(coords.size, h)
    w[0] = w[-1] = h / 2.0
    return w


def integrate_xt(grid, integrand) -> float:
    """Trapezoid-in-x, trapezoid-in-t quadrature of a (n_x, n_t) sampled integrand."""
    wx = trapezoid_weights(grid.x)
    wt = trapezoid_weights(grid.t)
    return float(wx @ np.asarray(integrand, float) @ wt)
