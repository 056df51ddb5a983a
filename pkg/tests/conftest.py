import numpy as np
import pytest

from dplab import BoundaryData, ExponentParams, Problem, builtin, solve


@pytest.fixture(scope="session")
def heat_field_64():
    """Solved p=q=2, a=1 field on [0,1]x[0,0.1] with sin initial data, h_t = h_x^2."""
    prob = heat_problem(64)
    return solve(prob), prob


def heat_problem(n, domain=(0.0, 1.0, 0.0, 0.1)):
    params = ExponentParams(2.0, 2.0)
    coeff = builtin("constant", c=1.0)
    x_lo, x_hi, t_lo, t_hi = domain
    span = x_hi - x_lo
    bc = BoundaryData(
        initial=lambda x: np.sin(np.pi * (x - x_lo) / span),
        left=lambda t: 0.0,
        right=lambda t: 0.0,
    )
    nt = max(1, int(round((t_hi - t_lo) * n * n / span**2)))
    return Problem(params=params, coeff=coeff, domain=domain, bc=bc, nx=n, nt=nt)


def heat_exact(grid, domain=(0.0, 1.0, 0.0, 0.1)):
    x_lo, x_hi, t_lo, _ = domain
    span = x_hi - x_lo
    X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
    return np.exp(-2.0 * np.pi**2 * (T - t_lo) / span**2) * np.sin(np.pi * (X - x_lo) / span)
