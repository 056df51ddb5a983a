import numpy as np
import pytest

from dplab.grid import Grid, GridField, integrate_xt, trapezoid_weights


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(np.array([0.0, 1.0, 1.5]), np.array([0.0, 1.0]))  # non-uniform
    with pytest.raises(ValueError):
        Grid(np.array([0.0]), np.array([0.0, 1.0]))
    g = Grid.regular(0, 1, 0, 2, 10, 20)
    assert g.hx == pytest.approx(0.1)
    assert g.ht == pytest.approx(0.1)
    assert (g.nx, g.nt) == (11, 21)


def test_field_validation():
    g = Grid.regular(0, 1, 0, 1, 4, 4)
    with pytest.raises(ValueError):
        GridField(g, np.zeros((3, 5)))
    with pytest.raises(ValueError):
        GridField(g, np.full((5, 5), np.nan))
    f = GridField.from_function(g, lambda X, T: X + T)
    assert f.osc() == pytest.approx(2.0)


def test_gradient_exact_on_affine():
    g = Grid.regular(0, 1, 0, 1, 16, 4)
    f = GridField.from_function(g, lambda X, T: 3.0 * X - 1.0 + 0.0 * T)
    assert np.allclose(f.gradient_x(), 3.0)


def test_restrict():
    g = Grid.regular(0, 1, 0, 1, 10, 10)
    f = GridField.from_function(g, lambda X, T: X * T)
    sub = f.restrict(x_range=(0.2, 0.8), t_range=(0.5, 1.0))
    assert sub.grid.x[0] == pytest.approx(0.2)
    assert sub.grid.t[-1] == pytest.approx(1.0)
    assert sub.values.shape == (7, 6)
    with pytest.raises(ValueError):
        f.restrict(x_range=(0.31, 0.33))


def test_quadrature_exact_for_bilinear():
    g = Grid.regular(0, 2, 0, 1, 7, 5)
    wx = trapezoid_weights(g.x)
    assert wx.sum() == pytest.approx(2.0)
    X, T = np.meshgrid(g.x, g.t, indexing="ij")
    val = integrate_xt(g, 2.0 * X + 3.0 * T + 1.0)
    assert val == pytest.approx(2 * 2 + 3.0 / 2 * 2 + 2.0)  # int over [0,2]x[0,1]
