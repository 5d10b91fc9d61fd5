"""Matrix maps and chart maps: derivative contracts and generators."""

import numpy as np
import pytest

from oddchern.domains import ChartedSphereDomain
from oddchern.maps import (HomotopyFamily, ProductMatrixMap, ScaledMatrixMap,
                           antipodal_map, circle_power_map, circle_winding,
                           compose_map_with_matrix, constant_map,
                           identity_chart_map, projection_second_factor,
                           stabilize, su2_identity)

COARSE = {1: 24, 2: 16, 3: 12}


def fd_differential(g, dom, pts, i, h=1e-6):
    dp, dm = pts.copy(), pts.copy()
    dp[:, i] += h
    dm[:, i] -= h
    return (g.evaluate(dom, dp) - g.evaluate(dom, dm)) / (2 * h)


@pytest.mark.parametrize("builder,spheres", [
    (lambda: circle_winding(2), [1]),
    (lambda: circle_winding(-3, size=3), [1]),
    (lambda: su2_identity(), [3]),
    (lambda: stabilize(su2_identity(), 2), [3]),
    (lambda: ScaledMatrixMap(2.5, su2_identity()), [3]),
])
def test_dual_differential_matches_fd(builder, spheres):
    g = builder()
    dom = ChartedSphereDomain(spheres, nodes_per_angle=COARSE)
    pts = dom.nodes()[:: max(1, dom.n_nodes // 40)]
    for i in range(dom.dim):
        exact = g.differential(dom, pts, i)
        approx = fd_differential(g, dom, pts, i)
        assert np.abs(exact - approx).max() < 1e-7


def test_builtin_derivative_check():
    dom = ChartedSphereDomain([3], nodes_per_angle=COARSE)
    rng = np.random.default_rng(0)
    su2_identity().check_derivative(dom, rng)


def test_product_map_product_rule():
    dom = ChartedSphereDomain([1], nodes_per_angle=COARSE)
    a, b = circle_winding(2, size=2), circle_winding(-1, size=2)
    prod = ProductMatrixMap(a, b)
    pts = dom.nodes()[::3]
    vals_a = a.evaluate(dom, pts)
    vals_b = b.evaluate(dom, pts)
    assert np.abs(prod.evaluate(dom, pts) - vals_a @ vals_b).max() < 1e-12
    lhs = prod.differential(dom, pts, 0)
    rhs = a.differential(dom, pts, 0) @ vals_b + vals_a @ b.differential(dom, pts, 0)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_unitarity_of_generators():
    for g, spheres in ((circle_winding(3, size=2), [1]), (su2_identity(), [3])):
        dom = ChartedSphereDomain(spheres, nodes_per_angle=COARSE)
        pts = dom.nodes()[::7]
        vals = g.evaluate(dom, pts)
        gram = np.conj(np.swapaxes(vals, -1, -2)) @ vals
        assert np.abs(gram - np.eye(g.size)).max() < 1e-12


def test_constant_map_has_zero_derivative():
    dom = ChartedSphereDomain([2, 1], nodes_per_angle=COARSE)
    g = constant_map(np.array([[2.0, 1.0], [0.0, 1.0]]))
    pts = dom.nodes()[::101]
    for i in range(dom.dim):
        assert np.abs(g.differential(dom, pts, i)).max() < 1e-12


def test_stabilize_embeds_identity_block():
    dom = ChartedSphereDomain([3], nodes_per_angle=COARSE)
    g = stabilize(su2_identity(), 2)
    pts = dom.nodes()[::19]
    vals = g.evaluate(dom, pts)
    assert np.abs(vals[:, 2:, 2:] - np.eye(2)).max() < 1e-12
    assert np.abs(vals[:, :2, 2:]).max() < 1e-12


def test_homotopy_family_t_derivative():
    dom = ChartedSphereDomain([1], nodes_per_angle=COARSE)

    def fn(t, cols):
        x, y = cols[0], cols[1]
        return [[1.0 + 0.3 * (x * t), 0.1 * (y * t) * t],
                [0.0 * x, 1.0 + 0.0 * y]]

    fam = HomotopyFamily(fn, 2)
    pts = dom.nodes()[::3]
    t, h = 0.7, 1e-6
    exact = fam.t_derivative(dom, pts, t)
    approx = (fam.slice_at(t + h).evaluate(dom, pts)
              - fam.slice_at(t - h).evaluate(dom, pts)) / (2 * h)
    assert np.abs(exact - approx).max() < 1e-8


def test_chart_map_jacobian_vs_fd():
    dom = ChartedSphereDomain([2], nodes_per_angle=COARSE)
    amap = antipodal_map(dom)
    pts = dom.nodes()[::29]
    _, jac_cols = amap.ambient_jacobian_columns(pts)
    h = 1e-6
    for i in range(dom.dim):
        dp, dm = pts.copy(), pts.copy()
        dp[:, i] += h
        dm[:, i] -= h
        fd = (amap.evaluate_ambient(dp) - amap.evaluate_ambient(dm)) / (2 * h)
        assert np.abs(jac_cols[i] - fd).max() < 1e-7


def test_identity_and_projection_values():
    prod = ChartedSphereDomain([2, 1], nodes_per_angle=COARSE)
    circle = ChartedSphereDomain([1], nodes_per_angle=COARSE)
    ident = identity_chart_map(prod)
    pts = prod.nodes()[::97]
    assert np.abs(ident.evaluate_ambient(pts) - prod.embed(pts)).max() < 1e-12
    pr2 = projection_second_factor(prod, circle)
    amb = pr2.evaluate_ambient(pts)
    assert np.abs(amb - prod.embed(pts)[:, 3:]).max() < 1e-12


def test_circle_power_map_composition():
    dom = ChartedSphereDomain([1], nodes_per_angle=COARSE)
    sq = circle_power_map(dom, 2)
    pts = dom.nodes()[::2]
    amb = dom.embed(pts)
    z = amb[:, 0] + 1j * amb[:, 1]
    out = sq.evaluate_ambient(pts)
    assert np.abs((out[:, 0] + 1j * out[:, 1]) - z ** 2).max() < 1e-12


def test_compose_map_with_matrix_pullback_values():
    dom = ChartedSphereDomain([1], nodes_per_angle=COARSE)
    sq = circle_power_map(dom, 2)
    g = compose_map_with_matrix(sq, circle_winding(3))
    pts = dom.nodes()[::2]
    amb = dom.embed(pts)
    z = amb[:, 0] + 1j * amb[:, 1]
    assert np.abs(g.evaluate(dom, pts)[:, 0, 0] - z ** 6).max() < 1e-10
