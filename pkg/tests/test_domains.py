"""Charted sphere domains: embeddings, measures, orientation, Stokes."""

import math

import numpy as np
import pytest

from oddchern.domains import ChartedSphereDomain, sphere_volume
from oddchern.fields import (FormField, exterior_derivative, integrate_top,
                             volume_field)
from oddchern.forms import GradedMatrixForm

COARSE = {1: 24, 2: 16, 3: 12, 4: 10, 5: 8}


def closed_form_volume(m):
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def test_sphere_volume_closed_form():
    for m in range(1, 7):
        assert sphere_volume(m) == pytest.approx(closed_form_volume(m), rel=1e-14)


@pytest.mark.parametrize("spheres", [[1], [2], [3], [4], [2, 1], [2, 3], [4, 1]])
def test_embedding_on_unit_spheres(spheres):
    dom = ChartedSphereDomain(spheres, nodes_per_angle=COARSE)
    pts = dom.nodes()[:: max(1, dom.n_nodes // 500)]
    amb = dom.embed(pts)
    start = 0
    for m in spheres:
        block = amb[:, start:start + m + 1]
        assert np.abs(np.linalg.norm(block, axis=1) - 1.0).max() < 1e-12
        start += m + 1


@pytest.mark.parametrize("spheres", [[1], [2], [3], [2, 1], [2, 3]])
def test_quadrature_volume(spheres):
    dom = ChartedSphereDomain(spheres, nodes_per_angle=COARSE)
    expected = 1.0
    for m in spheres:
        expected *= closed_form_volume(m)
    assert dom.volume() == pytest.approx(expected, rel=1e-10)
    # The same number again via actual quadrature of the volume form.
    quad = integrate_top(volume_field(dom), dom)
    assert quad == pytest.approx(expected, rel=1e-10)


def test_angles_from_ambient_roundtrip():
    dom = ChartedSphereDomain([2, 3], nodes_per_angle=COARSE)
    pts = dom.nodes()[::97]
    amb = dom.embed(pts)
    back = np.stack(dom.angles_from_ambient_cols([c for c in amb.T]), axis=1)
    assert np.abs(dom.embed(back) - amb).max() < 1e-10


def test_sqrtg_matches_embedding_gram_determinant():
    dom = ChartedSphereDomain([2, 1], nodes_per_angle=COARSE)
    pts = dom.nodes()[::53]
    h = 1e-6
    jac = []
    for i in range(dom.dim):
        dp = pts.copy()
        dm = pts.copy()
        dp[:, i] += h
        dm[:, i] -= h
        jac.append((dom.embed(dp) - dom.embed(dm)) / (2 * h))
    J = np.stack(jac, axis=2)  # (npts, ambient, dim)
    gram = np.swapaxes(J, 1, 2) @ J
    ref = np.sqrt(np.linalg.det(gram))
    assert np.abs(dom.sqrtg(pts) - ref).max() < 1e-6


def test_orientation_volume_positive():
    for spheres in ([1], [3], [2, 1]):
        dom = ChartedSphereDomain(spheres, nodes_per_angle=COARSE)
        total = integrate_top(volume_field(dom), dom)
        assert total.real > 0
        assert total == pytest.approx(dom.volume(), rel=1e-10)


def test_normalized_volume_integrates_to_one():
    dom = ChartedSphereDomain([2], nodes_per_angle=COARSE)
    assert integrate_top(volume_field(dom, normalized=True), dom) \
        == pytest.approx(1.0, rel=1e-10)


def test_ambient_det_sign_is_a_sign():
    for spheres in ([1], [2], [3], [2, 1]):
        dom = ChartedSphereDomain(spheres, nodes_per_angle=COARSE)
        assert dom.ambient_det_sign in (-1, 1)
        assert dom.at_scale(0.5).ambient_det_sign == dom.ambient_det_sign


def _smooth_one_form(dom):
    """A 1-form with smooth ambient-coordinate coefficients."""

    def sampler(pts):
        amb = dom.embed(pts)
        form = GradedMatrixForm(dom.dim, 1, len(pts))
        for i in range(dom.dim):
            co = amb[:, i % amb.shape[1]] * amb[:, (i + 1) % amb.shape[1]]
            form.comps[1 << i] = (co + 0.5)[:, None, None].astype(complex)
        return form

    return FormField(dom, 1, sampler)


def test_stokes_closed_manifold():
    # The integral of an exact top form over a closed manifold vanishes.
    dom = ChartedSphereDomain([2], nodes_per_angle={2: 32})
    alpha = _smooth_one_form(dom)
    total = integrate_top(exterior_derivative(alpha), dom)
    assert abs(total) < 1e-8


def test_d_squared_is_zero():
    dom = ChartedSphereDomain([2, 1], nodes_per_angle=COARSE)

    def sampler(pts):
        amb = dom.embed(pts)
        form = GradedMatrixForm(dom.dim, 1, len(pts))
        form.comps[0] = (amb[:, 0] * amb[:, 3] + amb[:, 1])[:, None, None].astype(complex)
        return form

    f = FormField(dom, 1, sampler)
    dd = exterior_derivative(exterior_derivative(f))
    pts = dom.nodes()[::211]
    assert dd.at(pts).max_abs() < 1e-6


def test_at_scale_rescales_nodes():
    dom = ChartedSphereDomain([2], nodes_per_angle={2: 16})
    finer = dom.at_scale(2.0)
    assert finer.n_nodes == 4 * dom.n_nodes
    assert finer.volume() == pytest.approx(dom.volume(), rel=1e-9)


def test_node_blocks_cover_all_nodes():
    dom = ChartedSphereDomain([2, 1], nodes_per_angle=COARSE)
    seen, wsum = 0, 0.0
    for pts, w in dom.node_blocks(chunk=1000):
        assert len(pts) == len(w)
        seen += len(pts)
        wsum += w.sum()
    assert seen == dom.n_nodes
    # Chart weights only; the volume element rides along inside the forms.
    assert wsum == pytest.approx(dom.weights().sum(), rel=1e-12)
