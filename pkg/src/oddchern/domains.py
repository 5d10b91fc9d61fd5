"""Charted spheres and two-factor products with Gauss-Legendre quadrature.

A sphere S^m is parametrized by hyperspherical angles
theta_1..theta_{m-1} in (0, pi) and theta_m in (0, 2*pi); the Gauss nodes are
interior, so no node ever touches the coordinate-singular poles.  A product
domain concatenates the factor charts (first factor's angles first) and
carries the product orientation.
"""

from __future__ import annotations

from math import gamma, pi

import numpy as np

from . import dual
from .defaults import NODES_PER_ANGLE


def sphere_volume(m: int) -> float:
    """Riemannian volume of the unit round S^m (2*pi, 4*pi, 2*pi**2, ...)."""
    return 2.0 * pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0)


def _gauss_axis(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def embed_sphere(cols, m: int):
    """Hyperspherical angles -> ambient unit vector in R^(m+1), dual-safe."""
    out = []
    prefix = 1.0
    for j in range(m):
        out.append(prefix * dual.cos(cols[j]))
        prefix = prefix * dual.sin(cols[j])
    out.append(prefix)
    return out


def sphere_angles_from_ambient(cols, m: int):
    """Invert the hyperspherical chart; dual-safe away from the poles."""
    angles = []
    for j in range(m - 1):
        tail = None
        for i in range(j + 1, m + 1):
            sq = cols[i] * cols[i]
            tail = sq if tail is None else tail + sq
        angles.append(dual.arctan2(dual.sqrt(tail), cols[j]))
    angles.append(dual.arctan2(cols[m], cols[m - 1]))
    return angles


def _sphere_sqrtg(cols, m: int):
    """Volume density of the round metric in hyperspherical angles."""
    g = 1.0
    for j in range(m - 1):
        g = g * dual.sin(cols[j]) ** (m - 1 - j)
    return g if m > 1 else np.ones_like(dual.value(cols[0]))


class ChartedSphereDomain:
    """Quadrature-gridded S^m or S^p x S^q with a single global chart.

    Attributes:
      dim: chart dimension (m, or p + q).
      ambient_dim: length of ambient coordinate vectors.
      axes: per-angle (nodes, weights) pairs.
      orientation_sign: +1; the chart coordinate order is the positive
        orientation, so the round volume form integrates to +Vol.
      ambient_det_sign: +-1 with det[y, dy/dtheta_1, ...] = sign * sqrt(g);
        used by the ambient-determinant route to volume-form pullbacks.
    """

    def __init__(self, spheres, nodes_per_angle=None, scale=1.0):
        """spheres: list of factor dimensions, e.g. [2] for S^2, [2, 1] for S^2 x S^1."""
        if len(spheres) not in (1, 2):
            raise ValueError("only spheres and two-factor products are supported")
        self.spheres = tuple(int(m) for m in spheres)
        if any(m < 1 for m in self.spheres):
            raise ValueError("factor dimension must be >= 1")
        self.nodes_per_angle = dict(nodes_per_angle or NODES_PER_ANGLE)
        self.scale = float(scale)
        self.dim = sum(self.spheres)
        self.ambient_dim = sum(m + 1 for m in self.spheres)

        self.axes = []
        for m in self.spheres:
            n = max(2, int(round(self.nodes_per_angle.get(m, 32) * scale)))
            for j in range(m):
                hi = pi if j < m - 1 else 2.0 * pi
                self.axes.append(_gauss_axis(n, 0.0, hi))
        self.shape = tuple(len(a[0]) for a in self.axes)
        self.n_nodes = int(np.prod(self.shape))
        self._nodes_cache = None
        self._weights_cache = None
        self.orientation_sign = 1
        self.ambient_det_sign = self._calibrate_det_sign()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def sphere(cls, m, **kw):
        return cls([m], **kw)

    @classmethod
    def product(cls, p, q, **kw):
        return cls([p, q], **kw)

    def at_scale(self, scale: float) -> "ChartedSphereDomain":
        return ChartedSphereDomain(self.spheres, self.nodes_per_angle, scale=scale)

    @property
    def is_product(self) -> bool:
        return len(self.spheres) == 2

    def factor_slices(self):
        """(chart-coordinate slice, ambient-coordinate slice) per factor."""
        out, c0, a0 = [], 0, 0
        for m in self.spheres:
            out.append((slice(c0, c0 + m), slice(a0, a0 + m + 1)))
            c0 += m
            a0 += m + 1
        return out

    # -- chart maps -------------------------------------------------------------

    def embed_cols(self, cols):
        """Chart coordinate columns -> ambient coordinate columns (dual-safe)."""
        out, c0 = [], 0
        for m in self.spheres:
            out.extend(embed_sphere(cols[c0:c0 + m], m))
            c0 += m
        return out

    def embed(self, pts: np.ndarray) -> np.ndarray:
        cols = [pts[:, i] for i in range(self.dim)]
        return np.stack([np.asarray(c, dtype=float) for c in self.embed_cols(cols)], axis=1)

    def angles_from_ambient_cols(self, cols):
        out, a0 = [], 0
        for m in self.spheres:
            out.extend(sphere_angles_from_ambient(cols[a0:a0 + m + 1], m))
            a0 += m + 1
        return out

    def sqrtg_cols(self, cols):
        g, c0 = 1.0, 0
        for m in self.spheres:
            g = g * _sphere_sqrtg(cols[c0:c0 + m], m)
            c0 += m
        return g

    def sqrtg(self, pts: np.ndarray) -> np.ndarray:
        cols = [pts[:, i] for i in range(self.dim)]
        return np.asarray(self.sqrtg_cols(cols), dtype=float) * np.ones(len(pts))

    def embed_dual_cols(self, pts: np.ndarray, direction: int):
        """Ambient columns with the derivative along one chart coordinate seeded."""
        cols = []
        for i in range(self.dim):
            c = pts[:, i]
            cols.append(dual.Dual.seed(c) if i == direction else dual.Dual.const(c))
        return self.embed_cols(cols)

    # -- quadrature ---------------------------------------------------------------

    def nodes(self) -> np.ndarray:
        if self._nodes_cache is None:
            grids = np.meshgrid(*[a[0] for a in self.axes], indexing="ij")
            self._nodes_cache = np.stack([g.reshape(-1) for g in grids], axis=1)
        return self._nodes_cache

    def weights(self) -> np.ndarray:
        if self._weights_cache is None:
            w = np.ones(self.shape)
            for i, (_, wi) in enumerate(self.axes):
                sh = [1] * self.dim
                sh[i] = -1
                w = w * wi.reshape(sh)
            self._weights_cache = w.reshape(-1)
        return self._weights_cache

    def node_blocks(self, chunk: int):
        """Yield (points, weights) batches without materializing the full grid."""
        node_axes = [a[0] for a in self.axes]
        weight_axes = [a[1] for a in self.axes]
        for lo in range(0, self.n_nodes, chunk):
            hi = min(lo + chunk, self.n_nodes)
            idx = np.unravel_index(np.arange(lo, hi), self.shape)
            pts = np.stack([node_axes[i][idx[i]] for i in range(self.dim)], axis=1)
            w = np.ones(hi - lo)
            for i in range(self.dim):
                w = w * weight_axes[i][idx[i]]
            yield pts, w

    def volume(self) -> float:
        return float(np.prod([sphere_volume(m) for m in self.spheres]))

    # -- orientation -----------------------------------------------------------------

    def _calibrate_det_sign(self) -> int:
        """Sign making det[y, d y/d theta_1, ...] agree with +sqrt(g).

        For a product the chart Jacobian is block diagonal over the factors, so
        the sign is the product of the factor signs.
        """
        sign = 1
        for m in self.spheres:
            probe = np.full((1, m), 0.9)  # generic interior angle point
            cols = [probe[:, i] for i in range(m)]
            rows = [np.stack([np.asarray(c, float) for c in embed_sphere(cols, m)], axis=1)[0]]
            for i in range(m):
                dcols = [dual.Dual.seed(cols[j]) if j == i else dual.Dual.const(cols[j])
                         for j in range(m)]
                amb = embed_sphere(dcols, m)
                rows.append(np.array([a.eps[0] for a in amb]))
            det = np.linalg.det(np.stack(rows))
            sq = float(dual.value(_sphere_sqrtg(cols, m))[0]) if m > 1 else 1.0
            sign *= 1 if det * sq > 0 else -1
        return sign
