"""Invertible-matrix-valued maps on charted domains, with derivative contracts.

Maps are written as functions of the domain's *ambient* coordinates, so the
same map works on any quadrature resolution of the domain and derivatives in
chart directions follow by seeding dual numbers through the embedding.
"""

from __future__ import annotations

import numpy as np

from . import dual
from .defaults import FD_STEP, MIN_SINGULAR_VALUE


def pack_matrix(rows, npts):
    """Nested-list matrix of Dual/array entries -> (values, derivatives)."""
    n = len(rows)
    vals = np.zeros((npts, n, n), dtype=complex)
    eps = np.zeros((npts, n, n), dtype=complex)
    for i, row in enumerate(rows):
        for j, e in enumerate(row):
            if isinstance(e, dual.Dual):
                vals[:, i, j] = e.val
                eps[:, i, j] = e.eps
            else:
                vals[:, i, j] = e
    return vals, eps


class SmoothMatrixMap:
    """Base contract: pointwise values plus chart-direction derivatives."""

    size: int

    def evaluate(self, domain, pts) -> np.ndarray:
        raise NotImplementedError

    def differential(self, domain, pts, direction: int) -> np.ndarray:
        raise NotImplementedError

    def differentials(self, domain, pts):
        return [self.differential(domain, pts, i) for i in range(domain.dim)]

    # -- contract checks ------------------------------------------------------

    def min_singular_value(self, domain, pts=None) -> float:
        pts = domain.nodes() if pts is None else pts
        return float(np.linalg.svd(self.evaluate(domain, pts), compute_uv=False).min())

    def check_invertible(self, domain, floor=MIN_SINGULAR_VALUE):
        g = self.evaluate(domain, domain.nodes())
        sv = np.linalg.svd(g, compute_uv=False).min(axis=-1)
        if sv.min() <= floor:
            node = int(np.argmin(sv))
            raise ValueError(
                f"matrix map is numerically singular at node {node}: "
                f"smallest singular value {sv.min():.3e}"
            )

    def check_derivative(self, domain, rng, n_samples=8, rel_tol=1e-6):
        """Consistency of differential against divided differences."""
        pts = np.column_stack([
            rng.uniform(0.3, hi - 0.3, n_samples)
            for hi in [a[0].max() + a[0].min() for a in domain.axes]
        ])
        for i in range(domain.dim):
            h = 1e-5
            qp, qm = pts.copy(), pts.copy()
            qp[:, i] += h
            qm[:, i] -= h
            fd = (self.evaluate(domain, qp) - self.evaluate(domain, qm)) / (2 * h)
            an = self.differential(domain, pts, i)
            err = np.abs(fd - an).max() / (1.0 + np.abs(an).max())
            if err > rel_tol:
                raise ValueError(f"derivative contract failed in direction {i}: {err:.3e}")


class DualMatrixMap(SmoothMatrixMap):
    """Map given entrywise as dual-safe functions of ambient coordinates."""

    def __init__(self, fn_entries, size):
        self.fn_entries = fn_entries
        self.size = size

    def evaluate(self, domain, pts):
        cols = [c for c in np.asarray(pts, float).T]
        rows = self.fn_entries(domain.embed_cols(cols))
        vals, _ = pack_matrix(rows, len(pts))
        return vals

    def differential(self, domain, pts, direction):
        amb = domain.embed_dual_cols(np.asarray(pts, float), direction)
        rows = self.fn_entries(amb)
        _, eps = pack_matrix(rows, len(pts))
        return eps


class NumericMatrixMap(SmoothMatrixMap):
    """Map given only by an evaluator; derivatives via Richardson differences."""

    def __init__(self, eval_fn, size, step=FD_STEP):
        self.eval_fn = eval_fn
        self.size = size
        self.step = step

    def evaluate(self, domain, pts):
        return self.eval_fn(domain, np.asarray(pts, float))

    def differential(self, domain, pts, direction):
        h = self.step
        pts = np.asarray(pts, float)
        vals = []
        for c in (-2.0, -1.0, 1.0, 2.0):
            q = pts.copy()
            q[:, direction] += c * h
            vals.append(self.eval_fn(domain, q))
        fm2, fm1, fp1, fp2 = vals
        return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h)


class ProductMatrixMap(SmoothMatrixMap):
    """Pointwise matrix product a(x) b(x) with product-rule derivatives."""

    def __init__(self, a: SmoothMatrixMap, b: SmoothMatrixMap):
        if a.size != b.size:
            raise ValueError("factor matrix sizes must match")
        self.a, self.b = a, b
        self.size = a.size

    def evaluate(self, domain, pts):
        return self.a.evaluate(domain, pts) @ self.b.evaluate(domain, pts)

    def differential(self, domain, pts, direction):
        return (self.a.differential(domain, pts, direction) @ self.b.evaluate(domain, pts)
                + self.a.evaluate(domain, pts) @ self.b.differential(domain, pts, direction))


class ScaledMatrixMap(SmoothMatrixMap):
    def __init__(self, c, inner: SmoothMatrixMap):
        self.c, self.inner = c, inner
        self.size = inner.size

    def evaluate(self, domain, pts):
        return self.c * self.inner.evaluate(domain, pts)

    def differential(self, domain, pts, direction):
        return self.c * self.inner.differential(domain, pts, direction)


def constant_map(mat) -> DualMatrixMap:
    mat = np.asarray(mat, dtype=complex)

    def fn(cols):
        ones = np.ones_like(dual.value(cols[0]))
        return [[mat[i, j] * ones for j in range(mat.shape[1])]
                for i in range(mat.shape[0])]

    return DualMatrixMap(fn, mat.shape[0])


def _embed_block(block_rows, size, ones):
    """Place a small matrix block in the top-left of an identity of `size`."""
    k = len(block_rows)
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if i < k and j < k:
                row.append(block_rows[i][j])
            else:
                row.append((1.0 if i == j else 0.0) * ones)
        rows.append(row)
    return rows


def circle_winding(m: int, size: int = 1) -> DualMatrixMap:
    """z -> diag(z**m, 1, ..., 1) on S^1 (ambient coordinates (x, y))."""

    def fn(cols):
        x, y = cols[0], cols[1]
        ones = np.ones_like(dual.value(x))
        z = x + 1j * y
        zm = z ** m if m != 0 else 1.0 * ones
        return _embed_block([[zm]], size, ones)

    return DualMatrixMap(fn, size)


def su2_identity(size: int = 2) -> DualMatrixMap:
    """The degree-one S^3 -> SU(2) representative, embedded in U(size).

    Ambient coordinates (x1, x2, x3, x4) of S^3 are read as the pair of
    complex numbers (a, b) = (x1 + i x2, x3 - i x4); the orientation of this
    identification is pinned so the normalized top integral of the odd Chern
    form equals -1 (see the degree module's tests).
    """
    if size < 2:
        raise ValueError("su2 generator needs matrix size >= 2")

    def fn(cols):
        x1, x2, x3, x4 = cols[0], cols[1], cols[2], cols[3]
        ones = np.ones_like(dual.value(x1))
        a = x1 + 1j * x2
        b = x3 - 1j * x4
        block = [[a, -dual.conj(b)], [b, dual.conj(a)]]
        return _embed_block(block, size, ones)

    return DualMatrixMap(fn, size)


def stabilize(inner: DualMatrixMap, extra: int) -> DualMatrixMap:
    """Embed g as diag(g, Id_extra)."""

    def fn(cols):
        rows = inner.fn_entries(cols)
        ones = np.ones_like(dual.value(cols[0]))
        return _embed_block(rows, inner.size + extra, ones)

    return DualMatrixMap(fn, inner.size + extra)


class HomotopyFamily:
    """Family (t, point) -> invertible matrix, differentiable in t.

    fn_entries(t, ambient_cols) must be dual-safe in both t and the columns.
    """

    def __init__(self, fn_entries, size):
        self.fn_entries = fn_entries
        self.size = size

    def slice_at(self, t: float) -> DualMatrixMap:
        return DualMatrixMap(lambda cols: self.fn_entries(t, cols), self.size)

    def t_derivative(self, domain, pts, t: float) -> np.ndarray:
        pts = np.asarray(pts, float)
        cols = [dual.Dual.const(c) for c in pts.T]
        amb = domain.embed_cols(cols)
        td = dual.Dual.seed(np.full(len(pts), float(t)))
        rows = self.fn_entries(td, amb)
        _, eps = pack_matrix(rows, len(pts))
        return eps


class ChartMap:
    """Smooth map between charted domains, given on ambient coordinates."""

    def __init__(self, source, target, ambient_fn):
        self.source = source
        self.target = target
        self.ambient_fn = ambient_fn

    def evaluate_ambient(self, pts) -> np.ndarray:
        cols = [c for c in np.asarray(pts, float).T]
        out = self.ambient_fn(self.source.embed_cols(cols))
        n = len(pts)
        return np.stack([np.asarray(dual.value(c), float) * np.ones(n) for c in out], axis=1)

    def evaluate_chart(self, pts) -> np.ndarray:
        cols = [c for c in np.asarray(pts, float).T]
        amb = self.ambient_fn(self.source.embed_cols(cols))
        ang = self.target.angles_from_ambient_cols(amb)
        n = len(pts)
        return np.stack([np.asarray(dual.value(a), float) * np.ones(n) for a in ang], axis=1)

    def ambient_jacobian_columns(self, pts):
        """Ambient values plus d(ambient)/d(chart_i) for every source direction."""
        pts = np.asarray(pts, float)
        n = len(pts)
        cols_out = []
        vals = None
        for i in range(self.source.dim):
            amb = self.ambient_fn(self.source.embed_dual_cols(pts, i))
            if vals is None:
                vals = np.stack(
                    [np.asarray(dual.value(c), float) * np.ones(n) for c in amb], axis=1)
            cols_out.append(np.stack(
                [np.asarray(c.eps if isinstance(c, dual.Dual) else np.zeros(n), float)
                 * np.ones(n) for c in amb], axis=1))
        return vals, cols_out

    def jacobian_chart(self, pts) -> np.ndarray:
        """d(target chart)/d(source chart), shape (n, dim_t, dim_s)."""
        pts = np.asarray(pts, float)
        n = len(pts)
        jac = np.zeros((n, self.target.dim, self.source.dim))
        for i in range(self.source.dim):
            amb = self.ambient_fn(self.source.embed_dual_cols(pts, i))
            ang = self.target.angles_from_ambient_cols(amb)
            for k, a in enumerate(ang):
                jac[:, k, i] = (a.eps if isinstance(a, dual.Dual) else 0.0) * np.ones(n)
        return jac

    def compose(self, inner: "ChartMap") -> "ChartMap":
        """self after inner: x -> self(inner(x))."""
        return ChartMap(inner.source, self.target,
                        lambda cols: self.ambient_fn(inner.ambient_fn(cols)))


def identity_chart_map(domain) -> ChartMap:
    return ChartMap(domain, domain, lambda cols: cols)


def antipodal_map(domain) -> ChartMap:
    return ChartMap(domain, domain, lambda cols: [-c for c in cols])


def circle_power_map(domain, m: int) -> ChartMap:
    """z -> z**m on S^1 in ambient coordinates."""

    def fn(cols):
        x, y = cols[0], cols[1]
        z = x + 1j * y
        zm = z ** m
        return [dual.real(zm), dual.imag(zm)]

    return ChartMap(domain, domain, fn)


def projection_second_factor(product_domain, factor_domain) -> ChartMap:
    """pr_2: S^p x S^q -> S^q, dropping the first factor's ambient block."""
    (_, amb1), (_, amb2) = product_domain.factor_slices()

    def fn(cols):
        return cols[amb2.start:amb2.stop]

    return ChartMap(product_domain, factor_domain, fn)


def compose_map_with_matrix(chart_map: ChartMap, g: DualMatrixMap) -> DualMatrixMap:
    """Pull a matrix map on the target back through a chart map (g o phi)."""
    return DualMatrixMap(lambda cols: g.fn_entries(chart_map.ambient_fn(cols)), g.size)
