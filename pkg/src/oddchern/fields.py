"""Form fields on a charted domain: smooth maps from chart points to forms.

A FormField can be sampled at arbitrary chart points (not only quadrature
nodes), which is what the exterior derivative and pullback need.
"""

from __future__ import annotations

import numpy as np

from .defaults import CHUNK, FD_STEP
from .domains import ChartedSphereDomain
from .forms import GradedMatrixForm, bit_indices


class FormField:
    """A form-valued field given by a sampler pts -> GradedMatrixForm."""

    def __init__(self, domain: ChartedSphereDomain, size: int, sampler):
        self.domain = domain
        self.size = size
        self._sampler = sampler

    def at(self, pts: np.ndarray) -> GradedMatrixForm:
        return self._sampler(np.asarray(pts, dtype=float))

    def at_nodes(self) -> GradedMatrixForm:
        return self.at(self.domain.nodes())

    def map_form(self, size, fn) -> "FormField":
        """New field post-composing the sampler with a form-level operation."""
        return FormField(self.domain, size, lambda pts: fn(self.at(pts)))

    def __add__(self, other):
        if self.domain is not other.domain and self.domain.spheres != other.domain.spheres:
            raise ValueError("fields live on different domains")
        return FormField(self.domain, max(self.size, other.size),
                         lambda pts: self.at(pts) + other.at(pts))

    def scale(self, c):
        return self.map_form(self.size, lambda f: f.scale(c))

    def wedge(self, other) -> "FormField":
        return FormField(self.domain, max(self.size, other.size),
                         lambda pts: self.at(pts).wedge(other.at(pts)))


def constant_field(domain, mat) -> FormField:
    mat = np.asarray(mat, dtype=complex)

    def sampler(pts):
        f = GradedMatrixForm(domain.dim, mat.shape[0], len(pts))
        f.comps[0] = np.broadcast_to(mat, (len(pts),) + mat.shape).copy()
        return f

    return FormField(domain, mat.shape[0], sampler)


def volume_field(domain, normalized=False) -> FormField:
    """The round volume form (top degree, scalar coefficients)."""
    top = (1 << domain.dim) - 1
    scale = 1.0 / domain.volume() if normalized else 1.0

    def sampler(pts):
        f = GradedMatrixForm(domain.dim, 1, len(pts))
        f.comps[top] = (scale * domain.sqrtg(pts)).astype(complex)[:, None, None]
        return f

    return FormField(domain, 1, sampler)


def exterior_derivative(field: FormField, step: float = FD_STEP) -> FormField:
    """Coordinate exterior derivative via Richardson-extrapolated differences.

    Uses the 5-point fourth-order stencil per chart direction; the input field
    must be smooth (evaluable at arbitrary nearby points).
    """
    dim = field.domain.dim

    def sampler(pts):
        n = len(pts)
        out = GradedMatrixForm(dim, field.size, n)
        for i in range(dim):
            shifted = []
            for c in (-2.0, -1.0, 1.0, 2.0):
                q = pts.copy()
                q[:, i] += c * step
                shifted.append(field.at(q))
            fm2, fm1, fp1, fp2 = shifted
            for mask in range(1 << dim):
                if mask & (1 << i):
                    continue
                cs = [f.comps[mask] for f in (fm2, fm1, fp1, fp2)]
                if all(c is None for c in cs):
                    continue
                cs = [c if c is not None else 0.0 for c in cs]
                der = (8.0 * (cs[2] - cs[1]) - (cs[3] - cs[0])) / (12.0 * step)
                # d prepends dx^i; sign counts indices of the mask below i.
                sign = -1 if bin(mask & ((1 << i) - 1)).count("1") & 1 else 1
                new = mask | (1 << i)
                term = sign * der
                out.comps[new] = term if out.comps[new] is None else out.comps[new] + term
        return out

    return FormField(field.domain, field.size, sampler)


def integrate_form(form: GradedMatrixForm, domain, weights=None):
    """Integral of the top-degree coefficient over the domain's grid."""
    top = (1 << domain.dim) - 1
    c = form.comps[top]
    if c is None:
        return 0.0 + 0.0j
    w = domain.weights() if weights is None else weights
    if form.size == 1:
        return complex(domain.orientation_sign * np.sum(w * c[:, 0, 0]))
    return domain.orientation_sign * np.einsum("n,nij->ij", w, c)


def integrate_top(field_or_form, domain, chunk: int = CHUNK):
    """Quadrature of the top-degree component of a field over the domain."""
    if isinstance(field_or_form, GradedMatrixForm):
        return integrate_form(field_or_form, domain)
    field = field_or_form
    total = 0.0 + 0.0j
    for pts, w in domain.node_blocks(chunk):
        total += integrate_form(field.at(pts), domain, weights=w)
    return total


def integrate_all_degrees(field: FormField, domain, chunk: int = CHUNK):
    """Component-wise integral of every multi-index against the quadrature weights.

    Not a geometric invariant (except for the top degree); used by tests that
    compare two fields 'in every integrated degree'.
    """
    sums = {}
    for pts, w in domain.node_blocks(chunk):
        f = field.at(pts)
        for mask, c in enumerate(f.comps):
            if c is None:
                continue
            sums[mask] = sums.get(mask, 0.0) + np.einsum("n,nij->ij", w, c)
    return sums


def pullback(chart_map, field: FormField) -> FormField:
    """Pullback of a form field through a map between charted domains.

    Coefficients are contracted against minors of the chart Jacobian.
    Components whose degree exceeds the source dimension vanish.
    """
    src, dim_t = chart_map.source, chart_map.target.dim
    dim_s = src.dim

    def sampler(pts):
        ypts = chart_map.evaluate_chart(pts)
        jac = chart_map.jacobian_chart(pts)  # (n, dim_t, dim_s)
        target_form = field.at(ypts)
        out = GradedMatrixForm(dim_s, field.size, len(pts))
        for mask_t, c in enumerate(target_form.comps):
            if c is None:
                continue
            rows = bit_indices(mask_t)
            p = len(rows)
            if p == 0:
                out.comps[0] = c if out.comps[0] is None else out.comps[0] + c
                continue
            if p > dim_s:
                continue
            for mask_s in _masks_of_degree(dim_s, p):
                colsel = bit_indices(mask_s)
                minor = jac[np.ix_(np.arange(len(pts)), rows, colsel)]
                det = np.linalg.det(minor)
                term = det[:, None, None] * c
                out.comps[mask_s] = (term if out.comps[mask_s] is None
                                     else out.comps[mask_s] + term)
        return out

    return FormField(src, field.size, sampler)


def _masks_of_degree(dim, p):
    return [m for m in range(1 << dim) if bin(m).count("1") == p]
