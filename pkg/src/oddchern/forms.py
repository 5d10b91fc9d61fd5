"""Graded exterior algebra of complex-matrix-valued differential forms.

A form lives on a d-dimensional chart and is stored densely over the 2**d
subsets of chart coordinates (bitmask index), with the coefficient of each
multi-index being an (npts, N, N) complex array sampled at a batch of chart
points.  Only strictly increasing multi-indices are stored; antisymmetry is
canonicalized into Koszul signs at wedge time.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

# Principal branch of sqrt(2*pi*i); odd-degree normalization uses this branch.
SQRT_2PI_I = np.sqrt(2.0 * np.pi) * np.exp(1j * np.pi / 4.0)
TWO_PI_I = 2.0j * np.pi


def bit_indices(mask: int):
    """Chart coordinates present in a multi-index bitmask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def shuffle_sign(mask_a: int, mask_b: int) -> int:
    """Koszul sign of sorting dx^A wedge dx^B into the increasing dx^(A|B).

    Counts transpositions: each index j of B must jump over the indices of A
    that are larger than j.  Assumes mask_a & mask_b == 0.
    """
    sign = 0
    for j in bit_indices(mask_b):
        sign += int(bin(mask_a >> (j + 1)).count("1"))
    return -1 if sign & 1 else 1


class GradedMatrixForm:
    """Mixed-degree matrix-valued form over a batch of chart points.

    comps is a dense list of length 2**dim; entry `mask` is an
    (npts, N, N) complex array or None when the component vanishes.
    Instances are treated as immutable by all operations.
    """

    def __init__(self, dim: int, size: int, npts: int, comps=None):
        if dim < 1:
            raise ValueError("chart dimension must be >= 1")
        self.dim = dim
        self.size = size
        self.npts = npts
        self.comps = [None] * (1 << dim) if comps is None else comps

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim, size, npts):
        return cls(dim, size, npts)

    @classmethod
    def identity(cls, dim, size, npts):
        """Degree-0 form with identity matrix coefficient."""
        f = cls(dim, size, npts)
        f.comps[0] = np.broadcast_to(
            np.eye(size, dtype=complex), (npts, size, size)
        ).copy()
        return f

    @classmethod
    def from_components(cls, dim, comps_by_mask, npts=None, size=None):
        """Build from a {mask: (npts, N, N) array} mapping."""
        arrays = {m: np.asarray(a, dtype=complex) for m, a in comps_by_mask.items()}
        if not arrays and (npts is None or size is None):
            raise ValueError("need npts and size for an empty component map")
        probe = next(iter(arrays.values())) if arrays else None
        npts = probe.shape[0] if probe is not None else npts
        size = probe.shape[1] if probe is not None else size
        f = cls(dim, size, npts)
        for m, a in arrays.items():
            if m >> dim:
                raise ValueError("multi-index exceeds chart dimension")
            if a.shape != (npts, size, size):
                raise ValueError("component shape mismatch")
            f.comps[m] = a
        return f

    # -- queries -------------------------------------------------------------

    def component(self, mask: int):
        """Coefficient array of a multi-index; zeros if absent."""
        c = self.comps[mask]
        if c is None:
            return np.zeros((self.npts, self.size, self.size), dtype=complex)
        return c

    def degrees(self):
        return sorted({bin(m).count("1") for m, c in enumerate(self.comps) if c is not None})

    def is_homogeneous(self, degree):
        return all(bin(m).count("1") == degree
                   for m, c in enumerate(self.comps) if c is not None)

    def max_abs(self) -> float:
        vals = [np.abs(c).max() for c in self.comps if c is not None]
        return float(max(vals)) if vals else 0.0

    # -- linear structure ----------------------------------------------------

    def _check_compatible(self, other):
        if (self.dim, self.size, self.npts) != (other.dim, other.size, other.npts):
            raise ValueError("forms live on different charts or matrix sizes")

    def __add__(self, other):
        self._check_compatible(other)
        out = GradedMatrixForm(self.dim, self.size, self.npts)
        for m in range(1 << self.dim):
            a, b = self.comps[m], other.comps[m]
            if a is None and b is None:
                continue
            out.comps[m] = (a if a is not None else 0) + (b if b is not None else 0)
        return out

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        out = GradedMatrixForm(self.dim, self.size, self.npts)
        for m, a in enumerate(self.comps):
            if a is not None:
                out.comps[m] = c * a
        return out

    def scale_by_degree(self, fn):
        """Scale each degree-k component by the scalar fn(k)."""
        out = GradedMatrixForm(self.dim, self.size, self.npts)
        for m, a in enumerate(self.comps):
            if a is not None:
                out.comps[m] = fn(bin(m).count("1")) * a
        return out

    # -- multiplicative structure ---------------------------------------------

    def wedge(self, other):
        """Wedge product with matrix multiplication on coefficients.

        A scalar-valued factor (N == 1) broadcasts against a matrix-valued one.
        """
        if self.dim != other.dim or self.npts != other.npts:
            raise ValueError("wedge requires the same chart and point batch")
        if self.size != other.size and 1 not in (self.size, other.size):
            raise ValueError("matrix sizes incompatible for wedge")
        size = max(self.size, other.size)
        out = GradedMatrixForm(self.dim, size, self.npts)
        full = 1 << self.dim
        for ma, a in enumerate(self.comps):
            if a is None:
                continue
            for mb, b in enumerate(other.comps):
                if b is None or (ma & mb):
                    continue
                k = ma | mb
                if k >= full:  # cannot happen, masks stay below 2**dim
                    continue
                if self.size == other.size:
                    term = a @ b
                elif self.size == 1:
                    term = a[:, 0, 0][:, None, None] * b
                else:
                    term = a * b[:, 0, 0][:, None, None]
                term = shuffle_sign(ma, mb) * term
                out.comps[k] = term if out.comps[k] is None else out.comps[k] + term
        return out

    def wedge_power(self, m: int):
        """m-fold left-folded wedge of the form with itself (m >= 1)."""
        if m < 1:
            raise ValueError("wedge_power needs m >= 1")
        acc = self
        for _ in range(m - 1):
            acc = acc.wedge(self)
        return acc

    # -- trace-like maps ------------------------------------------------------

    def trace(self):
        """Componentwise matrix trace; result is scalar-valued (N = 1)."""
        out = GradedMatrixForm(self.dim, 1, self.npts)
        for m, a in enumerate(self.comps):
            if a is not None:
                out.comps[m] = np.einsum("nii->n", a)[:, None, None]
        return out

    def supertrace(self, rank: int):
        """Tr over the E+ block minus Tr over the E- block.

        Coefficients must be (2*rank x 2*rank) matrices in the block order
        (E+, E-).
        """
        if self.size != 2 * rank:
            raise ValueError("supertrace needs 2*rank coefficients")
        out = GradedMatrixForm(self.dim, 1, self.npts)
        for m, a in enumerate(self.comps):
            if a is None:
                continue
            tp = np.einsum("nii->n", a[:, :rank, :rank])
            tm = np.einsum("nii->n", a[:, rank:, rank:])
            out.comps[m] = (tp - tm)[:, None, None]
        return out


def power_odd(w: GradedMatrixForm, m: int) -> GradedMatrixForm:
    """Odd wedge power of a homogeneous degree-1 form.

    Returns the zero form when m exceeds the chart dimension (nilpotency).
    """
    if m < 1 or m % 2 == 0:
        raise ValueError("power_odd needs an odd m >= 1")
    if not w.is_homogeneous(1):
        raise ValueError("power_odd needs a homogeneous degree-1 form")
    if m > w.dim:
        return GradedMatrixForm.zero(w.dim, w.size, w.npts)
    return w.wedge_power(m)


def normalize_2pi(w: GradedMatrixForm) -> GradedMatrixForm:
    """Scale each degree-k component by (2*pi*i)**(-k/2), principal branch."""
    return w.scale_by_degree(lambda k: SQRT_2PI_I ** (-k))


def nilpotent_exp(w: GradedMatrixForm, scale=1.0) -> GradedMatrixForm:
    """Exact exponential sum_m (scale*w)**m / m! of a form with no 0-degree part.

    The series truncates at the chart dimension because positive-degree forms
    are nilpotent there.  Callers must factor out any degree-0 part
    analytically beforehand.
    """
    if w.comps[0] is not None and np.abs(w.comps[0]).max() > 0.0:
        raise ValueError("nilpotent_exp requires a vanishing degree-0 part")
    out = GradedMatrixForm.identity(w.dim, w.size, w.npts)
    sw = w.scale(scale)
    term = None
    for m in range(1, w.dim + 1):
        term = sw if term is None else term.wedge(sw)
        out = out + term.scale(1.0 / factorial(m))
    return out


@dataclass
class SuperMatrix:
    """Z2-graded block matrix on E+ (+) E-, both of rank N.

    Even matrices are block diagonal (pm = mp = 0); odd ones are block
    off-diagonal (pp = mm = 0).
    """

    pp: np.ndarray
    pm: np.ndarray
    mp: np.ndarray
    mm: np.ndarray
    odd: bool = False

    def __post_init__(self):
        n = self.pp.shape[-1]
        for blk in (self.pm, self.mp, self.mm):
            if blk.shape[-1] != n or blk.shape[-2] != n:
                raise ValueError("this model uses equal ranks r+ = r- = N")
        if self.odd:
            if np.abs(self.pp).max() > 0 or np.abs(self.mm).max() > 0:
                raise ValueError("odd supermatrix must have pp = mm = 0")
        else:
            if np.abs(self.pm).max() > 0 or np.abs(self.mp).max() > 0:
                raise ValueError("even supermatrix must have pm = mp = 0")

    @property
    def rank(self) -> int:
        return self.pp.shape[-1]

    def full(self) -> np.ndarray:
        """Assemble the underlying 2N x 2N matrix (batched)."""
        top = np.concatenate([self.pp, self.pm], axis=-1)
        bot = np.concatenate([self.mp, self.mm], axis=-1)
        return np.concatenate([top, bot], axis=-2)

    @classmethod
    def even(cls, pp, mm):
        z = np.zeros_like(pp)
        return cls(pp=pp, pm=z, mp=z, mm=mm, odd=False)

    @classmethod
    def odd_block(cls, pm, mp):
        z = np.zeros_like(pm)
        return cls(pp=z, pm=pm, mp=mp, mm=z, odd=True)


def supertrace_matrix(mat: np.ndarray, rank: int) -> np.ndarray:
    """Supertrace of batched 2N x 2N matrices."""
    return np.einsum("...ii->...", mat[..., :rank, :rank]) - np.einsum(
        "...ii->...", mat[..., rank:, rank:]
    )
