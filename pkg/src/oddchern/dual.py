"""Minimal forward-mode differentiation for array-valued chart maps.

A Dual carries a value array and the directional derivative of that value
with respect to one real seed parameter.  All the built-in geometry (sphere
embeddings, stereographic projections, collapse profiles, generator maps) is
written against the dispatching helpers below, so seeding a chart coordinate
yields exact derivatives through arbitrary compositions, including across
arctan2 branch cuts where finite differences would break.
"""

from __future__ import annotations

import numpy as np


class Dual:
    __slots__ = ("val", "eps")

    def __init__(self, val, eps):
        self.val = np.asarray(val)
        self.eps = np.asarray(eps)

    @classmethod
    def seed(cls, val):
        """Independent variable: derivative one."""
        val = np.asarray(val, dtype=float)
        return cls(val, np.ones_like(val))

    @classmethod
    def const(cls, val):
        val = np.asarray(val)
        return cls(val, np.zeros_like(val))

    # arithmetic ------------------------------------------------------------

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val + o.val, self.eps + o.eps)
        return Dual(self.val + o, self.eps + np.zeros_like(np.asarray(o) * 0.0))

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.eps)

    def __sub__(self, o):
        return self + (-o if isinstance(o, Dual) else -np.asarray(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val * o.val, self.eps * o.val + self.val * o.eps)
        return Dual(self.val * o, self.eps * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            inv = 1.0 / o.val
            return Dual(self.val * inv, (self.eps - self.val * inv * o.eps) * inv)
        return Dual(self.val / o, self.eps / o)

    def __rtruediv__(self, o):
        inv = 1.0 / self.val
        return Dual(o * inv, -o * inv * inv * self.eps)

    def __pow__(self, p):
        if not np.isscalar(p):
            raise TypeError("only scalar exponents are supported")
        return Dual(self.val ** p, p * self.val ** (p - 1) * self.eps)


def value(x):
    return x.val if isinstance(x, Dual) else np.asarray(x)


def _lift(fn_val, fn_der):
    def apply(x):
        if isinstance(x, Dual):
            return Dual(fn_val(x.val), fn_der(x.val) * x.eps)
        return fn_val(x)

    return apply


sin = _lift(np.sin, np.cos)
cos = _lift(np.cos, lambda v: -np.sin(v))
exp = _lift(np.exp, np.exp)
sqrt = _lift(np.sqrt, lambda v: 0.5 / np.sqrt(v))
arccos = _lift(np.arccos, lambda v: -1.0 / np.sqrt(1.0 - v * v))


def real(x):
    if isinstance(x, Dual):
        return Dual(x.val.real, x.eps.real)
    return np.real(x)


def imag(x):
    if isinstance(x, Dual):
        return Dual(x.val.imag, x.eps.imag)
    return np.imag(x)


def conj(x):
    if isinstance(x, Dual):
        return Dual(np.conj(x.val), np.conj(x.eps))
    return np.conj(x)


def arctan2(y, x):
    """Two-argument arctangent; derivative is smooth across the branch cut."""
    if not isinstance(y, Dual) and not isinstance(x, Dual):
        return np.arctan2(y, x)
    yv, xv = value(y), value(x)
    ye = y.eps if isinstance(y, Dual) else np.zeros_like(yv)
    xe = x.eps if isinstance(x, Dual) else np.zeros_like(xv)
    r2 = xv * xv + yv * yv
    return Dual(np.arctan2(yv, xv), (xv * ye - yv * xe) / r2)


def where(cond, a, b):
    """Select between dual/array branches elementwise.

    Both branches must already be finite where selected; masked-out entries
    may hold arbitrary finite values but must not be NaN/Inf producing.
    """
    da, db = isinstance(a, Dual), isinstance(b, Dual)
    if not da and not db:
        return np.where(cond, a, b)
    av, bv = value(a), value(b)
    ae = a.eps if da else np.zeros_like(np.broadcast_arrays(av, bv)[0])
    be = b.eps if db else np.zeros_like(np.broadcast_arrays(av, bv)[0])
    return Dual(np.where(cond, av, bv), np.where(cond, ae, be))
