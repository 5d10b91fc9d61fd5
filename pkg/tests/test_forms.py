"""Graded exterior-algebra oracles: signs, wedges, exponentials, supertraces."""

import math

import numpy as np
import pytest

from oddchern.forms import (GradedMatrixForm, SQRT_2PI_I, bit_indices,
                            nilpotent_exp, normalize_2pi, power_odd,
                            shuffle_sign, supertrace_matrix)


def perm_sign_oracle(seq):
    """Permutation parity via the determinant of the permutation matrix."""
    n = len(seq)
    order = np.argsort(seq)
    mat = np.zeros((n, n))
    mat[np.arange(n), order] = 1.0
    return int(round(np.linalg.det(mat)))


def test_bit_indices_roundtrip():
    for mask in range(64):
        idx = list(bit_indices(mask))
        assert sum(1 << i for i in idx) == mask
        assert idx == sorted(idx)


def test_shuffle_sign_vs_permutation_determinant():
    # Exhaustive over all disjoint mask pairs in dimension 5.
    for a in range(32):
        for b in range(32):
            if a & b or a == 0 or b == 0:
                continue
            seq = list(bit_indices(a)) + list(bit_indices(b))
            assert shuffle_sign(a, b) == perm_sign_oracle(seq), (a, b)


def test_shuffle_sign_graded_antisymmetry():
    for a in range(32):
        for b in range(32):
            if a & b or a == 0 or b == 0:
                continue
            pa, pb = bin(a).count("1"), bin(b).count("1")
            assert shuffle_sign(a, b) * shuffle_sign(b, a) == (-1) ** (pa * pb)


def random_form(rng, dim, size, npts, masks):
    form = GradedMatrixForm(dim, size, npts)
    for m in masks:
        form.comps[m] = rng.standard_normal((npts, size, size)) \
            + 1j * rng.standard_normal((npts, size, size))
    return form


def brute_wedge(fa, fb):
    """Reference wedge: sort concatenated indices, sign from the permutation."""
    dim, size, npts = fa.dim, fa.size, fa.npts
    out = GradedMatrixForm(dim, size, npts)
    for ma, A in enumerate(fa.comps):
        if A is None:
            continue
        for mb, B in enumerate(fb.comps):
            if B is None or (ma & mb):
                continue
            seq = list(bit_indices(ma)) + list(bit_indices(mb))
            term = perm_sign_oracle(seq) * (A @ B)
            if out.comps[ma | mb] is None:
                out.comps[ma | mb] = term
            else:
                out.comps[ma | mb] = out.comps[ma | mb] + term
    return out


def assert_forms_close(a, b, tol=1e-12):
    assert a.dim == b.dim
    for m in range(2 ** a.dim):
        ca, cb = a.comps[m], b.comps[m]
        if ca is None and cb is None:
            continue
        ca = 0.0 if ca is None else ca
        cb = 0.0 if cb is None else cb
        assert np.abs(ca - cb).max() < tol, f"mask {m}"


def test_wedge_against_brute_force():
    rng = np.random.default_rng(7)
    for dim in (2, 3, 4):
        fa = random_form(rng, dim, 2, 5, range(0, 2 ** dim, 1))
        fb = random_form(rng, dim, 2, 5, range(0, 2 ** dim, 2))
        assert_forms_close(fa.wedge(fb), brute_wedge(fa, fb))


def test_wedge_associative():
    rng = np.random.default_rng(8)
    a = random_form(rng, 3, 2, 4, (1, 3, 5))
    b = random_form(rng, 3, 2, 4, (2, 4))
    c = random_form(rng, 3, 2, 4, (1, 6))
    assert_forms_close(a.wedge(b).wedge(c), a.wedge(b.wedge(c)), tol=1e-10)


def test_scalar_one_forms_anticommute():
    rng = np.random.default_rng(9)
    a = random_form(rng, 3, 1, 6, (1, 2, 4))
    b = random_form(rng, 3, 1, 6, (1, 2, 4))
    assert_forms_close(a.wedge(b), b.wedge(a).scale(-1.0), tol=1e-12)


def test_power_odd_matches_wedge_power():
    rng = np.random.default_rng(10)
    w = random_form(rng, 3, 2, 4, (1, 2, 4))  # matrix-valued 1-form
    for m in (1, 3):
        assert_forms_close(power_odd(w, m), w.wedge_power(m), tol=1e-10)


def test_nilpotent_exp_matches_series():
    rng = np.random.default_rng(11)
    w = random_form(rng, 4, 2, 3, (3, 5, 9, 6, 7))  # no degree-0 part
    for scale in (1.0, -2.5):
        expected = GradedMatrixForm.identity(4, 2, 3)
        for k in range(1, 5):
            expected = expected + w.wedge_power(k).scale(scale ** k / math.factorial(k))
        assert_forms_close(nilpotent_exp(w, scale), expected, tol=1e-10)


def test_nilpotent_exp_rejects_degree_zero():
    rng = np.random.default_rng(12)
    w = random_form(rng, 2, 2, 3, (0, 1))
    with pytest.raises(ValueError):
        nilpotent_exp(w)


def test_trace_graded_cyclic():
    rng = np.random.default_rng(13)
    for pa, ma in ((1, (1, 2)), (2, (3, 5))):
        for pb, mb in ((1, (4,)), (2, (6,))):
            a = random_form(rng, 3, 2, 4, ma)
            b = random_form(rng, 3, 2, 4, mb)
            lhs = a.wedge(b).trace()
            rhs = b.wedge(a).trace().scale((-1.0) ** (pa * pb))
            assert_forms_close(lhs, rhs, tol=1e-10)


def test_supertrace_matrix_kills_even_commutators():
    rng = np.random.default_rng(14)
    rank = 2
    # Even (block-diagonal) endomorphisms: str([a, b]) = 0.
    def even(r):
        m = np.zeros((2 * rank, 2 * rank), dtype=complex)
        m[:rank, :rank] = r.standard_normal((rank, rank))
        m[rank:, rank:] = r.standard_normal((rank, rank))
        return m

    a, b = even(rng), even(rng)
    comm = a @ b - b @ a
    assert abs(supertrace_matrix(comm[None], rank)[0]) < 1e-12


def test_supertrace_form_is_signed_block_trace():
    rng = np.random.default_rng(15)
    rank = 2
    w = random_form(rng, 2, 2 * rank, 3, (0, 1, 2, 3))
    st = w.supertrace(rank)
    grading = np.diag([1.0, 1.0, -1.0, -1.0])
    for m in range(4):
        expected = np.trace(grading @ w.comps[m], axis1=-2, axis2=-1)
        assert np.abs(st.comps[m][:, 0, 0] - expected).max() < 1e-12


def test_normalize_2pi_scales_by_half_degree():
    rng = np.random.default_rng(16)
    w = random_form(rng, 3, 1, 2, (1, 3, 7))
    out = normalize_2pi(w)
    for m in (1, 3, 7):
        d = bin(m).count("1")
        expected = w.comps[m] / SQRT_2PI_I ** d
        assert np.abs(out.comps[m] - expected).max() < 1e-12
    assert abs(SQRT_2PI_I ** 2 - 2j * np.pi) < 1e-12
