import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from surfkin import tensor3 as t3
from surfkin.errors import TensorError

E = np.eye(3)
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec = arrays(float, 3, elements=finite)
mat = arrays(float, (3, 3), elements=finite)
ten = arrays(float, (3, 3, 3), elements=finite)


def loop_circ_mt(A, T):
    out = np.zeros(3)
    for i, j, k in itertools.product(range(3), repeat=3):
        out[k] += A[i, j] * T[i, j, k]
    return out


def loop_circ_tm(T, A):
    out = np.zeros(3)
    for i, j, k in itertools.product(range(3), repeat=3):
        out[i] += T[i, j, k] * A[j, k]
    return out


def loop_circ_tv(T, a):
    out = np.zeros((3, 3))
    for i, j, k in itertools.product(range(3), repeat=3):
        out[i, j] += T[i, k, j] * a[k]
    return out


def triad(a, b, c):
    return np.einsum("i,j,k->ijk", a, b, c)


def test_skw2_of_identity_vanishes():
    assert np.array_equal(t3.skw2(E), np.zeros((3, 3)))


def test_axial_of_basis_skew():
    assert np.allclose(t3.axial(t3.wmat(E[2])), E[2])


@given(vec, vec)
def test_axial_of_antisymmetrised_dyad(a, b):
    # (a(x)b - b(x)a) v = (b x a) x v, checked componentwise below
    W = 2.0 * t3.skw2(np.outer(a, b))
    for v in E:
        assert np.allclose(W @ v, np.cross(np.cross(b, a), v), atol=1e-9)
    assert np.allclose(t3.axial(W), np.cross(b, a), atol=1e-9)


def test_axial_rejects_symmetric_input():
    with pytest.raises(TensorError):
        t3.axial(np.diag([1.0, 2.0, 3.0]))


def test_wmat_examples():
    assert np.array_equal(t3.wmat(np.zeros(3)), np.zeros((3, 3)))
    assert np.allclose(t3.wmat(E[0]) @ E[1], E[2])


@given(vec, vec)
def test_wmat_is_cross_product(u, v):
    assert np.allclose(t3.wmat(u) @ v, np.cross(u, v), atol=1e-9)


@given(vec)
def test_wmat_norm_and_axial_roundtrip(u):
    assert np.isclose(t3.norm2(t3.wmat(u), 2), 2.0 * u @ u)
    assert np.array_equal(t3.axial(t3.wmat(u)), u)


@given(mat)
def test_sym_skw_split(M):
    assert np.allclose(t3.sym(M) + t3.skw2(M), M)


def test_skw3_basis_triad():
    T = triad(E[0], E[1], E[2])
    assert np.allclose(t3.skw3(T), 0.5 * (T - triad(E[0], E[2], E[1])))


@given(vec, vec)
def test_skw3_symmetric_last_pair(a, b):
    assert np.allclose(t3.skw3(triad(a, b, b)), 0.0)


@given(ten)
def test_skw3_idempotent(T):
    S = t3.skw3(T)
    assert np.allclose(t3.skw3(S), S)


@settings(max_examples=50)
@given(mat, ten, vec)
def test_products_match_index_loops(A, T, a):
    assert np.allclose(t3.circ_mt(A, T), loop_circ_mt(A, T), atol=1e-12 * (1 + np.abs(A).max() * np.abs(T).max()) * 27)
    assert np.allclose(t3.circ_tm(T, A), loop_circ_tm(T, A), atol=1e-12 * (1 + np.abs(A).max() * np.abs(T).max()) * 27)
    assert np.allclose(t3.circ_tv(T, a), loop_circ_tv(T, a), atol=1e-12 * (1 + np.abs(a).max() * np.abs(T).max()) * 9)


def test_products_on_dyads_and_triads():
    rng = np.random.default_rng(1)
    a1, a2, b1, b2, b3, a = rng.normal(size=(6, 3))
    T = triad(b1, b2, b3)
    assert np.allclose(t3.circ_mt(np.outer(a1, a2), T), (a1 @ b1) * (a2 @ b2) * b3)
    assert np.allclose(t3.circ_tm(T, np.outer(a1, a2)), (a1 @ b2) * (a2 @ b3) * b1)
    assert np.allclose(t3.circ_tv(T, a), (b2 @ a) * np.outer(b1, b3))
    assert np.allclose(t3.circ_tv(T, np.zeros(3)), 0.0)


def test_identity_circ_gives_traces():
    T = np.random.default_rng(2).normal(size=(3, 3, 3))
    assert np.allclose(t3.circ_mt(E, T), np.einsum("iik->k", T))


@settings(max_examples=30)
@given(mat, mat, ten)
def test_circ_mt_bilinear(A, B, T):
    lhs = t3.circ_mt(2.0 * A - B, T)
    assert np.allclose(lhs, 2.0 * t3.circ_mt(A, T) - t3.circ_mt(B, T), atol=1e-8)


def test_projector_examples():
    P = t3.projector(E[2])
    assert np.array_equal(P @ E[2], np.zeros(3))
    assert np.array_equal(P @ E[0], E[0])


@given(vec)
def test_projector_properties(w):
    if np.linalg.norm(w) < 1e-3:
        return
    nu = w / np.linalg.norm(w)
    P = t3.projector(nu)
    assert np.isclose(np.trace(P), 2.0)
    assert np.allclose(P @ P, P, atol=1e-12)
    assert np.allclose(P, P.T)
    assert np.allclose(P @ nu, 0.0, atol=1e-12)


def test_projector_rejects_non_unit():
    with pytest.raises(TensorError):
        t3.projector(np.array([0.0, 0.0, 2.0]))


@pytest.mark.parametrize(
    "pred,M,expected",
    [
        (t3.is_symmetric, np.diag([1.0, 2.0, 3.0]), True),
        (t3.is_symmetric, t3.wmat(E[0]), False),
        (t3.is_skew, t3.wmat(E[0]), True),
        (t3.is_orthogonal, t3.rotation_about(E[1], 0.7), True),
        (t3.is_orthogonal, 2.0 * E, False),
        (t3.is_rotation, np.diag([1.0, 1.0, -1.0]), False),
    ],
)
def test_predicates(pred, M, expected):
    assert pred(M) is expected


def test_predicate_tolerance_is_explicit():
    M = E + 1e-7 * t3.wmat(E[0]) @ t3.wmat(E[1])
    assert not t3.is_symmetric(M)
    assert t3.is_symmetric(M, tol=1e-6)


def test_tangential_predicate():
    assert t3.is_tangential(t3.projector(E[2]), E[2])
    assert not t3.is_tangential(E, E[2])


@given(vec, st.floats(-3, 3))
def test_rotation_about_is_rotation_fixing_axis(w, angle):
    if np.linalg.norm(w) < 1e-3:
        return
    Q = t3.rotation_about(w, angle)
    assert t3.is_rotation(Q)
    assert np.allclose(Q @ w, w, atol=1e-9 * np.linalg.norm(w))


def test_batched_shapes():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 5, 3, 3))
    T = rng.normal(size=(4, 5, 3, 3, 3))
    assert t3.circ_mt(A, T).shape == (4, 5, 3)
    assert t3.circ_tm(T, A).shape == (4, 5, 3)
    assert t3.circ_tv(T, A[..., 0]).shape == (4, 5, 3, 3)
