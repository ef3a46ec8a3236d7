"""Vectors, second- and third-rank tensors on three-dimensional translation space.

Tensors are plain numpy arrays: vectors have shape ``(..., 3)``, second-rank
tensors ``(..., 3, 3)`` and third-rank tensors ``(..., 3, 3, 3)``.  Leading
axes are batch axes, so every routine here evaluates a whole grid at once.

Index convention: a third-rank tensor ``T[..., i, j, k]`` stores the
component along ``e_i (x) e_j (x) e_k``, i.e. the triad ``a1 (x) a2 (x) a3``
has components ``a1[i] * a2[j] * a3[k]``.  A second-rank tensor acts on a
vector through its last index, ``(A v)_i = A_ij v_j``, so ``(a (x) b) v =
(b . v) a``.
"""

from __future__ import annotations

import numpy as np

from .errors import TensorError

DEFAULT_TOL = 1e-9

EYE = np.eye(3)


def dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def norm(a):
    return np.sqrt(dot(a, a))


def cross(a, b):
    return np.cross(a, b)


def normalize(a):
    n = norm(a)
    return a / n[..., None]


def outer(a, b):
    """Dyad ``a (x) b``."""
    return a[..., :, None] * b[..., None, :]


def triad(a, b, c):
    """Triad ``a (x) b (x) c``."""
    return a[..., :, None, None] * b[..., None, :, None] * c[..., None, None, :]


def matvec(A, v):
    return np.einsum("...ij,...j->...i", A, v)


def matmul(A, B):
    return np.einsum("...ij,...jk->...ik", A, B)


def transpose(A):
    return np.swapaxes(A, -1, -2)


def trace(A):
    return np.einsum("...ii->...", A)


def norm2(T, rank):
    """Squared Frobenius norm ``|T|^2`` of a rank-``rank`` tensor field."""
    axes = tuple(range(-rank, 0))
    return np.sum(T * T, axis=axes)


def sym(M):
    return 0.5 * (M + transpose(M))


def skw2(M):
    """Skew-symmetric part ``(M - M^T)/2``."""
    return 0.5 * (M - transpose(M))


def wmat(u):
    """Skew tensor ``W(u)`` with ``W(u) v = u x v``."""
    u = np.asarray(u, dtype=float)
    W = np.zeros(u.shape[:-1] + (3, 3))
    W[..., 0, 1] = -u[..., 2]
    W[..., 0, 2] = u[..., 1]
    W[..., 1, 0] = u[..., 2]
    W[..., 1, 2] = -u[..., 0]
    W[..., 2, 0] = -u[..., 1]
    W[..., 2, 1] = u[..., 0]
    return W


def axial(W, tol=DEFAULT_TOL, check=True):
    """Axial vector ``w`` of a skew tensor, so that ``W v = w x v``.

    With ``check`` on, a symmetric part larger than ``tol`` (relative to
    ``max(1, |W|)``) raises :class:`TensorError`.
    """
    W = np.asarray(W, dtype=float)
    if check:
        s = np.sqrt(norm2(sym(W), 2))
        scale = np.maximum(1.0, np.sqrt(norm2(W, 2)))
        if np.any(s > tol * scale):
            raise TensorError("axial() of a tensor that is not skew-symmetric")
    return np.stack(
        [
            0.5 * (W[..., 2, 1] - W[..., 1, 2]),
            0.5 * (W[..., 0, 2] - W[..., 2, 0]),
            0.5 * (W[..., 1, 0] - W[..., 0, 1]),
        ],
        axis=-1,
    )


def skw3(T):
    """Skew part of a third-rank tensor in its last two slots.

    Linear extension of ``2 skw(a1 (x) a2 (x) a3) = a1 (x) a2 (x) a3 - a1 (x) a3 (x) a2``.
    """
    return 0.5 * (T - np.swapaxes(T, -1, -2))


def circ_mt(A, T):
    """``A o T = A_ij T_ijk e_k``."""
    return np.einsum("...ij,...ijk->...k", A, T)


def circ_tm(T, A):
    """``T o A = T_ijk A_jk e_i``."""
    return np.einsum("...ijk,...jk->...i", T, A)


def circ_tv(T, a):
    """``T o a = T_ikj a_k e_i (x) e_j`` (contraction on the middle slot)."""
    return np.einsum("...ikj,...k->...ij", T, a)


def projector(nu, tol=DEFAULT_TOL):
    """``P(nu) = I - nu (x) nu``; ``nu`` must be a unit vector."""
    nu = np.asarray(nu, dtype=float)
    if np.any(np.abs(norm(nu) - 1.0) > tol):
        raise TensorError("projector() needs a unit normal")
    return EYE - outer(nu, nu)


def is_symmetric(M, tol=DEFAULT_TOL):
    return bool(np.all(np.sqrt(norm2(skw2(M), 2)) <= tol))


def is_skew(M, tol=DEFAULT_TOL):
    return bool(np.all(np.sqrt(norm2(sym(M), 2)) <= tol))


def is_orthogonal(M, tol=DEFAULT_TOL):
    """``|M^T M - I| <= tol``."""
    d = matmul(transpose(M), M) - EYE
    return bool(np.all(np.sqrt(norm2(d, 2)) <= tol))


def is_rotation(M, tol=DEFAULT_TOL):
    return is_orthogonal(M, tol) and bool(np.all(np.abs(np.linalg.det(M) - 1.0) <= tol))


def is_tangential(M, nu, tol=DEFAULT_TOL):
    """True when ``M nu = 0`` (M annihilates the normal on the right)."""
    return bool(np.all(norm(matvec(M, nu)) <= tol))


def rotation_about(axis, angle):
    """Proper rotation by ``angle`` about the unit ``axis`` (right-hand rule)."""
    axis = normalize(np.asarray(axis, dtype=float))
    angle = np.asarray(angle, dtype=float)
    W = wmat(axis)
    s = np.sin(angle)[..., None, None]
    c = np.cos(angle)[..., None, None]
    return EYE + s * W + (1.0 - c) * matmul(W, W)
