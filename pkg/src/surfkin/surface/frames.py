"""Moving frames ``(e1, e2, nu)`` on charts and their connectors ``(c, d1, d2)``.

A frame field is stored as an array of shape ``(..., 3, 3)`` whose rows are
``e1, e2, nu``.  Eigenvector-based frames carry a sign ambiguity, so every
frame evaluation accepts a reference frame and flips the pair ``(e1, e2)``
(a rotation by pi about nu, orientation preserved) wherever ``e1`` points
against the reference.  Finite-difference stencils always align their
samples to the frame at the stencil centre.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import tensor3 as t3
from ..errors import UmbilicError
from .calculus import basis, curvature_tensor, is_umbilic, surface_gradient, sym2_eig


def align(frame, ref):
    if ref is None:
        return frame
    flip = t3.dot(frame[..., 0, :], ref[..., 0, :]) < 0.0
    if not np.any(flip):
        return frame
    out = frame.copy()
    out[flip, 0, :] *= -1.0
    out[flip, 1, :] *= -1.0
    return out


def _pack(e1, e2, nu):
    return np.stack([e1, e2, nu], axis=-2)


class FrameSpec:
    """A rule producing a positively oriented orthonormal frame at chart points."""

    name = "frame"

    def evaluate(self, chart, u, v):
        """Return ``(frame, fallback_mask)``."""
        raise NotImplementedError  # pragma: no cover

    def field(self, chart, ref=None):
        """Callable ``(u, v) -> frame`` aligned to ``ref`` (a frame array of matching shape)."""

        def f(u, v):
            return align(self.evaluate(chart, u, v)[0], ref)

        return f

    def __call__(self, chart, u, v, ref=None):
        fr, mask = self.evaluate(chart, u, v)
        return align(fr, ref), mask


class Coordinate(FrameSpec):
    """``e1 = e_u``, ``e2 = nu x e_u`` (equal to ``e_v`` on orthogonal charts)."""

    name = "coordinate"

    def evaluate(self, chart, u, v):
        b = basis(chart, u, v)
        return _pack(b.e_u, t3.cross(b.nu, b.e_u), b.nu), np.zeros(b.nu.shape[:-1], bool)


class Principal(FrameSpec):
    """Curvature eigenframe with ``k1 >= k2``; falls back to :class:`Coordinate` at umbilics."""

    name = "principal"

    def evaluate(self, chart, u, v):
        j = chart.jet(u, v)
        b = basis(chart, u, v, jet=j)
        N = curvature_tensor(chart, u, v, b=b, jet=j)
        t2 = t3.cross(b.nu, b.e_u)
        k1, k2, p1, p2, _ = sym2_eig(N, b.e_u, t2)
        umb = is_umbilic(k1, k2)
        if np.any(umb):
            m = umb[..., None]
            p1 = np.where(m, b.e_u, p1)
            p2 = np.where(m, t2, p2)
        return _pack(p1, p2, b.nu), umb


@dataclass
class Rotated(FrameSpec):
    """``e1' = cos a e1 + sin a e2``, ``e2' = -sin a e1 + cos a e2`` over a base frame.

    ``alpha`` is a callable ``(u, v) -> angle``.
    """

    base: FrameSpec
    alpha: object
    label: str = "rotated"

    @property
    def name(self):
        return f"{self.label}({self.base.name})"

    def evaluate(self, chart, u, v):
        fr, mask = self.base.evaluate(chart, u, v)
        return rotate_frame(fr, self.alpha(np.asarray(u, float), np.asarray(v, float))), mask


def rotate_frame(frame, alpha):
    a = np.asarray(alpha, dtype=float)
    c, s = np.cos(a)[..., None], np.sin(a)[..., None]
    e1, e2, nu = frame[..., 0, :], frame[..., 1, :], frame[..., 2, :]
    return _pack(c * e1 + s * e2, -s * e1 + c * e2, nu)


def fixed(vectors_rows):
    """Frame spec from a precomputed callable ``(u, v) -> frame``; used for derived frames."""
    return _Callable(vectors_rows)


class _Callable(FrameSpec):
    name = "custom"

    def __init__(self, fn):
        self.fn = fn

    def evaluate(self, chart, u, v):
        fr = self.fn(np.asarray(u, float), np.asarray(v, float))
        return fr, np.zeros(fr.shape[:-2], bool)


def uv_angle(u, v):
    """The angle field ``alpha = u v`` used for the rotated-frame checks."""
    return u * v


@dataclass
class ConnectorSet:
    c: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    frame: np.ndarray
    fallback: np.ndarray

    @property
    def e1(self):
        return self.frame[..., 0, :]

    @property
    def e2(self):
        return self.frame[..., 1, :]

    @property
    def nu(self):
        return self.frame[..., 2, :]

    def symmetry_defect(self):
        """``d1 . e2 - d2 . e1``; vanishes because the curvature tensor is symmetric."""
        return t3.dot(self.d1, self.e2) - t3.dot(self.d2, self.e1)


def connectors(chart, frame, u, v, ref=None, strict=False, d_method="exact", **fd):
    """Connectors of ``frame`` at ``(u, v)``.

    ``c = (grad_s e1)^T e2`` is differenced numerically.  The curvature
    connectors ``d_i = (grad_s e_i)^T nu`` equal ``-(grad_s nu) e_i`` because
    ``e_i . nu = 0``; ``d_method="exact"`` uses that form with the exact
    curvature tensor, ``"fd"`` differences the frame instead.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    fr, mask = frame(chart, u, v, ref=ref)
    if strict and np.any(mask):
        raise UmbilicError(f"principal frame requested at {int(mask.sum())} umbilic point(s)")
    b = basis(chart, u, v)
    G = surface_gradient(chart, frame.field(chart, ref=fr), u, v, b=b, **fd)
    e1, e2, nu = fr[..., 0, :], fr[..., 1, :], fr[..., 2, :]
    grad_e1, grad_e2 = G[..., 0, :, :], G[..., 1, :, :]
    c = t3.matvec(t3.transpose(grad_e1), e2)
    if d_method == "fd":
        d1 = t3.matvec(t3.transpose(grad_e1), nu)
        d2 = t3.matvec(t3.transpose(grad_e2), nu)
    else:
        N = curvature_tensor(chart, u, v, b=b)
        d1 = -t3.matvec(N, e1)
        d2 = -t3.matvec(N, e2)
    return ConnectorSet(c, d1, d2, fr, mask)


def transform_connectors(cs, alpha, grad_alpha):
    """Connectors of the frame rotated by ``alpha``: ``c' = c + grad alpha``, ``d`` pair rotated."""
    a = np.asarray(alpha, dtype=float)
    ca, sa = np.cos(a)[..., None], np.sin(a)[..., None]
    return ConnectorSet(
        cs.c + grad_alpha,
        ca * cs.d1 + sa * cs.d2,
        -sa * cs.d1 + ca * cs.d2,
        rotate_frame(cs.frame, a),
        cs.fallback,
    )


def fix_continuity(vectors):
    """Sign-fix a grid of unit vectors ``(nu, nv, 3)`` by sweeping rows then columns.

    Each vector is flipped if it points against its predecessor; returns the
    flip multipliers so paired vectors can be flipped consistently.
    """
    vec = np.array(vectors, dtype=float, copy=True)
    sign = np.ones(vec.shape[:-1])
    n_u, n_v = vec.shape[:2]
    for i in range(n_u):
        if i > 0 and np.dot(vec[i, 0], vec[i - 1, 0]) < 0:
            vec[i, 0] *= -1
            sign[i, 0] *= -1
        for j in range(1, n_v):
            if np.dot(vec[i, j], vec[i, j - 1]) < 0:
                vec[i, j] *= -1
                sign[i, j] *= -1
    return vec, sign
