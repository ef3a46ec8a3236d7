"""Pointwise chart geometry and numerical surface differential operators.

A *field* is any callable ``f(u, v) -> ndarray`` of shape ``u.shape + tail``.
Surface gradients are pulled back through the dual basis ``(g^u, g^v)`` of
``(r_u, r_v)``: ``grad_s f = f_u (x) g^u + f_v (x) g^v``.  Parameter partials
of fields come from central differences with step ``1e-4 * span`` and, by
default, one level of Richardson extrapolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import tensor3 as t3
from ..errors import ChartError, ImmersionError, NumericalError

UMBILIC_REL = 1e-7
ORTHO_TOL = 1e-9


@dataclass
class Basis:
    """Metric data of a chart at a batch of points."""

    r: np.ndarray
    ru: np.ndarray
    rv: np.ndarray
    len_u: np.ndarray
    len_v: np.ndarray
    e_u: np.ndarray
    e_v: np.ndarray
    nu: np.ndarray
    gu: np.ndarray
    gv: np.ndarray
    orth_defect: np.ndarray


def basis(chart, u, v, jet=None):
    j = jet if jet is not None else chart.jet(u, v)
    E = t3.dot(j.ru, j.ru)
    F = t3.dot(j.ru, j.rv)
    G = t3.dot(j.rv, j.rv)
    D = E * G - F * F
    if np.any(D <= 1e-24 * np.maximum(E * G, 1e-300)):
        raise ImmersionError(f"{chart!r}: r_u x r_v vanishes")
    len_u, len_v = np.sqrt(E), np.sqrt(G)
    e_u = j.ru / len_u[..., None]
    e_v = j.rv / len_v[..., None]
    nu = t3.normalize(t3.cross(j.ru, j.rv))
    gu = (G[..., None] * j.ru - F[..., None] * j.rv) / D[..., None]
    gv = (E[..., None] * j.rv - F[..., None] * j.ru) / D[..., None]
    return Basis(j.r, j.ru, j.rv, len_u, len_v, e_u, e_v, nu, gu, gv, F / (len_u * len_v))


def pullback(b, fu, fv):
    """``fu (x) g^u + fv (x) g^v`` for partials of any tail shape."""
    tail = fu.ndim - b.gu.ndim + 1
    shape = b.gu.shape[:-1] + (1,) * tail + (3,)
    return fu[..., None] * b.gu.reshape(shape) + fv[..., None] * b.gv.reshape(shape)


def partials(field, u, v, steps, richardson=True):
    """Central-difference ``(f_u, f_v)`` of a field, optionally Richardson-extrapolated."""
    hu, hv = steps

    def central(h, axis):
        if axis == 0:
            return (field(u + h, v) - field(u - h, v)) / (2.0 * h)
        return (field(u, v + h) - field(u, v - h)) / (2.0 * h)

    out = []
    for axis, h in ((0, hu), (1, hv)):
        d1 = central(h, axis)
        if richardson:
            d2 = central(2.0 * h, axis)
            d1 = (4.0 * d1 - d2) / 3.0
        out.append(d1)
    return out[0], out[1]


def _steps(chart, rel):
    return chart.fd_steps(rel)


def surface_gradient(chart, field, u, v, rel_step=1e-4, richardson=True, b=None):
    """Surface gradient of a field of any tensor rank; appends one slot."""
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    b = b if b is not None else basis(chart, u, v)
    fu, fv = partials(field, u, v, _steps(chart, rel_step), richardson)
    return pullback(b, fu, fv)


def surface_gradient_scalar(chart, f, u, v, method="auto", tol=ORTHO_TOL, **kw):
    """``grad_s f`` of a scalar field.

    ``method="orthogonal"`` uses ``(f_u/|r_u|) e_u + (f_v/|r_v|) e_v`` and
    refuses non-orthogonal charts; ``"general"`` pulls back through the
    inverse metric; ``"auto"`` picks per chart.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    b = basis(chart, u, v)
    orthogonal = bool(np.all(np.abs(b.orth_defect) <= tol))
    if method == "orthogonal" and not orthogonal:
        raise ChartError("chart is not orthogonal; use method='general'")
    fu, fv = partials(f, u, v, _steps(chart, kw.get("rel_step", 1e-4)), kw.get("richardson", True))
    if method == "general" or (method == "auto" and not orthogonal):
        return pullback(b, fu, fv)
    return (fu / b.len_u)[..., None] * b.e_u + (fv / b.len_v)[..., None] * b.e_v


def surface_gradient_vector(chart, field, u, v, **kw):
    return surface_gradient(chart, field, u, v, **kw)


def curl_from_gradient(G):
    """Axial vector of ``2 skw(G)``."""
    return t3.axial(G - t3.transpose(G), check=False)


def surface_curl(chart, field, u, v, **kw):
    return curl_from_gradient(surface_gradient(chart, field, u, v, **kw))


def surface_divergence(chart, field, u, v, **kw):
    return t3.trace(surface_gradient(chart, field, u, v, **kw))


def surface_laplacian(chart, f, u, v, **kw):
    """``div_s grad_s f`` by nested differencing."""
    return surface_divergence(chart, lambda a, c: surface_gradient(chart, f, a, c, **kw), u, v, **kw)


def normal_partials(j, nu):
    """Exact ``(nu_u, nu_v)`` from second partials of the chart."""
    n = t3.cross(j.ru, j.rv)
    ln = t3.norm(n)[..., None]
    n_u = t3.cross(j.ruu, j.rv) + t3.cross(j.ru, j.ruv)
    n_v = t3.cross(j.ruv, j.rv) + t3.cross(j.ru, j.rvv)
    nu_u = (n_u - nu * t3.dot(nu, n_u)[..., None]) / ln
    nu_v = (n_v - nu * t3.dot(nu, n_v)[..., None]) / ln
    return nu_u, nu_v


def curvature_tensor(chart, u, v, b=None, jet=None):
    """Exact curvature tensor ``grad_s nu`` (a sphere of radius R gives ``P/R``)."""
    j = jet if jet is not None else chart.jet(u, v)
    b = b if b is not None else basis(chart, u, v, jet=j)
    nu_u, nu_v = normal_partials(j, b.nu)
    return pullback(b, nu_u, nu_v)


def sym2_eig(T, t1, t2):
    """Eigen-data of a symmetric tangential tensor restricted to span(t1, t2).

    Returns ``(k_max, k_min, p_max, p_min, gap)`` with ``p_min = nu x p_max``
    for ``nu = t1 x t2`` and ``p_max`` taken in the half-plane ``p_max . t1 >= 0``
    (away from the branch line).
    """
    a = t3.dot(t1, t3.matvec(T, t1))
    c = t3.dot(t2, t3.matvec(T, t2))
    bb = 0.5 * (t3.dot(t1, t3.matvec(T, t2)) + t3.dot(t2, t3.matvec(T, t1)))
    mean = 0.5 * (a + c)
    rad = np.hypot(0.5 * (a - c), bb)
    theta = 0.5 * np.arctan2(2.0 * bb, a - c)
    ct, st = np.cos(theta)[..., None], np.sin(theta)[..., None]
    p1 = ct * t1 + st * t2
    p2 = -st * t1 + ct * t2
    if not (np.all(np.isfinite(rad)) and np.all(np.isfinite(theta))):
        raise NumericalError("eigen-decomposition of a tangential tensor failed")
    return mean + rad, mean - rad, p1, p2, 2.0 * rad


def is_umbilic(k1, k2):
    scale = np.maximum(np.maximum(np.abs(k1), np.abs(k2)), 1.0)
    return np.abs(k1 - k2) < UMBILIC_REL * scale


@dataclass
class ChartSample:
    """All pointwise geometric data of a chart; every field is batched over the sample points."""

    u: np.ndarray
    v: np.ndarray
    r: np.ndarray
    ru: np.ndarray
    rv: np.ndarray
    len_u: np.ndarray
    len_v: np.ndarray
    orth_defect: np.ndarray
    e_u: np.ndarray
    e_v: np.ndarray
    nu: np.ndarray
    P: np.ndarray
    curvature: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray
    K: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    umbilic: np.ndarray


def sample(chart, u, v):
    """Evaluate every :class:`ChartSample` field at ``(u, v)`` (scalars or arrays)."""
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    j = chart.jet(u, v)
    b = basis(chart, u, v, jet=j)
    N = curvature_tensor(chart, u, v, b=b, jet=j)
    t2 = t3.cross(b.nu, b.e_u)
    k1, k2, p1, p2, _ = sym2_eig(N, b.e_u, t2)
    umb = is_umbilic(k1, k2)
    return ChartSample(
        u=u, v=v, r=j.r, ru=j.ru, rv=j.rv,
        len_u=b.len_u, len_v=b.len_v, orth_defect=b.orth_defect,
        e_u=b.e_u, e_v=b.e_v, nu=b.nu, P=t3.projector(b.nu),
        curvature=N, k1=k1, k2=k2, H=0.5 * (k1 + k2), K=k1 * k2,
        p1=p1, p2=p2, umbilic=umb,
    )
