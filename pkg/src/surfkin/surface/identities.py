"""Residuals of the compatibility identities linking connectors and curvature."""

from __future__ import annotations

import numpy as np

from .. import tensor3 as t3
from ..errors import ChartError, UmbilicError
from .calculus import (
    ORTHO_TOL,
    basis,
    curl_from_gradient,
    curvature_tensor,
    partials,
    sample,
    surface_gradient,
)
from .frames import connectors


def _bcast(u, v):
    return np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))


def _connector_field(chart, frame, ref, attr, **fd):
    def f(a, c):
        return getattr(connectors(chart, frame, a, c, ref=ref, **fd), attr)

    return f


def connector_curls(chart, frame, u, v, **fd):
    """Connectors at ``(u, v)`` together with ``curl_s`` of each of them."""
    u, v = _bcast(u, v)
    cs = connectors(chart, frame, u, v, **fd)
    b = basis(chart, u, v)
    curls = {}
    for name in ("c", "d1", "d2"):
        G = surface_gradient(chart, _connector_field(chart, frame, cs.frame, name, **fd), u, v, b=b, **fd)
        curls[name] = curl_from_gradient(G)
    return cs, curls


def gauss_residual(chart, frame, u, v, **fd):
    """``curl_s c . nu + K``."""
    u, v = _bcast(u, v)
    cs = connectors(chart, frame, u, v, **fd)
    G = surface_gradient(chart, _connector_field(chart, frame, cs.frame, "c", **fd), u, v, **fd)
    K = np.linalg.det(curvature_tensor(chart, u, v) + t3.outer(cs.nu, cs.nu))
    return t3.dot(curl_from_gradient(G), cs.nu) + K


def codazzi_residuals(chart, frame, u, v, **fd):
    """``(curl d1 . nu - c x d2 . nu, curl d2 . nu + c x d1 . nu)``."""
    u, v = _bcast(u, v)
    cs = connectors(chart, frame, u, v, **fd)
    b = basis(chart, u, v)
    out = []
    for name, other, sign in (("d1", cs.d2, -1.0), ("d2", cs.d1, 1.0)):
        G = surface_gradient(chart, _connector_field(chart, frame, cs.frame, name, **fd), u, v, b=b, **fd)
        out.append(t3.dot(curl_from_gradient(G), cs.nu) + sign * t3.dot(t3.cross(cs.c, other), cs.nu))
    return out[0], out[1]


def principal_codazzi_residuals(chart, frame, u, v, **fd):
    """``e2 . grad k1 - (k1 - k2) e1 . c`` and ``e1 . grad k2 - (k1 - k2) e2 . c``.

    Only meaningful in the curvature eigenframe; umbilic points raise.
    """
    u, v = _bcast(u, v)
    s = sample(chart, u, v)
    if np.any(s.umbilic):
        raise UmbilicError("principal-frame Codazzi form is undefined at umbilics")
    cs = connectors(chart, frame, u, v, **fd)
    gk1 = surface_gradient(chart, lambda a, c: sample(chart, a, c).k1, u, v, **fd)
    gk2 = surface_gradient(chart, lambda a, c: sample(chart, a, c).k2, u, v, **fd)
    gap = s.k1 - s.k2
    r1 = t3.dot(cs.e2, gk1) - gap * t3.dot(cs.e1, cs.c)
    r2 = t3.dot(cs.e1, gk2) - gap * t3.dot(cs.e2, cs.c)
    return r1, r2


def full_frame_compatibility(chart, frame, u, v, **fd):
    """Residual vectors of the three identities linking all connectors.

    ``curl c + d1 x d2 - (c1 d1 + c2 d2) x nu``,
    ``curl d1 - c x d2 - (d11 d1 + d12 d2) x nu``,
    ``curl d2 + c x d1 - (d21 d1 + d22 d2) x nu``,
    with components taken in the frame ``(e1, e2)``.
    """
    cs, curls = connector_curls(chart, frame, u, v, **fd)
    e1, e2, nu = cs.e1, cs.e2, cs.nu

    def comb(w):
        a1 = t3.dot(w, e1)[..., None]
        a2 = t3.dot(w, e2)[..., None]
        return t3.cross(a1 * cs.d1 + a2 * cs.d2, nu)

    r_c = curls["c"] + t3.cross(cs.d1, cs.d2) - comb(cs.c)
    r_1 = curls["d1"] - t3.cross(cs.c, cs.d2) - comb(cs.d1)
    r_2 = curls["d2"] + t3.cross(cs.c, cs.d1) - comb(cs.d2)
    return r_c, r_1, r_2


def _check_orthogonal(chart, u, v, tol):
    b = basis(chart, u, v)
    worst = float(np.max(np.abs(b.orth_defect))) if b.orth_defect.size else 0.0
    if worst > tol:
        raise ChartError(f"chart is not orthogonal (defect {worst:.3g} > {tol:g})")
    return b


def metric_gaussian_curvature(chart, u, v, tol=ORTHO_TOL, rel_step=1e-4, richardson=True):
    """Gaussian curvature from the metric elements ``|r_u|, |r_v|`` of an orthogonal chart.

    ``K = -[d_u(d_u|r_v| / |r_u|) + d_v(d_v|r_u| / |r_v|)] / (|r_u| |r_v|)``,
    with the inner derivatives exact and the outer ones differenced.
    """
    u, v = _bcast(u, v)
    b = _check_orthogonal(chart, u, v, tol)

    def flux_u(a, c):
        j = chart.jet(a, c)
        lu = t3.norm(j.ru)
        lv = t3.norm(j.rv)
        return t3.dot(j.rv, j.ruv) / lv / lu

    def flux_v(a, c):
        j = chart.jet(a, c)
        lu = t3.norm(j.ru)
        lv = t3.norm(j.rv)
        return t3.dot(j.ru, j.ruv) / lu / lv

    steps = chart.fd_steps(rel_step)
    du, _ = partials(flux_u, u, v, steps, richardson)
    _, dv = partials(flux_v, u, v, steps, richardson)
    return -(du + dv) / (b.len_u * b.len_v)


def alternative_gaussian_curvature(chart, frame, u, v, **fd):
    """``K = e2 . grad(c . e1) - e1 . grad(c . e2) - (c . e1)^2 - (c . e2)^2``."""
    u, v = _bcast(u, v)
    cs = connectors(chart, frame, u, v, **fd)

    def comp(k):
        def f(a, c):
            s = connectors(chart, frame, a, c, ref=cs.frame, **fd)
            return t3.dot(s.c, s.frame[..., k, :])

        return f

    g1 = surface_gradient(chart, comp(0), u, v, **fd)
    g2 = surface_gradient(chart, comp(1), u, v, **fd)
    c1 = t3.dot(cs.c, cs.e1)
    c2 = t3.dot(cs.c, cs.e2)
    return t3.dot(cs.e2, g1) - t3.dot(cs.e1, g2) - c1 * c1 - c2 * c2


def scalar_integrability_residual(chart, f, u, v, **fd):
    """``|skw(grad_s f) - skw((grad_s nu) f (x) nu)|`` for a tangential field ``f``."""
    u, v = _bcast(u, v)
    b = basis(chart, u, v)
    G = surface_gradient(chart, f, u, v, b=b, **fd)
    N = curvature_tensor(chart, u, v, b=b)
    R = t3.skw2(G) - t3.skw2(t3.outer(t3.matvec(N, f(u, v)), b.nu))
    return np.sqrt(t3.norm2(R, 2))


def vector_integrability_residual(chart, F, u, v, **fd):
    """``|skw(grad_s F) - skw(F (grad_s nu) (x) nu)|`` for a tensor field with ``F nu = 0``."""
    u, v = _bcast(u, v)
    b = basis(chart, u, v)
    G = surface_gradient(chart, F, u, v, b=b, **fd)
    N = curvature_tensor(chart, u, v, b=b)
    FN = t3.matmul(F(u, v), N)
    R = t3.skw3(G) - t3.skw3(FN[..., :, :, None] * b.nu[..., None, None, :])
    return np.sqrt(t3.norm2(R, 3))


def frame_gradient_integrability(chart, frame, u, v, **fd):
    """Vector integrability residual of ``F = grad_s e1`` for a moving frame."""
    u, v = _bcast(u, v)
    ref, _ = frame(chart, u, v)

    def grad_e1(a, c):
        fr_here, _ = frame(chart, a, c, ref=ref)
        G = surface_gradient(chart, frame.field(chart, ref=fr_here), a, c, **fd)
        return G[..., 0, :, :]

    return vector_integrability_residual(chart, grad_e1, u, v, **fd)
