"""Deformations of charted surfaces and their kinematic decompositions.

A deformation ``y`` of a chart is evaluated in the chart parameters and
returns the image jet ``(y, y_u, y_v, y_uu, y_uv, y_vv)``.  From it follow
the surface deformation gradient ``F = y_u (x) g^u + y_v (x) g^v``, its
polar decomposition ``F = R U = V R``, the invariant rotation gradient
``H = R^T grad_s R`` with its a-vector representation
``H = W(b1) (x) a1 + W(b2) (x) a2 + W(nu) (x) a3`` and the pure deformation
measures ``(w_s, w_d, w_b)``.

The rotation field is differentiated entrywise by finite differences.  The
polar rotation is unique wherever ``F`` has full tangent rank, so the matrix
entries are smooth and carry no sign ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from . import tensor3 as t3
from .errors import DegenerateDeformation, InternalConsistencyError, NumericalError
from .surface.calculus import basis, curvature_tensor, partials, sample, surface_gradient, sym2_eig
from .surface.charts import Chart, Jet
from .surface.frames import Coordinate, FrameSpec, Principal, align, connectors

STRETCH_DEGENERACY = 1e-7
MIN_STRETCH = 1e-12
CONSISTENCY_TOL = 1e-6


def _bcast(u, v):
    return np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))


# ---------------------------------------------------------------------------
# deformations


class Deformation:
    """A map of the surface of ``chart`` into space, evaluated in chart parameters."""

    kind = "custom"
    provenance = "closed-form"

    def __init__(self, chart):
        self.chart = chart

    def __repr__(self):
        return f"{type(self).__name__}({self.chart!r})"

    def jet(self, u, v):
        u, v = _bcast(u, v)
        return self._jet(u, v)

    def point(self, u, v):
        return self.jet(u, v).r

    def image_chart(self):
        """The image surface as a chart over the same parameter domain."""
        return ImageChart(self)

    def _jet(self, u, v):  # pragma: no cover - abstract
        raise NotImplementedError


class ImageChart(Chart):
    kind = "image"

    def __init__(self, deformation):
        super().__init__(deformation.chart.domain, {"deformation": deformation.kind})
        self.deformation = deformation

    def _jet(self, u, v):
        return self.deformation.jet(u, v)


class Identity(Deformation):
    kind = "identity"

    def _jet(self, u, v):
        return self.chart.jet(u, v)


class Affine(Deformation):
    """``y = A y_inner + t`` for a constant matrix ``A``; composes with any deformation."""

    provenance = "composed"

    def __init__(self, inner, A, t=None, kind="affine"):
        super().__init__(inner.chart)
        self.inner = inner
        self.A = np.asarray(A, dtype=float)
        self.t = np.zeros(3) if t is None else np.asarray(t, dtype=float)
        self.kind = kind

    def _jet(self, u, v):
        j = self.inner.jet(u, v)

        def lin(x):
            return t3.matvec(self.A, x)

        return Jet(lin(j.r) + self.t, lin(j.ru), lin(j.rv), lin(j.ruu), lin(j.ruv), lin(j.rvv))


def uniform_rotation(chart_or_def, Q, t=None):
    inner = chart_or_def if isinstance(chart_or_def, Deformation) else Identity(chart_or_def)
    return Affine(inner, Q, t, kind="rotation")


def scaling(chart_or_def, s):
    inner = chart_or_def if isinstance(chart_or_def, Deformation) else Identity(chart_or_def)
    return Affine(inner, float(s) * np.eye(3), kind="scaling")


class AmbientMap(Deformation):
    """Restriction to the surface of a smooth map ``g`` of space.

    ``g(x)`` returns ``(y, J, Hs)`` with ``J[..., i, a] = dy_i/dx_a`` and
    ``Hs[..., i, a, b] = d2y_i/dx_a dx_b``.
    """

    def __init__(self, chart, g, kind="ambient"):
        super().__init__(chart)
        self.g = g
        self.kind = kind

    def _jet(self, u, v):
        j = self.chart.jet(u, v)
        y, J, Hs = self.g(j.r)

        def d2(a, b):
            return np.einsum("...iab,...a,...b->...i", Hs, a, b)

        return Jet(
            y,
            t3.matvec(J, j.ru),
            t3.matvec(J, j.rv),
            d2(j.ru, j.ru) + t3.matvec(J, j.ruu),
            d2(j.ru, j.rv) + t3.matvec(J, j.ruv),
            d2(j.rv, j.rv) + t3.matvec(J, j.rvv),
        )


def _complex_square(x):
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    z, o = np.zeros_like(x1), np.ones_like(x1)
    y = np.stack([x1 * x1 - x2 * x2, 2.0 * x1 * x2, x3], axis=-1)
    J = np.stack(
        [np.stack([2 * x1, -2 * x2, z], -1), np.stack([2 * x2, 2 * x1, z], -1), np.stack([z, z, o], -1)], -2
    )
    Hs = np.zeros(x.shape[:-1] + (3, 3, 3))
    Hs[..., 0, 0, 0] = 2.0
    Hs[..., 0, 1, 1] = -2.0
    Hs[..., 1, 0, 1] = 2.0
    Hs[..., 1, 1, 0] = 2.0
    return y, J, Hs


def conformal_square(chart):
    """``(x1, x2) -> (x1^2 - x2^2, 2 x1 x2)`` on a planar chart; conformal with ``lambda = 2 r``."""
    return AmbientMap(chart, _complex_square, kind="conformal-square")


def twist(chart, rate):
    """``y = Rz(rate * x3) x``: a height-dependent rotation about the z axis.

    Maps spheres centred at the origin onto themselves but is not an isometry.
    """
    k = float(rate)

    def g(x):
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        c, s = np.cos(k * x3), np.sin(k * x3)
        y1, y2 = c * x1 - s * x2, s * x1 + c * x2
        z, o = np.zeros_like(x1), np.ones_like(x1)
        y = np.stack([y1, y2, x3], axis=-1)
        J = np.stack(
            [np.stack([c, -s, -k * y2], -1), np.stack([s, c, k * y1], -1), np.stack([z, z, o], -1)], -2
        )
        Hs = np.zeros(x.shape[:-1] + (3, 3, 3))
        Hs[..., 0, 0, 2] = Hs[..., 0, 2, 0] = -k * s
        Hs[..., 0, 1, 2] = Hs[..., 0, 2, 1] = -k * c
        Hs[..., 0, 2, 2] = -k * k * y1
        Hs[..., 1, 0, 2] = Hs[..., 1, 2, 0] = k * c
        Hs[..., 1, 1, 2] = Hs[..., 1, 2, 1] = -k * s
        Hs[..., 1, 2, 2] = -k * k * y2
        return y, J, Hs

    return AmbientMap(chart, g, kind="twist")


class NumericDeformation(Deformation):
    """Deformation known only through its values; partials by Richardson-extrapolated differences."""

    provenance = "numeric"

    def __init__(self, chart, fn, kind="numeric", rel_step=1e-3):
        super().__init__(chart)
        self.fn = fn
        self.kind = kind
        self.rel_step = rel_step

    def _jet(self, u, v):
        steps = self.chart.fd_steps(self.rel_step)
        yu, yv = partials(self.fn, u, v, steps)

        def first(a, c):
            return np.stack(partials(self.fn, a, c, steps), axis=0)

        du, dv = partials(first, u, v, steps)
        return Jet(self.fn(u, v), yu, yv, du[0], 0.5 * (du[1] + dv[0]), dv[1])


# ---------------------------------------------------------------------------
# pointwise decompositions


def deformation_gradient(deformation, u, v, b=None, jet=None):
    """``F = grad_s y`` at ``(u, v)``; raises if ``F`` is rank deficient on the tangent plane."""
    u, v = _bcast(u, v)
    b = b if b is not None else basis(deformation.chart, u, v)
    j = jet if jet is not None else deformation.jet(u, v)
    F = t3.outer(j.ru, b.gu) + t3.outer(j.rv, b.gv)
    area = t3.norm(t3.cross(j.ru, j.rv)) / t3.norm(t3.cross(b.ru, b.rv))
    if np.any(~np.isfinite(area)) or np.any(area < MIN_STRETCH**2):
        raise DegenerateDeformation("deformation gradient is rank deficient on the tangent plane")
    return F


def cauchy_green(F):
    """Right and left Cauchy-Green tensors ``(F^T F, F F^T)``."""
    return t3.matmul(t3.transpose(F), F), t3.matmul(F, t3.transpose(F))


def _tangent_pair(nu):
    """Some orthonormal ``(t1, t2)`` with ``t1 x t2 = nu``."""
    k = np.argmin(np.abs(nu), axis=-1)
    seed = np.eye(3)[k]
    t1 = t3.normalize(seed - t3.dot(seed, nu)[..., None] * nu)
    return t1, t3.cross(nu, t1)


@dataclass
class Polar:
    R: np.ndarray
    U: np.ndarray
    V: np.ndarray
    lam1: np.ndarray
    lam2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    nu_star: np.ndarray
    degenerate: np.ndarray

    @property
    def U_inv(self):
        """Inverse of ``U`` on the tangent plane (zero on the normal)."""
        return t3.outer(self.u1, self.u1) / self.lam1[..., None, None] + t3.outer(
            self.u2, self.u2
        ) / self.lam2[..., None, None]


def surface_polar(F, nu, t1=None):
    """Polar decomposition ``F = R U = V R`` of a tangential surface gradient.

    ``U`` is the square root of ``F^T F`` on the tangent plane, ``(u1, u2)`` its
    eigenvectors with ``lam1 >= lam2`` and ``u1 x u2 = nu``, ``v_i = F u_i / lam_i`` (``v2`` taken as ``nu* x v1``)
    and ``R = F U^+ + nu* (x) nu``.  ``degenerate`` flags points where the
    principal stretches coincide, so that ``(u1, u2)`` is arbitrary.
    """
    F = np.asarray(F, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if t1 is None:
        t1, t2 = _tangent_pair(nu)
    else:
        t2 = t3.cross(nu, t1)
    C = t3.matmul(t3.transpose(F), F)
    l1s, l2s, u1, u2, _ = sym2_eig(C, t1, t2)
    if np.any(l2s < MIN_STRETCH**2):
        raise DegenerateDeformation(f"smallest principal stretch below {MIN_STRETCH:g}")
    lam1, lam2 = np.sqrt(l1s), np.sqrt(l2s)
    # v2 from the image normal keeps R orthogonal when lam2 << lam1
    v1 = t3.normalize(t3.matvec(F, u1))
    nu_star = t3.normalize(t3.cross(t3.matvec(F, t1), t3.matvec(F, t2)))
    v1 = t3.normalize(v1 - t3.dot(v1, nu_star)[..., None] * nu_star)
    v2 = t3.cross(nu_star, v1)
    R = t3.outer(v1, u1) + t3.outer(v2, u2) + t3.outer(nu_star, nu)
    U = lam1[..., None, None] * t3.outer(u1, u1) + lam2[..., None, None] * t3.outer(u2, u2)
    V = lam1[..., None, None] * t3.outer(v1, v1) + lam2[..., None, None] * t3.outer(v2, v2)
    deg = np.abs(lam1 - lam2) < STRETCH_DEGENERACY * np.maximum(lam1, 1.0)
    return Polar(R, U, V, lam1, lam2, u1, u2, v1, v2, nu_star, deg)


@dataclass
class DeformationSample:
    """Deformation gradient and its decompositions at a batch of points."""

    u: np.ndarray
    v: np.ndarray
    nu: np.ndarray
    F: np.ndarray
    C: np.ndarray
    B: np.ndarray
    R: np.ndarray
    U: np.ndarray
    V: np.ndarray
    lam1: np.ndarray
    lam2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    nu_star: np.ndarray
    stretch_degenerate: np.ndarray
    deformation: object = field(default=None, repr=False)

    @property
    def det_U(self):
        return self.lam1 * self.lam2

    @property
    def U_inv(self):
        return t3.outer(self.u1, self.u1) / self.lam1[..., None, None] + t3.outer(
            self.u2, self.u2
        ) / self.lam2[..., None, None]


def deformation_sample(deformation, u, v):
    u, v = _bcast(u, v)
    b = basis(deformation.chart, u, v)
    F = deformation_gradient(deformation, u, v, b=b)
    C, B = cauchy_green(F)
    p = surface_polar(F, b.nu, t1=b.e_u)
    return DeformationSample(
        u, v, b.nu, F, C, B, p.R, p.U, p.V, p.lam1, p.lam2, p.u1, p.u2, p.v1, p.v2,
        p.nu_star, p.degenerate, deformation,
    )


class StretchFrame(FrameSpec):
    """Principal stretching frame ``(u1, u2, nu)`` of a deformation.

    Where the stretches coincide every tangent frame is principal; there the
    coordinate frame is used instead and the point is flagged.
    """

    name = "stretch"

    def __init__(self, deformation):
        self.deformation = deformation

    def evaluate(self, chart, u, v):
        s = deformation_sample(self.deformation, u, v)
        b = basis(chart, u, v)
        deg = s.stretch_degenerate
        e1, e2 = s.u1, s.u2
        if np.any(deg):
            m = deg[..., None]
            e1 = np.where(m, b.e_u, e1)
            e2 = np.where(m, t3.cross(b.nu, b.e_u), e2)
        return np.stack([e1, e2, b.nu], axis=-2), deg


def resolve_frame(deformation, frame):
    if isinstance(frame, FrameSpec):
        return frame
    if frame == "stretch":
        return StretchFrame(deformation)
    if frame == "coordinate":
        return Coordinate()
    if frame == "principal":
        return Principal()
    raise ValueError(f"unknown frame {frame!r}")


# ---------------------------------------------------------------------------
# rotation gradient


def rotation_field(deformation, perturbation=None):
    """Callable ``(u, v) -> R``; ``perturbation(u, v)`` (a rotation) multiplies on the right."""

    def f(a, c):
        s = deformation_sample(deformation, a, c)
        R = s.R
        if perturbation is not None:
            R = t3.matmul(R, perturbation(a, c))
        return R

    return f


def drilling_perturbation(chart, eps=0.3, g=None):
    """Rotation about the source normal by ``eps * g(u, v)`` (default ``g = u v``)."""
    g = g or (lambda a, c: a * c)

    def q(a, c):
        nu = basis(chart, a, c).nu
        return t3.rotation_about(nu, eps * g(a, c))

    return q


@dataclass
class RotationGradient:
    """``H = R^T grad_s R`` and its a-vectors in the basis ``(b1, b2, nu)``."""

    H: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    frame: np.ndarray
    fallback: np.ndarray
    frame_spec: object = field(default=None, repr=False)

    def reconstruct(self):
        fr = self.frame
        return sum(
            t3.wmat(fr[..., i, :])[..., :, :, None] * a[..., None, None, :]
            for i, a in enumerate((self.a1, self.a2, self.a3))
        )

    def reconstruction_error(self):
        return np.sqrt(t3.norm2(self.H - self.reconstruct(), 3))


def a_vectors(H, frame):
    """``a_i = W(b_i) o H / 2`` for the rows ``b_i`` of ``frame``."""
    return tuple(0.5 * t3.circ_mt(t3.wmat(frame[..., i, :]), H) for i in range(3))


def rotation_gradient(deformation, u, v, frame="stretch", perturbation=None, rel_step=1e-4, richardson=True):
    """Invariant rotation gradient with its a-vectors.

    ``frame`` selects the representation basis: ``"stretch"`` (default),
    ``"coordinate"``, ``"principal"`` or any :class:`FrameSpec`.
    """
    u, v = _bcast(u, v)
    chart = deformation.chart
    R = rotation_field(deformation, perturbation)
    G = surface_gradient(chart, R, u, v, rel_step=rel_step, richardson=richardson)
    H = np.einsum("...hi,...hjk->...ijk", R(u, v), G)
    spec = resolve_frame(deformation, frame)
    fr, mask = spec(chart, u, v)
    a1, a2, a3 = a_vectors(H, fr)
    return RotationGradient(H, a1, a2, a3, fr, mask, spec)


# ---------------------------------------------------------------------------
# Rodrigues split


@dataclass
class Contents:
    """Rodrigues vector ``a`` of ``R``, its normal component and the drilling/bending contents."""

    a: np.ndarray
    a_nu: np.ndarray
    d: np.ndarray
    b: np.ndarray
    finite: np.ndarray


def _quat(R):
    shape = R.shape[:-2]
    q = Rotation.from_matrix(R.reshape(-1, 3, 3)).as_quat(canonical=True)
    q = q.reshape(shape + (4,))
    return q[..., :3], q[..., 3]


def _from_quat(x, w):
    shape = w.shape
    q = np.concatenate([x, w[..., None]], axis=-1).reshape(-1, 4)
    return Rotation.from_quat(q).as_matrix().reshape(shape + (3, 3))


def rodrigues_split(R, nu, tol=1e-12):
    """``R = R_b R_d`` with ``R_d`` about ``nu`` and ``R_b`` about a tangential axis.

    The split is computed from unit quaternions, so it stays defined when
    ``1 + tr R`` vanishes; the Rodrigues vectors are then reported as
    non-finite and ``Contents.finite`` is false.
    """
    R = np.asarray(R, dtype=float)
    nu = np.asarray(nu, dtype=float)
    x, w = _quat(R)
    xn = t3.dot(x, nu)
    cb = np.hypot(w, xn)
    safe = cb > tol
    cd = np.where(safe, w / np.where(safe, cb, 1.0), 1.0)
    sd = np.where(safe, xn / np.where(safe, cb, 1.0), 0.0)
    Rd = _from_quat(sd[..., None] * nu, cd)
    Rb = t3.matmul(R, t3.transpose(Rd))
    xb, wb = _quat(Rb)

    finite = (1.0 + t3.trace(R)) > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(finite[..., None], x / w[..., None], np.inf)
        d = np.where((np.abs(cd) > tol)[..., None], (sd / cd)[..., None] * nu, np.inf)
        b = np.where((np.abs(wb) > tol)[..., None], xb / wb[..., None], np.inf)
    a_nu = np.where(finite, t3.dot(np.where(finite[..., None], a, 0.0), nu), np.inf)
    return Rd, Rb, Contents(a, a_nu, d, b, finite)


def bending_content_formula(a, nu):
    """``b = (I + a_nu W(nu)) P(nu) a / (1 + a_nu^2)`` from the Rodrigues vector ``a`` of ``R``.

    Follows from composing Rodrigues vectors, ``a = b + d + b x d`` with
    ``d = a_nu nu`` and ``b . nu = 0``.
    """
    a_nu = t3.dot(a, nu)
    Pa = a - a_nu[..., None] * nu
    return (Pa + a_nu[..., None] * t3.cross(nu, Pa)) / (1.0 + a_nu * a_nu)[..., None]


# ---------------------------------------------------------------------------
# image connectors, energies and integrability


@dataclass
class ImageConnectors:
    """Connectors of the image frame ``(R b1, R b2, nu*)`` from both routes."""

    c: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    direct_c: np.ndarray = None
    direct_d1: np.ndarray = None
    direct_d2: np.ndarray = None

    def route_defect(self):
        if self.direct_c is None:
            return np.zeros(self.c.shape[:-1])
        return np.max(
            np.stack([t3.norm(self.c - self.direct_c), t3.norm(self.d1 - self.direct_d1), t3.norm(self.d2 - self.direct_d2)]),
            axis=0,
        )


def source_connectors(ds, rg, **fd):
    """Connectors of the frame used by ``rg`` on the source chart."""
    return connectors(ds.deformation.chart, rg.frame_spec, ds.u, ds.v, ref=rg.frame, **fd)


def direct_image_connectors(ds, rg, **fd):
    """Differentiate the image frame ``v_i = R b_i`` directly.

    ``c* = R U^-1 (grad_s v1)^T v2`` and ``d_i* = R U^-1 (grad_s v_i)^T nu*``,
    since ``grad_s v = (grad*_s v) F``.
    """
    deformation = ds.deformation
    chart = deformation.chart
    spec = rg.frame_spec

    def image_frame(a, c):
        s = deformation_sample(deformation, a, c)
        fr, _ = spec(chart, a, c)
        fr = align(fr, rg.frame) if fr.shape == rg.frame.shape else fr
        v1 = t3.matvec(s.R, fr[..., 0, :])
        v2 = t3.matvec(s.R, fr[..., 1, :])
        return np.stack([v1, v2, s.nu_star], axis=-2)

    G = surface_gradient(chart, image_frame, ds.u, ds.v, **fd)
    here = image_frame(ds.u, ds.v)
    M = t3.matmul(ds.R, ds.U_inv)

    def conn(i, target):
        return t3.matvec(M, t3.matvec(t3.transpose(G[..., i, :, :]), target))

    return conn(0, here[..., 1, :]), conn(0, here[..., 2, :]), conn(1, here[..., 2, :])


def image_connectors(ds, rg, cs, direct=True, **fd):
    """``V c* = R(c + a3)``, ``V d1* = R(d1 - a2)``, ``V d2* = R(d2 + a1)``."""
    M = t3.matmul(ds.R, ds.U_inv)
    c = t3.matvec(M, cs.c + rg.a3)
    d1 = t3.matvec(M, cs.d1 - rg.a2)
    d2 = t3.matvec(M, cs.d2 + rg.a1)
    if not direct:
        return ImageConnectors(c, d1, d2)
    dc, dd1, dd2 = direct_image_connectors(ds, rg, **fd)
    return ImageConnectors(c, d1, d2, dc, dd1, dd2)


def image_curvature_tensor(ic, rg, ds):
    """``grad*_s nu* = -(d1* (x) v1 + d2* (x) v2)`` in the image frame."""
    v1 = t3.matvec(ds.R, rg.frame[..., 0, :])
    v2 = t3.matvec(ds.R, rg.frame[..., 1, :])
    return -(t3.outer(ic.d1, v1) + t3.outer(ic.d2, v2))


def image_gaussian_curvature(ds, rg, K, cs):
    """``K* = [K + (a1 x a2 - a1 x d1 - a2 x d2) . nu] / det U``."""
    det_u = ds.det_U
    if np.any(det_u < MIN_STRETCH):
        raise DegenerateDeformation("det U vanishes")
    nu = ds.nu
    m = t3.cross(rg.a1, rg.a2) - t3.cross(rg.a1, cs.d1) - t3.cross(rg.a2, cs.d2)
    return (K + t3.dot(m, nu)) / det_u


def direct_image_gaussian_curvature(deformation, u, v):
    """Gaussian curvature of the image chart, independent of the kinematic route."""
    return sample(deformation.image_chart(), u, v).K


@dataclass
class EnergyDensities:
    w_s: np.ndarray
    w_d: np.ndarray
    w_b: np.ndarray
    forms: dict = field(default_factory=dict, repr=False)

    def triple(self):
        return self.w_s, self.w_d, self.w_b


def _agree(name, x, y, tol):
    gap = np.abs(x - y)
    scale = np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
    worst = float(np.max(gap / scale)) if gap.size else 0.0
    if not np.isfinite(worst) or worst > tol:
        raise InternalConsistencyError(f"{name}: two evaluation routes differ by {worst:.3g}")


def energy_densities(ds, rg, cs=None, ic=None, check=True, tol=CONSISTENCY_TOL, **fd):
    """Pure measures of stretching, drilling and bending.

    ``w_s = |U - P(nu)|^2``; ``w_d`` from ``|W(nu) o H|^2`` and ``4 a3^2``;
    ``w_b`` from the ``H`` form, the a-vector form and the connector form
    ``4 [lam1^2 d1*^2 + lam2^2 d2*^2 - d1^2 - d2^2]^2``.  The connector route
    uses directly differentiated image connectors, so it is independent of
    ``H``.  In the stretch frame the connector form equals
    ``4 [|V d1*|^2 + |V d2*|^2 - d1^2 - d2^2]^2`` because ``d1*.v2 = d2*.v1``.
    """
    chart = ds.deformation.chart
    cs = cs if cs is not None else source_connectors(ds, rg, **fd)
    ic = ic if ic is not None else image_connectors(ds, rg, cs, **fd)
    nu = ds.nu
    P = t3.projector(nu, tol=1e-6)
    w_s = t3.norm2(ds.U - P, 2)

    wn_H = t3.circ_mt(t3.wmat(nu), rg.H)
    w_d_H = t3.dot(wn_H, wn_H)
    w_d_a = 4.0 * t3.dot(rg.a3, rg.a3)

    N = curvature_tensor(chart, ds.u, ds.v)
    w_b_H = (t3.norm2(rg.H, 3) - 0.5 * w_d_H - 4.0 * t3.dot(nu, t3.circ_tm(rg.H, N))) ** 2
    inner = t3.dot(rg.a1, rg.a1) + t3.dot(rg.a2, rg.a2) + 2.0 * (t3.dot(rg.a1, cs.d2) - t3.dot(rg.a2, cs.d1))
    w_b_a = 4.0 * inner * inner
    dd1 = ic.direct_d1 if ic.direct_d1 is not None else ic.d1
    dd2 = ic.direct_d2 if ic.direct_d2 is not None else ic.d2
    Vd1, Vd2 = t3.matvec(ds.V, dd1), t3.matvec(ds.V, dd2)
    src = t3.dot(cs.d1, cs.d1) + t3.dot(cs.d2, cs.d2)
    w_b_c = 4.0 * (t3.dot(Vd1, Vd1) + t3.dot(Vd2, Vd2) - src) ** 2
    w_b_lam = 4.0 * (ds.lam1**2 * t3.dot(dd1, dd1) + ds.lam2**2 * t3.dot(dd2, dd2) - src) ** 2

    forms = {
        "w_d_H": w_d_H,
        "w_d_a": w_d_a,
        "w_b_H": w_b_H,
        "w_b_a": w_b_a,
        "w_b_connector": w_b_lam,
        "w_b_connector_V": w_b_c,
    }
    if check:
        _agree("w_d", w_d_H, w_d_a, tol)
        _agree("w_b (H vs a-vectors)", w_b_H, w_b_a, tol)
        _agree("w_b (H vs connectors)", w_b_H, w_b_lam, tol)
    return EnergyDensities(w_s, w_d_H, w_b_H, forms)


def stretch_gradients(ds, **fd):
    """``(grad_s lam1, grad_s lam2)`` by differencing the principal stretch fields."""
    deformation = ds.deformation
    chart = deformation.chart

    def lam(a, c):
        s = deformation_sample(deformation, a, c)
        return np.stack([s.lam1, s.lam2], axis=-1)

    G = surface_gradient(chart, lam, ds.u, ds.v, **fd)
    return G[..., 0, :], G[..., 1, :]


def integrability_residuals(ds, rg, cs, grad_lam=None, **fd):
    """Residuals of the three scalar integrability conditions in the stretch frame.

    ``lam1 (d1 - a2).u2 - lam2 (d2 + a1).u1``,
    ``lam1 a3.u2 + (lam1 - lam2) c.u2 - grad lam2 . u1``,
    ``lam2 a3.u1 + (lam2 - lam1) c.u1 + grad lam1 . u2``.
    """
    g1, g2 = grad_lam if grad_lam is not None else stretch_gradients(ds, **fd)
    e1, e2 = rg.frame[..., 0, :], rg.frame[..., 1, :]
    l1, l2 = ds.lam1, ds.lam2
    r1 = l1 * t3.dot(cs.d1 - rg.a2, e2) - l2 * t3.dot(cs.d2 + rg.a1, e1)
    r2 = l1 * t3.dot(rg.a3, e2) + (l1 - l2) * t3.dot(cs.c, e2) - t3.dot(g2, e1)
    r3 = l2 * t3.dot(rg.a3, e1) + (l2 - l1) * t3.dot(cs.c, e1) + t3.dot(g1, e2)
    return r1, r2, r3


# ---------------------------------------------------------------------------
# bundle


@dataclass
class Kinematics:
    sample: DeformationSample
    rotgrad: RotationGradient
    connectors: object
    image: ImageConnectors
    energies: EnergyDensities
    K: np.ndarray
    K_star: np.ndarray
    K_star_direct: np.ndarray
    integrability: tuple


def analyze(deformation, u, v, frame="stretch", perturbation=None, check=True, **fd):
    """Every kinematic quantity at ``(u, v)`` with all cross-checks."""
    u, v = _bcast(u, v)
    ds = deformation_sample(deformation, u, v)
    rg = rotation_gradient(deformation, u, v, frame=frame, perturbation=perturbation, **fd)
    cs = source_connectors(ds, rg, **fd)
    ic = image_connectors(ds, rg, cs, **fd)
    en = energy_densities(ds, rg, cs, ic, check=check and perturbation is None, **fd)
    K = sample(deformation.chart, u, v).K
    Ks = image_gaussian_curvature(ds, rg, K, cs)
    Kd = direct_image_gaussian_curvature(deformation, u, v)
    if not np.all(np.isfinite(Ks)):
        raise NumericalError("non-finite image curvature")
    integ = integrability_residuals(ds, rg, cs, **fd)
    return Kinematics(ds, rg, cs, ic, en, K, Ks, Kd, integ)
