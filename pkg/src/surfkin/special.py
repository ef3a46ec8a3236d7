"""Exact deformation families: Bonnet drilling of the catenoid and eversions of
surfaces of revolution, with their verifiers, plus the sphere-rigidity check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from . import kinematics as km
from . import tensor3 as t3
from .errors import BendingAngleSingularity, MinimalityError, PreconditionError
from .metric_classes import classify
from .profile import ProfileExpr, parse_profile
from .surface.calculus import basis, sample, surface_gradient
from .surface.charts import Jet, Revolution, Sphere, catenoid
from .surface.frames import Coordinate

MINIMALITY_TOL = 1e-8


# ---------------------------------------------------------------------------
# Bonnet family


def _is_catenoid(chart):
    return isinstance(chart, Revolution) and chart.kind == "catenoid"


class BonnetDeformation(km.Deformation):
    """Associate-family map ``y = cos(alpha) X + sin(alpha) X*`` of the catenoid.

    ``X = (cosh v cos u, cosh v sin u, v)`` and its conjugate
    ``X* = (sinh v sin u, -sinh v cos u, u)`` satisfy ``X*_u = X_v``,
    ``X*_v = -X_u``, so the polar rotation is the rotation by ``alpha``
    about the normal.
    """

    kind = "bonnet"

    def __init__(self, alpha, chart=None):
        super().__init__(chart if chart is not None else catenoid())
        self.alpha = float(alpha)

    def _jet(self, u, v):
        j = self.chart.jet(u, v)
        c, s = np.cos(self.alpha), np.sin(self.alpha)
        sh = np.sinh(v)
        conj = np.stack(np.broadcast_arrays(sh * np.sin(u), -sh * np.cos(u), u), axis=-1)
        return Jet(
            c * j.r + s * conj,
            c * j.ru + s * j.rv,
            c * j.rv - s * j.ru,
            c * j.ruu + s * j.ruv,
            c * j.ruv + s * j.rvv,
            c * j.rvv - s * j.ruv,
        )

    def drilling_rotation(self, u, v):
        """Closed-form polar rotation: ``cos a (e1 e1 + e2 e2) + sin a (e2 e1 - e1 e2) + nu nu``."""
        return t3.rotation_about(basis(self.chart, u, v).nu, self.alpha)

    def a_vectors(self, u, v):
        """Closed-form a-vectors in the principal frame ``(e_u, e_v, nu)``."""
        s = sample(self.chart, u, v)
        k1 = t3.dot(s.e_u, t3.matvec(s.curvature, s.e_u))[..., None]
        k2 = t3.dot(s.e_v, t3.matvec(s.curvature, s.e_v))[..., None]
        sa, ca = np.sin(self.alpha), np.cos(self.alpha)
        a1 = k1 * sa * s.e_u + k2 * (1.0 - ca) * s.e_v
        a2 = k1 * (ca - 1.0) * s.e_u + k2 * sa * s.e_v
        return a1, a2, np.zeros_like(a1)


def bonnet_deformation(alpha, base=None, tol=MINIMALITY_TOL):
    """Bonnet (pure drilling) isometry of a minimal surface by the constant angle ``alpha``.

    A closed form is available for the catenoid.  A non-minimal base raises
    :class:`MinimalityError` unless ``sin(alpha) = 0``.
    """
    if base is None:
        return BonnetDeformation(alpha)
    if _is_catenoid(base):
        return BonnetDeformation(alpha, base)
    U, V = base.grid(16, 16)
    worst = float(np.max(np.abs(sample(base, U, V).H)))
    if worst > tol and abs(np.sin(alpha)) > tol:
        raise MinimalityError(f"2 H sin(alpha) != 0: base has |H| up to {worst:.3g}")
    if abs(np.sin(alpha)) <= tol and np.cos(alpha) > 0:
        return km.Identity(base)
    raise PreconditionError("closed-form Bonnet family is implemented for the catenoid only")


# ---------------------------------------------------------------------------
# eversion of surfaces of revolution


def bending_angle(rho_prime):
    """``alpha = atan2(2 rho', rho'^2 - 1)``; exactly pi for a flat profile."""
    rp = np.asarray(rho_prime, dtype=float)
    return np.arctan2(2.0 * rp, rp * rp - 1.0)


class EversionMap(km.Deformation):
    """``y = rho(z) e_r - z e_z`` on the revolution chart ``(theta, z)``."""

    kind = "eversion"

    def __init__(self, chart):
        super().__init__(chart)
        self.profile = chart.profile

    def _jet(self, u, v):
        rho, d1, d2 = self.chart.profile(v)
        cu, su = np.cos(u), np.sin(u)
        z, o = np.zeros_like(u), np.ones_like(u)

        def st(*c):
            return np.stack(np.broadcast_arrays(*c), axis=-1)

        return Jet(
            st(rho * cu, rho * su, -v),
            st(-rho * su, rho * cu, z),
            st(d1 * cu, d1 * su, -o),
            st(-rho * cu, -rho * su, z),
            st(-d1 * su, d1 * cu, z),
            st(d2 * cu, d2 * su, z),
        )

    def alpha(self, u, v):
        v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))[1]
        return bending_angle(self.chart.profile(v)[1])

    def gradient_closed_form(self, u, v):
        """``F = e1 (x) e1 + (cos a e2 + sin a nu) (x) e2`` in the parallel/meridian frame."""
        b = basis(self.chart, u, v)
        a = self.alpha(u, v)[..., None]
        e1, e2 = b.e_u, b.e_v
        return t3.outer(e1, e1) + t3.outer(np.cos(a) * e2 + np.sin(a) * b.nu, e2)

    def rotation_closed_form(self, u, v):
        """Rotation by ``alpha`` about the parallel direction ``e1``."""
        return t3.rotation_about(basis(self.chart, u, v).e_u, self.alpha(u, v))


def evert_revolution(profile, zrange=(0.0, 2.0), theta_range=(0.0, 2.0 * np.pi)):
    """Pure-bending eversion of the surface of revolution with radius ``profile``.

    ``profile`` may be source text, a :class:`ProfileExpr`, a callable
    returning ``(rho, rho', rho'')`` or an existing revolution chart.
    """
    if isinstance(profile, Revolution):
        return EversionMap(profile)
    if isinstance(profile, str):
        profile = parse_profile(profile)
    name = profile.text if isinstance(profile, ProfileExpr) else None
    chart = Revolution(profile, zrange, theta_range, name=None)
    if name:
        chart.params["profile"] = name
    return EversionMap(chart)


def angle_gradient(chart, alpha, u, v, **fd):
    """``grad_s alpha`` from ``cos alpha grad sin alpha - sin alpha grad cos alpha``.

    Insensitive to the ``2 pi`` jumps of a wrapped angle field.
    """

    def cs(a, c):
        x = alpha(a, c)
        return np.stack([np.cos(x), np.sin(x)], axis=-1)

    G = surface_gradient(chart, cs, u, v, **fd)
    here = cs(u, v)
    return here[..., 0, None] * G[..., 1, :] - here[..., 1, None] * G[..., 0, :]


def eversion_condition_residuals(chart, frame, alpha, u, v, tol=1e-10, **fd):
    """Residuals of the pure-bending eversion conditions in a frame whose ``e1`` is principal.

    ``(1 - cos a) grad k1 . e2 - k1 (k2 - k1) sin a``, ``grad k2 . e1`` and
    ``|grad a - 2 k2 e2|``, where ``k_i = e_i . (grad_s nu) e_i``.  The first
    condition is used in its product form, which stays finite at ``a = pi``.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    a = alpha(u, v)
    if np.any(1.0 - np.cos(a) <= tol):
        raise BendingAngleSingularity("bending angle vanishes; the spin connector formula degenerates")
    fr, _ = frame(chart, u, v)
    e1, e2 = fr[..., 0, :], fr[..., 1, :]

    def kappas(x, y):
        f, _ = frame(chart, x, y)
        N = sample(chart, x, y).curvature
        return np.stack(
            [t3.dot(f[..., 0, :], t3.matvec(N, f[..., 0, :])), t3.dot(f[..., 1, :], t3.matvec(N, f[..., 1, :]))],
            axis=-1,
        )

    k = kappas(u, v)
    k1, k2 = k[..., 0], k[..., 1]
    G = surface_gradient(chart, kappas, u, v, **fd)
    ga = angle_gradient(chart, alpha, u, v, **fd)
    ra = (1.0 - np.cos(a)) * t3.dot(G[..., 0, :], e2) - k1 * (k2 - k1) * np.sin(a)
    rb = t3.dot(G[..., 1, :], e1)
    rc = t3.norm(ga - 2.0 * k2[..., None] * e2)
    return ra, rb, rc


@dataclass
class EversionReport:
    isometry_defect: float
    gradient_defect: float
    eversion_residual: float
    kappa1_defect: float
    kappa2_defect: float
    K_defect: float
    energies: tuple
    conditions: tuple
    contents_finite: bool
    contents_nonfinite_points: int

    def as_dict(self):
        return dict(self.__dict__)


def eversion_fields(emap, u, v, kin=None, **fd):
    """Pointwise residuals of the eversion identities.

    Keys: ``isometry``, ``gradient`` (closed form), ``eversion``
    (``|grad* nu* + R grad nu R^T|``), ``kappa1`` (``k1* + k1``), ``kappa2``
    (``k2* - k2 + grad a . e2``), ``K`` (``K* - K``), ``w_s``, ``w_d``,
    ``w_b``, ``condition_a``/``b``/``c`` (NaN where the bending angle is
    singular) and ``contents_nonfinite`` (boolean).
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    chart = emap.chart
    k = kin if kin is not None else km.analyze(emap, u, v, frame="coordinate", **fd)
    ds = k.sample
    P = t3.projector(ds.nu, tol=1e-6)
    out = {
        "isometry": np.sqrt(t3.norm2(ds.U - P, 2)),
        "gradient": np.sqrt(t3.norm2(ds.F - emap.gradient_closed_form(u, v), 2)),
    }
    s = sample(chart, u, v)
    s_star = sample(emap.image_chart(), u, v)
    RNR = t3.matmul(t3.matmul(ds.R, s.curvature), t3.transpose(ds.R))
    out["eversion"] = np.sqrt(t3.norm2(s_star.curvature + RNR, 2))

    e1, e2 = s.e_u, s.e_v
    k1 = t3.dot(e1, t3.matvec(s.curvature, e1))
    k2 = t3.dot(e2, t3.matvec(s.curvature, e2))
    v1, v2 = t3.matvec(ds.R, e1), t3.matvec(ds.R, e2)
    k1s = t3.dot(v1, t3.matvec(s_star.curvature, v1))
    k2s = t3.dot(v2, t3.matvec(s_star.curvature, v2))
    ga = angle_gradient(chart, emap.alpha, u, v, **fd)
    out["kappa1"] = np.abs(k1s + k1)
    out["kappa2"] = np.abs(k2s - (k2 - t3.dot(ga, e2)))
    out["K"] = np.abs(k.K_star_direct - k.K)
    out["w_s"], out["w_d"], out["w_b"] = (np.abs(w) for w in k.energies.triple())
    try:
        cond = eversion_condition_residuals(chart, Coordinate(), emap.alpha, u, v, **fd)
        out["condition_a"], out["condition_b"], out["condition_c"] = (np.abs(r) for r in cond)
    except BendingAngleSingularity:
        nan = np.full(u.shape, np.nan)
        out["condition_a"] = out["condition_b"] = out["condition_c"] = nan
    _, _, contents = km.rodrigues_split(ds.R, ds.nu)
    out["contents_nonfinite"] = ~contents.finite
    return out


def eversion_check(emap, u, v, **fd):
    """Verify the defining sign flip, isometry, curvature transport and zero energies."""
    f = eversion_fields(emap, u, v, **fd)

    def worst(key):
        return float(np.max(f[key]))

    nonfinite = int(np.count_nonzero(f["contents_nonfinite"]))
    return EversionReport(
        worst("isometry"), worst("gradient"), worst("eversion"),
        worst("kappa1"), worst("kappa2"), worst("K"),
        (worst("w_s"), worst("w_d"), worst("w_b")),
        (worst("condition_a"), worst("condition_b"), worst("condition_c")),
        nonfinite == 0, nonfinite,
    )


# ---------------------------------------------------------------------------
# sphere rigidity


def sphere_rigidity(deformation, u, v, tol=1e-8, **fd):
    """Largest ``|H|`` over the points for a sphere-to-sphere map.

    The source must be a :class:`Sphere` chart and the image must lie on a
    sphere of the same radius (about any centre); otherwise
    :class:`PreconditionError` is raised.
    """
    chart = deformation.chart
    if not isinstance(chart, Sphere):
        raise PreconditionError("sphere rigidity needs a sphere chart as source")
    R0 = chart.radius
    y = deformation.point(u, v)
    pts = y.reshape(-1, 3)
    centre = _sphere_centre(pts)
    radii = np.linalg.norm(pts - centre, axis=-1)
    if np.max(np.abs(radii - R0)) > max(tol, 1e-9) * max(R0, 1.0) * 1e3:
        raise PreconditionError("image does not lie on a sphere of the source radius")
    rg = km.rotation_gradient(deformation, u, v, **fd)
    return float(np.max(np.sqrt(t3.norm2(rg.H, 3))))


def _sphere_centre(pts):
    """Least-squares centre of points on a sphere."""
    A = np.hstack([2.0 * pts, np.ones((len(pts), 1))])
    b = np.sum(pts * pts, axis=-1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return sol[:3]


def rigidity_negative_control(deformation, u, v, tol=1e-8):
    """Classification of a sphere map expected to be non-isometric."""
    return classify(deformation, u, v, tol=tol)


def rigid_fit_rms(points, target):
    """RMS distance between ``target`` and ``points`` after the best rotation and translation.

    The rotation is found with :meth:`scipy.spatial.transform.Rotation.align_vectors`;
    the RMS is recomputed from the aligned points because the residual returned
    by the fit loses precision through cancellation.
    """
    A = np.asarray(target, dtype=float).reshape(-1, 3)
    B = np.asarray(points, dtype=float).reshape(-1, 3)
    A = A - A.mean(axis=0)
    B = B - B.mean(axis=0)
    rot, _ = Rotation.align_vectors(A, B)
    return float(np.sqrt(np.mean(np.sum((rot.apply(B) - A) ** 2, axis=-1))))
