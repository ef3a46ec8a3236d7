"""Metric classes of deformations (conformal, isoareal, isometric) and their laws."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kinematics as km
from . import tensor3 as t3
from .surface.calculus import sample, surface_divergence, surface_gradient

DEFAULT_TOL = 1e-8


@dataclass
class ClassificationReport:
    conformal: bool
    isoareal: bool
    isometric: bool
    conformal_defect: float
    isoareal_defect: float
    isometric_defect: float
    tol: float
    lam: np.ndarray = field(default=None, repr=False)

    def flags(self):
        return {"conformal": self.conformal, "isoareal": self.isoareal, "isometric": self.isometric}


def conformal_factor(deformation):
    """Callable ``(u, v) -> lambda_hat = sqrt(tr C / 2)``."""

    def lam(a, c):
        F = km.deformation_gradient(deformation, a, c)
        return np.sqrt(0.5 * t3.norm2(F, 2))

    return lam


def classify(deformation, u, v, tol=DEFAULT_TOL):
    """Flag a deformation as conformal, isoareal and/or isometric on the sample points.

    Conformal iff ``max |C - lam^2 P| < tol`` with ``lam^2 = tr C / 2``;
    isoareal iff ``max |det U - 1| < tol``; isometric iff both.
    """
    ds = km.deformation_sample(deformation, u, v)
    P = t3.projector(ds.nu, tol=1e-6)
    lam2 = 0.5 * t3.trace(ds.C)
    conf = np.sqrt(t3.norm2(ds.C - lam2[..., None, None] * P, 2))
    area = np.abs(ds.det_U - 1.0)
    iso = np.sqrt(t3.norm2(ds.U - P, 2))
    cd, ad, idf = (float(np.max(x)) for x in (conf, area, iso))
    is_conf = cd < tol
    is_area = ad < tol
    return ClassificationReport(
        is_conf, is_area, is_conf and is_area, cd, ad, idf, tol, np.sqrt(lam2)
    )


def _grad_log_lam(deformation, u, v, **fd):
    lam = conformal_factor(deformation)
    return surface_gradient(deformation.chart, lambda a, c: np.log(lam(a, c)), u, v, **fd)


def log_lam_laplacian(deformation, u, v, **fd):
    """``Laplacian_s ln lambda`` by nested differencing."""
    chart = deformation.chart
    lam = conformal_factor(deformation)

    def grad(a, c):
        return surface_gradient(chart, lambda x, y: np.log(lam(x, y)), a, c, **fd)

    return surface_divergence(chart, grad, u, v, **fd)


@dataclass
class ConformalLaws:
    a3: np.ndarray
    spin: np.ndarray
    trace: np.ndarray
    mean_curvature: np.ndarray

    def worst(self):
        return {k: float(np.max(np.abs(getattr(self, k)))) for k in ("a3", "spin", "trace", "mean_curvature")}


def conformal_laws_residuals(deformation, u, v, frame="stretch", **fd):
    """Residuals of the conformal laws at ``(u, v)``.

    ``|a3 - nu x grad ln lam|``; ``|c* - R h|`` with
    ``h = (c + nu x grad ln lam) / lam`` and ``c*`` from the directly
    differentiated image frame; ``a1.e1 + a2.e2``; and
    ``2 H* - (2 H + a2.e1 - a1.e2) / lam`` with ``H*`` from the image chart.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    ds = km.deformation_sample(deformation, u, v)
    rg = km.rotation_gradient(deformation, u, v, frame=frame, **fd)
    cs = km.source_connectors(ds, rg, **fd)
    ic = km.image_connectors(ds, rg, cs, **fd)
    lam = conformal_factor(deformation)(u, v)
    nu = ds.nu
    nxg = t3.cross(nu, _grad_log_lam(deformation, u, v, **fd))
    r_a3 = t3.norm(rg.a3 - nxg)
    h = (cs.c + nxg) / lam[..., None]
    r_spin = t3.norm(ic.direct_c - t3.matvec(ds.R, h))
    e1, e2 = rg.frame[..., 0, :], rg.frame[..., 1, :]
    r_tr = t3.dot(rg.a1, e1) + t3.dot(rg.a2, e2)
    H = sample(deformation.chart, u, v).H
    H_star = sample(deformation.image_chart(), u, v).H
    r_h = 2.0 * H_star - (2.0 * H + t3.dot(rg.a2, e1) - t3.dot(rg.a1, e2)) / lam
    return ConformalLaws(r_a3, r_spin, r_tr, r_h)


@dataclass
class CurvatureLaw:
    quotient_form: np.ndarray
    rewritten_form: np.ndarray
    rearrangement_gap: np.ndarray


def conformal_curvature_residual(deformation, u, v, **fd):
    """``K* - (K - Lap ln lam)/lam^2`` and ``Lap phi + K* e^{2 phi} - K`` with ``phi = ln lam``.

    ``K*`` is the Gaussian curvature of the image chart.  The second form is
    ``lam^2`` times the first; ``rearrangement_gap`` measures how far the
    evaluated values depart from that identity.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    lam = conformal_factor(deformation)(u, v)
    K = sample(deformation.chart, u, v).K
    K_star = sample(deformation.image_chart(), u, v).K
    lap = log_lam_laplacian(deformation, u, v, **fd)
    q = K_star - (K - lap) / lam**2
    phi = np.log(lam)
    r = lap + K_star * np.exp(2.0 * phi) - K
    return CurvatureLaw(q, r, r - lam**2 * q)


@dataclass
class EgregiumReport:
    max_K_defect: float
    max_K_defect_formula: float
    max_a3: float
    isometric: bool


def theorema_egregium_check(deformation, u, v, tol=DEFAULT_TOL, **fd):
    """``max |K* - K|`` with ``K*`` from the image chart, plus the a-vector route and ``max |a3|``."""
    k = km.analyze(deformation, u, v, **fd)
    cls = classify(deformation, u, v, tol=tol)
    return EgregiumReport(
        float(np.max(np.abs(k.K_star_direct - k.K))),
        float(np.max(np.abs(k.K_star - k.K))),
        float(np.max(t3.norm(k.rotgrad.a3))),
        cls.isometric,
    )


@dataclass
class RigidityReport:
    indifference_residual: float
    max_H: float
    antecedent: bool
    holds: bool


def curvature_indifference_residual(deformation, u, v):
    """``|grad*_s nu* - R grad_s nu R^T|`` pointwise, image curvature from the image chart."""
    ds = km.deformation_sample(deformation, u, v)
    N = sample(deformation.chart, u, v).curvature
    N_star = sample(deformation.image_chart(), u, v).curvature
    RNR = t3.matmul(t3.matmul(ds.R, N), t3.transpose(ds.R))
    return np.sqrt(t3.norm2(N_star - RNR, 2))


def frame_indifference_rigidity(deformation, u, v, tol=1e-6, **fd):
    """If curvature is frame-indifferent everywhere, the rotation gradient must vanish."""
    res = float(np.max(curvature_indifference_residual(deformation, u, v)))
    rg = km.rotation_gradient(deformation, u, v, **fd)
    h = float(np.max(np.sqrt(t3.norm2(rg.H, 3))))
    antecedent = res < tol
    return RigidityReport(res, h, antecedent, (not antecedent) or h < tol)

