"""Subcommand bodies: each builds a :class:`ResidualReport` from a :class:`JobConfig`."""

from __future__ import annotations

import os

import numpy as np

from .. import kinematics as km
from .. import special as sp
from .. import tensor3 as t3
from ..metric_classes import conformal_curvature_residual, conformal_laws_residuals
from ..surface.calculus import ORTHO_TOL, basis, curvature_tensor, sample, surface_gradient
from ..surface.charts import Helicoid
from ..surface.frames import Coordinate, Principal, Rotated, connectors, uv_angle
from ..surface.identities import codazzi_residuals, gauss_residual, metric_gaussian_curvature
from . import mesh
from .config import make_deformation, make_surface
from .evaluate import evaluate, interior_grid
from .report import ResidualReport, info, measured, skipped

TOL = {
    "curvature": 1e-8,
    "curvature_fd": 1e-6,
    "gauss": 1e-6,
    "codazzi": 1e-5,
    "connector_symmetry": 1e-8,
    "metric_K": 1e-6,
    "polar": 1e-10,
    "reconstruction": 1e-8,
    "dual_forms": 1e-6,
    "K_star": 1e-6,
    "integrability": 1e-5,
    "egregium": 1e-6,
    "a3": 1e-6,
    "conformal_laws": 1e-5,
    "energy": 1e-8,
    "eversion": 1e-5,
    "kappa1": 1e-6,
    "kappa2": 1e-5,
    "isometry": 1e-8,
    "mean_curvature": 1e-6,
    "a_vectors": 1e-6,
    "rigid_fit": 1e-6,
}

# relative stretch gap below which a point may sit on a jump of the stretch frame
STRETCH_UMBILIC_GAP = 1e-2


def _norm2(M):
    return np.sqrt(t3.norm2(M, 2))


def _rel_gap(x, y):
    return np.abs(x - y) / np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))


def _random_angle(seed):
    a, b, c = np.random.default_rng(seed).uniform(-1.0, 1.0, 3)
    return lambda u, v: a * u + b * v + c * u * v


# ---------------------------------------------------------------------------
# check


def run_check(cfg, workers=None):
    chart = make_surface(cfg.surface)
    I, J, U, V = grid = interior_grid(chart, cfg.grid, cfg.margin)
    frames = {
        "principal": Principal(),
        "coordinate": Coordinate(),
        "rotated": Rotated(Coordinate(), uv_angle),
        "random": Rotated(Coordinate(), _random_angle(cfg.seed), label="random"),
    }
    orthogonal = float(np.max(np.abs(basis(chart, U, V).orth_defect))) <= ORTHO_TOL

    def fn(u, v):
        out = {}
        N = curvature_tensor(chart, u, v)
        nu = basis(chart, u, v).nu
        G = surface_gradient(chart, lambda a, c: basis(chart, a, c).nu, u, v)
        out["curvature_symmetry"] = _norm2(G - t3.transpose(G))
        out["curvature_normal"] = t3.norm(t3.matvec(N, nu)) + t3.norm(t3.matvec(t3.transpose(N), nu))
        out["curvature_fd"] = _norm2(G - N)
        for name, fr in frames.items():
            out[f"gauss[{name}]"] = np.abs(gauss_residual(chart, fr, u, v))
            r1, r2 = codazzi_residuals(chart, fr, u, v)
            out[f"codazzi_1[{name}]"] = np.abs(r1)
            out[f"codazzi_2[{name}]"] = np.abs(r2)
            cs = connectors(chart, fr, u, v, d_method="fd")
            out[f"connector_symmetry[{name}]"] = np.abs(cs.symmetry_defect())
            out[f"fallback[{name}]"] = cs.fallback
        if orthogonal:
            out["metric_K"] = np.abs(metric_gaussian_curvature(chart, u, v) - sample(chart, u, v).K)
        return out

    f = evaluate(fn, U, V, workers)
    rep = ResidualReport("check", cfg.as_dict())
    rep.add(measured("curvature_symmetry", f["curvature_symmetry"], TOL["curvature"], grid))
    rep.add(measured("curvature_normal", f["curvature_normal"], TOL["curvature"], grid))
    rep.add(measured("curvature_fd", f["curvature_fd"], TOL["curvature_fd"], grid))
    for name in frames:
        n_fb = int(np.count_nonzero(f[f"fallback[{name}]"]))
        note = f"coordinate frame used at {n_fb} umbilic point(s)" if n_fb else ""
        rep.add(measured(f"gauss[{name}]", f[f"gauss[{name}]"], TOL["gauss"], grid, note))
        rep.add(measured(f"codazzi_1[{name}]", f[f"codazzi_1[{name}]"], TOL["codazzi"], grid, note))
        rep.add(measured(f"codazzi_2[{name}]", f[f"codazzi_2[{name}]"], TOL["codazzi"], grid, note))
        rep.add(measured(f"connector_symmetry[{name}]", f[f"connector_symmetry[{name}]"], TOL["connector_symmetry"], grid))
    if orthogonal:
        rep.add(measured("metric_K", f["metric_K"], TOL["metric_K"], grid))
    else:
        rep.add(skipped("metric_K", "non-orthogonal", TOL["metric_K"]))
    return rep


# ---------------------------------------------------------------------------
# analyze and friends


def stretch_frame_jumps(d, ds, rel_step=1e-4):
    """Points where the stretch frame may be discontinuous within the difference stencil.

    That is every point with a small stretch gap unless it and its stencil
    neighbours all use the equal-stretch fallback (as for conformal maps).
    """
    gap = (ds.lam1 - ds.lam2) / ds.lam1
    hu, hv = d.chart.fd_steps(rel_step)
    smooth = ds.stretch_degenerate.copy()
    for du, dv in ((2 * hu, 0.0), (-2 * hu, 0.0), (0.0, 2 * hv), (0.0, -2 * hv)):
        smooth &= km.deformation_sample(d, ds.u + du, ds.v + dv).stretch_degenerate
    return (gap < STRETCH_UMBILIC_GAP) & ~smooth


def _kinematic_fields(d, u, v, frame):
    k = km.analyze(d, u, v, frame=frame, check=False)
    ds, rg, en = k.sample, k.rotgrad, k.energies
    P = t3.projector(ds.nu, tol=1e-6)
    lam2 = 0.5 * t3.trace(ds.C)
    near = stretch_frame_jumps(d, ds)
    out = {
        "polar_RU": _norm2(ds.F - t3.matmul(ds.R, ds.U)),
        "polar_VR": _norm2(ds.F - t3.matmul(ds.V, ds.R)),
        "rotation_orthogonality": _norm2(t3.matmul(t3.transpose(ds.R), ds.R) - np.eye(3)),
        "H_reconstruction": rg.reconstruction_error(),
        "w_d_dual_forms": _rel_gap(en.forms["w_d_H"], en.forms["w_d_a"]),
        "w_b_dual_forms": _rel_gap(en.forms["w_b_H"], en.forms["w_b_a"]),
        "w_b_connector_form": np.where(near, 0.0, _rel_gap(en.forms["w_b_H"], en.forms["w_b_connector"])),
        "K_star_formula": np.abs(k.K_star - k.K_star_direct),
        "K_defect": np.abs(k.K_star_direct - k.K),
        "a3": t3.norm(rg.a3),
        "conformal_defect": _norm2(ds.C - lam2[..., None, None] * P),
        "isoareal_defect": np.abs(ds.det_U - 1.0),
        "isometric_defect": _norm2(ds.U - P),
        "lambda_hat": np.sqrt(lam2),
        "w_s": en.w_s,
        "w_d": en.w_d,
        "w_b": en.w_b,
        "stretch_umbilic": near,
    }
    for i, r in enumerate(k.integrability, 1):
        out[f"integrability_{i}"] = np.where(near, 0.0, np.abs(r))
    return out, k


def _kinematic_report(rep, f, grid, tol, energy_tol=None):
    """Common rows; returns the classification flags."""
    for key in ("polar_RU", "polar_VR", "rotation_orthogonality"):
        rep.add(measured(key, f[key], TOL["polar"], grid))
    rep.add(measured("H_reconstruction", f["H_reconstruction"], TOL["reconstruction"], grid))
    n_near = int(np.count_nonzero(f["stretch_umbilic"]))
    note = f"{n_near} point(s) near a stretch-frame jump excluded" if n_near else ""
    for key in ("w_d_dual_forms", "w_b_dual_forms"):
        rep.add(measured(key, f[key], TOL["dual_forms"], grid))
    rep.add(measured("w_b_connector_form", f["w_b_connector_form"], TOL["dual_forms"], grid, note))
    rep.add(measured("K_star_formula", f["K_star_formula"], TOL["K_star"], grid))
    for i in (1, 2, 3):
        rep.add(measured(f"integrability_{i}", f[f"integrability_{i}"], TOL["integrability"], grid, note))

    flags = {
        "conformal": bool(np.max(f["conformal_defect"]) < tol),
        "isoareal": bool(np.max(f["isoareal_defect"]) < tol),
    }
    flags["isometric"] = flags["conformal"] and flags["isoareal"]
    rep.flags = flags
    for key in ("conformal", "isoareal", "isometric"):
        rep.add(info(f"{key}_defect", f[f"{key}_defect"], grid, note="flag " + str(flags[key]).lower()))
    if flags["isometric"]:
        rep.add(measured("theorema_egregium", f["K_defect"], TOL["egregium"], grid))
        rep.add(measured("a3", f["a3"], TOL["a3"], grid))
    else:
        rep.add(info("K_defect", f["K_defect"], grid))
        rep.add(info("a3", f["a3"], grid))
    rep.add(info("lambda_hat", f["lambda_hat"], grid))
    for key in ("w_s", "w_d", "w_b"):
        if energy_tol is None:
            rep.add(info(key, f[key], grid))
        else:
            rep.add(measured(key, f[key], energy_tol, grid))
    return flags


def _conformal_fields(d):
    def fn(u, v):
        laws = conformal_laws_residuals(d, u, v)
        law = conformal_curvature_residual(d, u, v)
        lam = np.sqrt(0.5 * t3.norm2(km.deformation_gradient(d, u, v), 2))
        return {
            "conformal_a3": laws.a3,
            "conformal_spin": laws.spin,
            "conformal_trace": np.abs(laws.trace),
            "conformal_mean_curvature": np.abs(laws.mean_curvature),
            "curvature_law": np.abs(law.quotient_form),
            "curvature_law_rewritten": np.abs(law.rewritten_form),
            "lambda_hat": lam,
        }

    return fn


def run_analyze(cfg, workers=None):
    chart = make_surface(cfg.surface)
    d = make_deformation(cfg.deformation, chart)
    I, J, U, V = grid = interior_grid(chart, cfg.grid, cfg.margin)
    frame = "coordinate" if isinstance(d, sp.EversionMap) else "stretch"
    f = evaluate(lambda u, v: _kinematic_fields(d, u, v, frame)[0], U, V, workers)
    rep = ResidualReport("analyze", cfg.as_dict())
    flags = _kinematic_report(rep, f, grid, cfg.tol)
    names = ("conformal_a3", "conformal_spin", "conformal_trace", "conformal_mean_curvature",
             "curvature_law", "curvature_law_rewritten")
    if flags["conformal"] and not flags["isometric"]:
        g = evaluate(_conformal_fields(d), U, V, workers)
        for key in names:
            rep.add(measured(key, g[key], TOL["conformal_laws"], grid))
    else:
        reason = "isometric" if flags["isometric"] else "not conformal"
        for key in names:
            rep.add(skipped(key, reason, TOL["conformal_laws"]))
    return rep


def run_evert(cfg, workers=None):
    chart = make_surface(cfg.surface)
    d = make_deformation(cfg.deformation, chart)
    I, J, U, V = grid = interior_grid(chart, cfg.grid, cfg.margin)

    def fn(u, v):
        out, k = _kinematic_fields(d, u, v, "coordinate")
        ev = sp.eversion_fields(d, u, v, kin=k)
        out.update({f"eversion_{key}": val for key, val in ev.items()})
        return out

    f = evaluate(fn, U, V, workers)
    rep = ResidualReport("evert", cfg.as_dict())
    _kinematic_report(rep, f, grid, cfg.tol, energy_tol=TOL["energy"])
    rep.add(measured("isometry", f["eversion_isometry"], TOL["isometry"], grid))
    rep.add(measured("gradient_closed_form", f["eversion_gradient"], TOL["isometry"], grid))
    rep.add(measured("curvature_eversion", f["eversion_eversion"], TOL["eversion"], grid))
    rep.add(measured("kappa1_flip", f["eversion_kappa1"], TOL["kappa1"], grid))
    rep.add(measured("kappa2_law", f["eversion_kappa2"], TOL["kappa2"], grid))
    for c in "abc":
        vals = f[f"eversion_condition_{c}"]
        if np.all(np.isnan(vals)):
            rep.add(skipped(f"bending_condition_{c}", "bending angle singular", TOL["eversion"]))
        else:
            rep.add(measured(f"bending_condition_{c}", vals, TOL["eversion"], grid))
    nonfinite = f["eversion_contents_nonfinite"].astype(float)
    rep.add(info("rodrigues_nonfinite", nonfinite, grid, note=f"{int(nonfinite.sum())} half-turn point(s)"))
    return rep


def _is_quarter_turn(alpha):
    return abs(np.sin(alpha) - 1.0) < 1e-12


def run_bonnet(cfg, workers=None):
    chart = make_surface(cfg.surface)
    d = make_deformation(cfg.deformation, chart)
    I, J, U, V = grid = interior_grid(chart, cfg.grid, cfg.margin)
    closed = isinstance(d, sp.BonnetDeformation)

    def fn(u, v):
        out, k = _kinematic_fields(d, u, v, "coordinate")
        out["mean_curvature_image"] = np.abs(sample(d.image_chart(), u, v).H)
        out["mean_curvature_source"] = np.abs(sample(chart, u, v).H)
        if closed:
            rg = k.rotgrad
            a = d.a_vectors(u, v)
            out["a_vectors_closed_form"] = np.max(
                np.stack([t3.norm(x - y) for x, y in zip((rg.a1, rg.a2, rg.a3), a)]), axis=0
            )
            out["drilling_rotation"] = _norm2(k.sample.R - d.drilling_rotation(u, v))
        return out

    f = evaluate(fn, U, V, workers)
    rep = ResidualReport("bonnet", cfg.as_dict())
    _kinematic_report(rep, f, grid, cfg.tol, energy_tol=TOL["energy"])
    rep.add(measured("source_minimal", f["mean_curvature_source"], TOL["mean_curvature"], grid))
    rep.add(measured("image_minimal", f["mean_curvature_image"], TOL["mean_curvature"], grid))
    if closed:
        rep.add(measured("a_vectors_closed_form", f["a_vectors_closed_form"], TOL["a_vectors"], grid))
        rep.add(measured("drilling_rotation", f["drilling_rotation"], TOL["isometry"], grid))
        if _is_quarter_turn(d.alpha):
            Uf, Vf = chart.grid(*cfg.grid)
            rms = sp.rigid_fit_rms(d.point(Uf, Vf), Helicoid(chart.domain).point(Uf, Vf))
            rep.add(measured("helicoid_rigid_fit", [rms], TOL["rigid_fit"], note="vertex RMS after best rotation"))
        else:
            rep.add(skipped("helicoid_rigid_fit", "alpha is not a quarter turn", TOL["rigid_fit"]))
    return rep


# ---------------------------------------------------------------------------
# export-mesh


def run_export(cfg):
    """Write ``source.obj`` and ``image.obj``; returns the paths and dropped-face counts."""
    chart = make_surface(cfg.surface)
    d = make_deformation(cfg.deformation, chart)
    U, V = chart.grid(*cfg.grid)
    os.makedirs(cfg.out, exist_ok=True)
    written = []
    sources = (
        ("source.obj", chart.point(U, V), basis(chart, U, V).nu),
        ("image.obj", d.point(U, V), None),
    )
    for name, pts, nrm in sources:
        if cfg.normals and nrm is None:
            nrm = km.deformation_sample(d, U, V).nu_star
        verts, faces, normals, dropped = mesh.grid_mesh(pts, nrm if cfg.normals else None)
        path = os.path.join(cfg.out, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(mesh.obj_text(verts, faces, normals))
        written.append((path, len(verts), len(faces), dropped))
    return written


RUNNERS = {"check": run_check, "analyze": run_analyze, "evert": run_evert, "bonnet": run_bonnet}
