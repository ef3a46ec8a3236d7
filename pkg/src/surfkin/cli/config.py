"""Job configuration: command-line flags merged over an optional INI file."""

from __future__ import annotations

import argparse
import configparser
import os
import re
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import kinematics as km
from .. import special as sp
from ..errors import ConfigError, SurfkinError
from ..surface import charts as ch
from ..tensor3 import rotation_about

MIN_CELLS = 8
DEFAULT_GRID = (64, 64)
DEFAULT_MARGIN = 2
DEFAULT_TOL = 1e-8

SURFACES = ("sphere", "cylinder", "catenoid", "torus", "plane", "annulus", "helicoid", "monge", "revolution")
BASE_DEFORMATIONS = ("identity", "rotation", "scaling", "twist", "conformal-square", "bonnet", "eversion")
POST_DEFORMATIONS = ("rotation", "scaling")
FORMATS = ("csv", "json")


@dataclass
class SurfaceSpec:
    kind: str = "sphere"
    radius: float = 1.0
    profile: str | None = None
    zmin: float | None = None
    zmax: float | None = None
    major: float = 2.0
    minor: float = 0.5
    inner: float = 0.5
    outer: float = 2.0


@dataclass
class DeformationSpec:
    kind: str = "identity"
    alpha: float = float(np.pi / 2)
    angle: float = 0.5
    axis: tuple = (1.0, 2.0, 3.0)
    scale: float = 1.5
    rate: float = 0.5


@dataclass
class JobConfig:
    command: str
    surface: SurfaceSpec = field(default_factory=SurfaceSpec)
    deformation: DeformationSpec = field(default_factory=DeformationSpec)
    grid: tuple = DEFAULT_GRID
    margin: int = DEFAULT_MARGIN
    tol: float = DEFAULT_TOL
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    normals: bool = False

    def as_dict(self):
        d = asdict(self)
        d["grid"] = list(self.grid)
        d["deformation"]["axis"] = list(self.deformation.axis)
        return d


# ---------------------------------------------------------------------------
# parsing


def parse_grid(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", str(text))
    if not m:
        raise ConfigError(f"grid must look like NxM, got {text!r}")
    nu, nv = int(m.group(1)), int(m.group(2))
    if nu == 0 or nv == 0:
        raise ConfigError(f"empty grid {nu}x{nv}")
    if nu < MIN_CELLS or nv < MIN_CELLS:
        raise ConfigError(f"grid must be at least {MIN_CELLS}x{MIN_CELLS}, got {nu}x{nv}")
    return nu, nv


def _axis(text):
    try:
        a = tuple(float(x) for x in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"axis must be three comma-separated numbers, got {text!r}") from exc
    if len(a) != 3 or not np.isfinite(a).all() or np.linalg.norm(a) == 0.0:
        raise ConfigError(f"axis must be a non-zero 3-vector, got {text!r}")
    return a


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


# (section, key) -> (target, attribute, converter)
_FILE_KEYS = {
    ("surface", "kind"): ("surface", "kind", str),
    ("surface", "radius"): ("surface", "radius", float),
    ("surface", "profile"): ("surface", "profile", str),
    ("surface", "zmin"): ("surface", "zmin", float),
    ("surface", "zmax"): ("surface", "zmax", float),
    ("surface", "major"): ("surface", "major", float),
    ("surface", "minor"): ("surface", "minor", float),
    ("surface", "inner"): ("surface", "inner", float),
    ("surface", "outer"): ("surface", "outer", float),
    ("deformation", "kind"): ("deformation", "kind", str),
    ("deformation", "alpha"): ("deformation", "alpha", float),
    ("deformation", "angle"): ("deformation", "angle", float),
    ("deformation", "axis"): ("deformation", "axis", _axis),
    ("deformation", "scale"): ("deformation", "scale", float),
    ("deformation", "rate"): ("deformation", "rate", float),
    ("grid", "size"): ("job", "grid", parse_grid),
    ("grid", "margin"): ("job", "margin", int),
    ("grid", "tol"): ("job", "tol", float),
    ("grid", "seed"): ("job", "seed", int),
    ("output", "dir"): ("job", "out", str),
    ("output", "format"): ("job", "format", str),
    ("output", "normals"): ("job", "normals", _bool),
}


def _target(cfg, name):
    return {"surface": cfg.surface, "deformation": cfg.deformation, "job": cfg}[name]


def _apply(cfg, target, attr, conv, raw, where):
    try:
        value = conv(raw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r}") from exc
    setattr(_target(cfg, target), attr, value)


def load_file(cfg, path):
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section in parser.sections():
        if section not in ("surface", "deformation", "grid", "output"):
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, raw in parser.items(section):
            spec = _FILE_KEYS.get((section, key))
            if spec is None:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            _apply(cfg, *spec, raw, f"{path} [{section}] {key}")


def build_parser():
    p = argparse.ArgumentParser(prog="surfkin", description="Surface kinematics checks, analyses and mesh export.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "check": "verify curvature and connector compatibility identities on a surface",
        "analyze": "classify a deformation and report energies and kinematic identities",
        "evert": "verify the pure-bending eversion of a surface of revolution",
        "bonnet": "verify the Bonnet drilling family of the catenoid",
        "export-mesh": "write source and image meshes as OBJ files",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text, description=text)
        s.add_argument("--config", help="INI file with [surface], [deformation], [grid], [output] sections")
        s.add_argument("--surface", choices=SURFACES)
        s.add_argument("--profile", help="radius profile rho(z), e.g. 'cosh(z)'")
        s.add_argument("--radius", type=float)
        s.add_argument("--zmin", type=float)
        s.add_argument("--zmax", type=float)
        s.add_argument("--deformation", help="base map, optionally followed by '+rotation' or '+scaling'")
        s.add_argument("--alpha", type=float, help="Bonnet angle in radians")
        s.add_argument("--angle", type=float, help="rotation angle in radians")
        s.add_argument("--axis", help="rotation axis 'x,y,z'")
        s.add_argument("--grid", help="cells as NxM (default 64x64)")
        s.add_argument("--tol", type=float, help="classification tolerance (default 1e-8)")
        s.add_argument("--margin", type=int, help="boundary cells skipped by differenced checks (default 2)")
        s.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
        s.add_argument("--out", help="output directory")
        s.add_argument("--format", choices=FORMATS)
        s.add_argument("--normals", action="store_true", default=None, help="write vertex normals in OBJ files")
    return p


def config_from_args(args):
    cfg = JobConfig(command=args.command)
    if args.command == "evert":
        cfg.surface.kind, cfg.surface.zmin, cfg.surface.zmax = "catenoid", 0.0, 2.0
        cfg.deformation.kind = "eversion"
    elif args.command == "bonnet":
        cfg.surface.kind = "catenoid"
        cfg.deformation.kind = "bonnet"
    if args.config:
        load_file(cfg, args.config)
    flags = [
        ("surface", "kind", args.surface, str),
        ("surface", "profile", args.profile, str),
        ("surface", "radius", args.radius, float),
        ("surface", "zmin", args.zmin, float),
        ("surface", "zmax", args.zmax, float),
        ("deformation", "kind", args.deformation, str),
        ("deformation", "alpha", args.alpha, float),
        ("deformation", "angle", args.angle, float),
        ("deformation", "axis", args.axis, _axis),
        ("job", "grid", args.grid, parse_grid),
        ("job", "tol", args.tol, float),
        ("job", "margin", args.margin, int),
        ("job", "seed", args.seed, int),
        ("job", "out", args.out, str),
        ("job", "format", args.format, str),
        ("job", "normals", args.normals, bool),
    ]
    for target, attr, raw, conv in flags:
        if raw is not None:
            _apply(cfg, target, attr, conv, raw, f"--{attr}")
    if args.profile is not None and args.surface is None:
        cfg.surface.kind = "revolution"
    validate(cfg)
    return cfg


def validate(cfg):
    s, d = cfg.surface, cfg.deformation
    if s.kind not in SURFACES:
        raise ConfigError(f"unknown surface {s.kind!r}; choose from {', '.join(SURFACES)}")
    if s.kind == "revolution" and not s.profile:
        raise ConfigError("a revolution surface needs --profile")
    parts = d.kind.split("+")
    if parts[0] not in BASE_DEFORMATIONS or any(p not in POST_DEFORMATIONS for p in parts[1:]):
        raise ConfigError(f"unknown deformation {d.kind!r}")
    if cfg.command == "evert" and parts[0] != "eversion":
        raise ConfigError("evert runs the eversion deformation")
    if cfg.command == "bonnet" and parts[0] != "bonnet":
        raise ConfigError("bonnet runs the bonnet deformation")
    nu, nv = cfg.grid
    if nu < MIN_CELLS or nv < MIN_CELLS:
        raise ConfigError(f"grid must be at least {MIN_CELLS}x{MIN_CELLS}")
    if not (cfg.tol > 0 and np.isfinite(cfg.tol)):
        raise ConfigError("tolerance must be positive")
    if cfg.margin < 0 or 2 * cfg.margin >= min(nu, nv):
        raise ConfigError(f"margin {cfg.margin} leaves no interior on a {nu}x{nv} grid")
    if cfg.format not in FORMATS:
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if s.radius <= 0:
        raise ConfigError("radius must be positive")
    if cfg.command == "export-mesh" and not cfg.out:
        raise ConfigError("export-mesh needs --out DIR")


# ---------------------------------------------------------------------------
# construction


def _zrange(s, default):
    z0 = default[0] if s.zmin is None else s.zmin
    z1 = default[1] if s.zmax is None else s.zmax
    return z0, z1


def make_surface(spec):
    """Chart described by a :class:`SurfaceSpec`."""
    try:
        k = spec.kind
        if k == "sphere":
            return ch.Sphere(spec.radius)
        if k == "cylinder":
            return ch.cylinder(spec.radius, _zrange(spec, (-1.0, 1.0)))
        if k == "catenoid":
            return ch.catenoid(_zrange(spec, (-1.0, 1.0)))
        if k == "torus":
            return ch.Torus(spec.major, spec.minor)
        if k == "plane":
            return ch.Plane()
        if k == "annulus":
            return ch.PolarPlane(spec.inner, spec.outer)
        if k == "helicoid":
            return ch.Helicoid()
        if k == "monge":
            return ch.Monge()
        return ch.Revolution(spec.profile, _zrange(spec, (-1.0, 1.0)))
    except SurfkinError as exc:
        raise ConfigError(f"surface {spec.kind!r}: {exc}") from exc


def make_deformation(spec, chart):
    """Deformation described by a :class:`DeformationSpec` acting on ``chart``."""
    base, *post = spec.kind.split("+")
    try:
        if base == "identity":
            d = km.Identity(chart)
        elif base == "rotation":
            d = km.uniform_rotation(chart, _rotation(spec))
        elif base == "scaling":
            d = km.scaling(chart, spec.scale)
        elif base == "twist":
            d = km.twist(chart, spec.rate)
        elif base == "conformal-square":
            d = km.conformal_square(chart)
        elif base == "bonnet":
            d = sp.bonnet_deformation(spec.alpha, chart)
        else:
            if not isinstance(chart, ch.Revolution):
                raise ConfigError("eversion needs a surface of revolution")
            d = sp.EversionMap(chart)
        for p in post:
            d = km.uniform_rotation(d, _rotation(spec)) if p == "rotation" else km.scaling(d, spec.scale)
    except ConfigError:
        raise
    except SurfkinError as exc:
        raise ConfigError(f"deformation {spec.kind!r}: {exc}") from exc
    return d


def _rotation(spec):
    axis = np.asarray(spec.axis, float)
    return rotation_about(axis / np.linalg.norm(axis), spec.angle)
