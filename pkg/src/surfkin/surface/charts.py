"""Parametric charts ``r: [u0,u1] x [v0,v1] -> E`` with exact partials up to order two.

Every chart evaluates on arrays: ``chart.jet(u, v)`` returns a :class:`Jet`
whose members have shape ``u.shape + (3,)``.  Surfaces of revolution use the
parameters ``(u, v) = (theta, z)`` with ``r = rho(z) e_r + z e_z``, so that
``e_u = e_theta`` runs along parallels and the normal ``e_u x e_v`` points
away from the axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ChartError, ProfileError
from ..profile import ProfileExpr, parse_profile

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Jet:
    r: np.ndarray
    ru: np.ndarray
    rv: np.ndarray
    ruu: np.ndarray
    ruv: np.ndarray
    rvv: np.ndarray


def _stack(*c):
    return np.stack(np.broadcast_arrays(*c), axis=-1)


class Chart:
    """Base class; subclasses implement :meth:`_jet`."""

    kind = "custom"

    def __init__(self, domain, params=None):
        (u0, u1), (v0, v1) = domain
        if not (u1 > u0 and v1 > v0):
            raise ChartError(f"empty parameter domain {domain!r}")
        self.domain = ((float(u0), float(u1)), (float(v0), float(v1)))
        self.params = dict(params or {})

    def __repr__(self):
        p = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({p}; domain={self.domain})"

    @property
    def span(self):
        (u0, u1), (v0, v1) = self.domain
        return u1 - u0, v1 - v0

    def fd_steps(self, rel=1e-4):
        su, sv = self.span
        return rel * su, rel * sv

    def jet(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        u, v = np.broadcast_arrays(u, v)
        return self._jet(u, v)

    def point(self, u, v):
        return self.jet(u, v).r

    def grid(self, nu, nv):
        """Parameter grid with ``nu x nv`` cells, i.e. ``(nu+1) x (nv+1)`` nodes (``indexing='ij'``)."""
        (u0, u1), (v0, v1) = self.domain
        U, V = np.meshgrid(np.linspace(u0, u1, nu + 1), np.linspace(v0, v1, nv + 1), indexing="ij")
        return U, V

    def is_orthogonal(self, u, v, tol=1e-9):
        j = self.jet(u, v)
        cosang = np.einsum("...i,...i->...", j.ru, j.rv) / (
            np.linalg.norm(j.ru, axis=-1) * np.linalg.norm(j.rv, axis=-1)
        )
        return np.abs(cosang) <= tol

    def _jet(self, u, v):  # pragma: no cover - abstract
        raise NotImplementedError


class Plane(Chart):
    """Cartesian plane ``r = (u, v, 0)``."""

    kind = "plane"

    def __init__(self, domain=((-1.0, 1.0), (-1.0, 1.0))):
        super().__init__(domain)

    def _jet(self, u, v):
        z = np.zeros_like(u)
        o = np.ones_like(u)
        r = _stack(u, v, z)
        zero = _stack(z, z, z)
        return Jet(r, _stack(o, z, z), _stack(z, o, z), zero, zero, zero)


class PolarPlane(Chart):
    """Plane in polar coordinates ``r = (u cos v, u sin v, 0)``; ``u`` is the radius."""

    kind = "annulus"

    def __init__(self, r_in=0.5, r_out=2.0, domain=None):
        if not 0.0 < r_in < r_out:
            raise ChartError("annulus needs 0 < r_in < r_out")
        super().__init__(domain or ((r_in, r_out), (0.0, TWO_PI)), {"r_in": r_in, "r_out": r_out})

    def _jet(self, u, v):
        c, s = np.cos(v), np.sin(v)
        z = np.zeros_like(u)
        return Jet(
            _stack(u * c, u * s, z),
            _stack(c, s, z),
            _stack(-u * s, u * c, z),
            _stack(z, z, z),
            _stack(-s, c, z),
            _stack(-u * c, -u * s, z),
        )


class Sphere(Chart):
    """Sphere of radius R, ``u`` polar angle from +z, ``v`` azimuth; outward normal."""

    kind = "sphere"

    def __init__(self, radius=1.0, domain=None):
        if radius <= 0:
            raise ChartError("sphere radius must be positive")
        super().__init__(domain or ((0.1, np.pi - 0.1), (0.0, TWO_PI)), {"radius": radius})
        self.radius = float(radius)

    def _jet(self, u, v):
        R = self.radius
        su, cu, sv, cv = np.sin(u), np.cos(u), np.sin(v), np.cos(v)
        z = np.zeros_like(u)
        return Jet(
            R * _stack(su * cv, su * sv, cu),
            R * _stack(cu * cv, cu * sv, -su),
            R * _stack(-su * sv, su * cv, z),
            R * _stack(-su * cv, -su * sv, -cu),
            R * _stack(-cu * sv, cu * cv, z),
            R * _stack(-su * cv, -su * sv, z),
        )


class Torus(Chart):
    """Torus ``((R + r cos v) cos u, (R + r cos v) sin u, r sin v)``; outward normal."""

    kind = "torus"

    def __init__(self, R=2.0, r=0.5, domain=None):
        if not 0 < r < R:
            raise ChartError("torus needs 0 < r < R")
        super().__init__(domain or ((0.0, TWO_PI), (0.0, TWO_PI)), {"R": R, "r": r})
        self.R, self.r = float(R), float(r)

    def _jet(self, u, v):
        R, r = self.R, self.r
        cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
        w = R + r * cv
        z = np.zeros_like(u)
        return Jet(
            _stack(w * cu, w * su, r * sv),
            _stack(-w * su, w * cu, z),
            _stack(-r * sv * cu, -r * sv * su, r * cv),
            _stack(-w * cu, -w * su, z),
            _stack(r * sv * su, -r * sv * cu, z),
            _stack(-r * cv * cu, -r * cv * su, -r * sv),
        )


class Helicoid(Chart):
    """Helicoid in isothermal form ``(sinh v cos u, sinh v sin u, u)``."""

    kind = "helicoid"

    def __init__(self, domain=((0.0, TWO_PI), (-1.0, 1.0))):
        super().__init__(domain)

    def _jet(self, u, v):
        cu, su = np.cos(u), np.sin(u)
        sh, ch = np.sinh(v), np.cosh(v)
        z = np.zeros_like(u)
        o = np.ones_like(u)
        return Jet(
            _stack(sh * cu, sh * su, u),
            _stack(-sh * su, sh * cu, o),
            _stack(ch * cu, ch * su, z),
            _stack(-sh * cu, -sh * su, z),
            _stack(-ch * su, ch * cu, z),
            _stack(sh * cu, sh * su, z),
        )


class Monge(Chart):
    """Graph ``z = (a u^2 + b v^2)/2 + c u v``; generally non-orthogonal."""

    kind = "monge"

    def __init__(self, a=0.5, b=-0.3, c=0.4, domain=((-1.0, 1.0), (-1.0, 1.0))):
        super().__init__(domain, {"a": a, "b": b, "c": c})
        self.a, self.b, self.c = float(a), float(b), float(c)

    def _jet(self, u, v):
        a, b, c = self.a, self.b, self.c
        z = np.zeros_like(u)
        o = np.ones_like(u)
        return Jet(
            _stack(u, v, 0.5 * (a * u * u + b * v * v) + c * u * v),
            _stack(o, z, a * u + c * v),
            _stack(z, o, b * v + c * u),
            _stack(z, z, a * o),
            _stack(z, z, c * o),
            _stack(z, z, b * o),
        )


class Revolution(Chart):
    """Surface of revolution ``rho(z) e_r + z e_z`` with ``(u, v) = (theta, z)``.

    ``profile`` is either a :class:`ProfileExpr` (or its source text) or a
    callable returning ``(rho, rho', rho'')`` for an array of heights.
    """

    kind = "revolution"

    def __init__(self, profile, zrange, theta_range=(0.0, TWO_PI), name=None):
        if isinstance(profile, str):
            profile = parse_profile(profile)
        self.profile = profile
        z0, z1 = zrange
        super().__init__((theta_range, (z0, z1)), {"profile": getattr(profile, "text", name)})
        if name:
            self.kind = name
        zs = np.linspace(z0, z1, 257)
        rho = self.profile(zs)[0]
        if not np.all(np.isfinite(rho)) or np.any(rho <= 0.0):
            raise ProfileError(f"profile radius must be positive on [{z0}, {z1}]")

    def rho(self, z):
        return self.profile(np.asarray(z, dtype=float))

    def _jet(self, u, v):
        rho, d1, d2 = self.profile(v)
        cu, su = np.cos(u), np.sin(u)
        z = np.zeros_like(u)
        o = np.ones_like(u)
        return Jet(
            _stack(rho * cu, rho * su, v),
            _stack(-rho * su, rho * cu, z),
            _stack(d1 * cu, d1 * su, o),
            _stack(-rho * cu, -rho * su, z),
            _stack(-d1 * su, d1 * cu, z),
            _stack(d2 * cu, d2 * su, z),
        )


def _cosh_profile(z):
    return np.cosh(z), np.sinh(z), np.cosh(z)


def catenoid(zrange=(-1.0, 1.0), theta_range=(0.0, TWO_PI)):
    """Catenoid ``rho = cosh z``; isothermal, principal directions along parameter lines."""
    return Revolution(_cosh_profile, zrange, theta_range, name="catenoid")


def cylinder(radius=1.0, zrange=(-1.0, 1.0)):
    def prof(z):
        z = np.asarray(z, dtype=float)
        return np.full_like(z, radius), np.zeros_like(z), np.zeros_like(z)

    chart = Revolution(prof, zrange, name="cylinder")
    chart.params["radius"] = radius
    return chart


def sphere_of_revolution(radius=1.0, zrange=(-0.9, 0.9)):
    """Sphere as a surface of revolution, ``rho = sqrt(R^2 - z^2)`` (poles excluded)."""

    def prof(z):
        z = np.asarray(z, dtype=float)
        s = np.sqrt(radius * radius - z * z)
        return s, -z / s, -(radius * radius) / (s * s * s)

    chart = Revolution(prof, zrange, name="sphere-revolution")
    chart.params["radius"] = radius
    return chart
