import numpy as np
import pytest
from conftest import CATALOG, interior
from hypothesis import given, settings
from hypothesis import strategies as st

from surfkin import tensor3 as t3
from surfkin.errors import ChartError, ImmersionError, ProfileError, UmbilicError
from surfkin.surface import charts as ch
from surfkin.surface.calculus import (
    basis,
    curvature_tensor,
    sample,
    surface_curl,
    surface_divergence,
    surface_gradient,
    surface_gradient_scalar,
)
from surfkin.surface.frames import (
    Coordinate,
    Principal,
    Rotated,
    connectors,
    rotate_frame,
    transform_connectors,
    uv_angle,
)
from surfkin.surface.identities import (
    alternative_gaussian_curvature,
    codazzi_residuals,
    frame_gradient_integrability,
    full_frame_compatibility,
    gauss_residual,
    metric_gaussian_curvature,
    principal_codazzi_residuals,
    scalar_integrability_residual,
)

FRAMES = {
    "principal": Principal(),
    "coordinate": Coordinate(),
    "rotated": Rotated(Coordinate(), uv_angle),
}


# ---------------------------------------------------------------------------
# charts and samples


def test_sphere_radius_two_sample():
    s = sample(ch.Sphere(2.0), 0.7, 1.3)
    assert np.allclose((s.k1, s.k2, s.H, s.K), (0.5, 0.5, 0.5, 0.25), atol=1e-14)


@pytest.mark.parametrize(
    "chart,point,expected",
    [
        (ch.catenoid(), (0.4, 0.0), (1.0, -1.0, 0.0, -1.0)),
        (ch.cylinder(1.0), (0.4, 0.3), (1.0, 0.0, 0.5, 0.0)),
    ],
    ids=["catenoid", "cylinder"],
)
def test_revolution_curvatures(chart, point, expected):
    s = sample(chart, *point)
    assert np.allclose((s.k1, s.k2, s.H, s.K), expected, atol=1e-14)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_sample_invariants(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 12)
    s = sample(chart, U, V)
    assert np.allclose(t3.cross(s.e_u, s.e_v) / np.linalg.norm(t3.cross(s.e_u, s.e_v), axis=-1)[..., None], s.nu)
    assert t3.is_symmetric(s.curvature, 1e-10)
    assert t3.is_tangential(s.curvature, s.nu, 1e-10)
    assert np.all(s.k1 >= s.k2)
    assert np.allclose(t3.dot(t3.cross(s.p1, s.p2), s.nu), 1.0)
    assert np.allclose(2 * s.H, s.k1 + s.k2) and np.allclose(s.K, s.k1 * s.k2)


def test_chart_grid_counts_nodes():
    U, V = ch.Plane().grid(8, 10)
    assert U.shape == (9, 11)
    assert U[0, 0] == -1.0 and U[-1, 0] == 1.0


def test_immersion_and_domain_errors():
    with pytest.raises(ImmersionError):
        sample(ch.Sphere(1.0, domain=((0.0, 1.0), (0.0, 1.0))), 0.0, 0.5)
    with pytest.raises(ChartError):
        ch.Plane(((1.0, 1.0), (0.0, 1.0)))
    with pytest.raises(ProfileError):
        ch.Revolution("z", (-1.0, 1.0))


def test_revolution_from_text_matches_closed_form_catenoid():
    a = ch.Revolution("cosh(z)", (-1.0, 1.0))
    b = ch.catenoid()
    U, V = interior(a, 8)
    ja, jb = a.jet(U, V), b.jet(U, V)
    for f in ("r", "ru", "rv", "ruu", "ruv", "rvv"):
        assert np.allclose(getattr(ja, f), getattr(jb, f), atol=1e-14)


@pytest.mark.parametrize("name", ["sphere", "torus", "helicoid", "monge"])
def test_chart_partials_against_differences(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 6)
    j = chart.jet(U, V)
    hu, hv = chart.fd_steps(1e-5)
    ru = (chart.point(U + hu, V) - chart.point(U - hu, V)) / (2 * hu)
    rvv = (chart.point(U, V + hv) - 2 * j.r + chart.point(U, V - hv)) / hv**2
    ruv = (chart.jet(U, V + hv).ru - chart.jet(U, V - hv).ru) / (2 * hv)
    assert np.allclose(ru, j.ru, atol=1e-8)
    assert np.allclose(ruv, j.ruv, atol=1e-7)
    assert np.allclose(rvv, j.rvv, atol=1e-3)


# ---------------------------------------------------------------------------
# differential operators


def test_gradient_of_constant_is_zero():
    chart = ch.Torus()
    U, V = interior(chart, 6)
    g = surface_gradient_scalar(chart, lambda a, c: np.full_like(a, 3.0), U, V)
    assert np.allclose(g, 0.0, atol=1e-12)


def test_sphere_gradient_of_polar_angle():
    R = 2.0
    chart = ch.Sphere(R)
    U, V = interior(chart, 6)
    g = surface_gradient_scalar(chart, lambda a, c: a, U, V, method="orthogonal")
    assert np.allclose(g, basis(chart, U, V).e_u / R, atol=1e-10)


def test_orthogonal_path_refuses_non_orthogonal_chart():
    chart = ch.Monge()
    with pytest.raises(ChartError):
        surface_gradient_scalar(chart, lambda a, c: a, 0.3, 0.2, method="orthogonal")


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8), st.floats(0, 2 * np.pi))
def test_gradient_matches_directional_derivative(u, v, theta):
    chart = ch.Monge()
    f = lambda a, c: np.sin(a) * np.exp(c) + a * c * c
    g = surface_gradient_scalar(chart, f, u, v)
    j = chart.jet(u, v)
    du, dv = np.cos(theta), np.sin(theta)
    xdot = du * j.ru + dv * j.rv
    h = 1e-5
    fd = (f(u + h * du, v + h * dv) - f(u - h * du, v - h * dv)) / (2 * h)
    assert abs(fd - g @ xdot) < 1e-8


def test_operators_of_constant_vector_vanish():
    chart = ch.Sphere()
    U, V = interior(chart, 6)
    const = lambda a, c: np.broadcast_to([1.0, 2.0, 3.0], a.shape + (3,))
    assert np.allclose(surface_gradient(chart, const, U, V), 0.0)
    assert np.allclose(surface_curl(chart, const, U, V), 0.0)
    assert np.allclose(surface_divergence(chart, const, U, V), 0.0)


def test_divergence_of_sphere_normal():
    R = 1.5
    chart = ch.Sphere(R)
    U, V = interior(chart, 8)
    div = surface_divergence(chart, lambda a, c: basis(chart, a, c).nu, U, V)
    assert np.allclose(div, 2.0 / R, atol=1e-9)


def test_surface_gradient_annihilates_normal():
    chart = ch.Torus()
    U, V = interior(chart, 8)
    G = surface_gradient(chart, lambda a, c: np.stack([np.sin(a), a * c, np.cos(c)], -1), U, V)
    assert np.allclose(t3.matvec(G, basis(chart, U, V).nu), 0.0, atol=1e-12)


@pytest.mark.parametrize("name", ["torus", "monge", "catenoid"])
def test_curl_of_gradient_is_tangential(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 8)
    phi = lambda a, c: np.sin(2 * a) * np.cos(c) + a * c

    def grad(a, c):
        return surface_gradient(chart, phi, a, c)

    curl = surface_curl(chart, grad, U, V)
    assert np.max(np.abs(t3.dot(curl, basis(chart, U, V).nu))) < 1e-5


@pytest.mark.parametrize("name", ["torus", "monge", "catenoid"])
def test_scalar_integrability_of_tangential_gradient(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 8)
    f = lambda a, c: surface_gradient(chart, lambda x, y: np.sin(x) * y + x * x, a, c)
    assert np.max(scalar_integrability_residual(chart, f, U, V)) < 1e-5


def test_finite_difference_curvature_matches_exact():
    chart = ch.Torus()
    U, V = interior(chart, 8)
    G = surface_gradient(chart, lambda a, c: basis(chart, a, c).nu, U, V)
    assert np.max(np.abs(G - curvature_tensor(chart, U, V))) < 1e-9


# ---------------------------------------------------------------------------
# frames and connectors


def test_sphere_principal_connectors():
    R = 2.0
    chart = ch.Sphere(R)
    U, V = interior(chart, 8)
    cs = connectors(chart, Principal(), U, V)
    assert np.all(cs.fallback)
    assert np.allclose(cs.d1, -cs.e1 / R) and np.allclose(cs.d2, -cs.e2 / R)


def test_principal_frame_strict_raises_at_umbilics():
    with pytest.raises(UmbilicError):
        connectors(ch.Sphere(), Principal(), 1.0, 1.0, strict=True)


def test_principal_connectors_are_diagonal():
    chart = ch.Torus()
    U, V = interior(chart, 8)
    cs = connectors(chart, Principal(), U, V)
    s = sample(chart, U, V)
    assert np.allclose(cs.d1, -s.k1[..., None] * cs.e1, atol=1e-12)
    assert np.allclose(cs.d2, -s.k2[..., None] * cs.e2, atol=1e-12)


def test_plane_coordinate_connectors_vanish():
    chart = ch.Plane()
    U, V = interior(chart, 6)
    cs = connectors(chart, Coordinate(), U, V)
    for x in (cs.c, cs.d1, cs.d2):
        assert np.allclose(x, 0.0, atol=1e-12)


@pytest.mark.parametrize("name", ["torus", "monge", "helicoid", "revolution"])
@pytest.mark.parametrize("frame", sorted(FRAMES))
def test_connectors_tangential_and_symmetric(name, frame):
    chart = CATALOG[name]()
    U, V = interior(chart, 8)
    cs = connectors(chart, FRAMES[frame], U, V, d_method="fd")
    for x in (cs.c, cs.d1, cs.d2):
        assert np.max(np.abs(t3.dot(x, cs.nu))) < 1e-9
    assert np.max(np.abs(cs.symmetry_defect())) < 1e-8
    assert np.allclose(t3.matmul(cs.frame, t3.transpose(cs.frame)), np.eye(3), atol=1e-12)
    assert np.allclose(np.linalg.det(cs.frame), 1.0)


def test_exact_and_differenced_curvature_connectors_agree():
    chart = ch.Monge()
    U, V = interior(chart, 8)
    a = connectors(chart, Coordinate(), U, V)
    b = connectors(chart, Coordinate(), U, V, d_method="fd")
    assert np.allclose(a.d1, b.d1, atol=1e-9) and np.allclose(a.d2, b.d2, atol=1e-9)


def test_transform_connectors_identity_and_constant():
    chart = ch.Torus()
    U, V = interior(chart, 6)
    cs = connectors(chart, Coordinate(), U, V)
    same = transform_connectors(cs, 0.0, np.zeros_like(cs.c))
    assert np.allclose(same.c, cs.c) and np.allclose(same.d1, cs.d1)
    rot = transform_connectors(cs, 0.4, np.zeros_like(cs.c))
    assert np.allclose(rot.c, cs.c)
    assert np.allclose(t3.dot(rot.d1, rot.d1) + t3.dot(rot.d2, rot.d2), t3.dot(cs.d1, cs.d1) + t3.dot(cs.d2, cs.d2))


@pytest.mark.parametrize("name", ["torus", "monge", "catenoid"])
def test_transform_connectors_matches_direct(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 8)
    cs = connectors(chart, Coordinate(), U, V)
    alpha = lambda a, c: 0.3 * a * c + np.sin(a)
    ga = surface_gradient(chart, alpha, U, V)
    moved = transform_connectors(cs, alpha(U, V), ga)
    direct = connectors(chart, Rotated(Coordinate(), alpha), U, V)
    assert np.allclose(moved.frame, direct.frame, atol=1e-14)
    for x, y in ((moved.c, direct.c), (moved.d1, direct.d1), (moved.d2, direct.d2)):
        assert np.max(np.abs(x - y)) < 1e-8


def test_rotate_frame_zero_is_identity():
    fr = np.eye(3)[None]
    assert np.array_equal(rotate_frame(fr, np.zeros(1)), fr)


# ---------------------------------------------------------------------------
# compatibility identities


@pytest.mark.parametrize("name", ["sphere", "cylinder", "catenoid", "torus", "revolution", "monge", "helicoid"])
@pytest.mark.parametrize("frame", sorted(FRAMES))
def test_gauss_and_codazzi(name, frame):
    chart = CATALOG[name]()
    U, V = interior(chart, 16)
    assert np.max(np.abs(gauss_residual(chart, FRAMES[frame], U, V))) < 1e-6
    r1, r2 = codazzi_residuals(chart, FRAMES[frame], U, V)
    assert max(np.max(np.abs(r1)), np.max(np.abs(r2))) < 1e-5


def test_gauss_in_random_smooth_frame(rng):
    a, b, c = rng.uniform(-1, 1, 3)
    frame = Rotated(Coordinate(), lambda u, v: a * u + b * v + c * u * v)
    chart = ch.Torus()
    U, V = interior(chart, 12)
    assert np.max(np.abs(gauss_residual(chart, frame, U, V))) < 1e-5


@pytest.mark.parametrize("name", ["catenoid", "torus", "revolution"])
def test_principal_codazzi_forms(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 12)
    r1, r2 = principal_codazzi_residuals(chart, Principal(), U, V)
    assert max(np.max(np.abs(r1)), np.max(np.abs(r2))) < 1e-5


def test_principal_codazzi_rejects_umbilics():
    chart = ch.Sphere()
    with pytest.raises(UmbilicError):
        principal_codazzi_residuals(chart, Principal(), *interior(chart, 8))


@pytest.mark.parametrize(
    "name,tol", [("plane", 0.0), ("sphere", 1e-6), ("revolution", 1e-5), ("torus", 1e-5), ("monge", 1e-5)]
)
def test_full_frame_compatibility(name, tol):
    chart = CATALOG[name]()
    U, V = interior(chart, 10)
    for r in full_frame_compatibility(chart, Coordinate(), U, V):
        assert np.max(np.abs(r)) <= tol


@pytest.mark.parametrize("name", ["sphere", "cylinder", "catenoid", "torus", "revolution", "plane", "annulus"])
def test_metric_gaussian_curvature(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 16)
    assert np.max(np.abs(metric_gaussian_curvature(chart, U, V) - sample(chart, U, V).K)) < 1e-6


def test_metric_curvature_closed_forms():
    R = 1.7
    chart = ch.Sphere(R)
    assert np.allclose(metric_gaussian_curvature(chart, *interior(chart, 8)), 1.0 / R**2, atol=1e-8)
    assert abs(metric_gaussian_curvature(ch.Plane(), 0.1, 0.2)) < 1e-12
    K = metric_gaussian_curvature(ch.catenoid(), 0.5, 1.0)
    assert abs(K + 1.0 / np.cosh(1.0) ** 4) < 1e-6


def test_metric_curvature_refuses_non_orthogonal_chart():
    with pytest.raises(ChartError):
        metric_gaussian_curvature(ch.Monge(), 0.3, 0.2)


@pytest.mark.parametrize("name", ["torus", "monge", "catenoid"])
def test_alternative_curvature_formula(name):
    chart = CATALOG[name]()
    U, V = interior(chart, 10)
    assert np.max(np.abs(alternative_gaussian_curvature(chart, Coordinate(), U, V) - sample(chart, U, V).K)) < 1e-6


@pytest.mark.parametrize("name", ["torus", "monge", "revolution"])
@pytest.mark.parametrize("frame", ["coordinate", "rotated"])
def test_frame_gradient_integrability(name, frame):
    chart = CATALOG[name]()
    U, V = interior(chart, 8)
    assert np.max(frame_gradient_integrability(chart, FRAMES[frame], U, V)) < 1e-5
