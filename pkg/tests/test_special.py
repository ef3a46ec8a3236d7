import numpy as np
import pytest
from conftest import interior
from scipy.spatial.transform import Rotation

from surfkin import kinematics as km
from surfkin import metric_classes as mc
from surfkin import special as sp
from surfkin import tensor3 as t3
from surfkin.errors import BendingAngleSingularity, MinimalityError, PreconditionError, ProfileError
from surfkin.surface import charts as ch
from surfkin.surface.calculus import sample
from surfkin.surface.frames import Coordinate

ALPHAS = np.linspace(0.0, np.pi, 7)


# ---------------------------------------------------------------------------
# Bonnet family


def test_bonnet_zero_angle_is_identity():
    d = sp.bonnet_deformation(0.0)
    U, V = interior(d.chart, 6)
    assert np.allclose(d.point(U, V), d.chart.point(U, V), atol=1e-14)
    assert isinstance(sp.bonnet_deformation(0.0, ch.Sphere()), km.Identity)


def test_bonnet_preconditions():
    with pytest.raises(MinimalityError):
        sp.bonnet_deformation(0.5, ch.Sphere())
    with pytest.raises(PreconditionError):
        sp.bonnet_deformation(0.5, ch.Helicoid())


@pytest.mark.parametrize("alpha", ALPHAS)
def test_bonnet_soft_modes(alpha):
    d = sp.bonnet_deformation(alpha)
    U, V = interior(d.chart, 16)
    k = km.analyze(d, U, V)
    assert max(np.max(np.abs(w)) for w in k.energies.triple()) < 1e-8
    assert mc.classify(d, U, V).isometric
    assert np.max(np.abs(sample(d.image_chart(), U, V).H)) < 1e-6
    assert np.max(np.abs(t3.matmul(k.sample.R, np.eye(3)) - d.drilling_rotation(U, V))) < 1e-10


@pytest.mark.parametrize("alpha", [0.4, 1.0, 2.2])
def test_bonnet_trace_identity(alpha):
    d = sp.bonnet_deformation(alpha)
    U, V = interior(d.chart, 10)
    a1, a2, a3 = d.a_vectors(U, V)
    s = sample(d.chart, U, V)
    assert np.max(np.abs(t3.dot(a1, s.e_u) + t3.dot(a2, s.e_v))) < 1e-12
    assert np.max(np.abs(t3.dot(a2, s.e_u) - t3.dot(a1, s.e_v))) < 1e-12


def test_bonnet_quarter_turn_is_helicoid():
    d = sp.bonnet_deformation(np.pi / 2)
    U, V = d.chart.grid(32, 32)
    helicoid = ch.Helicoid(d.chart.domain)
    assert sp.rigid_fit_rms(d.point(U, V), helicoid.point(U, V)) < 1e-6
    assert sp.rigid_fit_rms(d.chart.point(U, V), helicoid.point(U, V)) > 1e-2


# ---------------------------------------------------------------------------
# eversion


def test_bending_angle_examples():
    assert sp.bending_angle(0.0) == np.pi
    assert np.isclose(sp.bending_angle(1.0), np.pi / 2)
    assert np.isclose(sp.bending_angle(-1.0), -np.pi / 2)


def test_eversion_rejects_non_positive_radius():
    with pytest.raises(ProfileError):
        sp.evert_revolution("z", (-1.0, 1.0))


def test_eversion_gradient_closed_form():
    e = sp.evert_revolution("1 + 0.2*z^2", (-1.0, 1.0))
    U, V = interior(e.chart, 10)
    F = km.deformation_gradient(e, U, V)
    assert np.max(np.abs(F - e.gradient_closed_form(U, V))) < 1e-12
    R = km.deformation_sample(e, U, V).R
    assert np.max(np.abs(R - e.rotation_closed_form(U, V))) < 1e-10


@pytest.mark.parametrize(
    "make, kappa1_tol, finite",
    [
        (lambda: sp.evert_revolution(ch.cylinder(1.3)), 1e-8, False),
        (lambda: sp.evert_revolution(ch.catenoid((0.0, 2.0))), 1e-6, True),
        (lambda: sp.evert_revolution("1 + 0.2*z^2", (-1.0, 1.0)), 1e-6, False),
        (lambda: sp.evert_revolution("1 + z", (0.0, 1.0)), 1e-6, True),
    ],
    ids=["cylinder", "half-catenoid", "quadratic-profile", "cone"],
)
def test_eversion_check(make, kappa1_tol, finite):
    # a half-turn bend (flat profile point) has no finite Rodrigues contents
    e = make()
    rep = sp.eversion_check(e, *interior(e.chart, 24))
    assert rep.isometry_defect < 1e-8 and rep.gradient_defect < 1e-12
    assert rep.eversion_residual < 1e-5
    assert rep.kappa1_defect < kappa1_tol and rep.kappa2_defect < 1e-5
    assert rep.K_defect < 1e-6
    assert max(rep.energies) < 1e-8
    assert max(rep.conditions) < 1e-5
    assert rep.contents_finite == finite


def test_cone_bends_by_quarter_turn():
    e = sp.evert_revolution("1 + z", (0.0, 1.0))
    U, V = interior(e.chart, 6)
    assert np.allclose(e.alpha(U, V), np.pi / 2)


def test_cylinder_eversion_bends_by_half_turn():
    e = sp.evert_revolution(ch.cylinder())
    U, V = interior(e.chart, 6)
    assert np.allclose(e.alpha(U, V), np.pi)
    rep = sp.eversion_check(e, U, V)
    assert not rep.contents_finite and rep.contents_nonfinite_points == U.size


def test_eversion_conditions_on_sphere_zone():
    chart = ch.sphere_of_revolution(1.0, (-0.8, 0.8))
    e = sp.evert_revolution(chart)
    res = sp.eversion_condition_residuals(chart, Coordinate(), e.alpha, *interior(chart, 16))
    assert max(np.max(np.abs(r)) for r in res) < 1e-5


def test_eversion_conditions_reject_arbitrary_angle():
    chart = ch.Torus()
    res = sp.eversion_condition_residuals(chart, Coordinate(), lambda u, v: 0.7 + 0 * u, *interior(chart, 10))
    assert max(np.max(np.abs(r)) for r in res) > 1e-2


def test_eversion_conditions_singular_angle():
    chart = ch.Torus()
    with pytest.raises(BendingAngleSingularity):
        sp.eversion_condition_residuals(chart, Coordinate(), lambda u, v: 0 * u + 1e-7, *interior(chart, 4))


# ---------------------------------------------------------------------------
# sphere rigidity


def cap():
    return ch.Sphere(1.5, ((0.2, 1.0), (0.0, 2.0)))


@pytest.mark.parametrize("seed", range(5))
def test_sphere_rigidity_for_random_rotations(seed):
    chart = cap()
    Q = Rotation.random(random_state=seed).as_matrix()
    assert sp.sphere_rigidity(km.uniform_rotation(chart, Q), *interior(chart, 16)) < 1e-8


def test_sphere_rigidity_composed_rotations():
    chart = cap()
    Q1 = Rotation.random(random_state=1).as_matrix()
    Q2 = Rotation.random(random_state=2).as_matrix()
    d = km.uniform_rotation(km.uniform_rotation(chart, Q1), Q2)
    U, V = interior(chart, 10)
    assert np.allclose(km.deformation_sample(d, U, V).R, Q2 @ Q1)
    assert sp.sphere_rigidity(d, U, V) < 1e-8


def test_sphere_rigidity_negative_control():
    chart = cap()
    d = km.twist(chart, 0.7)
    U, V = interior(chart, 10)
    assert not sp.rigidity_negative_control(d, U, V).isometric
    assert sp.sphere_rigidity(d, U, V) > 1e-2


def test_sphere_rigidity_preconditions():
    chart = cap()
    with pytest.raises(PreconditionError):
        sp.sphere_rigidity(km.scaling(chart, 2.0), *interior(chart, 6))
    with pytest.raises(PreconditionError):
        sp.sphere_rigidity(km.Identity(ch.Torus()), *interior(ch.Torus(), 6))


# ---------------------------------------------------------------------------
# rigid fit


def test_rigid_fit_recovers_motion():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(200, 3))
    Q = Rotation.random(random_state=4).as_matrix()
    moved = pts @ Q.T + np.array([1.0, -2.0, 0.5])
    assert sp.rigid_fit_rms(pts, moved) < 1e-13
    assert sp.rigid_fit_rms(pts, moved + 0.01 * rng.normal(size=pts.shape)) > 1e-3
