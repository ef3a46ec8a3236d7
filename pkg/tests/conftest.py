import numpy as np
import pytest

from surfkin.surface import charts as ch


def interior(chart, n=16, margin=2):
    """Interior nodes of an ``n x n`` cell grid with ``margin`` cells stripped."""
    U, V = chart.grid(n, n)
    return U[margin:-margin, margin:-margin], V[margin:-margin, margin:-margin]


CATALOG = {
    "sphere": lambda: ch.Sphere(1.0),
    "cylinder": lambda: ch.cylinder(1.0),
    "catenoid": lambda: ch.catenoid(),
    "torus": lambda: ch.Torus(2.0, 0.5),
    "revolution": lambda: ch.Revolution("1 + 0.2*z^2", (-1.0, 1.0)),
    "plane": lambda: ch.Plane(),
    "annulus": lambda: ch.PolarPlane(0.5, 2.0),
    "helicoid": lambda: ch.Helicoid(),
    "monge": lambda: ch.Monge(),
}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def quadratic_map(chart, eps=0.15):
    """``y = x + eps (x1^2, x2 x3, x1 x2)``: a generic smooth ambient map, neither conformal nor isoareal."""
    from surfkin.kinematics import AmbientMap

    def g(x):
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        z = np.zeros_like(x1)
        y = x + eps * np.stack([x1 * x1, x2 * x3, x1 * x2], axis=-1)
        J = np.broadcast_to(np.eye(3), x.shape + (3,)).copy()
        J = J + eps * np.stack(
            [np.stack([2 * x1, z, z], -1), np.stack([z, x3, x2], -1), np.stack([x2, x1, z], -1)], -2
        )
        Hs = np.zeros(x.shape[:-1] + (3, 3, 3))
        Hs[..., 0, 0, 0] = 2 * eps
        Hs[..., 1, 1, 2] = Hs[..., 1, 2, 1] = eps
        Hs[..., 2, 0, 1] = Hs[..., 2, 1, 0] = eps
        return y, J, Hs

    return AmbientMap(chart, g, kind="quadratic")


CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record ``(number, passed, detail)`` for the acceptance summary; also printed inline."""

    def record(number, passed, detail):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        CRITERIA[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
