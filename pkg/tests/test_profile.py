import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfkin import dual
from surfkin.profile import ProfileDomainError, ProfileSyntaxError, parse_profile, pretty


@pytest.mark.parametrize(
    "text,z,expected",
    [
        ("cosh(z)", 0.0, (1.0, 0.0, 1.0)),
        ("1 + 0.2*z^2", 2.0, (1.8, 0.8, 0.4)),
        ("1 + z", 3.0, (4.0, 1.0, 0.0)),
        ("2^z", 1.0, (2.0, 2.0 * math.log(2.0), 2.0 * math.log(2.0) ** 2)),
        ("sqrt(1 - z^2)", 0.6, (0.8, -0.75, -1.0 / 0.8**3)),
        ("exp(-z)/2", 0.0, (0.5, -0.5, 0.5)),
        ("log(z)", 2.0, (math.log(2.0), 0.5, -0.25)),
        ("sin(z)*cos(z)", 0.3, (0.5 * math.sin(0.6), math.cos(0.6), -2.0 * math.sin(0.6))),
        ("sinh(z)", 1.0, (math.sinh(1.0), math.cosh(1.0), math.sinh(1.0))),
    ],
)
def test_jets_match_hand_derivatives(text, z, expected):
    got = parse_profile(text)(z)
    assert np.allclose(got, expected, rtol=1e-14, atol=1e-14)


def test_power_is_right_associative_and_binds_tighter_than_unary_minus():
    assert parse_profile("2^3^2")(0.0)[0] == 512.0
    assert parse_profile("-z^2")(3.0)[0] == -9.0


@pytest.mark.parametrize(
    "text,offset",
    [("2*", 2), ("(z", 2), ("z + foo(z)", 4), ("1 $ 2", 2), ("cosh z", 5), ("z)", 1), ("é*", 0)],
)
def test_syntax_errors_carry_byte_offsets(text, offset):
    with pytest.raises(ProfileSyntaxError) as info:
        parse_profile(text)
    assert info.value.start == offset


def test_error_span_counts_utf8_bytes():
    with pytest.raises(ProfileSyntaxError) as info:
        parse_profile("é")
    assert (info.value.start, info.value.end) == (0, 2)


def test_domain_errors():
    with pytest.raises(ProfileDomainError):
        parse_profile("log(z)")(np.array([-1.0, 1.0]))
    with pytest.raises(ProfileDomainError):
        parse_profile("sqrt(z)")(0.0 - 1.0)


def test_array_evaluation_matches_scalar():
    p = parse_profile("1 + 0.2*z^2")
    zs = np.linspace(-1, 1, 7)
    rho, d1, d2 = p(zs)
    for k, z in enumerate(zs):
        assert (rho[k], d1[k], d2[k]) == p(z)


@given(st.floats(-2, 2))
def test_dual_derivatives_against_finite_differences(z):
    p = parse_profile("cosh(z) + sin(2*z)/(2 + z^2)")
    h = 1e-4
    f = lambda x: p(x)[0]
    rho, d1, d2 = p(z)
    assert abs(d1 - (f(z + h) - f(z - h)) / (2 * h)) < 1e-6
    assert abs(d2 - (f(z + h) - 2 * rho + f(z - h)) / h**2) < 1e-4


def test_dual_algebra():
    x = dual.Dual2.variable(0.5)
    y = x * x * x
    assert np.allclose(y.as_tuple(), (0.125, 0.75, 3.0))


leaf = st.one_of(st.just("z"), st.floats(0.1, 5).map(lambda x: f"{x!r}"))


def _expr(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*/^"), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "sinh", "cosh", "log", "sqrt"]), children).map(
            lambda t: f"{t[0]}({t[1]})"
        ),
        children.map(lambda c: f"-{c}"),
    )


@settings(max_examples=200)
@given(st.recursive(leaf, _expr, max_leaves=12))
def test_pretty_print_round_trip(text):
    ast = parse_profile(text).ast
    again = parse_profile(pretty(ast)).ast
    assert again == ast
