import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mellinbvp.errors import DomainError, SingularSampleError
from mellinbvp.mellin import MellinLine, MeromorphicKernel, k1_kernel, mellin_symbol_closed_form
from mellinbvp.symbols import (
    CORNERS,
    ORIENTATION,
    Edge,
    RectanglePath,
    RectanglePoint,
    SpaceParams,
    SymbolMatrix,
    SymbolSpec,
    compactify,
    composite_symbol,
    identity_symbol,
    identity_values,
    inv_sin,
    k1_gamma,
    k1_symbol,
    sample_det_curve,
    spec_from_json,
    spec_to_json,
    system_det_gamma1,
    system_symbol,
    write_curve_csv,
)


def test_space_params_validation():
    for p in (1.0, 0.5, math.inf):
        with pytest.raises(DomainError):
            SpaceParams(p, 0.0)
    with pytest.raises(DomainError):
        SpaceParams(2.0, math.nan)
    assert SpaceParams(4, 1).beta == 0.25


def test_point_validation_and_canonical_corners():
    with pytest.raises(DomainError):
        RectanglePoint(Edge.GAMMA2_PLUS, -1.0)
    with pytest.raises(DomainError):
        RectanglePoint(Edge.GAMMA1, math.nan)
    for a, b in CORNERS:
        assert a.same_as(b)
    assert not RectanglePoint(Edge.GAMMA1, 0.0).same_as(RectanglePoint(Edge.GAMMA3, 0.0))


def test_compactify_exact_infinities():
    v = compactify([-1.0, 0.0, 1.0])
    assert v[0] == -math.inf and v[1] == 0 and v[2] == math.inf


def test_path_is_closed_and_ordered():
    path = RectanglePath.full(33)
    assert len(path) == 4 * 33
    assert path.edges[0] is Edge.GAMMA1 and path.edges[-1] is Edge.GAMMA2_MINUS
    first, last = RectanglePoint(path.edges[0], path.coords[0]), RectanglePoint(path.edges[-1], path.coords[-1])
    assert first.same_as(last)
    slices = path.edge_slices()
    assert list(slices) == list(ORIENTATION)
    # each edge starts where the previous one ends
    for e_prev, e_next in zip(ORIENTATION, ORIENTATION[1:]):
        a = RectanglePoint(e_prev, path.coords[slices[e_prev][-1]])
        b = RectanglePoint(e_next, path.coords[slices[e_next][0]])
        assert a.same_as(b)
    assert len(path.refined(2)) == 4 * 65


def test_gamma1_path_contains_zero():
    path = RectanglePath.gamma1(100)
    assert 0.0 in path.coords
    with pytest.raises(DomainError):
        RectanglePath.full(2)


def test_inv_sin_is_stable():
    xi = np.array([-1e4, -3.0, 0.0, 2.5, 1e4, np.inf])
    ref = np.zeros(xi.shape, complex)
    ref[1:4] = 1 / np.sin(np.pi * (0.3 - 1j * xi[1:4]))
    np.testing.assert_allclose(inv_sin(0.3, xi), ref, atol=1e-15)


def test_identity_trivial_at_order_zero():
    params = SpaceParams(2.7, 0.0)
    path = RectanglePath.full(65)
    np.testing.assert_allclose(identity_values(params, path.edges, path.coords), 1.0, atol=1e-13)


def test_identity_integer_order_on_gamma1():
    # s = 1: sin(pi(z+1))/sin(pi z) = -1, times e^{i pi} = -1, gives 1
    xi = np.linspace(-6, 6, 25)
    vals = identity_values(SpaceParams(3.0, 1.0), [Edge.GAMMA1] * xi.size, xi)
    np.testing.assert_allclose(vals, 1.0, atol=1e-12)


def test_identity_gamma2_limits():
    params = SpaceParams(2.0, 0.3)
    assert abs(identity_symbol(params, (Edge.GAMMA2_PLUS, 0.0)) - np.exp(1j * np.pi * 0.3)) < 1e-15
    assert abs(identity_symbol(params, (Edge.GAMMA2_PLUS, math.inf)) - np.exp(2j * np.pi * 0.3)) < 1e-15
    assert abs(identity_symbol(params, (Edge.GAMMA2_MINUS, math.inf)) - 1.0) < 1e-15


def test_identity_rejects_bad_gamma():
    with pytest.raises(DomainError):
        identity_symbol(SpaceParams(2.0, 0.3), (Edge.GAMMA2_PLUS, 1.0), gamma=-1j)


def test_k1_matches_mellin_symbol_of_kernel():
    # at s = 0 the lifted Gamma1 symbol is the plain Mellin symbol
    c = 2.0 * np.exp(2.2j)
    beta = 0.4
    xi = np.linspace(-3, 3, 13)
    lifted = k1_gamma(c, SpaceParams(1 / beta, 0.0), xi)
    # (1/pi) int v(tau) dtau/(t - c tau) is (1/pi) k(t/tau) dtau/tau with k(x) = 1/(x - c)
    direct = mellin_symbol_closed_form(MeromorphicKernel(((1 / np.pi, c, 1),)), 0, 0, MellinLine(beta), xi)
    np.testing.assert_allclose(lifted, direct, atol=1e-12)


def test_k1_minus_one_is_inverse_sine():
    xi = np.linspace(-4, 4, 9)
    ref = mellin_symbol_closed_form(k1_kernel(-1.0), 0, 0, MellinLine(0.25), xi)
    np.testing.assert_allclose(k1_gamma(-1.0, SpaceParams(4.0, 0.0), xi), ref, atol=1e-13)


def test_k1_rejects_positive_c():
    with pytest.raises(DomainError):
        k1_symbol(2.0, SpaceParams(2.0, 0.0), (Edge.GAMMA1, 0.0))
    with pytest.raises(DomainError):
        k1_symbol(0.0, SpaceParams(2.0, 0.0), (Edge.GAMMA1, 0.0))


def test_composite_is_linear():
    params = SpaceParams(2.5, 0.4)
    c1, c2 = -1.0, 1.5 * np.exp(0.7j)
    spec = SymbolSpec(0.5 + 0.2j, ((1.0, c1), (-0.3j, c2)), params)
    w = (Edge.GAMMA1, 0.37)
    ref = (0.5 + 0.2j) * identity_symbol(params, w) + k1_symbol(c1, params, w) - 0.3j * k1_symbol(c2, params, w)
    assert abs(composite_symbol(spec, w) - ref) < 1e-14


def test_spec_rejects_real_c_gamma():
    with pytest.raises(DomainError):
        SymbolSpec(1.0, ((1.0, 1j),), SpaceParams(2.0, 0.0), gamma=1j)


def test_spec_json_round_trip():
    spec = SymbolSpec(1 + 1j, ((0.5, -2.0), (1j, np.exp(1j))), SpaceParams(3.0, -0.2), 0.3 + 1j)
    back = spec_from_json(spec_to_json(spec))
    assert back == spec


def test_system_matrix_and_closed_form():
    params = SpaceParams(1.7, -0.35)
    xi = np.linspace(-5, 5, 21)
    closed = system_det_gamma1(params, xi)
    direct = np.array([system_symbol(params, (Edge.GAMMA1, x)).det for x in xi])
    np.testing.assert_allclose(direct, closed, atol=1e-12)
    m = system_symbol(params, (Edge.GAMMA3, 0.5))
    assert m.dimension == 2
    assert m.entries[0, 1] == m.entries[1, 0]
    with pytest.raises(DomainError):
        SymbolMatrix(np.zeros((2, 3)))


def test_system_det_zero_on_gamma3_at_half():
    # Gamma3 det is e^{2 pi i r} - e^{-2 pi i r} / sin^2(pi z); at r = -1/2, z = 1/2 it is -1 + 1
    params = SpaceParams(2.0, -0.5)
    assert abs(system_symbol(params, (Edge.GAMMA3, 0.0)).det) < 1e-14


def test_sample_det_curve_rejects_unknown_target(tmp_path):
    with pytest.raises(DomainError):
        sample_det_curve("nope", RectanglePath.gamma1(11))
    path = RectanglePath.full(9)
    vals = sample_det_curve(SpaceParams(2.5, 0.2), path)
    write_curve_csv(tmp_path / "c.csv", path, vals)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "u,edge,re_det,im_det" and len(lines) == len(path) + 1


def test_singular_sample_error_is_numerical():
    assert issubclass(SingularSampleError, ArithmeticError)


@settings(max_examples=40, deadline=None)
@given(
    p=st.floats(1.05, 20.0),
    s=st.floats(-2.5, 2.5),
    arg=st.floats(0.05, 2 * math.pi - 0.05),
    gamma_arg=st.floats(0.05, math.pi - 0.05),
)
def test_corner_continuity_property(p, s, arg, gamma_arg):
    params = SpaceParams(p, s)
    gamma = complex(np.exp(1j * gamma_arg))
    c = np.exp(1j * arg)
    if abs((c * gamma).imag) < 1e-9:
        return
    spec = SymbolSpec(1.0, ((0.7, c),), params, gamma)
    for a, b in CORNERS:
        assert abs(identity_symbol(params, a, gamma) - identity_symbol(params, b, gamma)) < 1e-8
        assert abs(k1_symbol(c, params, a) - k1_symbol(c, params, b)) < 1e-8
        assert abs(composite_symbol(spec, a) - composite_symbol(spec, b)) < 1e-8


@settings(max_examples=30, deadline=None)
@given(p=st.floats(1.05, 20.0), s=st.floats(-2.0, 2.0))
def test_identity_modulus_on_gamma2_property(p, s):
    # |((eta - i)/(eta + i))^s| = 1 for gamma = i, so the modulus is e^{0} up to the branch
    params = SpaceParams(p, s)
    eta = np.array([0.0, 0.3, 2.0, 50.0])
    vals = identity_values(params, [Edge.GAMMA2_PLUS] * eta.size, eta, 1j)
    np.testing.assert_allclose(np.abs(vals), 1.0, atol=1e-12)
