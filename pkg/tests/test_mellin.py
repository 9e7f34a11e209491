import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mellinbvp.errors import DomainError, TruncationWarning
from mellinbvp.mellin import (
    KernelTerm,
    LogGridFunction,
    MellinLine,
    MeromorphicKernel,
    apply_mellin_convolution,
    cauchy_kernel,
    check_admissible,
    conjugate_xi_grid,
    k1_kernel,
    kernel_from_json,
    kernel_to_json,
    mellin_forward,
    mellin_inverse,
    mellin_symbol,
    mellin_symbol_closed_form,
    multiply_symbol,
)


def log_gauss(t, c=0.0, s=1.0):
    return np.exp(-0.5 * ((np.log(t) - c) / s) ** 2)


# --- kernels -----------------------------------------------------------------


def test_kernel_rejects_pole_at_origin():
    with pytest.raises(DomainError):
        KernelTerm(1.0, 0.0)


def test_kernel_rejects_bad_multiplicity():
    with pytest.raises(DomainError):
        KernelTerm(1.0, -1.0, 0)


def test_admissibility():
    assert check_admissible(MeromorphicKernel(((1.0, -1.0, 3),)))
    assert check_admissible(MeromorphicKernel(((1.0, 2.0, 1),)))
    assert not check_admissible(MeromorphicKernel(((1.0, 2.0, 2),)))


def test_kernel_evaluation_and_split():
    k = MeromorphicKernel(((2.0, -1.0, 1), (1.0, 3.0, 1)))
    np.testing.assert_allclose(k(np.array([1.0])), [2.0 / 2.0 + 1.0 / (1.0 - 3.0)])
    reg, sing = k.split()
    assert len(reg.terms) == 1 and len(sing.terms) == 1
    assert sing.terms[0].c == 3.0


def test_kernel_json_round_trip():
    k = MeromorphicKernel(((1 + 2j, -1 + 0.5j, 2), (0.3, 2.0, 1)))
    doc = json.loads(json.dumps(kernel_to_json(k, 0.5, 1j)))
    k2, c0, c1 = kernel_from_json(doc)
    assert k2 == k and c0 == 0.5 and c1 == 1j


def test_kernel_json_malformed():
    with pytest.raises(DomainError):
        kernel_from_json({"terms": [{"d_re": 1.0}]})


def test_mellin_line_range():
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(DomainError):
            MellinLine(bad)
    assert MellinLine.from_p(4).beta == 0.25


# --- symbols by quadrature ------------------------------------------------------


def test_k1_symbol_value_at_zero():
    # 1/(pi(1+t)) on beta = 1/4 at xi = 0 is 1/sin(pi/4)
    val = mellin_symbol(k1_kernel(-1.0), 0, 0, MellinLine(0.25), 0.0)
    assert abs(val - math.sqrt(2)) < 1e-10


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_k1_symbol_against_mpmath(beta):
    xi = 1.7
    z = beta - 1j * xi
    # log substitution keeps the oscillation tame
    f = lambda x: mpmath.exp(z * x) / (mpmath.pi * (1 + mpmath.exp(x)))
    with mpmath.workdps(30):
        ref = complex(mpmath.quad(f, [-mpmath.inf, -20, -5, 0, 5, 20, mpmath.inf]))
    val = mellin_symbol(k1_kernel(-1.0), 0, 0, MellinLine(beta), xi)
    assert abs(val - ref) < 1e-9


def test_complex_pole_closed_form_matches_quadrature():
    k = MeromorphicKernel(((0.7 - 0.2j, 2.0 * np.exp(2.3j), 1), (0.4, -1.5, 2)))
    xi = np.linspace(-4, 4, 9)
    line = MellinLine(0.4)
    num = mellin_symbol(k, 0.3, 0.0, line, xi)
    ref = mellin_symbol_closed_form(k, 0.3, 0.0, line, xi)
    assert np.max(np.abs(num - ref)) < 1e-8


def test_positive_real_pole_principal_value():
    # PV int t^(z-1)/(t-2) dt = -pi cot(pi z) 2^(z-1)
    k = MeromorphicKernel(((1.0, 2.0, 1),))
    line = MellinLine(0.5)
    for xi in (-1.0, 0.0, 0.8):
        z = 0.5 - 1j * xi
        ref = -np.pi / np.tan(np.pi * z) * 2 ** (z - 1)
        assert abs(mellin_symbol(k, 0, 0, line, xi) - ref) < 1e-8


def test_cauchy_term_symbol():
    line = MellinLine(0.3)
    xi = np.array([-2.0, 0.0, 1.5])
    num = mellin_symbol(MeromorphicKernel(), 0.0, 1.0, line, xi)
    ref = 1.0 / np.tanh(np.pi * (1j * 0.3 + xi))
    np.testing.assert_allclose(num, ref, atol=1e-12)
    via_pole = mellin_symbol_closed_form(cauchy_kernel(1.0), 0.0, 0.0, line, xi)
    np.testing.assert_allclose(via_pole, ref, atol=1e-12)


# --- transform pair --------------------------------------------------------------


def test_forward_matches_gaussian_transform():
    u = LogGridFunction.from_function(log_gauss, 1e-12, 1e12, 1024)
    line = MellinLine(0.3)
    xi = np.linspace(-5, 5, 11)
    got = mellin_forward(u, line, xi)
    z = 0.3 - 1j * xi
    ref = np.sqrt(2 * np.pi) * np.exp(z**2 / 2)
    assert np.max(np.abs(got - ref)) < 1e-12


def test_fast_and_direct_transforms_agree():
    u = LogGridFunction.from_function(lambda t: log_gauss(t, 0.5, 0.8) * (1 + 0.3j * np.log(t)), 1e-8, 1e8, 512)
    line = MellinLine(0.6)
    xi = conjugate_xi_grid(u.n, u.h)
    a = mellin_forward(u, line, xi, fast=True)
    b = mellin_forward(u, line, xi, fast=False)
    assert np.max(np.abs(a - b)) < 1e-12
    back_fast = mellin_inverse(a, xi, line, u, fast=True)
    back_slow = mellin_inverse(a, xi, line, u, fast=False)
    diff = back_fast.weighted(0.6) - back_slow.weighted(0.6)
    assert np.max(np.abs(diff)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(
    c=st.floats(-3, 3),
    s=st.floats(0.3, 2.0),
    beta=st.floats(0.05, 0.95),
)
def test_round_trip_property(c, s, beta):
    u = LogGridFunction.from_function(lambda t: log_gauss(t, c, s), 1e-14, 1e14, 512)
    line = MellinLine(beta)
    xi = conjugate_xi_grid(u.n, u.h)
    back = mellin_inverse(mellin_forward(u, line, xi), xi, line, u)
    # round-off is uniform in the weighted norm
    assert np.max(np.abs(back.weighted(beta) - u.weighted(beta))) < 1e-12


def test_non_decaying_input_warns():
    u = LogGridFunction.from_function(lambda t: np.ones_like(t), 1e-2, 1e2, 64)
    with pytest.warns(TruncationWarning):
        mellin_forward(u, MellinLine(0.5), np.linspace(-1, 1, 5))


def test_inverse_needs_uniform_frequencies():
    u = LogGridFunction.from_function(log_gauss, 1e-3, 1e3, 16)
    with pytest.raises(DomainError):
        mellin_inverse(np.ones(3), [0.0, 1.0, 3.0], MellinLine(0.5), u)


# --- operator application -----------------------------------------------------


def test_apply_k1_against_quad():
    u = LogGridFunction.from_function(lambda t: log_gauss(t, 0.3, 0.7), 1e-10, 1e10, 1024)
    ku = apply_mellin_convolution(k1_kernel(-1.0), 0.0, 0.0, u)
    for t in (1e-3, 0.5, 1.0, 7.0, 300.0):
        k = int(np.argmin(np.abs(np.log(u.t) - np.log(t))))
        tk = u.t[k]
        ref, _ = integrate.quad(lambda x: log_gauss(np.exp(x), 0.3, 0.7) / (np.pi * (tk / np.exp(x) + 1)), -12, 12, limit=200)
        assert abs(ku.values[k] - ref) < 1e-10


def test_apply_matches_symbol_multiplication():
    u = LogGridFunction.from_function(lambda t: log_gauss(t, 0.0, 0.5), 1e-10, 1e10, 1024)
    line = MellinLine(0.35)
    k = MeromorphicKernel(((0.4, -2.0, 1), (0.2 + 0.1j, 1.5 * np.exp(1j), 2)))
    direct = apply_mellin_convolution(k, 0.5, 0.0, u, line)
    spectral = multiply_symbol(u, lambda xi: mellin_symbol_closed_form(k, 0.5, 0.0, line, xi), line)
    assert np.max(np.abs(direct.values - spectral.values)) < 1e-10


def test_apply_positive_pole_matches_symbol():
    n = 1024
    h = 2 * math.log(1e10) / (n - 1)
    c = math.exp(20 * h)  # pole on the grid lattice
    u = LogGridFunction.from_function(lambda t: log_gauss(t, 0.2, 0.6), 1e-10, 1e10, n)
    line = MellinLine(0.5)
    k = MeromorphicKernel(((1.0, c, 1),))
    direct = apply_mellin_convolution(k, 0.0, 0.4, u, line)
    spectral = multiply_symbol(u, lambda xi: mellin_symbol_closed_form(k, 0.0, 0.4, line, xi), line)
    assert np.max(np.abs(direct.values - spectral.values)) < 1e-9


def test_apply_rejects_off_lattice_pole():
    u = LogGridFunction.from_function(log_gauss, 1e-4, 1e4, 64)
    with pytest.raises(DomainError):
        apply_mellin_convolution(MeromorphicKernel(((1.0, 1.2345, 1),)), 0, 0, u)


def test_apply_flags_truncation():
    u = LogGridFunction.from_function(lambda t: 1 / (1 + t), 1e-2, 1e2, 64)
    out = apply_mellin_convolution(k1_kernel(-1.0), 0, 0, u)
    assert out.truncated


# --- grid functions ----------------------------------------------------------------


def test_grid_function_is_read_only_and_checks_grids():
    u = LogGridFunction.from_function(log_gauss, 1e-3, 1e3, 32)
    with pytest.raises(ValueError):
        u.values[0] = 1.0
    v = LogGridFunction.from_function(log_gauss, 1e-3, 1e3, 33)
    with pytest.raises(DomainError):
        u + v


def test_grid_function_rejects_bad_range():
    with pytest.raises(DomainError):
        LogGridFunction(1.0, 0.5, [1, 2])


def test_csv_round_trip(tmp_path):
    u = LogGridFunction.from_function(lambda t: log_gauss(t) * (1 + 1j), 1e-3, 1e3, 40)
    path = tmp_path / "u.csv"
    u.to_csv(path)
    v = LogGridFunction.from_csv(path)
    assert v.same_grid(u)
    np.testing.assert_array_equal(v.values, u.values)
    assert path.read_text().splitlines()[0] == "t,re,im"


def test_interpolation_is_zero_outside():
    u = LogGridFunction.from_function(log_gauss, 1e-3, 1e3, 200)
    vals = u.interpolate(np.array([1e-5, 1.3, 1e5]))
    assert vals[0] == 0 and vals[2] == 0
    assert abs(vals[1] - log_gauss(1.3)) < 1e-8


def test_weighted_norm():
    u = LogGridFunction.from_function(log_gauss, 1e-12, 1e12, 2000)
    # int exp(2 beta x - x^2) dx = sqrt(pi) exp(beta^2)
    assert abs(u.norm(0.5) ** 2 - math.sqrt(math.pi) * math.exp(0.25)) < 1e-10
