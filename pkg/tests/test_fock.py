import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre

from qruler import fock
from qruler.errors import InputError, TruncationError


def explicit_quadratures(N):
    # built straight from a = sum sqrt(n)|n-1><n|, independent of fock.annihilation
    a = np.zeros((N + 1, N + 1))
    for n in range(1, N + 1):
        a[n - 1, n] = math.sqrt(n)
    return (a + a.T) / 2, 1j * (a.T - a) / 2


# ----------------------------------------------------------------- laguerre

def test_laguerre_zeroth_order_is_one():
    assert fock.laguerre(0, 0, 3.7) == 1.0


def test_laguerre_first_order():
    assert fock.laguerre(1, 0, 1.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("root", [2 - math.sqrt(2), 2 + math.sqrt(2)])
def test_laguerre_two_roots(root):
    assert abs(fock.laguerre(2, 0, root)) < 1e-10


@given(n=st.integers(0, 40), k=st.integers(0, 30), x=st.floats(0, 60))
@settings(max_examples=200, deadline=None)
def test_laguerre_matches_scipy(n, k, x):
    ref = eval_genlaguerre(n, k, x)
    assert fock.laguerre(n, k, x) == pytest.approx(ref, rel=1e-9, abs=1e-9)


def test_laguerre_rejects_out_of_range():
    with pytest.raises(InputError):
        fock.laguerre(513, 0, 1.0)
    with pytest.raises(InputError):
        fock.laguerre(-1, 0, 1.0)


# ------------------------------------------------------------- displacement

def test_displacement_zero_is_identity():
    D = fock.displacement_operator(0, 20).matrix
    np.testing.assert_array_equal(D, np.eye(21))


@pytest.mark.parametrize("beta", [0.4, 1 + 1j, -2.2j])
def test_vacuum_element(beta):
    D = fock.displacement_operator(beta, 60).matrix
    assert abs(D[0, 0]) == pytest.approx(math.exp(-abs(beta) ** 2 / 2), rel=1e-13)


def test_displacement_inverse_on_trusted_subspace():
    beta = np.exp(0.3j)
    D = fock.displacement_operator(beta, 60)
    Dm = fock.displacement_operator(-beta, 60)
    d = D.trusted
    assert d >= 20
    prod = (D.matrix @ Dm.matrix)[:d, :d]
    assert np.max(np.abs(prod - np.eye(d))) < 1e-10
    assert D.unitarity_error() < 1e-10


@given(a=st.complex_numbers(max_magnitude=1.2), b=st.complex_numbers(max_magnitude=1.2))
@settings(max_examples=25, deadline=None)
def test_composition_up_to_phase(a, b):
    N = 60
    Da = fock.displacement_operator(a, N).matrix
    Db = fock.displacement_operator(b, N).matrix
    Dab = fock.displacement_operator(a + b, N)
    d = N + 1 - fock.guard_band(abs(a) + abs(b), N)
    lhs = np.abs((Da @ Db)[:d, :d])
    assert np.max(np.abs(lhs - np.abs(Dab.matrix[:d, :d]))) < 1e-9


def test_displacement_needs_room():
    with pytest.raises(TruncationError) as exc:
        fock.displacement_operator(3.0, 20)
    assert exc.value.suggested_cutoff > 20


def test_displacement_warns_when_large():
    with pytest.warns(UserWarning):
        fock.displacement_operator(7.5, 200)


# ------------------------------------------------------------------- states

def test_squeezed_unit_lambda_is_vacuum():
    s = fock.squeezed_vacuum(1.0, 30)
    np.testing.assert_allclose(s.amplitudes, fock.vacuum(30).amplitudes, atol=1e-15)


def test_squeezed_variance_x():
    assert fock.variance_x(fock.squeezed_vacuum(0.5, 60)) == pytest.approx(0.125, abs=1e-6)


@pytest.mark.parametrize("lam", [0.3, 1.0, 3.0])
def test_squeezed_minimum_uncertainty(lam):
    s = fock.squeezed_vacuum(lam)
    product = math.sqrt(fock.variance_x(s) * fock.variance_y(s))
    assert product == pytest.approx(0.25, abs=1e-6)
    assert fock.variance_x(s) * fock.variance_y(s) == pytest.approx(1 / 16, abs=1e-9)


@pytest.mark.parametrize("lam", [0.05, 0.25, 4.0, 20.0])
def test_squeezed_even_and_normalized(lam):
    s = fock.squeezed_vacuum(lam)
    assert abs(s.norm - 1) < 1e-12
    assert np.all(s.amplitudes[1::2] == 0)
    assert fock.variance_x(s) == pytest.approx(lam / 4, rel=1e-8)


def test_squeezed_auto_escalates_cutoff():
    assert fock.squeezed_vacuum(0.05).cutoff > 60


def test_squeezed_fixed_cutoff_too_small():
    with pytest.raises(TruncationError) as exc:
        fock.squeezed_vacuum(0.05, 60)
    assert exc.value.suggested_cutoff > 60


def test_number_state():
    np.testing.assert_array_equal(fock.number_state(0, 10).amplitudes, np.eye(11)[0])
    assert fock.number_state(2, 10).inner(fock.number_state(3, 10)) == 0
    with pytest.raises(InputError):
        fock.number_state(11, 10)


def test_number_two_variance_by_brute_force():
    N = 12
    X, _ = explicit_quadratures(N)
    v = np.eye(N + 1)[2]
    brute = v @ X @ X @ v - (v @ X @ v) ** 2
    assert brute == pytest.approx(1.25, abs=1e-14)
    assert fock.variance_x(fock.number_state(2, 60)) == pytest.approx(brute, abs=1e-14)


def test_quadratures():
    X, Y = fock.quadrature_operators(30)
    assert X.hermiticity_error() == 0 and Y.hermiticity_error() == 0
    assert X.matrix[0, 0] == 0
    comm = X.matrix @ Y.matrix - Y.matrix @ X.matrix
    n = 29
    assert np.max(np.abs(comm[:n, :n] - 0.5j * np.eye(n))) < 1e-12
    assert (X.matrix @ X.matrix)[0, 0].real == pytest.approx(0.25)


def test_displace_state():
    vac = fock.vacuum(60)
    np.testing.assert_allclose(fock.displace_state(vac, 0).amplitudes, vac.amplitudes)
    beta = 1 + 0.5j
    moved = fock.displace_state(vac, beta)
    assert abs(moved.norm - 1) < 1e-8
    X, Y = fock.quadrature_operators(60)
    assert np.vdot(moved.amplitudes, X.matrix @ moved.amplitudes).real == pytest.approx(1.0, abs=1e-10)
    assert np.vdot(moved.amplitudes, Y.matrix @ moved.amplitudes).real == pytest.approx(0.5, abs=1e-10)


def test_displace_state_reports_leak():
    with pytest.raises(TruncationError):
        fock.displace_state(fock.number_state(5, 20), 3.0)


# --------------------------------------------------------------- covariance

def test_covariance_vacuum_and_squeezed():
    np.testing.assert_allclose(fock.covariance_matrix(fock.vacuum(20)), np.diag([0.25, 0.25]), atol=1e-15)
    np.testing.assert_allclose(fock.covariance_matrix(fock.squeezed_vacuum(4.0)),
                               np.diag([1.0, 1 / 16]), atol=1e-9)


def test_covariance_number_one_brute_force():
    N = 10
    X, Y = explicit_quadratures(N)
    v = np.eye(N + 1)[1].astype(complex)
    ev = lambda A: np.vdot(v, A @ v).real
    brute = np.array([[ev(X @ X) - ev(X) ** 2, ev((X @ Y + Y @ X) / 2) - ev(X) * ev(Y)],
                      [ev((X @ Y + Y @ X) / 2) - ev(X) * ev(Y), ev(Y @ Y) - ev(Y) ** 2]])
    np.testing.assert_allclose(brute, np.diag([0.75, 0.75]), atol=1e-14)
    np.testing.assert_allclose(fock.covariance_matrix(fock.number_state(1, 60)), brute, atol=1e-14)


def test_covariance_of_displaced_squeezed_has_offdiagonal():
    # rotated squeezing is beyond the API; a superposition gives a non-zero C_xy
    v = fock.FockVector(np.r_[1, 1j, 0, 0, 0] / math.sqrt(2))
    C = fock.covariance_matrix(v)
    N = 4
    X, Y = explicit_quadratures(N)
    a = v.amplitudes
    ev = lambda A: np.vdot(a, A @ a).real
    # truncation of X @ X only touches the top level, which v does not reach
    assert C[0, 1] == pytest.approx(ev((X @ Y + Y @ X) / 2) - ev(X) * ev(Y), abs=1e-14)
    assert C[0, 0] == pytest.approx(ev(X @ X) - ev(X) ** 2, abs=1e-14)


def test_cross_covariance_reduces():
    for s in (fock.vacuum(40), fock.number_state(3, 40), fock.squeezed_vacuum(0.7, 60)):
        np.testing.assert_allclose(fock.cross_covariance_matrix(s, s), fock.covariance_matrix(s), atol=1e-12)


def test_cross_covariance_symmetric_in_squeezing():
    a, b = fock.squeezed_vacuum(0.5, 60), fock.squeezed_vacuum(2.0, 60)
    np.testing.assert_allclose(fock.cross_covariance_matrix(a, b), fock.cross_covariance_matrix(b, a),
                               atol=1e-14)


def test_cross_covariance_zero_two():
    N = 8
    X, _ = explicit_quadratures(N)
    e0, e2 = np.eye(N + 1)[0], np.eye(N + 1)[2]
    brute = (e0 @ X @ X @ e2) - abs(e0 @ X @ e2) ** 2
    assert brute == pytest.approx(math.sqrt(2) / 4, abs=1e-15)
    C = fock.cross_covariance_matrix(fock.number_state(0, 30), fock.number_state(2, 30))
    assert C[0, 0] == pytest.approx(brute, abs=1e-15)


def test_cross_covariance_cutoff_mismatch():
    with pytest.raises(InputError):
        fock.cross_covariance_matrix(fock.vacuum(10), fock.vacuum(12))


# ------------------------------------------------------------------ mixtures

def test_mixed_state_validation():
    v0, v1 = fock.number_state(0, 5), fock.number_state(1, 5)
    with pytest.raises(InputError):
        fock.MixedState(((0.5, v0), (0.4, v1)))
    with pytest.raises(InputError):
        fock.MixedState(((1.0, fock.FockVector([1.0, 1.0])),))
    m = fock.MixedState(((0.25, v0), (0.75, v1)))
    np.testing.assert_allclose(np.diag(m.density_matrix())[:2], [0.25, 0.75])


def test_mixed_from_density_drops_tiny_weights():
    rho = np.diag([0.7, 0.3, 1e-14])
    m = fock.MixedState.from_density_matrix(rho)
    assert len(m.components) == 2
