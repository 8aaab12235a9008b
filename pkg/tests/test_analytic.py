import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate
from scipy.special import roots_genlaguerre

from qruler import analytic
from qruler.errors import InputError


def test_gamma_origin():
    for case in (analytic.squeezed(0.3), analytic.two_squeezed(1, 4), analytic.number(3)):
        assert analytic.gamma_analytic(case, 0) == pytest.approx(1 / np.pi ** 2)


def test_squeezed_tau_c_independent_of_lambda():
    for lam in (0.01, 0.25, 1, 4, 100):
        assert analytic.tau_c_analytic(analytic.squeezed(lam)) == pytest.approx(1 / (2 * np.pi ** 3), rel=1e-14)


def test_two_squeezed_tau_c():
    assert analytic.tau_c_analytic(analytic.two_squeezed(1, 4)) == pytest.approx(0.4 / np.pi ** 3, rel=1e-14)


def test_two_squeezed_tau_c_symmetric_and_peaked():
    a = analytic.tau_c_analytic(analytic.two_squeezed(0.5, 3))
    b = analytic.tau_c_analytic(analytic.two_squeezed(3, 0.5))
    assert a == pytest.approx(b, rel=1e-14)
    grid = np.exp(np.linspace(-3, 3, 61))
    vals = [analytic.tau_c_analytic(analytic.two_squeezed(r, 1)) for r in grid]
    assert grid[int(np.argmax(vals))] == pytest.approx(1.0)


def _laguerre_poly_coeffs(n):
    return [Fraction((-1) ** k * math.comb(n, k), math.factorial(k)) for k in range(n + 1)]


def test_number_one_tau_c_exact_fraction():
    # int_0^inf e^{-2t} L_1(t)^4 dt, expanded with int t^k e^{-2t} = k!/2^{k+1}
    c = _laguerre_poly_coeffs(1)
    poly = [Fraction(1)]
    for _ in range(4):
        poly = [sum(poly[i] * c[k - i] for i in range(len(poly)) if 0 <= k - i < len(c))
                for k in range(len(poly) + len(c) - 1)]
    exact = sum(a * Fraction(math.factorial(k), 2 ** (k + 1)) for k, a in enumerate(poly))
    assert exact == Fraction(1, 4)
    assert analytic.tau_c_analytic(analytic.number(1)) * np.pi ** 3 == pytest.approx(0.25, rel=1e-12)


@pytest.mark.parametrize("n", range(6))
def test_number_tau_c_gauss_laguerre(n):
    # e^{-2t} = e^{-t} e^{-t}; after t = s/2 the polynomial integrand is exact
    x, w = roots_genlaguerre(4 * n + 2, 0)
    s = np.polynomial.laguerre.lagval(x / 2, [0] * n + [1])
    ref = 0.5 * np.sum(w * s ** 4) / np.pi ** 3
    assert analytic.tau_c_analytic(analytic.number(n)) == pytest.approx(ref, rel=1e-10)


def test_number_tau_c_decreasing():
    vals = [analytic.tau_c_analytic(analytic.number(n)) for n in range(9)]
    assert all(np.diff(vals) < 0)


def test_tau_c_matches_2d_quadrature():
    case = analytic.two_squeezed(0.5, 2.0)
    val, _ = integrate.dblquad(lambda y, x: analytic.gamma_analytic(case, x + 1j * y) ** 2,
                               -8, 8, -8, 8, epsabs=1e-14)
    assert val == pytest.approx(analytic.tau_c_analytic(case), rel=1e-8)


def test_wigner_analytic_normalized():
    for case in (analytic.squeezed(0.5), analytic.number(2)):
        val, _ = integrate.dblquad(lambda y, x: analytic.wigner_analytic(case, x + 1j * y),
                                   -7, 7, -7, 7, epsabs=1e-12)
        assert val == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(InputError):
        analytic.wigner_analytic(analytic.two_squeezed(1, 2), 0)


def test_directional_analytic():
    assert analytic.directional_coherence_analytic(analytic.number(0), (1, 0)) == pytest.approx(1 / (2 * np.pi))
    assert analytic.directional_coherence_analytic(analytic.squeezed(4), (0, 1)) == \
        pytest.approx(2 / np.pi / 16)


def test_case_validation():
    with pytest.raises(InputError):
        analytic.AnalyticCase("other")
    with pytest.raises(InputError):
        analytic.squeezed(0)
    with pytest.raises(InputError):
        analytic.number(-1)
