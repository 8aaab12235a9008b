"""Closed forms for the squeezed-vacuum, two-squeezing and number-state cases."""
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InputError
from .fock import laguerre


@dataclass(frozen=True)
class AnalyticCase:
    """Probe/tick pair with a known closed form.

    ``squeezed``: probe = tick = squeezed vacuum ``lam``.
    ``two_squeezed``: probe squeezed ``lam``, tick squeezed ``mu``.
    ``number``: probe = tick = ``|n>``.
    """

    kind: str
    lam: float = 1.0
    mu: float = 1.0
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("squeezed", "two_squeezed", "number"):
            raise InputError(f"unknown analytic case {self.kind!r}")
        if self.lam <= 0 or self.mu <= 0:
            raise InputError("squeezing parameters must be positive")
        if self.n < 0:
            raise InputError("photon number must be non-negative")


def squeezed(lam):
    return AnalyticCase("squeezed", lam=float(lam), mu=float(lam))


def two_squeezed(lam, mu):
    return AnalyticCase("two_squeezed", lam=float(lam), mu=float(mu))


def number(n):
    return AnalyticCase("number", n=int(n))


def gamma_analytic(case, tau):
    """Mutual coherence function at ``tau`` (scalar or array)."""
    tau = np.asarray(tau, dtype=complex)
    tx, ty = tau.real, tau.imag
    if case.kind == "number":
        t = tx ** 2 + ty ** 2
        out = np.exp(-t) * laguerre(case.n, 0, t) ** 2 / np.pi ** 2
    else:
        lam, mu = case.lam, case.mu
        s = lam + mu
        out = np.exp(-s * tx ** 2 / (2 * lam * mu) - s * ty ** 2 / 2) / np.pi ** 2
    return float(out) if out.ndim == 0 else out


def _number_tau_c_integral(n, epsrel=1e-12):
    val, _ = integrate.quad(lambda t: np.exp(-2 * t) * laguerre(n, 0, t) ** 4,
                            0, np.inf, epsabs=0, epsrel=epsrel, limit=400)
    return val


def tau_c_analytic(case):
    """Coherence time ``int |Gamma|^2 d^2 tau``.

    For number states the angular integral is done by hand, leaving
    ``pi^-3 int_0^inf exp(-2t) L_n(t)^4 dt`` for adaptive quadrature.
    """
    if case.kind == "number":
        return _number_tau_c_integral(case.n) / np.pi ** 3
    r = case.lam / case.mu
    return np.sqrt(r) / (1 + r) / np.pi ** 3


def wigner_analytic(case, alpha):
    alpha = np.asarray(alpha, dtype=complex)
    x, y = alpha.real, alpha.imag
    if case.kind == "two_squeezed":
        raise InputError("two_squeezed pairs have no single-state Wigner function")
    if case.kind == "number":
        r2 = x ** 2 + y ** 2
        out = 2 * (-1) ** case.n / np.pi * np.exp(-2 * r2) * laguerre(case.n, 0, 4 * r2)
    else:
        lam = case.lam
        out = 2 / np.pi * np.exp(-2 * x ** 2 / lam - 2 * lam * y ** 2)
    return float(out) if out.ndim == 0 else out


def covariance_analytic(case):
    """Quadrature covariance of the probe (only when probe = tick)."""
    if case.kind == "number":
        v = (2 * case.n + 1) / 4
        return np.diag([v, v])
    if case.kind == "squeezed":
        return np.diag([case.lam / 4, 1 / (4 * case.lam)])
    raise InputError("two_squeezed pairs have no single covariance matrix")


def directional_coherence_analytic(case, n):
    """``int (tau . n)^2 Gamma d^2 tau = (2/pi) n^T C n`` for probe = tick."""
    n = np.asarray(n, dtype=float)
    return 2 / np.pi * float(n @ covariance_analytic(case) @ n)
