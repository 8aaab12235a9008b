"""Mutual coherence function, outcome statistics and the scalar functionals
built on them (coherence time, resolution, directional coherence).
"""
from dataclasses import dataclass, field

import numpy as np

from . import fock, phase_space
from .errors import InputError, TruncationError
from .fock import FockVector, MixedState
from .phase_space import GridField

NORM_TOL = 1e-5
DROP_WEIGHT = 1e-12


def gamma_char_route(psi, phi, grid):
    """``Gamma(tau) = conj(C_psi(tau)) C_phi(tau) / pi^2`` with
    ``C_s(tau) = <s|D(tau)|s>``."""
    c_psi = phase_space.characteristic(psi, psi, grid.complex_points())
    c_phi = phase_space.characteristic(phi, phi, grid.complex_points())
    return GridField(np.conj(c_psi) * c_phi / np.pi ** 2, grid, "gamma", {"route": "char"})


def gamma_wigner_route(psi, phi, grid, check=True):
    """Autocorrelation of the cross-Wigner function of ``|psi><phi|``, scaled by 1/pi."""
    w = phase_space.wigner_cross(psi, phi, grid)
    out = phase_space.autocorrelate(w, 1 / np.pi, check=check, kind="gamma")
    out.meta["route"] = "wigner"
    return out


def gamma(psi, phi, grid, route="char"):
    if route == "char":
        return gamma_char_route(psi, phi, grid)
    if route == "wigner":
        return gamma_wigner_route(psi, phi, grid)
    raise InputError(f"unknown route {route!r}")


def _as_mixture(state):
    """Accept a FockVector, MixedState or ruler Tick and return a MixedState."""
    if isinstance(state, MixedState):
        comps = [(w, v) for w, v in state.components if w >= DROP_WEIGHT]
        total = sum(w for w, _ in comps)
        return MixedState(tuple((w / total, v) for w, v in comps))
    if isinstance(state, FockVector):
        return MixedState.pure(state)
    if hasattr(state, "operator"):  # ruler.Tick
        return MixedState.from_density_matrix(np.pi * state.operator.matrix, drop=DROP_WEIGHT)
    raise InputError(f"cannot interpret {type(state).__name__} as a state")


def gamma_mixed(rho, tick, grid, route="char"):
    """``sum_jk p_j p'_k Gamma_jk`` over the eigen-components of probe and tick."""
    rho, tick = _as_mixture(rho), _as_mixture(tick)
    total = np.zeros((grid.points, grid.points), dtype=np.complex128)
    for pj, psi in rho.components:
        for pk, phi in tick.components:
            total += pj * pk * gamma(psi, phi, grid, route).values
    return GridField(total, grid, "gamma", {"route": route, "mixed": True})


def _check_norm(p, tol):
    total = p.integral().real
    if abs(total - 1.0) > tol:
        raise TruncationError(f"outcome statistics integrate to {total:.8f}; enlarge the grid or cutoff")


def prob_direct(psi, phi, grid, check=True, tol=NORM_TOL):
    """``p(mu) = |<psi|D(mu)|phi>|^2 / pi`` for pure probe ``psi`` and tick ``phi``."""
    amp = phase_space.characteristic(psi, phi, grid.complex_points())
    p = GridField(np.abs(amp) ** 2 / np.pi, grid, "probability")
    if check:
        _check_norm(p, tol)
    return p


def prob_mixed(rho, tick, grid, check=True, tol=NORM_TOL):
    """Outcome statistics for mixed probe and/or tick, by linearity."""
    rho, tick = _as_mixture(rho), _as_mixture(tick)
    total = np.zeros((grid.points, grid.points))
    for pj, psi in rho.components:
        for pk, phi in tick.components:
            total += pj * pk * prob_direct(psi, phi, grid, check=False).values
    p = GridField(total, grid, "probability")
    if check:
        _check_norm(p, tol)
    return p


def prob_from_gamma(gamma_field, engine="fft", check=True):
    """Symplectic Fourier transform of ``Gamma``; imaginary residue in ``meta``."""
    if gamma_field.kind != "gamma":
        raise InputError(f"expected a gamma field, got {gamma_field.kind}")
    out = phase_space.symplectic_ft(gamma_field, engine=engine, check=check, kind="probability")
    out.meta["max_imag"] = float(np.max(np.abs(out.values.imag)))
    return out


def _require(field_, kind):
    if field_.kind != kind:
        raise InputError(f"expected a {kind} field, got {field_.kind}")


def coherence_time(gamma_field):
    _require(gamma_field, "gamma")
    return float(np.sum(np.abs(gamma_field.values) ** 2) * gamma_field.grid.cell_area)


def resolution(p):
    _require(p, "probability")
    return float(1.0 / (np.sum(np.real(p.values) ** 2) * p.grid.cell_area))


def directional_coherence(gamma_field, n, with_residual=False):
    """``int (tau . n)^2 Gamma(tau) d^2 tau`` along the unit vector ``n``."""
    _require(gamma_field, "gamma")
    n = np.asarray(n, dtype=float)
    if n.shape != (2,) or abs(np.linalg.norm(n) - 1) > 1e-12:
        raise InputError(f"direction must be a unit 2-vector, got {n}")
    t = gamma_field.grid.axis
    proj = n[0] * t[:, None] + n[1] * t[None, :]
    val = np.sum(proj ** 2 * gamma_field.values) * gamma_field.grid.cell_area
    if with_residual:
        return float(val.real), float(abs(val.imag))
    return float(val.real)


def marginal_gamma(gamma_field):
    """``int dtau_y Gamma(tau_x, tau_y)`` as an array over the tau_x axis."""
    _require(gamma_field, "gamma")
    return np.sum(gamma_field.values, axis=1) * gamma_field.grid.spacing


@dataclass
class CoherenceReport:
    tau_c: float
    delta_beta: float
    product: float
    directional: list
    covariance: np.ndarray
    grid: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def parseval_gap(self):
        """``|tau_c * delta_beta * pi^2 - 1|``."""
        return abs(self.product * np.pi ** 2 - 1)

    def as_dict(self):
        return {
            "tau_c": self.tau_c,
            "delta_beta": self.delta_beta,
            "product": self.product,
            "parseval_gap": self.parseval_gap,
            "directional": [
                {"n": list(map(float, n)), "T_c": v, "two_over_pi_nCn": ref, "printed_2nCn": printed}
                for n, v, ref, printed in self.directional
            ],
            "covariance": self.covariance.tolist(),
            "grid": self.grid,
            "diagnostics": self.diagnostics,
        }


DEFAULT_DIRECTIONS = ((1.0, 0.0), (0.0, 1.0), (np.sqrt(0.5), np.sqrt(0.5)))


def coherence_report(psi, phi, grid, directions=DEFAULT_DIRECTIONS, wigner_route=True):
    """All scalar functionals for a pure probe/tick pair plus route gaps.

    The directional entries carry the moment integral, ``(2/pi) n^T C n``
    and the constant ``2 n^T C n`` as printed in the literature, which
    differs from the moment integral by a factor of pi.
    """
    g = gamma_char_route(psi, phi, grid)
    p = prob_direct(psi, phi, grid, check=False)
    tau_c = coherence_time(g)
    delta_beta = resolution(p)
    if psi.cutoff == phi.cutoff:
        cov = fock.cross_covariance_matrix(phi, psi)
    else:
        n = max(psi.cutoff, phi.cutoff)
        cov = fock.cross_covariance_matrix(phi.padded(n), psi.padded(n))
    directional = []
    for n in directions:
        n = np.asarray(n, dtype=float)
        val = directional_coherence(g, n)
        quad = float(n @ cov @ n)
        directional.append((n, val, 2 / np.pi * quad, 2 * quad))
    diag = {
        "norm_p": p.integral().real,
        "gamma0_times_pi2": (g.values[grid.origin_index, grid.origin_index] * np.pi ** 2).real,
        "gamma_boundary": g.boundary_max(),
    }
    p_ft = prob_from_gamma(g, check=False)
    diag["theorem_gap"] = float(np.max(np.abs(p_ft.values - p.values)))
    if wigner_route:
        gw = gamma_wigner_route(psi, phi, grid, check=False)
        diag["route_gap"] = float(np.max(np.abs(gw.values - g.values)))
    return CoherenceReport(tau_c, delta_beta, tau_c * delta_beta, directional, cov,
                           grid.describe(), diag)
