"""Displacement-generated POVM ("quantum ruler") and its consistency checks."""
import warnings
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import InputError
from .fock import FockOperator, FockVector, MixedState

TRACE_TOL = 1e-10
PSD_TOL = -1e-9


@dataclass(frozen=True)
class Tick:
    """Reference POVM element ``Pi_0``: Hermitian, PSD, trace ``1/pi``."""

    operator: FockOperator
    source: FockVector | None = None

    def __post_init__(self):
        m = self.operator.matrix
        if self.operator.hermiticity_error() > 1e-12:
            raise InputError("tick operator is not Hermitian")
        evals = np.linalg.eigvalsh(m)
        if evals[0] < PSD_TOL:
            raise InputError(f"tick operator has eigenvalue {evals[0]:.3e} < 0")
        tr = np.trace(m).real
        if abs(tr - 1 / np.pi) > TRACE_TOL:
            raise InputError(f"tick trace {tr!r} differs from 1/pi")

    @property
    def cutoff(self):
        return self.operator.cutoff

    @property
    def trace(self):
        return float(np.trace(self.operator.matrix).real)

    def components(self):
        """``(weight, vector)`` pairs with ``Pi_0 = sum w |v><v| / pi``."""
        if self.source is not None:
            return [(1.0, self.source.amplitudes)]
        w, v = np.linalg.eigh(np.pi * self.operator.matrix)
        return [(wi, v[:, i]) for i, wi in enumerate(w) if wi > 1e-12]


def tick_from_state(phi):
    """``Pi_0 = |phi><phi| / pi``."""
    if abs(phi.norm - 1) > 1e-12:
        raise InputError(f"tick state must be normalized, norm = {phi.norm}")
    return Tick(FockOperator(phi.projector() / np.pi, hermitian=True), phi)


def tick_from_mixture(mixed):
    op = mixed.density_matrix() / np.pi
    return Tick(FockOperator(0.5 * (op + op.conj().T), hermitian=True))


def _displaced_columns(vectors, alphas, rows):
    """``(D(alpha) v)[:rows]`` for each alpha; result shape (P, len(vectors), rows)."""
    out = []
    for v in vectors:
        v = np.asarray(v)
        big = np.nonzero(np.abs(v) > 1e-20)[0]
        v = v[: (big[-1] + 1 if big.size else 1)]
        elems = _accel.displacement_elements(alphas, rows, v.size)
        out.append(elems @ v)
    return np.stack(out, axis=1)


def povm_element(tick, alpha):
    """``Pi(alpha) = D(alpha) Pi_0 D(alpha)^dag``, PSD by construction."""
    comps = tick.components()
    cols = _displaced_columns([v for _, v in comps], np.array([complex(alpha)]), tick.cutoff + 1)[0]
    w = np.array([wi for wi, _ in comps])
    mat = np.einsum("k,km,kn->mn", w, cols, cols.conj()) / np.pi
    return FockOperator(0.5 * (mat + mat.conj().T), hermitian=True)


def _as_density(rho0):
    if isinstance(rho0, FockVector):
        return rho0.projector()
    if isinstance(rho0, MixedState):
        return rho0.density_matrix()
    return np.asarray(rho0, dtype=np.complex128)


def _displaced_operator(op, beta):
    n = op.shape[0]
    D = _accel.displacement_elements(np.array([complex(beta)]), n, n)[0]
    return D @ op @ D.conj().T


def conditional_prob(rho0, tick, alpha, beta):
    """``p(alpha|beta) = tr[D(beta) rho0 D(beta)^dag D(alpha) Pi_0 D(alpha)^dag]``.

    Plain matrix traces in the truncated space; no phase-space shortcut.
    """
    rho = _as_density(rho0)
    pi0 = tick.operator.matrix
    n = max(rho.shape[0], pi0.shape[0])
    rho = np.pad(rho, (0, n - rho.shape[0]))
    pi0 = np.pad(pi0, (0, n - pi0.shape[0]))
    rho_b = _displaced_operator(rho, beta)
    pi_a = _displaced_operator(pi0, alpha)
    return float(np.real(np.sum(rho_b * pi_a.T)))


def shift_invariance_check(rho0, tick, betas, grid, radius=3.0, stride=8):
    """Largest ``|p(alpha|beta) - p(alpha - beta|0)|`` over sampled alphas and betas.

    Alphas are every ``stride``-th grid point with ``|alpha| <= radius`` so
    the displaced states stay well inside the Fock cutoff.
    """
    pts = grid.complex_points()[::stride, ::stride].ravel()
    pts = pts[np.abs(pts) <= radius]
    worst = 0.0
    for beta in betas:
        if beta == 0:
            continue
        for alpha in pts:
            lhs = conditional_prob(rho0, tick, alpha, beta)
            rhs = conditional_prob(rho0, tick, alpha - beta, 0)
            worst = max(worst, abs(lhs - rhs))
    return worst


def polar_nodes(radius, resolution, angular=None):
    """Gauss-Legendre in r, uniform in angle; returns points and area weights."""
    x, w = np.polynomial.legendre.leggauss(resolution)
    r = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * w * r
    nth = angular or resolution
    th = 2 * np.pi * np.arange(nth) / nth
    pts = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    weights = np.repeat(wr * (2 * np.pi / nth), nth)
    return pts, weights


def completeness_matrix(tick, radius=6.0, resolution=96, subspace=6):
    """``int_{|alpha|<R} Pi(alpha) d^2 alpha`` restricted to ``|0>..|d-1>``."""
    comps = tick.components()
    support = max(np.nonzero(np.abs(v) > 1e-20)[0][-1] + 1 for _, v in comps)
    # uniform angles integrate exp(i k theta) exactly for |k| < n_theta
    angular = max(resolution, 2 * (subspace + support) + 1)
    pts, wts = polar_nodes(radius, resolution, angular)
    cols = _displaced_columns([v for _, v in comps], pts, subspace)  # (P, K, d)
    w = np.array([wi for wi, _ in comps])
    return np.einsum("p,k,pkm,pkn->mn", wts, w, cols, cols.conj()) / np.pi


def completeness_check(tick, radius=6.0, resolution=96, subspace=6, warn_above=1e-3):
    """``max_{m,n<d} |M_mn - delta_mn|`` for the disk-truncated ruler integral."""
    if subspace < 1:
        raise InputError("witness subspace must be at least one-dimensional")
    M = completeness_matrix(tick, radius, resolution, subspace)
    resid = float(np.max(np.abs(M - np.eye(subspace))))
    if resid > warn_above:
        warnings.warn(f"completeness residual {resid:.2e} at R={radius}, resolution={resolution}",
                      stacklevel=2)
    return resid
