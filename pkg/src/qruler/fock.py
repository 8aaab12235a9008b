"""Truncated Fock-space states, operators and quadrature moments.

Conventions: ``X = (a + a^dag)/2``, ``Y = i(a^dag - a)/2`` so ``[X, Y] = i/2``
and the vacuum has ``Var X = Var Y = 1/4``.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import InputError, TruncationError

DEFAULT_CUTOFF = 60
TAIL_TOL = 1e-10
MAX_LAGUERRE_ORDER = 512
MAX_CUTOFF = 4096


@dataclass(frozen=True)
class FockVector:
    """Pure state amplitudes over ``|0>..|N>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size == 0:
            raise InputError("a Fock vector needs at least one amplitude")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self):
        return self.amplitudes.size - 1

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def tail_mass(self, margin=8):
        """Probability in the top ``margin`` basis states."""
        return float(np.sum(np.abs(self.amplitudes[-margin:]) ** 2))

    def support(self, tol=1e-20):
        """Amplitudes with the trailing negligible entries removed."""
        big = np.nonzero(np.abs(self.amplitudes) > tol)[0]
        last = big[-1] + 1 if big.size else 1
        return self.amplitudes[:last]

    def padded(self, cutoff):
        if cutoff < self.cutoff:
            raise InputError(f"cannot pad cutoff {self.cutoff} down to {cutoff}")
        out = np.zeros(cutoff + 1, dtype=np.complex128)
        out[: self.amplitudes.size] = self.amplitudes
        return FockVector(out)

    def inner(self, other):
        """``<self|other>``, zero-padding the shorter vector."""
        n = min(self.amplitudes.size, other.amplitudes.size)
        return complex(np.vdot(self.amplitudes[:n], other.amplitudes[:n]))

    def projector(self):
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class FockOperator:
    """Dense ``(N+1) x (N+1)`` operator with optional structural flags.

    ``trusted`` is the number of leading basis states on which a truncated
    unitary is accurate; ``None`` means the whole block.
    """

    matrix: np.ndarray
    hermitian: bool = False
    unitary: bool = False
    trusted: int | None = None

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"operator matrix must be square, got {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def cutoff(self):
        return self.matrix.shape[0] - 1

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix)
        if isinstance(other, FockVector):
            return FockVector(self.matrix @ other.amplitudes)
        return NotImplemented

    @property
    def dag(self):
        return FockOperator(self.matrix.conj().T, self.hermitian, self.unitary, self.trusted)

    def hermiticity_error(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def unitarity_error(self):
        """Max deviation of ``M M^dag`` from identity on the trusted block."""
        d = self.matrix.shape[0] if self.trusted is None else self.trusted
        prod = self.matrix @ self.matrix.conj().T
        return float(np.max(np.abs(prod[:d, :d] - np.eye(d))))


@dataclass(frozen=True)
class MixedState:
    """Convex mixture of normalized pure states."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple((float(w), v) for w, v in self.components)
        if not comps:
            raise InputError("a mixture needs at least one component")
        for w, v in comps:
            if not 0.0 < w <= 1.0:
                raise InputError(f"mixture weight {w} outside (0, 1]")
            if abs(v.norm - 1.0) > 1e-10:
                raise InputError(f"mixture component has norm {v.norm}")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"mixture weights sum to {total}, not 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def pure(cls, vector):
        return cls(((1.0, vector),))

    @classmethod
    def from_density_matrix(cls, rho, drop=1e-12):
        """Eigen-decompose ``rho``; components with weight below ``drop`` go."""
        rho = np.asarray(rho, dtype=np.complex128)
        w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        keep = w > drop
        w = w[keep] / np.sum(w[keep])
        return cls(tuple((wi, FockVector(v[:, i])) for wi, i in zip(w, np.nonzero(keep)[0])))

    @property
    def cutoff(self):
        return max(v.cutoff for _, v in self.components)

    def density_matrix(self, cutoff=None):
        n = self.cutoff if cutoff is None else cutoff
        rho = np.zeros((n + 1, n + 1), dtype=np.complex128)
        for w, v in self.components:
            rho += w * v.padded(n).projector()
        return rho


def laguerre(n, k, x):
    """Generalized Laguerre polynomial ``L_n^(k)(x)`` by forward recurrence.

    ``x`` may be a scalar or an array.
    """
    if not (isinstance(n, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise InputError("laguerre orders must be integers")
    if not (0 <= n <= MAX_LAGUERRE_ORDER and 0 <= k <= MAX_LAGUERRE_ORDER):
        raise InputError(f"laguerre orders must lie in [0, {MAX_LAGUERRE_ORDER}], got n={n}, k={k}")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def guard_band(beta, cutoff):
    """Number of top basis states corrupted when D(beta) is truncated at ``cutoff``.

    Empirical bound for a 1e-10 error in ``D(beta) D(-beta) - I``, fitted over
    ``|beta|`` in [0.25, 3] and N in [40, 120] with a few states to spare.
    """
    r = abs(beta)
    if r == 0.0:
        return 0
    return int(math.ceil(14 + 16 * r ** 0.8 * (cutoff / 60) ** 0.6))


def displacement_operator(beta, N=DEFAULT_CUTOFF):
    """Exact matrix elements ``<m|D(beta)|n>`` for ``m, n <= N``.

    The block is unitary only on the trusted leading subspace.
    """
    beta = complex(beta)
    if N < 0:
        raise InputError("cutoff must be non-negative")
    trusted = N + 1 - guard_band(beta, N)
    if trusted < 1:
        need = max(N, 1)
        while need + 1 - guard_band(beta, need) < 1:
            need *= 2
        raise TruncationError(
            f"cutoff {N} leaves no trusted subspace for |beta|={abs(beta):.3g}; try N={need}",
            suggested_cutoff=need,
        )
    if abs(beta) ** 2 > N / 4:
        warnings.warn(f"|beta|^2 = {abs(beta) ** 2:.3g} exceeds N/4 for N = {N}", stacklevel=2)
    mat = _accel.displacement_elements(np.array([beta]), N + 1, N + 1)[0]
    return FockOperator(mat, unitary=True, trusted=trusted)


def _escalate(build, N, tol, what):
    if N is not None:
        vec, tail = build(N)
        if tail > tol:
            n = N
            while build(n)[1] > tol and n < MAX_CUTOFF:
                n *= 2
            raise TruncationError(
                f"{what} has tail mass {tail:.2e} > {tol:.0e} at N={N}; try N={n}",
                suggested_cutoff=n,
            )
        return vec
    n = DEFAULT_CUTOFF
    while True:
        vec, tail = build(n)
        if tail <= tol:
            return vec
        if n >= MAX_CUTOFF:
            raise TruncationError(f"{what} does not converge below N={MAX_CUTOFF}")
        n *= 2


def squeezed_vacuum(lam, N=None, tol=TAIL_TOL):
    """Squeezed vacuum with ``Var X = lam/4`` and ``Var Y = 1/(4 lam)``.

    ``lam = exp(-2r)``.  With ``N=None`` the cutoff starts at 60 and doubles
    until the discarded tail is below ``tol``.
    """
    lam = float(lam)
    if lam <= 0:
        raise InputError(f"squeezing lambda must be positive, got {lam}")
    r = -0.5 * math.log(lam)
    t = math.tanh(r)

    def build(n):
        amps = np.zeros(n + 1)
        m = np.arange(n // 2 + 1)
        if t == 0.0:
            amps[0] = 1.0
        else:
            logc = (-0.5 * math.log(math.cosh(r)) + m * math.log(abs(t))
                    + 0.5 * _lgamma(2 * m + 1) - m * math.log(2) - _lgamma(m + 1))
            amps[0::2] = np.exp(logc) * np.sign(-t) ** m
        kept = float(np.sum(amps ** 2))
        tail = max(0.0, 1.0 - kept)
        return FockVector(amps / math.sqrt(kept)), tail

    return _escalate(build, N, tol, f"squeezed vacuum lambda={lam}")


def _lgamma(x):
    return np.vectorize(math.lgamma, otypes=[float])(x)


def number_state(n, N=DEFAULT_CUTOFF):
    """Fock state ``|n>`` in a space truncated at ``N``."""
    if not 0 <= n <= N:
        raise InputError(f"number state n={n} needs 0 <= n <= N={N}")
    amps = np.zeros(N + 1, dtype=np.complex128)
    amps[n] = 1.0
    return FockVector(amps)


def vacuum(N=DEFAULT_CUTOFF):
    return number_state(0, N)


def coherent_state(alpha, N=None, tol=TAIL_TOL):
    """``D(alpha)|0>`` from its Poisson amplitudes."""
    alpha = complex(alpha)

    def build(n):
        k = np.arange(n + 1)
        amps = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * _lgamma(k + 1)) * alpha ** k
        kept = float(np.sum(np.abs(amps) ** 2))
        return FockVector(amps), max(0.0, 1.0 - kept)

    return _escalate(build, N, tol, f"coherent state alpha={alpha}")


def annihilation(N):
    return np.diag(np.sqrt(np.arange(1, N + 1, dtype=float)), 1).astype(np.complex128)


def quadrature_operators(N=DEFAULT_CUTOFF):
    """Truncated ``X`` and ``Y`` matrices."""
    if N < 1:
        raise InputError("quadratures need N >= 1")
    a = annihilation(N)
    ad = a.conj().T
    X = FockOperator((a + ad) / 2, hermitian=True)
    Y = FockOperator(1j * (ad - a) / 2, hermitian=True)
    return X, Y


def displace_state(state, beta):
    """``D(beta)|psi>`` in the same truncated space.

    Raises TruncationError if the displaced state leaks more than TAIL_TOL
    of its norm out of the space.
    """
    N = state.cutoff
    src = state.support()
    mat = _accel.displacement_elements(np.array([complex(beta)]), N + 1, src.size)[0]
    out = mat @ src
    lost = abs(1.0 - float(np.sum(np.abs(out) ** 2)) / state.norm ** 2)
    if lost > TAIL_TOL:
        need = N
        while need < MAX_CUTOFF:
            need *= 2
            m2 = _accel.displacement_elements(np.array([complex(beta)]), need + 1, src.size)[0]
            if abs(1.0 - float(np.sum(np.abs(m2 @ src) ** 2)) / state.norm ** 2) <= TAIL_TOL:
                break
        raise TruncationError(
            f"displacing by |beta|={abs(beta):.3g} leaks {lost:.2e} of the norm at N={N}; try N={need}",
            suggested_cutoff=need,
        )
    return FockVector(out)


def _quad_images(psi):
    """``X|psi>`` and ``Y|psi>`` in a space two levels larger, so that
    second moments come out free of truncation error."""
    v = psi.padded(psi.cutoff + 2).amplitudes
    a = annihilation(psi.cutoff + 2)
    av, adv = a @ v, a.conj().T @ v
    return v, (av + adv) / 2, 1j * (adv - av) / 2


def moments(phi, psi):
    """First and symmetrized second quadrature moments ``<phi|.|psi>``."""
    f, xf, yf = _quad_images(phi)
    p, xp, yp = _quad_images(psi.padded(phi.cutoff) if psi.cutoff < phi.cutoff else psi)
    if f.size != p.size:
        raise InputError("cutoff mismatch between states")
    return {
        "x": np.vdot(f, xp),
        "y": np.vdot(f, yp),
        "xx": np.vdot(xf, xp),
        "yy": np.vdot(yf, yp),
        "xy_sym": 0.5 * (np.vdot(xf, yp) + np.vdot(yf, xp)),
    }


def variance_x(psi):
    m = moments(psi, psi)
    return float(m["xx"].real - m["x"].real ** 2)


def variance_y(psi):
    m = moments(psi, psi)
    return float(m["yy"].real - m["y"].real ** 2)


def covariance_matrix(psi):
    """Symmetrically ordered quadrature covariance matrix of ``psi``."""
    m = moments(psi, psi)
    mx, my = m["x"].real, m["y"].real
    cxy = m["xy_sym"].real - mx * my
    return np.array([[m["xx"].real - mx * mx, cxy], [cxy, m["yy"].real - my * my]])


def cross_covariance_matrix(phi, psi):
    """Probe/tick covariance matrix for ``phi != psi``.

    ``C_xx = Re<phi|X^2|psi> - |<phi|X|psi>|^2``, likewise for ``Y``, and
    ``C_xy = Re{<phi|(XY+YX)/2|psi> - <phi|X|psi><psi|Y|phi>}``.
    """
    if phi.cutoff != psi.cutoff:
        raise InputError(f"cutoff mismatch: {phi.cutoff} vs {psi.cutoff}")
    m = moments(phi, psi)
    y_rev = np.conj(m["y"])  # <psi|Y|phi>
    cxy = (m["xy_sym"] - m["x"] * y_rev).real
    return np.array([
        [m["xx"].real - abs(m["x"]) ** 2, cxy],
        [cxy, m["yy"].real - abs(m["y"]) ** 2],
    ])
