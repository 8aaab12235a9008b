"""Hot kernels for displacement matrix elements.

Every kernel has a numba version and a pure-numpy version.  The numba path is
used when numba imports and ``QRULER_DISABLE_JIT`` is unset (or "0"); the
numpy path vectorizes over phase-space points instead of looping over them.

Both evaluate the normalized matrix elements

    E_j^(k)(beta) = sqrt(j!/(j+k)!) |beta|^k exp(-|beta|^2/2) L_j^(k)(|beta|^2)

with the three-term Laguerre recurrence rewritten for E directly, so no
factorials or large Laguerre values are ever formed:

    E_{j+1} = ((2j+1+k-x) E_j - sqrt(j(j+k)) E_{j-1}) / sqrt((j+1)(j+k+1))

and ``<j+k|D(beta)|j> = u^k E_j^(k)``, ``<j|D(beta)|j+k> = (-conj u)^k E_j^(k)``
with ``u = beta/|beta|``.
"""
import os

import numpy as np

# exp(-x/2) underflows to subnormals beyond this
MAX_ABS2 = 1400.0

# the default layer probes an outdated TBB on some hosts and warns
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_backend = None


def _env_backend():
    flag = os.environ.get("QRULER_DISABLE_JIT", "0").strip().lower()
    if not HAVE_NUMBA or flag not in ("", "0", "false", "no"):
        return "numpy"
    return "numba"


def get_backend():
    """Name of the active kernel backend, "numba" or "numpy"."""
    return _backend or _env_backend()


def set_backend(name):
    """Force a backend for this process; ``None`` restores the env default."""
    global _backend
    if name not in (None, "numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    _backend = name


def configure_threads():
    """Apply RULER_THREADS as an upper bound on numba's thread pool."""
    value = os.environ.get("RULER_THREADS")
    if not value or not HAVE_NUMBA:
        return
    n = max(1, min(int(value), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def _check_range(betas):
    if betas.size and np.max(np.abs(betas)) ** 2 > MAX_ABS2:
        raise ValueError(f"|beta|^2 exceeds {MAX_ABS2}; elements underflow")


def _recurrence_tables(n):
    """``ca[k, j] = 1/sqrt((j+1)(j+k+1))`` and ``cb[k, j] = sqrt(j(j+k))``."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    return 1.0 / np.sqrt((j + 1.0) * (j + k + 1.0)), np.sqrt(j * (j + k + 0.0))


# --------------------------------------------------------------------- numba

if HAVE_NUMBA:

    @njit(cache=True)
    def _contract_point_nb(beta, a_conj, b, ca, cb):
        na = a_conj.shape[0]
        nb_ = b.shape[0]
        x = beta.real * beta.real + beta.imag * beta.imag
        r = np.sqrt(x)
        if r == 0.0:
            s = 0j
            for j in range(min(na, nb_)):
                s += a_conj[j] * b[j]
            return s
        u = beta / r
        ucm = -np.conj(u)
        e0 = np.exp(-0.5 * x)
        phase_lo = 1.0 + 0j
        phase_hi = 1.0 + 0j
        total = 0j
        kmax = max(na, nb_) - 1
        for k in range(kmax + 1):
            if k > 0:
                e0 = e0 * r / np.sqrt(k)
                phase_lo *= u
                phase_hi *= ucm
            # lower triangle: m = j + k, n = j
            jlo = min(na - k, nb_)
            jhi = min(na, nb_ - k) if k > 0 else 0
            jmax = max(jlo, jhi)
            if jmax <= 0:
                continue
            s_lo = 0j
            s_hi = 0j
            e_prev = 0.0
            e_cur = e0
            for j in range(jmax):
                if j < jlo:
                    s_lo += a_conj[j + k] * b[j] * e_cur
                if j < jhi:
                    s_hi += a_conj[j] * b[j + k] * e_cur
                e_next = ((2 * j + 1 + k - x) * e_cur - cb[k, j] * e_prev) * ca[k, j]
                e_prev = e_cur
                e_cur = e_next
            total += phase_lo * s_lo + phase_hi * s_hi
        return total

    @njit(parallel=True, cache=True)
    def _contract_nb(betas, a_conj, b, ca, cb):
        out = np.empty(betas.shape[0], dtype=np.complex128)
        for p in prange(betas.shape[0]):
            out[p] = _contract_point_nb(betas[p], a_conj, b, ca, cb)
        return out

    @njit(parallel=True, cache=True)
    def _elements_nb(betas, rows, cols, ca, cb):
        P = betas.shape[0]
        out = np.zeros((P, rows, cols), dtype=np.complex128)
        for p in prange(P):
            beta = betas[p]
            x = beta.real * beta.real + beta.imag * beta.imag
            r = np.sqrt(x)
            if r == 0.0:
                for j in range(min(rows, cols)):
                    out[p, j, j] = 1.0
                continue
            u = beta / r
            ucm = -np.conj(u)
            e0 = np.exp(-0.5 * x)
            phase_lo = 1.0 + 0j
            phase_hi = 1.0 + 0j
            for k in range(max(rows, cols)):
                if k > 0:
                    e0 = e0 * r / np.sqrt(k)
                    phase_lo *= u
                    phase_hi *= ucm
                jlo = min(rows - k, cols)
                jhi = min(rows, cols - k) if k > 0 else 0
                jmax = max(jlo, jhi)
                e_prev = 0.0
                e_cur = e0
                for j in range(jmax):
                    if j < jlo:
                        out[p, j + k, j] = phase_lo * e_cur
                    if j < jhi:
                        out[p, j, j + k] = phase_hi * e_cur
                    e_next = ((2 * j + 1 + k - x) * e_cur - cb[k, j] * e_prev) * ca[k, j]
                    e_prev = e_cur
                    e_cur = e_next
        return out


# --------------------------------------------------------------------- numpy

def _contract_np(betas, a_conj, b):
    na, nb_ = a_conj.shape[0], b.shape[0]
    x = betas.real ** 2 + betas.imag ** 2
    r = np.sqrt(x)
    zero = r == 0.0
    u = np.where(zero, 1.0, betas / np.where(zero, 1.0, r))
    ucm = -np.conj(u)
    e0 = np.exp(-0.5 * x)
    phase_lo = np.ones_like(betas)
    phase_hi = np.ones_like(betas)
    total = np.zeros_like(betas)
    for k in range(max(na, nb_)):
        if k > 0:
            e0 = e0 * r / np.sqrt(k)
            phase_lo = phase_lo * u
            phase_hi = phase_hi * ucm
        jlo = min(na - k, nb_)
        jhi = min(na, nb_ - k) if k > 0 else 0
        jmax = max(jlo, jhi)
        if jmax <= 0:
            continue
        s_lo = np.zeros_like(betas)
        s_hi = np.zeros_like(betas)
        e_prev = np.zeros_like(x)
        e_cur = e0
        for j in range(jmax):
            if j < jlo:
                s_lo += (a_conj[j + k] * b[j]) * e_cur
            if j < jhi:
                s_hi += (a_conj[j] * b[j + k]) * e_cur
            e_next = ((2 * j + 1 + k - x) * e_cur
                      - np.sqrt(j * (j + k)) * e_prev) / np.sqrt((j + 1) * (j + k + 1))
            e_prev, e_cur = e_cur, e_next
        total += phase_lo * s_lo + phase_hi * s_hi
    return total


def _elements_np(betas, rows, cols):
    P = betas.shape[0]
    out = np.zeros((P, rows, cols), dtype=np.complex128)
    x = betas.real ** 2 + betas.imag ** 2
    r = np.sqrt(x)
    zero = r == 0.0
    u = np.where(zero, 1.0, betas / np.where(zero, 1.0, r))
    ucm = -np.conj(u)
    e0 = np.exp(-0.5 * x)
    phase_lo = np.ones_like(betas)
    phase_hi = np.ones_like(betas)
    for k in range(max(rows, cols)):
        if k > 0:
            # at beta = 0 only k = 0 survives, which e0 -> 0 handles via r = 0
            e0 = e0 * r / np.sqrt(k)
            phase_lo = phase_lo * u
            phase_hi = phase_hi * ucm
        jlo = min(rows - k, cols)
        jhi = min(rows, cols - k) if k > 0 else 0
        e_prev = np.zeros_like(x)
        e_cur = e0
        for j in range(max(jlo, jhi)):
            if j < jlo:
                out[:, j + k, j] = phase_lo * e_cur
            if j < jhi:
                out[:, j, j + k] = phase_hi * e_cur
            e_next = ((2 * j + 1 + k - x) * e_cur
                      - np.sqrt(j * (j + k)) * e_prev) / np.sqrt((j + 1) * (j + k + 1))
            e_prev, e_cur = e_cur, e_next
    return out


# ------------------------------------------------------------------ dispatch

def contract_displacement(betas, a, b, backend=None):
    """Return ``<a|D(beta)|b>`` for every beta in ``betas`` (any shape)."""
    betas = np.asarray(betas, dtype=np.complex128)
    shape = betas.shape
    flat = np.ascontiguousarray(betas.ravel())
    _check_range(flat)
    a_conj = np.ascontiguousarray(np.conj(np.asarray(a, dtype=np.complex128)))
    b = np.ascontiguousarray(np.asarray(b, dtype=np.complex128))
    if (backend or get_backend()) == "numba":
        out = _contract_nb(flat, a_conj, b, *_recurrence_tables(max(a_conj.size, b.size)))
    else:
        out = _contract_np(flat, a_conj, b)
    return out.reshape(shape)


def displacement_elements(betas, rows, cols, backend=None):
    """Return the ``rows x cols`` block of D(beta) for every beta in ``betas``.

    Output shape is ``betas.shape + (rows, cols)``.
    """
    betas = np.asarray(betas, dtype=np.complex128)
    shape = betas.shape
    flat = np.ascontiguousarray(betas.ravel())
    _check_range(flat)
    if (backend or get_backend()) == "numba":
        out = _elements_nb(flat, int(rows), int(cols), *_recurrence_tables(max(rows, cols)))
    else:
        out = _elements_np(flat, int(rows), int(cols))
    return out.reshape(shape + (rows, cols))
