"""Phase-space grids, Wigner and characteristic functions, and transforms.

Field arrays are indexed ``values[ix, iy]`` with ``alpha = x + i y`` and the
area element ``d^2 alpha = dx dy``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, signal

from . import _accel
from .errors import AliasingError, InputError, TruncationError

DEFAULT_EXTENT = 6.0
DEFAULT_POINTS = 128
BOUNDARY_TOL = 1e-10
KINDS = ("wigner", "characteristic", "gamma", "probability", "generic")


@dataclass(frozen=True)
class Grid2D:
    """Square grid over ``[-L, L]^2``.

    With ``fft_aligned`` the spacing is ``2L/M`` and the points are
    ``-L + j h`` so the origin sits at index ``M/2``; otherwise the grid is
    ``linspace(-L, L, M)``.
    """

    extent: float = DEFAULT_EXTENT
    points: int = DEFAULT_POINTS
    fft_aligned: bool = True

    def __post_init__(self):
        if not self.extent > 0:
            raise InputError(f"grid extent must be positive, got {self.extent}")
        if self.points < 16 or self.points % 2:
            raise InputError(f"grid points must be an even integer >= 16, got {self.points}")

    @property
    def spacing(self):
        if self.fft_aligned:
            return 2 * self.extent / self.points
        return 2 * self.extent / (self.points - 1)

    @property
    def axis(self):
        if self.fft_aligned:
            return -self.extent + self.spacing * np.arange(self.points)
        return np.linspace(-self.extent, self.extent, self.points)

    @property
    def cell_area(self):
        return self.spacing ** 2

    @property
    def origin_index(self):
        if not self.fft_aligned:
            raise InputError("the origin is a grid point only on FFT-aligned grids")
        return self.points // 2

    def complex_points(self):
        x = self.axis
        return x[:, None] + 1j * x[None, :]

    def describe(self):
        return {"extent": self.extent, "points": self.points, "spacing": self.spacing,
                "fft_aligned": self.fft_aligned}


@dataclass(frozen=True)
class GridField:
    values: np.ndarray
    grid: Grid2D
    kind: str = "generic"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown field kind {self.kind!r}")
        vals = np.asarray(self.values)
        if vals.shape != (self.grid.points, self.grid.points):
            raise InputError(f"field shape {vals.shape} does not match grid {self.grid.points}")

    def integral(self):
        return complex(np.sum(self.values) * self.grid.cell_area)

    def boundary_max(self):
        v = np.abs(self.values)
        return float(max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max()))

    def at(self, ix, iy):
        return self.values[ix, iy]


def _same_grid(a, b):
    if a.grid != b.grid:
        raise InputError(f"grid mismatch: {a.grid} vs {b.grid}")


def check_decay(field_, tol=BOUNDARY_TOL):
    """Raise AliasingError if ``|f|`` exceeds ``tol`` anywhere on the grid edge."""
    edge = field_.boundary_max()
    if edge > tol:
        raise AliasingError(
            f"{field_.kind} field reaches {edge:.2e} at the grid edge (limit {tol:.0e}); "
            "enlarge the grid extent"
        )


def characteristic(psi, phi, tau):
    """``<psi|D(tau)|phi>`` for scalar or array ``tau``.

    The matrix elements are exact, so the result carries no truncation error
    beyond the states' own amplitudes.
    """
    out = _accel.contract_displacement(tau, psi.support(), phi.support())
    return complex(out) if np.ndim(tau) == 0 else out


def characteristic_field(psi, phi, grid):
    return GridField(characteristic(psi, phi, grid.complex_points()), grid, "characteristic")


def _check_wigner_grid(grid):
    reach = 4 * 2 * grid.extent ** 2
    if reach > _accel.MAX_ABS2:
        raise TruncationError(
            f"grid extent {grid.extent} needs |2 alpha|^2 up to {reach:.0f} > {_accel.MAX_ABS2}"
        )


def wigner_cross(psi, phi, grid):
    """Samples of the Wigner function of ``|psi><phi|``.

    Uses the displaced-parity kernel ``(2/pi) D(alpha) P D(alpha)^dag =
    (2/pi) D(2 alpha) P``, so ``W(alpha) = (2/pi) <phi|D(2 alpha) P|psi>``.
    """
    _check_wigner_grid(grid)
    src = psi.support()
    parity = np.where(np.arange(src.size) % 2, -1.0, 1.0)
    vals = (2 / np.pi) * _accel.contract_displacement(2 * grid.complex_points(), phi.support(), parity * src)
    return GridField(vals, grid, "wigner")


def wigner(psi, grid):
    return wigner_cross(psi, psi, grid)


def wigner_at(psi, phi, alpha):
    """Cross-Wigner value(s) at arbitrary points."""
    src = psi.support()
    parity = np.where(np.arange(src.size) % 2, -1.0, 1.0)
    return (2 / np.pi) * _accel.contract_displacement(2 * np.asarray(alpha), phi.support(), parity * src)


def overlap(a, b):
    """``pi * sum(a * b) * h^2``, the phase-space form of ``tr(AB)``."""
    _same_grid(a, b)
    return complex(np.pi * np.sum(a.values * b.values) * a.grid.cell_area)


def _fft_grid_or_fail(grid):
    if not grid.fft_aligned:
        raise InputError("this transform needs an FFT-aligned grid")


def autocorrelate(field_, scale=1.0, check=True, kind=None):
    """``scale * int d^2a conj(f(a)) f(a + tau)`` on the same grid.

    Computed by zero-padded FFT correlation.  The direct quadrature sum at
    the origin and at two off-centre shifts is recorded in ``meta`` as a
    cross-check.
    """
    grid = field_.grid
    _fft_grid_or_fail(grid)
    if check:
        check_decay(field_)
    M = grid.points
    f = np.asarray(field_.values, dtype=np.complex128)
    F = np.fft.fft2(f, s=(2 * M, 2 * M))
    corr = np.fft.ifft2(np.conj(F) * F)
    shifts = np.arange(M) - M // 2
    out = corr[np.ix_(shifts % (2 * M), shifts % (2 * M))] * (scale * grid.cell_area)

    def direct(dx, dy):
        a = f[max(0, -dx):M - max(0, dx), max(0, -dy):M - max(0, dy)]
        b = f[max(0, dx):M + min(0, dx), max(0, dy):M + min(0, dy)]
        return scale * grid.cell_area * np.sum(np.conj(a) * b)

    c = M // 2
    probes = [(0, 0), (M // 8, -M // 16), (-M // 5, M // 7)]
    gap = max(abs(direct(dx, dy) - out[c + dx, c + dy]) for dx, dy in probes)
    meta = {"direct_sum_gap": float(gap)}
    return GridField(out, grid, kind or field_.kind, meta)


def _phase_matrix(axis_out, axis_in, coeff):
    return np.exp(1j * coeff * np.outer(axis_out, axis_in))


def _czt_axis(arr, axis, t, coeff):
    """``sum_n arr_n exp(i coeff t_n t_p)`` along ``axis`` on the uniform grid ``t``."""
    h = t[1] - t[0]
    t0 = t[0]
    n = t.size
    w = np.exp(1j * coeff * h * h)
    a = np.exp(-1j * coeff * t0 * h)
    out = signal.czt(arr, m=n, w=w, a=a, axis=axis)
    post = np.exp(1j * coeff * (t0 * t0 + t0 * h * np.arange(n)))
    shape = [1, 1]
    shape[axis] = n
    return out * post.reshape(shape)


def symplectic_ft(field_, engine="fft", sign=1, check=True, kind=None):
    """``g(mu) = int d^2tau exp(sign (tau mu* - tau* mu)) f(tau)`` on the same grid.

    ``tau mu* - tau* mu = 2i (tau_y mu_x - tau_x mu_y)``.  The "direct"
    engine is the dense separable quadrature; "fft" uses chirp-z transforms
    along each axis.
    """
    grid = field_.grid
    if check:
        check_decay(field_)
    t = grid.axis
    f = np.asarray(field_.values, dtype=np.complex128)
    c = 2.0 * sign
    if engine == "direct":
        # g[p, q] = sum_ij A[p, j] f[i, j] B[i, q]
        A = _phase_matrix(t, t, c)
        B = _phase_matrix(t, t, -c).T
        g = A @ f.T @ B
    elif engine == "fft":
        # sum over tau_y (axis 1) pairs with mu_x; sum over tau_x (axis 0) with mu_y
        tmp = _czt_axis(f, 1, t, c)  # tmp[i, p] indexed by (tau_x, mu_x)
        g = _czt_axis(tmp, 0, t, -c).T  # -> (mu_x, mu_y)
    else:
        raise InputError(f"unknown engine {engine!r}")
    return GridField(g * grid.cell_area, grid, kind or field_.kind, {"engine": engine})


def shift_field(field_, beta):
    """Values ``f(alpha - beta)`` on the same grid.

    Exact for grid-commensurate shifts, bilinear otherwise; samples pulled
    from outside the grid are zero.
    """
    h = field_.grid.spacing
    shift = (complex(beta).real / h, complex(beta).imag / h)
    v = np.asarray(field_.values)
    if np.iscomplexobj(v):
        re = ndimage.shift(v.real, shift, order=1, mode="constant", cval=0.0)
        im = ndimage.shift(v.imag, shift, order=1, mode="constant", cval=0.0)
        out = re + 1j * im
    else:
        out = ndimage.shift(v, shift, order=1, mode="constant", cval=0.0)
    return GridField(out, field_.grid, field_.kind)


def conjugate_symmetry_error(field_):
    """``max |conj(f(tau)) - f(-tau)|`` over points whose mirror is on the grid."""
    g = field_.grid
    _fft_grid_or_fail(g)
    v = np.asarray(field_.values)[1:, 1:]
    return float(np.max(np.abs(np.conj(v) - v[::-1, ::-1])))
