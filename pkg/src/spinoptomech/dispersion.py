"""Dressed-state band structure of the SO-coupled condensate inside the cavity.

Energies are in units of omega_m.  Quasi-momentum is measured so that the
kinetic term is k^2 / 2 (hbar = m_a = 1); with that choice the bare
double-well minima sit at k = +/- alpha_tilde.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import FixedPointDiverged
from .params import ModelParams


@dataclass(frozen=True)
class BlochMatrix:
    entries: np.ndarray
    k_x: float
    n_s: float
    params: ModelParams = field(repr=False)


def _matrix_entries(k_x, n_s, params):
    """Vectorized 2x2 entries (d_up, d_dn, off_upper, off_lower) over k."""
    k = np.asarray(k_x, dtype=float)
    N = params.N_atoms
    common = 0.5 * k * k + params.g_a * n_s + 0.5 * params.U * N - params.gamma_a
    so = params.alpha_tilde * k + 0.5 * params.delta_R
    # occupations phi_dn^+ phi_up and phi_up^+ phi_dn taken at the equal-population mean field N/2
    dressing = 0.5 * params.U * (params.epsilon - 1.0) * (0.5 * N)
    d_up = common + 0.5 * params.Omega_z
    d_dn = common - 0.5 * params.Omega_z
    off_upper = -1j * so + dressing
    off_lower = 1j * so + dressing
    return d_up, d_dn, off_upper, off_lower


def bloch_matrix(k_x, n_s, params):
    if n_s < 0:
        raise ValueError(f"photon number must be non-negative (got {n_s!r})")
    d_up, d_dn, off_u, off_l = _matrix_entries(float(k_x), n_s, params)
    entries = np.array([[d_up, off_u], [off_l, d_dn]], dtype=complex)
    return BlochMatrix(entries=entries, k_x=float(k_x), n_s=float(n_s), params=params)


def _sort_pair(ev):
    ev = np.asarray(ev)
    order = np.argsort(ev.real, axis=-1, kind="stable")
    return np.take_along_axis(ev, order, axis=-1)


def band_energies(m):
    """The two eigenvalues of a Bloch matrix, ordered by real part.

    Accepts a :class:`BlochMatrix` or a raw (..., 2, 2) array.  Imaginary
    parts are kept.
    """
    entries = m.entries if isinstance(m, BlochMatrix) else np.asarray(m, dtype=complex)
    ev = _sort_pair(np.linalg.eigvals(entries))
    if ev.ndim == 1:
        return complex(ev[0]), complex(ev[1])
    return ev[..., 0], ev[..., 1]


@dataclass(frozen=True)
class Minimum:
    k: float
    energy: float


@dataclass(frozen=True)
class BandStructure:
    k_grid: np.ndarray
    e_minus: np.ndarray
    e_plus: np.ndarray
    minima: tuple
    n_s: np.ndarray
    selfconsistent: bool = False

    def __post_init__(self):
        if np.any(np.diff(self.k_grid) <= 0):
            raise ValueError("k grid must be strictly increasing")

    @property
    def gap(self):
        return (self.e_plus - self.e_minus).real

    def gap_at(self, k):
        return float(np.interp(k, self.k_grid, self.gap))


def _local_minima(k, e):
    """Interior local minima of ``e`` refined by a three-point parabola."""
    found = []
    for i in range(1, len(e) - 1):
        if e[i] < e[i - 1] and e[i] <= e[i + 1]:
            k0, k1, k2 = k[i - 1], k[i], k[i + 1]
            e0, e1, e2 = e[i - 1], e[i], e[i + 1]
            # vertex of the interpolating parabola
            d01 = (e1 - e0) / (k1 - k0)
            d12 = (e2 - e1) / (k2 - k1)
            curv = (d12 - d01) / (k2 - k0)
            if curv <= 0:
                found.append(Minimum(float(k1), float(e1)))
                continue
            k_star = 0.5 * (k0 + k1) - d01 / (2.0 * curv)
            e_star = e1 + d01 * (k_star - k1) + curv * (k_star - k0) * (k_star - k1)
            found.append(Minimum(float(k_star), float(e_star)))
    return tuple(found)


def cavity_only_photon_number(params, verbatim=False):
    num = params.eta if verbatim else params.eta ** 2
    return num / (params.kappa ** 2 + params.delta_tilde ** 2)


def _photon_rhs(n, e_lower, params, verbatim):
    """Photon-number map with the mirror displacement b + b^+ evaluated at E_N."""
    gm = params.g_m
    x = e_lower + params.gamma_m
    # b + b^+ with b = g_m n / (sqrt2 (E + i w_m + gamma_m)), w_m = 1
    b_sum = (gm * n / math.sqrt(2.0)) * 2.0 * x / (x * x + 1.0)
    detuning = params.delta_tilde - gm / math.sqrt(2.0) * b_sum + params.g_a * params.N_atoms
    num = params.eta if verbatim else params.eta ** 2
    return num / (params.kappa ** 2 + detuning ** 2)


def selfconsistent_photon_number(k, params, tol=1e-10, max_iter=500, verbatim=False):
    """Fixed point of the photon number with the lower band fed back through the mirror.

    The band energy used inside the mirror displacement is the one from the
    previous iterate, starting from the n_s = 0 band.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    n = np.zeros_like(k)
    residual = np.full_like(k, np.inf)
    for it in range(1, max_iter + 1):
        e_lower = _lower_band(k, n, params)
        new = _photon_rhs(n, e_lower, params, verbatim)
        residual = np.abs(new - n)
        n = new
        if np.all(residual < tol):
            e_lower = _lower_band(k, n, params)
            final = np.abs(_photon_rhs(n, e_lower, params, verbatim) - n)
            if np.all(final < tol):
                return n
    worst = int(np.argmax(residual))
    raise FixedPointDiverged(float(n[worst]), float(residual[worst]), max_iter)


def _lower_band(k, n_s, params):
    d_up, d_dn, off_u, off_l = _matrix_entries(k, n_s, params)
    mats = np.empty(np.shape(k) + (2, 2), dtype=complex)
    mats[..., 0, 0] = d_up
    mats[..., 1, 1] = d_dn
    mats[..., 0, 1] = off_u
    mats[..., 1, 0] = off_l
    return band_energies(mats)[0].real


def band_scan(k_min, k_max, n_points, params, selfconsistent=False, verbatim=False):
    """Sample E_-(k) and E_+(k) on a uniform quasi-momentum grid.

    Without ``selfconsistent`` the photon number is the cavity-only value
    eta^2 / (kappa^2 + delta_tilde^2) at every k.  ``verbatim`` uses eta
    instead of eta^2 in the photon-number numerator.
    """
    if not k_min < k_max:
        raise ValueError("k_min must be smaller than k_max")
    if n_points < 2:
        raise ValueError("need at least two k points")
    k = np.linspace(k_min, k_max, int(n_points))
    if k_min == -k_max:
        # linspace is not exactly odd; symmetrize so E(k) and E(-k) share arguments
        k = 0.5 * (k - k[::-1])
    if selfconsistent:
        n_s = selfconsistent_photon_number(k, params, verbatim=verbatim)
    else:
        n_s = np.full_like(k, cavity_only_photon_number(params, verbatim))

    d_up, d_dn, off_u, off_l = _matrix_entries(k, n_s, params)
    mats = np.empty(k.shape + (2, 2), dtype=complex)
    mats[:, 0, 0] = d_up
    mats[:, 1, 1] = d_dn
    mats[:, 0, 1] = off_u
    mats[:, 1, 0] = off_l
    e_minus, e_plus = band_energies(mats)
    minima = _local_minima(k, e_minus.real)
    return BandStructure(k_grid=k, e_minus=e_minus, e_plus=e_plus, minima=minima,
                         n_s=n_s, selfconsistent=bool(selfconsistent))


@dataclass(frozen=True)
class GapReport:
    gap_at_zero: float
    global_gap: float
    minima: tuple
    double_well: bool


def band_gap_and_minima(bs, threshold=1e-9):
    gap = bs.gap
    e = bs.e_minus.real
    minima = bs.minima
    double_well = False
    if len(minima) >= 2:
        # any local maximum between the outermost minima that rises above both
        ks = sorted(m.k for m in minima)
        inner = (bs.k_grid > ks[0]) & (bs.k_grid < ks[-1])
        if np.any(inner):
            barrier = e[inner].max()
            lows = max(m.energy for m in minima)
            double_well = bool(barrier - lows > threshold)
    gap_zero = bs.gap_at(0.0) if bs.k_grid[0] <= 0.0 <= bs.k_grid[-1] else float("nan")
    return GapReport(gap_at_zero=gap_zero, global_gap=float(gap.min()),
                     minima=minima, double_well=double_well)
