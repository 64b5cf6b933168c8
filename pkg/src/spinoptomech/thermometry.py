"""Quadrature variances and the effective mirror temperature.

The mirror position quadrature q is dimensionless, q = x sqrt(m w_m / hbar).
Its variance is the area under the mirror spectrum, <dq^2> = (1/2pi) int S_m dw.
Momentum follows the narrow-resonance relation <dp^2> = m^2 w_m^2 <dx^2>, so
the mean energy m w_m^2 <dx^2>/2 + <dp^2>/(2m) reduces to hbar w_m <dq^2>.
"""
from dataclasses import dataclass, asdict
import math

import numpy as np
from scipy import integrate

from .errors import GridTooNarrow, UnstableOperatingPoint
from .params import HBAR, K_B
from .spectra import Mode, dns_mirror, SpectrumSeries
from .stability import drift_matrix, eigen_stability

MIN_HALF_SPAN = 5.0
TAIL_LIMIT = 0.01


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    error: float
    tail: float


def _tail_coefficient(w, v):
    """Least-squares c in v ~ c / w^2 over the given points."""
    x = 1.0 / w ** 2
    return float(np.dot(v, x) / np.dot(x, x))


def _variance_sampled(w, v):
    if np.any(np.diff(w) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    half_span = min(-w[0], w[-1])
    if half_span < MIN_HALF_SPAN:
        raise GridTooNarrow(
            f"grid must cover [-{MIN_HALF_SPAN}, {MIN_HALF_SPAN}] (covers [{w[0]}, {w[-1]}])")
    area = integrate.simpson(v, x=w)
    # Richardson estimate from the same rule on every second point
    coarse = integrate.simpson(v[::2], x=w[::2])
    error = abs(area - coarse) / 15.0

    n_tail = max(2, int(math.ceil(0.1 * w.size)))
    c_lo = _tail_coefficient(w[:n_tail], v[:n_tail])
    c_hi = _tail_coefficient(w[-n_tail:], v[-n_tail:])
    tail = max(c_lo, 0.0) / abs(w[0]) + max(c_hi, 0.0) / w[-1]
    total = area + tail
    if total <= 0 or tail > TAIL_LIMIT * total:
        raise GridTooNarrow(
            f"spectral tail beyond the grid is {tail:.3g} of a total {total:.3g}")
    scale = 1.0 / (2.0 * math.pi)
    return VarianceEstimate(value=total * scale, error=error * scale, tail=tail * scale)


def _variance_callable(f, breakpoints, half_span, epsabs, epsrel):
    pts = sorted(p for p in breakpoints if -half_span < p < half_span)
    core, err_core = integrate.quad(f, -half_span, half_span, points=pts or None,
                                    limit=1000, epsabs=epsabs, epsrel=epsrel)
    hi, err_hi = integrate.quad(f, half_span, np.inf, limit=200, epsabs=epsabs, epsrel=epsrel)
    lo, err_lo = integrate.quad(f, -np.inf, -half_span, limit=200, epsabs=epsabs, epsrel=epsrel)
    total = core + hi + lo
    tail = hi + lo
    if total <= 0 or abs(tail) > TAIL_LIMIT * abs(total):
        raise GridTooNarrow(
            f"spectral tail beyond +/-{half_span} is {tail:.3g} of a total {total:.3g}")
    scale = 1.0 / (2.0 * math.pi)
    return VarianceEstimate(value=total * scale, error=(err_core + err_hi + err_lo) * scale,
                            tail=tail * scale)


def position_variance(spectrum, breakpoints=(), half_span=MIN_HALF_SPAN,
                      epsabs=1e-10, epsrel=1e-10):
    """(1/2pi) times the area under a mirror spectrum.

    ``spectrum`` is either a :class:`SpectrumSeries` (or an ``(omega, values)``
    pair) sampled on a grid, integrated by Simpson's rule with a c/w^2 tail
    fitted to the outer 10% of points, or a callable S(w) integrated
    adaptively with ``breakpoints`` marking resonances.
    """
    if callable(spectrum):
        if half_span < MIN_HALF_SPAN:
            raise GridTooNarrow(f"integration span must be at least {MIN_HALF_SPAN}")
        return _variance_callable(spectrum, breakpoints, half_span, epsabs, epsrel)
    if isinstance(spectrum, SpectrumSeries):
        w, v = spectrum.omega_grid, spectrum.values
    else:
        w, v = spectrum
    return _variance_sampled(np.asarray(w, dtype=float), np.asarray(v, dtype=float))


@dataclass(frozen=True)
class TemperatureReport:
    var_q: float
    var_x: float
    var_p: float
    mean_energy: float
    T_eff: float
    quadrature_error: float
    Delta: float
    mode: str

    def to_dict(self):
        return asdict(self)


def temperature_from_variance(var_q, params, error=0.0, Delta=float("nan"), mode=Mode.CORRECTED):
    m, wm = params.m_mirror, params.omega_m
    var_x = var_q * HBAR / (m * wm)
    var_p = m ** 2 * wm ** 2 * var_x
    energy = 0.5 * m * wm ** 2 * var_x + var_p / (2.0 * m)
    return TemperatureReport(var_q=var_q, var_x=var_x, var_p=var_p, mean_energy=energy,
                             T_eff=energy / K_B, quadrature_error=error,
                             Delta=float(Delta), mode=Mode(mode).value)


def effective_temperature(ss, params, Delta=None, mode=Mode.CORRECTED, omega_grid=None,
                          allow_unstable=False):
    """Effective mirror temperature from the area under its noise spectrum.

    Without ``omega_grid`` the spectrum is integrated adaptively over the whole
    real line, with the drift eigenfrequencies as breakpoints.
    """
    mode = Mode(mode)
    if Delta is not None:
        ss = ss.with_delta(Delta)
    verdict = eigen_stability(drift_matrix(ss, params))
    if not (verdict.stable or allow_unstable):
        raise UnstableOperatingPoint(verdict.margin)

    if omega_grid is None:
        def f(w):
            return dns_mirror(w, None, ss, params, mode, allow_unstable=True)
        poles = np.unique(np.round(np.abs(verdict.spectrum.imag), 12))
        pts = [p for p in poles if p > 0] + [-p for p in poles if p > 0] + [0.0]
        est = position_variance(f, breakpoints=pts)
    else:
        w = np.asarray(omega_grid, dtype=float)
        est = position_variance((w, dns_mirror(w, None, ss, params, mode, allow_unstable=True)))
    return temperature_from_variance(est.value, params, est.error, ss.Delta, mode)


def thermal_position_variance(params):
    """High-temperature variance of the uncoupled mirror, 2 gamma_m kT w_m^2 / (gamma_m^2 + w_m^2)."""
    g = params.gamma_m
    return 2.0 * g * params.kbT_norm / (g * g + 1.0)
