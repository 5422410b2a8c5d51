"""Probe emission spectrum from the steady-state correlation <sigma_+(tau) sigma_-(0)>.

By the quantum regression theorem the vector ``vec(sigma_- rho_ss)`` evolves
under the same generator as the density matrix, so

    C(tau) = Tr[sigma_+ unvec(expm(Sigma tau) vec(sigma_- rho_ss))]

and the spectrum is ``S(nu) = Re int_0^inf exp(-i nu tau) C(tau) dtau``,
i.e. ``S(nu) = Re Tr[sigma_+ unvec((i nu - Sigma)^-1 vec(sigma_- rho_ss))]``.

The sign of the Fourier kernel is a fixed calibration: with ``exp(-i nu tau)``
an isolated probe of frequency ``omega1`` emits at ``nu = +omega1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg as sla

from envprobe.dynamics import null_tolerance, spectral_projector, vectorize
from envprobe.errors import ParameterError, TruncationError
from envprobe.model import pauli

# Fourier kernel is exp(KERNEL_SIGN * i * nu * tau)
KERNEL_SIGN = -1
DISCARD_WARN_RATIO = 1e-6
DECAY_REQUIRED = 1e-8
_BLOCK = 256


@dataclass
class SpectrumGrid:
    nu: np.ndarray
    values: np.ndarray
    discarded_weight: float = 0.0
    warning: bool = False


@dataclass
class CorrelationSeries:
    taus: np.ndarray
    values: np.ndarray


@dataclass
class PeakReport:
    count: int
    positions: list = field(default_factory=list)
    heights: list = field(default_factory=list)
    dip_position: float | None = None
    dip_depth: float | None = None


def _readout():
    # row vector r with r @ vec(X) == Tr[sigma_+1 X]
    return pauli("+", 1).T.reshape(16)


def correlation_initial(ss):
    """``vec(sigma_-1 rho_ss)``, the regression-theorem starting vector."""
    return vectorize(pauli("-", 1) @ np.asarray(ss, dtype=complex))


def correlation_scalar(v):
    return complex(_readout() @ v)


def _uniform(taus):
    if len(taus) < 3:
        return False
    h = (taus[-1] - taus[0]) / (len(taus) - 1)
    # linspace spacings jitter by ~eps * taus[-1]; stepping with h stays within that
    return bool(np.max(np.abs(np.diff(taus) - h)) <= 1e-9 * h)


def correlation_time_domain(sigma, ss, taus) -> CorrelationSeries:
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 0) or np.any(np.diff(taus) <= 0):
        raise ParameterError("tau grid must be non-negative and increasing")
    c0 = correlation_initial(ss)
    r = _readout()
    values = np.empty(len(taus), dtype=complex)
    if _uniform(taus):
        step = sla.expm(sigma * (taus[-1] - taus[0]) / (len(taus) - 1))
        # rows r @ step^k for k < _BLOCK: one matrix-vector product per block of samples
        rows = np.empty((_BLOCK, 16), dtype=complex)
        rows[0] = r
        for k in range(1, _BLOCK):
            rows[k] = rows[k - 1] @ step
        jump = np.linalg.matrix_power(step, _BLOCK)
        v = sla.expm(sigma * taus[0]) @ c0
        for start in range(0, len(taus), _BLOCK):
            m = min(_BLOCK, len(taus) - start)
            values[start:start + m] = rows[:m] @ v
            v = jump @ v
    else:
        for i, tau in enumerate(taus):
            values[i] = r @ (sla.expm(sigma * tau) @ c0)
    return CorrelationSeries(taus, values)


def emission_spectrum(sigma, ss, nus, tol=None) -> SpectrumGrid:
    """Resolvent evaluation of the emission spectrum on the frequency grid ``nus``.

    Components of the starting vector along undamped modes of ``sigma``
    (purely imaginary eigenvalues, including the stationary one) would give
    zero-width lines; they are removed before the solve and their norm is
    returned as ``discarded_weight``.
    """
    nus = np.asarray(nus, dtype=float)
    tol = null_tolerance(sigma) if tol is None else tol
    c0 = correlation_initial(ss)
    proj = spectral_projector(sigma, lambda lam: abs(lam.real) <= tol)
    undamped = proj @ c0
    c = c0 - undamped
    # undamped eigenvalues moved to Re = -1; action on range(1 - proj) is unchanged
    shifted = sigma - proj
    r = _readout()
    eye = np.eye(16)
    values = np.empty(len(nus))
    for i, nu in enumerate(nus):
        x = np.linalg.solve(-KERNEL_SIGN * 1j * nu * eye - shifted, c)
        values[i] = (r @ x).real
    discarded = float(np.linalg.norm(undamped))
    warn = discarded > DISCARD_WARN_RATIO * max(np.linalg.norm(c0), 1e-300)
    return SpectrumGrid(nus, values, discarded, warn)


def spectrum_from_time_domain(series: CorrelationSeries, nus) -> SpectrumGrid:
    """Quadrature of ``Re int exp(-i nu tau) C(tau) dtau`` over the sampled series.

    The neglected tail beyond the last sample is added assuming a single
    exponential continued from the last two points.
    """
    taus, c = series.taus, series.values
    nus = np.asarray(nus, dtype=float)
    c_abs0 = abs(c[0])
    if c_abs0 == 0.0 and not np.any(c):
        return SpectrumGrid(nus, np.zeros(len(nus)))
    scale = max(c_abs0, np.max(np.abs(c)))
    residual = abs(c[-1]) / scale
    if residual >= DECAY_REQUIRED:
        raise TruncationError(
            f"truncation error: |C(tau_max)|/|C| = {residual:.3g} exceeds {DECAY_REQUIRED:g}",
            residual)
    rate = None
    if c[-1] != 0 and c[-2] != 0:
        rate = np.log(c[-1] / c[-2]) / (taus[-1] - taus[-2])
    out = np.empty(len(nus))
    for i, nu in enumerate(nus):
        phase = np.exp(KERNEL_SIGN * 1j * nu * taus)
        integral = scipy.integrate.simpson(phase * c, x=taus)
        if rate is not None and rate.real < 0:
            k = rate + KERNEL_SIGN * 1j * nu
            integral += -phase[-1] * c[-1] / k
        out[i] = integral.real
    return SpectrumGrid(nus, out)


def _refine(x, y, i):
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return x[i], y1
    off = 0.5 * (y0 - y2) / denom
    h = x[i + 1] - x[i]
    return x[i] + off * h, y1 - 0.25 * (y0 - y2) * off


def peak_analysis(spec: SpectrumGrid, min_points=51, flat_tol=1e-12) -> PeakReport:
    """Census of local maxima, refined by a parabola through the three nearest samples.

    The dip is the lowest point between the two tallest peaks and its depth
    is ``1 - S_dip / min(h1, h2)``.
    """
    x, y = np.asarray(spec.nu), np.asarray(spec.values)
    if len(x) < min_points:
        raise ParameterError(f"peak analysis needs at least {min_points} grid points")
    if np.max(np.abs(y)) <= flat_tol:
        return PeakReport(0)
    idx = [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]
    peaks = [_refine(x, y, i) for i in idx]
    report = PeakReport(len(peaks), [p[0] for p in peaks], [p[1] for p in peaks])
    if len(idx) >= 2:
        top = sorted(range(len(idx)), key=lambda k: peaks[k][1])[-2:]
        lo, hi = sorted(idx[k] for k in top)
        j = lo + int(np.argmin(y[lo:hi + 1]))
        pos, val = _refine(x, -y, j) if 0 < j < len(y) - 1 else (x[j], -y[j])
        report.dip_position = pos
        report.dip_depth = 1.0 - (-val) / min(peaks[top[0]][1], peaks[top[1]][1])
    return report
