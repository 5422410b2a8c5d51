"""Two-mode squeezed state with mode 2 in a thermal loss channel (no inter-mode coupling).

Phase-space convention: ``alpha = (x1 + i p1)/2`` and ``beta = (x2 + i p2)/2``
with vacuum quadrature variance 1, so the vacuum Wigner function is
``(2/pi) exp(-2|alpha|^2)``.  In these units the covariance matrix over
``(x1, p1, x2, p2)`` is

    [[E_beta * I, F * Z], [F * Z, E_alpha * I]],   Z = diag(1, -1)

and the Wigner function is

    W = (8 / (pi^2 D)) exp[-(4 E_alpha/D)|alpha|^2 - (4 E_beta/D)|beta|^2
                           + (4 F/D)(alpha beta + conj(alpha beta))].

Mode 1 keeps the variance ``E_beta = cosh 2r`` whatever the bath does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from envprobe.errors import ParameterError
from envprobe.model import BathParams, CBFCouplingParams, build_cbf_hamiltonian

_Z = np.diag([1.0, -1.0])
_OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class TwoModeWignerParams:
    r: float
    gamma_diss: float
    nbar: float
    tau: float

    @property
    def N(self):
        return 2.0 * self.nbar + 1.0

    @property
    def T(self):
        return math.exp(-self.gamma_diss * self.tau / 2.0)

    @property
    def R(self):
        return math.sqrt(max(0.0, 1.0 - self.T**2))

    @property
    def D(self):
        return 2.0 * self.T**2 + 2.0 * self.R**2 * self.N * math.cosh(2 * self.r)

    @property
    def E_alpha(self):
        return self.T**2 * math.cosh(2 * self.r) + self.N * self.R**2

    @property
    def E_beta(self):
        return math.cosh(2 * self.r)

    @property
    def F(self):
        return self.T * math.sinh(2 * self.r)

    def exponent_coefficients(self):
        """``(a, b, c)`` in ``exp(-a|alpha|^2 - b|beta|^2 + c(alpha beta + c.c.))``."""
        return 4 * self.E_alpha / self.D, 4 * self.E_beta / self.D, 4 * self.F / self.D


@dataclass(frozen=True)
class SingleModeMarginal:
    E_beta: float

    def value(self, alpha):
        return 2.0 / (math.pi * self.E_beta) * np.exp(-2.0 * np.abs(alpha) ** 2 / self.E_beta)


def evolve_two_mode_squeezed(r, b: BathParams, tau) -> TwoModeWignerParams:
    """Wigner parameters after time ``tau``; the dephasing rate of ``b`` plays no role."""
    r, tau = float(r), float(tau)
    if not (math.isfinite(r) and math.isfinite(tau)):
        raise ParameterError("r and tau must be finite")
    if tau < 0:
        raise ParameterError(f"tau must be non-negative, got {tau}")
    return TwoModeWignerParams(r, b.gamma_diss, b.nbar, tau)


def _check_normalizable(p):
    a, b, c = p.exponent_coefficients()
    if not (a > 0 and b > 0 and a * b - c * c > 0):
        raise ParameterError("Wigner exponent is not normalizable")


def wigner_value(p: TwoModeWignerParams, alpha, beta):
    _check_normalizable(p)
    a, b, c = p.exponent_coefficients()
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    expo = -a * np.abs(alpha) ** 2 - b * np.abs(beta) ** 2 + 2 * c * (alpha * beta).real
    return 8.0 / (math.pi**2 * p.D) * np.exp(expo)


def marginal_mode1(p: TwoModeWignerParams) -> SingleModeMarginal:
    return SingleModeMarginal(p.E_beta)


def covariance_matrix(p: TwoModeWignerParams):
    _check_normalizable(p)
    return np.block([[p.E_beta * np.eye(2), p.F * _Z],
                     [p.F * _Z, p.E_alpha * np.eye(2)]])


def exponent_from_covariance(cov):
    """Inverse of :func:`covariance_matrix`: the ``(a, b, c)`` exponent coefficients."""
    inv = np.linalg.inv(cov)
    # -1/2 xi^T V^-1 xi with |alpha|^2 = (x1^2 + p1^2)/4 and alpha beta + c.c. = (x1 x2 - p1 p2)/2
    return 2.0 * inv[0, 0], 2.0 * inv[2, 2], -2.0 * inv[0, 2]


def is_physical(cov, tol=1e-10):
    return bool(np.linalg.eigvalsh(cov + 1j * _OMEGA).min() >= -tol)


def gaussian_log_negativity(cov):
    """``max(0, -ln nu_min)`` with ``nu_min`` the smallest symplectic eigenvalue of the partial transpose."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (4, 4) or not np.allclose(cov, cov.T, atol=1e-12) or not is_physical(cov):
        raise ParameterError("covariance matrix is not physical")
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    pt = flip @ cov @ flip
    nu_min = np.abs(np.linalg.eigvals(1j * _OMEGA @ pt)).min()
    return float(max(0.0, -math.log(nu_min)))


def radiation_pressure_generator(chi):
    """``chi n_a (b + b^dag)`` restricted to at most one excitation in each mode.

    In that subspace ``n_a -> (1 + sigma_z1)/2`` and ``b + b^dag -> sigma_x2``,
    which is the conditional bit-flip coupling with ``g = chi``.
    """
    n_a = np.diag([0.0, 1.0])
    b = np.array([[0.0, 1.0], [0.0, 0.0]])
    return chi * np.kron(n_a, b + b.T).astype(complex)


def cbf_equivalent(chi):
    return build_cbf_hamiltonian(CBFCouplingParams(chi))
