"""Time propagation and steady states of the vectorized master equation."""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg as sla

from envprobe.errors import (
    InitialStateRequiredError,
    ParameterError,
    SingularParametersError,
    SolverError,
)
from envprobe.model import (
    BathParams,
    CBFCouplingParams,
    FreeFieldParams,
    ProbePreparation,
    XYCouplingParams,
    pauli,
)

DEFAULT_BLOCH_SIGMA = 0.5
NULL_TOL_FACTOR = 1e-9

# positions of rho[00,00], rho[01,01], rho[10,10], rho[11,11] in the 16-vector
DIAGONAL_INDICES = (0, 5, 10, 15)

_PAULI1 = {k: pauli(k, 2)[:2, :2] for k in ("x", "y", "z")}


def vectorize(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 matrix, got shape {rho.shape}")
    return rho.reshape(16).copy()


def unvectorize(v):
    v = np.asarray(v, dtype=complex)
    if v.shape != (16,):
        raise ParameterError(f"expected a 16-vector, got shape {v.shape}")
    return v.reshape(4, 4).copy()


def validate_state(rho, tol=1e-10, pos_tol=1e-8):
    """Raise ParameterError unless ``rho`` is a Hermitian, unit-trace, positive 4x4 matrix."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ParameterError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ParameterError(f"density matrix has trace {np.trace(rho)}")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -pos_tol:
        raise ParameterError("density matrix has a negative eigenvalue")
    return rho


def null_tolerance(sigma):
    return NULL_TOL_FACTOR * np.linalg.norm(sigma, np.inf)


def spectral_projector(sigma, select):
    """Projector onto the invariant subspace of ``sigma`` whose eigenvalues satisfy ``select``.

    Built from a pair of sorted Schur decompositions (right subspace from
    ``sigma``, left subspace from ``sigma^H``), so it commutes with ``sigma``
    and does not require ``sigma`` to be diagonalizable.
    """
    _, z_right, k_right = sla.schur(sigma, output="complex", sort=select)
    _, z_left, k_left = sla.schur(sigma.conj().T, output="complex",
                                  sort=lambda lam: select(np.conj(lam)))
    if k_right != k_left:
        raise SolverError("left and right invariant subspaces differ in dimension")
    if k_right == 0:
        return np.zeros_like(sigma)
    right = z_right[:, :k_right]
    left = z_left[:, :k_left]
    overlap = left.conj().T @ right
    if np.linalg.cond(overlap) > 1e10:
        raise SolverError("ill-conditioned spectral projector")
    return right @ np.linalg.solve(overlap, left.conj().T)


def propagate(sigma, v0, t):
    """Return ``expm(sigma t) @ v0``; ``v0`` may hold several states as columns."""
    t = float(t)
    if not math.isfinite(t):
        raise ParameterError(f"time must be finite, got {t}")
    if t < 0:
        raise ParameterError(f"time must be non-negative, got {t}")
    v0 = np.asarray(v0, dtype=complex)
    if t == 0.0:
        return v0.copy()
    return sla.expm(sigma * t) @ v0


def propagate_series(sigma, v0, times):
    """States at every time in ``times``; shape ``(len(times),) + v0.shape``."""
    v0 = np.asarray(v0, dtype=complex)
    return np.stack([propagate(sigma, v0, t) for t in times])


def null_dimension(sigma, tol=None):
    tol = null_tolerance(sigma) if tol is None else tol
    return int(np.sum(np.abs(np.linalg.eigvals(sigma)) <= tol))


def _as_density(v):
    rho = unvectorize(v)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise SolverError("stationary vector has vanishing trace")
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def steady_state(sigma, v0=None, tol=None):
    """Stationary density matrix of ``sigma``.

    A one-dimensional null space gives the unique steady state and ``v0`` is
    ignored.  Otherwise the steady state depends on the initial state: ``v0``
    is projected onto the null space along the conserved functionals (left
    null vectors), which is the infinite-time limit of the dynamics.
    """
    tol = null_tolerance(sigma) if tol is None else tol
    k = null_dimension(sigma, tol)
    if k == 0:
        raise SolverError(f"no eigenvalue of the generator within {tol:.3g} of zero")
    if k == 1:
        _, _, vh = np.linalg.svd(sigma)
        return _as_density(vh[-1].conj())
    if v0 is None:
        raise InitialStateRequiredError(
            f"initial state required: the steady state is {k}-fold degenerate")
    v0 = np.asarray(v0, dtype=complex)
    if v0.shape == (4, 4):
        v0 = vectorize(v0)
    proj = spectral_projector(sigma, lambda lam: abs(lam) <= tol)
    return _as_density(proj @ v0)


def closed_form_xy_steady(f: FreeFieldParams, c: XYCouplingParams, b: BathParams):
    """Analytic steady state of the xy model: a mixture of Bell-type states.

    ``rho = (Gamma/d) rho_tilde + (J^2 delta^2 G N / d) * identity`` with
    coherences only between ``|00>,|11>`` and between ``|01>,|10>``.
    """
    J, d = c.J, c.delta
    N, G, gam = b.N, b.G, b.gamma_diss
    Om, ob = f.Omega, f.omega_bar
    a_plus = (N - 1) * (G**2 + ob**2) * d**2 + (N + 1) * (G**2 + Om**2) * J**2
    a_minus = (N + 1) * (G**2 + ob**2) * d**2 + (N - 1) * (G**2 + Om**2) * J**2
    e = -1j * J * d**2 * (G + 1j * ob)
    fc = 1j * J**2 * d * (G + 1j * Om)
    d_xy = N * (gam * N * ((G**2 + ob**2) * d**2 + (G**2 + Om**2) * J**2) + 4 * G * J**2 * d**2)
    if abs(d_xy) < 1e-300:
        raise SingularParametersError("d_xy vanishes for these parameters")
    tilde = np.array([
        [(N + 1) * a_plus / 4, 0, 0, N * fc],
        [0, (N - 1) * a_plus / 4, N * e, 0],
        [0, N * np.conj(e), (N + 1) * a_minus / 4, 0],
        [N * np.conj(fc), 0, 0, (N - 1) * a_minus / 4],
    ], dtype=complex)
    return (gam / d_xy) * tilde + (J**2 * d**2 * G * N / d_xy) * np.eye(4)


def thermal_qubit(b: BathParams):
    return np.diag([(1.0 + b.nbar) / b.N, b.nbar / b.N]).astype(complex)


def closed_form_cbf_steady(f: FreeFieldParams, c: CBFCouplingParams, b: BathParams,
                           prep: ProbePreparation):
    """Analytic steady state of the cbf model; block diagonal in the probe sectors."""
    g, w2, G, gam, nb = c.g, f.omega2, b.G, b.gamma_diss, b.nbar
    s = G**2 + w2**2
    bmat = np.array([
        [g**2 * G + nb * gam * s + gam * s, -g * gam * (w2 - 1j * G)],
        [-g * gam * (w2 + 1j * G), g**2 * G + nb * gam * s],
    ], dtype=complex)
    tr = np.trace(bmat).real
    cos2 = math.cos(prep.theta) ** 2
    sin2 = math.sin(prep.theta) ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[:2, :2] = cos2 * thermal_qubit(b)
    if sin2 > 0:
        if tr <= 0:
            raise SingularParametersError("Tr B vanishes for these parameters")
        rho[2:, 2:] = sin2 * bmat / tr
    return rho


def bloch_state(r):
    r = np.asarray(r, dtype=float)
    return 0.5 * (np.eye(2) + r[0] * _PAULI1["x"] + r[1] * _PAULI1["y"] + r[2] * _PAULI1["z"])


def product_state(prep: ProbePreparation, rho2):
    ket = prep.ket()
    return np.kron(np.outer(ket, ket.conj()), np.asarray(rho2, dtype=complex))


def sample_initial_states(count, seed, prep1: ProbePreparation, sigma=DEFAULT_BLOCH_SIGMA):
    """Product states with a pure probe and Gaussian-sampled hidden-qubit Bloch vectors.

    Each Bloch component is drawn from ``N(0, sigma^2)``; draws outside the
    unit ball are rejected and redrawn.
    """
    if count < 1:
        raise ParameterError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    states = []
    while len(states) < count:
        r = rng.normal(0.0, sigma, size=3)
        if np.linalg.norm(r) <= 1.0:
            states.append(product_state(prep1, bloch_state(r)))
    return states
