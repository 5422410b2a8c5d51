"""Entanglement and correlation measures on two-qubit density matrices."""

from __future__ import annotations

import numpy as np

from envprobe.errors import ParameterError

# N = -NEGATIVITY_FACTOR * lambda_min(rho^T2); a Bell state gives 1
NEGATIVITY_FACTOR = 2.0
ENTROPY_BASE = "e"


def _as_tensor(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 matrix, got shape {rho.shape}")
    return rho.reshape(2, 2, 2, 2)


def partial_transpose(rho, subsystem=2):
    t = _as_tensor(rho)
    if subsystem == 1:
        return t.transpose(2, 1, 0, 3).reshape(4, 4)
    if subsystem == 2:
        return t.transpose(0, 3, 2, 1).reshape(4, 4)
    raise ParameterError(f"subsystem must be 1 or 2, got {subsystem!r}")


def negativity(rho, factor=NEGATIVITY_FACTOR):
    pt = partial_transpose(rho)
    lam = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T)).min()
    return float(max(0.0, -factor * lam))


def reduced_state(rho, keep):
    t = _as_tensor(rho)
    if keep == 1:
        return np.einsum("ajbj->ab", t)
    if keep == 2:
        return np.einsum("iaib->ab", t)
    raise ParameterError(f"keep must be 1 or 2, got {keep!r}")


def von_neumann_entropy(rho):
    lam = np.linalg.eigvalsh(0.5 * (rho + np.conj(rho).T))
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log(lam)))


def mutual_information(rho):
    """Quantum mutual information ``S(rho_1) + S(rho_2) - S(rho)`` in nats."""
    rho = np.asarray(rho, dtype=complex)
    value = (von_neumann_entropy(reduced_state(rho, 1))
             + von_neumann_entropy(reduced_state(rho, 2))
             - von_neumann_entropy(rho))
    return max(value, 0.0)


def expectation(rho, op):
    return complex(np.trace(np.asarray(op) @ np.asarray(rho)))
