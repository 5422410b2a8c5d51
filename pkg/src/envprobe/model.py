"""Hamiltonians, bath dissipator and Liouvillian for the probe/hidden qubit pair.

Conventions used everywhere in the package:

* basis order ``|00>, |01>, |10>, |11>`` with qubit 1 (the probe) as the
  leading tensor factor;
* ``sigma_z = |1><1| - |0><0|``, so ``|1>`` is the excited state;
* ``sigma_+ = |1><0|`` and ``sigma_y`` is fixed by ``sigma_+- = (sigma_x +- i sigma_y)/2``;
* density matrices are vectorized row-major, i.e. element ``rho[lm, pq]``
  sits at position ``p = 8 l + 4 m + 2 p + q`` of the 16-vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from envprobe.errors import ParameterError

_ID2 = np.eye(2, dtype=complex)
_SINGLE = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "+": np.array([[0, 0], [1, 0]], dtype=complex),
    "-": np.array([[0, 1], [0, 0]], dtype=complex),
    "projector0": np.array([[1, 0], [0, 0]], dtype=complex),
    "projector1": np.array([[0, 0], [0, 1]], dtype=complex),
}
_ALIASES = {
    "plus": "+",
    "minus": "-",
    "−": "-",
    "p0": "projector0",
    "p1": "projector1",
}

MODELS = ("xy", "cbf")


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class FreeFieldParams:
    """Bare transition frequencies of the probe (``omega1``) and hidden qubit (``omega2``)."""

    omega1: float
    omega2: float

    def __post_init__(self):
        object.__setattr__(self, "omega1", _finite("omega1", self.omega1))
        object.__setattr__(self, "omega2", _finite("omega2", self.omega2))

    @classmethod
    def from_sum_difference(cls, Omega, omega_bar):
        return cls((Omega + omega_bar) / 2.0, (Omega - omega_bar) / 2.0)

    @property
    def Omega(self):
        return self.omega1 + self.omega2

    @property
    def omega_bar(self):
        return self.omega1 - self.omega2


@dataclass(frozen=True)
class XYCouplingParams:
    jx: float
    jy: float

    def __post_init__(self):
        object.__setattr__(self, "jx", _finite("jx", self.jx))
        object.__setattr__(self, "jy", _finite("jy", self.jy))

    @classmethod
    def from_j_delta(cls, J, delta):
        return cls((J + delta) / 2.0, (J - delta) / 2.0)

    @property
    def J(self):
        return self.jx + self.jy

    @property
    def delta(self):
        return self.jx - self.jy


@dataclass(frozen=True)
class CBFCouplingParams:
    g: float

    def __post_init__(self):
        object.__setattr__(self, "g", _finite("g", self.g))


@dataclass(frozen=True)
class ProbePreparation:
    """Pure probe state ``cos(theta)|0> + exp(i phi) sin(theta)|1>``."""

    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        theta = _finite("theta", self.theta)
        phi = _finite("phi", self.phi)
        eps = 1e-12
        if not -eps <= theta <= math.pi / 2 + eps:
            raise ParameterError(f"theta must lie in [0, pi/2], got {theta}")
        if not -eps <= phi <= math.pi + eps:
            raise ParameterError(f"phi must lie in [0, pi], got {phi}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    def ket(self):
        return np.array([math.cos(self.theta), np.exp(1j * self.phi) * math.sin(self.theta)])


@dataclass(frozen=True)
class BathParams:
    """Environment of the hidden qubit: dissipation ``gamma_diss``, dephasing ``gamma_deph``, occupancy ``nbar``."""

    gamma_diss: float
    gamma_deph: float
    nbar: float

    def __post_init__(self):
        for name in ("gamma_diss", "gamma_deph", "nbar"):
            value = _finite(name, getattr(self, name))
            if value < 0:
                raise ParameterError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)

    @property
    def N(self):
        return 2.0 * self.nbar + 1.0

    @property
    def G(self):
        return self.gamma_diss * self.N + 2.0 * self.gamma_deph


def pauli(which, qubit):
    """Embed a single-qubit operator on ``qubit`` (1 or 2) into the 4x4 space.

    ``which`` is one of ``x, y, z, +, -, projector0, projector1``
    (``plus``, ``minus``, ``p0``, ``p1`` are accepted as aliases).
    """
    key = _ALIASES.get(which, which)
    if key not in _SINGLE:
        raise ParameterError(f"unknown operator label {which!r}")
    if qubit == 1:
        return np.kron(_SINGLE[key], _ID2)
    if qubit == 2:
        return np.kron(_ID2, _SINGLE[key])
    raise ParameterError(f"qubit must be 1 or 2, got {qubit!r}")


def build_free_hamiltonian(f: FreeFieldParams) -> np.ndarray:
    return 0.5 * f.omega1 * pauli("z", 1) + 0.5 * f.omega2 * pauli("z", 2)


def build_xy_hamiltonian(c: XYCouplingParams) -> np.ndarray:
    return (c.jx * pauli("x", 1) @ pauli("x", 2)
            + c.jy * pauli("y", 1) @ pauli("y", 2))


def build_cbf_hamiltonian(c: CBFCouplingParams) -> np.ndarray:
    return 0.5 * c.g * (np.eye(4) + pauli("z", 1)) @ pauli("x", 2)


def cbf_eigensystem(c: CBFCouplingParams, f: FreeFieldParams):
    """Closed-form eigenpairs of ``H_f + H_cbf``, sorted by eigenvalue.

    The probe-ground sector holds ``|00>`` and ``|01>``.  In the probe-excited
    sector the eigenvalues are ``(omega1 -+ sqrt(omega2**2 + 4 g**2)) / 2`` and
    the eigenvectors are proportional to ``a |10> + |11>`` with
    ``a = -omega2/(2g) -+ sqrt(1 + (omega2/2g)**2)`` for ``omega2/g > 0``
    (the sign of the square root follows ``omega2/g`` in general).
    """
    w1, w2, g = f.omega1, f.omega2, c.g
    basis = np.eye(4, dtype=complex)
    pairs = [(-f.Omega / 2.0, basis[0]), (-f.omega_bar / 2.0, basis[1])]
    if g == 0.0:
        pairs += [(f.omega_bar / 2.0, basis[2]), (f.Omega / 2.0, basis[3])]
    else:
        root = math.sqrt(w2 * w2 + 4.0 * g * g)
        for shift in (-root / 2.0, root / 2.0):
            a = (shift - w2 / 2.0) / g
            vec = np.array([0.0, 0.0, a, 1.0], dtype=complex)
            pairs.append((w1 / 2.0 + shift, vec / np.linalg.norm(vec)))
    pairs.sort(key=lambda p: p[0])
    return pairs


def _left(a):
    return np.kron(a, np.eye(a.shape[0]))


def _right(b):
    return np.kron(np.eye(b.shape[0]), b.T)


def unitary_superoperator(h):
    """Superoperator of ``rho -> -i [h, rho]``."""
    return -1j * (_left(h) - _right(h))


def build_dissipator(b: BathParams) -> np.ndarray:
    """Superoperator of the hidden-qubit bath, written term by term.

    Populations of qubit 2 relax at ``2 Gamma (nbar + 1)`` downwards and
    ``2 Gamma nbar`` upwards; coherences pick up ``Gamma N + 2 gamma``.
    """
    p1, p0 = pauli("projector1", 2), pauli("projector0", 2)
    lower, raise_ = pauli("-", 2), pauli("+", 2)
    sz = pauli("z", 2)
    emission = _left(p1) + _right(p1) - 2.0 * _left(lower) @ _right(raise_)
    absorption = _left(p0) + _right(p0) - 2.0 * _left(raise_) @ _right(lower)
    # literal -gamma [sz, sz rho]
    dephasing = _left(sz @ sz) - _left(sz) @ _right(sz)
    return (-b.gamma_diss * (b.nbar + 1.0) * emission
            - b.gamma_diss * b.nbar * absorption
            - b.gamma_deph * dephasing)


def apply_dissipator(rho, b: BathParams):
    """Direct matrix evaluation of the bath term, independent of :func:`build_dissipator`."""
    p1, p0 = pauli("projector1", 2), pauli("projector0", 2)
    lower, raise_ = pauli("-", 2), pauli("+", 2)
    sz = pauli("z", 2)
    return (-b.gamma_diss * (b.nbar + 1.0) * (p1 @ rho + rho @ p1 - 2.0 * lower @ rho @ raise_)
            - b.gamma_diss * b.nbar * (p0 @ rho + rho @ p0 - 2.0 * raise_ @ rho @ lower)
            - b.gamma_deph * (sz @ (sz @ rho) - (sz @ rho) @ sz))


def build_interaction(model, coupling):
    if model == "xy":
        if not isinstance(coupling, XYCouplingParams):
            raise ParameterError("xy model needs XYCouplingParams")
        return build_xy_hamiltonian(coupling)
    if model == "cbf":
        if not isinstance(coupling, CBFCouplingParams):
            raise ParameterError("cbf model needs CBFCouplingParams")
        return build_cbf_hamiltonian(coupling)
    raise ParameterError(f"unknown model {model!r}; expected one of {MODELS}")


def total_hamiltonian(model, f, coupling):
    return build_free_hamiltonian(f) + build_interaction(model, coupling)


def build_liouvillian(model, f: FreeFieldParams, coupling, b: BathParams) -> np.ndarray:
    """Generator ``Sigma`` of ``d vec(rho)/dt = Sigma vec(rho)`` for the ``xy`` or ``cbf`` model."""
    h = total_hamiltonian(model, f, coupling)
    return unitary_superoperator(h) + build_dissipator(b)
