import math

import numpy as np
import pytest

from conftest import random_state, random_unitary2
from envprobe import ParameterError
from envprobe.observables import (
    expectation,
    mutual_information,
    negativity,
    partial_transpose,
    reduced_state,
    von_neumann_entropy,
)

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


def _pure(ket):
    return np.outer(ket, np.conj(ket))


def test_partial_transpose_by_hand(rng):
    rho = random_state(rng)
    pt = partial_transpose(rho)
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        assert pt[2 * i + j, 2 * k + l] == rho[2 * i + l, 2 * k + j]
    pt1 = partial_transpose(rho, subsystem=1)
    # PT on 1 is the transpose of PT on 2
    np.testing.assert_allclose(pt1, pt.T)
    with pytest.raises(ParameterError):
        partial_transpose(rho, subsystem=3)


def test_negativity_reference_values():
    assert negativity(_pure(BELL)) == pytest.approx(1.0)
    assert negativity(np.eye(4) / 4) == 0.0
    # Werner state p|Bell><Bell| + (1-p) I/4 is entangled for p > 1/3
    for p in (0.2, 1 / 3, 0.5, 0.9):
        rho = p * _pure(BELL) + (1 - p) * np.eye(4) / 4
        assert negativity(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-14)
    assert negativity(_pure(BELL), factor=1.0) == pytest.approx(0.5)


def test_negativity_local_unitary_invariance(rng):
    for _ in range(10):
        rho = random_state(rng, rank=2)
        u = np.kron(random_unitary2(rng), random_unitary2(rng))
        assert negativity(u @ rho @ u.conj().T) == pytest.approx(negativity(rho), abs=1e-12)


def test_product_states_are_separable(rng):
    for _ in range(10):
        rho = np.kron(random_state(rng, 2), random_state(rng, 2))
        assert negativity(rho) == 0.0
        assert mutual_information(rho) == pytest.approx(0.0, abs=1e-12)


def test_entropies():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(math.log(4))
    assert mutual_information(_pure(BELL)) == pytest.approx(2 * math.log(2))
    np.testing.assert_allclose(reduced_state(_pure(BELL), 1), np.eye(2) / 2)
    rho = np.kron(np.diag([0.7, 0.3]), np.diag([0.1, 0.9]))
    np.testing.assert_allclose(reduced_state(rho, 1), np.diag([0.7, 0.3]))
    np.testing.assert_allclose(reduced_state(rho, 2), np.diag([0.1, 0.9]))


def test_expectation():
    rho = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    assert expectation(rho, np.diag([1, 0, 0, 0])) == pytest.approx(0.1)
