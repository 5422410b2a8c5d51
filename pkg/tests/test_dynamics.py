import math

import numpy as np
import pytest

from conftest import hamiltonian_oracle, integrate_me, random_state, random_xy
from envprobe import InitialStateRequiredError, ParameterError
from envprobe.dynamics import (
    bloch_state,
    closed_form_cbf_steady,
    closed_form_xy_steady,
    null_dimension,
    product_state,
    propagate,
    propagate_series,
    sample_initial_states,
    spectral_projector,
    steady_state,
    thermal_qubit,
    unvectorize,
    validate_state,
    vectorize,
)
from envprobe.model import (
    BathParams,
    CBFCouplingParams,
    FreeFieldParams,
    ProbePreparation,
    build_liouvillian,
)
from envprobe.observables import negativity


def test_vectorization_is_row_major(rng):
    rho = random_state(rng)
    v = vectorize(rho)
    assert v[1] == rho[0, 1] and v[4] == rho[1, 0]
    np.testing.assert_array_equal(unvectorize(v), rho)
    with pytest.raises(ParameterError):
        vectorize(np.eye(3))


def test_validate_state(rng):
    validate_state(random_state(rng))
    with pytest.raises(ParameterError):
        validate_state(np.diag([1.2, -0.2, 0, 0]))
    with pytest.raises(ParameterError):
        validate_state(np.eye(4))


def test_propagate_matches_ode(fig2a, rng):
    f, c, b = fig2a["free"], fig2a["coupling"], fig2a["bath"]
    sigma = build_liouvillian("xy", f, c, b)
    h = hamiltonian_oracle(f.omega1, f.omega2, jx=c.jx, jy=c.jy)
    rho0 = random_state(rng)
    times = np.array([0.0, 0.7, 3.1, 12.0])
    for t, ref in zip(times, integrate_me(h, b, rho0, times)):
        np.testing.assert_allclose(unvectorize(propagate(sigma, vectorize(rho0), t)), ref,
                                   atol=1e-9)


def test_propagate_columns_and_errors(fig2a, rng):
    sigma = build_liouvillian("xy", fig2a["free"], fig2a["coupling"], fig2a["bath"])
    states = np.stack([vectorize(random_state(rng)) for _ in range(3)], axis=1)
    block = propagate(sigma, states, 2.0)
    for k in range(3):
        np.testing.assert_allclose(block[:, k], propagate(sigma, states[:, k], 2.0), atol=1e-14)
    assert propagate_series(sigma, states[:, 0], [0, 1, 2]).shape == (3, 16)
    with pytest.raises(ParameterError):
        propagate(sigma, states[:, 0], -1.0)
    with pytest.raises(ParameterError):
        propagate(sigma, states[:, 0], float("nan"))


def test_xy_closed_form_frozen_fig2a(fig2a):
    rho = closed_form_xy_steady(fig2a["free"], fig2a["coupling"], fig2a["bath"])
    assert negativity(rho) == pytest.approx(0.060662583577, abs=1e-10)
    # only |00>,|11> and |01>,|10> coherences survive
    mask = np.ones((4, 4), bool)
    for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)]:
        mask[i, j] = False
    assert np.all(rho[mask] == 0)
    validate_state(rho)


def test_xy_closed_form_random(rng):
    for _ in range(10):
        f, c, b = random_xy(rng)
        sigma = build_liouvillian("xy", f, c, b)
        assert null_dimension(sigma) == 1
        np.testing.assert_allclose(closed_form_xy_steady(f, c, b), steady_state(sigma), atol=1e-10)


def test_steady_state_residual(rng):
    f, c, b = random_xy(rng)
    sigma = build_liouvillian("xy", f, c, b)
    ss = steady_state(sigma)
    assert np.max(np.abs(sigma @ vectorize(ss))) < 1e-12
    assert np.trace(ss).real == pytest.approx(1.0)


def test_cbf_requires_initial_state(fig2c):
    sigma = build_liouvillian("cbf", fig2c["free"], fig2c["coupling"], fig2c["bath"])
    assert null_dimension(sigma) == 2
    with pytest.raises(InitialStateRequiredError):
        steady_state(sigma)


def test_cbf_projection_equals_long_time_limit(fig2c):
    f, c, b, prep = fig2c["free"], fig2c["coupling"], fig2c["bath"], fig2c["prep"]
    sigma = build_liouvillian("cbf", f, c, b)
    rho0 = product_state(prep, bloch_state([0.3, -0.2, 0.5]))
    ss = steady_state(sigma, vectorize(rho0))
    rates = -np.linalg.eigvals(sigma).real
    t_late = 40.0 / rates[rates > 1e-9].min()
    late = unvectorize(propagate(sigma, vectorize(rho0), t_late))
    np.testing.assert_allclose(ss, late, atol=1e-10)
    np.testing.assert_allclose(ss, closed_form_cbf_steady(f, c, b, prep), atol=1e-12)


def test_cbf_closed_form_limits():
    f = FreeFieldParams(1.2, 0.9)
    b = BathParams(0.5, 0.02, 0.4)
    ground = closed_form_cbf_steady(f, CBFCouplingParams(0.3), b, ProbePreparation(0.0))
    np.testing.assert_allclose(ground[:2, :2], thermal_qubit(b))
    assert np.all(ground[2:, :] == 0)
    # without coupling both sectors thermalize
    free = closed_form_cbf_steady(f, CBFCouplingParams(0.0), b, ProbePreparation(math.pi / 2))
    np.testing.assert_allclose(free[2:, 2:], thermal_qubit(b), atol=1e-15)


def test_spectral_projector_properties(fig2c):
    sigma = build_liouvillian("cbf", fig2c["free"], fig2c["coupling"], fig2c["bath"])
    p = spectral_projector(sigma, lambda lam: abs(lam) < 1e-8)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(p @ sigma, sigma @ p, atol=1e-12)
    assert np.trace(p).real == pytest.approx(2.0)


def test_sampler_is_seeded_and_physical():
    prep = ProbePreparation(0.0)
    a = sample_initial_states(20, 7, prep)
    b = sample_initial_states(20, 7, prep)
    c = sample_initial_states(20, 8, prep)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], c[0])
    for rho in a:
        validate_state(rho)
        assert rho[2, 2] == 0 and rho[3, 3] == 0
    with pytest.raises(ParameterError):
        sample_initial_states(0, 1, prep)


def test_sampler_zero_width_gives_maximally_mixed():
    (rho,) = sample_initial_states(1, 1, ProbePreparation(0.0), sigma=0.0)
    np.testing.assert_allclose(rho[:2, :2], np.eye(2) / 2)
