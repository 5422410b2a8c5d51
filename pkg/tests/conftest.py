import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from envprobe.model import (
    BathParams,
    CBFCouplingParams,
    FreeFieldParams,
    ProbePreparation,
    XYCouplingParams,
)

# Standalone qubit algebra for the oracles; deliberately not taken from envprobe.model.
KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])
LOWER = np.outer(KET0, KET1)        # |0><1|
RAISE = np.outer(KET1, KET0)        # |1><0|
SZ = np.outer(KET1, KET1) - np.outer(KET0, KET0)
SX = LOWER + RAISE
SY = -1j * (RAISE - LOWER)
I2 = np.eye(2)


def on2(op):
    return np.kron(I2, op)


def on1(op):
    return np.kron(op, I2)


def hamiltonian_oracle(omega1, omega2, jx=0.0, jy=0.0, g=0.0):
    h = 0.5 * omega1 * on1(SZ) + 0.5 * omega2 * on2(SZ)
    h = h + jx * on1(SX) @ on2(SX) + jy * on1(SY) @ on2(SY)
    h = h + 0.5 * g * (np.eye(4) + on1(SZ)) @ on2(SX)
    return h


def lindblad_rhs(h, gamma_diss, gamma_deph, nbar):
    """Master-equation right-hand side written out in matrix form."""
    lo, hi, z = on2(LOWER), on2(RAISE), on2(SZ)
    down = gamma_diss * (nbar + 1.0)
    up = gamma_diss * nbar

    def rhs(rho):
        out = -1j * (h @ rho - rho @ h)
        out += down * (2 * lo @ rho @ hi - hi @ lo @ rho - rho @ hi @ lo)
        out += up * (2 * hi @ rho @ lo - lo @ hi @ rho - rho @ lo @ hi)
        out += gamma_deph * (z @ rho @ z - rho)
        return out

    return rhs


def integrate_me(h, bath, rho0, times):
    """DOP853 solution of the master equation (real/imag split); states at ``times``."""
    rhs = lindblad_rhs(h, bath.gamma_diss, bath.gamma_deph, bath.nbar)

    def f(_, y):
        rho = (y[:16] + 1j * y[16:]).reshape(4, 4)
        d = rhs(rho).reshape(16)
        return np.concatenate([d.real, d.imag])

    y0 = np.concatenate([rho0.reshape(16).real, rho0.reshape(16).imag])
    sol = solve_ivp(f, (0.0, times[-1]), y0, method="DOP853", t_eval=times,
                    rtol=1e-13, atol=1e-14)
    assert sol.success
    return [(sol.y[:16, k] + 1j * sol.y[16:, k]).reshape(4, 4) for k in range(len(times))]


def random_hermitian(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def random_state(rng, n=4, rank=None):
    rank = n if rank is None else rank
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_unitary2(rng):
    q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return q * (np.diag(r) / abs(np.diag(r)))


def random_xy(rng):
    free = FreeFieldParams.from_sum_difference(rng.uniform(1.0, 4.0), rng.uniform(-0.6, 0.6))
    coupling = XYCouplingParams(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
    bath = BathParams(rng.uniform(0.02, 0.6), rng.uniform(0.0, 0.3), rng.uniform(0.0, 2.0))
    return free, coupling, bath


def random_cbf(rng):
    free = FreeFieldParams.from_sum_difference(rng.uniform(1.0, 4.0), rng.uniform(-0.6, 0.6))
    coupling = CBFCouplingParams(rng.choice([-1, 1]) * rng.uniform(0.1, 0.8))
    bath = BathParams(rng.uniform(0.05, 1.0), rng.uniform(0.0, 0.3), rng.uniform(0.0, 2.0))
    return free, coupling, bath


@pytest.fixture
def rng():
    return np.random.default_rng(20080101)


@pytest.fixture
def fig2a():
    return dict(free=FreeFieldParams.from_sum_difference(3.0, 0.3),
                coupling=XYCouplingParams.from_j_delta(0.3, 0.1),
                bath=BathParams(0.1, 0.001, 1e-3),
                prep=ProbePreparation(0.0, 0.0))


@pytest.fixture
def fig2c():
    return dict(free=FreeFieldParams.from_sum_difference(3.0, 0.3),
                coupling=CBFCouplingParams(0.3),
                bath=BathParams(1.0, 0.01, 1e-3),
                prep=ProbePreparation(math.pi / 4, 0.0))


@pytest.fixture
def fig3a_free():
    return FreeFieldParams.from_sum_difference(3.0, 0.0)


@pytest.fixture
def fig3a_coupling():
    return XYCouplingParams.from_j_delta(0.3, 0.1)


# ---- acceptance reporting: one line per criterion in the terminal summary ----

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    _ACCEPTANCE[number] = (title, report.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}: {detail}")


@pytest.fixture
def detail(request):
    """Attach a human-readable measurement to the acceptance line of the running test."""
    def note(text):
        request.node.user_properties.append(("detail", text))
    return note
