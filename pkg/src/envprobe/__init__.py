"""Indirect probing of a hidden qubit's environment through an accessible probe qubit."""

from envprobe.errors import (
    EnvProbeError,
    InitialStateRequiredError,
    ParameterError,
    SingularParametersError,
    SolverError,
    TruncationError,
)
from envprobe.model import (
    BathParams,
    CBFCouplingParams,
    FreeFieldParams,
    ProbePreparation,
    XYCouplingParams,
    build_cbf_hamiltonian,
    build_dissipator,
    build_free_hamiltonian,
    build_liouvillian,
    build_xy_hamiltonian,
    cbf_eigensystem,
    pauli,
)
from envprobe.dynamics import (
    closed_form_cbf_steady,
    closed_form_xy_steady,
    propagate,
    sample_initial_states,
    steady_state,
    unvectorize,
    vectorize,
)
from envprobe.observables import expectation, mutual_information, negativity, partial_transpose
from envprobe.spectrum import (
    correlation_initial,
    correlation_time_domain,
    emission_spectrum,
    peak_analysis,
    spectrum_from_time_domain,
)

__version__ = "0.1.0"
