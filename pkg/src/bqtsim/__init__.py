"""Statevector simulation and verification of symmetric bidirectional
teleportation of GHZ-class states over a 2N-qubit cluster channel."""

from .ghz import GhzBasisState, GhzOutcome, ghz_basis, ghz_decode_circuit, ghz_measure, measure_via_decode
from .metrics import ProtocolMetrics, efficiency, render_percent, table3
from .oracle import derive_collapsed_states, derive_correction, derive_correction_table, diff_against_published
from .pauli import PauliOp, PauliString, apply_string, enumerate_strings
from .protocol import (
    CorrectionTable,
    InputCoefficients,
    ProtocolTranscript,
    build_cluster_channel,
    prepare_input,
    qubit_layout,
    run_bqt,
)
from .statevector import StateVector, fidelity, from_amplitudes, tensor, zero_state

__version__ = "0.1.0"
