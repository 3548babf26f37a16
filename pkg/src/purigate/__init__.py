"""Entanglement-purification-assisted two-qubit gates under depolarizing noise."""

from .densmat import (
    CNOT,
    HADAMARD,
    PAULI_X,
    PAULI_Z,
    SWAP,
    DensityMatrix,
    InvariantError,
    StateVector,
    UnitaryGate,
    apply_unitary,
    bell_phi,
    ket,
    make_pure,
    overlap,
    partial_trace,
    partial_transpose,
    tensor,
)
from .estimator import LogicalGateModel
from .linalg import hermitian_min_eig
from .noise import (
    BellDiagonal,
    MeasurementOutcome,
    NoiseParams,
    bell_twirl,
    error_rate_from_q,
    noisy_gate,
    noisy_measure,
    q_from_error_rate,
    raw_pair,
    werner,
)
from .purification import (
    CostReport,
    PumpConfig,
    PumpResult,
    nested_pump,
    pump_level,
    recurrence_fixed_point,
    recurrence_step,
)
from .teleport import (
    ChoiMatrix,
    GateMetrics,
    avg_gate_fidelity,
    choi_of_noisy_gate,
    is_entangling,
    logical_gate_metrics,
    teleported_cnot_channel,
)

__version__ = "0.1.0"
