"""Teleported CNOT from a shared pair, Choi matrices, average gate fidelity and entangling test."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .densmat import CNOT, PAULI_X, PAULI_Z, DensityMatrix, InvariantError, UnitaryGate, hygiene
from .linalg import hermitian_min_eig
from .noise import NoiseParams, noisy_gate, noisy_measure, single_qubit
from .purification import CostReport, PumpConfig, PumpResult, nested_pump

CHOI_TOL = 1e-9
ENTANGLING_TOL = 1e-9

# input/output factors of a two-qubit Choi matrix: (in_A, in_B, out_A, out_B)
A_SIDE = (0, 2)
B_SIDE = (1, 3)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """``C = sum_ij |i><j| (x) E(|i><j|)`` for a two-qubit channel; trace 4."""

    elements: np.ndarray
    dim_in: int = 4

    def __post_init__(self):
        c = np.array(self.elements, dtype=np.complex128)
        d = self.dim_in
        if c.shape != (d * d, d * d):
            raise ValueError(f"Choi matrix for dim_in={d} must be {d * d}x{d * d}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "elements", c)
        check_choi(c, d)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Channel action ``E(rho) = tr_in[(rho^T (x) 1) C]``."""
        d = self.dim_in
        c = self.elements.reshape(d, d, d, d)
        return np.einsum("ij,iajb->ab", np.asarray(rho), c)


def check_choi(c: np.ndarray, d: int = 4, tol: float = CHOI_TOL):
    herm = np.max(np.abs(c - c.conj().T))
    if herm > tol:
        raise InvariantError(f"Choi matrix not Hermitian (deviation {herm:.3e})")
    if abs(np.trace(c) - d) > tol:
        raise InvariantError(f"Choi trace {np.trace(c).real:.12g} differs from {d}")
    tp = np.einsum("iaja->ij", c.reshape(d, d, d, d))
    if np.max(np.abs(tp - np.eye(d))) > tol:
        raise InvariantError("channel is not trace preserving")
    lam = hermitian_min_eig(c)
    if lam < -tol:
        raise InvariantError(f"channel is not completely positive (min eigenvalue {lam:.3e})")


def _omega(d: int = 4) -> np.ndarray:
    """Unnormalized ``sum_i |ii>``."""
    return np.eye(d).reshape(d * d).astype(np.complex128)


def unitary_choi(u: UnitaryGate) -> np.ndarray:
    v = np.kron(np.eye(u.matrix.shape[0]), u.matrix) @ _omega(u.matrix.shape[0])
    return np.outer(v, v.conj())


def choi_of_noisy_gate(u: UnitaryGate, q: float) -> ChoiMatrix:
    if u.arity != 2:
        raise ValueError("expected a two-qubit gate")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    return ChoiMatrix(q * unitary_choi(u) + (1.0 - q) * np.eye(16) / 4)


def avg_gate_fidelity(choi: ChoiMatrix, target: UnitaryGate) -> float:
    d = choi.dim_in
    if target.matrix.shape[0] != d:
        raise ValueError(f"target acts on dimension {target.matrix.shape[0]}, channel on {d}")
    psi = np.kron(np.eye(d), target.matrix) @ _omega(d) / np.sqrt(d)
    f_pro = np.vdot(psi, choi.elements @ psi).real / d
    return float(np.clip((d * f_pro + 1.0) / (d + 1.0), 0.0, 1.0))


def is_entangling(choi: ChoiMatrix, cut: Sequence[int] = A_SIDE):
    """PPT test on the normalized Choi state across particle A versus particle B.

    ``cut`` lists the Choi factors held by particle A, out of
    (in_A, in_B, out_A, out_B); it must contain exactly one input and one
    output factor. Returns ``(entangling, min eigenvalue of the partial transpose)``.
    """
    cut = tuple(sorted(int(k) for k in cut))
    if len(cut) != 2 or len(set(cut)) != 2 or not all(0 <= k < 4 for k in cut) \
            or not (cut[0] in (0, 1) and cut[1] in (2, 3)):
        raise ValueError(f"malformed cut {cut}: need one input and one output factor")
    from .densmat import partial_transpose

    pt = partial_transpose(choi.elements / choi.dim_in, cut)
    lam = hermitian_min_eig(0.5 * (pt + pt.conj().T))
    return bool(lam < -ENTANGLING_TOL), lam


# teleportation register: references, logical qubits, resource pair
R_A, R_B, A1, B1, A2, B2 = range(6)


def teleported_cnot_channel(pair: DensityMatrix, noise: NoiseParams) -> ChoiMatrix:
    """Choi matrix of the CNOT(A1 -> B1) realized by consuming ``pair`` on (A2, B2).

    Steps: noisy CNOT A1->A2; noisy Z measurement of A2 with X on B2 for
    outcome 1; noisy CNOT B2->B1; noisy X measurement of B2 with Z on A1 for
    outcome 1. Both measurement branches are summed after correction.
    """
    if not isinstance(pair, DensityMatrix) or pair.num_qubits != 2:
        raise ValueError("pair must be a two-qubit DensityMatrix")
    omega = _omega(4) / 2.0  # references (R_A, R_B) against inputs (A1, B1)
    ref_in = np.outer(omega, omega.conj())
    rho = DensityMatrix(np.kron(ref_in, pair.matrix))

    rho = noisy_gate(rho, CNOT, [A1, A2], noise.q_local)
    m1 = noisy_measure(rho, A2, "Z", noise.eta)
    # A2 removed: (R_A, R_B, A1, B1, B2)
    b2 = 4
    branch = np.zeros((32, 32), dtype=np.complex128)
    for k in (0, 1):
        st = m1.post_states[k]
        if st is None:
            continue
        if k == 1:
            st = single_qubit(st, PAULI_X, b2, noise)
        branch += m1.probabilities[k] * st.matrix
    rho = hygiene(branch)

    rho = noisy_gate(rho, CNOT, [b2, 3], noise.q_local)
    m2 = noisy_measure(rho, b2, "X", noise.eta)
    # B2 removed: (R_A, R_B, A1, B1)
    out = np.zeros((16, 16), dtype=np.complex128)
    for k in (0, 1):
        st = m2.post_states[k]
        if st is None:
            continue
        if k == 1:
            st = single_qubit(st, PAULI_Z, 2, noise)
        out += m2.probabilities[k] * st.matrix
    out = hygiene(out).matrix
    return ChoiMatrix(4.0 * out)


@dataclass(frozen=True)
class GateMetrics:
    avg_fidelity: float
    error_rate: float
    entangling: bool
    ppt_min_eig: float


def gate_metrics(choi: ChoiMatrix, target: UnitaryGate = CNOT) -> GateMetrics:
    f = avg_gate_fidelity(choi, target)
    ent, lam = is_entangling(choi)
    return GateMetrics(f, 1.0 - f, ent, lam)


@dataclass(frozen=True)
class LogicalGateReport:
    metrics: GateMetrics
    cost: CostReport
    pump: PumpResult

    @property
    def pair_fidelity(self) -> float:
        return self.pump.final_pair.fidelity

    @property
    def pump_steps_total(self) -> int:
        return sum(len(s) for s in self.cost.step_success_probs)


def logical_gate_metrics(noise: NoiseParams, config: PumpConfig) -> LogicalGateReport:
    """Purify with nested pumping, depolarize the pair to Werner form and teleport a CNOT with it."""
    pump = nested_pump(noise, config)
    choi = teleported_cnot_channel(pump.final_pair.to_werner(), noise)
    return LogicalGateReport(gate_metrics(choi), pump.cost, pump)
