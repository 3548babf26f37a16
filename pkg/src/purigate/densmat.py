"""Dense multi-qubit states, gates and the basic operations on them.

Qubit 0 is the most significant bit of a computational-basis index, so the
basis state ``|q0 q1 ... q_{n-1}>`` has index ``sum(q_k << (n - 1 - k))``.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import hermitian_min_eig

STATE_TOL = 1e-10
NORM_TOL = 1e-12
UNITARY_TOL = 1e-12
MAX_QUBITS = 6


class InvariantError(ValueError):
    """A state, gate or channel violates one of its defining invariants."""


def _num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _frozen(np.ravel(self.amplitudes))
        _num_qubits(amp.size)
        if abs(np.vdot(amp, amp).real - 1.0) > NORM_TOL:
            raise InvariantError("state vector is not normalized")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.amplitudes.size)


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        u = _frozen(self.matrix)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"gate matrix must be square, got {u.shape}")
        n = _num_qubits(u.shape[0])
        if n > 2:
            raise ValueError("only one- and two-qubit gates are supported")
        if np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) > UNITARY_TOL:
            raise InvariantError(f"gate {self.name or '?'} is not unitary")
        object.__setattr__(self, "matrix", u)

    @property
    def arity(self) -> int:
        return _num_qubits(self.matrix.shape[0])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator on 1-6 qubits.

    Construction validates all three invariants at tolerance 1e-10 and raises
    InvariantError on violation. The stored matrix is read-only.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        n = _num_qubits(m.shape[0])
        if n > MAX_QUBITS:
            raise ValueError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
        object.__setattr__(self, "matrix", m)
        check_state(m)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)


def check_state(m, tol=STATE_TOL):
    """Raise InvariantError unless ``m`` is Hermitian, unit-trace and PSD."""
    m = np.asarray(m)
    herm = np.max(np.abs(m - m.conj().T))
    if herm > tol:
        raise InvariantError(f"not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(m)
    if abs(tr - 1.0) > tol:
        raise InvariantError(f"trace {tr.real:.12g} differs from 1")
    lam = hermitian_min_eig(m)
    if lam < -tol:
        raise InvariantError(f"not positive semidefinite (min eigenvalue {lam:.3e})")


def hygiene(m: np.ndarray) -> DensityMatrix:
    """Symmetrize, renormalize the trace and validate a channel output."""
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real)


# standard gates

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)

PAULI_X = UnitaryGate(X, "X")
PAULI_Z = UnitaryGate(Z, "Z")
HADAMARD = UnitaryGate(H, "H")
CNOT = UnitaryGate(
    np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), "CNOT"
)
SWAP = UnitaryGate(
    np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]), "SWAP"
)


def ket(bits: str) -> StateVector:
    """Computational basis state from a bit string such as ``"01"``."""
    amp = np.zeros(1 << len(bits), dtype=np.complex128)
    amp[int(bits, 2)] = 1.0
    return StateVector(amp)


def bell_phi() -> StateVector:
    return StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))


def make_pure(psi: StateVector) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def maximally_mixed(num_qubits: int) -> DensityMatrix:
    d = 1 << num_qubits
    return DensityMatrix(np.eye(d) / d)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(a.matrix, b.matrix))


# qubit bookkeeping

def _check_targets(targets: Sequence[int], n: int, allow_empty=False) -> tuple:
    targets = tuple(int(t) for t in targets)
    if not targets and not allow_empty:
        raise ValueError("at least one qubit index is required")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate qubit indices in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise IndexError(f"qubit index {t} out of range for {n} qubits")
    return targets


def place(op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Embed an operator acting on ``targets ++ rest`` (in that order) into natural order.

    ``op`` is a ``2**n`` square matrix whose first ``len(targets)`` tensor
    factors correspond to ``targets`` and the remaining ones to the other qubits
    in ascending order.
    """
    rest = [k for k in range(n) if k not in targets]
    order = list(targets) + rest
    perm = np.argsort(order)
    t = op.reshape((2,) * (2 * n))
    t = t.transpose(list(perm) + [n + p for p in perm])
    return t.reshape(1 << n, 1 << n)


def embed(u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    k = len(targets)
    return place(np.kron(u, np.eye(1 << (n - k))), targets, n)


def apply_unitary(rho: DensityMatrix, u: UnitaryGate, targets: Sequence[int]) -> DensityMatrix:
    n = rho.num_qubits
    targets = _check_targets(targets, n)
    if len(targets) != u.arity:
        raise ValueError(f"gate of arity {u.arity} given {len(targets)} targets")
    full = embed(u.matrix, targets, n)
    return hygiene(full @ rho.matrix @ full.conj().T)


def _reduce(m: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    letters = "abcdefghijklmnopqrstuvwxyz"
    ket_idx = list(letters[:n])
    bra_idx = list(letters[n:2 * n])
    for k in range(n):
        if k not in keep:
            bra_idx[k] = ket_idx[k]
    out = "".join(ket_idx[k] for k in keep) + "".join(bra_idx[k] for k in keep)
    d = 1 << len(keep)
    t = np.einsum("".join(ket_idx) + "".join(bra_idx) + "->" + out, m.reshape((2,) * (2 * n)))
    return t.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep``; the output qubit order follows ``keep``."""
    n = rho.num_qubits
    keep = _check_targets(keep, n)
    return hygiene(_reduce(rho.matrix, keep, n))


def partial_transpose(rho, transpose_set: Sequence[int]) -> np.ndarray:
    """Transpose the chosen tensor factors; accepts a DensityMatrix or array."""
    m = np.asarray(rho.matrix if isinstance(rho, DensityMatrix) else rho)
    n = _num_qubits(m.shape[0])
    sel = _check_targets(transpose_set, n, allow_empty=True)
    axes = list(range(2 * n))
    for k in sel:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return m.reshape((2,) * (2 * n)).transpose(axes).reshape(m.shape).copy()


def overlap(rho: DensityMatrix, psi: StateVector) -> float:
    """Fidelity ``<psi|rho|psi>`` of a state with a pure reference."""
    a = psi.amplitudes
    if a.size != rho.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, vector {a.size}")
    return float(np.vdot(a, rho.matrix @ a).real)
