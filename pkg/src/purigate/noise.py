"""Depolarizing gate channel, noisy POVM measurement, Werner and Bell-diagonal pairs."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .densmat import (
    CNOT,
    HADAMARD,
    DensityMatrix,
    StateVector,
    UnitaryGate,
    _check_targets,
    bell_phi,
    embed,
    hygiene,
    ket,
    make_pure,
    place,
    tensor,
    _reduce,
)

SQRT_HALF = np.sqrt(0.5)

# Bell basis in the fixed coefficient order Phi+, Psi+, Psi-, Phi-
BELL_VECTORS = np.array(
    [
        [SQRT_HALF, 0, 0, SQRT_HALF],
        [0, SQRT_HALF, SQRT_HALF, 0],
        [0, SQRT_HALF, -SQRT_HALF, 0],
        [SQRT_HALF, 0, 0, -SQRT_HALF],
    ],
    dtype=np.complex128,
)
BELL_LABELS = ("phi+", "psi+", "psi-", "phi-")


def error_rate_from_q(q: float, d: int = 4) -> float:
    """Error rate ``1 - F`` of a depolarizing channel with reliability ``q`` on dimension ``d``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"reliability q={q} outside [0, 1]")
    return (1.0 - q) * (d - 1) / d


def q_from_error_rate(p: float, d: int = 4) -> float:
    pmax = (d - 1) / d
    if not 0.0 <= p <= pmax:
        raise ValueError(f"error rate p={p} outside [0, {pmax:g}]")
    return 1.0 - p * d / (d - 1)


@dataclass(frozen=True)
class NoiseParams:
    """Reliabilities of the local and physical operations.

    ``q_local`` applies to every two-subsystem operation inside one particle,
    ``eta`` to measurements, ``q_two`` to the physical two-particle gate and
    ``p_herald`` is the probability that the physical gate reports success.
    Single-qubit rotations and Pauli corrections are exact unless
    ``noisy_single_qubit`` is set, in which case they depolarize with
    ``q_local``.
    """

    q_local: float = 1.0
    eta: float = 1.0
    q_two: float = 1.0
    p_herald: float = 1.0
    noisy_single_qubit: bool = False

    def __post_init__(self):
        for name in ("q_local", "eta", "q_two"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if not 0.0 < self.p_herald <= 1.0:
            raise ValueError(f"p_herald={self.p_herald} outside (0, 1]")

    @classmethod
    def from_error_rates(cls, p_single, p_two, eta=None, p_herald=1.0, **kw):
        """Build from error rates; ``eta`` defaults to the local reliability."""
        q_local = q_from_error_rate(p_single)
        return cls(
            q_local=q_local,
            eta=q_local if eta is None else eta,
            q_two=q_from_error_rate(p_two),
            p_herald=p_herald,
            **kw,
        )

    @property
    def p_local(self) -> float:
        return error_rate_from_q(self.q_local)

    @property
    def p_two(self) -> float:
        return error_rate_from_q(self.q_two)


def depolarize_after(rho: DensityMatrix, u: UnitaryGate, targets: Sequence[int], q: float) -> DensityMatrix:
    """``q U rho U^+ + (1-q) (1/d on targets) (x) tr_targets(rho)`` for any gate arity."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"reliability q={q} outside [0, 1]")
    n = rho.num_qubits
    targets = _check_targets(targets, n)
    if len(targets) != u.arity:
        raise ValueError(f"gate of arity {u.arity} given {len(targets)} targets")
    full = embed(u.matrix, targets, n)
    out = q * (full @ rho.matrix @ full.conj().T)
    if q < 1.0:
        k = len(targets)
        rest = [j for j in range(n) if j not in targets]
        mixed = np.eye(1 << k) / (1 << k)
        if rest:
            mixed = np.kron(mixed, _reduce(rho.matrix, rest, n))
        out = out + (1.0 - q) * place(mixed, targets, n)
    return hygiene(out)


def noisy_gate(rho: DensityMatrix, u: UnitaryGate, targets: Sequence[int], q: float) -> DensityMatrix:
    """Two-subsystem gate that succeeds with probability ``q`` and otherwise
    leaves its two targets completely depolarized."""
    if u.arity != 2:
        raise ValueError("noisy_gate acts on exactly two qubits")
    return depolarize_after(rho, u, targets, q)


def single_qubit(rho: DensityMatrix, u: UnitaryGate, target: int, noise: Optional[NoiseParams]) -> DensityMatrix:
    q = noise.q_local if noise is not None and noise.noisy_single_qubit else 1.0
    return depolarize_after(rho, u, [target], q)


@dataclass(frozen=True)
class MeasurementOutcome:
    probabilities: tuple
    post_states: tuple  # DensityMatrix per outcome, None when unreachable or nothing remains

    def weighted(self, k: int) -> Optional[np.ndarray]:
        """Unnormalized post-measurement state ``p_k * rho_k``."""
        st = self.post_states[k]
        return None if st is None else self.probabilities[k] * st.matrix


def noisy_measure(rho: DensityMatrix, target: int, basis: str, eta: float) -> MeasurementOutcome:
    """Two-outcome measurement of one qubit with reliability ``eta``.

    The POVM elements are ``eta |k><k| + (1-eta) |1-k><1-k|`` in the chosen
    basis. The measured qubit is removed; remaining qubits keep their order.
    """
    if basis not in ("Z", "X"):
        raise ValueError(f"unknown measurement basis {basis!r}; expected 'Z' or 'X'")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    n = rho.num_qubits
    (target,) = _check_targets([target], n)
    m = rho.matrix
    if basis == "X":
        hf = embed(HADAMARD.matrix, [target], n)
        m = hf @ m @ hf.conj().T
    t = m.reshape((2,) * (2 * n))
    blocks = []
    for b in (0, 1):
        idx = [slice(None)] * (2 * n)
        idx[target] = b
        idx[n + target] = b
        d = 1 << (n - 1)
        blocks.append(t[tuple(idx)].reshape(d, d))
    r = [np.trace(blk).real for blk in blocks]
    probs = (eta * r[0] + (1 - eta) * r[1], eta * r[1] + (1 - eta) * r[0])
    total = probs[0] + probs[1]
    probs = (probs[0] / total, probs[1] / total)
    posts = []
    for k in (0, 1):
        if n == 1 or probs[k] <= 1e-12:
            posts.append(None)
            continue
        sigma = eta * blocks[k] + (1 - eta) * blocks[1 - k]
        posts.append(hygiene(sigma))
    return MeasurementOutcome(probs, tuple(posts))


def werner(x: float) -> DensityMatrix:
    """``x |Phi+><Phi+| + (1-x) 1/4``; valid for ``-1/3 <= x <= 1``."""
    if not -1.0 / 3.0 - 1e-12 <= x <= 1.0 + 1e-12:
        raise ValueError(f"Werner parameter x={x} outside [-1/3, 1]")
    phi = make_pure(bell_phi()).matrix
    return DensityMatrix(x * phi + (1 - x) * np.eye(4) / 4)


def werner_from_fidelity(f: float) -> DensityMatrix:
    return werner((4.0 * f - 1.0) / 3.0)


@dataclass(frozen=True)
class BellDiagonal:
    """Two-qubit Bell-diagonal state; coefficients ordered Phi+, Psi+, Psi-, Phi-."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if len(c) != 4:
            raise ValueError("a Bell-diagonal state has exactly four coefficients")
        if min(c) < -1e-12:
            raise ValueError(f"negative Bell coefficient in {c}")
        if abs(sum(c) - 1.0) > 1e-10:
            raise ValueError(f"Bell coefficients sum to {sum(c):.12g}, not 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def fidelity(self) -> float:
        return self.coeffs[0]

    @classmethod
    def werner(cls, fidelity: float) -> "BellDiagonal":
        r = (1.0 - fidelity) / 3.0
        return cls((fidelity, r, r, r))

    def to_density(self) -> DensityMatrix:
        m = np.einsum("k,ki,kj->ij", np.asarray(self.coeffs), BELL_VECTORS, BELL_VECTORS.conj())
        return DensityMatrix(m)

    def to_werner(self) -> DensityMatrix:
        """Depolarized (isotropic) state with the same fidelity."""
        return werner_from_fidelity(self.fidelity)


def bell_twirl(rho: DensityMatrix) -> BellDiagonal:
    """Drop the off-diagonal Bell-basis elements of a two-qubit state."""
    if rho.num_qubits != 2:
        raise ValueError("bell_twirl expects a two-qubit state")
    lam = np.einsum("ki,ij,kj->k", BELL_VECTORS.conj(), rho.matrix, BELL_VECTORS).real
    lam = np.clip(lam, 0.0, None)
    return BellDiagonal(tuple(lam / lam.sum()))


@dataclass(frozen=True)
class RawPair:
    state: BellDiagonal
    herald: bool
    attempts_expected: float


def raw_pair(noise: NoiseParams, rng: Optional[np.random.Generator] = None) -> RawPair:
    """One elementary pair from the noisy physical CNOT acting on ``|+>|0>``.

    Without ``rng`` the herald is reported as successful (the state returned
    is the one conditioned on success); with ``rng`` it is sampled.
    """
    plus = StateVector(np.array([1, 1]) / np.sqrt(2))
    rho = tensor(make_pure(plus), make_pure(ket("0")))
    out = noisy_gate(rho, CNOT, [0, 1], noise.q_two)
    herald = True if rng is None else bool(rng.random() < noise.p_herald)
    return RawPair(bell_twirl(out), herald, 1.0 / noise.p_herald)
