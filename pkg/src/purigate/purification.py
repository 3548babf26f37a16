"""Noisy DEJMPS recurrence, entanglement pumping and nested pumping with cost accounting.

Pumping keeps a persistent *target* pair on the control side of the bilateral
CNOTs and measures a freshly supplied *source* pair. A failed step discards the
target and the level restarts from a fresh lower-level pair. Expected costs
follow from first-step analysis over one attempt at a level.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .densmat import CNOT, DensityMatrix, UnitaryGate, tensor
from .noise import BellDiagonal, NoiseParams, bell_twirl, noisy_gate, noisy_measure, raw_pair, single_qubit

MAX_LEVELS = 4

# A-side rotation (1 - iX)/sqrt2, B-side its inverse
ROT_A = UnitaryGate(np.array([[1, -1j], [-1j, 1]]) / np.sqrt(2), "Rx(pi/2)")
ROT_B = UnitaryGate(np.array([[1, 1j], [1j, 1]]) / np.sqrt(2), "Rx(-pi/2)")

# register layout of one recurrence step
A_T, B_T, A_S, B_S = 0, 1, 2, 3


@dataclass(frozen=True)
class PumpConfig:
    nesting_levels: int = 3
    max_steps_per_level: int = 20
    convergence_epsilon: float = 1e-4
    mode: str = "expected_value"
    seed: int = 0
    trials: int = 100_000

    def __post_init__(self):
        if not 0 <= self.nesting_levels <= MAX_LEVELS:
            raise ValueError(f"nesting_levels={self.nesting_levels} outside [0, {MAX_LEVELS}]")
        if self.max_steps_per_level < 1:
            raise ValueError("max_steps_per_level must be >= 1")
        if not self.convergence_epsilon > 0:
            raise ValueError("convergence_epsilon must be > 0")
        if self.mode not in ("expected_value", "monte_carlo"):
            raise ValueError(f"mode={self.mode!r}; expected 'expected_value' or 'monte_carlo'")
        if self.trials < 2:
            raise ValueError("trials must be >= 2")


@dataclass(frozen=True)
class CostReport:
    """Expected resources to deliver one pair at the top level.

    ``expected_steps_by_level[k]`` counts pump steps executed at level k+1 and
    ``success_prob_by_level[k]`` is the probability that one attempt at level
    k+1 completes all its steps. ``step_success_probs[k]`` lists the
    individual step probabilities at that level. In Monte Carlo mode
    ``raw_pairs_stderr`` is the standard error of the raw-pair mean.
    """

    expected_raw_pairs: float
    expected_gate_attempts: float
    expected_steps_by_level: tuple = ()
    success_prob_by_level: tuple = ()
    step_success_probs: tuple = ()
    raw_pairs_stderr: Optional[float] = None


@dataclass(frozen=True)
class PumpResult:
    final_pair: BellDiagonal
    cost: CostReport
    fidelity_trace: tuple = ()  # (level, step, fidelity)
    level_pairs: tuple = ()  # converged pair per level, index 0 = raw


def recurrence_step(target: BellDiagonal, source: BellDiagonal, noise: NoiseParams) -> Tuple[float, BellDiagonal]:
    """One noisy DEJMPS step on the 16x16 density matrix of both pairs.

    Register order is (A_target, B_target, A_source, B_source). Returns the
    probability of coincident source outcomes and the twirled kept pair.
    """
    rho = tensor(target.to_density(), source.to_density())
    for q in (A_T, A_S):
        rho = single_qubit(rho, ROT_A, q, noise)
    for q in (B_T, B_S):
        rho = single_qubit(rho, ROT_B, q, noise)
    rho = noisy_gate(rho, CNOT, [A_T, A_S], noise.q_local)
    rho = noisy_gate(rho, CNOT, [B_T, B_S], noise.q_local)
    first = noisy_measure(rho, A_S, "Z", noise.eta)
    kept = np.zeros((4, 4), dtype=np.complex128)
    for k in (0, 1):
        if first.post_states[k] is None:
            continue
        second = noisy_measure(first.post_states[k], 2, "Z", noise.eta)
        w = second.weighted(k)
        if w is not None:
            kept += first.probabilities[k] * w
    p_success = float(np.trace(kept).real)
    out = bell_twirl(DensityMatrix(0.5 * (kept + kept.conj().T) / p_success))
    return p_success, out


@dataclass
class _Level:
    pair: BellDiagonal
    step_probs: List[float] = field(default_factory=list)
    trace: List[tuple] = field(default_factory=list)


def _pump(initial, source, noise, config, level) -> _Level:
    cur = initial
    res = _Level(cur, trace=[(level, 0, cur.fidelity)])
    for step in range(1, config.max_steps_per_level + 1):
        p, nxt = recurrence_step(cur, source, noise)
        gain = nxt.fidelity - cur.fidelity
        if gain <= 0.0:
            break
        cur = nxt
        res.step_probs.append(p)
        res.trace.append((level, step, cur.fidelity))
        if gain < config.convergence_epsilon:
            break
    res.pair = cur
    return res


def _consumption_weights(step_probs) -> Tuple[np.ndarray, float]:
    """Probability that each supplied pair (target, source 1..m) is consumed in one attempt."""
    probs = np.asarray(step_probs, dtype=float)
    reach = np.concatenate(([1.0], np.cumprod(probs)))  # reach[i]: steps 1..i all succeeded
    return np.concatenate(([1.0], reach[:-1])), float(reach[-1])


def attempt_cost_factors(step_probs) -> Tuple[float, float, float]:
    """(pairs consumed per success, steps run per success, success prob) of one level.

    Source i is consumed only if steps 1..i-1 succeeded, and an attempt
    succeeds with probability ``prod_j p_j``; with full restart the number of
    attempts is geometric.
    """
    weights, success = _consumption_weights(step_probs)
    pairs = weights.sum() / success
    steps = weights[1:].sum() / success
    return float(pairs), float(steps), success


def expected_pump_cost(pair_costs, step_probs) -> float:
    """Expected cost with distinct per-pair costs ``c_0`` (target) and ``c_1..c_m`` (sources)."""
    weights, success = _consumption_weights(step_probs)
    c = np.asarray(pair_costs, dtype=float)
    if c.shape != weights.shape:
        raise ValueError("need one cost per step plus the initial target")
    return float(np.dot(c, weights) / success)


def pump_level(initial: BellDiagonal, source: BellDiagonal, noise: NoiseParams, config: PumpConfig,
               level: int = 1, pair_cost: float = 1.0) -> PumpResult:
    """Pump ``initial`` with repeated copies of ``source`` until the fidelity gain
    per step drops below ``config.convergence_epsilon``.

    A step that would not raise the fidelity is not taken. ``pair_cost`` is the
    raw-pair cost of each supplied pair (target and sources alike).
    """
    lv = _pump(initial, source, noise, config, level)
    pairs, steps, success = attempt_cost_factors(lv.step_probs)
    raw = pair_cost * pairs
    cost = CostReport(
        expected_raw_pairs=raw,
        expected_gate_attempts=raw / noise.p_herald,
        expected_steps_by_level=(steps,),
        success_prob_by_level=(success,),
        step_success_probs=(tuple(lv.step_probs),),
    )
    return PumpResult(lv.pair, cost, tuple(lv.trace), (initial, lv.pair))


def nested_pump(noise: NoiseParams, config: PumpConfig) -> PumpResult:
    """Raw pair at level 0; level k pumps a converged level-(k-1) pair with
    further converged level-(k-1) pairs."""
    base = raw_pair(noise).state
    pairs = [base]
    trace = [(0, 0, base.fidelity)]
    step_probs = []
    for k in range(1, config.nesting_levels + 1):
        lv = _pump(pairs[-1], pairs[-1], noise, config, k)
        pairs.append(lv.pair)
        trace.extend(lv.trace[1:])
        step_probs.append(tuple(lv.step_probs))

    factors = [attempt_cost_factors(p) for p in step_probs]
    consumed = [f[0] for f in factors]  # lower-level pairs per level-k pair
    raw = float(np.prod(consumed)) if consumed else 1.0
    steps_by_level = []
    for k, (_, steps, _) in enumerate(factors):
        above = float(np.prod(consumed[k + 1:])) if k + 1 < len(consumed) else 1.0
        steps_by_level.append(steps * above)
    stderr = None
    if config.mode == "monte_carlo" and step_probs:
        samples = sample_raw_pair_costs(step_probs, config.trials, config.seed)
        raw = float(samples.mean())
        stderr = float(samples.std(ddof=1) / np.sqrt(samples.size))
    cost = CostReport(
        expected_raw_pairs=raw,
        expected_gate_attempts=raw / noise.p_herald,
        expected_steps_by_level=tuple(steps_by_level),
        success_prob_by_level=tuple(f[2] for f in factors),
        step_success_probs=tuple(step_probs),
        raw_pairs_stderr=stderr,
    )
    return PumpResult(pairs[-1], cost, tuple(trace), tuple(pairs))


def _sample_level(rng: np.random.Generator, step_probs, level: int, count: int) -> np.ndarray:
    """Raw-pair cost of ``count`` independent pairs at ``level`` under full restart."""
    if level == 0:
        return np.ones(count, dtype=np.int64)
    probs = np.asarray(step_probs[level - 1], dtype=float)
    m = probs.size
    if m == 0:
        consumed = np.ones(count, dtype=np.int64)
    else:
        prefix = np.concatenate(([1.0], np.cumprod(probs)))
        success = prefix[-1]
        failures = rng.geometric(success, size=count) - 1
        consumed = np.full(count, m + 1, dtype=np.int64)
        total = int(failures.sum())
        if total:
            # failing at step j (1-based) after consuming the target and j sources
            fail_at = prefix[:m] * (1.0 - probs)
            where = rng.choice(np.arange(1, m + 1), size=total, p=fail_at / fail_at.sum())
            owner = np.repeat(np.arange(count), failures)
            consumed += np.bincount(owner, weights=where + 1, minlength=count).astype(np.int64)
    if level == 1:
        return consumed
    lower = _sample_level(rng, step_probs, level - 1, int(consumed.sum()))
    bounds = np.concatenate(([0], np.cumsum(consumed)[:-1]))
    return np.add.reduceat(lower, bounds)


def sample_raw_pair_costs(step_probs, trials: int, seed: int) -> np.ndarray:
    """Monte Carlo raw-pair consumption per top-level pair.

    Trial ``i`` draws from its own generator seeded with ``seed + i`` so the
    result does not depend on evaluation order.
    """
    top = len(step_probs)
    out = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        rng = np.random.default_rng(seed + i)
        out[i] = _sample_level(rng, step_probs, top, 1)[0]
    return out


def recurrence_fixed_point(noise: NoiseParams, start: BellDiagonal, max_iter: int = 2000,
                           tol: float = 1e-12, bisect_tol: float = 1e-7) -> Tuple[float, float]:
    """Reachable fidelity of symmetric recurrence and the minimal fidelity that still converges to it.

    ``F_min`` is located by bisection along the depolarizing line through
    ``start`` (mixtures of ``start`` with the maximally mixed state).
    """
    f_max = _iterate_symmetric(start, noise, max_iter, tol)[1]
    lam = np.asarray(start.coeffs)

    def reaches(f):
        t = (4.0 * f - 1.0) / (4.0 * lam[0] - 1.0)
        st = BellDiagonal(tuple(t * lam + (1.0 - t) / 4.0))
        ok, _ = _iterate_symmetric(st, noise, max_iter, tol, target=f_max)
        return ok

    lo, hi = 0.25, start.fidelity
    if not reaches(hi):
        return f_max, float("nan")
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if reaches(mid):
            hi = mid
        else:
            lo = mid
    return f_max, 0.5 * (lo + hi)


def _iterate_symmetric(state, noise, max_iter, tol, target=None):
    cur = state
    prev_f = cur.fidelity
    for _ in range(max_iter):
        _, cur = recurrence_step(cur, cur, noise)
        f = cur.fidelity
        if target is not None:
            if f >= target - 1e-4:
                return True, f
            if f <= 0.5:
                return False, f
        elif abs(f - prev_f) < tol:
            return True, f
        prev_f = f
    return target is None, cur.fidelity
