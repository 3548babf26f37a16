"""Parameter sweeps over physical error rates, threshold search and CSV output.

Config files are flat ``key = value`` text with ``#`` comments. CSV files start
with ``# key=value`` lines recording every effective parameter, followed by a
column-name row and the data rows.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .densmat import CNOT, InvariantError
from .estimator import LogicalGateModel
from .noise import error_rate_from_q
from .purification import MAX_LEVELS, PumpConfig
from .teleport import choi_of_noisy_gate, is_entangling

log = logging.getLogger(__name__)

COLUMNS = (
    "p_single",
    "p_two",
    "levels",
    "pump_steps_total",
    "pair_fidelity",
    "logical_error_rate",
    "expected_raw_pairs",
    "expected_gate_attempts",
)
INT_COLUMNS = {"levels", "pump_steps_total"}

P_MAX = 0.75
MODE_ALIASES = {"expected": "expected_value", "expected_value": "expected_value",
                "mc": "monte_carlo", "monte_carlo": "monte_carlo"}

DEFAULTS = {
    "p_single": "logspace:1e-6,1e-1,25",
    "p_two": "0.15,0.01",
    "levels": "0,1,2,3",
    "mode": "expected_value",
    "trials": "10000",
    "seed": "0",
    "epsilon": "1e-4",
    "max_steps": "20",
    "eta": "q_local",
    "p_herald": "1",
    "out": "sweep.csv",
}


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the key and the constraint."""


def fmt(x) -> str:
    """12 significant digits, plain ``.`` decimal separator."""
    return format(float(x), ".12g")


@dataclass(frozen=True)
class SweepSpec:
    p_single_grid: tuple
    p_two_values: tuple
    levels: tuple
    pump: PumpConfig
    output_path: str
    eta: Optional[float] = None  # None: tied to the local reliability
    p_herald: float = 1.0
    raw: Dict[str, str] = field(default_factory=dict, compare=False)

    def header(self) -> List[str]:
        return [f"{k}={self.raw[k]}" for k in DEFAULTS]


def parse_grid(key: str, text: str) -> tuple:
    text = text.strip()
    try:
        if text.startswith("logspace:"):
            lo, hi, n = text[len("logspace:"):].split(",")
            lo, hi, n = float(lo), float(hi), int(n)
            if lo <= 0 or hi <= 0 or n < 1:
                raise ConfigError(f"{key}: logspace needs positive bounds and n >= 1, got {text!r}")
            values = np.logspace(math.log10(lo), math.log10(hi), n)
        else:
            values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"{key}: cannot parse {text!r} as a list or logspace:lo,hi,n") from None
    if len(values) == 0:
        raise ConfigError(f"{key}: grid must not be empty")
    return tuple(float(v) for v in values)


def read_config_file(path) -> Dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _as_int(key, text, lo=None):
    try:
        v = int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None
    if lo is not None and v < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {v}")
    return v


def _as_float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def parse_config(path=None, overrides: Optional[Dict[str, str]] = None) -> SweepSpec:
    """Merge defaults, an optional config file and flag overrides (highest precedence)."""
    raw = dict(DEFAULTS)
    if path is not None:
        try:
            raw.update(read_config_file(path))
        except OSError as e:
            raise ConfigError(f"config: cannot read {path}: {e.strerror}") from None
    raw.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key (known: {', '.join(DEFAULTS)})")

    p_single = parse_grid("p_single", raw["p_single"])
    p_two = parse_grid("p_two", raw["p_two"])
    for key, grid in (("p_single", p_single), ("p_two", p_two)):
        bad = [v for v in grid if not 0.0 < v <= P_MAX]
        if bad:
            raise ConfigError(f"{key}: value {bad[0]:g} outside (0, 3/4]")
    levels = tuple(_as_int("levels", v) for v in raw["levels"].split(",") if v.strip())
    if not levels:
        raise ConfigError("levels: must not be empty")
    if any(not 0 <= v <= MAX_LEVELS for v in levels):
        raise ConfigError(f"levels: each entry must lie in [0, {MAX_LEVELS}], got {raw['levels']!r}")
    mode = MODE_ALIASES.get(raw["mode"].strip())
    if mode is None:
        raise ConfigError(f"mode: expected one of expected|mc, got {raw['mode']!r}")
    raw["mode"] = mode
    trials = _as_int("trials", raw["trials"], lo=2)
    seed = _as_int("seed", raw["seed"])
    epsilon = _as_float("epsilon", raw["epsilon"])
    if not epsilon > 0:
        raise ConfigError(f"epsilon: must be > 0, got {epsilon:g}")
    max_steps = _as_int("max_steps", raw["max_steps"], lo=1)
    eta = None
    if raw["eta"].strip() != "q_local":
        eta = _as_float("eta", raw["eta"])
        if not 0.0 <= eta <= 1.0:
            raise ConfigError(f"eta: must lie in [0, 1] or be 'q_local', got {eta:g}")
    p_herald = _as_float("p_herald", raw["p_herald"])
    if not 0.0 < p_herald <= 1.0:
        raise ConfigError(f"p_herald: must lie in (0, 1], got {p_herald:g}")

    pump = PumpConfig(nesting_levels=max(levels), max_steps_per_level=max_steps,
                      convergence_epsilon=epsilon, mode=mode, seed=seed, trials=trials)
    return SweepSpec(p_single, p_two, levels, pump, raw["out"], eta, p_herald, raw)


def compute_rows(spec: SweepSpec) -> List[dict]:
    rows = []
    model = LogicalGateModel(
        max_steps_per_level=spec.pump.max_steps_per_level,
        convergence_epsilon=spec.pump.convergence_epsilon,
        mode=spec.pump.mode, trials=spec.pump.trials, seed=spec.pump.seed,
        eta=spec.eta, p_herald=spec.p_herald,
    )
    for pt in sorted(spec.p_two_values):
        for lv in sorted(spec.levels):
            model.set_params(nesting_levels=lv).fit()
            for ps in sorted(spec.p_single_grid):
                tag = f"[p_single={fmt(ps)} p_two={fmt(pt)} levels={lv}]"
                try:
                    r = model.report(ps, pt)
                except InvariantError as e:
                    raise InvariantError(f"{tag} {e}") from e
                except ValueError as e:
                    raise ValueError(f"{tag} {e}") from e
                rows.append({
                    "p_single": ps,
                    "p_two": pt,
                    "levels": lv,
                    "pump_steps_total": r.pump_steps_total,
                    "pair_fidelity": r.pair_fidelity,
                    "logical_error_rate": r.metrics.error_rate,
                    "expected_raw_pairs": r.cost.expected_raw_pairs,
                    "expected_gate_attempts": r.cost.expected_gate_attempts,
                })
            log.info("p_two=%s levels=%d done", fmt(pt), lv)
    return rows


def render_csv(spec: SweepSpec, rows: List[dict]) -> str:
    lines = ["# purigate sweep"] + [f"# {h}" for h in spec.header()]
    lines.append(",".join(COLUMNS))
    for row in rows:
        lines.append(",".join(str(row[c]) if c in INT_COLUMNS else fmt(row[c]) for c in COLUMNS))
    return "\n".join(lines) + "\n"


def run_sweep(spec: SweepSpec) -> List[dict]:
    """Evaluate every (p_single, p_two, levels) point and write the CSV to ``spec.output_path``."""
    rows = compute_rows(spec)
    Path(spec.output_path).write_text(render_csv(spec, rows))
    return rows


def read_csv(path):
    """Return ``(params, rows)`` from a sweep CSV."""
    params, rows, cols = {}, [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                params[k.strip()] = v.strip()
        elif cols is None:
            cols = line.split(",")
        elif line:
            vals = line.split(",")
            rows.append({c: int(v) if c in INT_COLUMNS else float(v) for c, v in zip(cols, vals)})
    return params, rows


def threshold_scan(kind: str = "entangling", tolerance: float = 1e-6) -> float:
    """Bisect the gate reliability q' at which the noisy CNOT starts to entangle.

    At least one bisection step is always taken, so a tolerance >= 1 yields a
    single evaluation at q' = 0.5 and returns the midpoint of the surviving
    half interval.
    """
    if kind != "entangling":
        raise ValueError(f"unknown threshold kind {kind!r}")
    if not tolerance > 0:
        raise ValueError("tolerance must be > 0")
    lo, hi = 0.0, 1.0  # not entangling at lo, entangling at hi
    while True:
        mid = 0.5 * (lo + hi)
        if is_entangling(choi_of_noisy_gate(CNOT, mid))[0]:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tolerance:
            return 0.5 * (lo + hi)


def threshold_error_rate(q: float) -> float:
    return error_rate_from_q(q)
