"""scikit-learn compatible wrapper mapping physical error rates to logical gate performance."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .noise import NoiseParams
from .purification import PumpConfig
from .teleport import LogicalGateReport, logical_gate_metrics

FEATURE_NAMES = (
    "pair_fidelity",
    "logical_error_rate",
    "expected_raw_pairs",
    "expected_gate_attempts",
    "pump_steps_total",
)


class LogicalGateModel(TransformerMixin, BaseEstimator):
    """Achievable error of a teleported CNOT fed by nested entanglement pumping.

    Input rows are ``(p_single, p_two)``: the error rate of single-particle
    two-subsystem operations and of the physical two-particle gate. The model
    has no trainable state; ``fit`` only validates the hyper-parameters so the
    estimator can sit inside pipelines and grid searches.

    Parameters
    ----------
    nesting_levels : int, default=3
        Number of pumping levels stacked on the raw pairs (0 disables purification).
    max_steps_per_level : int, default=20
    convergence_epsilon : float, default=1e-4
        Pumping at a level stops once a step raises the fidelity by less than this.
    mode : {"expected_value", "monte_carlo"}
        How raw-pair costs are obtained. Fidelities are identical in both modes.
    trials, seed : int
        Monte Carlo sample count and master seed.
    eta : float or None
        Measurement reliability; None ties it to the local gate reliability.
    p_herald : float, default=1.0
        Success probability of the heralded physical gate.
    noisy_single_qubit : bool, default=False
        Depolarize single-qubit rotations and Pauli corrections as well.
    """

    def __init__(self, nesting_levels=3, max_steps_per_level=20, convergence_epsilon=1e-4,
                 mode="expected_value", trials=100_000, seed=0, eta=None, p_herald=1.0,
                 noisy_single_qubit=False):
        self.nesting_levels = nesting_levels
        self.max_steps_per_level = max_steps_per_level
        self.convergence_epsilon = convergence_epsilon
        self.mode = mode
        self.trials = trials
        self.seed = seed
        self.eta = eta
        self.p_herald = p_herald
        self.noisy_single_qubit = noisy_single_qubit

    def _make_config(self):
        return PumpConfig(
            nesting_levels=self.nesting_levels,
            max_steps_per_level=self.max_steps_per_level,
            convergence_epsilon=self.convergence_epsilon,
            mode=self.mode,
            seed=self.seed,
            trials=self.trials,
        )

    def _validate_X(self, X):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (p_single, p_two), got {X.shape[1]}")
        if np.any(X <= 0.0) or np.any(X > 0.75):
            raise ValueError("error rates must lie in (0, 3/4]")
        return X

    def fit(self, X=None, y=None):
        self.config_ = self._make_config()
        if self.eta is not None and not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta={self.eta} outside [0, 1]")
        if not 0.0 < self.p_herald <= 1.0:
            raise ValueError(f"p_herald={self.p_herald} outside (0, 1]")
        if X is not None:
            self._validate_X(X)
        self.n_features_in_ = 2
        return self

    def noise_for(self, p_single, p_two) -> NoiseParams:
        return NoiseParams.from_error_rates(
            p_single, p_two, eta=self.eta, p_herald=self.p_herald,
            noisy_single_qubit=self.noisy_single_qubit,
        )

    def report(self, p_single, p_two) -> LogicalGateReport:
        check_is_fitted(self, "config_")
        return logical_gate_metrics(self.noise_for(p_single, p_two), self.config_)

    def transform(self, X):
        """One row of FEATURE_NAMES per input row."""
        check_is_fitted(self, "config_")
        X = self._validate_X(X)
        out = np.empty((X.shape[0], len(FEATURE_NAMES)))
        for i, (ps, pt) in enumerate(X):
            r = self.report(ps, pt)
            out[i] = (
                r.pair_fidelity,
                r.metrics.error_rate,
                r.cost.expected_raw_pairs,
                r.cost.expected_gate_attempts,
                r.pump_steps_total,
            )
        return out

    def predict(self, X):
        """Logical two-qubit gate error rate for each ``(p_single, p_two)`` row."""
        return self.transform(X)[:, 1]

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)
