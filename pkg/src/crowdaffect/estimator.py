"""Scikit-learn style wrapper around the reliability EM.

`ReliabilityEM` works on a plain (n_annotators, n_clips) vote matrix so the
model composes with the wider ecosystem: NaN marks a missing annotation,
parameters round-trip through `get_params`/`set_params`, and fitted
attributes carry the trailing underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .em import EMConfig, run_em


def check_vote_matrix(X) -> tuple[np.ndarray, np.ndarray]:
    """Validate a vote matrix and split it into (entries, coverage).

    Accepts any 2-D array-like of {0, 1} with NaN for missing cells.
    Returns dense float entries (missing cells set to 0) and a boolean
    coverage mask.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D (n_annotators, n_clips) matrix, got ndim={X.ndim}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"matrix must be non-empty, got shape {X.shape}")
    coverage = ~np.isnan(X)
    observed = X[coverage]
    if not np.isin(observed, (0.0, 1.0)).all():
        bad = observed[~np.isin(observed, (0.0, 1.0))][0]
        raise ValueError(f"votes must be 0, 1, or NaN (missing); found {bad!r}")
    entries = np.where(coverage, X, 0.0)
    return entries, coverage


class ReliabilityEM(BaseEstimator):
    """Annotator sensitivity/specificity estimation for one binary label task.

    Parameters
    ----------
    epsilon : float
        Relative convergence threshold on the EM objective.
    max_iter : int
        Iteration budget; non-convergence sets ``converged_`` to False.
    sensitivity_init, specificity_init : float
        Starting reliability for every annotator.
    prob_floor : float
        All probabilities are clamped into [prob_floor, 1 - prob_floor].

    Attributes
    ----------
    sensitivity_ : ndarray of shape (n_annotators,)
        P(annotator votes 1 | clip truly carries the label).
    specificity_ : ndarray of shape (n_annotators,)
        P(annotator votes 0 | clip truly does not carry the label).
    prevalence_ : float
        Estimated fraction of clips carrying the label.
    posterior_ : ndarray of shape (n_clips,)
        P(clip truly carries the label | all votes).
    n_iter_ : int
    converged_ : bool
    trace_ : tuple of (iteration, objective, log_likelihood) records
    """

    def __init__(
        self,
        epsilon: float = 0.000001,
        max_iter: int = 500,
        sensitivity_init: float = 0.999999,
        specificity_init: float = 0.999999,
        prob_floor: float = 1e-9,
    ):
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.sensitivity_init = sensitivity_init
        self.specificity_init = specificity_init
        self.prob_floor = prob_floor

    def _config(self) -> EMConfig:
        return EMConfig(
            epsilon=self.epsilon,
            max_iterations=self.max_iter,
            sensitivity_init=self.sensitivity_init,
            specificity_init=self.specificity_init,
            prob_floor=self.prob_floor,
        )

    def fit(self, X, y=None) -> "ReliabilityEM":
        """Run EM on a (n_annotators, n_clips) vote matrix; NaN = missing."""
        entries, coverage = check_vote_matrix(X)
        result = run_em(entries, coverage, self._config())
        self.n_annotators_ = entries.shape[0]
        self.n_clips_ = entries.shape[1]
        self.sensitivity_ = result.state.sensitivity
        self.specificity_ = result.state.specificity
        self.prevalence_ = result.state.prevalence
        self.posterior_ = result.state.posterior
        self.objective_ = result.state.objective
        self.n_iter_ = result.n_iterations
        self.converged_ = result.converged
        self.trace_ = result.trace
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        """Fit and return the consensus label per clip (posterior >= 0.5)."""
        self.fit(X)
        return (self.posterior_ >= 0.5).astype(np.int64)

    def balanced_reliability(self) -> np.ndarray:
        """Per-annotator (sensitivity + specificity) / 2 from the fitted model."""
        if not hasattr(self, "sensitivity_"):
            raise NotFittedError("ReliabilityEM must be fitted first")
        return (self.sensitivity_ + self.specificity_) / 2.0
