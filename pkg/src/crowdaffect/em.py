"""EM estimation of annotator reliability on a single binary vote matrix.

The model: every clip either truly carries the category or not (latent,
prior = the category prevalence), and each annotator has two reliability
parameters per category -- the probability of voting 1 when the label is
truly present (sensitivity) and of voting 0 when it is truly absent
(specificity). The E-step turns annotator votes into a per-clip posterior;
the M-step re-estimates prevalence and both reliability vectors from the
posterior. Likelihood products run in log space so that near-certain
reliabilities (the initializer is 0.999999) cannot underflow on wide
annotator pools.

Missing (annotator, clip) cells are excluded from all products and sums;
on a fully covered matrix this reduces to the dense update rules.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDataWarning, EmptyCorpusError, NumericalFailureError


@dataclass(frozen=True)
class EMConfig:
    """Knobs for the EM loop; defaults follow the reference pipeline."""

    epsilon: float = 0.000001  # relative convergence threshold on the objective
    max_iterations: int = 500
    sensitivity_init: float = 0.999999
    specificity_init: float = 0.999999
    prob_floor: float = 1e-9  # all probabilities clamped into [floor, 1 - floor]

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.prob_floor < self.sensitivity_init < 1.0:
            raise ValueError("need 0 < prob_floor < sensitivity_init < 1")
        if not self.prob_floor < self.specificity_init < 1.0:
            raise ValueError("need prob_floor < specificity_init < 1")


@dataclass(frozen=True)
class EStep:
    posterior: np.ndarray  # (N,) P(clip truly carries the category | votes)
    log_like_pos: np.ndarray  # (N,) log-likelihood of the votes given true presence
    log_like_neg: np.ndarray  # (N,) log-likelihood of the votes given true absence


@dataclass(frozen=True)
class EMState:
    """Snapshot after one EM iteration (reliability vectors post M-step)."""

    sensitivity: np.ndarray  # (M,)
    specificity: np.ndarray  # (M,)
    prevalence: float
    posterior: np.ndarray  # (N,)
    log_like_pos: np.ndarray
    log_like_neg: np.ndarray
    objective: float
    iteration: int


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    objective: float
    log_likelihood: float  # observed-data log-likelihood (non-decreasing)


@dataclass(frozen=True)
class EMResult:
    state: EMState
    converged: bool
    n_iterations: int
    trace: tuple[TraceEntry, ...]
    states: tuple[EMState, ...] = field(default=())  # filled when keep_states=True


def _clamp(x, floor: float):
    return np.clip(x, floor, 1.0 - floor)


def majority_vote(entries: np.ndarray, coverage: np.ndarray) -> np.ndarray:
    """Initial per-clip labels: 1 iff a strict majority of present annotators voted 1.

    Ties resolve to 0. Clips with no present annotator get 0 and a warning.
    """
    present = coverage.sum(axis=0)
    ones = (entries * coverage).sum(axis=0)
    empty = present == 0
    if empty.any():
        warnings.warn(
            f"{int(empty.sum())} clip(s) have no annotations; majority vote set to 0",
            DegenerateDataWarning,
            stacklevel=2,
        )
    return (ones > present / 2.0).astype(np.float64)


def initial_prevalence(votes: np.ndarray, prob_floor: float = 1e-9) -> float:
    """Mean of the initial labels, clamped away from 0 and 1."""
    if votes.size == 0:
        raise EmptyCorpusError("cannot initialize prevalence from an empty corpus")
    return float(_clamp(np.mean(votes), prob_floor))


def e_step(
    entries: np.ndarray,
    coverage: np.ndarray,
    sensitivity: np.ndarray,
    specificity: np.ndarray,
    prevalence: float,
) -> EStep:
    """Posterior per clip that the category is truly present, given all votes.

    A clip with no present annotators has empty likelihood products (both 1),
    so its posterior equals the prevalence.
    """
    cov = coverage.astype(np.float64)
    h = entries
    log_like_pos = (
        cov * (h * np.log(sensitivity)[:, None] + (1.0 - h) * np.log1p(-sensitivity)[:, None])
    ).sum(axis=0)
    log_like_neg = (
        cov * ((1.0 - h) * np.log(specificity)[:, None] + h * np.log1p(-specificity)[:, None])
    ).sum(axis=0)

    # posterior = sigmoid(log odds), branch-stable on both tails
    t = (np.log(prevalence) + log_like_pos) - (np.log1p(-prevalence) + log_like_neg)
    posterior = np.where(t >= 0, 1.0 / (1.0 + np.exp(-t)), np.exp(t) / (1.0 + np.exp(t)))

    bad = ~(np.isfinite(posterior) & np.isfinite(log_like_pos) & np.isfinite(log_like_neg))
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise NumericalFailureError(
            f"non-finite posterior/likelihood at clip index {j}", clip_index=j
        )
    return EStep(posterior, log_like_pos, log_like_neg)


def m_step(
    entries: np.ndarray,
    coverage: np.ndarray,
    posterior: np.ndarray,
    prev_prevalence: float,
    prev_sensitivity: np.ndarray,
    prev_specificity: np.ndarray,
    prob_floor: float = 1e-9,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Maximum-likelihood update of (prevalence, sensitivity, specificity).

    Per-annotator sums run over covered clips only. An exactly-zero
    denominator keeps that annotator's previous parameter (the MLE is
    undefined there) and warns. Everything is clamped into
    [prob_floor, 1 - prob_floor] so later logs stay finite.
    """
    cov = coverage.astype(np.float64)
    phi = posterior
    prevalence = float(_clamp(np.mean(phi), prob_floor))

    pos_den = cov @ phi
    neg_den = cov @ (1.0 - phi)
    pos_num = (cov * entries) @ phi
    neg_num = (cov * (1.0 - entries)) @ (1.0 - phi)

    zero_pos = pos_den == 0.0
    zero_neg = neg_den == 0.0
    if zero_pos.any() or zero_neg.any():
        warnings.warn(
            "zero posterior mass for some annotators; keeping their previous "
            "reliability values",
            DegenerateDataWarning,
            stacklevel=2,
        )
    sensitivity = np.where(zero_pos, prev_sensitivity, pos_num / np.where(zero_pos, 1.0, pos_den))
    specificity = np.where(zero_neg, prev_specificity, neg_num / np.where(zero_neg, 1.0, neg_den))
    return prevalence, _clamp(sensitivity, prob_floor), _clamp(specificity, prob_floor)


def em_objective(
    posterior: np.ndarray,
    log_like_pos: np.ndarray,
    log_like_neg: np.ndarray,
    prevalence: float,
) -> float:
    """Expected complete-data log-likelihood used as the convergence statistic.

    Uses the 0 * log(0) = 0 convention on both posterior tails.
    """
    phi = posterior
    pos_term = np.log(prevalence) + log_like_pos
    neg_term = np.log1p(-prevalence) + log_like_neg
    total = np.where(phi > 0.0, phi * pos_term, 0.0) + np.where(
        phi < 1.0, (1.0 - phi) * neg_term, 0.0
    )
    return float(total.sum())


def observed_log_likelihood(
    log_like_pos: np.ndarray, log_like_neg: np.ndarray, prevalence: float
) -> float:
    """Marginal log-likelihood of the votes; EM never decreases this."""
    return float(
        np.logaddexp(
            np.log(prevalence) + log_like_pos, np.log1p(-prevalence) + log_like_neg
        ).sum()
    )


def has_converged(q_prev: float, q_curr: float, epsilon: float) -> bool:
    """Relative-change stopping rule; falls back to absolute when q_prev is 0."""
    if q_prev == 0.0:
        return abs(q_curr) < epsilon
    return abs(q_curr - q_prev) / abs(q_prev) < epsilon


def run_em(
    entries: np.ndarray,
    coverage: np.ndarray,
    config: EMConfig = EMConfig(),
    keep_states: bool = False,
) -> EMResult:
    """Full EM loop on one category's vote matrix.

    Initializes per-clip labels by majority vote, prevalence as their mean,
    and both reliability vectors at their configured near-certain values,
    then alternates E- and M-steps until the objective's relative change
    drops below epsilon or the iteration budget runs out (returned with
    converged=False, not an error).
    """
    entries = np.asarray(entries, dtype=np.float64)
    coverage = np.asarray(coverage, dtype=bool)
    if entries.ndim != 2 or entries.shape != coverage.shape:
        raise ValueError("entries and coverage must be matching 2-D arrays")
    n_annotators, n_clips = entries.shape
    if n_clips < 1 or n_annotators < 1:
        raise EmptyCorpusError("EM requires at least one annotator and one clip")

    votes = majority_vote(entries, coverage)
    prevalence = initial_prevalence(votes, config.prob_floor)
    sensitivity = np.full(n_annotators, config.sensitivity_init)
    specificity = np.full(n_annotators, config.specificity_init)

    trace: list[TraceEntry] = []
    states: list[EMState] = []
    q_prev: float | None = None
    converged = False
    iteration = 0
    state: EMState | None = None

    for iteration in range(1, config.max_iterations + 1):
        est = e_step(entries, coverage, sensitivity, specificity, prevalence)
        q = em_objective(est.posterior, est.log_like_pos, est.log_like_neg, prevalence)
        log_lik = observed_log_likelihood(est.log_like_pos, est.log_like_neg, prevalence)
        prevalence, sensitivity, specificity = m_step(
            entries,
            coverage,
            est.posterior,
            prevalence,
            sensitivity,
            specificity,
            config.prob_floor,
        )
        state = EMState(
            sensitivity=sensitivity,
            specificity=specificity,
            prevalence=prevalence,
            posterior=est.posterior,
            log_like_pos=est.log_like_pos,
            log_like_neg=est.log_like_neg,
            objective=q,
            iteration=iteration,
        )
        trace.append(TraceEntry(iteration, q, log_lik))
        if keep_states:
            states.append(state)
        if q_prev is not None and has_converged(q_prev, q, config.epsilon):
            converged = True
            break
        q_prev = q

    assert state is not None
    return EMResult(
        state=state,
        converged=converged,
        n_iterations=iteration,
        trace=tuple(trace),
        states=tuple(states),
    )
