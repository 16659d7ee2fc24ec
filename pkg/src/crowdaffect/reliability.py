"""Corpus-level reliability estimation: one EM run per emotion category."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import AnnotationCorpus, binarize
from .em import EMConfig, EMResult, run_em
from .errors import EmptyCorpusError, NumericalFailureError
from .taxonomy import ALL_EMOTIONS, Emotion


@dataclass(frozen=True)
class ReliabilityReport:
    """Per-category EM results plus balanced annotator reliabilities.

    Categories whose EM run hit a numerical failure are recorded in
    ``failures`` and carry no result; all other categories still complete.
    """

    annotators: tuple[str, ...]
    clips: tuple[str, ...]
    results: dict[Emotion, EMResult]
    failures: dict[Emotion, str]

    def balanced_reliability(self, annotator_id: str, category: Emotion) -> float:
        result = self.results[category]
        i = self.annotators.index(annotator_id)
        return float(
            (result.state.sensitivity[i] + result.state.specificity[i]) / 2.0
        )

    def balanced_matrix(self) -> np.ndarray:
        """(n_annotators, n_categories) balanced reliabilities, NaN for failures."""
        out = np.full((len(self.annotators), len(ALL_EMOTIONS)), np.nan)
        for k, cat in enumerate(ALL_EMOTIONS):
            if cat in self.results:
                state = self.results[cat].state
                out[:, k] = (state.sensitivity + state.specificity) / 2.0
        return out

    def mean_balanced_reliability(self) -> dict[str, float]:
        """Per annotator, the mean balanced reliability across categories."""
        matrix = self.balanced_matrix()
        means = np.nanmean(matrix, axis=1)
        return {a: float(means[i]) for i, a in enumerate(self.annotators)}

    def converged(self) -> dict[Emotion, bool]:
        return {cat: res.converged for cat, res in self.results.items()}

    def to_json_obj(self) -> dict:
        """JSON-ready mapping keyed by category name.

        Per category: alpha/beta keyed by annotator id, prevalence p, the
        per-clip posterior phi keyed by video id, iteration count,
        convergence flag, and the (objective, log-likelihood) trace.
        """
        obj: dict = {}
        for cat in ALL_EMOTIONS:
            if cat in self.failures:
                obj[cat.display_name] = {"error": self.failures[cat]}
                continue
            res = self.results[cat]
            state = res.state
            obj[cat.display_name] = {
                "alpha": {a: float(state.sensitivity[i]) for i, a in enumerate(self.annotators)},
                "beta": {a: float(state.specificity[i]) for i, a in enumerate(self.annotators)},
                "p": float(state.prevalence),
                "phi": {v: float(state.posterior[j]) for j, v in enumerate(self.clips)},
                "iterations": res.n_iterations,
                "converged": res.converged,
                "trace": [
                    {
                        "iteration": t.iteration,
                        "q": t.objective,
                        "log_likelihood": t.log_likelihood,
                    }
                    for t in res.trace
                ],
            }
        return obj


def reliability_report(
    corpus: AnnotationCorpus, config: EMConfig = EMConfig()
) -> ReliabilityReport:
    """Run the reliability EM independently for each of the 11 categories."""
    if not corpus.records:
        raise EmptyCorpusError("cannot estimate reliability for an empty corpus")
    results: dict[Emotion, EMResult] = {}
    failures: dict[Emotion, str] = {}
    for cat in ALL_EMOTIONS:
        matrix = binarize(corpus, cat)
        try:
            results[cat] = run_em(matrix.entries, matrix.coverage, config)
        except NumericalFailureError as exc:
            failures[cat] = str(exc)
    return ReliabilityReport(
        annotators=corpus.annotators,
        clips=corpus.clips,
        results=results,
        failures=failures,
    )
