"""Cronbach's alpha over retained labels, per emotion category.

Annotators act as test items and clips as subjects; the scores are the
binary indicators "this annotator's retained record lists the category".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import AnnotationCorpus
from .errors import UndefinedAlphaError
from .taxonomy import ALL_EMOTIONS, Emotion


def cronbach_alpha(item_scores) -> float:
    """Classical internal-consistency coefficient for an items x subjects matrix.

    alpha = (m / (m - 1)) * (1 - sum(item variances) / variance(subject totals))
    with the sample (n - 1) variance convention. Raises when fewer than two
    items or subjects are given, or when the subject totals are constant.
    """
    scores = np.asarray(item_scores, dtype=np.float64)
    if scores.ndim != 2:
        raise UndefinedAlphaError(f"expected a 2-D matrix, got ndim={scores.ndim}")
    m, n = scores.shape
    if m < 2:
        raise UndefinedAlphaError(f"need at least 2 items, got {m}")
    if n < 2:
        raise UndefinedAlphaError(f"need at least 2 subjects, got {n}")
    item_vars = scores.var(axis=1, ddof=1)
    total_var = scores.sum(axis=0).var(ddof=1)
    if total_var == 0.0:
        raise UndefinedAlphaError("zero variance of subject totals")
    return float((m / (m - 1.0)) * (1.0 - item_vars.sum() / total_var))


@dataclass(frozen=True)
class ConsistencyReport:
    alphas: dict[Emotion, float | None]  # None when undefined
    items_used: dict[Emotion, int]
    subjects_used: dict[Emotion, int]
    undefined_reasons: dict[Emotion, str]

    @property
    def average(self) -> float | None:
        defined = [a for a in self.alphas.values() if a is not None]
        if not defined:
            return None
        return float(np.mean(defined))

    def rows(self) -> list[tuple[str, float | None]]:
        out: list[tuple[str, float | None]] = [
            (cat.display_name, self.alphas[cat]) for cat in ALL_EMOTIONS
        ]
        out.append(("Average", self.average))
        return out

    def to_json_obj(self) -> dict:
        return {
            "alpha": {c.display_name: self.alphas[c] for c in ALL_EMOTIONS},
            "average": self.average,
            "items_used": {c.display_name: self.items_used[c] for c in ALL_EMOTIONS},
            "subjects_used": {c.display_name: self.subjects_used[c] for c in ALL_EMOTIONS},
            "undefined": {
                c.display_name: reason for c, reason in sorted(
                    self.undefined_reasons.items(), key=lambda kv: kv[0].ordinal
                )
            },
        }

    def to_markdown(self) -> str:
        lines = ["| Emotions | Alpha |", "| --- | --- |"]
        for name, alpha in self.rows():
            val = "undefined" if alpha is None else f"{alpha:.3f}"
            lines.append(f"| {name} | {val} |")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["category,alpha"]
        for name, alpha in self.rows():
            val = "" if alpha is None else repr(alpha)
            lines.append(f"{name},{val}")
        return "\n".join(lines) + "\n"


def consistency_report(retained: AnnotationCorpus) -> ConsistencyReport:
    """Per-category alpha over the retained binary indicator matrices.

    For a category, items are the annotators with at least one retained
    label of that category and subjects are all clips with any retained
    record; a cell is 1 iff that annotator's retained record on the clip
    lists the category. Categories failing alpha's preconditions are
    reported as undefined rather than raising.
    """
    alphas: dict[Emotion, float | None] = {}
    items_used: dict[Emotion, int] = {}
    subjects_used: dict[Emotion, int] = {}
    undefined: dict[Emotion, str] = {}

    clip_idx = retained.clip_index()
    a_idx = retained.annotator_index()
    n_clips = retained.n_clips
    indicator = {
        cat: np.zeros((retained.n_annotators, n_clips)) for cat in ALL_EMOTIONS
    }
    for rec in retained.records:
        for cat in rec.labels:
            indicator[cat][a_idx[rec.annotator_id], clip_idx[rec.video_id]] = 1.0

    for cat in ALL_EMOTIONS:
        rows = indicator[cat]
        item_mask = rows.sum(axis=1) > 0
        matrix = rows[item_mask]
        items_used[cat] = int(item_mask.sum())
        subjects_used[cat] = n_clips
        try:
            alphas[cat] = cronbach_alpha(matrix)
        except UndefinedAlphaError as exc:
            alphas[cat] = None
            undefined[cat] = str(exc)
    return ConsistencyReport(alphas, items_used, subjects_used, undefined)
