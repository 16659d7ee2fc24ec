"""Annotation records, corpus indexing, and per-category vote matrices.

A corpus holds one record per (annotator, clip) pair. For each emotion
category the records binarize into an annotators x clips zero-one matrix
plus a coverage mask marking which (annotator, clip) pairs were annotated
at all; sparse corpora are handled by excluding missing cells downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .taxonomy import ALL_EMOTIONS, Emotion

SCORE_LEVELS = 11  # self-confidence grid 0.0, 0.1, ..., 1.0
_GRID_TOL = 1e-9


def score_level(score: float) -> int:
    """Map a confidence score to its integer grid level 0..10 (exact)."""
    return int(round(score * 10))


def _valid_score(score: float) -> bool:
    if not 0.0 <= score <= 1.0:
        return False
    return abs(score * 10 - round(score * 10)) <= _GRID_TOL


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's labeling of one clip: categories plus confidence scores."""

    video_id: str
    annotator_id: str
    labels: tuple[Emotion, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValidationError(
                f"record ({self.annotator_id}, {self.video_id}): labels must be nonempty"
            )
        if len(self.labels) != len(set(self.labels)):
            raise ValidationError(
                f"record ({self.annotator_id}, {self.video_id}): duplicate labels"
            )
        if len(self.scores) != len(self.labels):
            raise ValidationError(
                f"record ({self.annotator_id}, {self.video_id}): "
                f"{len(self.scores)} scores for {len(self.labels)} labels"
            )
        for s in self.scores:
            if not _valid_score(s):
                raise ValidationError(
                    f"record ({self.annotator_id}, {self.video_id}): score {s!r} "
                    "is not on the 11-level grid 0.0, 0.1, ..., 1.0"
                )

    def score_for(self, emotion: Emotion) -> float:
        return self.scores[self.labels.index(emotion)]


@dataclass(frozen=True)
class AnnotationCorpus:
    """A validated set of records with deterministic annotator/clip indexing.

    Annotators and clips are ordered by sorted string id, so matrix layouts
    are reproducible across runs regardless of record order.
    """

    records: tuple[AnnotationRecord, ...]
    annotators: tuple[str, ...]
    clips: tuple[str, ...]
    durations: dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_records(
        cls,
        records: list[AnnotationRecord] | tuple[AnnotationRecord, ...],
        durations: dict[str, float] | None = None,
    ) -> "AnnotationCorpus":
        seen: set[tuple[str, str]] = set()
        for rec in records:
            key = (rec.annotator_id, rec.video_id)
            if key in seen:
                raise ValidationError(f"duplicate record for annotator/clip pair {key}")
            seen.add(key)
        annotators = tuple(sorted({r.annotator_id for r in records}))
        clips = tuple(sorted({r.video_id for r in records}))
        durations = dict(durations or {})
        for vid, secs in durations.items():
            if not secs > 0:
                raise ValidationError(f"duration for {vid!r} must be > 0, got {secs!r}")
        return cls(tuple(records), annotators, clips, durations)

    @property
    def n_annotators(self) -> int:
        return len(self.annotators)

    @property
    def n_clips(self) -> int:
        return len(self.clips)

    def annotator_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.annotators)}

    def clip_index(self) -> dict[str, int]:
        return {v: j for j, v in enumerate(self.clips)}

    def records_by_clip(self) -> dict[str, list[AnnotationRecord]]:
        by_clip: dict[str, list[AnnotationRecord]] = {v: [] for v in self.clips}
        for rec in self.records:
            by_clip[rec.video_id].append(rec)
        for recs in by_clip.values():
            recs.sort(key=lambda r: r.annotator_id)
        return by_clip


@dataclass(frozen=True)
class CategoryMatrix:
    """Zero-one vote matrix for one category, with an explicit coverage mask.

    entries[i, j] is 1 iff annotator i's record for clip j lists the category;
    coverage[i, j] marks whether that record exists at all.
    """

    category: Emotion
    entries: np.ndarray  # (M, N) float64 of {0.0, 1.0}
    coverage: np.ndarray  # (M, N) bool
    annotator_index: tuple[str, ...]
    clip_index: tuple[str, ...]


def binarize(corpus: AnnotationCorpus, category: Emotion) -> CategoryMatrix:
    """Build the zero-one matrix for one category from a validated corpus."""
    m, n = corpus.n_annotators, corpus.n_clips
    entries = np.zeros((m, n), dtype=np.float64)
    coverage = np.zeros((m, n), dtype=bool)
    a_idx = corpus.annotator_index()
    c_idx = corpus.clip_index()
    for rec in corpus.records:
        i, j = a_idx[rec.annotator_id], c_idx[rec.video_id]
        coverage[i, j] = True
        if category in rec.labels:
            entries[i, j] = 1.0
    return CategoryMatrix(category, entries, coverage, corpus.annotators, corpus.clips)


def binarize_all(corpus: AnnotationCorpus) -> dict[Emotion, CategoryMatrix]:
    return {cat: binarize(corpus, cat) for cat in ALL_EMOTIONS}
