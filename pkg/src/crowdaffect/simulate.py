"""Forward sampler for synthetic annotation corpora with known reliabilities.

Each clip independently carries each category with the configured
prevalence; each annotator then votes 1 with their sensitivity on truly
present categories and with (1 - specificity) on absent ones. Votes carry
confidence scores drawn from one of two grid distributions depending on
whether the label agrees with the ground truth, so downstream selection
rules are exercised. An annotator who emits no label at all for a clip
produces no record for that (annotator, clip) pair, i.e. missing coverage.

All randomness comes from counter-based Philox streams keyed on
(seed, stream kind, category, annotator) with the clip index addressing
the position inside the stream, so output is reproducible regardless of
evaluation order or parallel scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import AnnotationCorpus, AnnotationRecord
from .taxonomy import ALL_EMOTIONS, Emotion

_STREAM_TRUTH = 0
_STREAM_VOTE = 1
_STREAM_CONFIDENCE = 2
_STREAM_DURATION = 3

_LEVELS = np.arange(11) / 10.0


def _uniforms(seed: int, stream: int, category: int, annotator: int, n: int) -> np.ndarray:
    key = np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, (stream << 40) | (category << 20) | annotator],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key)).random(n)


def _grid_sample(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling of grid levels 0..10 from uniform draws."""
    cdf = np.cumsum(weights) / weights.sum()
    return np.searchsorted(cdf, u, side="right").clip(0, 10)


@dataclass(frozen=True)
class ConfidenceModel:
    """Score distributions over the 11-level grid for emitted labels."""

    consistent: tuple[float, ...] = (0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1)
    inconsistent: tuple[float, ...] = (1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0)

    def __post_init__(self):
        for name, w in (("consistent", self.consistent), ("inconsistent", self.inconsistent)):
            if len(w) != 11 or min(w) < 0 or sum(w) <= 0:
                raise ValueError(f"{name} weights must be 11 nonnegative values, not all zero")


@dataclass(frozen=True)
class DurationModel:
    """Log-normal clip durations (seconds), floored away from zero."""

    log_mean: float = math.log(3.0)
    log_sigma: float = 0.6
    minimum: float = 0.2


@dataclass(frozen=True)
class SimConfig:
    n_annotators: int
    n_clips: int
    prevalence: dict[Emotion, float]
    sensitivity: np.ndarray  # (n_annotators, 11)
    specificity: np.ndarray  # (n_annotators, 11)
    confidence: ConfidenceModel = ConfidenceModel()
    duration: DurationModel = DurationModel()
    seed: int = 0

    def __post_init__(self):
        if self.n_annotators < 1 or self.n_clips < 1:
            raise ValueError("need at least one annotator and one clip")
        if set(self.prevalence) != set(ALL_EMOTIONS):
            missing = sorted(
                e.display_name for e in set(ALL_EMOTIONS) - set(self.prevalence)
            )
            raise ValueError(f"prevalence must cover all 11 categories; missing {missing}")
        shape = (self.n_annotators, len(ALL_EMOTIONS))
        for name, arr in (("sensitivity", self.sensitivity), ("specificity", self.specificity)):
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if not ((arr > 0.0) & (arr < 1.0)).all():
                raise ValueError(f"{name} values must lie strictly inside (0, 1)")
        for cat, p in self.prevalence.items():
            if not 0.0 < p < 1.0:
                raise ValueError(
                    f"prevalence for {cat.display_name} must lie strictly inside (0, 1)"
                )

    @classmethod
    def build(
        cls,
        n_annotators: int = 11,
        n_clips: int = 100,
        prevalence: float | dict[Emotion, float] = 0.3,
        sensitivity=0.85,
        specificity=0.85,
        confidence: ConfidenceModel = ConfidenceModel(),
        duration: DurationModel = DurationModel(),
        seed: int = 0,
    ) -> "SimConfig":
        """Convenience constructor broadcasting scalars/per-annotator values."""
        if not isinstance(prevalence, dict):
            prevalence = {cat: float(prevalence) for cat in ALL_EMOTIONS}
        return cls(
            n_annotators=n_annotators,
            n_clips=n_clips,
            prevalence=dict(prevalence),
            sensitivity=_broadcast(sensitivity, n_annotators),
            specificity=_broadcast(specificity, n_annotators),
            confidence=confidence,
            duration=duration,
            seed=seed,
        )


def _broadcast(value, n_annotators: int) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    shape = (n_annotators, len(ALL_EMOTIONS))
    if arr.ndim == 0:
        return np.full(shape, float(arr))
    if arr.ndim == 1 and arr.shape[0] == n_annotators:
        return np.repeat(arr[:, None], len(ALL_EMOTIONS), axis=1)
    if arr.shape == shape:
        return arr.copy()
    raise ValueError(
        f"reliability values must be scalar, per-annotator ({n_annotators},), "
        f"or per annotator x category {shape}; got shape {arr.shape}"
    )


@dataclass(frozen=True)
class GroundTruth:
    """True per-clip label sets the corpus was sampled from."""

    video_ids: tuple[str, ...]
    truth: dict[Emotion, np.ndarray] = field(repr=False)  # category -> (N,) of {0,1}

    def labels_for(self, video_id: str) -> frozenset[Emotion]:
        j = self.video_ids.index(video_id)
        return frozenset(cat for cat in ALL_EMOTIONS if self.truth[cat][j] == 1)

    def matrix(self, category: Emotion) -> np.ndarray:
        return self.truth[category]


def annotator_ids(n: int) -> list[str]:
    width = max(2, len(str(n - 1)))
    return [f"a{i:0{width}d}" for i in range(n)]


def video_ids(n: int) -> list[str]:
    width = max(5, len(str(n - 1)))
    return [f"{j:0{width}d}.mp4" for j in range(n)]


def simulate(config: SimConfig) -> tuple[AnnotationCorpus, GroundTruth]:
    """Sample a corpus and its ground truth; identical seeds give identical output."""
    m, n, k = config.n_annotators, config.n_clips, len(ALL_EMOTIONS)
    vids = video_ids(n)
    annots = annotator_ids(m)

    truth = np.zeros((k, n), dtype=np.int64)
    for c, cat in enumerate(ALL_EMOTIONS):
        u = _uniforms(config.seed, _STREAM_TRUTH, c, 0, n)
        truth[c] = u < config.prevalence[cat]

    votes = np.zeros((m, n, k), dtype=np.int64)
    levels = np.zeros((m, n, k), dtype=np.int64)
    consistent_w = np.asarray(config.confidence.consistent, dtype=np.float64)
    inconsistent_w = np.asarray(config.confidence.inconsistent, dtype=np.float64)
    for c in range(k):
        v = truth[c]
        for i in range(m):
            p_vote = np.where(v == 1, config.sensitivity[i, c], 1.0 - config.specificity[i, c])
            u_vote = _uniforms(config.seed, _STREAM_VOTE, c, i, n)
            votes[i, :, c] = u_vote < p_vote
            u_conf = _uniforms(config.seed, _STREAM_CONFIDENCE, c, i, n)
            levels[i, :, c] = np.where(
                v == 1,
                _grid_sample(consistent_w, u_conf),
                _grid_sample(inconsistent_w, u_conf),
            )

    dur_rng = np.random.Generator(
        np.random.Philox(key=np.array([config.seed, _STREAM_DURATION << 40], dtype=np.uint64))
    )
    durations_arr = np.maximum(
        dur_rng.lognormal(config.duration.log_mean, config.duration.log_sigma, n),
        config.duration.minimum,
    )
    durations = {vid: float(d) for vid, d in zip(vids, durations_arr)}

    records: list[AnnotationRecord] = []
    for i in range(m):
        for j in range(n):
            cats = np.flatnonzero(votes[i, j])
            if cats.size == 0:
                continue  # annotator skipped this clip entirely
            labels = tuple(ALL_EMOTIONS[c] for c in cats)
            scores = tuple(float(_LEVELS[levels[i, j, c]]) for c in cats)
            records.append(AnnotationRecord(vids[j], annots[i], labels, scores))

    corpus = AnnotationCorpus.from_records(records, durations)
    ground_truth = GroundTruth(
        tuple(vids), {cat: truth[c] for c, cat in enumerate(ALL_EMOTIONS)}
    )
    return corpus, ground_truth
