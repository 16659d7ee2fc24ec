"""Label retention and single/multiple expression selection.

Retention keeps, per clip and category, the labels of annotators whose
balanced reliability (sensitivity + specificity)/2 clears a threshold,
with a per-clip floor: when fewer than ``min_retained_per_clip`` annotators
survive, the clip instead keeps the full records of its top annotators
ranked by mean balanced reliability across categories.

Selection then marks a category valid on a clip when at least half of the
retained annotators labeled it and their mean confidence reaches the
confidence threshold; the predominant single label is the valid label with
the highest mean confidence, and clips with two or three valid non-neutral
labels form compound categories that must exceed a minimum sample count to
survive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import AnnotationCorpus, AnnotationRecord, score_level
from .errors import NoValidLabelError, PolicyInfeasibleError
from .reliability import ReliabilityReport
from .taxonomy import MAX_COMPOUND_SIZE, CompoundEmotion, Emotion


@dataclass(frozen=True)
class RetentionPolicy:
    min_retained_per_clip: int = 5
    reliability_threshold: float = 0.7

    def __post_init__(self):
        if self.min_retained_per_clip < 1:
            raise ValueError("min_retained_per_clip must be >= 1")
        if not 0.0 <= self.reliability_threshold <= 1.0:
            raise ValueError("reliability_threshold must be in [0, 1]")


@dataclass(frozen=True)
class RetentionResult:
    corpus: AnnotationCorpus
    retained_counts: dict[str, int]  # video_id -> retained annotator count
    fallback_clips: frozenset[str]  # clips where the per-clip floor kicked in


@dataclass(frozen=True)
class ClipDecision:
    video_id: str
    valid_labels: dict[Emotion, float]  # category -> mean retained confidence
    single_label: Emotion | None
    compound_label: CompoundEmotion | None
    disposition: str  # single_only | single_and_multiple | excluded
    reason: str | None = None  # set when excluded


@dataclass(frozen=True)
class CuratedDataset:
    single_set: dict[Emotion, list[str]]
    multiple_set: dict[CompoundEmotion, list[str]]
    excluded: list[tuple[str, str]]  # (video_id, reason)
    min_category_count: int = 10
    decisions: tuple[ClipDecision, ...] = field(default=())

    def to_json_obj(self) -> dict:
        return {
            "single_set": {
                cat.display_name: sorted(ids) for cat, ids in self.single_set.items()
            },
            "multiple_set": {
                comp.canonical_name: sorted(ids) for comp, ids in self.multiple_set.items()
            },
            "excluded": [
                {"video_id": vid, "reason": reason}
                for vid, reason in sorted(self.excluded)
            ],
        }


def retain_labels(
    corpus: AnnotationCorpus,
    report: ReliabilityReport,
    policy: RetentionPolicy = RetentionPolicy(),
) -> RetentionResult:
    """Filter the corpus down to high-reliability labels, clip by clip."""
    if corpus.n_annotators < policy.min_retained_per_clip:
        raise PolicyInfeasibleError(
            f"corpus has {corpus.n_annotators} annotators but the policy requires "
            f"at least {policy.min_retained_per_clip} retained labels per clip"
        )
    balanced = report.balanced_matrix()
    a_idx = {a: i for i, a in enumerate(report.annotators)}
    cat_idx = {cat: k for k, cat in enumerate(Emotion)}
    mean_balanced = report.mean_balanced_reliability()
    tau = policy.reliability_threshold

    retained_records: list[AnnotationRecord] = []
    retained_counts: dict[str, int] = {}
    fallback_clips: set[str] = set()

    for video_id, records in corpus.records_by_clip().items():
        filtered: list[AnnotationRecord] = []
        for rec in records:
            i = a_idx[rec.annotator_id]
            kept = [
                (lab, score)
                for lab, score in zip(rec.labels, rec.scores)
                if balanced[i, cat_idx[lab]] >= tau
            ]
            if kept:
                labels, scores = zip(*kept)
                filtered.append(
                    AnnotationRecord(rec.video_id, rec.annotator_id, labels, scores)
                )
        if len(filtered) < policy.min_retained_per_clip:
            # per-clip floor: keep the most reliable annotators with their
            # full records instead of the threshold-filtered subset
            fallback_clips.add(video_id)
            ranked = sorted(
                records, key=lambda r: (-mean_balanced[r.annotator_id], r.annotator_id)
            )
            filtered = ranked[: policy.min_retained_per_clip]
        retained_records.extend(filtered)
        retained_counts[video_id] = len(filtered)

    retained = AnnotationCorpus.from_records(retained_records, corpus.durations)
    return RetentionResult(retained, retained_counts, frozenset(fallback_clips))


def valid_labels(
    clip_records: list[AnnotationRecord], confidence_threshold: float = 0.5
) -> dict[Emotion, float]:
    """Valid categories for one clip's retained records, with mean confidences.

    A category qualifies when at least half of the retained annotators
    labeled it and the mean of their confidence scores reaches the
    threshold. Confidence means are computed on the integer score grid, so
    threshold comparisons are exact.
    """
    m = len(clip_records)
    out: dict[Emotion, float] = {}
    if m == 0:
        return out
    for cat in Emotion:
        levels = [
            score_level(rec.score_for(cat)) for rec in clip_records if cat in rec.labels
        ]
        count = len(levels)
        if count == 0 or 2 * count < m:
            continue
        c_mean = sum(levels) / (10.0 * count)
        if c_mean >= confidence_threshold:
            out[cat] = c_mean
    return out


def assign_single(valid: dict[Emotion, float]) -> Emotion:
    """Predominant label: the valid category with the highest mean confidence.

    Exact ties resolve to the lower category ordinal. Grid-based means make
    float equality reliable here (denominators are at most the annotator
    count, far above float resolution).
    """
    if not valid:
        raise NoValidLabelError("clip has no valid labels")
    return max(valid, key=lambda cat: (valid[cat], -cat.ordinal))


def compound_candidate(valid: dict[Emotion, float]) -> CompoundEmotion | None:
    """Compound formed by the valid non-neutral labels, when 2 or 3 exist."""
    members = [cat for cat in valid if cat is not Emotion.NEUTRAL]
    if not 2 <= len(members) <= MAX_COMPOUND_SIZE:
        return None
    return CompoundEmotion(tuple(members))


def curate(
    corpus: AnnotationCorpus,
    report: ReliabilityReport,
    policy: RetentionPolicy = RetentionPolicy(),
    min_category_count: int = 10,
    confidence_threshold: float = 0.5,
) -> CuratedDataset:
    """Full selection pass: retention, validity, single set, pruned multiple set."""
    retention = retain_labels(corpus, report, policy)
    by_clip = retention.corpus.records_by_clip()

    valid_by_clip: dict[str, dict[Emotion, float]] = {}
    candidates: dict[str, CompoundEmotion] = {}
    excluded: list[tuple[str, str]] = []
    for video_id in corpus.clips:
        records = by_clip.get(video_id, [])
        if not records:
            excluded.append((video_id, "no_retained_annotators"))
            continue
        valid = valid_labels(records, confidence_threshold)
        if not valid:
            excluded.append((video_id, "no_valid_label"))
            continue
        valid_by_clip[video_id] = valid
        candidate = compound_candidate(valid)
        if candidate is not None:
            candidates[video_id] = candidate

    compound_counts: dict[CompoundEmotion, int] = {}
    for comp in candidates.values():
        compound_counts[comp] = compound_counts.get(comp, 0) + 1
    surviving = {comp for comp, n in compound_counts.items() if n > min_category_count}

    single_set: dict[Emotion, list[str]] = {}
    multiple_set: dict[CompoundEmotion, list[str]] = {}
    decisions: list[ClipDecision] = []
    excluded_ids = dict(excluded)
    for video_id in corpus.clips:
        if video_id in excluded_ids:
            decisions.append(
                ClipDecision(video_id, {}, None, None, "excluded", excluded_ids[video_id])
            )
            continue
        valid = valid_by_clip[video_id]
        single = assign_single(valid)
        single_set.setdefault(single, []).append(video_id)
        compound = candidates.get(video_id)
        if compound is not None and compound in surviving:
            multiple_set.setdefault(compound, []).append(video_id)
            decisions.append(
                ClipDecision(video_id, valid, single, compound, "single_and_multiple")
            )
        else:
            decisions.append(ClipDecision(video_id, valid, single, None, "single_only"))

    single_set = {
        cat: sorted(ids)
        for cat, ids in sorted(single_set.items(), key=lambda kv: kv[0].ordinal)
    }
    multiple_set = {
        comp: sorted(ids)
        for comp, ids in sorted(
            multiple_set.items(), key=lambda kv: tuple(m.ordinal for m in kv[0].members)
        )
    }
    return CuratedDataset(
        single_set=single_set,
        multiple_set=multiple_set,
        excluded=sorted(excluded),
        min_category_count=min_category_count,
        decisions=tuple(sorted(decisions, key=lambda d: d.video_id)),
    )
