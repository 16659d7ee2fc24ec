"""Reading and writing the pipeline's file formats.

Annotation input is a JSON array (or newline-delimited JSON stream) of
objects with ``video_id``, ``annotator_id``, ``labels`` (category names or
codes), and ``scores``. Clip metadata is a JSON array of objects with
``video_id`` and ``duration_seconds``. All written JSON is UTF-8 with
sorted keys and a trailing newline so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .corpus import AnnotationCorpus, AnnotationRecord
from .errors import CrowdAffectError, InputDataError
from .policy import ClipDecision, CuratedDataset
from .taxonomy import parse_compound, parse_emotion


def _record_from_obj(obj, index: int) -> AnnotationRecord:
    if not isinstance(obj, dict):
        raise InputDataError(f"record {index}: expected an object, got {type(obj).__name__}")
    try:
        video_id = obj["video_id"]
        annotator_id = obj["annotator_id"]
        labels = obj["labels"]
        scores = obj["scores"]
    except KeyError as exc:
        raise InputDataError(f"record {index}: missing field {exc.args[0]!r}") from None
    if not isinstance(labels, list) or not isinstance(scores, list):
        raise InputDataError(f"record {index}: labels and scores must be arrays")
    try:
        return AnnotationRecord(
            video_id=str(video_id),
            annotator_id=str(annotator_id),
            labels=tuple(parse_emotion(lab) for lab in labels),
            scores=tuple(float(s) for s in scores),
        )
    except (CrowdAffectError, TypeError, ValueError) as exc:
        raise InputDataError(f"record {index}: {exc}") from None


def load_annotations(path: str | Path) -> list[AnnotationRecord]:
    """Parse an annotation file; errors name the offending record index."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if not stripped:
        return []
    if stripped.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputDataError(f"{path}: invalid JSON: {exc}") from None
        return [_record_from_obj(obj, i) for i, obj in enumerate(data)]
    records = []
    index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputDataError(
                f"{path}: record {index} (line {lineno}): invalid JSON: {exc}"
            ) from None
        records.append(_record_from_obj(obj, index))
        index += 1
    return records


def load_metadata(path: str | Path) -> dict[str, float]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise InputDataError(f"{path}: expected a JSON array of clip metadata objects")
    durations: dict[str, float] = {}
    for i, obj in enumerate(data):
        try:
            durations[str(obj["video_id"])] = float(obj["duration_seconds"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputDataError(f"{path}: metadata record {i}: {exc}") from None
    return durations


def load_corpus(
    annotations_path: str | Path, metadata_path: str | Path | None = None
) -> AnnotationCorpus:
    records = load_annotations(annotations_path)
    durations = load_metadata(metadata_path) if metadata_path else None
    return AnnotationCorpus.from_records(records, durations)


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def write_text(text: str, path: str | Path) -> None:
    Path(path).write_text(text, encoding="utf-8")


def records_to_json_obj(records: Iterable[AnnotationRecord]) -> list[dict]:
    return [
        {
            "video_id": rec.video_id,
            "annotator_id": rec.annotator_id,
            "labels": [lab.display_name for lab in rec.labels],
            "scores": list(rec.scores),
        }
        for rec in records
    ]


def metadata_to_json_obj(durations: dict[str, float]) -> list[dict]:
    return [
        {"video_id": vid, "duration_seconds": secs}
        for vid, secs in sorted(durations.items())
    ]


def decisions_to_csv(decisions: Iterable[ClipDecision]) -> str:
    lines = ["video_id,valid_labels,single_label,compound_label,disposition"]
    for d in sorted(decisions, key=lambda d: d.video_id):
        valid = ";".join(
            f"{cat.display_name}:{valid_c!r}"
            for cat, valid_c in sorted(d.valid_labels.items(), key=lambda kv: kv[0].ordinal)
        )
        single = d.single_label.display_name if d.single_label else ""
        compound = f'"{d.compound_label.canonical_name}"' if d.compound_label else ""
        lines.append(f"{d.video_id},{valid},{single},{compound},{d.disposition}")
    return "\n".join(lines) + "\n"


def load_curated(path: str | Path, min_category_count: int = 10) -> CuratedDataset:
    """Read a curated-dataset JSON back (decision details are not stored)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: invalid JSON: {exc}") from None
    try:
        single_set = {
            parse_emotion(name): sorted(ids) for name, ids in data["single_set"].items()
        }
        multiple_set = {
            parse_compound(name): sorted(ids) for name, ids in data["multiple_set"].items()
        }
        excluded = [(e["video_id"], e["reason"]) for e in data.get("excluded", [])]
    except (KeyError, TypeError, AttributeError, CrowdAffectError) as exc:
        raise InputDataError(f"{path}: not a curated-dataset file: {exc}") from None
    single_sorted = {
        cat: ids for cat, ids in sorted(single_set.items(), key=lambda kv: kv[0].ordinal)
    }
    multiple_sorted = {
        comp: ids
        for comp, ids in sorted(
            multiple_set.items(), key=lambda kv: tuple(m.ordinal for m in kv[0].members)
        )
    }
    return CuratedDataset(
        single_set=single_sorted,
        multiple_set=multiple_sorted,
        excluded=sorted(excluded),
        min_category_count=min_category_count,
    )
