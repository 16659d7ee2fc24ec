"""Distribution tables: clip counts per category, bucketed by duration.

Buckets are the half-open intervals [0, 2), [2, 5), [5, inf) seconds, so
a boundary duration like exactly 2.0 s lands in the 2-5 s bucket.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MissingDurationError
from .policy import CuratedDataset

BUCKET_LABELS = ("0-2s", "2-5s", "5s+")
_BOUNDS = (2.0, 5.0)
COLUMNS = ("Expressions", "0-2s", "2-5s", "5s+", "Total", "Percent(%)")


def _bucket(duration: float) -> int:
    if duration < _BOUNDS[0]:
        return 0
    if duration < _BOUNDS[1]:
        return 1
    return 2


@dataclass(frozen=True)
class DistributionRow:
    name: str
    buckets: tuple[int, int, int]
    total: int
    percent: float


@dataclass(frozen=True)
class DistributionTable:
    rows: tuple[DistributionRow, ...]
    grand_buckets: tuple[int, int, int]
    grand_total: int

    def to_json_obj(self) -> dict:
        return {
            "rows": [
                {
                    "category": r.name,
                    "0-2s": r.buckets[0],
                    "2-5s": r.buckets[1],
                    "5s+": r.buckets[2],
                    "total": r.total,
                    "percent": r.percent,
                }
                for r in self.rows
            ],
            "total": {
                "0-2s": self.grand_buckets[0],
                "2-5s": self.grand_buckets[1],
                "5s+": self.grand_buckets[2],
                "total": self.grand_total,
                "percent": 100.0 if self.grand_total else 0.0,
            },
        }

    def to_markdown(self) -> str:
        lines = [
            "| " + " | ".join(COLUMNS) + " |",
            "| " + " | ".join("---" for _ in COLUMNS) + " |",
        ]
        for r in self.rows:
            lines.append(
                f"| {r.name} | {r.buckets[0]} | {r.buckets[1]} | {r.buckets[2]} "
                f"| {r.total} | {r.percent:.2f} |"
            )
        if self.grand_total:
            g = self.grand_buckets
            lines.append(
                f"| Total | {g[0]} | {g[1]} | {g[2]} | {self.grand_total} | 100.00 |"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = [",".join(COLUMNS)]
        for r in self.rows:
            lines.append(
                f"{r.name},{r.buckets[0]},{r.buckets[1]},{r.buckets[2]},"
                f"{r.total},{r.percent:.2f}"
            )
        if self.grand_total:
            g = self.grand_buckets
            lines.append(f"Total,{g[0]},{g[1]},{g[2]},{self.grand_total},100.00")
        return "\n".join(lines) + "\n"


def _build_table(
    groups: list[tuple[str, tuple[int, ...], list[str]]], durations: dict[str, float]
) -> DistributionTable:
    """groups: (display name, sort ordinals, clip ids); rows sorted by
    descending total then category order."""
    missing = sorted(
        {vid for _, _, ids in groups for vid in ids if vid not in durations}
    )
    if missing:
        raise MissingDurationError(missing)

    counted = []
    for name, ordinals, ids in groups:
        buckets = [0, 0, 0]
        for vid in ids:
            buckets[_bucket(durations[vid])] += 1
        counted.append((name, ordinals, tuple(buckets), len(ids)))

    grand_total = sum(total for _, _, _, total in counted)
    rows = []
    for name, _, buckets, total in sorted(counted, key=lambda g: (-g[3], g[1])):
        percent = round(100.0 * total / grand_total, 2) if grand_total else 0.0
        rows.append(DistributionRow(name, buckets, total, percent))
    grand_buckets = tuple(
        sum(r.buckets[b] for r in rows) for b in range(3)
    )
    return DistributionTable(tuple(rows), grand_buckets, grand_total)  # type: ignore[arg-type]


def single_distribution(
    dataset: CuratedDataset, durations: dict[str, float]
) -> DistributionTable:
    groups = [
        (cat.display_name, (cat.ordinal,), ids)
        for cat, ids in dataset.single_set.items()
        if ids
    ]
    return _build_table(groups, durations)


def multiple_distribution(
    dataset: CuratedDataset, durations: dict[str, float]
) -> DistributionTable:
    groups = [
        (comp.canonical_name, tuple(m.ordinal for m in comp.members), ids)
        for comp, ids in dataset.multiple_set.items()
        if ids
    ]
    return _build_table(groups, durations)


def distribution(
    dataset: CuratedDataset, durations: dict[str, float]
) -> tuple[DistributionTable, DistributionTable]:
    """Both tables: one for the single set, one for the multiple set."""
    return single_distribution(dataset, durations), multiple_distribution(dataset, durations)
