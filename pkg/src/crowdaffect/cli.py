"""Command-line pipeline: simulate, aggregate, alpha, stats, report.

Exit codes: 0 success, 1 input error, 2 retention policy infeasible,
3 internal numerical failure. Data files never embed timestamps, so
re-running on identical inputs reproduces byte-identical output trees.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .consistency import consistency_report
from .em import EMConfig
from .errors import (
    CrowdAffectError,
    InputDataError,
    MissingDurationError,
    NumericalFailureError,
    PolicyInfeasibleError,
)
from .policy import RetentionPolicy, curate, retain_labels
from .reliability import reliability_report
from .simulate import ConfidenceModel, DurationModel, SimConfig, simulate
from .stats import multiple_distribution, single_distribution
from .taxonomy import ALL_EMOTIONS, parse_emotion

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_POLICY = 2
EXIT_NUMERICAL = 3

_FORMAT_EXT = {"json": "json", "csv": "csv", "markdown": "md"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are input errors (exit 1)
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _add_shared(parser: argparse.ArgumentParser, metadata: bool = True):
    parser.add_argument("--input", required=True, help="annotation JSON file")
    if metadata:
        parser.add_argument("--metadata", help="clip metadata JSON file (durations)")
    parser.add_argument("--out-dir", required=True, help="output directory")
    parser.add_argument(
        "--format", choices=("json", "csv", "markdown"), default="json",
        help="rendering for report tables (canonical JSON is always written)",
    )


def _add_em_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--epsilon", type=float, default=0.000001)
    parser.add_argument("--max-iters", type=int, default=500)


def _add_policy_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--min-retained", type=int, default=5)
    parser.add_argument("--reliability-threshold", type=float, default=0.7)
    parser.add_argument("--min-category-count", type=int, default=10)
    parser.add_argument("--confidence-threshold", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crowdaffect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_agg = sub.add_parser("aggregate", help="run the full aggregation pipeline")
    _add_shared(p_agg)
    _add_em_flags(p_agg)
    _add_policy_flags(p_agg)
    p_agg.set_defaults(func=cmd_aggregate)

    p_sim = sub.add_parser("simulate", help="generate a synthetic corpus")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--annotators", type=int, default=11)
    p_sim.add_argument("--clips", type=int, default=100)
    p_sim.add_argument("--params", help="JSON file with p/alpha/beta overrides")
    p_sim.add_argument("--out-dir", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_alpha = sub.add_parser("alpha", help="label-consistency report only")
    _add_shared(p_alpha)
    _add_em_flags(p_alpha)
    _add_policy_flags(p_alpha)
    p_alpha.set_defaults(func=cmd_alpha)

    p_stats = sub.add_parser("stats", help="distribution tables for a curated dataset")
    p_stats.add_argument("--input", required=True, help="curated dataset JSON")
    p_stats.add_argument("--metadata", required=True, help="clip metadata JSON")
    p_stats.add_argument("--out-dir", required=True)
    p_stats.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    p_stats.set_defaults(func=cmd_stats)

    p_rep = sub.add_parser("report", help="combined markdown report from aggregate output")
    p_rep.add_argument("--out-dir", required=True, help="directory written by aggregate")
    p_rep.set_defaults(func=cmd_report)
    return parser


def _write_rendered(table, out_dir: Path, stem: str, fmt: str):
    io.write_json(table.to_json_obj(), out_dir / f"{stem}.json")
    if fmt == "csv":
        io.write_text(table.to_csv(), out_dir / f"{stem}.csv")
    elif fmt == "markdown":
        io.write_text(table.to_markdown(), out_dir / f"{stem}.md")


def cmd_aggregate(args) -> int:
    corpus = io.load_corpus(args.input, args.metadata)
    config = EMConfig(epsilon=args.epsilon, max_iterations=args.max_iters)
    policy = RetentionPolicy(args.min_retained, args.reliability_threshold)

    report = reliability_report(corpus, config)
    if report.failures:
        for cat, msg in report.failures.items():
            print(f"error: EM failed for {cat.display_name}: {msg}", file=sys.stderr)
        return EXIT_NUMERICAL

    retention = retain_labels(corpus, report, policy)
    consistency = consistency_report(retention.corpus)
    dataset = curate(
        corpus, report, policy, args.min_category_count, args.confidence_threshold
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    io.write_json(report.to_json_obj(), out_dir / "reliability.json")
    io.write_json(dataset.to_json_obj(), out_dir / "curated.json")
    io.write_text(io.decisions_to_csv(dataset.decisions), out_dir / "decisions.csv")
    _write_rendered(consistency, out_dir, "consistency", args.format)

    n_single = sum(len(ids) for ids in dataset.single_set.values())
    n_multiple = sum(len(ids) for ids in dataset.multiple_set.values())
    stats_written = False
    missing = [vid for vid in corpus.clips if vid not in corpus.durations]
    if missing:
        print(
            f"warning: {len(missing)} clip(s) lack durations; stats skipped",
            file=sys.stderr,
        )
    else:
        _write_rendered(single_distribution(dataset, corpus.durations), out_dir,
                        "stats_single", args.format)
        _write_rendered(multiple_distribution(dataset, corpus.durations), out_dir,
                        "stats_multiple", args.format)
        stats_written = True

    print(f"clips in: {corpus.n_clips}  annotators: {corpus.n_annotators}")
    print(
        f"single-labeled: {n_single}  multi-labeled: {n_multiple}  "
        f"excluded: {len(dataset.excluded)}"
    )
    for cat in ALL_EMOTIONS:
        res = report.results[cat]
        status = "converged" if res.converged else "NOT converged"
        print(
            f"  {cat.display_name}: {status} in {res.n_iterations} iterations "
            f"(p={res.state.prevalence:.6f})"
        )
    avg = consistency.average
    print(f"consistency alpha average: {'undefined' if avg is None else f'{avg:.3f}'}")
    if not stats_written:
        print("stats: skipped (missing durations)")
    return EXIT_OK


def _load_sim_params(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputDataError(f"{path}: expected a JSON object")
    kwargs: dict = {}
    if "p" in data:
        p = data["p"]
        if isinstance(p, dict):
            kwargs["prevalence"] = {parse_emotion(name): float(v) for name, v in p.items()}
        else:
            kwargs["prevalence"] = float(p)
    if "alpha" in data:
        kwargs["sensitivity"] = data["alpha"]
    if "beta" in data:
        kwargs["specificity"] = data["beta"]
    if "confidence" in data:
        kwargs["confidence"] = ConfidenceModel(
            consistent=tuple(data["confidence"]["consistent"]),
            inconsistent=tuple(data["confidence"]["inconsistent"]),
        )
    if "duration" in data:
        d = data["duration"]
        kwargs["duration"] = DurationModel(
            log_mean=float(d.get("log_mean", DurationModel.log_mean)),
            log_sigma=float(d.get("log_sigma", DurationModel.log_sigma)),
            minimum=float(d.get("minimum", DurationModel.minimum)),
        )
    return kwargs


def cmd_simulate(args) -> int:
    kwargs = _load_sim_params(args.params)
    config = SimConfig.build(
        n_annotators=args.annotators, n_clips=args.clips, seed=args.seed, **kwargs
    )
    corpus, _truth = simulate(config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    io.write_json(io.records_to_json_obj(corpus.records), out_dir / "annotations.json")
    io.write_json(io.metadata_to_json_obj(corpus.durations), out_dir / "metadata.json")
    print(
        f"simulated {len(corpus.records)} records over {corpus.n_clips} clips "
        f"by {corpus.n_annotators} annotators (seed {args.seed})"
    )
    return EXIT_OK


def cmd_alpha(args) -> int:
    corpus = io.load_corpus(args.input, args.metadata)
    config = EMConfig(epsilon=args.epsilon, max_iterations=args.max_iters)
    policy = RetentionPolicy(args.min_retained, args.reliability_threshold)
    report = reliability_report(corpus, config)
    if report.failures:
        for cat, msg in report.failures.items():
            print(f"error: EM failed for {cat.display_name}: {msg}", file=sys.stderr)
        return EXIT_NUMERICAL
    retention = retain_labels(corpus, report, policy)
    consistency = consistency_report(retention.corpus)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_rendered(consistency, out_dir, "consistency", args.format)
    print(consistency.to_markdown(), end="")
    return EXIT_OK


def cmd_stats(args) -> int:
    dataset = io.load_curated(args.input)
    durations = io.load_metadata(args.metadata)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    single = single_distribution(dataset, durations)
    multiple = multiple_distribution(dataset, durations)
    _write_rendered(single, out_dir, "stats_single", args.format)
    _write_rendered(multiple, out_dir, "stats_multiple", args.format)
    print(single.to_markdown(), end="")
    print(multiple.to_markdown(), end="")
    return EXIT_OK


def _markdown_from_stats_json(obj: dict) -> str:
    lines = [
        "| Expressions | 0-2s | 2-5s | 5s+ | Total | Percent(%) |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for row in obj["rows"]:
        lines.append(
            f"| {row['category']} | {row['0-2s']} | {row['2-5s']} | {row['5s+']} "
            f"| {row['total']} | {row['percent']:.2f} |"
        )
    total = obj["total"]
    if total["total"]:
        lines.append(
            f"| Total | {total['0-2s']} | {total['2-5s']} | {total['5s+']} "
            f"| {total['total']} | 100.00 |"
        )
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    out_dir = Path(args.out_dir)
    sections: list[str] = ["# Aggregation report", ""]
    found = False

    rel_path = out_dir / "reliability.json"
    if rel_path.exists():
        found = True
        rel = json.loads(rel_path.read_text(encoding="utf-8"))
        sections += ["## Reliability estimation", ""]
        sections.append("| Category | Converged | Iterations | Prevalence |")
        sections.append("| --- | --- | --- | --- |")
        for cat in ALL_EMOTIONS:
            entry = rel.get(cat.display_name, {})
            if "error" in entry:
                sections.append(f"| {cat.display_name} | error | - | - |")
            else:
                sections.append(
                    f"| {cat.display_name} | {str(entry['converged']).lower()} "
                    f"| {entry['iterations']} | {entry['p']:.6f} |"
                )
        sections.append("")

    cur_path = out_dir / "curated.json"
    if cur_path.exists():
        found = True
        cur = json.loads(cur_path.read_text(encoding="utf-8"))
        n_single = sum(len(v) for v in cur["single_set"].values())
        n_multi = sum(len(v) for v in cur["multiple_set"].values())
        sections += [
            "## Curated dataset",
            "",
            f"- single-expression clips: {n_single} in {len(cur['single_set'])} categories",
            f"- multiple-expression clips: {n_multi} in {len(cur['multiple_set'])} categories",
            f"- excluded clips: {len(cur['excluded'])}",
            "",
        ]

    cons_path = out_dir / "consistency.json"
    if cons_path.exists():
        found = True
        cons = json.loads(cons_path.read_text(encoding="utf-8"))
        sections += ["## Label consistency (Cronbach's alpha)", ""]
        sections.append("| Emotions | Alpha |")
        sections.append("| --- | --- |")
        for cat in ALL_EMOTIONS:
            val = cons["alpha"].get(cat.display_name)
            sections.append(
                f"| {cat.display_name} | {'undefined' if val is None else f'{val:.3f}'} |"
            )
        avg = cons.get("average")
        sections.append(f"| Average | {'undefined' if avg is None else f'{avg:.3f}'} |")
        sections.append("")

    for stem, title in (
        ("stats_single", "Single expression set"),
        ("stats_multiple", "Multiple expression set"),
    ):
        path = out_dir / f"{stem}.json"
        if path.exists():
            found = True
            obj = json.loads(path.read_text(encoding="utf-8"))
            sections += [f"## {title}", "", _markdown_from_stats_json(obj)]

    if not found:
        print(f"error: no aggregate artifacts found in {out_dir}", file=sys.stderr)
        return EXIT_INPUT
    report_text = "\n".join(sections)
    io.write_text(report_text, out_dir / "report.md")
    print(f"wrote {out_dir / 'report.md'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PolicyInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except NumericalFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MissingDurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CrowdAffectError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
