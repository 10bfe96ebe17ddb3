"""Command-line front door: every engine capability without the UI.

Exit codes: 0 ok/pass, 1 usage or input error, 2 internal error, 3 monitor
regression.  Machine output (``--format json``) is byte-identical to the HTTP
service's responses for the same inputs.
"""

from __future__ import annotations

import argparse
import os
import socket
import sys
from pathlib import Path

from .costs import CostSchedule, CostScheduleError, parse_schedule
from .dataset import Dataset, DatasetError, parse_dataset, summarize
from .evaluation import EvaluationOutcome, evaluate_dataset, evaluation_payload
from .monitor import (
    DEFAULT_TOLERANCE,
    MonitorError,
    RegressionReport,
    VERDICT_PASS,
    monitor_compare,
    report_payload,
)
from .optimizer import OptimizationResult, OptimizerSettings, optimize
from .payloads import dumps, result_payload, summary_payload
from .profiles import (
    PROFILE_SUFFIX,
    ProfileDocument,
    ProfileError,
    ProfileProvenance,
    export_profile,
    make_baseline,
    parse_profile,
    utc_now_rfc3339,
)
from .thresholding import ThresholdProfile, global_profile
from .version import ENGINE_VERSION

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_REGRESS = 3

_HIST_BLOCKS = " ▁▂▃▄▅▆▇█"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's default 2
        raise UsageError(message)


def _read_bytes(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p.read_bytes()


def _load_dataset(args, task: str | None = None, positive_label: str | None = None) -> Dataset:
    task = task if task is not None else getattr(args, "task", None)
    positive_label = positive_label if positive_label is not None else getattr(args, "positive_label", None)
    if task is None:
        raise UsageError("--task is required")
    return parse_dataset(_read_bytes(args.input), task, positive_label)


def _load_schedule(args) -> CostSchedule | None:
    if getattr(args, "costs", None) is None:
        return None
    return parse_schedule(_read_bytes(args.costs))


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _table_row(cells, widths) -> str:
    return "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()


def _sparkline(bins) -> str:
    top = max(bins) if max(bins) > 0 else 1
    return "".join(_HIST_BLOCKS[min(8, (9 * b) // (top + 1) + (1 if b else 0))] for b in bins)


def cmd_summarize(args) -> int:
    dataset = _load_dataset(args)
    summary = summarize(dataset)
    if args.format == "json":
        _emit(dumps(summary_payload(dataset, summary)))
        return EXIT_OK
    print(f"dataset: {args.input}")
    print(f"task: {dataset.task.value}" + (f" (positive: {dataset.positive_label})" if dataset.positive_label else ""))
    print(f"records: {summary.record_count}   labels: {summary.label_count}   digest: {dataset.content_digest[:16]}")
    print()
    widths = (max(len(l) for l in dataset.vocabulary) + 2, 9, 22, 22)
    print(_table_row(("label", "positives", "scores (in truth)", "scores (not in truth)"), widths))
    for label in sorted(dataset.vocabulary):
        hist = summary.score_histogram[label]
        print(_table_row(
            (label, summary.per_label_positive_count[label], _sparkline(hist.positive), _sparkline(hist.negative)),
            widths,
        ))
    print("\nhistogram axis: score 0.0 .. 1.0 in 20 bins")
    return EXIT_OK


def _print_evaluation(outcome: EvaluationOutcome) -> None:
    widths = (max((len(l) for l in outcome.confusion.per_label), default=5) + 2, 6, 6, 6, 10, 8, 8)
    print(_table_row(("label", "tp", "fp", "mp", "precision", "recall", "f1"), widths))
    report = outcome.metrics
    for label in sorted(outcome.confusion.per_label):
        c = outcome.confusion.per_label[label]
        m = report.per_label[label]
        degenerate = "*" if m.degenerate else ""
        print(_table_row(
            (label, c.tp, c.fp, c.mp, f"{m.precision:.4f}{degenerate}", f"{m.recall:.4f}", f"{m.f1:.4f}"),
            widths,
        ))
    print(_table_row(("micro", "", "", "", f"{report.micro.precision:.4f}", f"{report.micro.recall:.4f}", f"{report.micro.f1:.4f}"), widths))
    print(_table_row(("macro", "", "", "", f"{report.macro.precision:.4f}", f"{report.macro.recall:.4f}", f"{report.macro.f1:.4f}"), widths))
    if report.abstain_count is not None:
        print(f"abstentions: {report.abstain_count}")
    if outcome.total_cost is not None:
        print(f"total cost: {outcome.total_cost:g}")


def cmd_evaluate(args) -> int:
    if (args.threshold is None) == (args.profile is None):
        raise UsageError("exactly one of --threshold or --profile is required")
    if args.profile is not None:
        document = parse_profile(_read_bytes(args.profile))
        if args.task is not None and args.task != document.task.value:
            raise UsageError(f"--task {args.task} conflicts with profile task {document.task.value}")
        dataset = _load_dataset(args, task=document.task.value, positive_label=document.positive_label)
        profile = document.to_threshold_profile()
        schedule = _load_schedule(args) or document.costs
    else:
        dataset = _load_dataset(args)
        if not (0.0 <= args.threshold <= 1.0):
            raise UsageError(f"--threshold out of range [0, 1]: {args.threshold}")
        profile = global_profile(dataset, args.threshold)
        schedule = _load_schedule(args)
    outcome = evaluate_dataset(dataset, profile, schedule)
    if args.format == "json":
        _emit(dumps(evaluation_payload(outcome)))
        return EXIT_OK
    _print_evaluation(outcome)
    return EXIT_OK


def _print_front(result: OptimizationResult, dataset: Dataset) -> None:
    print(f"seed: {result.provenance.settings.rng_seed}")
    print(f"front: {len(result.front)} non-dominated solution(s)")
    vocab = dataset.vocabulary
    widths = (4, 6, 6, 6) + tuple(max(len(l), 6) + 2 for l in vocab)
    print(_table_row(("", "tp", "fp", "mp") + tuple(f"t({l})" for l in vocab), widths))
    for i, solution in enumerate(result.front):
        tp, fp, mp = solution.counts
        marker = "*" if i == result.recommended_index else str(i)
        print(_table_row((marker, tp, fp, mp) + tuple(f"{t:.4f}" for t in solution.thresholds), widths))
    print("* = recommended")


def cmd_optimize(args) -> int:
    dataset = _load_dataset(args)
    schedule = _load_schedule(args)
    settings = OptimizerSettings(
        population_size=args.population,
        generations=args.generations,
        rng_seed=args.seed,
    )
    settings.validate()
    result = optimize(dataset, settings, schedule)

    solution = result.front[result.recommended_index]
    profile = ThresholdProfile(
        thresholds=dict(zip(dataset.vocabulary, solution.thresholds)),
        default_threshold=0.5,
        task=dataset.task,
        positive_label=dataset.positive_label,
    )
    provenance = ProfileProvenance(
        dataset_digest=dataset.content_digest,
        settings=settings,
        engine_version=ENGINE_VERSION,
        created_at=args.timestamp if args.timestamp else utc_now_rfc3339(),
    )
    data = export_profile(
        profile,
        provenance=provenance,
        baseline=make_baseline(dataset, profile, schedule),
        costs=schedule,
    )
    out_path = Path(args.out)
    out_path.write_bytes(data)

    if args.format == "json":
        payload = result_payload(result, dataset.vocabulary)
        payload["profile_path"] = str(out_path)
        _emit(dumps(payload))
    else:
        _print_front(result, dataset)
        print(f"profile written to {out_path}")
    return EXIT_OK


def _print_report(report: RegressionReport, stream) -> None:
    print(f"verdict: {report.verdict} (tolerance {report.tolerance:g})", file=stream)
    if report.baseline_cost is not None or report.current_cost is not None:
        print(f"cost: baseline {report.baseline_cost} -> current {report.current_cost}", file=stream)
    for warning in report.warnings:
        print(f"warning: {warning}", file=stream)
    if report.violations:
        widths = (18, 8, 10, 10, 10)
        print(_table_row(("scope", "metric", "baseline", "current", "drop"), widths), file=stream)
        for v in report.violations:
            print(_table_row(
                (v.scope, v.metric, f"{v.baseline:.4f}", f"{v.current:.4f}", f"{v.relative_drop:+.2%}"),
                widths,
            ), file=stream)
    else:
        print("no violations", file=stream)


def cmd_monitor(args) -> int:
    document = parse_profile(_read_bytes(args.profile))
    dataset = _load_dataset(args, task=document.task.value, positive_label=document.positive_label)
    report = monitor_compare(document, dataset, tolerance=args.tolerance, cost_tolerance=args.cost_tolerance)
    if args.format == "table":
        _print_report(report, sys.stdout)
    else:
        _emit(dumps(report_payload(report)))
        if sys.stderr.isatty():
            _print_report(report, sys.stderr)
    return EXIT_OK if report.verdict == VERDICT_PASS else EXIT_REGRESS


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    ui_dir = args.ui_dir
    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = bundled if bundled.is_dir() else None
    app = create_app(
        max_upload_bytes=args.max_upload_bytes,
        worker_count=args.workers,
        ui_dir=ui_dir,
    )
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((args.host, args.port))
    sock.listen(128)  # accept connections from the moment the banner prints
    host, port = sock.getsockname()[:2]
    print(f"listening on http://{host}:{port}", flush=True)
    config = uvicorn.Config(app, log_level="warning")
    server = uvicorn.Server(config)
    server.run(sockets=[sock])
    return EXIT_OK


def _add_input_flags(parser, require_task: bool = True) -> None:
    parser.add_argument("input", help="benchmark CSV path")
    if require_task:
        parser.add_argument("--task", choices=["binary", "multiclass", "multilabel"], required=True)
    else:
        parser.add_argument("--task", choices=["binary", "multiclass", "multilabel"])
    parser.add_argument("--positive-label", dest="positive_label", help="positive label (binary tasks)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="threshtune", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"threshtune {ENGINE_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("summarize", help="parse a benchmark CSV and print its summary")
    _add_input_flags(p)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("evaluate", help="apply a global threshold or a profile and print metrics")
    _add_input_flags(p, require_task=False)
    p.add_argument("--threshold", type=float, help="single global threshold")
    p.add_argument("--profile", help=f"threshold profile ({PROFILE_SUFFIX})")
    p.add_argument("--costs", help="cost schedule JSON path")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="search per-label thresholds with NSGA-II and export a profile")
    _add_input_flags(p)
    p.add_argument("--costs", help="cost schedule JSON path (recommendation selector)")
    p.add_argument("--out", required=True, help=f"output profile path ({PROFILE_SUFFIX})")
    p.add_argument("--seed", type=int, default=OptimizerSettings().rng_seed)
    p.add_argument("--population", type=int, default=OptimizerSettings().population_size)
    p.add_argument("--generations", type=int, default=OptimizerSettings().generations)
    p.add_argument("--timestamp", help="RFC-3339 provenance timestamp (defaults to now; pin for reproducible files)")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("monitor", help="re-evaluate a stored profile against fresh data; exit 3 on regression")
    p.add_argument("input", help="benchmark CSV path")
    p.add_argument("--profile", required=True, help=f"threshold profile ({PROFILE_SUFFIX}) with baseline")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                   help="max relative F1 drop before regression (default 0.05)")
    p.add_argument("--cost-tolerance", dest="cost_tolerance", type=float,
                   help="also gate on relative total-cost increase")
    p.add_argument("--format", choices=["table", "json"], default="json")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("serve", help="run the HTTP service (serves the UI bundle when built)")
    env = os.environ
    p.add_argument("--host", default=env.get("THRESHTUNE_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(env.get("THRESHTUNE_PORT", "8080")))
    p.add_argument("--workers", type=int, default=int(env.get("THRESHTUNE_WORKERS", "2")),
                   help="max concurrent optimization jobs")
    p.add_argument("--max-upload-bytes", dest="max_upload_bytes", type=int,
                   default=int(env.get("THRESHTUNE_MAX_UPLOAD_BYTES", str(64 * 1024 * 1024))))
    p.add_argument("--ui-dir", dest="ui_dir", default=env.get("THRESHTUNE_UI_DIR"),
                   help="directory with the built UI bundle")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DatasetError, ProfileError, CostScheduleError, MonitorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        return EXIT_INPUT
    except Exception as exc:  # anything unexpected is an internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
