"""Command-line surface.

Exit codes: 0 success, 1 validation failure (bad config, bad data, audit
divergence, mismatched files), 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import expman, metrics
from .errors import (
    ConfigInvalid,
    CorpusError,
    IdMismatch,
    LengthMismatch,
    ParseFailure,
    SkewkitError,
)
from .tasks import get_task

VALIDATION_ERRORS = (ConfigInvalid, CorpusError, IdMismatch, ParseFailure, LengthMismatch)


def _add_common(parser: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        parser.add_argument("--config", required=True, help="experiment config file (JSON)")
    parser.add_argument("--task", choices=("1A", "2A"), help="task override")
    parser.add_argument("--out", help="output directory for artifacts and the manifest")
    parser.add_argument("--seed", type=int, help="seed override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewkit",
        description="Experiment toolkit for imbalanced binary text classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_audit = sub.add_parser("audit", help="audit dataset class counts against the built-in reference")
    p_audit.add_argument("--task", choices=("1A", "2A"), required=True)
    p_audit.add_argument("--train", help="train split (JSONL)")
    p_audit.add_argument("--dev", help="dev split (JSONL)")
    p_audit.add_argument("--test", help="test split (JSONL)")
    p_audit.add_argument("--fixture", action="store_true",
                         help="audit the bundled synthetic fixture instead of real files")
    p_audit.add_argument("--out", default="runs/audit", help="where fixture files are materialized")
    p_audit.add_argument("--seed", type=int, default=0)

    for mode in ("train", "sweep", "search", "probe"):
        p = sub.add_parser(mode, help=f"run a {mode} experiment from a config file")
        _add_common(p)

    p_score = sub.add_parser("score", help="score a prediction file against gold labels")
    p_score.add_argument("--config", help="config file with a score section")
    p_score.add_argument("--task", choices=("1A", "2A"))
    p_score.add_argument("--gold", help="gold file (id<TAB>label)")
    p_score.add_argument("--pred", help="prediction file (id<TAB>label)")
    p_score.add_argument("--out", help="output directory")
    p_score.add_argument("--seed", type=int)

    p_report = sub.add_parser("report", help="regenerate tables and loss curves from a manifest")
    p_report.add_argument("--manifest", required=True)
    p_report.add_argument("--out", required=True)
    p_report.add_argument("--plot", action="store_true", help="also render a loss-curve plot (needs matplotlib)")

    p_compare = sub.add_parser("compare", help="compare a manifest against the built-in reference values")
    p_compare.add_argument("--manifest", required=True)

    return parser


def _cmd_audit(args) -> int:
    if args.fixture:
        report = expman.audit_fixture(args.task, args.out, args.seed)
    else:
        split_paths = {
            name: getattr(args, name)
            for name in ("train", "dev", "test")
            if getattr(args, name)
        }
        if not split_paths:
            print("audit needs --fixture or at least one of --train/--dev/--test", file=sys.stderr)
            return 1
        report = expman.audit_dataset(args.task, split_paths)
    sys.stdout.write(report.render())
    return 0 if report.passed else 1


def _cmd_run(args) -> int:
    manifest = expman.run(args.config, args.out, args.task, args.seed)
    sys.stdout.write(expman.render_results_table(manifest))
    print(f"manifest: {manifest.artifacts['manifest']}")
    return 0


def _cmd_score(args) -> int:
    if args.config:
        manifest = expman.run(args.config, args.out, args.task, args.seed)
        sys.stdout.write(expman.render_results_table(manifest))
        return 0
    if not (args.task and args.gold and args.pred):
        print("score needs --config, or --task with --gold and --pred", file=sys.stderr)
        return 1
    result = metrics.score_files(args.gold, args.pred, get_task(args.task).labels)
    sys.stdout.write(metrics.format_report(result))
    return 0


def _cmd_report(args) -> int:
    manifest = expman.load_manifest(args.manifest)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tables = out / "results.txt"
    tables.write_text(expman.render_results_table(manifest), encoding="utf-8")
    written = [str(tables)]
    if manifest.extras.get("loss_curves"):
        curve_path = expman.emit_loss_curves(manifest, out / "loss_curves.csv")
        written.append(str(curve_path))
        if args.plot:
            written.append(str(expman.plot_loss_curves(manifest, out / "loss_curves.png")))
    print("\n".join(written))
    return 0


def _cmd_compare(args) -> int:
    manifest = expman.load_manifest(args.manifest)
    table = expman.compare_to_reference(manifest)
    sys.stdout.write(table.render())
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "audit": _cmd_audit,
        "train": _cmd_run,
        "sweep": _cmd_run,
        "search": _cmd_run,
        "probe": _cmd_run,
        "score": _cmd_score,
        "report": _cmd_report,
        "compare": _cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SkewkitError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
