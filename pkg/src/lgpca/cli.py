"""Command line entry point: ``lgpca {train,recognize,evaluate,synth}``.

Exit codes: 0 success, 1 processing error, 2 usage error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import load_config
from .errors import LgpcaError
from .evaluation import PUBLISHED_TABLE, format_report, report_json
from . import pipeline, synth


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lgpca", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="build a model library from train/<class>/<crop> images")
    t.add_argument("--config")
    t.add_argument("--input", required=True, help="training directory")
    t.add_argument("--model", required=True, help="output model library file")

    r = sub.add_parser("recognize", help="detect, track and label objects in a frame sequence")
    r.add_argument("--config")
    r.add_argument("--model", required=True)
    r.add_argument("--input", required=True, help="directory of frame_%%06d.pgm|png files")
    r.add_argument("--out", required=True, help="output directory")

    e = sub.add_parser("evaluate", help="score results against ground truth")
    e.add_argument("--results", action="append", default=[],
                   help="results JSONL; repeat together with --truth for more sequences")
    e.add_argument("--truth", action="append", default=[], help="ground-truth JSONL")
    e.add_argument("--rows", help="JSONL of precomputed per-sequence counts")
    e.add_argument("--published", action="store_true",
                   help="report the published benchmark counts")
    e.add_argument("--out", help="report path; JSON goes next to it with a .json suffix")

    s = sub.add_parser("synth", help="generate a seeded synthetic scene")
    s.add_argument("--config")
    s.add_argument("--scenario", required=True, choices=sorted(synth.SCENARIOS))
    s.add_argument("--out", required=True)
    return p


def _evaluate(args, parser) -> None:
    if len(args.results) != len(args.truth):
        parser.error("--results and --truth must be given the same number of times")
    rows = []
    if args.published:
        rows.extend(PUBLISHED_TABLE)
    if args.rows:
        rows.extend(pipeline.rows_from_jsonl(args.rows))
    rows.extend(pipeline.evaluate_files(list(zip(args.results, args.truth))))
    if not rows:
        parser.error("nothing to evaluate: give --results/--truth, --rows or --published")
    report = pipeline.cmd_evaluate(rows)
    text = format_report(report)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if out.suffix == ".json":
            text_path, json_path = out.with_suffix(".txt"), out
        else:
            text_path, json_path = out, out.with_suffix(".json")
        text_path.write_text(text, encoding="utf-8")
        json_path.write_text(report_json(report), encoding="utf-8")


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "train":
            lib = pipeline.cmd_train(load_config(args.config), args.input, args.model)
            print(f"wrote {args.model}: {len(lib.labels)} classes, rank {lib.pca.rank}")
        elif args.command == "recognize":
            records = pipeline.cmd_recognize(load_config(args.config), args.model, args.input,
                                             args.out)
            print(f"processed {len(records)} frames into {args.out}")
        elif args.command == "evaluate":
            _evaluate(args, parser)
        elif args.command == "synth":
            synth.generate(load_config(args.config), args.out, args.scenario)
            print(f"wrote scenario {args.scenario} to {args.out}")
    except (LgpcaError, OSError) as exc:
        print(f"lgpca {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
