"""Command-line entry point: ``funcad {simulate,fit,score,bench,plot}``.

Exit codes: 0 success, 1 usage or input error, 2 benchmark finished with failed cells.
The thread count comes from ``--threads``, else ``FUNCAD_THREADS``, else 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bench import BenchConfig, run_bench, write_report
from .core import (ContractError, DimensionError, ExtrapolationError, FormatError, ParseError,
                   load_csv, load_labels, write_vector)
from .detectors import REGISTRY, Detector, make_detector
from .featuremaps import fom_features, ms_features, write_scatter
from .filtering import fpca_fit, fpca_transform
from .simulate import MODELS, SimulationConfig
from .svg import scatter_svg

THREADS_ENV = "FUNCAD_THREADS"
EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2
INPUT_ERRORS = (ContractError, DimensionError, ExtrapolationError, FormatError, ParseError,
                OSError, KeyError, TypeError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _threads(value: int | None) -> int:
    if value is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return 1
        try:
            value = int(raw)
        except ValueError as exc:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise UsageError(f"thread count must be >= 1, got {value}")
    return value


def _fraction(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"fraction must lie in (0, 1), got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="curves CSV, one curve per row")
    p.add_argument("--grid-mode", default="header-row", choices=["uniform", "header-row", "sidecar-file"],
                   help="where the sampling grid comes from (default: first row of the file)")
    p.add_argument("--grid-file", help="grid CSV for --grid-mode sidecar-file")


def _load_data(args):
    return load_csv(args.data, args.grid_mode, args.grid_file)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="funcad", description="Anomaly detection for functional data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="write a contaminated synthetic dataset")
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--fraction", type=_fraction, default=0.05)
    p.add_argument("--n", type=_positive_int, default=400)
    p.add_argument("--p", type=_positive_int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--base", choices=["smooth-random", "ar-noise"])
    p.add_argument("--out", default="sim", help="output stem: <stem>_curves.csv, _labels.csv, _provenance.json")

    p = sub.add_parser("fit", help="fit a detector and save its model document")
    p.add_argument("--detector", required=True, choices=sorted(REGISTRY))
    _data_args(p)
    p.add_argument("--params", default="{}", help="JSON object overriding detector parameters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--model", required=True, help="output model JSON")

    p = sub.add_parser("score", help="score curves with a saved model")
    p.add_argument("--model", required=True)
    _data_args(p)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; scoring is deterministic")
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="scores CSV (default: stdout)")

    p = sub.add_parser("bench", help="run a benchmark config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--alpha", type=_fraction, help="overrides the flagged fraction")
    p.add_argument("--out", help="overrides the output directory")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("plot", help="2-D embedding scatter (SVG and CSV)")
    _data_args(p)
    p.add_argument("--labels")
    p.add_argument("--map", default="ms", choices=["ms", "fom", "fpca"])
    p.add_argument("--base", default="tukey", choices=["tukey", "projection", "asym_projection"])
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; embeddings are deterministic")
    p.add_argument("--out", required=True, help="output SVG")
    p.add_argument("--csv", help="also write the scatter data here")
    return parser


def cmd_simulate(args) -> int:
    kw = {} if args.base is None else {"base": args.base}
    cfg = SimulationConfig(args.model, args.fraction, args.n, args.p, args.seed, **kw)
    data = cfg.build()
    paths = data.save(args.out)
    print(f"wrote {', '.join(map(str, paths))} ({int(np.sum(data.labels == 1))} anomalies)")
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--params is not valid JSON: {exc}") from exc
    if not isinstance(params, dict):
        raise UsageError("--params must be a JSON object")
    det = make_detector(args.detector, params, seed=args.seed, n_jobs=_threads(args.threads))
    det.fit(_load_data(args))
    with open(args.model, "w", encoding="utf-8") as fh:
        json.dump(det.to_dict(), fh, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.model}")
    return EXIT_OK


def cmd_score(args) -> int:
    doc = json.loads(Path(args.model).read_text(encoding="utf-8"))
    det = Detector.from_dict(doc)
    det.n_jobs = _threads(args.threads)
    scores = det.score(_load_data(args))
    if args.out:
        write_vector(scores, args.out)
    else:
        for s in scores:
            print(repr(float(s)))
    return EXIT_OK


def cmd_bench(args) -> int:
    threads = _threads(args.threads)
    cfg = BenchConfig.load(args.config)
    doc = cfg.to_dict()
    for key, val in (("seed", args.seed), ("alpha", args.alpha), ("output", args.out)):
        if val is not None:
            doc[key] = val
    cfg = BenchConfig.from_dict(doc, cfg.base_dir)
    report, loaded = run_bench(cfg, threads)
    out = Path(cfg.output) if args.out else cfg.base_dir / cfg.output
    write_report(report, loaded, out)
    for c in report.cells:
        if c.status == "ok":
            m = c.metrics
            print(f"{c.dataset:16s} {c.detector:16s} auc={m['auc']:.3f} ap={m['ap']:.3f} "
                  f"f1={m['f1']:.3f} p_c={m['p_c']:.3f}")
        else:
            print(f"{c.dataset:16s} {c.detector:16s} FAILED {c.error}")
    print(f"report written to {out}")
    return EXIT_PARTIAL if report.failed else EXIT_OK


def cmd_plot(args) -> int:
    ds = _load_data(args)
    labels = None if args.labels is None else load_labels(args.labels, ds.n)
    if args.map == "ms":
        pts, axes = ms_features(ds, args.base), ("MO", "VO")
    elif args.map == "fom":
        pts, axes = fom_features(ds, args.base), ("MO", "sqrt(VO) / (1 + MO)")
    else:
        pts, axes = fpca_transform(fpca_fit(ds, 2), ds), ("score 1", "score 2")
    title = args.map.upper() if args.map == "fpca" else f"{args.map.upper()} ({args.base})"
    Path(args.out).write_text(scatter_svg(pts, labels, title, *axes), encoding="utf-8")
    if args.csv:
        write_scatter(args.csv, pts, labels)
    print(f"wrote {args.out}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "score": cmd_score,
            "bench": cmd_bench, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"funcad: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as exc:
        print(f"funcad: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
