"""Command-line front end.

Every flag can also be set through an environment variable named
``QWGI_<FLAG>`` (upper case, dashes as underscores), e.g. ``QWGI_TOL=1e-9``
or ``QWGI_SCHEME=simple-pi``. Command-line flags take precedence.

Exit codes: ``compare`` returns 0 for NotDistinguished and 1 for
NonIsomorphic; ``find-iso`` returns 0 for Isomorphic, 1 for NonIsomorphic
and 3 for MethodIncomplete; any input or configuration error returns 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from qwgi import plotting
from qwgi.algorithm import Outcome, compare_graphs, comparison_row
from qwgi.graph import GraphError
from qwgi.harness import (
    REPORT_KEYS,
    RunConfig,
    certify_records,
    collision_groups,
    default_jobs,
    read_graphs,
    read_single_graph,
    report_dict,
    run_batch,
)
from qwgi.isofinder import find_isomorphism
from qwgi.qmeasure import detection_curve, detection_rate, measurements_for_accuracy

ENV_PREFIX = "QWGI_"
EXIT_ERROR = 2

log = logging.getLogger("qwgi")


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _env_bool(name: str) -> bool:
    return str(_env(name, "")).lower() in ("1", "true", "yes", "on")


def _steps(text: str) -> int | None:
    if text is None or str(text).lower() == "2n":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("steps must be a positive integer or '2n'")
    return value


def _env_path(name: str) -> Path | None:
    value = _env(name)
    return Path(value) if value else None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=["full", "simple-pi"], default=_env("scheme", "full"))
    p.add_argument("--phi-node", type=float, default=float(_env("phi_node", math.pi / 2)))
    p.add_argument("--phi-cut10", type=float, default=float(_env("phi_cut10", math.pi / 4)))
    p.add_argument("--phi-cut12", type=float, default=float(_env("phi_cut12", math.pi / 8)))
    p.add_argument("--both-orientations", action="store_true", default=_env_bool("both_orientations"),
                   help="phase both di-edges of each cut edge")
    p.add_argument("--no-diagonal", action="store_true", default=_env_bool("no_diagonal"),
                   help="skip reference pairs with v1 == v2")
    p.add_argument("--steps", type=_steps, default=_steps(_env("steps", "2n")), metavar="INT|2n")
    p.add_argument("--tol", type=float, default=float(_env("tol", 1e-8)))
    p.add_argument("--strict", action="store_true", default=_env_bool("strict"))
    p.add_argument("--format", dest="input_format", choices=["graph6", "edgelist"],
                   default=_env("format", "graph6"))
    p.add_argument("--jobs", type=int, default=int(_env("jobs", default_jobs())))
    p.add_argument("--output", choices=["json", "csv"], default=_env("output", "json"))
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--no-timing", action="store_true", default=_env_bool("no_timing"),
                   help="emit null timings so output is byte-reproducible")
    p.add_argument("--plot-dir", type=Path, default=_env_path("plot_dir"),
                   help="also write figures into this directory")


def _config(args) -> RunConfig:
    return RunConfig(
        scheme=args.scheme,
        phi_node=args.phi_node,
        phi_cut10=args.phi_cut10,
        phi_cut12=args.phi_cut12,
        both_orientations=args.both_orientations,
        include_diagonal=not args.no_diagonal,
        steps=args.steps,
        tol=args.tol,
        strict=args.strict,
        jobs=args.jobs,
        input_format=args.input_format,
        output=args.output,
        seed=args.seed,
    )


def _emit_rows(rows: list[dict], columns, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(rows if len(rows) != 1 else rows[0], out, indent=2)
        out.write("\n")
        return
    writer = csv.DictWriter(out, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in row.items()})


def cmd_compare(args, out) -> int:
    cfg = _config(args)
    a = read_single_graph(args.file_a, cfg.input_format)
    b = read_single_graph(args.file_b, cfg.input_format)
    t0 = time.perf_counter()
    report = compare_graphs(a, b, cfg.phase_scheme(), cfg.steps, cfg.tol, cfg.strict, cfg.method, cfg.jobs)
    elapsed = None if args.no_timing else (time.perf_counter() - t0) * 1e3
    row = report_dict(report, str(args.file_a), str(args.file_b), elapsed)
    _emit_rows([row], REPORT_KEYS, cfg.output, out)
    if args.plot_dir and report.traces_a is not None:
        ta, tb = report.traces_a, report.traces_b
        # first off-diagonal reference pair, as in the row maps of the comparison tables
        r = ta.row(0, 1) if a.n > 1 and cfg.include_diagonal else 0
        plotting.plot_comparison_rows(
            comparison_row(ta, r, ta, cfg.tol), comparison_row(ta, r, tb, cfg.tol), a.n,
            args.plot_dir / "comparison_rows.png", title=f"reference pair {tuple(ta.pairs[r].tolist())}",
        )
        plotting.plot_traces(
            np.stack([ta.values[r], tb.values[r]]), args.plot_dir / "traces.png",
            labels=["A", "B"], title=f"trace at reference pair {tuple(ta.pairs[r].tolist())}",
        )
    return 1 if report.verdict is Outcome.NON_ISOMORPHIC else 0


def cmd_certify(args, out) -> int:
    cfg = _config(args)
    records = read_graphs(args.file, cfg.input_format)
    certs = certify_records(records, cfg)
    groups = collision_groups(records, certs)
    partner = {}
    for g in groups:
        for i in g:
            partner[i] = [records[j].line for j in g if j != i]
    rows = []
    for i, (rec, cert) in enumerate(zip(records, certs)):
        if rec.graph is None:
            log.error("line %d: %s", rec.line, rec.error)
            rows.append({"line": rec.line, "n": None, "k": None, "certificate": None,
                         "collides_with": [], "error": rec.error})
        else:
            rows.append({"line": rec.line, "n": rec.graph.n, "k": rec.graph.k, "certificate": cert,
                         "collides_with": partner.get(i, []), "error": None})
    if cfg.output == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
    else:
        _emit_rows(rows, ["line", "n", "k", "certificate", "collides_with", "error"], "csv", out)
    if args.plot_dir:
        plotting.plot_certificates(certs, args.plot_dir / "certificates.png", title=str(args.file))
    return 0


def cmd_batch(args, out) -> int:
    cfg = _config(args)
    report = run_batch(args.file, cfg)
    for w in report.warnings:
        log.warning(w)
    if cfg.output == "json":
        json.dump(report.to_dict(timing=not args.no_timing), out, indent=2)
        out.write("\n")
    else:
        _emit_rows(report.comparisons, ["a", "b", "certificate", "cross_matches", "verdict", "evidence"],
                   "csv", out)
    if args.plot_dir:
        plotting.plot_certificates(report.certificates, args.plot_dir / "certificates.png", title=str(args.file))
    return 0


def cmd_find_iso(args, out) -> int:
    cfg = _config(args)
    a = read_single_graph(args.file_a, cfg.input_format)
    b = read_single_graph(args.file_b, cfg.input_format)
    t0 = time.perf_counter()
    result = find_isomorphism(a, b, cfg.phase_scheme(), cfg.steps, cfg.tol, cfg.strict, cfg.method, cfg.jobs)
    row = {"graph_a": str(args.file_a), "graph_b": str(args.file_b), "n": a.n, **result.to_dict()}
    row["elapsed_ms"] = None if args.no_timing else round((time.perf_counter() - t0) * 1e3, 3)
    _emit_rows([row], ["graph_a", "graph_b", "n", "outcome", "mapping", "verified", "evidence", "rounds",
                       "elapsed_ms"], cfg.output, out)
    return {Outcome.ISOMORPHIC: 0, Outcome.NON_ISOMORPHIC: 1}.get(result.outcome, 3)


def cmd_qmeasure_demo(args, out) -> int:
    p = args.p if args.p is not None else float(args.n) ** args.c
    if p < 1:
        raise ValueError("p must be at least 1")
    m_max = args.m_max if args.m_max is not None else int(math.ceil(10 * p))
    m, exact, approx = detection_curve(p, m_max)
    w = csv.writer(out, lineterminator="\n")
    header = ["m", "exact", "approx", "difference"]
    mc_at = set()
    if args.trials:
        header += ["monte_carlo", "mc_sigma"]
        mc_at = set(np.unique(np.linspace(0, m_max, min(11, m_max + 1)).astype(int)).tolist())
    w.writerow(header)
    for mi, e, a in zip(m.tolist(), exact.tolist(), approx.tolist()):
        row = [mi, f"{e:.12g}", f"{a:.12g}", f"{e - a:.6e}"]
        if args.trials:
            if mi in mc_at:
                rate = detection_rate(np.full(mi, 1.0 / p), args.trials, args.seed + mi)
                row += [f"{rate:.6g}", f"{math.sqrt(max(e * (1 - e), 0.0) / args.trials):.3g}"]
            else:
                row += ["", ""]
        w.writerow(row)
    if args.target_error is not None:
        if args.p is not None:
            need = measurements_for_accuracy(args.target_error, p, 1.0)
        else:
            need = measurements_for_accuracy(args.target_error, args.n, args.c)
        print(f"# measurements for error <= {args.target_error:g}: {need}", file=sys.stderr)
    if args.plot_dir:
        plotting.plot_detection_curves(m, exact, approx, p, args.plot_dir / "detection_curves.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwgi", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="compare two graphs")
    p.add_argument("file_a", type=Path)
    p.add_argument("file_b", type=Path)
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("certify", help="certificate for every graph6 line of a file")
    p.add_argument("file", type=Path)
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("batch", help="pairwise classification of a graph6 file via certificate prefilter")
    p.add_argument("file", type=Path)
    _add_common(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("find-iso", help="extract and verify an isomorphism")
    p.add_argument("file_a", type=Path)
    p.add_argument("file_b", type=Path)
    _add_common(p)
    p.set_defaults(func=cmd_find_iso)

    p = sub.add_parser("qmeasure-demo", help="exact vs approximate detection curves as CSV")
    p.add_argument("--p", type=float, default=None, help="inverse per-step detection probability")
    p.add_argument("--n", type=int, default=int(_env("n", 10)), help="graph order, used when --p is absent")
    p.add_argument("--c", type=float, default=float(_env("c", 2.0)), help="concentration exponent")
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--trials", type=int, default=int(_env("trials", 0)),
                   help="Monte Carlo trials at 11 sample points (0 disables)")
    p.add_argument("--target-error", type=float, default=None)
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--plot-dir", type=Path, default=_env_path("plot_dir"))
    p.set_defaults(func=cmd_qmeasure_demo)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args, out)
    except (OSError, GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
