"""Run configuration, file ingestion, certificate prefiltering and batch reports."""

from __future__ import annotations

import logging
import math
import os
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from qwgi.algorithm import (
    DEFAULT_TOL,
    ComparisonReport,
    Outcome,
    PhaseScheme,
    comparison_table,
    trace_table,
    verdict_from_tables,
)
from qwgi.graph import Graph, GraphError, Graph6Error, parse_edge_list, parse_graph6

log = logging.getLogger(__name__)

REPORT_KEYS = (
    "graph_a", "graph_b", "n", "k", "scheme", "steps", "tolerance",
    "certificate_a", "certificate_b", "cross_matches", "self_matches_a",
    "self_matches_b", "verdict", "strict_mode", "elapsed_ms",
)


@dataclass(frozen=True)
class RunConfig:
    scheme: str = "full"
    phi_node: float = math.pi / 2
    phi_cut10: float = math.pi / 4
    phi_cut12: float = math.pi / 8
    both_orientations: bool = False
    include_diagonal: bool = True
    steps: int | None = None  # None means 2n per graph
    tol: float = DEFAULT_TOL
    strict: bool = False
    jobs: int = 1
    input_format: str = "graph6"
    output: str = "json"
    seed: int = 0
    method: str = "bucket"

    def __post_init__(self):
        if self.steps is not None and self.steps < 1:
            raise ValueError("steps must be at least 1")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.input_format not in ("graph6", "edgelist"):
            raise ValueError(f"unknown input format {self.input_format!r}")
        if self.output not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output!r}")
        self.phase_scheme()  # validates angles

    def phase_scheme(self) -> PhaseScheme:
        if self.scheme == "full":
            return PhaseScheme.full(
                phi_node=self.phi_node, phi_cut10=self.phi_cut10, phi_cut12=self.phi_cut12,
                both_orientations=self.both_orientations, include_diagonal=self.include_diagonal,
            )
        if self.scheme == "simple-pi":
            return PhaseScheme.simple_pi(include_diagonal=self.include_diagonal)
        raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class GraphRecord:
    line: int
    graph: Graph | None = None
    error: str | None = None


def read_graphs(path, fmt: str = "graph6") -> list[GraphRecord]:
    """One record per non-blank graph6 line, or a single edge-list graph per file."""
    text = Path(path).read_text()
    if fmt == "edgelist":
        try:
            return [GraphRecord(1, parse_edge_list(text))]
        except GraphError as exc:
            return [GraphRecord(1, error=str(exc))]
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s == ">>graph6<<":
            continue
        try:
            out.append(GraphRecord(lineno, parse_graph6(s)))
        except (Graph6Error, GraphError) as exc:
            out.append(GraphRecord(lineno, error=str(exc)))
    return out


def read_single_graph(path, fmt: str = "graph6") -> Graph:
    records = read_graphs(path, fmt)
    if not records:
        raise GraphError(f"{path}: no graph found")
    first = records[0]
    if first.error:
        raise GraphError(f"{path}:{first.line}: {first.error}")
    return first.graph


def report_dict(report: ComparisonReport, graph_a: str, graph_b: str, elapsed_ms: float | None) -> dict:
    na, nb = report.n
    ka, kb = report.k
    return {
        "graph_a": graph_a,
        "graph_b": graph_b,
        "n": na if na == nb else [na, nb],
        "k": ka if ka == kb else [ka, kb],
        "scheme": report.scheme.kind,
        "steps": report.steps,
        "tolerance": report.tolerance,
        "certificate_a": report.certificate_a,
        "certificate_b": report.certificate_b,
        "cross_matches": report.cross_matches,
        "self_matches_a": report.certificate_a,
        "self_matches_b": report.certificate_b,
        "verdict": report.verdict.value,
        "strict_mode": report.strict,
        "elapsed_ms": None if elapsed_ms is None else round(elapsed_ms, 3),
    }


def _self_table(g: Graph, cfg: RunConfig):
    if g.k == 0:
        return None, None
    tt = trace_table(g, cfg.phase_scheme(), cfg.steps)
    return tt, comparison_table(tt, tt, cfg.tol, cfg.method)


def certify_records(records: list[GraphRecord], cfg: RunConfig) -> list[int | None]:
    """Certificate per record (``None`` for records that failed to parse); order-preserving."""

    def one(rec: GraphRecord):
        if rec.graph is None:
            return None
        _, summary = _self_table(rec.graph, cfg)
        return 0 if summary is None else summary.total

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(one, records))
    return [one(r) for r in records]


def collision_groups(records: list[GraphRecord], certs: list[int | None]) -> list[list[int]]:
    """Indices (into ``records``) sharing order, edge count and certificate; size >= 2 only."""
    buckets: dict[tuple, list[int]] = defaultdict(list)
    for i, (rec, c) in enumerate(zip(records, certs)):
        if rec.graph is not None:
            buckets[(rec.graph.n, rec.graph.k, c)].append(i)
    return sorted((v for v in buckets.values() if len(v) > 1), key=lambda g: g[0])


@dataclass
class BatchReport:
    source: str
    records: list[GraphRecord]
    certificates: list[int | None]
    groups: list[list[int]]
    comparisons: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def not_distinguished(self) -> list[tuple[int, int]]:
        """Line-number pairs that survived direct comparison."""
        return [(c["a"], c["b"]) for c in self.comparisons if c["verdict"] == Outcome.NOT_DISTINGUISHED.value]

    def counts(self) -> dict[str, int]:
        parsed = [r for r in self.records if r.graph is not None]
        total_pairs = len(parsed) * (len(parsed) - 1) // 2
        nd = len(self.not_distinguished)
        return {
            "graphs": len(parsed),
            "errors": len(self.records) - len(parsed),
            "pairs": total_pairs,
            "direct_comparisons": len(self.comparisons),
            "NotDistinguished": nd,
            "NonIsomorphic": total_pairs - nd,
        }

    def to_dict(self, timing: bool = True) -> dict:
        graphs = []
        for rec, cert in zip(self.records, self.certificates):
            entry = {"line": rec.line}
            if rec.graph is None:
                entry["error"] = rec.error
            else:
                entry.update(n=rec.graph.n, k=rec.graph.k, certificate=cert)
            graphs.append(entry)
        return {
            "source": self.source,
            "graphs": graphs,
            "collision_groups": [[self.records[i].line for i in g] for g in self.groups],
            "comparisons": self.comparisons,
            "counts": self.counts(),
            "warnings": self.warnings,
            "timings_ms": ({k: round(v, 3) for k, v in self.timings.items()} if timing else None),
        }


def run_batch(path, cfg: RunConfig) -> BatchReport:
    """Certificates for every graph, then direct comparison inside collision groups only."""
    t0 = time.perf_counter()
    records = read_graphs(path, cfg.input_format)
    report = BatchReport(str(path), records, [], [])
    for rec in records:
        if rec.error:
            report.warnings.append(f"line {rec.line}: {rec.error}")
    orders = {r.graph.n for r in records if r.graph is not None}
    if len(orders) > 1:
        msg = f"mixed graph orders {sorted(orders)}; comparisons restricted to equal-order groups"
        report.warnings.append(msg)
        log.warning(msg)

    t1 = time.perf_counter()
    report.certificates = certify_records(records, cfg)
    t2 = time.perf_counter()
    report.groups = collision_groups(records, report.certificates)

    def compare_group(group: list[int]) -> list[dict]:
        tables = {i: _self_table(records[i].graph, cfg) for i in group}
        rows = []
        for x, i in enumerate(group):
            for j in group[x + 1 :]:
                ti, si = tables[i]
                tj, sj = tables[j]
                if ti is None:
                    outcome, evidence = Outcome.NOT_DISTINGUISHED, "both graphs are edgeless"
                    cross = 0
                else:
                    outcome, evidence, _, _, ab = verdict_from_tables(
                        ti, tj, cfg.tol, cfg.strict, cfg.method, aa=si, bb=sj
                    )
                    cross = None if ab is None else ab.total
                rows.append({
                    "a": records[i].line,
                    "b": records[j].line,
                    "certificate": report.certificates[i],
                    "cross_matches": cross,
                    "verdict": outcome.value,
                    "evidence": evidence,
                })
        return rows

    if cfg.jobs > 1 and len(report.groups) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(compare_group, report.groups))
    else:
        chunks = [compare_group(g) for g in report.groups]
    report.comparisons = [row for rows in chunks for row in rows]
    t3 = time.perf_counter()
    report.timings = {
        "parse": (t1 - t0) * 1e3,
        "certify": (t2 - t1) * 1e3,
        "compare": (t3 - t2) * 1e3,
        "total": (t3 - t0) * 1e3,
    }
    return report


def default_jobs() -> int:
    return os.cpu_count() or 1
