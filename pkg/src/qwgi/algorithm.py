"""Reference-pair phase walks, trace tables, certificates and verdicts.

For every ordered pair of reference vertices ``(v1, v2)`` a walk is run from
the equal superposition with labeling-invariant phases attached around both
references, and the node amplitude at ``v1`` is recorded after each step.
Two graphs are compared through how often these traces coincide, within
each graph and across the pair.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from qwgi.graph import Graph
from qwgi.walk import DiEdgeIndex, PhaseMask, block_sums, build_index, evolve, initial_state

DEFAULT_TOL = 1e-8
# complex128 entries per chunk of simultaneously evolved walks
_CHUNK_ELEMENTS = 1 << 21


class Outcome(str, Enum):
    NON_ISOMORPHIC = "NonIsomorphic"
    NOT_DISTINGUISHED = "NotDistinguished"
    ISOMORPHIC = "Isomorphic"
    METHOD_INCOMPLETE = "MethodIncomplete"


@dataclass(frozen=True)
class PhaseScheme:
    """Which phases are attached around each reference vertex.

    ``full`` phases the reference block (``phi_node``), di-edges leaving a
    neighbour of the reference toward the reference (``phi_cut10``), and
    di-edges leaving a neighbour toward a vertex at distance two
    (``phi_cut12``). ``simple-pi`` adds pi to the two reference blocks only.
    ``none`` adds nothing.
    """

    kind: str = "full"
    phi_node: float = math.pi / 2
    phi_cut10: float = math.pi / 4
    phi_cut12: float = math.pi / 8
    both_orientations: bool = False
    include_diagonal: bool = True

    def __post_init__(self):
        if self.kind not in ("full", "simple-pi", "none"):
            raise ValueError(f"unknown phase scheme {self.kind!r}")
        if self.kind == "full":
            angles = (self.phi_node, self.phi_cut10, self.phi_cut12)
            if any(a == 0 for a in angles):
                raise ValueError("full scheme angles must be nonzero")
            if len(set(angles)) != 3:
                raise ValueError("full scheme angles must be pairwise distinct")

    @classmethod
    def full(cls, **kw) -> "PhaseScheme":
        return cls("full", **kw)

    @classmethod
    def simple_pi(cls, **kw) -> "PhaseScheme":
        return cls("simple-pi", **kw)

    @classmethod
    def none(cls, **kw) -> "PhaseScheme":
        return cls("none", **kw)

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "full":
            d.update(
                phi_node=self.phi_node,
                phi_cut10=self.phi_cut10,
                phi_cut12=self.phi_cut12,
                both_orientations=self.both_orientations,
            )
        d["include_diagonal"] = self.include_diagonal
        return d


def _reference_parts(
    g: Graph, idx: DiEdgeIndex, scheme: PhaseScheme, dist: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Per-reference-vertex phase contributions.

    Returns ``(node, edge)`` of shapes ``(n, n)`` and ``(n, 2k)``: row ``r``
    is what reference vertex ``r`` contributes to the node and di-edge angles.
    """
    n = g.n
    node = np.zeros((n, n))
    edge = np.zeros((n, idx.size))
    if scheme.kind == "none":
        return node, edge
    if scheme.kind == "simple-pi":
        np.fill_diagonal(node, math.pi)
        return node, edge
    np.fill_diagonal(node, scheme.phi_node)
    if dist is None:
        dist = g.distance_matrix()
    d_own = dist[:, idx.owner]
    d_tgt = dist[:, idx.target]
    from_g1 = d_own == 1
    cut10 = from_g1 & (d_tgt == 0)
    cut12 = from_g1 & (d_tgt == 2)
    edge += scheme.phi_cut10 * cut10 + scheme.phi_cut12 * cut12
    if scheme.both_orientations:
        edge += (scheme.phi_cut10 * cut10 + scheme.phi_cut12 * cut12)[:, idx.reverse]
    return node, edge


def build_phase_mask(g: Graph, v1: int, v2: int, scheme: PhaseScheme, idx: DiEdgeIndex | None = None) -> PhaseMask:
    """Phase mask for the reference pair ``(v1, v2)``; overlapping angles add."""
    if not (0 <= v1 < g.n and 0 <= v2 < g.n):
        raise ValueError(f"reference pair ({v1}, {v2}) out of range for n={g.n}")
    idx = idx or build_index(g)
    node, edge = _reference_parts(g, idx, scheme)
    return PhaseMask(node[v1] + node[v2], edge[v1] + edge[v2])


@dataclass(frozen=True)
class AmplitudeTrace:
    values: np.ndarray
    origin: tuple[int, int]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class TraceTable:
    """Traces for every reference pair of one graph, rows in row-major pair order."""

    n: int
    pairs: np.ndarray  # (P, 2)
    values: np.ndarray  # (P, T)

    @property
    def steps(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return len(self.pairs)

    def row(self, v1: int, v2: int) -> int:
        hits = np.flatnonzero((self.pairs[:, 0] == v1) & (self.pairs[:, 1] == v2))
        if not len(hits):
            raise KeyError((v1, v2))
        return int(hits[0])

    def trace(self, v1: int, v2: int) -> AmplitudeTrace:
        return AmplitudeTrace(self.values[self.row(v1, v2)], (v1, v2))

    def __iter__(self):
        for (v1, v2), vals in zip(self.pairs.tolist(), self.values):
            yield AmplitudeTrace(vals, (v1, v2))


def default_steps(g: Graph) -> int:
    return 2 * g.n


def _reference_pairs(n: int, include_diagonal: bool) -> np.ndarray:
    v1, v2 = np.divmod(np.arange(n * n), n)
    pairs = np.stack([v1, v2], axis=1)
    if not include_diagonal:
        pairs = pairs[v1 != v2]
    return pairs


def trace_table(
    g: Graph,
    scheme: PhaseScheme,
    steps: int | None = None,
    jobs: int = 1,
    pairs: np.ndarray | None = None,
) -> TraceTable:
    """Traces of all ordered reference pairs (or of ``pairs`` if given)."""
    steps = default_steps(g) if steps is None else steps
    if steps < 1:
        raise ValueError("steps must be at least 1")
    idx = build_index(g)
    if idx.size == 0:
        raise ValueError("graph has no edges")
    if pairs is None:
        pairs = _reference_pairs(g.n, scheme.include_diagonal)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    node, edge = _reference_parts(g, idx, scheme)
    slot_angle = node[:, idx.owner] + edge

    per_chunk = max(1, _CHUNK_ELEMENTS // idx.size)
    chunks = [pairs[i : i + per_chunk] for i in range(0, len(pairs), per_chunk)]

    def run(chunk: np.ndarray) -> np.ndarray:
        angles = slot_angle[chunk[:, 0]] + slot_angle[chunk[:, 1]]
        mask = PhaseMask(np.zeros(g.n), angles)
        _, rec = evolve(initial_state(idx, (len(chunk),)), idx, steps, mask=mask, observe=chunk[:, 0])
        return rec

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    values = np.concatenate(parts) if parts else np.zeros((0, steps), dtype=complex)
    return TraceTable(g.n, pairs, values)


def amplitude_trace(g: Graph, v1: int, v2: int, scheme: PhaseScheme, steps: int | None = None) -> AmplitudeTrace:
    if not (0 <= v1 < g.n and 0 <= v2 < g.n):
        raise ValueError(f"reference pair ({v1}, {v2}) out of range for n={g.n}")
    table = trace_table(g, scheme, steps, pairs=np.array([[v1, v2]]))
    return AmplitudeTrace(table.values[0], (v1, v2))


def _as_values(t) -> np.ndarray:
    if isinstance(t, (AmplitudeTrace, TraceTable)):
        return t.values
    return np.asarray(t, dtype=np.complex128)


def compare_traces(t1, t2, tol: float = DEFAULT_TOL) -> bool:
    """True iff the traces agree to within ``tol`` (complex modulus) at every step."""
    a, b = _as_values(t1), _as_values(t2)
    if a.shape != b.shape:
        raise ValueError(f"trace lengths differ: {a.shape} vs {b.shape}")
    return bool(np.all(np.abs(a - b) <= tol))


@dataclass(frozen=True, eq=False)
class TableSummary:
    """Match counts of a comparison table between two trace tables.

    ``row_counts[i]`` counts matches of trace ``i`` of the first table among
    all traces of the second; ``col_counts`` is the transpose view.
    """

    total: int
    row_counts: np.ndarray
    col_counts: np.ndarray

    @property
    def row_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.row_counts.tolist()))

    @property
    def col_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.col_counts.tolist()))


def _count_direct(a: np.ndarray, b: np.ndarray, tol: float):
    rows = np.zeros(len(a), dtype=np.int64)
    cols = np.zeros(len(b), dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return rows, cols
    block = max(1, _CHUNK_ELEMENTS // max(1, b.size))
    for i in range(0, len(a), block):
        hit = np.all(np.abs(a[i : i + block, None, :] - b[None, :, :]) <= tol, axis=-1)
        rows[i : i + block] = hit.sum(axis=1)
        cols += hit.sum(axis=0)
    return rows, cols


def _projection_key(values: np.ndarray) -> np.ndarray:
    # unit-l1 complex weights: matching traces have keys within tol of each other
    steps = values.shape[1]
    w = np.exp(1j * 2.399963229728653 * np.arange(steps)) / steps
    return (values @ w).real


def _count_bucketed(a: np.ndarray, b: np.ndarray, tol: float):
    rows = np.zeros(len(a), dtype=np.int64)
    cols = np.zeros(len(b), dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return rows, cols
    ka, kb = _projection_key(a), _projection_key(b)
    scale = max(1.0, float(np.abs(a).max(initial=0)), float(np.abs(b).max(initial=0)))
    slack = tol * 1e-6 + 64 * a.shape[1] * np.finfo(float).eps * scale
    order = np.argsort(kb, kind="stable")
    kb_sorted = kb[order]
    b_sorted = b[order]
    lo = np.searchsorted(kb_sorted, ka - tol - slack, side="left")
    hi = np.searchsorted(kb_sorted, ka + tol + slack, side="right")
    for i in np.flatnonzero(hi > lo):
        cand = b_sorted[lo[i] : hi[i]]
        hit = np.all(np.abs(cand - a[i]) <= tol, axis=1)
        c = int(hit.sum())
        if c:
            rows[i] = c
            np.add.at(cols, order[lo[i] : hi[i]][hit], 1)
    return rows, cols


def comparison_table(traces_a, traces_b, tol: float = DEFAULT_TOL, method: str = "bucket") -> TableSummary:
    """Count matching trace pairs between two trace tables.

    ``method="bucket"`` sorts traces along a fixed linear projection and
    verifies only pairs whose projections lie within ``tol``; it returns
    exactly what ``method="direct"`` (all pairs) returns.
    """
    a, b = _as_values(traces_a), _as_values(traces_b)
    if a.shape[1:] != b.shape[1:]:
        raise ValueError(f"trace lengths differ: {a.shape[1:]} vs {b.shape[1:]}")
    if method == "bucket":
        rows, cols = _count_bucketed(a, b, tol)
    elif method == "direct":
        rows, cols = _count_direct(a, b, tol)
    else:
        raise ValueError(f"unknown comparison method {method!r}")
    return TableSummary(int(rows.sum()), rows, cols)


def comparison_row(traces_a, row: int, traces_b, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Boolean match vector of trace ``row`` of ``traces_a`` against all of ``traces_b``."""
    a, b = _as_values(traces_a), _as_values(traces_b)
    return np.all(np.abs(b - a[row]) <= tol, axis=1)


def certificate(
    g: Graph,
    scheme: PhaseScheme,
    steps: int | None = None,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
) -> int:
    """Total matches in the self-comparison table of ``g`` (0 when edgeless)."""
    if g.k == 0:
        return 0
    tt = trace_table(g, scheme, steps, jobs=jobs)
    return comparison_table(tt, tt, tol).total


@dataclass(eq=False)
class ComparisonReport:
    n: tuple[int, int]
    k: tuple[int, int]
    scheme: PhaseScheme
    steps: int | None
    tolerance: float
    strict: bool
    verdict: Outcome
    evidence: str
    table_aa: TableSummary | None = None
    table_bb: TableSummary | None = None
    table_ab: TableSummary | None = None
    traces_a: TraceTable | None = field(default=None, repr=False)
    traces_b: TraceTable | None = field(default=None, repr=False)

    @property
    def certificate_a(self) -> int | None:
        return None if self.table_aa is None else self.table_aa.total

    @property
    def certificate_b(self) -> int | None:
        return None if self.table_bb is None else self.table_bb.total

    @property
    def cross_matches(self) -> int | None:
        return None if self.table_ab is None else self.table_ab.total


def verdict_from_tables(
    ta: TraceTable, tb: TraceTable, tol: float, strict: bool, method: str = "bucket",
    aa: TableSummary | None = None, bb: TableSummary | None = None,
):
    """Decision rule on precomputed trace tables; returns ``(outcome, evidence, aa, bb, ab)``."""
    aa = aa or comparison_table(ta, ta, tol, method)
    bb = bb or comparison_table(tb, tb, tol, method)
    if aa.total != bb.total:
        return Outcome.NON_ISOMORPHIC, f"certificates differ ({aa.total} vs {bb.total})", aa, bb, None
    ab = comparison_table(ta, tb, tol, method)
    if ab.total != aa.total:
        return (
            Outcome.NON_ISOMORPHIC,
            f"cross-table total {ab.total} differs from self-table total {aa.total}",
            aa, bb, ab,
        )
    if strict:
        if ab.row_multiset != aa.row_multiset:
            return Outcome.NON_ISOMORPHIC, "cross-table row counts differ from A's self-table", aa, bb, ab
        if ab.col_multiset != bb.row_multiset:
            return Outcome.NON_ISOMORPHIC, "cross-table column counts differ from B's self-table", aa, bb, ab
        if aa.row_multiset != bb.row_multiset:
            return Outcome.NON_ISOMORPHIC, "self-table row counts differ", aa, bb, ab
    return Outcome.NOT_DISTINGUISHED, "all table totals agree", aa, bb, ab


def compare_graphs(
    a: Graph,
    b: Graph,
    scheme: PhaseScheme | None = None,
    steps: int | None = None,
    tol: float = DEFAULT_TOL,
    strict: bool = False,
    method: str = "bucket",
    jobs: int = 1,
) -> ComparisonReport:
    """Run the reference-pair walk comparison on two graphs.

    Never reports ``Isomorphic``; see :func:`qwgi.isofinder.find_isomorphism`.
    """
    scheme = scheme or PhaseScheme.full()
    report = ComparisonReport(
        n=(a.n, b.n), k=(a.k, b.k), scheme=scheme, steps=steps, tolerance=tol,
        strict=strict, verdict=Outcome.NOT_DISTINGUISHED, evidence="",
    )
    if a.n != b.n:
        report.verdict, report.evidence = Outcome.NON_ISOMORPHIC, "orders differ"
        return report
    if a.k != b.k:
        report.verdict, report.evidence = Outcome.NON_ISOMORPHIC, "edge counts differ"
        return report
    if a.k == 0:
        report.evidence = "both graphs are edgeless"
        return report
    report.steps = default_steps(a) if steps is None else steps
    ta = trace_table(a, scheme, report.steps, jobs=jobs)
    tb = trace_table(b, scheme, report.steps, jobs=jobs)
    outcome, evidence, aa, bb, ab = verdict_from_tables(ta, tb, tol, strict, method)
    report.verdict, report.evidence = outcome, evidence
    report.table_aa, report.table_bb, report.table_ab = aa, bb, ab
    report.traces_a, report.traces_b = ta, tb
    return report


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    evidence: str
    mapping: tuple[int, ...] | None = None


def _node_amplitude_history(g: Graph, steps: int) -> np.ndarray:
    idx = build_index(g)
    out = np.zeros((steps, g.n), dtype=np.complex128)
    if idx.size == 0:
        return out
    state = initial_state(idx)
    nonempty = idx.degrees > 0
    for t in range(steps):
        state, _ = evolve(state, idx, 1)
        out[t, nonempty] = block_sums(state, idx)
    return out


def _sorted_multiset(values: np.ndarray, tol: float) -> np.ndarray:
    digits = max(0, math.ceil(-math.log10(tol)))
    re, im = np.round(values.real, digits), np.round(values.imag, digits)
    return values[np.lexsort((im, re))]


def naive_compare(a: Graph, b: Graph, steps: int | None = None, tol: float = DEFAULT_TOL) -> Verdict:
    """Phase-free walks on both graphs; compare per-step multisets of node amplitudes."""
    if a.n != b.n:
        return Verdict(Outcome.NON_ISOMORPHIC, "orders differ")
    steps = 2 * a.n if steps is None else steps
    ha, hb = _node_amplitude_history(a, steps), _node_amplitude_history(b, steps)
    for t in range(steps):
        sa, sb = _sorted_multiset(ha[t], tol), _sorted_multiset(hb[t], tol)
        if not np.all(np.abs(sa - sb) <= tol):
            return Verdict(Outcome.NON_ISOMORPHIC, f"node amplitude multisets differ at step {t + 1}")
    return Verdict(Outcome.NOT_DISTINGUISHED, f"node amplitude multisets agree for {steps} steps")


def trace_orbits(table: TraceTable, tol: float = DEFAULT_TOL) -> int:
    """Number of distinct traces, grouping greedily within ``tol``."""
    reps: list[np.ndarray] = []
    for vals in table.values:
        if not any(np.all(np.abs(vals - r) <= tol) for r in reps):
            reps.append(vals)
    return len(reps)

