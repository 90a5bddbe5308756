"""Explicit isomorphisms from the walk comparison, by pinning vertices with gadgets.

A vertex is pinned by hanging a pendant path off it. Pinning ``u`` in ``A``
and ``v`` in ``B`` leaves the pair undistinguished only if some isomorphism
can send ``u`` to ``v``; repeating with stacked, mutually distinguishable
gadgets narrows the candidate relation down to a bijection, which is then
checked against the adjacency matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qwgi.algorithm import (
    DEFAULT_TOL,
    Outcome,
    PhaseScheme,
    comparison_table,
    compare_graphs,
    trace_table,
    verdict_from_tables,
)
from qwgi.graph import Graph, attach_gadget


@dataclass(frozen=True)
class Mapping:
    map: tuple[int, ...]
    verified: bool = False


@dataclass
class FinderOutcome:
    outcome: Outcome
    mapping: Mapping | None = None
    evidence: str = ""
    # candidate partners per vertex of A in the last round examined
    relation: dict[int, list[int]] = field(default_factory=dict)
    pinned: list[tuple[int, int]] = field(default_factory=list)
    rounds: int = 0

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "mapping": None if self.mapping is None else list(self.mapping.map),
            "verified": bool(self.mapping and self.mapping.verified),
            "evidence": self.evidence,
            "pinned": [list(p) for p in self.pinned],
            "rounds": self.rounds,
            "relation": {str(u): vs for u, vs in sorted(self.relation.items())},
        }


def verify_mapping(a: Graph, b: Graph, m: Mapping | Sequence[int]) -> bool:
    """True iff ``m`` is a bijection carrying the edges of ``a`` exactly onto those of ``b``."""
    perm = np.asarray(m.map if isinstance(m, Mapping) else m, dtype=np.int64)
    if len(perm) != a.n:
        raise ValueError(f"mapping length {len(perm)} does not match n={a.n}")
    if a.n != b.n or a.k != b.k:
        return False
    if len(perm) and (perm.min() < 0 or perm.max() >= b.n or len(np.unique(perm)) != len(perm)):
        return False
    return bool(np.array_equal(b.adjacency_matrix()[np.ix_(perm, perm)], a.adjacency_matrix()))


def _with_pins(g: Graph, pins: Sequence[int]) -> Graph:
    # the i-th pin gets a path of length 2 + i so stacked pins stay distinguishable
    for i, v in enumerate(pins):
        g = attach_gadget(g, v, 2 + i)
    return g


def candidate_relation(
    a: Graph,
    b: Graph,
    pinned: Sequence[tuple[int, int]] = (),
    scheme: PhaseScheme | None = None,
    steps: int | None = None,
    tol: float = DEFAULT_TOL,
    strict: bool = False,
    method: str = "bucket",
    jobs: int = 1,
) -> dict[int, list[int]]:
    """Free vertices of ``b`` each free vertex of ``a`` may map to, given ``pinned``.

    ``u`` relates to ``v`` when the gadget-extended graphs (existing pins plus a
    fresh pin on ``u`` resp. ``v``) are not distinguished.
    """
    scheme = scheme or PhaseScheme.full()
    base_a = _with_pins(a, [u for u, _ in pinned])
    base_b = _with_pins(b, [v for _, v in pinned])
    length = 2 + len(pinned)
    used_a = {u for u, _ in pinned}
    used_b = {v for _, v in pinned}
    free_a = [u for u in range(a.n) if u not in used_a]
    free_b = [v for v in range(b.n) if v not in used_b]

    def tables(g, verts):
        out = {}
        for v in verts:
            tt = trace_table(attach_gadget(g, v, length), scheme, steps, jobs=jobs)
            out[v] = (tt, comparison_table(tt, tt, tol, method))
        return out

    ta, tb = tables(base_a, free_a), tables(base_b, free_b)
    relation = {}
    for u in free_a:
        tu, su = ta[u]
        relation[u] = [
            v
            for v in free_b
            if su.total == tb[v][1].total
            and verdict_from_tables(tu, tb[v][0], tol, strict, method, aa=su, bb=tb[v][1])[0]
            is Outcome.NOT_DISTINGUISHED
        ]
    return relation


def find_isomorphism(
    a: Graph,
    b: Graph,
    scheme: PhaseScheme | None = None,
    steps: int | None = None,
    tol: float = DEFAULT_TOL,
    strict: bool = False,
    method: str = "bucket",
    jobs: int = 1,
) -> FinderOutcome:
    scheme = scheme or PhaseScheme.full()
    first = compare_graphs(a, b, scheme, steps, tol, strict, method, jobs)
    if first.verdict is Outcome.NON_ISOMORPHIC:
        return FinderOutcome(Outcome.NON_ISOMORPHIC, evidence=first.evidence)
    n = a.n
    if a.k == 0:
        ident = Mapping(tuple(range(n)), verified=True)
        return FinderOutcome(Outcome.ISOMORPHIC, ident, "edgeless graphs of equal order")

    pinned: list[tuple[int, int]] = []
    relation: dict[int, list[int]] = {}
    rounds = 0
    while len(pinned) < n:
        rounds += 1
        relation = candidate_relation(a, b, pinned, scheme, steps, tol, strict, method, jobs)
        free_a = sorted(relation)
        free_b = set(range(n)) - {v for _, v in pinned}
        covered = {v for vs in relation.values() for v in vs}
        lonely = [u for u in free_a if not relation[u]]
        if lonely or covered != free_b:
            what = f"vertex {lonely[0]} of A" if lonely else "some vertex of B"
            if not pinned:
                return FinderOutcome(
                    Outcome.NON_ISOMORPHIC,
                    evidence=f"{what} has no gadget-compatible partner",
                    relation=relation,
                    rounds=rounds,
                )
            return FinderOutcome(
                Outcome.METHOD_INCOMPLETE,
                evidence=f"{what} lost every partner after pinning {pinned}",
                relation=relation,
                pinned=pinned,
                rounds=rounds,
            )
        ambiguous = [u for u in free_a if len(relation[u]) > 1]
        if not ambiguous and len(covered) == len(free_a):
            mapping = dict(pinned)
            mapping.update({u: relation[u][0] for u in free_a})
            return _finish(a, b, mapping, relation, pinned, rounds)
        # pin the most constrained vertex that still has a choice
        u = min(ambiguous or free_a, key=lambda x: (len(relation[x]), x))
        pinned.append((u, relation[u][0]))
    return _finish(a, b, dict(pinned), relation, pinned, rounds)


def _finish(a, b, mapping, relation, pinned, rounds) -> FinderOutcome:
    m = tuple(mapping[u] for u in range(a.n))
    if verify_mapping(a, b, m):
        return FinderOutcome(Outcome.ISOMORPHIC, Mapping(m, True), "mapping verified against adjacency",
                             relation, list(pinned), rounds)
    return FinderOutcome(
        Outcome.METHOD_INCOMPLETE,
        Mapping(m, False),
        "candidate bijection fails the adjacency check",
        relation,
        list(pinned),
        rounds,
    )
