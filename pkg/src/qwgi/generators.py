"""Small graph constructions used by tests, demos and the acceptance suite."""

from __future__ import annotations

import itertools

import numpy as np

from qwgi.graph import Graph


def empty(n: int) -> Graph:
    return Graph.from_edges(n, [])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def star(leaves: int) -> Graph:
    """K_{1,leaves} with the centre at vertex 0."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = [], 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges())
        offset += g.n
    return Graph.from_edges(offset, edges)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def rook_graph(m: int = 4) -> Graph:
    """The m x m rook's graph, i.e. the line graph of K_{m,m}."""
    cells = [(r, c) for r in range(m) for c in range(m)]
    edges = [
        (i, j)
        for i, j in itertools.combinations(range(len(cells)), 2)
        if cells[i][0] == cells[j][0] or cells[i][1] == cells[j][1]
    ]
    return Graph.from_edges(len(cells), edges)


def shrikhande() -> Graph:
    """Cayley graph of Z4 x Z4 with connection set +-(1,0), +-(0,1), +-(1,1)."""
    conn = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    cells = [(a, b) for a in range(4) for b in range(4)]
    edges = [
        (i, j)
        for i, j in itertools.combinations(range(16), 2)
        if ((cells[j][0] - cells[i][0]) % 4, (cells[j][1] - cells[i][1]) % 4) in conn
    ]
    return Graph.from_edges(16, edges)


def _symplectic_quadrangle(q: int):
    """Points and totally isotropic lines of W(q) inside PG(3, q), q prime."""
    points = []
    for v in itertools.product(range(q), repeat=4):
        if any(v) and next(x for x in v if x) == 1:
            points.append(v)

    def form(x, y):
        return (x[0] * y[1] - x[1] * y[0] + x[2] * y[3] - x[3] * y[2]) % q

    n = len(points)
    perp = [[j for j in range(n) if j != i and form(points[i], points[j]) == 0] for i in range(n)]
    lines = set()
    for i in range(n):
        pi = set(perp[i])
        for j in perp[i]:
            if j > i:
                lines.add(frozenset([i, j] + [x for x in perp[j] if x in pi]))
    return n, perp, sorted(lines, key=sorted)


def gq_pair(q: int = 3) -> tuple[Graph, Graph]:
    """Point graph and line graph of the symplectic quadrangle GQ(q, q).

    Both are SRG((q+1)(q^2+1), q(q+1), q-1, q+1); for odd prime q they are
    non-isomorphic (the dual of W(q) is Q(4, q)).
    """
    n, perp, lines = _symplectic_quadrangle(q)
    points = Graph.from_edges(n, [(i, j) for i in range(n) for j in perp[i] if i < j])
    line_edges = [
        (a, b)
        for a, b in itertools.combinations(range(len(lines)), 2)
        if lines[a] & lines[b]
    ]
    return points, Graph.from_edges(len(lines), line_edges)


def random_graph(n: int, p: float, rng: np.random.Generator, min_edges: int = 0) -> Graph:
    """Erdos-Renyi G(n, p), resampled until it has at least ``min_edges`` edges."""
    pairs = list(itertools.combinations(range(n), 2))
    while True:
        mask = rng.random(len(pairs)) < p
        edges = [e for e, keep in zip(pairs, mask) if keep]
        if len(edges) >= min_edges:
            return Graph.from_edges(n, edges)


def random_regular(n: int, d: int, rng: np.random.Generator, max_tries: int = 1000) -> Graph:
    """Uniform-ish random d-regular simple graph by configuration-model rejection."""
    if (n * d) % 2:
        raise ValueError("n * d must be even")
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        key = set()
        ok = True
        for u, v in pairs.tolist():
            e = (min(u, v), max(u, v))
            if e in key:
                ok = False
                break
            key.add(e)
        if ok:
            return Graph.from_edges(n, key)
    raise RuntimeError(f"no simple {d}-regular graph on {n} vertices after {max_tries} tries")


def random_sparse(n: int, k: int, rng: np.random.Generator) -> Graph:
    """Random simple graph with exactly ``k`` edges, sampled without replacement."""
    edges: set[tuple[int, int]] = set()
    while len(edges) < k:
        need = k - len(edges)
        u = rng.integers(0, n, size=2 * need)
        v = rng.integers(0, n, size=2 * need)
        for a, b in zip(u.tolist(), v.tolist()):
            if a != b:
                edges.add((min(a, b), max(a, b)))
                if len(edges) == k:
                    break
    return Graph.from_edges(n, edges)
