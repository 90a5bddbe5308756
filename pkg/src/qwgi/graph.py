"""Simple undirected graphs, their on-disk formats, and distance partitions.

Vertices are dense integers ``0..n-1``. Graphs are immutable; every
transformation returns a new :class:`Graph`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

# Largest order the 8-byte graph6 header can describe.
GRAPH6_MAX_N = 68719476735


class GraphError(ValueError):
    """Raised for structurally invalid graphs or malformed edge-list input."""


class Graph6Error(ValueError):
    """Raised when a graph6 record cannot be decoded."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph stored as sorted neighbour tuples."""

    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.adjacency)
        for v, nbrs in enumerate(self.adjacency):
            prev = -1
            for u in nbrs:
                if not 0 <= u < n:
                    raise GraphError(f"neighbour {u} of vertex {v} out of range")
                if u == v:
                    raise GraphError(f"self-loop at vertex {v}")
                if u <= prev:
                    raise GraphError(f"neighbours of vertex {v} not strictly sorted")
                prev = u
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if v not in self._neighbour_set(u):
                    raise GraphError(f"adjacency not symmetric for edge {v}-{u}")

    def _neighbour_set(self, v: int) -> frozenset[int]:
        cache = self.__dict__.get("_nbr_sets")
        if cache is None:
            cache = tuple(frozenset(a) for a in self.adjacency)
            object.__setattr__(self, "_nbr_sets", cache)
        return cache[v]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def from_adjacency_matrix(cls, matrix) -> "Graph":
        a = np.asarray(matrix, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphError("adjacency matrix must be square")
        if not np.array_equal(a, a.T):
            raise GraphError("adjacency matrix must be symmetric")
        if a.diagonal().any():
            raise GraphError("adjacency matrix has self-loops")
        return cls(tuple(tuple(int(u) for u in np.flatnonzero(row)) for row in a))

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @property
    def k(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbour_set(u)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Undirected edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges():
            a[u, v] = a[v, u] = True
        return a

    def distances(self, source: int) -> list[int]:
        """BFS distances from ``source``; ``-1`` marks unreachable vertices."""
        if not 0 <= source < self.n:
            raise GraphError(f"vertex {source} out of range")
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def distance_matrix(self) -> np.ndarray:
        return np.array([self.distances(v) for v in range(self.n)], dtype=np.int64).reshape(
            self.n, self.n
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``0..n-1``; vertex ``v`` is sent to ``map[v]``."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.map)
        object.__setattr__(self, "map", m)
        if sorted(m) != list(range(len(m))):
            raise GraphError("permutation must contain every index exactly once")

    def __len__(self) -> int:
        return len(self.map)

    def __call__(self, v: int) -> int:
        return self.map[v]

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(tuple(int(x) for x in rng.permutation(n)))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.map)
        for i, j in enumerate(self.map):
            inv[j] = i
        return Permutation(tuple(inv))


def apply_permutation(g: Graph, p: Permutation | Sequence[int]) -> Graph:
    """Relabel ``g`` so that edge ``(u, v)`` becomes ``(p(u), p(v))``."""
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    if len(p) != g.n:
        raise GraphError(f"permutation length {len(p)} does not match n={g.n}")
    return Graph.from_edges(g.n, ((p(u), p(v)) for u, v in g.edges()))


# --- graph6 -----------------------------------------------------------------


def _encode_n(n: int) -> bytes:
    if n < 0 or n > GRAPH6_MAX_N:
        raise GraphError(f"graph6 supports 0 <= n <= {GRAPH6_MAX_N}, got {n}")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])


def write_graph6(g: Graph) -> str:
    """Encode ``g`` as a graph6 record (no header, no trailing newline).

    Orders up to 68719476735 are representable, but the upper-triangle
    bit stream is dense, so memory grows as ``n**2 / 12`` bytes.
    """
    header = _encode_n(g.n)
    n = g.n
    nbits = n * (n - 1) // 2
    bits = np.zeros(nbits + (-nbits) % 6, dtype=np.uint8)
    for u, v in g.edges():
        # column-major upper triangle: pair (i, j), i < j, sits at j(j-1)/2 + i
        bits[v * (v - 1) // 2 + u] = 1
    groups = bits.reshape(-1, 6)
    values = groups @ np.array([32, 16, 8, 4, 2, 1], dtype=np.int64) + 63
    return (header + bytes(values.astype(np.uint8).tolist())).decode("ascii")


def parse_graph6(text: str | bytes) -> Graph:
    """Decode a single graph6 record.

    An optional ``>>graph6<<`` header and surrounding whitespace are ignored.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as exc:
            raise Graph6Error("non-ASCII byte", exc.start) from None
    s = text.strip()
    start = 0
    if s.startswith(">>graph6<<"):
        start = len(">>graph6<<")
    data = s[start:].encode("ascii", errors="replace")
    if not data:
        raise Graph6Error("empty graph6 record", start)
    for i, b in enumerate(data):
        if not 63 <= b <= 126:
            raise Graph6Error(f"byte {b!r} outside printable range 63..126", start + i)

    if data[0] != 126:
        n, pos = data[0] - 63, 1
    elif len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise Graph6Error("truncated 8-byte order header", start + len(data))
        n = 0
        for b in data[2:8]:
            n = (n << 6) | (b - 63)
        pos = 8
    else:
        if len(data) < 4:
            raise Graph6Error("truncated 4-byte order header", start + len(data))
        n = 0
        for b in data[1:4]:
            n = (n << 6) | (b - 63)
        pos = 4

    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    body = data[pos:]
    if len(body) != nbytes:
        raise Graph6Error(
            f"expected {nbytes} data bytes for n={n}, found {len(body)}",
            start + pos + min(len(body), nbytes),
        )
    if nbytes == 0:
        return Graph(tuple(() for _ in range(n)))
    vals = np.frombuffer(body, dtype=np.uint8).astype(np.int64) - 63
    bits = ((vals[:, None] >> np.arange(5, -1, -1)) & 1).reshape(-1)
    if bits[nbits:].any():
        raise Graph6Error("nonzero padding bits", start + pos + nbytes - 1)
    idx = np.flatnonzero(bits[:nbits])
    # invert t = j(j-1)/2 + i
    j = ((1 + np.sqrt(1 + 8 * idx.astype(np.float64))) / 2).astype(np.int64)
    j = np.where(j * (j - 1) // 2 > idx, j - 1, j)
    j = np.where((j + 1) * j // 2 <= idx, j + 1, j)
    i = idx - j * (j - 1) // 2
    return Graph.from_edges(n, zip(i.tolist(), j.tolist()))


# --- edge lists -----------------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse ``"n k"`` followed by ``k`` lines of 0-based ``"u v"`` pairs."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
    if not rows:
        raise GraphError("empty edge list")
    lineno, head = rows[0]
    try:
        n, k = (int(x) for x in head.split())
    except ValueError:
        raise GraphError(f"line {lineno}: expected header 'n k'") from None
    if len(rows) - 1 != k:
        raise GraphError(f"header declares {k} edges, found {len(rows) - 1}")
    edges = []
    for lineno, ln in rows[1:]:
        parts = ln.split()
        try:
            u, v = (int(x) for x in parts)
        except ValueError:
            raise GraphError(f"line {lineno}: expected 'u v'") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {lineno}: vertex out of range for n={n}")
        edges.append((u, v))
    try:
        return Graph.from_edges(n, edges)
    except GraphError as exc:
        raise GraphError(str(exc)) from None


def write_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.k}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


# --- distance partitions --------------------------------------------------------


@dataclass(frozen=True)
class VertexPartition:
    """Vertices grouped by BFS distance from ``source``."""

    source: int
    classes: tuple[frozenset[int], ...]
    unreachable: frozenset[int]


@dataclass(frozen=True)
class EdgePartition:
    """Edges grouped by the distance of their nearer endpoint from ``source``.

    Edges between two unreachable vertices land in ``unreachable``.
    """

    source: int
    classes: tuple[frozenset[tuple[int, int]], ...]
    unreachable: frozenset[tuple[int, int]]


def vertex_partition(g: Graph, v: int) -> VertexPartition:
    dist = g.distances(v)
    depth = max(dist) + 1
    classes = [set() for _ in range(depth)]
    for u, d in enumerate(dist):
        if d >= 0:
            classes[d].add(u)
    return VertexPartition(
        v,
        tuple(frozenset(c) for c in classes),
        frozenset(u for u, d in enumerate(dist) if d < 0),
    )


def edge_partition(g: Graph, v: int) -> EdgePartition:
    dist = g.distances(v)
    depth = max(dist) + 1
    classes = [set() for _ in range(depth)]
    unreachable = set()
    for a, b in g.edges():
        da, db = dist[a], dist[b]
        if da < 0 and db < 0:
            unreachable.add((a, b))
        else:
            # one endpoint reachable implies both are
            classes[min(da, db)].add((a, b))
    while classes and not classes[-1]:
        classes.pop()
    return EdgePartition(v, tuple(frozenset(c) for c in classes), frozenset(unreachable))


# --- strongly regular graphs ------------------------------------------------------


class SrgParams(NamedTuple):
    n: int
    d: int
    lam: int
    mu: int


def detect_srg(g: Graph) -> SrgParams | None:
    """Return ``(n, d, lambda, mu)`` if ``g`` is strongly regular, else ``None``.

    Complete and edgeless graphs have no non-adjacent (resp. adjacent)
    pairs; the missing parameter is reported as 0.
    """
    n = g.n
    if n == 0:
        return None
    degs = set(g.degrees())
    if len(degs) != 1:
        return None
    d = degs.pop()
    a = g.adjacency_matrix().astype(np.int64)
    common = a @ a
    off = ~np.eye(n, dtype=bool)
    adj_vals = np.unique(common[a.astype(bool)])
    non_vals = np.unique(common[off & ~a.astype(bool)])
    if len(adj_vals) > 1 or len(non_vals) > 1:
        return None
    lam = int(adj_vals[0]) if len(adj_vals) else 0
    mu = int(non_vals[0]) if len(non_vals) else 0
    return SrgParams(n, d, lam, mu)


# --- gadgets --------------------------------------------------------------------------


def attach_gadget(g: Graph, v: int, length: int = 2) -> Graph:
    """Hang a pendant path of ``length`` new vertices off ``v``.

    New vertices are numbered ``n, n+1, ...`` outward from ``v``; existing
    labels are untouched.
    """
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range")
    if length < 1:
        raise GraphError("gadget length must be at least 1")
    n = g.n
    path = [v] + list(range(n, n + length))
    new_edges = list(zip(path, path[1:]))
    return Graph.from_edges(n + length, list(g.edges()) + new_edges)
