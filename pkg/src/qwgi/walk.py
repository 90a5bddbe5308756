"""Discrete-time coined quantum walk on the directed-edge space of a graph.

Each vertex ``v`` owns a contiguous block of ``deg(v)`` slots, one per
outgoing di-edge, in sorted-neighbour order. All operators act on the last
axis of a state array, so a stack of independent walks (for instance one per
reference pair) can be evolved in a single call. Every operator costs O(k)
per walk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qwgi.graph import Graph


class WalkError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DiEdgeIndex:
    """Slot layout for a graph: ``2k`` slots, vertex-major."""

    n: int
    offsets: np.ndarray  # (n+1,) block boundaries
    owner: np.ndarray  # (2k,) vertex owning each slot
    target: np.ndarray  # (2k,) head of each slot's di-edge
    reverse: np.ndarray  # (2k,) slot of the opposite di-edge
    # derived, for the coin
    block_starts: np.ndarray = field(repr=False)  # starts of non-empty blocks
    block_of_slot: np.ndarray = field(repr=False)  # index into block_starts
    slot_degree: np.ndarray = field(repr=False)  # deg(owner) per slot
    vertex_block: np.ndarray = field(repr=False)  # block index per vertex, -1 if isolated

    @property
    def size(self) -> int:
        return len(self.owner)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def block(self, v: int) -> slice:
        return slice(int(self.offsets[v]), int(self.offsets[v + 1]))


def build_index(g: Graph) -> DiEdgeIndex:
    deg = np.array(g.degrees(), dtype=np.int64)
    offsets = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(deg, out=offsets[1:])
    owner = np.repeat(np.arange(g.n, dtype=np.int64), deg)
    target = np.fromiter(
        (u for nbrs in g.adjacency for u in nbrs), dtype=np.int64, count=int(offsets[-1])
    )
    # slot of (t -> o) is offsets[t] + rank of o among t's neighbours; ranks follow
    # from sorting all slots by (target, owner), which enumerates blocks in order.
    order = np.lexsort((owner, target))
    reverse = np.empty_like(order)
    reverse[order] = np.arange(len(order))
    nonempty = np.flatnonzero(deg > 0)
    block_id = np.full(g.n, -1, dtype=np.int64)
    block_id[nonempty] = np.arange(len(nonempty))
    return DiEdgeIndex(
        n=g.n,
        offsets=offsets,
        owner=owner,
        target=target,
        reverse=reverse,
        block_starts=offsets[nonempty],
        block_of_slot=block_id[owner],
        slot_degree=deg[owner],
        vertex_block=block_id,
    )


@dataclass(frozen=True)
class CoinSpec:
    """Per-block coin with ``diag`` on the diagonal and ``offdiag`` elsewhere.

    ``grover=True`` ignores the two values and uses ``2/d - delta_ij`` for a
    block of size ``d``.
    """

    diag: complex = 0.0
    offdiag: complex = 0.0
    grover: bool = True

    @classmethod
    def symmetric(cls, diag: complex, offdiag: complex) -> "CoinSpec":
        return cls(complex(diag), complex(offdiag), grover=False)

    def block(self, d: int) -> np.ndarray:
        if self.grover:
            return np.full((d, d), 2.0 / d) - np.eye(d)
        return np.full((d, d), self.offdiag, dtype=complex) + (self.diag - self.offdiag) * np.eye(d)

    def check(self, degrees, atol: float = 1e-12) -> None:
        """Raise :class:`WalkError` unless every block size present is unitary."""
        if self.grover:
            return
        a, b = complex(self.diag), complex(self.offdiag)
        for d in sorted({int(x) for x in degrees if x > 0}):
            if abs(abs(a) ** 2 + (d - 1) * abs(b) ** 2 - 1) > atol:
                raise WalkError(f"coin block of size {d} has non-unit column norm")
            if d >= 2:
                cross = a * b.conjugate() + a.conjugate() * b + (d - 2) * abs(b) ** 2
                if abs(cross) > atol:
                    raise WalkError(f"coin block of size {d} has non-orthogonal columns")


GROVER = CoinSpec()


@dataclass(frozen=True)
class PhaseMask:
    """Angles in radians: ``node_phase`` per vertex, ``diedge_phase`` per slot.

    Both may carry leading batch dimensions matching a stack of states.
    """

    node_phase: np.ndarray
    diedge_phase: np.ndarray

    @classmethod
    def zeros(cls, idx: DiEdgeIndex) -> "PhaseMask":
        return cls(np.zeros(idx.n), np.zeros(idx.size))

    def angles(self, idx: DiEdgeIndex) -> np.ndarray:
        node = np.asarray(self.node_phase, dtype=float)
        edge = np.asarray(self.diedge_phase, dtype=float)
        if node.shape[-1] != idx.n or edge.shape[-1] != idx.size:
            raise WalkError(
                f"mask sized ({node.shape[-1]}, {edge.shape[-1]}), index needs ({idx.n}, {idx.size})"
            )
        return node[..., idx.owner] + edge

    def factors(self, idx: DiEdgeIndex) -> np.ndarray:
        return np.exp(1j * self.angles(idx))


def initial_state(idx: DiEdgeIndex, batch: tuple[int, ...] = ()) -> np.ndarray:
    """Equal superposition over all slots."""
    if idx.size == 0:
        raise WalkError("graph has no edges; the walk has an empty state space")
    return np.full(batch + (idx.size,), 1.0 / np.sqrt(idx.size), dtype=np.complex128)


def block_sums(state: np.ndarray, idx: DiEdgeIndex) -> np.ndarray:
    """Sum of amplitudes over each non-empty vertex block."""
    return np.add.reduceat(state, idx.block_starts, axis=-1)


def apply_coin(state: np.ndarray, idx: DiEdgeIndex, coin: CoinSpec = GROVER) -> np.ndarray:
    if state.shape[-1] != idx.size:
        raise WalkError("state length does not match index")
    if idx.size == 0:
        return state.copy()
    spread = block_sums(state, idx)[..., idx.block_of_slot]
    if coin.grover:
        return (2.0 / idx.slot_degree) * spread - state
    coin.check(idx.slot_degree)
    return (coin.diag - coin.offdiag) * state + coin.offdiag * spread


def apply_shift(state: np.ndarray, idx: DiEdgeIndex) -> np.ndarray:
    if state.shape[-1] != idx.size:
        raise WalkError("state length does not match index")
    return state[..., idx.reverse]


def apply_phase(state: np.ndarray, mask: PhaseMask, idx: DiEdgeIndex) -> np.ndarray:
    return state * mask.factors(idx)


def step(
    state: np.ndarray,
    idx: DiEdgeIndex,
    coin: CoinSpec = GROVER,
    mask: PhaseMask | None = None,
) -> np.ndarray:
    """One step: coin, then shift, then the phase mask."""
    out = apply_shift(apply_coin(state, idx, coin), idx)
    if mask is not None:
        out = apply_phase(out, mask, idx)
    return out


def evolve(
    state: np.ndarray,
    idx: DiEdgeIndex,
    steps: int,
    coin: CoinSpec = GROVER,
    mask: PhaseMask | None = None,
    observe: np.ndarray | int | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Run ``steps`` steps; optionally record node amplitudes after each one.

    ``observe`` is a vertex, or an array of vertices broadcast against the
    batch shape of ``state``. Returns ``(final_state, record)`` where
    ``record`` has shape ``batch + (steps,)``.
    """
    coin.check(idx.slot_degree)
    factors = None if mask is None else mask.factors(idx)
    batch = state.shape[:-1]
    record = None
    if observe is not None:
        obs = np.broadcast_to(np.asarray(observe), batch)
        record = np.zeros(batch + (steps,), dtype=np.complex128)
        bid = idx.vertex_block[obs]
        isolated = bid < 0
        bid = np.where(isolated, 0, bid)
    for t in range(steps):
        state = apply_shift(apply_coin(state, idx, coin), idx)
        if factors is not None:
            state = state * factors
        if record is not None:
            sums = block_sums(state, idx)
            vals = np.take_along_axis(sums, bid[..., None], axis=-1)[..., 0]
            record[..., t] = np.where(isolated, 0.0, vals)
    return state, record


def node_amplitude(state: np.ndarray, idx: DiEdgeIndex, v: int) -> complex | np.ndarray:
    """Coherent sum of the amplitudes in vertex ``v``'s slot block."""
    if not 0 <= v < idx.n:
        raise WalkError(f"vertex {v} out of range")
    return state[..., idx.block(v)].sum(axis=-1)


def node_amplitudes(state: np.ndarray, idx: DiEdgeIndex) -> np.ndarray:
    """Node amplitude of every vertex; isolated vertices get 0."""
    out = np.zeros(state.shape[:-1] + (idx.n,), dtype=np.complex128)
    if idx.size:
        out[..., idx.degrees > 0] = block_sums(state, idx)
    return out
