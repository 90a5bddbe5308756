"""Classical model of the connecting-node comparator and its detection statistics.

Two walks are compared by feeding the node amplitudes of ``vA`` and ``vB``
into one extra node, the B side with a pi phase, so equal amplitudes cancel.
Detection is repeated per step; with per-step detection probability ``1/p``
the chance of a first detection within ``m`` steps is geometric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qwgi.walk import DiEdgeIndex, node_amplitude

_SQRT_HALF = 1.0 / math.sqrt(2.0)


def connecting_amplitude(amp_a: complex, amp_b: complex) -> complex:
    """Amplitude arriving at the connecting node: ``(amp_a - amp_b) / sqrt(2)``."""
    return _SQRT_HALF * (amp_a - amp_b)


def connecting_probability(state_a, idx_a: DiEdgeIndex, v_a: int, state_b, idx_b: DiEdgeIndex, v_b: int) -> float:
    """``|amp_A(vA) - amp_B(vB)|**2 / 2`` with node amplitudes as block sums."""
    c = connecting_amplitude(node_amplitude(state_a, idx_a, v_a), node_amplitude(state_b, idx_b, v_b))
    return float(abs(c) ** 2)


@dataclass
class JointSystem:
    """Two walks joined through a connecting node, as a single unit-norm state.

    Each walk carries weight ``1/sqrt(2)``. The transfer moves the component
    of each compared vertex's block along its uniform direction into a
    two-mode register and mixes the modes with a pi-phased beam splitter:
    one output is the connecting node, the other is returned to the walks.
    The whole map is unitary, so :meth:`total_norm` stays 1.
    """

    state_a: np.ndarray
    idx_a: DiEdgeIndex
    v_a: int
    state_b: np.ndarray
    idx_b: DiEdgeIndex
    v_b: int
    connecting: complex = 0.0

    @classmethod
    def join(cls, state_a, idx_a, v_a, state_b, idx_b, v_b) -> "JointSystem":
        return cls(_SQRT_HALF * np.asarray(state_a), idx_a, v_a, _SQRT_HALF * np.asarray(state_b), idx_b, v_b)

    def _uniform_component(self, state, idx, v):
        blk = idx.block(v)
        d = blk.stop - blk.start
        if d == 0:
            return 0.0, blk, d
        return state[blk].sum() / math.sqrt(d), blk, d

    def transfer(self) -> "JointSystem":
        xa, blk_a, da = self._uniform_component(self.state_a, self.idx_a, self.v_a)
        xb, blk_b, db = self._uniform_component(self.state_b, self.idx_b, self.v_b)
        sa, sb = self.state_a.copy(), self.state_b.copy()
        out = connecting_amplitude(xa, xb)
        keep = _SQRT_HALF * (xa + xb)
        # strip the uniform components, park the symmetric output back on A's block
        if da:
            sa[blk_a] -= xa / math.sqrt(da)
            sa[blk_a] += keep / math.sqrt(da)
        if db:
            sb[blk_b] -= xb / math.sqrt(db)
        return JointSystem(sa, self.idx_a, self.v_a, sb, self.idx_b, self.v_b, self.connecting + out)

    @property
    def connecting_probability(self) -> float:
        return float(abs(self.connecting) ** 2)

    def total_norm(self) -> float:
        return float(np.vdot(self.state_a, self.state_a).real + np.vdot(self.state_b, self.state_b).real
                     + abs(self.connecting) ** 2)


@dataclass(frozen=True)
class MeasurementModel:
    """Per-step detection probability ``1/p``; ``p`` itself reads as ``n**c``."""

    p: float
    c: float = 1.0
    m: int = 0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.c < 1:
            raise ValueError("c must be at least 1")
        if self.m < 0:
            raise ValueError("m must be nonnegative")

    @classmethod
    def from_order(cls, n: int, c: float = 1.0, m: int = 0) -> "MeasurementModel":
        return cls(float(n) ** c, c, m)

    @property
    def detection_probability(self) -> float:
        return detection_probability(self.m, self.p)


def detection_probability(m: int, p: float) -> float:
    """Exact probability of at least one detection in ``m`` steps: ``1 - (1 - 1/p)**m``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    if m < 0:
        raise ValueError("m must be nonnegative")
    return -math.expm1(m * math.log1p(-1.0 / p)) if p > 1 else (1.0 if m > 0 else 0.0)


def detection_probability_approx(m: int, p: float) -> float:
    """Large-``p`` approximation ``1 - exp(-m/p)``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    return -math.expm1(-m / p)


def sample_until_detection(probabilities: Sequence[float], seed: int | np.random.Generator | None = None) -> int | None:
    """Index of the first successful Bernoulli trial, or ``None``."""
    probs = np.asarray(probabilities, dtype=float)
    if np.any((probs < 0) | (probs > 1)) or np.any(np.isnan(probs)):
        raise ValueError("probabilities must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    hits = np.flatnonzero(rng.random(len(probs)) < probs)
    return int(hits[0]) if len(hits) else None


def detection_rate(probabilities: Sequence[float], trials: int, seed: int = 0) -> float:
    """Fraction of ``trials`` independent runs that detect at all.

    Trial ``i`` draws from a generator spawned deterministically from ``seed``.
    """
    seeds = np.random.SeedSequence(seed).spawn(trials)
    hits = sum(sample_until_detection(probabilities, np.random.default_rng(s)) is not None for s in seeds)
    return hits / trials


def measurements_for_accuracy(target_error: float, n: int, c: float = 1.0) -> int:
    """Smallest ``m`` with ``(1 - 1/n**c)**m <= target_error``."""
    if target_error >= 1:
        return 0
    if target_error <= 0:
        raise ValueError("target_error must be positive")
    q = 1.0 - 1.0 / float(n) ** c
    if q <= 0:
        return 1
    m = max(0, math.ceil(math.log(target_error) / math.log(q)))
    # guard against rounding in the logarithm ratio
    while m > 0 and q ** (m - 1) <= target_error:
        m -= 1
    while q**m > target_error:
        m += 1
    return m


def detection_curve(p: float, m_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(m, exact, approx)`` for ``m = 0..m_max``."""
    m = np.arange(m_max + 1)
    exact = -np.expm1(m * np.log1p(-1.0 / p)) if p > 1 else (m > 0).astype(float)
    approx = -np.expm1(-m / p)
    return m, exact, approx
