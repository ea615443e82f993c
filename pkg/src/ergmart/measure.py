"""Finite measure spaces, partitions, and monotone filtrations.

On a finite point set every sigma-subalgebra is generated by a partition, so
partitions stand in for subalgebras throughout. A filtration is a monotone
chain of partitions; chains on N points stabilize after at most N-1 strict
steps, which makes the limit stage an exact, computable object.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INCREASING = "increasing"
DECREASING = "decreasing"

__all__ = [
    "MeasureSpace",
    "Partition",
    "Filtration",
    "INCREASING",
    "DECREASING",
    "make_space",
    "uniform_space",
    "refines",
    "partition_join",
    "partition_meet",
    "filtration_limit",
]


@dataclass(frozen=True, eq=False, repr=False)
class MeasureSpace:
    """Points 0..N-1 carrying strictly positive masses."""

    weights: np.ndarray
    total_mass: float = field(init=False)

    def __post_init__(self):
        arr = np.array(self.weights, dtype=float, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("a measure space needs at least one point")
        if not np.all(np.isfinite(arr)):
            raise ValueError("weights must be finite")
        if np.any(arr <= 0.0):
            raise ValueError("weights must be strictly positive")
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)
        object.__setattr__(self, "total_mass", float(np.sum(arr)))

    @property
    def size(self) -> int:
        return int(self.weights.size)

    def __eq__(self, other):
        if not isinstance(other, MeasureSpace):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __repr__(self):
        return f"MeasureSpace(size={self.size}, total_mass={self.total_mass:g})"


def make_space(weights: Sequence[float]) -> MeasureSpace:
    """Build a space from point masses; rejects empty or nonpositive input."""
    return MeasureSpace(np.asarray(weights, dtype=float))


def uniform_space(n: int, total: float = 1.0) -> MeasureSpace:
    """N points of equal mass summing to `total`."""
    if n < 1:
        raise ValueError("n must be positive")
    return MeasureSpace(np.full(n, total / n))


def _canonical_labels(labels: np.ndarray) -> tuple[np.ndarray, int]:
    # relabel by first occurrence so equal partitions share one representation
    uniq, first_idx, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(uniq.size, dtype=np.int64)
    rank[order] = np.arange(uniq.size)
    return rank[inverse].astype(np.int64), int(uniq.size)


@dataclass(frozen=True, eq=False, repr=False)
class Partition:
    """Block labeling of a space; generates the corresponding subalgebra.

    Labels are canonicalized by first occurrence, so two partitions are equal
    exactly when they induce the same blocks, whatever the incoming labels.
    """

    space: MeasureSpace
    block_of: np.ndarray
    block_count: int = field(init=False)

    def __post_init__(self):
        labels = np.array(self.block_of, dtype=np.int64, copy=True).reshape(-1)
        if labels.size != self.space.size:
            raise ValueError("block labeling must cover every point exactly once")
        if labels.size and labels.min() < 0:
            raise ValueError("block labels must be nonnegative")
        canon, count = _canonical_labels(labels)
        canon.setflags(write=False)
        object.__setattr__(self, "block_of", canon)
        object.__setattr__(self, "block_count", count)

    @classmethod
    def singletons(cls, space: MeasureSpace) -> "Partition":
        return cls(space, np.arange(space.size))

    @classmethod
    def whole(cls, space: MeasureSpace) -> "Partition":
        return cls(space, np.zeros(space.size, dtype=np.int64))

    @classmethod
    def from_blocks(cls, space: MeasureSpace, blocks: Iterable[Iterable[int]]) -> "Partition":
        labels = np.full(space.size, -1, dtype=np.int64)
        for k, block in enumerate(blocks):
            for i in block:
                if not 0 <= i < space.size:
                    raise ValueError(f"point {i} outside the space")
                if labels[i] != -1:
                    raise ValueError(f"point {i} assigned to two blocks")
                labels[i] = k
        if np.any(labels < 0):
            raise ValueError("blocks must cover every point")
        return cls(space, labels)

    def blocks(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.block_of == b) for b in range(self.block_count)]

    @property
    def block_masses(self) -> np.ndarray:
        return np.bincount(self.block_of, weights=self.space.weights, minlength=self.block_count)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.block_of, other.block_of)

    def __repr__(self):
        return f"Partition(blocks={self.block_count}, size={self.space.size})"


def _require_same_space(a: Partition, b: Partition, what: str):
    if a.space != b.space:
        raise ValueError(f"{what} requires partitions on the same space")


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every block of `fine` sits inside a single block of `coarse`."""
    _require_same_space(fine, coarse, "refines")
    # representative coarse label per fine block: reversed write keeps the first
    rep = np.empty(fine.block_count, dtype=np.int64)
    rep[fine.block_of[::-1]] = coarse.block_of[::-1]
    return bool(np.array_equal(rep[fine.block_of], coarse.block_of))


def partition_join(a: Partition, b: Partition) -> Partition:
    """Coarsest common refinement: blocks are nonempty pairwise intersections."""
    _require_same_space(a, b, "partition_join")
    keys = a.block_of * np.int64(b.block_count) + b.block_of
    return Partition(a.space, keys)


def partition_meet(a: Partition, b: Partition) -> Partition:
    """Finest common coarsening: connected components of overlapping blocks."""
    _require_same_space(a, b, "partition_meet")
    n = a.space.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for part in (a, b):
        first_of_block: dict[int, int] = {}
        for i, lbl in enumerate(part.block_of):
            j = first_of_block.setdefault(int(lbl), i)
            if j != i:
                union(j, i)
    return Partition(a.space, np.array([find(i) for i in range(n)]))


@dataclass(frozen=True, eq=False, repr=False)
class Filtration:
    """Monotone chain of partitions with its stabilized limit stage.

    `increasing` means later stages refine earlier ones (subalgebras grow);
    `decreasing` is the reverse. The constructor rejects chains that break
    the declared direction, naming the first offending stage.
    """

    space: MeasureSpace
    direction: str
    stages: tuple[Partition, ...]

    def __post_init__(self):
        if self.direction not in (INCREASING, DECREASING):
            raise ValueError(f"direction must be '{INCREASING}' or '{DECREASING}'")
        stages = tuple(self.stages)
        if not stages:
            raise ValueError("a filtration needs at least one stage")
        for k, st in enumerate(stages):
            if st.space != self.space:
                raise ValueError(f"stage {k} lives on a different space")
        for k in range(len(stages) - 1):
            if self.direction == INCREASING:
                ok = refines(stages[k + 1], stages[k])
            else:
                ok = refines(stages[k], stages[k + 1])
            if not ok:
                raise ValueError(
                    f"stage {k + 1} breaks {self.direction} monotonicity "
                    f"(first offending index {k + 1})"
                )
        object.__setattr__(self, "stages", stages)

    @property
    def limit(self) -> Partition:
        return self.stages[-1]

    def __len__(self) -> int:
        return len(self.stages)

    def __repr__(self):
        return f"Filtration({self.direction}, stages={len(self.stages)})"


def filtration_limit(f: Filtration) -> Partition:
    """Stabilized endpoint of the finite chain."""
    return f.limit
