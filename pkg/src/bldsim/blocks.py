"""Coordinate block partitions and block-visit schedules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BlockPartition", "Schedule", "make_partition"]


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint index blocks covering {0..dim-1}, every block nonempty."""

    blocks: tuple[np.ndarray, ...]
    dim: int

    def __post_init__(self):
        blocks = tuple(np.asarray(b, dtype=np.intp).ravel() for b in self.blocks)
        if not blocks:
            raise ValueError("partition needs at least one block")
        seen = np.concatenate(blocks)
        if any(b.size == 0 for b in blocks):
            raise ValueError("every block must be nonempty")
        if seen.size != self.dim or not np.array_equal(np.sort(seen), np.arange(self.dim)):
            raise ValueError("blocks must be disjoint and cover all coordinates")
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(int(b.size) for b in self.blocks)

    @property
    def d_max(self) -> int:
        return max(self.sizes)


def make_partition(dim: int, num_blocks: int) -> BlockPartition:
    """Split {0..dim-1} into ``num_blocks`` contiguous blocks.

    Block sizes are floor(dim/num_blocks), with the first dim mod num_blocks
    blocks one element larger.  Deterministic.
    """
    if num_blocks < 1:
        raise ValueError("num_blocks must be at least 1")
    if num_blocks > dim:
        raise ValueError(f"num_blocks ({num_blocks}) exceeds dim ({dim})")
    base, extra = divmod(dim, num_blocks)
    blocks = []
    start = 0
    for i in range(num_blocks):
        size = base + (1 if i < extra else 0)
        blocks.append(np.arange(start, start + size, dtype=np.intp))
        start += size
    return BlockPartition(blocks=tuple(blocks), dim=dim)


@dataclass(frozen=True)
class Schedule:
    """Block selection rule plus per-block step durations.

    Either ``pmf`` (randomized selection) or ``order`` (cyclic visitation) is
    set, never both.  Durations are per block, in simulation-time units.
    """

    durations: np.ndarray
    pmf: np.ndarray | None = None
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        lam = np.asarray(self.durations, dtype=np.float64).ravel()
        if lam.size == 0 or np.any(lam <= 0.0):
            raise ValueError("all block durations must be positive")
        lam = lam.copy()
        lam.setflags(write=False)
        object.__setattr__(self, "durations", lam)
        b = lam.size
        if (self.pmf is None) == (self.order is None):
            raise ValueError("exactly one of pmf (randomized) or order (cyclic) is required")
        if self.pmf is not None:
            p = np.asarray(self.pmf, dtype=np.float64).ravel()
            if p.size != b:
                raise ValueError("pmf length must match the number of blocks")
            if np.any(p <= 0.0):
                raise ValueError("all block probabilities must be strictly positive")
            if abs(float(p.sum()) - 1.0) > 1e-12:
                raise ValueError("block probabilities must sum to 1")
            p = p.copy()
            p.setflags(write=False)
            object.__setattr__(self, "pmf", p)
        else:
            order = tuple(int(i) for i in self.order)
            if sorted(order) != list(range(b)):
                raise ValueError("order must be a permutation of the block indices")
            object.__setattr__(self, "order", order)

    @classmethod
    def randomized(cls, pmf, durations) -> "Schedule":
        return cls(durations=durations, pmf=pmf)

    @classmethod
    def cyclic(cls, order, durations) -> "Schedule":
        return cls(durations=durations, order=tuple(order))

    @classmethod
    def uniform_random(cls, num_blocks: int, duration: float) -> "Schedule":
        """Uniform pmf and a shared duration for every block."""
        return cls.randomized(
            np.full(num_blocks, 1.0 / num_blocks), np.full(num_blocks, duration)
        )

    @classmethod
    def round_robin(cls, num_blocks: int, duration: float) -> "Schedule":
        """Identity-order cyclic schedule with a shared duration."""
        return cls.cyclic(range(num_blocks), np.full(num_blocks, duration))

    @property
    def kind(self) -> str:
        return "randomized" if self.pmf is not None else "cyclic"

    @property
    def num_blocks(self) -> int:
        return self.durations.size

    @property
    def lambda_min(self) -> float:
        return float(self.durations.min())

    @property
    def phi_min(self) -> float:
        if self.pmf is None:
            raise ValueError("phi_min is only defined for randomized schedules")
        return float(self.pmf.min())
