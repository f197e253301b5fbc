from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np


def _unit_scale(hops: np.ndarray) -> np.ndarray:
    return np.ones_like(hops, dtype=np.int64)


@dataclass(frozen=True)
class QpuNetwork:
    """QPUs with fixed capacities and a hop-distance cost hook.

    ``hops[a, b]`` is the path length between QPUs and ``cost_scale`` maps hop
    counts to an e-bit multiplier. Defaults give the homogeneous network where
    every inter-QPU operation costs exactly one e-bit.
    """

    capacities: tuple[int, ...]
    hops: np.ndarray | None = field(default=None, compare=False)
    cost_scale: Callable[[np.ndarray], np.ndarray] = field(default=_unit_scale, compare=False)

    def __post_init__(self) -> None:
        caps = tuple(int(c) for c in self.capacities)
        if not caps:
            raise ValueError("network needs at least one QPU")
        if any(c < 1 for c in caps):
            raise ValueError(f"capacities must be >= 1, got {caps}")
        object.__setattr__(self, "capacities", caps)
        q = len(caps)
        hops = np.ones((q, q), dtype=np.int64) - np.eye(q, dtype=np.int64) if self.hops is None else np.asarray(self.hops)
        if hops.shape != (q, q) or not np.array_equal(hops, hops.T) or np.any(np.diag(hops) != 0):
            raise ValueError("hops must be a symmetric QxQ matrix with zero diagonal")
        object.__setattr__(self, "hops", hops)

    @classmethod
    def homogeneous(cls, count: int, capacity: int) -> "QpuNetwork":
        """``count`` identical QPUs of ``capacity`` qubits each."""
        return cls((capacity,) * count)

    @classmethod
    def parse(cls, text: str) -> "QpuNetwork":
        """Parse ``"4,5"`` (explicit capacities) or ``"3x8"`` (count x capacity)."""
        text = text.strip()
        try:
            if "x" in text:
                count, cap = text.split("x")
                return cls((int(cap),) * int(count))
            return cls(tuple(int(c) for c in text.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad network spec {text!r}: {exc}") from None

    @property
    def qpu_count(self) -> int:
        return len(self.capacities)

    @property
    def n_phys(self) -> int:
        return sum(self.capacities)

    @cached_property
    def weights(self) -> np.ndarray:
        """Per-pair e-bit multiplier, zero on the diagonal."""
        w = np.asarray(self.cost_scale(self.hops), dtype=float)
        w = np.where(self.hops == 0, 0.0, w)
        if np.any(w < 0):
            raise ValueError("cost_scale must be nonnegative")
        if np.all(w == np.round(w)):
            return w.astype(np.int64)
        return w

    def default_row(self) -> np.ndarray:
        """Slots filled QPU by QPU: ``[0]*cap0 + [1]*cap1 + ...``."""
        return np.repeat(np.arange(self.qpu_count), self.capacities)

    def describe(self) -> str:
        return ",".join(str(c) for c in self.capacities)
