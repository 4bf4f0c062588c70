"""Sampled boundary-data triples h = (h1, h2, h3) on a time grid.

h1 drives u(0, t), h2 drives u_x(L, t), h3 drives u_xx(L, t).  The intended
data class carries Sobolev indices ((s+1)/3, s/3, (s-1)/3) recorded via s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .grids import TimeGrid, _as_readonly

__all__ = ["BoundaryTriple", "combine"]


@dataclass(frozen=True)
class BoundaryTriple:
    """Three boundary signals sampled on a common TimeGrid."""

    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    tgrid: TimeGrid
    s: float = 0.0

    def __post_init__(self) -> None:
        want = self.tgrid.m + 1
        for name in ("h1", "h2", "h3"):
            arr = _as_readonly(getattr(self, name))
            if arr.shape != (want,):
                raise InvalidArgumentError(f"{name} must have {want} samples, got {arr.shape}")
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, tgrid: TimeGrid, s: float = 0.0) -> "BoundaryTriple":
        z = np.zeros(tgrid.m + 1)
        return cls(z, z.copy(), z.copy(), tgrid, s)

    @classmethod
    def from_callables(
        cls,
        tgrid: TimeGrid,
        f1: Callable[[np.ndarray], np.ndarray],
        f2: Callable[[np.ndarray], np.ndarray],
        f3: Callable[[np.ndarray], np.ndarray],
        s: float = 0.0,
    ) -> "BoundaryTriple":
        t = tgrid.nodes
        as_samples = lambda f: np.broadcast_to(np.asarray(f(t), dtype=float), t.shape).copy()
        return cls(as_samples(f1), as_samples(f2), as_samples(f3), tgrid, s)

    def scaled(self, c: float) -> "BoundaryTriple":
        return BoundaryTriple(c * self.h1, c * self.h2, c * self.h3, self.tgrid, self.s)

    def is_zero(self) -> bool:
        return not (np.any(self.h1) or np.any(self.h2) or np.any(self.h3))


def combine(a: float, h: BoundaryTriple, b: float, g: BoundaryTriple) -> BoundaryTriple:
    """a*h + b*g on a shared time grid."""
    if h.tgrid != g.tgrid:
        raise InvalidArgumentError("boundary triples live on different time grids")
    return BoundaryTriple(
        a * h.h1 + b * g.h1, a * h.h2 + b * g.h2, a * h.h3 + b * g.h3, h.tgrid, h.s
    )
