"""Time-indexed interval data shared by the solvers, metrics and I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ExtendedInterval, Interval
from .errors import GridMismatch


@dataclass
class Trajectory:
    """Uniform grid with one interval per node.

    ``lo``/``hi`` are always present.  Solutions of the new calculus also carry
    ``center``/``log_radius`` so that no precision is lost going back and
    forth through ``exp``/``log``.
    """

    grid: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    center: np.ndarray | None = None
    log_radius: np.ndarray | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        n = self.grid.shape[0]
        if self.lo.shape != (n,) or self.hi.shape != (n,):
            raise ValueError("lo/hi must have one entry per grid node")
        if n > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")

    @classmethod
    def from_components(cls, grid, center, log_radius, label="", meta=None):
        center = np.asarray(center, dtype=float)
        log_radius = np.asarray(log_radius, dtype=float)
        w = np.exp(log_radius)
        return cls(grid, center - w, center + w, center, log_radius, label, meta or {})

    @classmethod
    def from_endpoints(cls, grid, lo, hi, label="", meta=None):
        return cls(grid, lo, hi, None, None, label, meta or {})

    def __len__(self):
        return self.grid.shape[0]

    @property
    def is_interval_valued(self) -> bool:
        return self.center is not None

    def components(self):
        """(center, log_radius) arrays; computed from endpoints if needed."""
        if self.center is not None:
            return self.center, self.log_radius
        w = 0.5 * (self.hi - self.lo)
        if np.any(w <= 0):
            raise ValueError("trajectory has zero-width nodes; no log-radius")
        return 0.5 * (self.lo + self.hi), np.log(w)

    @property
    def values(self):
        if self.center is not None:
            return [Interval(float(c), float(p)) for c, p in zip(self.center, self.log_radius)]
        return [ExtendedInterval(float(l), float(h)) for l, h in zip(self.lo, self.hi)]


def check_same_grid(x: Trajectory, y: Trajectory, rtol: float = 1e-12) -> None:
    if x.grid.shape != y.grid.shape:
        raise GridMismatch(f"grid sizes differ: {x.grid.shape[0]} vs {y.grid.shape[0]}")
    if not np.allclose(x.grid, y.grid, rtol=rtol, atol=rtol):
        k = int(np.argmax(np.abs(x.grid - y.grid)))
        raise GridMismatch(f"grids differ at node {k}: {x.grid[k]!r} vs {y.grid[k]!r}")
