"""Euclidean geometry of intervals in (center, log-radius) coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Interval
from .trajectory import Trajectory, check_same_grid


@dataclass(frozen=True)
class MetricReport:
    distance: float
    norm_a: float
    norm_b: float
    inner: float


def distance(a: Interval, b: Interval) -> float:
    return math.hypot(a.center - b.center, a.log_radius - b.log_radius)


def norm(a: Interval) -> float:
    return math.hypot(a.center, a.log_radius)


def inner(a: Interval, b: Interval) -> float:
    return a.center * b.center + a.log_radius * b.log_radius


def metric_report(a: Interval, b: Interval) -> MetricReport:
    return MetricReport(distance(a, b), norm(a), norm(b), inner(a, b))


def node_distances(x: Trajectory, y: Trajectory) -> np.ndarray:
    check_same_grid(x, y)
    xc, xp = x.components()
    yc, yp = y.components()
    return np.hypot(xc - yc, xp - yp)


def sup_distance(x: Trajectory, y: Trajectory) -> float:
    """Largest node-wise distance between two trajectories on one grid."""
    d = node_distances(x, y)
    return float(d.max()) if d.size else 0.0


def check_limit(seq: Sequence[Interval], candidate: Interval, tol: float) -> bool:
    """Heuristic limit test on a finite sequence.

    Passes when the last term is within ``tol`` of ``candidate`` and the
    distances do not grow over the final quarter of the sequence.
    """
    if len(seq) == 0:
        raise ValueError("sequence must be non-empty")
    d = [distance(s, candidate) for s in seq]
    if not d[-1] < tol:
        return False
    tail = d[len(d) - max(1, len(d) // 4):]
    return all(b <= a for a, b in zip(tail, tail[1:]))

