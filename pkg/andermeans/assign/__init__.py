"""Nearest-centroid assignment engines."""

from .bounded import BoundedEngine, BoundsState, assign_bounded, centroid_drift
from .naive import NaiveEngine, assign_naive
from .protocols import AssignmentEngine

__all__ = [
    "AssignmentEngine",
    "BoundedEngine",
    "BoundsState",
    "NaiveEngine",
    "assign_bounded",
    "assign_naive",
    "centroid_drift",
    "make_engine",
]


def make_engine(kind: str, workers: int = 1) -> AssignmentEngine:
    if kind == "bounded":
        return BoundedEngine(workers)
    if kind == "naive":
        return NaiveEngine(workers)
    raise ValueError(f"Unknown assignment engine '{kind}'. Supported engines: bounded, naive.")
