"""Protocol for interchangeable assignment engines."""

from __future__ import annotations

from typing import Protocol

from andermeans.model.types import Assignment, CentroidSet, Dataset


class AssignmentEngine(Protocol):
    """Nearest-centroid assignment with cost counters."""

    name: str
    full_scans: int
    distance_evaluations: int

    def __call__(self, data: Dataset, cents: CentroidSet) -> Assignment:
        ...
