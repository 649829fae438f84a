"""Convergence trace returned by every solver."""

from __future__ import annotations

from dataclasses import dataclass, field

from andermeans.errors import InvariantViolation
from andermeans.model.types import Assignment, CentroidSet, Energy

# Relative tolerance on every "energy did not go up" check.
MONOTONE_RTOL = 1e-9


def check_not_increasing(previous: float, current: float, context: str) -> None:
    if current - previous > MONOTONE_RTOL * max(abs(previous), abs(current)):
        raise InvariantViolation(f"{context}: energy rose from {previous!r} to {current!r}")


@dataclass
class SolverReport:
    total_iters: int
    accepted_iters: int
    energy_trace: list[Energy]
    final_energy: Energy
    final_centroids: CentroidSet
    final_assignment: Assignment
    elapsed_seconds: float
    converged: bool
    m_trace: list[int] = field(default_factory=list)
    rejected_iters: list[int] = field(default_factory=list)
    centroid_trace: list[CentroidSet] = field(default_factory=list)
    full_scans: int = 0
    distance_evaluations: int = 0

    def __post_init__(self) -> None:
        if self.accepted_iters > self.total_iters:
            raise InvariantViolation(
                f"accepted iterations ({self.accepted_iters}) exceed total iterations ({self.total_iters})"
            )
        for t in range(1, len(self.energy_trace)):
            check_not_increasing(self.energy_trace[t - 1].total, self.energy_trace[t].total, f"iteration {t + 1}")

    @property
    def rejected_count(self) -> int:
        return self.total_iters - self.accepted_iters
