"""Paired solver comparisons over shared seeds and shared initial centroids."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from andermeans import logger
from andermeans.errors import InvalidInputError, InvariantViolation
from andermeans.harness.datasets import load_dataset
from andermeans.harness.runner import BenchRecord, RunSpec, run, seed_all


@dataclass(frozen=True)
class SolverComparison:
    """One solver against the baseline (the first spec)."""

    solver: str
    baseline: str
    pairs: int
    iteration_wins: int
    time_wins: int
    mean_iteration_reduction: float
    median_iteration_reduction: float
    mean_time_reduction: float


@dataclass
class ComparisonTable:
    solvers: list[str]
    seeds: list[int]
    rows: dict[int, list[BenchRecord]] = field(default_factory=dict)
    comparisons: list[SolverComparison] = field(default_factory=list)
    max_relative_mse_discrepancy: float = 0.0

    @property
    def records(self) -> list[BenchRecord]:
        return [record for seed in self.seeds for record in self.rows[seed]]


def _reduction(baseline: float, other: float) -> float:
    if baseline <= 0:
        return 0.0
    return 1.0 - other / baseline


def _relative_spread(values: list[float]) -> float:
    low, high = min(values), max(values)
    if high == low:
        return 0.0
    return (high - low) / abs(low) if low != 0 else float("inf")


def _unique_ids(specs: list[RunSpec]) -> list[str]:
    ids: list[str] = []
    for spec in specs:
        base = spec.solver_id
        candidate, n = base, 1
        while candidate in ids:
            n += 1
            candidate = f"{base}#{n}"
        ids.append(candidate)
    return ids


def _check_shared(specs: list[RunSpec]) -> None:
    if len(specs) < 2:
        raise InvalidInputError("bench_compare needs at least two run specs")
    first = specs[0]
    for spec in specs[1:]:
        if spec.dataset_key() != first.dataset_key():
            raise InvalidInputError(
                f"All compared runs must use the same dataset: {first.dataset_path} vs {spec.dataset_path}"
            )
        if spec.resolved_seeds() != first.resolved_seeds():
            raise InvalidInputError("All compared runs must use the same seeds")
        if spec.k != first.k:
            raise InvalidInputError(f"All compared runs must use the same k: {first.k} vs {spec.k}")


def compare_records(ids: list[str], seeds: list[int], per_solver: list[list[BenchRecord]]) -> ComparisonTable:
    table = ComparisonTable(solvers=ids, seeds=seeds)
    for seed_idx, seed in enumerate(seeds):
        row = [records[seed_idx] for records in per_solver]
        digests = {record.init_digest for record in row}
        if len(digests) != 1:
            raise InvariantViolation(f"seed {seed}: solvers started from different centroids ({sorted(digests)})")
        table.rows[seed] = row
        table.max_relative_mse_discrepancy = max(
            table.max_relative_mse_discrepancy, _relative_spread([record.mse for record in row])
        )

    baseline = per_solver[0]
    for solver_id, records in zip(ids[1:], per_solver[1:]):
        iter_reductions = [_reduction(b.total_iters, o.total_iters) for b, o in zip(baseline, records)]
        time_reductions = [_reduction(b.elapsed_seconds, o.elapsed_seconds) for b, o in zip(baseline, records)]
        table.comparisons.append(
            SolverComparison(
                solver=solver_id,
                baseline=ids[0],
                pairs=len(records),
                iteration_wins=sum(o.total_iters < b.total_iters for b, o in zip(baseline, records)),
                time_wins=sum(o.elapsed_seconds < b.elapsed_seconds for b, o in zip(baseline, records)),
                mean_iteration_reduction=statistics.fmean(iter_reductions),
                median_iteration_reduction=statistics.median(iter_reductions),
                mean_time_reduction=statistics.fmean(time_reductions),
            )
        )
    return table


def bench_compare(specs: list[RunSpec], jobs: int = 1) -> ComparisonTable:
    """Run every spec from identical initial centroids per seed and aggregate
    wins and reduction ratios against the first spec."""
    _check_shared(specs)
    first = specs[0]
    data = load_dataset(first.dataset_path, first.normalize)
    initial = seed_all(first, data)
    ids = _unique_ids(specs)

    per_solver: list[list[BenchRecord]] = []
    for solver_id, spec in zip(ids, specs):
        logger.info(f"Running {solver_id} on {len(initial)} seed(s)")
        records = run(spec.model_copy(update={"label": solver_id}), data=data, initial=initial, jobs=jobs)
        per_solver.append(records)
    return compare_records(ids, first.resolved_seeds(), per_solver)
