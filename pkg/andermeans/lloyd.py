"""Lloyd's algorithm as a fixed-point iteration C -> G(C)."""

from __future__ import annotations

import time

import numpy as np

from andermeans import logger
from andermeans.assign import AssignmentEngine, make_engine
from andermeans.config import EmptyClusterPolicy, SolverConfig
from andermeans.errors import InvalidInputError
from andermeans.model.energy import assigned_squared_distances, check_compatible, energy
from andermeans.model.types import Assignment, CentroidSet, Dataset, Energy
from andermeans.parallel import resolve_workers
from andermeans.solver_report import SolverReport

__all__ = [
    "EmptyClusterPolicy",
    "SolverConfig",
    "g_map",
    "lloyd_solve",
    "update_step",
]


def update_step(
    data: Dataset,
    assign: Assignment,
    prev: CentroidSet,
    policy: EmptyClusterPolicy = EmptyClusterPolicy.KEEP_PREVIOUS,
) -> CentroidSet:
    """Cluster means; empty clusters follow `policy`."""
    check_compatible(data, assign, prev)
    k = prev.k
    # bincount accumulates in sample order, one dimension at a time.
    sums = np.stack(
        [np.bincount(assign.labels, weights=data.points[:, j], minlength=k) for j in range(data.dim)],
        axis=1,
    )
    counts = assign.counts
    centers = np.array(prev.centers, copy=True)
    filled = counts > 0
    centers[filled] = sums[filled] / counts[filled, None]

    empty = np.flatnonzero(~filled)
    if empty.size and EmptyClusterPolicy(policy) is EmptyClusterPolicy.RESEED_FARTHEST:
        spread = assigned_squared_distances(data, assign, prev)
        # Farthest first; equal distances keep sample order.
        farthest = np.argsort(-spread, kind="stable")
        for cluster, sample in zip(empty, farthest):
            centers[cluster] = data.points[sample]
            logger.debug(f"Reseeded empty cluster {cluster} at sample {sample}")
    return CentroidSet(centers)


def g_map(
    data: Dataset,
    cents: CentroidSet,
    engine: AssignmentEngine,
    policy: EmptyClusterPolicy = EmptyClusterPolicy.KEEP_PREVIOUS,
) -> tuple[CentroidSet, Assignment]:
    """One assignment step followed by one update step; the assignment is
    returned for reuse."""
    assign = engine(data, cents)
    return update_step(data, assign, cents, policy), assign


def check_initial(data: Dataset, init: CentroidSet) -> None:
    if init.k > data.n:
        raise InvalidInputError(f"K = {init.k} exceeds the number of samples N = {data.n}")
    init.check_pairs_with(data)


def lloyd_solve(data: Dataset, init: CentroidSet, cfg: SolverConfig | None = None) -> SolverReport:
    """Iterate g_map until two consecutive assignments agree or max_iters.

    totalIters counts assignment passes. A plain iterate that is bit-identical
    to its predecessor has, necessarily, the same assignment, so that pass is
    skipped and convergence declared directly.
    """
    cfg = cfg or SolverConfig()
    check_initial(data, init)
    workers = resolve_workers(cfg.workers)
    engine = make_engine(cfg.engine, workers)

    started = time.perf_counter()
    cents = init
    prev_assign: Assignment | None = None
    trace: list[Energy] = []
    centroid_trace: list[CentroidSet] = []
    converged = False
    t = 0
    assign: Assignment | None = None
    current: Energy | None = None
    evaluated = init

    while t < cfg.max_iters:
        assign = engine(data, cents)
        t += 1
        evaluated = cents
        if cfg.record_centroids:
            centroid_trace.append(cents)
        current = energy(data, assign, cents, workers)
        trace.append(current)
        logger.get_logger().iteration("lloyd", t, current.total)
        if assign.same_labels(prev_assign):
            converged = True
            break

        nxt = update_step(data, assign, cents, cfg.empty_cluster_policy)
        if nxt.same_as(cents):
            converged = True
            break
        prev_assign = assign
        cents = nxt

    elapsed = time.perf_counter() - started
    report = SolverReport(
        total_iters=t,
        accepted_iters=t,
        energy_trace=trace,
        final_energy=current,
        final_centroids=evaluated,
        final_assignment=assign,
        elapsed_seconds=elapsed,
        converged=converged,
        centroid_trace=centroid_trace,
        full_scans=engine.full_scans,
        distance_evaluations=engine.distance_evaluations,
    )
    logger.get_logger().solve_finished("lloyd", t, t, current.mse, elapsed, converged)
    return report
