"""Safeguarded Anderson acceleration of the Lloyd map, with the history depth m
driven by the ratio of consecutive energy decreases.

Every extrapolated iterate is checked against an energy threshold no larger
than the last accepted energy; one that misses it is replaced by a recovery
iterate that meets it, so accepted energies never go up.

The default threshold is the energy the plain Lloyd iterate G(C^{t-1}) reaches
on the previous partition, lowered by guard_margin times the gain of that mean
update. guard = "energy" compares with E^{t-1} instead.
"""

from __future__ import annotations

import math
import time
import warnings
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg import LinAlgError, LinAlgWarning

from andermeans import logger
from andermeans.assign import make_engine
from andermeans.config import AAConfig, SolverConfig
from andermeans.errors import InvalidInputError
from andermeans.lloyd import check_initial, update_step
from andermeans.model.energy import energy
from andermeans.model.types import Assignment, CentroidSet, Dataset, Energy
from andermeans.parallel import resolve_workers
from andermeans.solver_report import SolverReport, check_not_increasing

__all__ = [
    "AAConfig",
    "AcceleratorState",
    "aa_kmeans_solve",
    "adjust_m",
    "extrapolate",
    "guard_threshold",
    "recovery_iterate",
    "solve_theta",
]


def _columns(vectors: Sequence[np.ndarray], length: int, what: str) -> np.ndarray:
    matrix = np.column_stack([np.asarray(v, dtype=np.float64).ravel() for v in vectors])
    if matrix.shape[0] != length:
        raise InvalidInputError(f"{what} vectors have length {matrix.shape[0]}, expected {length}")
    return matrix


def solve_theta(f_current: np.ndarray, delta_f: Sequence[np.ndarray], regularization: float = 1e-10) -> np.ndarray:
    """Least-squares coefficients minimizing ||F^t - sum_j theta_j dF_j||^2.

    Solved through the m x m normal equations with a trace-scaled Tikhonov
    term. A numerically singular system is retried without its oldest
    column(s); dropped columns get a zero coefficient.
    """
    m_t = len(delta_f)
    if m_t == 0:
        raise InvalidInputError("solve_theta needs at least one residual difference (skip extrapolation instead)")
    f = np.asarray(f_current, dtype=np.float64).ravel()
    columns = _columns(delta_f, f.shape[0], "Residual difference")

    theta = np.zeros(m_t)
    for used in range(m_t, 0, -1):
        a = columns[:, :used]
        normal = a.T @ a
        rhs = a.T @ f
        normal[np.diag_indices(used)] += regularization * np.trace(normal) / used
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", LinAlgWarning)
                solution = scipy.linalg.solve(normal, rhs, assume_a="pos")
        except (LinAlgError, LinAlgWarning, ValueError) as exc:
            logger.debug(f"Normal equations singular with {used} column(s): {exc}")
            continue
        if np.all(np.isfinite(solution)):
            theta[:used] = solution
            return theta
    return theta


def extrapolate(g_current: np.ndarray, delta_g: Sequence[np.ndarray], theta: np.ndarray) -> np.ndarray:
    """G^t - sum_j theta_j dG_j."""
    g = np.asarray(g_current, dtype=np.float64).ravel()
    theta = np.asarray(theta, dtype=np.float64).ravel()
    if len(delta_g) != theta.shape[0]:
        raise InvalidInputError(f"{len(delta_g)} iterate differences but {theta.shape[0]} coefficients")
    if theta.shape[0] == 0:
        return g.copy()
    return g - _columns(delta_g, g.shape[0], "Iterate difference") @ theta


def adjust_m(e_now: float, e_prev: float, e_prev_prev: float, m: int, cfg: AAConfig) -> int:
    """Shrink or grow m from r = (E^{t-1} - E^t) / (E^{t-2} - E^{t-1}).

    Left alone when the denominator is non-finite, zero or negative.
    """
    denominator = e_prev_prev - e_prev
    if not math.isfinite(denominator) or denominator <= 0:
        return m
    ratio = (e_prev - e_now) / denominator
    if not math.isfinite(ratio):
        return m
    if ratio < cfg.eps1:
        return max(m - 1, 0)
    if ratio > cfg.eps2:
        return min(m + 1, cfg.m_max)
    return m


@dataclass
class AcceleratorState:
    """History of G-iterates and residuals F = G(C) - C, newest last."""

    m: int
    m_max: int
    g_history: deque[np.ndarray] = field(default_factory=deque)
    f_history: deque[np.ndarray] = field(default_factory=deque)
    prev_energy: float = math.inf
    prev_prev_energy: float = math.inf
    # Energy of the fallback under the partition it was computed from.
    surrogate_energy: float = math.inf
    fallback: CentroidSet | None = None

    @classmethod
    def start(cls, cfg: AAConfig) -> "AcceleratorState":
        return cls(
            m=cfg.m0,
            m_max=cfg.m_max,
            g_history=deque(maxlen=cfg.m_max + 1),
            f_history=deque(maxlen=cfg.m_max + 1),
        )

    def push(self, g: np.ndarray, f: np.ndarray) -> None:
        self.g_history.append(g)
        self.f_history.append(f)

    def clear_history(self) -> None:
        self.g_history.clear()
        self.f_history.clear()

    def usable_depth(self) -> int:
        """m_t: bounded by m and by the differences the history can supply."""
        return max(0, min(self.m, len(self.g_history) - 1))

    def differences(self, depth: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """(dG_j, dF_j) for j = 1..depth, dX_j = X^{t-j+1} - X^{t-j}."""
        delta_g = [self.g_history[-j] - self.g_history[-j - 1] for j in range(1, depth + 1)]
        delta_f = [self.f_history[-j] - self.f_history[-j - 1] for j in range(1, depth + 1)]
        return delta_g, delta_f

    def record_energy(self, accepted: float) -> None:
        self.prev_prev_energy, self.prev_energy = self.prev_energy, accepted


def _next_iterate(state: AcceleratorState, g: CentroidSet, cents: CentroidSet, aa_cfg: AAConfig) -> tuple[CentroidSet, bool]:
    """Extrapolated C^{t+1} and whether it is just the plain Lloyd iterate."""
    g_vec = g.flatten()
    f_vec = g_vec - cents.flatten()
    state.push(g_vec, f_vec)
    depth = state.usable_depth()
    if depth == 0:
        return g, True
    delta_g, delta_f = state.differences(depth)
    theta = solve_theta(f_vec, delta_f, aa_cfg.regularization)
    vec = extrapolate(g_vec, delta_g, theta)
    if not np.all(np.isfinite(vec)):
        logger.debug("Extrapolated iterate is not finite; using the Lloyd iterate")
        return g, True
    nxt = CentroidSet.from_flat(vec, g.k, g.dim)
    return nxt, nxt.same_as(g)


def solver_name(aa_cfg: AAConfig) -> str:
    return "aa-dynamic" if aa_cfg.dynamic else "aa-fixed"


def guard_threshold(state: AcceleratorState, aa_cfg: AAConfig) -> float:
    """Energy a candidate has to get strictly below to be accepted.

    Never above the last accepted energy. Infinite before the first Lloyd
    update, when there is nothing to fall back to.
    """
    if aa_cfg.guard == "energy" or not math.isfinite(state.surrogate_energy):
        return state.prev_energy
    gain = state.prev_energy - state.surrogate_energy
    return min(state.surrogate_energy - aa_cfg.guard_margin * gain, state.prev_energy)


def recovery_iterate(
    data: Dataset,
    assign: Assignment,
    cents: CentroidSet,
    state: AcceleratorState,
    threshold: float,
    cfg: SolverConfig,
    aa_cfg: AAConfig,
    workers: int,
) -> CentroidSet:
    """Replacement for a rejected candidate: the mean update of its partition
    when that alone clears the threshold, the stored Lloyd iterate otherwise."""
    if aa_cfg.salvage:
        salvaged = update_step(data, assign, cents, cfg.empty_cluster_policy)
        if energy(data, assign, salvaged, workers).total < threshold:
            return salvaged
    return state.fallback


def aa_kmeans_solve(
    data: Dataset,
    init: CentroidSet,
    cfg: SolverConfig | None = None,
    aa_cfg: AAConfig | None = None,
) -> SolverReport:
    """Accelerated Lloyd iteration with an energy guard.

    Convergence: a plain Lloyd iterate whose assignment equals the previous
    one. An accelerated iterate that lands on the previous assignment is
    reverted to its Lloyd counterpart first, so the final centroids are
    always the means of their clusters.
    """
    cfg = cfg or SolverConfig()
    aa_cfg = aa_cfg or AAConfig()
    check_initial(data, init)
    workers = resolve_workers(cfg.workers)
    engine = make_engine(cfg.engine, workers)
    state = AcceleratorState.start(aa_cfg)
    name = solver_name(aa_cfg)
    log = logger.get_logger()

    started = time.perf_counter()
    cents = init
    plain = True
    prev_assign: Assignment | None = None
    trace: list[Energy] = []
    m_trace: list[int] = []
    rejected: list[int] = []
    centroid_trace: list[CentroidSet] = []
    converged = False
    t = 0
    assign: Assignment | None = None
    current: Energy | None = None
    evaluated = init

    while t < cfg.max_iters:
        assign = engine(data, cents)
        t += 1
        current = energy(data, assign, cents, workers)

        if plain and assign.same_labels(prev_assign):
            evaluated = cents
            converged = True
        else:
            if aa_cfg.dynamic:
                state.m = adjust_m(current.total, state.prev_energy, state.prev_prev_energy, state.m, aa_cfg)

            # Energy guard on extrapolated iterates; one repeating the previous
            # assignment is reverted too (its Lloyd counterpart is the fixed point).
            threshold = guard_threshold(state, aa_cfg)
            repeated = assign.same_labels(prev_assign)
            if not plain and state.fallback is not None and (current.total >= threshold or repeated):
                log.iteration(name, t, current.total, state.m, accepted=False)
                rejected.append(t)
                if repeated:
                    cents = state.fallback
                else:
                    cents = recovery_iterate(data, assign, cents, state, threshold, cfg, aa_cfg, workers)
                if cents is not state.fallback:
                    logger.debug(f"{name} iteration {t}: recovered with the mean update of the rejected partition")
                assign = engine(data, cents)
                current = energy(data, assign, cents, workers)
                check_not_increasing(state.prev_energy, current.total, f"{name} fallback at iteration {t}")
                if aa_cfg.clear_history_on_reject:
                    state.clear_history()
                converged = cents is state.fallback and assign.same_labels(prev_assign)
            evaluated = cents

        if cfg.record_centroids:
            centroid_trace.append(evaluated)
        trace.append(current)
        m_trace.append(state.m)
        log.iteration(name, t, current.total, state.m)
        if converged:
            break

        state.record_energy(current.total)
        g = update_step(data, assign, cents, cfg.empty_cluster_policy)
        state.surrogate_energy = energy(data, assign, g, workers).total
        nxt, plain = _next_iterate(state, g, cents, aa_cfg)
        state.fallback = g
        if plain and nxt.same_as(cents):
            converged = True
            break
        prev_assign = assign
        cents = nxt

    elapsed = time.perf_counter() - started
    accepted = t - len(rejected)
    report = SolverReport(
        total_iters=t,
        accepted_iters=accepted,
        energy_trace=trace,
        final_energy=current,
        final_centroids=evaluated,
        final_assignment=assign,
        elapsed_seconds=elapsed,
        converged=converged,
        m_trace=m_trace,
        rejected_iters=rejected,
        centroid_trace=centroid_trace,
        full_scans=engine.full_scans,
        distance_evaluations=engine.distance_evaluations,
    )
    log.solve_finished(name, accepted, t, current.mse, elapsed, converged)
    return report
