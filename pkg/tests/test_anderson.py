import itertools
import math
import statistics

import numpy as np
import pytest

from andermeans.anderson import (
    AcceleratorState,
    aa_kmeans_solve,
    adjust_m,
    extrapolate,
    guard_threshold,
    recovery_iterate,
    solve_theta,
)
from andermeans.assign import NaiveEngine
from andermeans.config import AAConfig, EmptyClusterPolicy, SolverConfig
from andermeans.errors import InvalidInputError
from andermeans.lloyd import g_map, lloyd_solve
from andermeans.model import CentroidSet, Dataset
from andermeans.seeding import init_kmeanspp


class TestSolveTheta:
    def test_exact_representation(self):
        np.testing.assert_allclose(solve_theta(np.array([1.0, -2.0, 3.0]), [np.array([1.0, -2.0, 3.0])]), [1.0])

    def test_projection_onto_one_column(self):
        np.testing.assert_allclose(solve_theta(np.array([1.0, 0.0]), [np.array([1.0, 1.0])]), [0.5])

    def test_orthonormal_columns(self):
        theta = solve_theta(np.array([1.0, 1.0]), [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        np.testing.assert_allclose(theta, [1.0, 1.0])

    def test_empty_history_rejected(self):
        with pytest.raises(InvalidInputError):
            solve_theta(np.array([1.0, 2.0]), [])

    def test_length_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            solve_theta(np.array([1.0, 2.0]), [np.array([1.0, 2.0, 3.0])])

    def test_matches_pseudoinverse(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            m_t = int(rng.integers(1, 6))
            length = int(rng.integers(max(4 * m_t, 8), 65))
            columns = rng.normal(size=(length, m_t))
            f = rng.normal(size=length)
            theta = solve_theta(f, list(columns.T))
            expected = np.linalg.pinv(columns) @ f
            assert np.linalg.norm(theta - expected) <= 1e-8 * np.linalg.norm(expected)

    def test_duplicate_columns_still_fit(self):
        column = np.array([1.0, 2.0, -1.0, 0.5])
        f = np.array([0.3, 1.0, 2.0, -1.0])
        theta = solve_theta(f, [column, column.copy()])
        assert np.all(np.isfinite(theta))
        projection = column * (column @ f) / (column @ column)
        np.testing.assert_allclose(np.column_stack([column, column]) @ theta, projection, atol=1e-6)

    def test_zero_column_gets_zero_coefficient(self):
        theta = solve_theta(np.array([1.0, 2.0]), [np.zeros(2)])
        np.testing.assert_array_equal(theta, [0.0])


class TestExtrapolate:
    def test_zero_coefficients(self):
        g = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(extrapolate(g, [np.ones(3), np.arange(3.0)], np.zeros(2)), g)

    def test_unit_coefficient_telescopes(self):
        g_now, g_before = np.array([4.0, 1.0]), np.array([2.5, 3.0])
        np.testing.assert_allclose(extrapolate(g_now, [g_now - g_before], np.array([1.0])), g_before)

    def test_arithmetic(self):
        np.testing.assert_allclose(extrapolate(np.array([4.0]), [np.array([2.0])], np.array([0.5])), [3.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            extrapolate(np.array([4.0]), [np.array([2.0])], np.array([0.5, 0.5]))
        with pytest.raises(InvalidInputError):
            extrapolate(np.array([4.0]), [np.array([2.0, 1.0])], np.array([0.5]))


class TestAdjustM:
    cfg = AAConfig()

    @pytest.mark.parametrize(
        ("e_now", "m", "expected"),
        [
            (8.99, 5, 4),  # r = 0.01
            (8.7, 5, 5),  # r = 0.3
            (8.4, 5, 6),  # r = 0.6
            (8.99, 0, 0),
            (8.4, 30, 30),
        ],
    )
    def test_ratio_thresholds(self, e_now, m, expected):
        assert adjust_m(e_now, 9.0, 10.0, m, self.cfg) == expected

    def test_undefined_ratio_skips(self):
        assert adjust_m(5.0, 6.0, math.inf, 3, self.cfg) == 3
        assert adjust_m(5.0, math.inf, math.inf, 3, self.cfg) == 3

    def test_flat_or_rising_history_skips(self):
        assert adjust_m(5.0, 6.0, 6.0, 3, self.cfg) == 3
        assert adjust_m(5.0, 6.0, 5.5, 3, self.cfg) == 3

    def test_custom_cap(self):
        assert adjust_m(8.4, 9.0, 10.0, 4, AAConfig(m0=2, m_max=4)) == 4


class TestAcceleratorState:
    def test_usable_depth_limited_by_history(self):
        state = AcceleratorState.start(AAConfig(m0=3, m_max=5))
        assert state.usable_depth() == 0
        for i in range(3):
            state.push(np.full(2, float(i)), np.full(2, float(-i)))
        assert state.usable_depth() == 2
        for i in range(10):
            state.push(np.zeros(2), np.zeros(2))
        assert state.usable_depth() == 3
        assert len(state.g_history) == 6

    def test_differences_newest_first(self):
        state = AcceleratorState.start(AAConfig(m0=2))
        for value in (1.0, 4.0, 9.0):
            state.push(np.array([value]), np.array([-value]))
        delta_g, delta_f = state.differences(2)
        np.testing.assert_array_equal(np.concatenate(delta_g), [5.0, 3.0])
        np.testing.assert_array_equal(np.concatenate(delta_f), [-5.0, -3.0])


class TestGuard:
    @staticmethod
    def _state(prev: float, surrogate: float) -> AcceleratorState:
        state = AcceleratorState.start(AAConfig())
        state.prev_energy, state.surrogate_energy = prev, surrogate
        return state

    def test_surrogate_threshold(self):
        assert guard_threshold(self._state(10.0, 8.0), AAConfig()) == 6.0
        assert guard_threshold(self._state(10.0, 8.0), AAConfig(guard_margin=0.5)) == 7.0
        assert guard_threshold(self._state(10.0, 8.0), AAConfig(guard_margin=0.0)) == 8.0

    def test_energy_threshold(self):
        assert guard_threshold(self._state(10.0, 8.0), AAConfig(guard="energy")) == 10.0

    def test_threshold_never_above_last_energy(self):
        assert guard_threshold(self._state(10.0, 10.5), AAConfig()) == 10.0
        assert guard_threshold(self._state(math.inf, math.inf), AAConfig()) == math.inf

    def test_recovery_prefers_mean_update(self, toy):
        cents = CentroidSet(np.array([0.0, 1.0]))
        assign = NaiveEngine()(toy, cents)
        state = AcceleratorState.start(AAConfig())
        state.fallback = CentroidSet(np.array([0.5, 4.5]))
        cfg = SolverConfig()
        # The mean update {0, 10/3} scores 26/3 on the candidate's partition.
        salvaged = recovery_iterate(toy, assign, cents, state, 9.0, cfg, AAConfig(), 1)
        np.testing.assert_allclose(salvaged.centers.ravel(), [0.0, 10.0 / 3.0])
        assert recovery_iterate(toy, assign, cents, state, 8.0, cfg, AAConfig(), 1) is state.fallback
        assert recovery_iterate(toy, assign, cents, state, 9.0, cfg, AAConfig(salvage=False), 1) is state.fallback


def _far_extrapolation(g_current, delta_g, theta):
    return np.asarray(g_current, dtype=np.float64).ravel() + 1_000.0


@pytest.mark.usefixtures("far_candidates")
class TestForcedRejection:
    @pytest.fixture
    def far_candidates(self, monkeypatch):
        monkeypatch.setattr("andermeans.anderson.extrapolate", _far_extrapolation)

    @staticmethod
    def _solve(make_mixture, **aa_kwargs):
        data = make_mixture(600, 2, 4, seed=21, spread=6.0)
        cfg = SolverConfig(engine="naive", record_centroids=True)
        aa_cfg = AAConfig(m0=2, dynamic=False, salvage=False, **aa_kwargs)
        return data, aa_kmeans_solve(data, CentroidSet(data.points[:4]), cfg, aa_cfg)

    @pytest.mark.parametrize("guard", ["surrogate", "energy"])
    def test_rejected_iterates_become_lloyd_iterates(self, make_mixture, guard):
        data, report = self._solve(make_mixture, guard=guard)
        assert report.converged
        assert report.total_iters >= 5
        # Iterations 1 and 2 are plain; every later one is extrapolated.
        assert report.rejected_iters == list(range(3, report.total_iters + 1))
        assert report.accepted_iters == 2
        for t in report.rejected_iters:
            expected, _ = g_map(data, report.centroid_trace[t - 2], NaiveEngine())
            np.testing.assert_array_equal(report.centroid_trace[t - 1].centers, expected.centers)
            assert report.energy_trace[t - 1].total <= report.energy_trace[t - 2].total

    def test_history_kept_unless_configured(self, make_mixture, monkeypatch):
        cleared = []
        original = AcceleratorState.clear_history

        def counting(state):
            cleared.append(len(state.g_history))
            original(state)

        monkeypatch.setattr(AcceleratorState, "clear_history", counting)
        _, kept = self._solve(make_mixture)
        assert kept.rejected_iters and cleared == []

        _, dropped = self._solve(make_mixture, clear_history_on_reject=True)
        assert len(cleared) == len(dropped.rejected_iters)
        # An emptied history only supports a plain step next.
        assert dropped.rejected_iters == list(range(3, dropped.total_iters + 1, 2))


def _random_instance(rng: np.random.Generator, make_mixture, seed: int):
    n = int(rng.integers(200, 1_500))
    d = int(rng.choice([2, 5]))
    k = int(rng.integers(3, 9))
    data = make_mixture(n, d, k, seed=seed, spread=4.0)
    return data, CentroidSet(data.points[rng.choice(n, size=k, replace=False)])


class TestAAKMeans:
    def test_toy(self, toy, toy_init):
        report = aa_kmeans_solve(toy, toy_init)
        assert report.converged
        assert report.total_iters == 2
        assert report.final_energy.total == 1.0
        np.testing.assert_array_equal(report.final_centroids.centers.ravel(), [0.5, 4.5])

    def test_depth_zero_reproduces_lloyd(self, make_mixture):
        rng = np.random.default_rng(31)
        cfg = SolverConfig(record_centroids=True)
        aa_cfg = AAConfig(m0=0, dynamic=False)
        for seed in range(20):
            data, init = _random_instance(rng, make_mixture, seed)
            lloyd = lloyd_solve(data, init, cfg)
            aa = aa_kmeans_solve(data, init, cfg, aa_cfg)
            assert aa.total_iters == lloyd.total_iters
            assert len(aa.centroid_trace) == len(lloyd.centroid_trace)
            for a, b in zip(aa.centroid_trace, lloyd.centroid_trace):
                np.testing.assert_allclose(a.centers, b.centers, rtol=0.0, atol=1e-12)
            assert set(aa.m_trace) == {0}

    def test_accounting(self, make_mixture):
        rng = np.random.default_rng(5)
        for seed in range(5):
            data, init = _random_instance(rng, make_mixture, seed)
            report = aa_kmeans_solve(data, init)
            assert report.accepted_iters + len(report.rejected_iters) == report.total_iters
            assert report.rejected_count == len(report.rejected_iters)
            assert len(report.m_trace) == len(report.energy_trace) == report.total_iters
            assert all(0 <= m <= 30 for m in report.m_trace)

    @pytest.mark.parametrize("aa_cfg", [AAConfig(), AAConfig(guard="energy"), AAConfig(salvage=False)])
    def test_recovered_energy_within_previous(self, make_mixture, aa_cfg):
        rng = np.random.default_rng(9)
        for seed in range(5):
            data, init = _random_instance(rng, make_mixture, seed)
            report = aa_kmeans_solve(data, init, aa_cfg=aa_cfg)
            for t in report.rejected_iters:
                assert report.energy_trace[t - 1].total <= report.energy_trace[t - 2].total

    def test_fixed_depth_never_changes_m(self, make_mixture):
        rng = np.random.default_rng(8)
        data, init = _random_instance(rng, make_mixture, 3)
        report = aa_kmeans_solve(data, init, aa_cfg=AAConfig(m0=4, dynamic=False))
        assert set(report.m_trace) == {4}

    @pytest.mark.parametrize(
        "aa_cfg",
        [
            AAConfig(clear_history_on_reject=True),
            AAConfig(m0=5, m_max=8),
            AAConfig(m0=1, m_max=1),
            AAConfig(guard="energy", salvage=False),
            AAConfig(guard_margin=0.0),
        ],
    )
    def test_variants_converge_to_a_fixed_point(self, make_mixture, aa_cfg):
        data = make_mixture(1_200, 3, 6, seed=12, spread=4.0)
        report = aa_kmeans_solve(data, CentroidSet(data.points[:6]), aa_cfg=aa_cfg)
        assert report.converged
        cents, assign = g_map(data, report.final_centroids, NaiveEngine())
        assert cents.same_as(report.final_centroids)
        assert assign.same_labels(report.final_assignment)

    def test_reseed_policy(self, make_mixture):
        data = make_mixture(800, 2, 4, seed=13, spread=3.0)
        cfg = SolverConfig(empty_cluster_policy=EmptyClusterPolicy.RESEED_FARTHEST)
        report = aa_kmeans_solve(data, CentroidSet(data.points[:8]), cfg)
        assert report.converged

    def test_iteration_cap(self, make_mixture):
        data = make_mixture(1_000, 2, 8, seed=14, spread=3.0)
        report = aa_kmeans_solve(data, CentroidSet(data.points[:8]), SolverConfig(max_iters=2))
        assert report.total_iters <= 2
        assert not report.converged


def _global_minimum(points: np.ndarray, k: int) -> float:
    best = math.inf
    for labels in itertools.product(range(k), repeat=points.shape[0]):
        labels = np.array(labels)
        total = 0.0
        for j in range(k):
            members = points[labels == j]
            if members.shape[0]:
                total += float(((members - members.mean(axis=0)) ** 2).sum())
        best = min(best, total)
    return best


def test_both_solvers_end_at_local_optima():
    rng = np.random.default_rng(77)
    for _ in range(50):
        n = int(rng.integers(3, 9))
        k = int(rng.integers(1, 4))
        d = int(rng.integers(1, 4))
        points = rng.normal(size=(n, d))
        data = Dataset(points)
        init = CentroidSet(points[rng.choice(n, size=k, replace=False)])
        optimum = _global_minimum(points, k)
        for report in (lloyd_solve(data, init), aa_kmeans_solve(data, init)):
            assert report.converged
            assert report.final_energy.total >= optimum - 1e-9 * max(1.0, optimum)
            cents, assign = g_map(data, report.final_centroids, NaiveEngine())
            assert assign.same_labels(report.final_assignment)
            np.testing.assert_allclose(cents.centers, report.final_centroids.centers, rtol=0.0, atol=1e-12)


@pytest.mark.slow
def test_accepted_energy_never_increases(make_mixture):
    rng = np.random.default_rng(101)
    for run in range(50):
        d = int(rng.choice([2, 8, 32]))
        k = int(rng.choice([5, 10]))
        n = int(rng.integers(1_000, 10_001))
        data = make_mixture(n, d, k, seed=run, spread=6.0 * math.sqrt(2.0 / d))
        report = aa_kmeans_solve(data, init_kmeanspp(data, k, run))
        totals = [e.total for e in report.energy_trace]
        for before, after in zip(totals, totals[1:]):
            assert after - before <= 1e-9 * max(abs(before), abs(after))
        assert all(0 <= m <= 30 for m in report.m_trace)


@pytest.mark.slow
def test_dynamic_depth_needs_fewer_iterations(make_mixture):
    reductions, wins, matching = [], 0, 0
    for d in (2, 8, 32):
        for seed in range(10):
            # Overlapping components keep plain Lloyd busy for tens of iterations.
            data = make_mixture(10_000, d, 10, seed=seed, spread=6.0 * math.sqrt(2.0 / d))
            init = init_kmeanspp(data, 10, seed)
            lloyd = lloyd_solve(data, init)
            aa = aa_kmeans_solve(data, init)
            wins += aa.total_iters < lloyd.total_iters
            reductions.append(1.0 - aa.total_iters / lloyd.total_iters)
            matching += abs(aa.final_energy.mse - lloyd.final_energy.mse) <= 0.01 * lloyd.final_energy.mse
    assert wins >= 0.7 * len(reductions)
    assert statistics.median(reductions) >= 0.2
    assert matching >= 0.9 * len(reductions)
