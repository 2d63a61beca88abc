import numpy as np
import pytest

from firmsim import kernels
from firmsim.core import Employee, TimeAllocation, ValueType
from firmsim.network import (EdgeMatrix, InteractionLog, activity_difference,
                             activity_similarity, candidate_matrix,
                             interaction_candidates, run_interaction_phase,
                             similarity_matrix, symmetrize_draws, update_edges,
                             update_norms, update_norms_all)

TAU = 8.0


def alloc(s, c, p):
    return TimeAllocation(s, c, p)


class TestActivitySimilarity:
    def test_identical_agents(self):
        assert activity_difference(alloc(2, 2, 4), alloc(2, 2, 4), TAU) == 0.0
        assert activity_similarity(0.0) == 1.0

    def test_half_difference(self):
        assert activity_difference(alloc(2, 2, 4), alloc(0, 4, 4), TAU) == pytest.approx(0.5)
        assert activity_similarity(0.5) == 0.5

    def test_extreme_difference_clamps(self):
        ad = activity_difference(alloc(8, 0, 0), alloc(0, 8, 0), TAU)
        assert ad == pytest.approx(2.0)
        assert activity_similarity(ad) == 0.0

    def test_invalid_tau(self):
        with pytest.raises(ValueError):
            activity_difference(alloc(1, 1, 6), alloc(1, 1, 6), 0.0)

    def test_matrix_matches_pairwise(self):
        rng = np.random.default_rng(0)
        u = np.sort(rng.random((6, 2)), axis=1)
        s, c = u[:, 0] * TAU, (u[:, 1] - u[:, 0]) * TAU
        p = TAU - s - c
        mat = similarity_matrix(s, c, p, TAU)
        for i in range(6):
            for j in range(6):
                ad = activity_difference(alloc(s[i], c[i], p[i]),
                                         alloc(s[j], c[j], p[j]), TAU)
                assert mat[i, j] == pytest.approx(activity_similarity(ad))


class TestCandidates:
    def test_blank_slate_is_permutation(self):
        edges = np.zeros((6, 6))
        rng = np.random.default_rng(1)
        cand = interaction_candidates(2, edges, rng)
        assert sorted(cand) == [0, 1, 3, 4, 5]

    def test_known_peers_first_by_weight(self):
        edges = np.zeros((5, 5))
        edges[0, 3] = 0.9
        edges[0, 1] = 0.2
        rng = np.random.default_rng(2)
        cand = interaction_candidates(0, edges, rng)
        assert cand[:2] == [3, 1]

    def test_tie_break_is_uniform(self):
        edges = np.zeros((3, 3))
        edges[0, 1] = edges[0, 2] = 0.5
        rng = np.random.default_rng(3)
        first = sum(interaction_candidates(0, edges, rng)[0] == 1 for _ in range(10_000))
        assert 0.45 < first / 10_000 < 0.55

    def test_matrix_agrees_with_scalar(self):
        rng = np.random.default_rng(4)
        n = 8
        edges = rng.random((n, n))
        edges[edges < 0.6] = 0.0
        np.fill_diagonal(edges, 0.0)
        keys = rng.random((n, n))
        mat = candidate_matrix(edges, keys)
        for i in range(n):
            scalar = interaction_candidates(i, edges, rng, keys=keys[i])
            assert list(mat[i]) == scalar


def reference_walk(order, cand, sim, draws, caps):
    """Independent literal enumeration of the pairing walk (test oracle)."""
    cap = {i: int(c) for i, c in enumerate(caps)}
    checked = set()
    log = {}
    for i in order:
        for j in cand[i]:
            if cap[i] == 0:
                break
            key = (min(i, j), max(i, j))
            if key in checked:
                continue
            checked.add(key)
            if cap[j] == 0:
                continue
            if draws[i][j] < sim[i][j]:
                log[key] = sim[i][j]
                cap[i] -= 1
                cap[j] -= 1
    return log


def as_matrix(log, n):
    out = np.zeros((n, n))
    for (i, j), w in log.items():
        out[i, j] = out[j, i] = w
    return out


def run_backend(backend, order, cand, sim, draws, caps):
    delta_e = np.zeros((len(order), len(order)))
    walk = kernels.get_walk(backend)
    walk(np.asarray(order, dtype=np.int64),
         np.ascontiguousarray(cand, dtype=np.int64),
         np.ascontiguousarray(sim, dtype=float),
         np.ascontiguousarray(draws, dtype=float),
         np.asarray(caps, dtype=np.int64), delta_e)
    return delta_e


def pinned_three_agent_case():
    sim = np.array([[1.0, 0.8, 0.3],
                    [0.8, 1.0, 0.6],
                    [0.3, 0.6, 1.0]])
    draws = np.array([[0.0, 0.5, 0.9],
                      [0.5, 0.0, 0.2],
                      [0.9, 0.2, 0.0]])
    cand = np.array([[1, 2], [0, 2], [0, 1]])
    order = np.array([0, 1, 2])
    return order, cand, sim, draws


class TestInteractionWalk:
    def test_pinned_enumeration(self):
        order, cand, sim, draws = pinned_three_agent_case()
        # caps (1,2,1): 0 meets 1 (d=.5 < .8), exhausting 0's cap;
        # 1 then meets 2 (d=.2 < .6); pair (0,2) is never checked.
        for backend in kernels.available_backends():
            out = run_backend(backend, order, cand, sim, draws, [1, 2, 1])
            expected = np.zeros((3, 3))
            expected[0, 1] = expected[1, 0] = 0.8
            expected[1, 2] = expected[2, 1] = 0.6
            assert np.array_equal(out, expected)

    def test_pinned_failed_first_check(self):
        order, cand, sim, draws = pinned_three_agent_case()
        draws = draws.copy()
        draws[0, 1] = draws[1, 0] = 0.9  # above similarity: no meeting
        for backend in kernels.available_backends():
            out = run_backend(backend, order, cand, sim, draws, [2, 2, 2])
            expected = np.zeros((3, 3))
            expected[1, 2] = expected[2, 1] = 0.6
            assert np.array_equal(out, expected)

    def test_zero_caps_empty_log(self):
        order, cand, sim, draws = pinned_three_agent_case()
        for backend in kernels.available_backends():
            out = run_backend(backend, order, cand, sim, draws, [0, 0, 0])
            assert not out.any()

    def test_identical_agents_always_meet(self):
        rng = np.random.default_rng(7)
        allocs = [alloc(1.0, 3.0, 4.0), alloc(1.0, 3.0, 4.0)]
        edges = np.zeros((2, 2))
        for _ in range(200):
            log = run_interaction_phase(allocs, edges, np.array([5, 5]), rng, TAU)
            assert log.interacted(0, 1)
            assert log.delta_e[0, 1] == 1.0

    def test_backends_agree_with_reference_on_random_instances(self):
        rng = np.random.default_rng(8)
        for trial in range(200):
            n = int(rng.integers(2, 9))
            sim = rng.random((n, n))
            sim = (sim + sim.T) / 2
            draws = symmetrize_draws(rng.random((n, n)))
            caps = rng.integers(0, 4, n)
            order = rng.permutation(n)
            keys = rng.random((n, n))
            edges = rng.random((n, n))
            edges[edges < 0.5] = 0.0
            np.fill_diagonal(edges, 0.0)
            cand = candidate_matrix(edges, keys)
            expected = as_matrix(
                reference_walk(order.tolist(), cand.tolist(), sim.tolist(),
                               draws.tolist(), caps.tolist()), n)
            for backend in kernels.available_backends():
                out = run_backend(backend, order, cand, sim, draws, caps)
                assert np.array_equal(out, expected), f"trial {trial} {backend}"

    def test_symmetry_and_caps_respected(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            n = 12
            u = np.sort(rng.random((n, 2)), axis=1)
            s, c = u[:, 0] * TAU, (u[:, 1] - u[:, 0]) * TAU
            caps = rng.integers(0, 5, n)
            log = run_interaction_phase((s, c, TAU - s - c), np.zeros((n, n)),
                                        caps, rng, TAU)
            assert np.array_equal(log.delta_e, log.delta_e.T)
            counts = (log.delta_e > 0).sum(axis=1)
            assert np.all(counts <= caps)

    def test_caller_caps_not_mutated(self):
        order, cand, sim, draws = pinned_three_agent_case()
        caps = np.array([1, 2, 1], dtype=np.int64)
        for backend in kernels.available_backends():
            run_backend(backend, order, cand, sim, draws, caps)
            assert list(caps) == [1, 2, 1]


class TestUpdateEdges:
    def test_first_day(self):
        e = np.zeros((2, 2))
        d = np.array([[0.0, 0.7], [0.7, 0.0]])
        out = update_edges(e, d, 1)
        assert out[0, 1] == 0.7

    def test_decay_without_interaction(self):
        e = np.full((2, 2), 0.5)
        np.fill_diagonal(e, 0.0)
        out = update_edges(e, np.zeros((2, 2)), 10)
        assert out[0, 1] == pytest.approx(0.45)

    def test_t_zero_keeps_zeros(self):
        e = np.zeros((2, 2))
        out = update_edges(e, np.zeros((2, 2)), 0)
        assert not out.any()

    def test_running_average_stays_in_unit_interval(self):
        rng = np.random.default_rng(10)
        e = np.zeros((4, 4))
        for t in range(1, 300):
            d = rng.random((4, 4))
            d = (d + d.T) / 2
            np.fill_diagonal(d, 0.0)
            e = update_edges(e, d, t)
            assert e.min() >= 0.0 and e.max() <= 1.0
        EdgeMatrix(e).validate()


class TestUpdateNorms:
    def emp(self, s_norm=1.0, c_norm=1.0):
        return Employee(id=0, vtype=ValueType.C, alloc=alloc(1, 1, 6),
                        s_norm=s_norm, c_norm=c_norm, satisfaction=0.5,
                        base_satisfaction=0.5)

    def behaviors(self, pairs):
        return [alloc(s, c, TAU - s - c) for s, c in pairs]

    def test_no_partners_no_change(self):
        log = InteractionLog(np.zeros((3, 3)))
        cur = self.behaviors([(1, 1), (2, 2), (3, 3)])
        assert update_norms(self.emp(), log, cur, cur, 0.1) == (1.0, 1.0)

    def test_single_partner(self):
        d = np.zeros((2, 2))
        d[0, 1] = d[1, 0] = 0.5
        cur = self.behaviors([(0.0, 0.0), (2.0, 2.0)])
        s_new, c_new = update_norms(self.emp(), InteractionLog(d), cur, cur, 0.1)
        assert s_new == pytest.approx(1.1, abs=1e-12)

    def test_two_partners_weighted(self):
        d = np.zeros((3, 3))
        d[0, 1] = d[1, 0] = 0.5
        d[0, 2] = d[2, 0] = 0.25
        cur = self.behaviors([(0.0, 0.0), (2.0, 2.0), (0.5, 0.5)])
        s_new, _ = update_norms(self.emp(), InteractionLog(d), cur, cur, 0.1)
        # weighted mean (0.5*2 + 0.25*0.5) / 0.75 = 1.5; step: 0.9 + 0.15
        assert s_new == pytest.approx(1.05, abs=1e-12)

    def test_lag_selects_previous_day(self):
        d = np.zeros((2, 2))
        d[0, 1] = d[1, 0] = 1.0
        cur = self.behaviors([(0.0, 0.0), (4.0, 4.0)])
        prev = self.behaviors([(0.0, 0.0), (2.0, 2.0)])
        s_cur, _ = update_norms(self.emp(), InteractionLog(d), cur, prev, 0.1, "current")
        s_prev, _ = update_norms(self.emp(), InteractionLog(d), cur, prev, 0.1, "previous")
        assert s_cur == pytest.approx(1.3)
        assert s_prev == pytest.approx(1.1)

    def test_convexity(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = 5
            d = rng.random((n, n))
            d[d < 0.5] = 0.0
            d = np.maximum(d, d.T)
            np.fill_diagonal(d, 0.0)
            u = np.sort(rng.random((n, 2)), axis=1)
            s, c = u[:, 0] * TAU, (u[:, 1] - u[:, 0]) * TAU
            s_norm = rng.random(n) * TAU
            c_norm = rng.random(n) * TAU
            s_new, c_new = update_norms_all(s_norm, c_norm, d, s, c, 0.1)
            for i in range(n):
                w = d[i]
                if w.sum() == 0:
                    assert s_new[i] == s_norm[i]
                    continue
                target = (w @ s) / w.sum()
                lo, hi = min(s_norm[i], target), max(s_norm[i], target)
                assert lo - 1e-12 <= s_new[i] <= hi + 1e-12
                assert 0.0 <= s_new[i] <= TAU

    def test_identical_behavior_is_fixed_point(self):
        n = 4
        s_norm = np.full(n, 1.7)
        c_norm = np.full(n, 2.5)
        d = np.ones((n, n)) * 0.4
        np.fill_diagonal(d, 0.0)
        s_new, c_new = update_norms_all(s_norm, c_norm, d, np.full(n, 1.7),
                                        np.full(n, 2.5), 0.1)
        assert np.allclose(s_new, 1.7) and np.allclose(c_new, 2.5)

    def test_convergence_to_common_behavior(self):
        n = 3
        s_norm = np.array([0.0, 4.0, 8.0])
        c_norm = np.array([0.0, 4.0, 8.0])
        d = np.ones((n, n)) * 0.5
        np.fill_diagonal(d, 0.0)
        for _ in range(400):
            s_norm, c_norm = update_norms_all(s_norm, c_norm, d, np.full(n, 2.0),
                                              np.full(n, 3.0), 0.1)
        assert np.allclose(s_norm, 2.0, atol=1e-9)
        assert np.allclose(c_norm, 3.0, atol=1e-9)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(12)
        n = 6
        d = rng.random((n, n))
        d[d < 0.4] = 0.0
        d = np.maximum(d, d.T)
        np.fill_diagonal(d, 0.0)
        u = np.sort(rng.random((n, 2)), axis=1)
        s, c = u[:, 0] * TAU, (u[:, 1] - u[:, 0]) * TAU
        cur = self.behaviors(list(zip(s, c)))
        s_norm = rng.random(n) * TAU
        c_norm = rng.random(n) * TAU
        vec_s, vec_c = update_norms_all(s_norm, c_norm, d, s, c, 0.1)
        log = InteractionLog(d)
        for i in range(n):
            emp = self.emp(s_norm[i], c_norm[i])
            emp.id = i
            ss, cc = update_norms(emp, log, cur, cur, 0.1)
            assert ss == pytest.approx(vec_s[i])
            assert cc == pytest.approx(vec_c[i])
