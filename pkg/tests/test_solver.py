"""Tests for the branch-and-bound solver and the enumeration oracle."""

import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from lwadm import ArrayConfig
from lwadm.objectives import DMProblem, make_evaluator, objective_value
from lwadm.seeding import child_rng
from lwadm.solver import (
    FEATURE_COLUMNS,
    MAX_ENUM_BITS,
    SolveLimits,
    exhaustive_oracle,
    solve,
    solve_relaxation,
)

from oracles import array_factor_1d_direct


def unit_csi(rng, n):
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def channel_instance(seed, n_cells, n_steps):
    cfg = ArrayConfig(n_cells=n_cells)
    bob = unit_csi(child_rng(seed, "channel/bob"), n_cells)
    eve = unit_csi(child_rng(seed, "channel/eve"), n_cells)
    return DMProblem(kind="channel-perfect", config=cfg, n_steps=n_steps,
                     csi_bob=bob, csi_eve=eve)


class TestLimitsValidation:

    def test_bad_budgets_rejected(self):
        with pytest.raises(ValueError):
            SolveLimits(max_nodes=0)
        with pytest.raises(ValueError):
            SolveLimits(max_seconds=0.0)


class TestEnumerationOracle:

    def test_single_cell_instance_exact_value(self):
        # one cell: |Xi| = 1 at every angle, so the optimum holds both steps
        # identical and collects only the radiation term, -2
        cfg = ArrayConfig(n_cells=1)
        prob = DMProblem(kind="freespace-1d", config=cfg, n_steps=2, theta0_deg=70.0)
        res = exhaustive_oracle(prob, slack_grid_step_deg=0.5)
        assert_allclose(res.objective, -2.0, atol=1e-12)
        assert np.array_equal(res.states[0], res.states[1])

    def test_sixteen_schedule_hand_scan(self):
        # N=2, L=2: all 16 schedules scanned with plain loops and the direct
        # array-factor oracle, using the same slack grid convention
        cfg = ArrayConfig(n_cells=2)
        theta0 = 75.0
        windows = [[-10.0, -4.0], [4.0, 10.0]]
        prob = DMProblem(kind="freespace-1d", config=cfg, n_steps=2,
                         theta0_deg=theta0, slack_bounds_deg=windows)
        step = 0.5

        def xi(row, theta):
            return array_factor_1d_direct(row, theta, cfg.phase0_deg,
                                          cfg.phase1_deg, cfg.cell_period,
                                          cfg.carrier_freq)

        best = math.inf
        for bits in itertools.product((0, 1), repeat=4):
            q1, q2 = list(bits[:2]), list(bits[2:])
            first = abs(xi(q2, theta0) - xi(q1, theta0))
            second = 0.0
            for row, (lo, hi) in zip((q1, q2), windows):
                grid = np.arange(lo, hi + 1e-12, step)
                second += max(abs(xi(row, theta0 + g)) for g in grid)
            best = min(best, first - second)

        res = exhaustive_oracle(prob, slack_grid_step_deg=step)
        assert_allclose(res.objective, best, atol=1e-9)

        rep = solve(prob, seed=3, slack_grid_step_deg=step, multistarts=6,
                    pgd_iters=150)
        assert not rep.limit_hit
        assert_allclose(rep.objective, best, atol=1e-9)

    def test_channel_brute_force_replay(self):
        # N=3, L=2: 64 schedules re-scored through the public objective
        prob = channel_instance(77, 3, 2)
        best = math.inf
        for bits in itertools.product((0, 1), repeat=6):
            states = np.asarray(bits).reshape(2, 3)
            best = min(best, objective_value(prob, states))
        res = exhaustive_oracle(prob)
        assert_allclose(res.objective, best, atol=1e-12)
        assert_allclose(objective_value(prob, res.states), best, atol=1e-12)

    def test_oracle_slacks_are_consistent(self):
        cfg = ArrayConfig(n_cells=3)
        prob = DMProblem(kind="freespace-1d", config=cfg, n_steps=2, theta0_deg=80.0)
        res = exhaustive_oracle(prob, slack_grid_step_deg=1.0)
        assert_allclose(objective_value(prob, res.states, res.slacks),
                        res.objective, atol=1e-12)

    def test_refuses_oversized_instances(self):
        cfg = ArrayConfig(n_cells=11)
        prob = DMProblem(kind="freespace-1d", config=cfg, n_steps=2, theta0_deg=80.0)
        assert prob.n_binaries > MAX_ENUM_BITS
        with pytest.raises(ValueError):
            exhaustive_oracle(prob)


class TestRelaxation:

    def test_fully_fixed_matches_discrete(self):
        prob = channel_instance(21, 6, 3)
        rng = np.random.default_rng(0)
        for _ in range(4):
            states = rng.integers(0, 2, (3, 6))
            fixed = states.reshape(-1).astype(np.int8)
            val, x = solve_relaxation(prob, fixed=fixed, seed=0, multistarts=3,
                                      pgd_iters=50)
            assert_allclose(val, objective_value(prob, states), atol=1e-12)
            assert_allclose(x[:18], states.reshape(-1), atol=1e-9)

    def test_root_bound_below_random_samples(self):
        # the relaxation minimum bounds every binary schedule from below;
        # check against 1e5 random feasible samples under default windows
        cfg = ArrayConfig(n_cells=6)
        prob = DMProblem(kind="freespace-1d", config=cfg, n_steps=2, theta0_deg=73.0)
        bound, _ = solve_relaxation(prob, seed=0)
        assert bound >= -2 * 6 - 1e-9

        rng = np.random.default_rng(123)
        n_samp = 100_000
        q = rng.integers(0, 2, (n_samp, 2, 1, 6)).astype(float)
        d = rng.uniform(-10.0, 10.0, (n_samp, 2, 1))
        ev = make_evaluator(prob)
        sample_min = float(ev.value(q, d).min())
        assert bound <= sample_min + 1e-9

    def test_relaxation_deterministic(self):
        prob = channel_instance(22, 5, 2)
        a_val, a_x = solve_relaxation(prob, seed=9, multistarts=6, pgd_iters=100)
        b_val, b_x = solve_relaxation(prob, seed=9, multistarts=6, pgd_iters=100)
        assert a_val == b_val
        assert np.array_equal(a_x, b_x)


class TestSolve:

    def test_channel_instance_matches_oracle(self):
        prob = channel_instance(31, 10, 2)
        res = exhaustive_oracle(prob)
        # regression pin for this instance
        assert_allclose(res.objective, -5.957804190, atol=1e-6)
        rep = solve(prob, seed=31, multistarts=6, pgd_iters=150)
        assert not rep.limit_hit
        assert abs(rep.objective - res.objective) <= 1e-6
        assert rep.solutions_found >= 1

    def test_freespace_grid_mode_matches_oracle(self):
        cfg = ArrayConfig(n_cells=4)
        prob = DMProblem(kind="freespace-1d", config=cfg, n_steps=2, theta0_deg=75.0,
                         slack_bounds_deg=[[-10.0, -4.0], [4.0, 10.0]])
        res = exhaustive_oracle(prob, slack_grid_step_deg=0.5)
        rep = solve(prob, seed=3, slack_grid_step_deg=0.5, multistarts=6,
                    pgd_iters=150)
        assert not rep.limit_hit
        assert abs(rep.objective - res.objective) <= 1e-9

    def test_continuous_slacks_no_worse_than_grid(self):
        cfg = ArrayConfig(n_cells=4)
        prob = DMProblem(kind="freespace-1d", config=cfg, n_steps=2, theta0_deg=75.0,
                         slack_bounds_deg=[[-10.0, -4.0], [4.0, 10.0]])
        grid = solve(prob, seed=3, slack_grid_step_deg=0.5, multistarts=6,
                     pgd_iters=150)
        cont = solve(prob, seed=3, multistarts=6, pgd_iters=150)
        assert not cont.limit_hit
        assert cont.objective <= grid.objective + 1e-6

    def test_node_budget_contract(self):
        prob = channel_instance(33, 8, 2)
        rep = solve(prob, seed=1, limits=SolveLimits(max_nodes=1),
                    multistarts=4, pgd_iters=80)
        assert rep.visited_nodes == 1
        assert rep.limit_hit
        # the root's primal rounding still yields a feasible incumbent
        assert rep.states is not None
        assert rep.solutions_found >= 1
        assert np.isfinite(rep.objective)

    def test_time_budget_contract(self):
        prob = channel_instance(33, 8, 2)
        rep = solve(prob, seed=1, limits=SolveLimits(max_seconds=1e-9))
        assert rep.limit_hit
        assert rep.visited_nodes == 0
        assert rep.states is None
        with pytest.raises(ValueError):
            rep.schedule()

    def test_deterministic_reports(self):
        prob = channel_instance(34, 6, 2)
        a = solve(prob, seed=5, multistarts=6, pgd_iters=100, collect_trace=True)
        b = solve(prob, seed=5, multistarts=6, pgd_iters=100, collect_trace=True)
        assert a.objective == b.objective
        assert np.array_equal(a.states, b.states)
        assert a.visited_nodes == b.visited_nodes
        assert a.solutions_found == b.solutions_found
        assert np.array_equal(a.trace, b.trace)

    def test_objective_reevaluated_through_public_path(self):
        prob = channel_instance(35, 6, 2)
        rep = solve(prob, seed=2, multistarts=6, pgd_iters=100)
        assert_allclose(rep.objective,
                        objective_value(prob, rep.states, rep.slacks), atol=1e-12)

    def test_trace_layout(self):
        prob = channel_instance(36, 5, 2)
        rep = solve(prob, seed=4, multistarts=4, pgd_iters=80, collect_trace=True)
        trace = rep.trace
        assert trace.shape == (rep.visited_nodes, len(FEATURE_COLUMNS) + 1)
        root = trace[0]
        assert root[0] == 0.0  # depth
        assert root[1] == 0.0  # plunge depth
        assert np.isinf(root[4])  # no incumbent yet
        assert root[5] == 0.0  # no solutions yet
        # labels are binary
        assert set(np.unique(trace[:, -1])) <= {0.0, 1.0}
        # any fully-fixed node marks the branching-value slot with -1
        leaves = trace[trace[:, 3] == -1.0]
        assert np.all(leaves[:, -1] == 1.0)

    def test_never_prune_policy_matches_baseline(self):
        prob = channel_instance(37, 6, 2)
        base = solve(prob, seed=6, multistarts=4, pgd_iters=80)
        same = solve(prob, seed=6, multistarts=4, pgd_iters=80,
                     policy=lambda f: False, policy_name="never")
        assert same.visited_nodes == base.visited_nodes
        assert same.objective == base.objective
        assert same.policy == "never"

    def test_always_prune_policy_keeps_feasibility(self):
        prob = channel_instance(37, 6, 2)
        base = solve(prob, seed=6, multistarts=4, pgd_iters=80)
        cut = solve(prob, seed=6, multistarts=4, pgd_iters=80,
                    policy=lambda f: True, policy_name="cut")
        assert cut.visited_nodes <= base.visited_nodes
        assert cut.states is not None
        assert cut.objective >= base.objective - 1e-12

    def test_2d_instance_balances_steps(self):
        # two-step planar instance: the solver must make the two step
        # patterns indistinguishable at the target direction
        from lwadm.array_model import step_values_2d
        from lwadm.objectives import step_shifters
        cfg = ArrayConfig(n_cells=12, n_branches=4)
        prob = DMProblem(kind="freespace-2d", config=cfg, n_steps=2,
                         theta0_deg=30.0, phi0_deg=190.0)
        rep = solve(prob, seed=1, limits=SolveLimits(max_nodes=24),
                    multistarts=4, pgd_iters=120)
        assert rep.states is not None
        sched = rep.schedule()
        lam = step_shifters(prob, rep.slacks)
        xi = step_values_2d(sched, 30.0, 190.0, cfg, shifter=lam)[:, 0]
        assert abs(xi[1] - xi[0]) < 1e-2 * abs(xi[0])
