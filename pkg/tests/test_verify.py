import math

import numpy as np
import pytest

from netdecouple.network import Network, NodeSet, ProblemInstance, reachable_avoiding
from netdecouple.synthesis import (
    ClosedLoop,
    assemble_closed_loop,
    design_dynamic_feedback,
    design_state_feedback,
    reduced_order_compensator,
    weighted_system,
)
from netdecouple.verify import (
    DisturbanceSignal,
    VerificationReport,
    closed_loop_residual,
    decoupling_residual,
    invariance_residual,
    simulate,
)
from randnets import stabilized_system


def ns(members, n=5):
    return NodeSet.of(members, n)


class TestDecouplingResidual:
    def test_cancelled_rows_give_exact_zero(self, fork):
        design = design_state_feedback(fork, seed=5)
        sys = design.system
        a_cl = sys.a - sys.b_matrix @ design.f
        assert decoupling_residual(a_cl, sys.d_matrix, sys.t_matrix) == 0.0

    def test_open_loop_matches_path_products(self, fork):
        sys = weighted_system(fork.with_inputs(ns([2])), seed=5)
        a = sys.a
        residual = decoupling_residual(a, sys.d_matrix, sys.t_matrix)
        # independent oracle: explicit matrix powers
        expected = max(
            float(np.max(np.abs(sys.t_matrix @ np.linalg.matrix_power(a, k) @ sys.d_matrix)))
            for k in range(5)
        )
        assert residual == pytest.approx(expected, rel=1e-12)
        k3 = abs(a[3, 2] * a[2, 1] * a[1, 0] + a[3, 4] * a[4, 1] * a[1, 0])
        assert residual == pytest.approx(k3, rel=1e-12)
        assert residual > 1e-6

    def test_no_path_zero_without_feedback(self):
        net = Network.from_edges(3, [(2, 1), (2, 3)])
        inst = ProblemInstance(net, NodeSet.of([1], 3), NodeSet.of([3], 3))
        sys = weighted_system(inst.with_inputs(NodeSet.of([], 3)), seed=1)
        assert decoupling_residual(sys.a, sys.d_matrix, sys.t_matrix) == 0.0

    def test_residual_graph_equivalence(self, fork):
        # residual vanishes exactly when no disturbance-to-target path
        # survives in the support of the closed-loop matrix
        design = design_state_feedback(fork, seed=6)
        sys = design.system
        a_cl = sys.a - sys.b_matrix @ design.f
        support = [
            (j + 1, i + 1) for j, i in zip(*np.nonzero(a_cl.T))
        ]
        net = Network.from_edges(5, support) if support else None
        reach = reachable_avoiding(net, fork.disturbances)
        assert reach.isdisjoint(fork.targets)

    def test_horizon_doubling_never_increases(self, fork):
        sys = weighted_system(fork.with_inputs(ns([2])), seed=8)
        r1 = decoupling_residual(sys.a, sys.d_matrix, sys.t_matrix, horizon=5)
        r2 = decoupling_residual(sys.a, sys.d_matrix, sys.t_matrix, horizon=10)
        assert r2 == pytest.approx(r1, rel=0, abs=0)

    def test_horizon_below_dimension_rejected(self, fork):
        sys = weighted_system(fork.with_inputs(ns([2])), seed=8)
        with pytest.raises(ValueError):
            decoupling_residual(sys.a, sys.d_matrix, sys.t_matrix, horizon=3)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            decoupling_residual(np.zeros((2, 3)), np.zeros((2, 1)), np.zeros((1, 2)))


class TestClosedLoopResidual:
    def test_reduced_order_loop_exact(self, fork):
        inst = fork.with_inputs(ns([4])).with_outputs(ns([1]))
        design = design_dynamic_feedback(inst, seed=4)
        assert design.compensator.order == 3
        assert closed_loop_residual(design.closed_loop) <= 1e-12

    def test_zeroed_compensator_leaks(self, fork):
        inst = fork.with_inputs(ns([4])).with_outputs(ns([1]))
        design = design_dynamic_feedback(inst, seed=4)
        loop = design.closed_loop
        dead = ClosedLoop(
            a_c=np.block(
                [
                    [design.system.a, np.zeros((5, 3))],
                    [np.zeros((3, 5)), np.zeros((3, 3))],
                ]
            ),
            d_c=loop.d_c,
            t_c=loop.t_c,
            state_dim=5,
        )
        assert closed_loop_residual(dead) > 1e-6

    def test_no_disturbances_zero(self, fork):
        inst = fork.with_inputs(ns([4])).with_outputs(ns([1]))
        design = design_dynamic_feedback(inst, seed=4)
        loop = design.closed_loop
        empty_d = ClosedLoop(
            a_c=loop.a_c, d_c=np.zeros((8, 0)), t_c=loop.t_c, state_dim=5
        )
        assert closed_loop_residual(empty_d) == 0.0


class TestInvarianceResidual:
    def test_feedback_makes_invariant(self, fork):
        design = design_state_feedback(fork, seed=5)
        sys = design.system
        a_cl = sys.a - sys.b_matrix @ design.f
        assert invariance_residual(a_cl, design.zstar) == 0.0

    def test_open_loop_leaks(self, fork):
        sys = weighted_system(fork.with_inputs(ns([2])), seed=5)
        assert invariance_residual(sys.a, ns([1])) == abs(sys.a[1, 0]) > 0.0

    def test_empty_set_zero(self, fork):
        sys = weighted_system(fork.with_inputs(ns([2])), seed=5)
        assert invariance_residual(sys.a, ns([])) == 0.0


class TestSimulate:
    def make_loop(self, seed=21):
        from netdecouple.fixtures import fork_graph
        from netdecouple.invariance import sstar, zstar

        inst = fork_graph().with_inputs(ns([4])).with_outputs(ns([1]))
        sys = stabilized_system(inst, seed)
        zs = zstar(inst, inst.inputs, want_trace=False).fixpoint
        ss = sstar(inst, inst.outputs, want_trace=False).fixpoint
        comp = reduced_order_compensator(sys, zs, ss)
        return assemble_closed_loop(sys, comp)

    def test_zero_disturbance_stays_at_origin(self):
        loop = self.make_loop()
        sim = simulate(loop, DisturbanceSignal(seed=1, amplitude=0.0), 0.01, 200)
        assert sim.peak_z == 0.0 and sim.peak_state == 0.0

    def test_decoupled_loop_holds_targets_still(self):
        loop = self.make_loop()
        norm = float(np.max(np.abs(loop.a_c).sum(axis=1)))
        dt = min(0.01, 0.4 / norm)
        steps = int(math.ceil(10.0 / dt))
        sim = simulate(loop, DisturbanceSignal(seed=2), dt, steps)
        assert sim.peak_z <= 1e-6
        assert sim.peak_state >= 0.1

    def test_open_loop_targets_move(self):
        from netdecouple.fixtures import fork_graph

        inst = fork_graph().with_inputs(ns([4])).with_outputs(ns([1]))
        sys = stabilized_system(inst, 21)
        loop = ClosedLoop(
            a_c=sys.a, d_c=sys.d_matrix, t_c=sys.t_matrix, state_dim=5
        )
        sim = simulate(loop, DisturbanceSignal(seed=2), 0.01, 1000)
        assert sim.peak_z > 1e-3

    def test_step_guard(self):
        loop = self.make_loop()
        with pytest.raises(ValueError):
            simulate(loop, DisturbanceSignal(seed=1), 10.0, 10)

    def test_deterministic(self):
        loop = self.make_loop()
        s1 = simulate(loop, DisturbanceSignal(seed=3), 0.01, 300)
        s2 = simulate(loop, DisturbanceSignal(seed=3), 0.01, 300)
        assert np.array_equal(s1.states, s2.states)


class TestClosedLoopInvariantSubspace:
    def test_pair_recovery(self, fork):
        # the loop leaves span{[x; Px] : x in Z*} invariant; intersecting
        # that subspace with the base space recovers S*, projecting onto
        # the base space recovers Z*
        inst = fork.with_inputs(ns([4])).with_outputs(ns([1]))
        design = design_dynamic_feedback(inst, seed=4)
        comp, loop = design.compensator, design.closed_loop
        n, k = 5, comp.order
        cols = []
        for z in design.zstar:
            x = np.zeros(n)
            x[z - 1] = 1.0
            cols.append(np.concatenate([x, comp.p @ x]))
        w = np.array(cols).T
        image = loop.a_c @ w
        coeff, *_ = np.linalg.lstsq(w, image, rcond=None)
        assert float(np.max(np.abs(w @ coeff - image))) <= 1e-12

        for v in range(1, n + 1):
            e = np.zeros(n + k)
            e[v - 1] = 1.0
            c2, *_ = np.linalg.lstsq(w, e, rcond=None)
            inside = float(np.max(np.abs(w @ c2 - e))) <= 1e-9
            assert inside == (v in design.sstar)

        base_support = {i + 1 for i in range(n) if np.any(w[i, :] != 0.0)}
        assert base_support == set(design.zstar)


class TestVerificationReport:
    def test_pass_requires_both_residuals(self):
        ok = VerificationReport.build("sf", 0.0, 5, 0.0)
        assert ok.passed
        bad = VerificationReport.build("sf", 1e-3, 5, 0.0)
        assert not bad.passed
        bad2 = VerificationReport.build("sf", 0.0, 5, 1e-3)
        assert not bad2.passed
