import pytest

from netdecouple.errors import InfeasibleProblem, InstanceViolation
from netdecouple.network import Network, NodeSet, ProblemInstance, boundary
from netdecouple.oracle import enumerate_dt_paths
from netdecouple.solvability import (
    _grow_w,
    construct_w,
    ddpdf_solvable,
    ddpof_solvable,
    ddpsf_solvable,
    path_indexes,
)


def ns(members, n=5):
    return NodeSet.of(members, n)


def no_path_instance():
    net = Network.from_edges(3, [(2, 1), (2, 3)])
    return ProblemInstance(net, NodeSet.of([1], 3), NodeSet.of([3], 3))


class TestStateFeedback:
    def test_solvable_with_hub_input(self, fork):
        report = ddpsf_solvable(fork.with_inputs(ns([2])))
        assert report.solvable
        assert report.method_agreement
        assert report.zstar == ns([1])
        assert report.witness == ns([1])

    def test_unsolvable_without_inputs(self, fork):
        report = ddpsf_solvable(fork.with_inputs(ns([])))
        assert not report.solvable
        assert report.method_agreement
        assert report.violating_path in enumerate_dt_paths(fork)
        assert report.witness == report.violating_path

    def test_vacuous_when_no_path(self):
        inst = no_path_instance().with_inputs(NodeSet.of([], 3))
        report = ddpsf_solvable(inst)
        assert report.solvable and report.method_agreement

    def test_requires_inputs(self, fork):
        with pytest.raises(InstanceViolation):
            ddpsf_solvable(fork)

    def test_rejects_invalid_instance(self, fork):
        with pytest.raises(InstanceViolation):
            ddpsf_solvable(fork.with_inputs(ns([1])))


class TestOutputFeedback:
    def test_solvable_crossing_edge(self, fork):
        report = ddpof_solvable(fork.with_inputs(ns([2])).with_outputs(ns([1])))
        assert report.solvable
        assert report.method_agreement
        assert report.wset == ns([1])

    def test_unsolvable_no_crossing(self, fork):
        report = ddpof_solvable(fork.with_inputs(ns([2])).with_outputs(ns([3])))
        assert not report.solvable
        assert report.method_agreement
        assert report.violating_path in enumerate_dt_paths(fork)

    def test_vacuous_when_no_path(self):
        inst = no_path_instance()
        inst = inst.with_inputs(NodeSet.of([], 3)).with_outputs(NodeSet.of([], 3))
        assert ddpof_solvable(inst).solvable


class TestConstructW:
    def test_closure_already_controlled_invariant(self, fork):
        inst = fork.with_inputs(ns([2])).with_outputs(ns([1]))
        assert construct_w(inst) == ns([1])

    def test_growth_reaching_target_is_infeasible(self, fork):
        inst = fork.with_inputs(ns([2])).with_outputs(ns([3]))
        with pytest.raises(InfeasibleProblem):
            construct_w(inst)

    def test_inputs_off_the_exit_edge_infeasible(self, fork):
        # {v1} is conditioned invariant but its exit lands outside B, and
        # any growth sweeps into the target.
        inst = fork.with_inputs(ns([4])).with_outputs(ns([1]))
        with pytest.raises(InfeasibleProblem):
            construct_w(inst)

    def test_result_certificates(self, funnel):
        n = 7
        inst = funnel.with_inputs(NodeSet.of([3], n)).with_outputs(
            NodeSet.of([2, 6], n)
        )
        wset, rounds = _grow_w(inst)
        assert wset == NodeSet.of([1, 2, 5, 6], n)
        assert rounds == 0
        assert funnel.disturbances.issubset(wset)
        assert wset.isdisjoint(funnel.targets)
        assert boundary(funnel.network, wset, "in").issubset(inst.outputs)
        assert boundary(funnel.network, wset, "out").issubset(inst.inputs)

    def test_multi_round_growth_stays_within_bound(self):
        net = Network.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
        inst = ProblemInstance(net, ns([1]), ns([5]))
        inst = inst.with_inputs(ns([4])).with_outputs(ns([1, 3]))
        from netdecouple.invariance import sstar

        wset, rounds = _grow_w(inst)
        assert wset == ns([1, 2, 3])
        base = sstar(inst, inst.outputs, want_trace=False).fixpoint
        assert rounds <= len(inst.outputs - base) + 1


class TestDynamicFeedback:
    def test_solvable_pair(self, fork):
        report = ddpdf_solvable(fork.with_inputs(ns([4])).with_outputs(ns([1])))
        assert report.solvable
        assert report.method_agreement
        assert report.sstar == ns([1])
        assert report.zstar == ns([1, 2, 3, 5])
        assert report.witness == (ns([1]), ns([1, 2, 3, 5]))

    def test_unsolvable_shared_node(self, fork):
        report = ddpdf_solvable(fork.with_inputs(ns([2])).with_outputs(ns([2])))
        assert not report.solvable
        assert report.method_agreement
        assert report.sstar == ns([1, 2])
        assert report.zstar == ns([1])
        assert report.violating_path == (1, 2, 3, 4)
        assert report.violating_indexes == (2, 2)

    def test_vacuous_when_no_path(self):
        inst = no_path_instance()
        inst = inst.with_inputs(NodeSet.of([], 3)).with_outputs(NodeSet.of([], 3))
        assert ddpdf_solvable(inst).solvable

    def test_cross_check_off_skips_agreement(self, fork):
        report = ddpdf_solvable(
            fork.with_inputs(ns([4])).with_outputs(ns([1])), cross_check="off"
        )
        assert report.method_agreement is None


class TestPathIndexes:
    def test_endpoints_qualify(self):
        o, i = path_indexes((1, 2, 3, 4), ns([4]), ns([1]))
        assert (o, i) == (1, 4)

    def test_shared_interior_node(self):
        o, i = path_indexes((1, 2, 3, 4), ns([2]), ns([2]))
        assert (o, i) == (2, 2)

    def test_absent_roles(self):
        o, i = path_indexes((1, 2), ns([2]), ns([]))
        assert o is None and i == 2

    def test_output_at_last_position_does_not_count(self):
        o, _ = path_indexes((1, 2), ns([]), ns([2]))
        assert o is None

    def test_input_at_first_position_does_not_count(self):
        _, i = path_indexes((1, 2), ns([1]), ns([]))
        assert i is None

    def test_short_path_rejected(self):
        with pytest.raises(ValueError):
            path_indexes((1,), ns([]), ns([]))
