"""Committed reference instances used across tests and docs."""

from netdecouple.network import Network, NodeSet, ProblemInstance


def fork_graph() -> ProblemInstance:
    """5-node chain that forks at v2 and rejoins at the target v4.

    Edges: v1->v2, v2->v3, v3->v4, v2->v5, v5->v4; D={v1}, T={v4}.
    """
    net = Network.from_edges(5, [(1, 2), (2, 3), (3, 4), (2, 5), (5, 4)])
    return ProblemInstance(
        network=net,
        disturbances=NodeSet.of([1], 5),
        targets=NodeSet.of([4], 5),
    )


def funnel_graph() -> ProblemInstance:
    """7-node graph where two disturbance chains merge at a hub (v3)
    that fans out to both targets.

    Edges: v1->v2, v2->v3, v3->v4, v5->v6, v6->v3, v3->v7;
    D={v1,v5}, T={v4,v7}. The hub is the unique single-node cut, so the
    minimum input placement is {v3}.
    """
    net = Network.from_edges(
        7, [(1, 2), (2, 3), (3, 4), (5, 6), (6, 3), (3, 7)]
    )
    return ProblemInstance(
        network=net,
        disturbances=NodeSet.of([1, 5], 7),
        targets=NodeSet.of([4, 7], 7),
    )
