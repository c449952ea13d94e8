"""Disturbance decoupling over directed networks.

Given a weighted digraph with disturbance and target nodes, this package
computes the node-set counterparts of controlled/conditioned invariant
subspaces, places minimum-cardinality input and output nodes via
max-flow/min-cut, synthesizes the decoupling feedback laws (state
feedback, static output feedback, reduced-order observer compensator),
and certifies the result exactly and by simulation.
"""

from netdecouple.errors import (
    ExtremalCutInsufficient,
    FileFormatError,
    FlowUnbounded,
    InfeasibleProblem,
    InstanceViolation,
    NetworkError,
    PremiseViolation,
    SizeCapExceeded,
)
from netdecouple.invariance import (
    InvarianceResult,
    is_cab_pair,
    is_conditioned_invariant,
    is_controlled_invariant,
    is_invariant_set,
    max_controlled_invariant,
    min_conditioned_invariant,
    sstar,
    zstar,
)
from netdecouple.mincut import (
    CutResult,
    ExtendedNetwork,
    build_extended,
    max_flow_min_cut,
    solve_min_ddpdf,
    solve_min_ddpof,
    solve_min_ddpsf,
)
from netdecouple.network import (
    Network,
    NodeSet,
    ProblemInstance,
    boundary,
    indicator_matrix,
    neighbors,
    reachable_avoiding,
    transpose,
    validate_instance,
)
from netdecouple.solvability import (
    SolvabilityReport,
    construct_w,
    ddpdf_solvable,
    ddpof_solvable,
    ddpsf_solvable,
    path_indexes,
)
from netdecouple.synthesis import (
    ClosedLoop,
    Compensator,
    WeightedSystem,
    assemble_closed_loop,
    assign_random_weights,
    design_dynamic_feedback,
    design_output_feedback,
    design_state_feedback,
    friend_output_injection,
    friend_state_feedback,
    full_order_compensator,
    output_feedback_gain,
    projection_map,
    reduced_order_compensator,
    weighted_system,
)
from netdecouple.verify import (
    TOLERANCE,
    DisturbanceSignal,
    VerificationReport,
    closed_loop_residual,
    decoupling_residual,
    invariance_residual,
    simulate,
)

__version__ = "0.1.0"
