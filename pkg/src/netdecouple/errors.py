"""Exception types shared across the package.

The CLI maps these onto its exit codes: malformed input and role-set
violations exit 2, infeasibility exits 3, size caps exit 4.
"""


class NetworkError(ValueError):
    """Malformed graph data: bad node ids, duplicate edges, zero weights."""


class FileFormatError(ValueError):
    """Instance file could not be parsed."""


class InstanceViolation(ValueError):
    """Role sets violate the disjointness/nonemptiness requirements."""


class InfeasibleProblem(RuntimeError):
    """No decoupling solution exists for the requested feedback structure."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ExtremalCutInsufficient(InfeasibleProblem):
    """The two extremal cuts failed the joint feasibility check.

    Raised instead of silently falling back; an occurrence is a recorded
    counterexample, not an expected code path.
    """


class FlowUnbounded(RuntimeError):
    """Every source-sink cut crosses a forbidden split edge."""


class SizeCapExceeded(RuntimeError):
    """An exponential-time oracle was asked to exceed its hard size cap."""


class PremiseViolation(ValueError):
    """A synthesis formula was invoked outside its uniqueness premise."""
