"""Exception hierarchy shared by all curvgraph modules.

Two broad classes matter for the CLI exit codes: input/validation problems
(exit code 2) and numerical solver failures (exit code 3).
"""


class CurvGraphError(Exception):
    """Base class for all curvgraph errors."""

    exit_code = 3


class ChainValidationError(CurvGraphError):
    """Invalid chain, field, measure or distance input."""

    exit_code = 2


class RowSumViolation(ChainValidationError):
    """A kernel row does not sum to one within tolerance."""


class NotIrreducible(ChainValidationError):
    """The directed support graph of the kernel is not strongly connected."""


class NotReversible(ChainValidationError):
    """Detailed balance fails for the computed stationary measure."""


class UnsupportedSize(ChainValidationError):
    """Builder parameters outside the supported range."""


class NegativeDensity(ChainValidationError):
    """A density argument has negative entries."""


class NonPositiveField(ChainValidationError):
    """A field that must be strictly positive has entries at or below the floor."""


class DimensionMismatch(ChainValidationError):
    """Vectors or matrices do not share the expected state space."""


class NonFiniteDistance(ChainValidationError):
    """A distance matrix contains non-finite entries."""


class BadPartition(ChainValidationError):
    """A two-block partition is degenerate (empty block or zero mass)."""


class SolverError(CurvGraphError):
    """A numerical subroutine failed to produce a certified answer."""


class TruncationFailure(SolverError):
    """The uniformization series hit the term cap before the tail bound."""


class DegenerateForm(SolverError):
    """The local quadratic-form pencil failed its rank checks."""


class LPInfeasible(SolverError):
    """A linear program reported infeasibility; on valid inputs this is a bug."""


class InfeasibleMixture(SolverError):
    """The kernel-family mixture constraint could not be met; signals a bug."""


class Unbounded(SolverError):
    """A convex program is unbounded (disconnected chain slipped through)."""
