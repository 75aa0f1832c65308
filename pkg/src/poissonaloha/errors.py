"""Exception hierarchy shared by the analytic modules, simulator and CLI."""


class PoissonAlohaError(Exception):
    """Base class for all package errors."""


class DomainError(PoissonAlohaError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(PoissonAlohaError, ValueError):
    """Root finding was asked to search an interval without a sign change."""


class NumericError(PoissonAlohaError, ArithmeticError):
    """An iterative routine failed to converge."""


class NoEquilibriumError(PoissonAlohaError):
    """The equilibrium equation has no solution for the given penalty."""


class InfinitePenaltyError(PoissonAlohaError):
    """Collisions are (numerically) impossible, so no finite penalty exists."""


class DegenerateFrontierError(PoissonAlohaError):
    """The three frontier anchor points are not ordered as a valid frontier."""
