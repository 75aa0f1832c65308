"""Random-access games for secondary users with multipacket reception.

Analytic equilibria and optimal transmit probabilities for fixed and Poisson
populations, two-type Pareto frontiers, primary-user protection constraints,
a slot-level simulator and the backoff baseline.
"""

__version__ = "0.1.0"

from . import game, pu_activity, simulator, single_type, specfun, throughput, two_type  # noqa: E402,F401
from .errors import (  # noqa: E402,F401
    BracketError,
    DegenerateFrontierError,
    DomainError,
    InfinitePenaltyError,
    NoEquilibriumError,
    NumericError,
    PoissonAlohaError,
)
