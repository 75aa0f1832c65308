"""Primary-user ON/OFF activity and the SU transmit-probability constraint it imposes.

The PU follows a two-state Gilbert-Elliot chain. SUs sense perfectly and stay
silent while the PU is ON, so a collision with the PU is only possible in the
first ON slot after an OFF period. Averaged over ON slots this gives a
collision rate ``P_SU,T / N_on_bar`` where ``P_SU,T`` is the probability that
at least one SU transmits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError
from .single_type import p_opt_fixedN
from .specfun import as_prob, poisson_horizon, poisson_pmf
from .two_type import FrontierSegment, TwoTypeConfig, pareto_frontier


class _Unconstrained:
    """Marker: every transmit probability satisfies the collision budget."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unconstrained"

    def __bool__(self):
        return False


Unconstrained = _Unconstrained()


@dataclass(frozen=True)
class GEModel:
    P_T: float
    rho: float

    def __post_init__(self):
        as_prob(self.P_T, "P_T")
        as_prob(self.rho, "rho")
        if self.rho >= 1.0:
            raise DomainError("rho = 1 freezes the chain; need rho < 1")

    @property
    def q(self) -> float:
        """OFF -> ON transition probability."""
        return self.P_T * (1.0 - self.rho)

    @property
    def r(self) -> float:
        """ON -> OFF transition probability."""
        return (1.0 - self.P_T) * (1.0 - self.rho)

    @property
    def N_on_bar(self) -> float:
        """Mean length of an ON run."""
        if self.r == 0.0:
            return math.inf
        return 1.0 / self.r


def ge_derive(P_T: float, rho: float) -> GEModel:
    return GEModel(P_T, rho)


@dataclass(frozen=True)
class CollisionBudget:
    """Tolerated PU collision probability and the implied bound on ``P_SU,T``."""

    p_col_th: float
    N_on_bar: float = 1.0

    def __post_init__(self):
        as_prob(self.p_col_th, "p_col_th")
        if not self.N_on_bar >= 1.0:
            raise DomainError(f"N_on_bar must be >= 1, got {self.N_on_bar}")

    @classmethod
    def from_ge(cls, p_col_th: float, ge: GEModel) -> "CollisionBudget":
        return cls(p_col_th, ge.N_on_bar)

    @classmethod
    def of(cls, budget: float) -> "CollisionBudget":
        """Budget given directly as the product ``N_on_bar * p_col_th``."""
        if budget < 0:
            raise DomainError(f"budget must be >= 0, got {budget}")
        if budget <= 1.0:
            return cls(budget, 1.0)
        return cls(1.0, budget)

    @property
    def budget(self) -> float:
        return self.N_on_bar * self.p_col_th


def _budget_value(budget) -> float:
    return budget.budget if isinstance(budget, CollisionBudget) else float(budget)


# ---------------------------------------------------------------------------
# SU transmission probability


def pu_collision_prob(P_SU_T: float, ge: GEModel) -> float:
    """Average PU collision probability per ON slot."""
    P_SU_T = as_prob(P_SU_T, "P_SU_T")
    return min(1.0, max(0.0, P_SU_T / ge.N_on_bar))


def p_su_t_fixedN(p: float, N: int) -> float:
    """P(at least one of ``N`` SUs transmits) = 1 - (1-p)^N."""
    p = as_prob(p)
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if p == 1.0:
        return 1.0
    return float(-math.expm1(N * math.log1p(-p)))


def p_su_t_poisson(p: float, lam: float) -> float:
    """P(at least one SU transmits) with Pois(lam) SUs: 1 - exp(-lam p)."""
    p = as_prob(p)
    return float(-math.expm1(-lam * p))


def p_su_t_two_types(p1: float, p2: float, cfg: TwoTypeConfig) -> float:
    """P(at least one SU of either type transmits)."""
    p1, p2 = as_prob(p1, "p1"), as_prob(p2, "p2")
    if cfg.is_poisson:
        return float(-math.expm1(-cfg.lam * (cfg.r1 * p1 + cfg.r2 * p2)))
    if (p1 == 1.0 and cfg.N1 > 0) or (p2 == 1.0 and cfg.N2 > 0):
        return 1.0
    return float(-math.expm1(cfg.N1 * math.log1p(-p1) + cfg.N2 * math.log1p(-p2)))


def p_su_t_two_types_series(p1: float, p2: float, cfg: TwoTypeConfig) -> float:
    """Double sum over Poisson type counts of 1 - (1-p1)^i (1-p2)^j (normalised by e^-lam)."""
    if not cfg.is_poisson:
        raise DomainError("series form needs a Poisson population")
    m1, m2 = cfg.r1 * cfg.lam, cfg.r2 * cfg.lam
    i = np.arange(poisson_horizon(m1) + 1)
    j = np.arange(poisson_horizon(m2) + 1)
    w1 = np.atleast_1d(poisson_pmf(i, m1))
    w2 = np.atleast_1d(poisson_pmf(j, m2))
    s1 = float(np.sum(w1 * (1.0 - p1) ** i))
    s2 = float(np.sum(w2 * (1.0 - p2) ** j))
    # sum_ij (1 - a^i b^j) w1 w2 = sum w1 * sum w2 - s1 s2
    return float(w1.sum() * w2.sum() - s1 * s2)


# ---------------------------------------------------------------------------
# largest admissible transmit probability


def p_star_fixedN(N: int, budget):
    """Largest ``p`` with ``1 - (1-p)^N <= budget``; :data:`Unconstrained` if budget >= 1."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    b = _budget_value(budget)
    if b < 0:
        raise DomainError(f"budget must be >= 0, got {b}")
    if b >= 1.0:
        return Unconstrained
    return float(-math.expm1(math.log1p(-b) / N))


@dataclass(frozen=True)
class ConstrainedOptimum:
    p: float
    branch: str  # "restriction" or "pareto"
    p_star: object
    p_unconstrained: float


def p_opt_constrained_fixedN(N: int, K_max: int, budget) -> ConstrainedOptimum:
    """min(p*(N), (K+1)/(K+N)), reporting which bound is active (ties go to "pareto")."""
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N}")
    p_un = p_opt_fixedN(N, K_max)
    p_star = p_star_fixedN(N, budget)
    if p_star is Unconstrained or p_star >= p_un:
        return ConstrainedOptimum(p_un, "pareto", p_star, p_un)
    return ConstrainedOptimum(p_star, "restriction", p_star, p_un)


@dataclass(frozen=True)
class PStarPoisson:
    value: float
    taylor: float
    relative_deviation: float


TAYLOR_GROUPINGS = ("regrouped", "printed")


def p_star_poisson_series(lam: float, budget) -> float:
    """Poisson average of p*(k) over k >= 1, renormalised by 1 - e^-lam."""
    b = _budget_value(budget)
    if b >= 1.0:
        return Unconstrained
    if b <= 0.0:
        return 0.0
    horizon = poisson_horizon(lam)
    k = np.arange(1, horizon + 1)
    w = np.atleast_1d(poisson_pmf(k, lam))
    vals = -np.expm1(math.log1p(-b) / k)
    return float(np.sum(vals * w) / -math.expm1(-lam))


def p_star_poisson_taylor(lam: float, budget, grouping: str = "regrouped") -> float:
    """Closed-form large-lambda approximation of the averaged p*.

    ``"regrouped"`` reads the denominator exponent as ``lam - ln(1-b)/lam``,
    which keeps the first-order Taylor expansion around ``k = lam`` and tends
    to ``1 - (1-b)^(1/lam)``. ``"printed"`` takes the exponent as
    ``lam - ln(1-b)``, which tends to ``b`` instead.
    """
    if grouping not in TAYLOR_GROUPINGS:
        raise DomainError(f"grouping must be one of {TAYLOR_GROUPINGS}, got {grouping!r}")
    b = _budget_value(budget)
    if b >= 1.0:
        return Unconstrained
    if b <= 0.0:
        return 0.0
    L = math.log1p(-b)
    # numerator / denominator shares a factor e^lam; divide it out to avoid overflow
    num = lam - (lam + L) * math.exp(-lam)
    shift = L / lam if grouping == "regrouped" else L
    return float(1.0 - num / (lam * math.exp(-shift)))


def p_star_poisson(lam: float, budget, grouping: str = "regrouped"):
    """Exact series value of the averaged p*, with the closed form as a diagnostic."""
    if lam < 5:
        raise DomainError(f"p_star_poisson assumes lambda >= 5, got {lam}")
    b = _budget_value(budget)
    if b >= 1.0:
        return Unconstrained
    value = p_star_poisson_series(lam, b)
    taylor = p_star_poisson_taylor(lam, b, grouping)
    dev = abs(taylor - value) / value if value > 0 else 0.0
    return PStarPoisson(value, taylor, dev)


# ---------------------------------------------------------------------------
# restriction frontier and admissible region


def restriction_endpoints(cfg: TwoTypeConfig, budget) -> tuple[float, float]:
    """(p1*, p2*): admissible transmit probability of each type acting alone."""
    if cfg.is_poisson:
        a = p_star_poisson(cfg.r1 * cfg.lam, budget)
        b = p_star_poisson(cfg.r2 * cfg.lam, budget)
        if a is Unconstrained:
            return Unconstrained
        return a.value, b.value
    a = p_star_fixedN(cfg.N1, budget)
    if a is Unconstrained:
        return Unconstrained
    if cfg.N2 < 1:
        raise DomainError("restriction frontier needs N2 >= 1")
    return a, p_star_fixedN(cfg.N2, budget)


def restriction_frontier(cfg: TwoTypeConfig, budget):
    """Straight line from (p1*, 0) to (0, p2*); :data:`Unconstrained` if budget >= 1."""
    ends = restriction_endpoints(cfg, budget)
    if ends is Unconstrained:
        return Unconstrained
    p1s, p2s = ends
    m = -p2s / p1s
    mid = (0.5 * p1s, 0.5 * p2s)
    return FrontierSegment(m, m, mid, ((0.0, p2s), (p1s, 0.0)))


class Regime(enum.Enum):
    RESTRICTION_BINDING = "RestrictionBinding"
    PARETO_BINDING = "ParetoBinding"
    MIXED = "Mixed"


@dataclass(frozen=True)
class RegionClassification:
    regime: Regime
    crossings: tuple[float, ...]
    p1: np.ndarray = field(repr=False)
    operating: np.ndarray = field(repr=False)
    pareto: FrontierSegment | None = None
    restriction: object = None


def admissible_region(
    cfg: TwoTypeConfig,
    budget,
    pareto: FrontierSegment | None = None,
    n: int = 401,
    tol: float = 1e-12,
) -> RegionClassification:
    """Compare the Pareto and restriction frontiers and return the operating curve.

    Both curves are sampled on a common p1 grid (extended by zero beyond
    their right endpoints) that includes every vertex. The operating curve is
    their pointwise minimum in p2, reported only where both curves are
    defined, so ``p1`` stops at the nearer right endpoint.
    """
    if pareto is None:
        pareto = pareto_frontier(cfg)
    restr = restriction_frontier(cfg, budget)
    if restr is Unconstrained:
        grid = np.unique(np.concatenate([np.linspace(0.0, pareto.right, n), pareto.vertices[:, 0]]))
        return RegionClassification(Regime.PARETO_BINDING, (), grid, pareto.p2_at(grid), pareto, restr)
    hi = max(pareto.right, restr.right)
    grid = np.unique(
        np.concatenate([np.linspace(0.0, hi, n), pareto.vertices[:, 0], restr.vertices[:, 0]])
    )
    a = pareto.p2_at(grid)
    b = restr.p2_at(grid)
    diff = b - a
    operating = np.minimum(a, b)
    live = (a > tol) | (b > tol)
    d = diff[live]
    if np.all(d <= tol):
        regime = Regime.RESTRICTION_BINDING
    elif np.all(d >= -tol):
        regime = Regime.PARETO_BINDING
    else:
        regime = Regime.MIXED
    crossings = []
    if regime is Regime.MIXED:
        g = grid[live]
        sign = np.sign(np.where(np.abs(d) <= tol, 0.0, d))
        nz = np.flatnonzero(sign)
        for i, j in zip(nz[:-1], nz[1:]):
            if sign[i] != sign[j]:
                # linear interpolation between the bracketing samples
                x0, x1, d0, d1 = g[i], g[j], d[i], d[j]
                crossings.append(float(x0 - d0 * (x1 - x0) / (d1 - d0)))
        if not crossings:
            raise NumericError("frontiers change order but no crossing was located")
    shared = grid <= min(pareto.right, restr.right)
    return RegionClassification(regime, tuple(crossings), grid[shared], operating[shared], pareto, restr)


# ---------------------------------------------------------------------------
# chain simulation


def simulate_ge_chain(ge: GEModel, steps: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Boolean ON/OFF path of ``steps`` slots, started from the stationary law.

    Runs are drawn as alternating geometric lengths (mean ``1/r`` for ON,
    ``1/q`` for OFF), which reproduces the chain exactly.
    """
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    rng = np.random.default_rng(rng)
    if ge.q == 0.0 or ge.r == 0.0:
        state = ge.P_T >= 1.0 if ge.r == 0.0 else False
        return np.full(steps, bool(state))
    start = bool(rng.random() < ge.P_T)
    mean_pair = 1.0 / ge.r + 1.0 / ge.q
    pieces, total = [], 0
    while total < steps:
        n_pairs = int(1.2 * (steps - total) / mean_pair) + 16
        first = rng.geometric(ge.r if start else ge.q, size=n_pairs)
        second = rng.geometric(ge.q if start else ge.r, size=n_pairs)
        runs = np.column_stack([first, second]).ravel()
        pieces.append(runs)
        total += int(runs.sum())
    runs = np.concatenate(pieces)
    values = np.zeros(len(runs), dtype=bool)
    values[0::2] = start
    values[1::2] = not start
    return np.repeat(values, runs)[:steps]


def on_run_lengths(path: np.ndarray) -> np.ndarray:
    """Lengths of the complete ON runs in a boolean path (edge runs dropped)."""
    x = np.asarray(path, dtype=np.int8)
    d = np.diff(np.concatenate([[0], x, [0]]))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    lengths = ends - starts
    keep = (starts > 0) & (ends < len(x))
    return lengths[keep]


__all__ = [
    "CollisionBudget",
    "ConstrainedOptimum",
    "GEModel",
    "PStarPoisson",
    "Regime",
    "RegionClassification",
    "Unconstrained",
    "admissible_region",
    "ge_derive",
    "on_run_lengths",
    "p_opt_constrained_fixedN",
    "p_star_fixedN",
    "p_star_poisson",
    "p_star_poisson_series",
    "p_star_poisson_taylor",
    "p_su_t_fixedN",
    "p_su_t_poisson",
    "p_su_t_two_types",
    "p_su_t_two_types_series",
    "pu_collision_prob",
    "restriction_endpoints",
    "restriction_frontier",
    "simulate_ge_chain",
]
