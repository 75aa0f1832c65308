"""Equilibria, optimal transmit probabilities and optimal penalties for one SU type.

Two populations are covered: a known number ``N`` of players and a Poisson
number with mean ``lam``. Penalties are expressed as multiples of the rate
payoff ``R`` (a collided transmission earns ``-alpha * R``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import special

from .errors import DomainError, InfinitePenaltyError, NoEquilibriumError
from .game import Action, FixedN, GameSpec, MixedStrategy, Poisson, expected_utility
from .specfun import (
    Tolerance,
    as_prob,
    binom_cdf,
    binom_pmf,
    find_root,
    poisson_cdf,
    poisson_horizon,
    poisson_pmf,
    poisson_sf,
)

ROOT_TOL = Tolerance(abs_tol=1e-15, max_iter=500)

ALPHA_FORMS = ("indifference", "printed")


@dataclass(frozen=True)
class EquilibriumResult:
    p_eq: float
    alpha: float
    residual: float


def _check_n(N: int, minimum: int = 2):
    if int(N) != N or N < minimum:
        raise DomainError(f"N must be an integer >= {minimum}, got {N}")


def p_eq_fixedN(alpha: float, N: int) -> float:
    """Mixed equilibrium of the single-success game: ``1 - (alpha/(1+alpha))**(1/(N-1))``."""
    _check_n(N)
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0:
        return 1.0
    if math.isinf(alpha):
        return 0.0
    # log-space keeps precision when alpha/(1+alpha) is close to 1
    return float(-math.expm1(-math.log1p(1.0 / alpha) / (N - 1)))


def alpha_star_K1(N: int) -> float:
    """Penalty that puts the single-success equilibrium at ``p = 1/N``."""
    _check_n(N)
    # (N/(N-1))**(N-1) - 1 without cancellation for large N
    return 1.0 / math.expm1((N - 1) * math.log1p(1.0 / (N - 1)))


def pnc_exact(p: float, N: int, K_max: int) -> float:
    """Probability that a given player transmits and at most ``K_max`` others do."""
    p = as_prob(p)
    _check_n(N, 1)
    return p * binom_cdf(K_max, N - 1, p)


def pnc_gaussian(p: float, N: int, K_max: int) -> float:
    """Normal approximation (with continuity correction) of P(Binom(N-1, p) <= K_max).

    Unlike :func:`pnc_exact` there is no leading factor ``p``: the value
    approximates the chance of no collision *given* a transmission.
    """
    p = as_prob(p)
    _check_n(N, 1)
    if p == 0.0:
        return 1.0 if K_max >= 0 else 0.0
    if p == 1.0:
        return 1.0 if N - 1 <= K_max else 0.0
    m = N - 1
    z = (K_max + 0.5 - m * p) / math.sqrt(m * p * (1.0 - p))
    return float(min(1.0, max(0.0, special.ndtr(z))))


def p_opt_fixedN(N: int, K_max: int) -> float:
    """Approximate throughput-optimal transmit probability ``(K+1)/(K+N)``."""
    _check_n(N)
    return min(1.0, (K_max + 1) / (K_max + N))


def utility_on_fixedN(p: float, N: int, K_max: int, alpha: float, R: float = 1.0) -> float:
    """ON-utility ``R P_nc - alpha R P_c`` with conditional (given-transmit) probabilities."""
    game = GameSpec.single(FixedN(N), K_max, alpha, R)
    return expected_utility(game, 0, Action.ON, MixedStrategy((p,)))


def _alpha_ratio_fixed(p: float, N: int, K_max: int, form: str) -> float:
    if form not in ALPHA_FORMS:
        raise DomainError(f"form must be one of {ALPHA_FORMS}, got {form!r}")
    if K_max >= N - 1:
        raise InfinitePenaltyError(f"K_max={K_max} >= N-1={N - 1}: collisions are impossible")
    ks = np.arange(N)
    pmf = np.atleast_1d(binom_pmf(ks, N - 1, p))
    num = float(pmf[: K_max + 1].sum())
    if form == "printed":
        den = float(pmf[K_max:].sum())
    else:
        den = float(pmf[K_max + 1 :].sum())
    if den <= 0.0:
        raise InfinitePenaltyError("collision probability is zero at the evaluation point")
    return num / den


def alpha_star_fixedN(N: int, K_max: int, form: str = "indifference") -> float:
    """Penalty that makes ``p_opt_fixedN(N, K_max)`` an equilibrium.

    ``form="indifference"`` returns ``P_nc / (1 - P_nc)`` so that the ON-utility
    vanishes exactly at ``p_opt``. ``form="printed"`` sums the collision side
    from ``i = K_max`` instead of ``K_max + 1``, counting the boundary term on
    both sides of the ratio.
    """
    _check_n(N)
    return _alpha_ratio_fixed(p_opt_fixedN(N, K_max), N, K_max, form)


def p_eq_fixed(alpha: float, N: int, K_max: int, tol: Tolerance = ROOT_TOL) -> float:
    """Transmit probability at which the ON-utility vanishes, for any ``K_max``.

    Reduces to :func:`p_eq_fixedN` for ``K_max = 0``. Returns 1 when ON is
    weakly preferred even at ``p = 1`` (no interior equilibrium).
    """
    _check_n(N)
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if K_max >= N - 1:
        return 1.0

    def u(p):
        return utility_on_fixedN(p, N, K_max, alpha)

    if u(1.0) >= 0.0:
        return 1.0
    return find_root(u, 0.0, 1.0, tol)


def solve_fixedN(N: int, K_max: int, form: str = "indifference") -> EquilibriumResult:
    p = p_opt_fixedN(N, K_max)
    alpha = alpha_star_fixedN(N, K_max, form)
    return EquilibriumResult(p, alpha, abs(utility_on_fixedN(p, N, K_max, alpha)))


# ---------------------------------------------------------------------------
# random populations


@dataclass(frozen=True)
class PopulationPmf:
    """Distribution of the number of players.

    ``pmf`` maps each ``N >= 1`` to its probability; ``zero_mass`` is P(N = 0).
    ``lam`` is set for Poisson populations and enables closed forms.
    """

    pmf: Mapping[int, float]
    zero_mass: float = 0.0
    lam: float | None = None
    _support: np.ndarray = field(init=False, repr=False, compare=False)
    _probs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        as_prob(self.zero_mass, "zero_mass")
        if any(int(n) != n or n < 1 for n in self.pmf):
            raise DomainError("pmf keys must be integers >= 1 (put P(N=0) in zero_mass)")
        support = np.array(sorted(self.pmf), dtype=float)
        probs = np.array([self.pmf[int(n)] for n in support], dtype=float)
        total = probs.sum() + self.zero_mass
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"population pmf sums to {total}, not 1")
        object.__setattr__(self, "_support", support)
        object.__setattr__(self, "_probs", probs)

    @classmethod
    def poisson(cls, lam: float) -> "PopulationPmf":
        if not lam > 0:
            raise DomainError(f"lambda must be > 0, got {lam}")
        ns = np.arange(1, poisson_horizon(lam) + 1)
        probs = np.atleast_1d(poisson_pmf(ns, lam))
        return cls({int(n): float(w) for n, w in zip(ns, probs) if w > 0}, math.exp(-lam), lam)

    @classmethod
    def fixed(cls, n0: int) -> "PopulationPmf":
        _check_n(n0, 1)
        return cls({int(n0): 1.0}, 0.0)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float]) -> "PopulationPmf":
        rest = {int(n): float(w) for n, w in mapping.items() if n != 0}
        return cls(rest, float(mapping.get(0, 0.0)))

    def conditioned_nonempty(self) -> "PopulationPmf":
        """The same distribution conditioned on at least one player."""
        if self.zero_mass == 0.0:
            return self
        scale = 1.0 - self.zero_mass
        return PopulationPmf({n: w / scale for n, w in self.pmf.items()}, 0.0, self.lam)


def F_N(theta: float, pop: PopulationPmf) -> float:
    """Generating sum ``sum_{N>=1} theta**(N-1) P_N(N)``."""
    theta = as_prob(theta, "theta")
    if pop.lam is not None:
        lam = pop.lam
        scale = 1.0 if pop.zero_mass > 0 else 1.0 / (1.0 - math.exp(-lam))
        if theta == 0.0:
            return scale * lam * math.exp(-lam)
        # e^-lam (e^(theta lam) - 1) / theta, written to avoid overflow
        return scale * math.exp(lam * (theta - 1.0)) * -math.expm1(-theta * lam) / theta
    return float(np.sum(np.power(theta, pop._support - 1.0) * pop._probs))


def p_eq_random(
    alpha: float,
    pop: PopulationPmf,
    tol: Tolerance = ROOT_TOL,
    condition_nonempty: bool = True,
) -> float:
    """Equilibrium transmit probability for a random population (single success).

    Solves ``F_N(theta) = alpha/(1+alpha) * (1 - P_N(0))`` for ``theta = 1 - p``.
    """
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0:
        return 1.0
    if condition_nonempty:
        pop = pop.conditioned_nonempty()
    target = alpha / (1.0 + alpha) * (1.0 - pop.zero_mass)
    lo_val, hi_val = F_N(0.0, pop), F_N(1.0, pop)
    if not lo_val <= target <= hi_val:
        raise NoEquilibriumError(
            f"target {target:.6g} outside the range [{lo_val:.6g}, {hi_val:.6g}] of F_N"
        )
    theta = find_root(lambda th: F_N(th, pop) - target, 0.0, 1.0, tol)
    return 1.0 - theta


def pnc_poisson(p: float, lam: float, K_max: int) -> float:
    """P(transmit and no collision) in a Poisson game: ``p P(Pois(lam p) <= K_max)``."""
    p = as_prob(p)
    return p * poisson_cdf(K_max, lam * p)


def utility_on_poisson(p: float, lam: float, K_max: int, alpha: float, R: float = 1.0) -> float:
    game = GameSpec.single(Poisson(lam), K_max, alpha, R)
    return expected_utility(game, 0, Action.ON, MixedStrategy((p,)))


def p_eq_poisson(alpha: float, lam: float, K_max: int, tol: Tolerance = ROOT_TOL) -> float:
    """Root of the Poisson-game ON-utility in ``p`` (1 if ON is preferred everywhere)."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")

    def u(p):
        return utility_on_poisson(p, lam, K_max, alpha)

    if u(1.0) >= 0.0:
        return 1.0
    return find_root(u, 0.0, 1.0, tol)


def p_opt_poisson_full(lam: float, K_max: int) -> float:
    """Population-averaged optimum: 1 for ``N <= K_max``, ``(K+1)/(K+N)`` beyond."""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    ns = np.arange(poisson_horizon(lam) + 1)
    w = np.atleast_1d(poisson_pmf(ns, lam))
    per_n = np.where(ns <= K_max, 1.0, (K_max + 1) / (K_max + ns))
    return float(np.sum(w * per_n))


def p_opt_poisson(lam: float, K_max: int) -> float:
    """Large-population approximation ``(K+1)/(lam+K-1)``, clamped to (0, 1]."""
    if lam + K_max <= 1:
        raise DomainError(f"need lambda + K_max > 1 (lambda={lam}, K_max={K_max})")
    return min(1.0, (K_max + 1) / (lam + K_max - 1))


def alpha_star_poisson(lam: float, K_max: int, form: str = "indifference") -> float:
    """Penalty for the Poisson population at ``p = p_opt_poisson(lam, K_max)``.

    ``form="indifference"`` is ``P(Pois(lam p) <= K) / P(Pois(lam p) > K)``,
    which zeroes the Poisson-game ON-utility at ``p``. ``form="printed"``
    evaluates the population-weighted double-sum ratio over ``N > K_max`` with
    the collision side summed from ``i = K_max``.
    """
    if form not in ALPHA_FORMS:
        raise DomainError(f"form must be one of {ALPHA_FORMS}, got {form!r}")
    if not lam > K_max:
        # the others rarely exceed K_max, so no finite penalty balances ON and OFF
        raise InfinitePenaltyError(f"need lambda > K_max for a finite penalty (lambda={lam}, K_max={K_max})")
    p = p_opt_poisson(lam, K_max)
    if form == "indifference":
        num = poisson_cdf(K_max, lam * p)
        den = poisson_sf(K_max, lam * p)
    else:
        num = den = 0.0
        for n in range(K_max + 1, poisson_horizon(lam) + 1):
            w = poisson_pmf(n, lam)
            if w == 0.0:
                continue
            pmf = np.atleast_1d(binom_pmf(np.arange(n), n - 1, p))
            num += w * float(pmf[: K_max + 1].sum())
            den += w * float(pmf[K_max:].sum())
    if den < 1e-300:
        raise InfinitePenaltyError(f"collision mass {den:.3g} is negligible for K_max={K_max}")
    return num / den


def solve_poisson(lam: float, K_max: int, form: str = "indifference") -> EquilibriumResult:
    p = p_opt_poisson(lam, K_max)
    alpha = alpha_star_poisson(lam, K_max, form)
    return EquilibriumResult(p, alpha, abs(utility_on_poisson(p, lam, K_max, alpha)))
