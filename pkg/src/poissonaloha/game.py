"""Poisson games with the ON/OFF action set.

A game is the tuple (population, types, r, {ON, OFF}, u): the population is
either a known number of players or a Poisson number with mean ``lam``, each
player independently belongs to type ``t`` with probability ``r[t]``, and a
type-``t`` player that transmits earns ``R_t`` when at most ``K_max,t`` other
players transmit in the same slot and ``-penalty_t * R_t`` otherwise.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError
from .specfun import DEFAULT_TOL, Tolerance, as_prob, binom_pmf_vector, poisson_cdf, poisson_horizon, poisson_pmf


class Action(enum.Enum):
    ON = "ON"
    OFF = "OFF"


@dataclass(frozen=True)
class FixedN:
    """Known population of ``n`` players."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"FixedN requires a positive integer n, got {self.n}")


@dataclass(frozen=True)
class Poisson:
    """Poisson-distributed population with mean ``lam``."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"Poisson population requires lambda > 0, got {self.lam}")


PopulationModel = Union[FixedN, Poisson]


@dataclass(frozen=True)
class TypeSpec:
    r: float = 1.0
    R: float = 1.0
    K_max: int = 0
    penalty: float = 0.0

    def __post_init__(self):
        as_prob(self.r, "r")
        if not self.R > 0:
            raise DomainError(f"rate payoff R must be > 0, got {self.R}")
        if int(self.K_max) != self.K_max or self.K_max < 0:
            raise DomainError(f"K_max must be a non-negative integer, got {self.K_max}")
        if self.penalty < 0:
            raise DomainError(f"penalty must be >= 0, got {self.penalty}")


@dataclass(frozen=True)
class GameSpec:
    """Population model plus the list of player types.

    For a ``FixedN`` population with several types, the type probabilities
    must split ``n`` into whole numbers of players (``n * r[t]`` integral).
    """

    population: PopulationModel
    types: tuple[TypeSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        if not self.types:
            raise DomainError("a game needs at least one type")
        total = sum(t.r for t in self.types)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"type probabilities must sum to 1, got {total}")
        if isinstance(self.population, Poisson):
            if poisson_pmf(0, self.population.lam) >= 0.01:
                warnings.warn(
                    f"lambda={self.population.lam} leaves P(no players) >= 0.01; "
                    "Poisson-game approximations may be poor",
                    stacklevel=3,
                )
        else:
            self.type_counts()

    @classmethod
    def single(cls, population: PopulationModel, K_max: int, penalty: float = 0.0, R: float = 1.0) -> "GameSpec":
        return cls(population, (TypeSpec(1.0, R, K_max, penalty),))

    @property
    def n_types(self) -> int:
        return len(self.types)

    def type_counts(self) -> tuple[int, ...]:
        """Players per type for a ``FixedN`` population."""
        if not isinstance(self.population, FixedN):
            raise DomainError("type counts exist only for a FixedN population")
        counts = []
        for t in self.types:
            c = self.population.n * t.r
            if abs(c - round(c)) > 1e-9:
                raise DomainError(f"n * r = {c} is not an integer number of players")
            counts.append(int(round(c)))
        return tuple(counts)

    def with_penalties(self, penalties) -> "GameSpec":
        types = tuple(
            TypeSpec(t.r, t.R, t.K_max, float(a)) for t, a in zip(self.types, penalties, strict=True)
        )
        return GameSpec(self.population, types)


@dataclass(frozen=True)
class MixedStrategy:
    """Per-type probability of playing ON."""

    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(as_prob(x, f"p[{i}]") for i, x in enumerate(np.atleast_1d(self.p)))
        object.__setattr__(self, "p", p)

    @classmethod
    def uniform(cls, p: float, n_types: int = 1) -> "MixedStrategy":
        return cls((p,) * n_types)

    def sigma(self, t: int, action: Action) -> float:
        return self.p[t] if action is Action.ON else 1.0 - self.p[t]


@dataclass(frozen=True)
class ActionProfile:
    """Number of *other* players choosing each action."""

    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        for a, c in self.counts.items():
            if int(c) != c or c < 0:
                raise DomainError(f"action count for {a} must be a non-negative integer, got {c}")

    def __getitem__(self, action: Action) -> int:
        return int(self.counts.get(action, 0))


def payoff(game: GameSpec, t: int, action: Action, profile: ActionProfile) -> float:
    """Pure payoff u_t(a, x) of one slot."""
    if action is Action.OFF:
        return 0.0
    ts = game.types[t]
    if profile[Action.ON] <= ts.K_max:
        return ts.R
    return -ts.penalty * ts.R


def _check_sigma(game: GameSpec, sigma: MixedStrategy):
    if len(sigma.p) != game.n_types:
        raise DomainError(f"strategy has {len(sigma.p)} entries for {game.n_types} types")


def effective_on_rate(game: GameSpec, sigma: MixedStrategy) -> float:
    """Mean number of ON players, ``lam * sum_t r(t) p_t`` (``n * ...`` for FixedN)."""
    _check_sigma(game, sigma)
    tau = sum(ts.r * p for ts, p in zip(game.types, sigma.p))
    if isinstance(game.population, Poisson):
        return game.population.lam * tau
    return game.population.n * tau


def others_on_pmf(game: GameSpec, t: int, sigma: MixedStrategy) -> np.ndarray:
    """Distribution of the number of ON players a type-``t`` player faces.

    For a Poisson population this is Poisson(lam * tau(ON)) truncated at the
    usual horizon; for a fixed population it is the convolution of
    Binomial(N_s - [s == t], p_s) over types ``s``.
    """
    _check_sigma(game, sigma)
    if isinstance(game.population, Poisson):
        mu = effective_on_rate(game, sigma)
        return np.atleast_1d(poisson_pmf(np.arange(poisson_horizon(mu) + 1), mu))
    pmf = np.array([1.0])
    for s, (n_s, p_s) in enumerate(zip(game.type_counts(), sigma.p)):
        n_others = n_s - (1 if s == t else 0)
        if n_others > 0:
            pmf = np.convolve(pmf, binom_pmf_vector(n_others, p_s))
    return pmf


def prob_others_at_most(game: GameSpec, t: int, sigma: MixedStrategy, k: int) -> float:
    """P(number of other ON players <= k)."""
    if isinstance(game.population, Poisson):
        return poisson_cdf(k, effective_on_rate(game, sigma))
    pmf = others_on_pmf(game, t, sigma)
    return float(min(1.0, pmf[: k + 1].sum()))


def expected_utility(game: GameSpec, t: int, action: Action, sigma: MixedStrategy) -> float:
    """U_t(a, sigma): expected payoff of a type-``t`` player choosing ``action``."""
    _check_sigma(game, sigma)
    if action is Action.OFF:
        return 0.0
    ts = game.types[t]
    q = prob_others_at_most(game, t, sigma, ts.K_max)
    return ts.R * q - ts.penalty * ts.R * (1.0 - q)


def mixed_utility(game: GameSpec, t: int, sigma: MixedStrategy) -> float:
    """Utility of playing one's own part of ``sigma``: ``p_t * U_t(ON, sigma)``."""
    return sigma.p[t] * expected_utility(game, t, Action.ON, sigma)


def best_response_set(game: GameSpec, t: int, sigma: MixedStrategy, tol: Tolerance = DEFAULT_TOL) -> frozenset:
    u_on = expected_utility(game, t, Action.ON, sigma)
    u_off = 0.0
    if abs(u_on - u_off) <= tol.abs_tol:
        return frozenset({Action.ON, Action.OFF})
    return frozenset({Action.ON}) if u_on > u_off else frozenset({Action.OFF})


def is_nash(game: GameSpec, sigma: MixedStrategy, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True when every action played with probability > abs_tol is a best response."""
    for t in range(game.n_types):
        br = best_response_set(game, t, sigma, tol)
        for action in Action:
            if sigma.sigma(t, action) > tol.abs_tol and action not in br:
                return False
    return True


def designated_player_utility(lam: float, K_max: int, p: float, R: float = 1.0) -> float:
    """Average utility of a designated player when the total count is Poisson.

    Conditions on ``i`` total players (the designated one included) drawn from
    Poisson(lam) and averages the per-player share ``n / i`` of the ``n``
    successful transmitters. This differs from :func:`mixed_utility` on a
    Poisson game, where the *other* players are Poisson(lam): here the others
    number ``i - 1``.
    """
    p = as_prob(p)
    horizon = poisson_horizon(lam)
    total = 0.0
    for i in range(1, horizon + 1):
        w = poisson_pmf(i, lam)
        if w == 0.0:
            continue
        ks = np.arange(1, min(K_max + 1, i) + 1)
        bpmf = binom_pmf_vector(i, p)
        total += w * float(np.sum(ks / i * bpmf[ks]))
    return R * total


__all__ = [
    "Action",
    "ActionProfile",
    "FixedN",
    "GameSpec",
    "MixedStrategy",
    "Poisson",
    "PopulationModel",
    "TypeSpec",
    "best_response_set",
    "effective_on_rate",
    "designated_player_utility",
    "expected_utility",
    "is_nash",
    "mixed_utility",
    "others_on_pmf",
    "payoff",
    "prob_others_at_most",
]
