"""Slot-level Monte Carlo for the ON/OFF access game.

Each slot is one play of the stage game: the active SU population is drawn
(redrawn every slot for a Poisson game unless ``population_redraw`` is
``"fixed-episode"``), each SU transmits with its type's probability, and a
type-``t`` transmission succeeds when at most ``K_max,t`` others transmit in
the same slot. When a PU model is attached, SUs stay silent in PU-ON slots;
a PU collision is counted in the first ON slot after an OFF period whenever
at least one SU would have transmitted.

Slots are processed in chunks of ``CHUNK`` slots. Chunk ``c`` draws from its
own stream ``SeedSequence(seed, spawn_key=(c,))``, so results depend only on
``(config, seed)`` and chunks can be evaluated in any order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .game import Action, FixedN, GameSpec, MixedStrategy, Poisson, expected_utility
from .pu_activity import GEModel, simulate_ge_chain
from .specfun import DEFAULT_TOL, Tolerance
from .throughput import backoff_throughput
from .two_type import TwoTypeConfig

CHUNK = 1 << 14
MIN_BATCHES = 30
REDRAW_MODES = ("per-slot", "fixed-episode")
_PU_STREAM = 1 << 40
_EPISODE_STREAM = _PU_STREAM + 1


@dataclass(frozen=True)
class BackoffPolicy:
    W0: int = 32
    max_stage: int = 5


@dataclass(frozen=True)
class SimConfig:
    game: GameSpec | TwoTypeConfig
    strategy: MixedStrategy | BackoffPolicy
    pu: GEModel | None = None
    slots: int = 100_000
    seed: int = 0
    population_redraw: str = "per-slot"
    full_rate_max_population: int | None = None

    def __post_init__(self):
        if isinstance(self.game, TwoTypeConfig):
            object.__setattr__(self, "game", self.game.to_game())
        if int(self.slots) != self.slots or self.slots < 1:
            raise DomainError(f"slots must be a positive integer, got {self.slots}")
        if int(self.seed) != self.seed or self.seed < 0 or self.seed >= 2**64:
            raise DomainError(f"seed must be an integer in [0, 2^64), got {self.seed}")
        if self.population_redraw not in REDRAW_MODES:
            raise DomainError(f"population_redraw must be one of {REDRAW_MODES}")
        if isinstance(self.strategy, MixedStrategy) and len(self.strategy.p) != self.game.n_types:
            raise DomainError(f"strategy has {len(self.strategy.p)} entries for {self.game.n_types} types")
        if self.full_rate_max_population is not None and self.full_rate_max_population < 0:
            raise DomainError("full_rate_max_population must be >= 0")


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float

    def within(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.value - target) <= n_se * self.stderr


@dataclass(frozen=True)
class SimReport:
    throughput: Estimate
    utility_on: tuple[Estimate, ...]
    utility_per_player: tuple[Estimate, ...]
    pnc: tuple[Estimate, ...]
    pc: tuple[Estimate, ...]
    p_transmit: tuple[Estimate, ...]
    psut: Estimate
    pu_collision_rate: Estimate | None
    population_mean: Estimate
    population_var: Estimate
    slots: int
    slots_on: int

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# streaming ratio estimator


class _Ratio:
    """Accumulates sum(x)/sum(y) with batch totals and slot-level moments."""

    def __init__(self):
        self.bx: list[float] = []
        self.by: list[float] = []
        self.sxx = self.syy = self.sxy = 0.0
        self.n = 0

    def add(self, x: np.ndarray, y: np.ndarray):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self.bx.append(float(x.sum()))
        self.by.append(float(y.sum()))
        self.sxx += float(x @ x)
        self.syy += float(y @ y)
        self.sxy += float(x @ y)
        self.n += x.size

    def estimate(self) -> Estimate:
        X, Y = math.fsum(self.bx), math.fsum(self.by)
        if Y == 0:
            return Estimate(0.0, 0.0)
        R = X / Y
        B = len(self.bx)
        if B >= MIN_BATCHES:
            e = np.asarray(self.bx) - R * np.asarray(self.by)
            var = B / (B - 1) * float(e @ e) / Y**2
        elif self.n > 1:
            see = max(0.0, self.sxx - 2 * R * self.sxy + R * R * self.syy)
            var = self.n / (self.n - 1) * see / Y**2
        else:
            var = 0.0
        return Estimate(R, math.sqrt(var))


class _Moments:
    """Mean and variance of a per-slot quantity with large-sample standard errors."""

    def __init__(self):
        self.s = np.zeros(5)

    def add(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        self.s += [x.size, x.sum(), (x**2).sum(), (x**3).sum(), (x**4).sum()]

    def mean_var(self) -> tuple[Estimate, Estimate]:
        n, s1, s2, s3, s4 = (float(v) for v in self.s)
        if n < 2:
            return Estimate(s1 / max(n, 1), 0.0), Estimate(0.0, 0.0)
        m = s1 / n
        var = max(0.0, (s2 - n * m * m) / (n - 1))
        # central fourth moment from the raw sums
        m4 = (s4 - 4 * m * s3 + 6 * m * m * s2 - 4 * m**3 * s1 + n * m**4) / n
        var_se = math.sqrt(max(0.0, m4 - var * var) / n)
        return Estimate(m, math.sqrt(var / n)), Estimate(var, var_se)


# ---------------------------------------------------------------------------
# slot engine


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _fixed_counts(game: GameSpec) -> np.ndarray:
    return np.asarray(game.type_counts() if game.n_types > 1 else (game.population.n,), dtype=np.int64)


def _draw_population(game: GameSpec, size: int, rng: np.random.Generator, episode: np.ndarray | None) -> np.ndarray:
    """Player counts per (slot, type)."""
    if episode is not None:
        return np.broadcast_to(episode, (size, game.n_types))
    if isinstance(game.population, FixedN):
        return np.broadcast_to(_fixed_counts(game), (size, game.n_types))
    lam = game.population.lam
    return np.column_stack([rng.poisson(lam * t.r, size=size) for t in game.types])


def _episode_population(game: GameSpec, seed: int) -> np.ndarray:
    if isinstance(game.population, FixedN):
        return _fixed_counts(game)
    rng = _chunk_rng(seed, _EPISODE_STREAM)
    lam = game.population.lam
    return np.array([rng.poisson(lam * t.r) for t in game.types], dtype=np.int64)


def run(config: SimConfig) -> SimReport:
    """Simulate ``config.slots`` slots and return empirical estimates."""
    if isinstance(config.strategy, BackoffPolicy):
        return _run_backoff(config)
    game, sigma = config.game, config.strategy
    T = game.n_types
    p = np.asarray(sigma.p)
    K = np.array([t.K_max for t in game.types])
    R = np.array([t.R for t in game.types])
    pen = np.array([t.penalty for t in game.types])

    episode = None
    if config.population_redraw == "fixed-episode" or isinstance(game.population, FixedN):
        episode = _episode_population(game, config.seed)
    pu_path = None
    if config.pu is not None:
        pu_path = simulate_ge_chain(config.pu, config.slots, _chunk_rng(config.seed, _PU_STREAM))

    thr = _Ratio()
    u_on = [_Ratio() for _ in range(T)]
    u_pl = [_Ratio() for _ in range(T)]
    pnc = [_Ratio() for _ in range(T)]
    pc = [_Ratio() for _ in range(T)]
    ptx = [_Ratio() for _ in range(T)]
    psut = _Ratio()
    pu_col = _Ratio()
    pop = _Moments()
    slots_on = 0

    n_chunks = math.ceil(config.slots / CHUNK)
    for c in range(n_chunks):
        size = min(CHUNK, config.slots - c * CHUNK)
        rng = _chunk_rng(config.seed, c)
        n = _draw_population(game, size, rng, episode)
        x = rng.binomial(n, p[None, :])
        total_pop = n.sum(axis=1)
        if config.full_rate_max_population is not None:
            small = total_pop <= config.full_rate_max_population
            x = np.where(small[:, None], n, x)
        total_tx = x.sum(axis=1)

        if pu_path is not None:
            on = pu_path[c * CHUNK : c * CHUNK + size]
            prev = np.empty(size, dtype=bool)
            if c == 0:
                prev[0] = True  # the opening slot is not a transition
            else:
                prev[0] = pu_path[c * CHUNK - 1]
            prev[1:] = on[:-1]
            first_on = on & ~prev
            pu_col.add((first_on & (total_tx > 0)).astype(float), on.astype(float))
            slots_on += int(on.sum())
            active = ~on
        else:
            active = np.ones(size, dtype=bool)

        act = active.astype(float)
        ok = total_tx[:, None] <= (K[None, :] + 1)
        succ = np.where(ok, x, 0) * act[:, None]
        fail = np.where(ok, 0, x) * act[:, None]
        x_act = x * act[:, None]
        n_act = n * act[:, None]
        thr.add(succ.sum(axis=1), np.ones(size))
        for t in range(T):
            util = R[t] * succ[:, t] - pen[t] * R[t] * fail[:, t]
            u_on[t].add(util, x_act[:, t])
            u_pl[t].add(util, n_act[:, t])
            pnc[t].add(succ[:, t], n_act[:, t])
            pc[t].add(fail[:, t], n_act[:, t])
            ptx[t].add(x_act[:, t], n_act[:, t])
        psut.add((total_tx > 0) * act, act)
        pop.add(total_pop[active])

    mean, var = pop.mean_var()
    return SimReport(
        throughput=thr.estimate(),
        utility_on=tuple(r.estimate() for r in u_on),
        utility_per_player=tuple(r.estimate() for r in u_pl),
        pnc=tuple(r.estimate() for r in pnc),
        pc=tuple(r.estimate() for r in pc),
        p_transmit=tuple(r.estimate() for r in ptx),
        psut=psut.estimate(),
        pu_collision_rate=pu_col.estimate() if pu_path is not None else None,
        population_mean=mean,
        population_var=var,
        slots=config.slots,
        slots_on=slots_on,
    )


def _run_backoff(config: SimConfig) -> SimReport:
    game = config.game
    if game.n_types != 1:
        raise DomainError("the backoff baseline supports a single type")
    if isinstance(game.population, Poisson) and config.population_redraw != "fixed-episode":
        raise DomainError("backoff with a Poisson population needs population_redraw='fixed-episode'")
    if config.pu is not None:
        raise DomainError("the backoff baseline does not model PU activity")
    N = int(_episode_population(game, config.seed).sum())
    zero = Estimate(0.0, 0.0)
    if N == 0:
        thr = zero
    else:
        res = backoff_throughput(
            N, config.strategy.W0, config.strategy.max_stage, game.types[0].K_max, config.slots, config.seed
        )
        thr = Estimate(res.value, res.stderr)
    return SimReport(
        thr, (zero,), (zero,), (zero,), (zero,), (zero,), zero, None, Estimate(float(N), 0.0), zero, config.slots, 0
    )


# ---------------------------------------------------------------------------
# designated-player probabilities

EVENTS = ("Pnc", "Pc", "PSUT")


def mc_probability(event: str, config: SimConfig, trials: int, t: int = 0) -> tuple[float, float]:
    """Frequency estimate of a per-slot event with its binomial standard error.

    ``Pnc`` / ``Pc``: a designated type-``t`` player transmits and succeeds /
    collides. Its opponents are the remaining players of a fixed population,
    or Poisson counts per type for a Poisson game. ``PSUT``: at least one SU
    transmits. PU activity in ``config`` is ignored.
    """
    if event not in EVENTS:
        raise DomainError(f"event must be one of {EVENTS}, got {event!r}")
    if trials < 10_000:
        raise DomainError(f"trials must be >= 1e4, got {trials}")
    if not isinstance(config.strategy, MixedStrategy):
        raise DomainError("mc_probability needs a mixed strategy")
    game = config.game
    p = np.asarray(config.strategy.p)
    K_t = game.types[t].K_max
    fixed = isinstance(game.population, FixedN)
    counts = _fixed_counts(game) if fixed else None
    hits = 0
    for c in range(math.ceil(trials / CHUNK)):
        size = min(CHUNK, trials - c * CHUNK)
        rng = _chunk_rng(config.seed, c)
        if fixed:
            n = np.broadcast_to(counts, (size, game.n_types))
        else:
            lam = game.population.lam
            n = np.column_stack([rng.poisson(lam * s.r, size=size) for s in game.types])
        if event == "PSUT":
            x = rng.binomial(n, p[None, :]).sum(axis=1)
            hits += int(np.count_nonzero(x > 0))
            continue
        if fixed:
            others = n - (np.arange(game.n_types) == t)[None, :]
        else:
            others = n
        x_o = rng.binomial(others, p[None, :]).sum(axis=1)
        me = rng.random(size) < p[t]
        ok = x_o <= K_t
        hits += int(np.count_nonzero(me & (ok if event == "Pnc" else ~ok)))
    est = hits / trials
    return est, math.sqrt(est * (1.0 - est) / trials)


# ---------------------------------------------------------------------------
# equilibrium dynamics


@dataclass
class ConvergenceTrace:
    iterations: list = field(default_factory=list)  # (step, p per type, U_ON per type)
    converged: bool = False

    @property
    def final_p(self) -> tuple[float, ...]:
        return self.iterations[-1][1]


def best_response_dynamics(
    game: GameSpec,
    p0: MixedStrategy,
    step: float = 0.1,
    iters: int = 500,
    tol: Tolerance = DEFAULT_TOL,
) -> ConvergenceTrace:
    """Damped indifference-gradient map ``p <- clamp(p + step * U_ON(p) / R, 0, 1)``.

    Stops once every ``|U_ON|`` is at most ``tol.abs_tol * R``. Fixed points
    are exactly the strategies where each type is indifferent or at a
    boundary it prefers.
    """
    if not 0 < step <= 1:
        raise DomainError(f"step must lie in (0, 1], got {step}")
    if iters < 0:
        raise DomainError(f"iters must be >= 0, got {iters}")
    R = np.array([t.R for t in game.types])
    p = np.array(p0.p, dtype=float)
    trace = ConvergenceTrace()

    def utilities(pv):
        sig = MixedStrategy(tuple(pv))
        return np.array([expected_utility(game, t, Action.ON, sig) for t in range(game.n_types)])

    u = utilities(p)
    trace.iterations.append((0, tuple(p), tuple(u)))
    for k in range(1, iters + 1):
        stalled = (np.abs(u) <= tol.abs_tol * R) | ((p >= 1.0) & (u > 0)) | ((p <= 0.0) & (u < 0))
        if np.all(stalled):
            trace.converged = True
            break
        p = np.clip(p + step * u / R, 0.0, 1.0)
        u = utilities(p)
        trace.iterations.append((k, tuple(p), tuple(u)))
    else:
        stalled = (np.abs(u) <= tol.abs_tol * R) | ((p >= 1.0) & (u > 0)) | ((p <= 0.0) & (u < 0))
        trace.converged = bool(np.all(stalled))
    return trace


__all__ = [
    "BackoffPolicy",
    "CHUNK",
    "ConvergenceTrace",
    "EVENTS",
    "Estimate",
    "SimConfig",
    "SimReport",
    "best_response_dynamics",
    "mc_probability",
    "run",
]
