"""Two SU types: non-collision probabilities, Pareto frontiers and the penalty pair.

Type ``t`` tolerates at most ``K_t`` other simultaneous transmitters of either
type. Utilities are ``U_t = R_t * P_nc^(t)`` where ``P_nc^(t)`` is the
probability that a type-``t`` player transmits without collision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateFrontierError, DomainError, InfinitePenaltyError
from .game import FixedN, GameSpec, Poisson, TypeSpec
from .specfun import as_prob, binom_pmf_vector, poisson_horizon, poisson_pmf


@dataclass(frozen=True)
class TwoTypeConfig:
    """Two-type game configuration; build with :meth:`fixed` or :meth:`poisson`."""

    K1: int
    K2: int
    R1: float = 1.0
    R2: float = 1.0
    N1: int | None = None
    N2: int | None = None
    lam: float | None = None
    r1: float | None = None

    def __post_init__(self):
        for name in ("K1", "K2"):
            k = getattr(self, name)
            if int(k) != k or k < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {k}")
        if self.R1 <= 0 or self.R2 <= 0:
            raise DomainError("rates R1, R2 must be > 0")
        if self.is_poisson:
            if self.N1 is not None or self.N2 is not None:
                raise DomainError("give either (N1, N2) or (lam, r1), not both")
            if not self.lam > 0:
                raise DomainError(f"lambda must be > 0, got {self.lam}")
            if self.r1 is None or not 0.0 < self.r1 <= 1.0:
                raise DomainError(f"r1 must lie in (0, 1], got {self.r1}")
        else:
            if self.N1 is None or self.N2 is None:
                raise DomainError("a fixed population needs N1 and N2")
            if self.N1 < 1 or self.N2 < 0 or int(self.N1) != self.N1 or int(self.N2) != self.N2:
                raise DomainError(f"need integers N1 >= 1, N2 >= 0 (got {self.N1}, {self.N2})")

    @classmethod
    def fixed(cls, N1: int, N2: int, K1: int, K2: int, R1: float = 1.0, R2: float = 1.0) -> "TwoTypeConfig":
        return cls(K1, K2, R1, R2, N1=N1, N2=N2)

    @classmethod
    def poisson(cls, lam: float, r1: float, K1: int, K2: int, R1: float = 1.0, R2: float = 1.0) -> "TwoTypeConfig":
        return cls(K1, K2, R1, R2, lam=lam, r1=r1)

    @property
    def is_poisson(self) -> bool:
        return self.lam is not None

    @property
    def r2(self) -> float:
        return 1.0 - self.r1

    @property
    def K_bar(self) -> float:
        return 0.5 * (self.K1 + self.K2)

    def to_game(self, alpha: float = 0.0, beta: float = 0.0) -> GameSpec:
        if self.is_poisson:
            r = (self.r1, self.r2)
            pop = Poisson(self.lam)
        else:
            n = self.N1 + self.N2
            r = (self.N1 / n, self.N2 / n)
            pop = FixedN(n)
        types = (
            TypeSpec(r[0], self.R1, self.K1, alpha),
            TypeSpec(r[1], self.R2, self.K2, beta),
        )
        return GameSpec(pop, types)


@dataclass(frozen=True)
class FrontierSegment:
    """Piecewise-linear curve ``p2(p1)`` from ``(0, left)`` to ``(right, 0)``.

    The first piece has slope ``m1`` up to ``breakpoint``; the second has
    slope ``m2``. A straight restriction line uses ``m1 == m2``.
    """

    m1: float
    m2: float
    breakpoint: tuple[float, float]
    endpoints: tuple[tuple[float, float], tuple[float, float]]

    @property
    def left(self) -> float:
        return self.endpoints[0][1]

    @property
    def right(self) -> float:
        return self.endpoints[1][0]

    @property
    def vertices(self) -> np.ndarray:
        return np.array([self.endpoints[0], self.breakpoint, self.endpoints[1]], dtype=float)

    def p2_at(self, p1):
        """Frontier height at ``p1``; zero beyond the right endpoint."""
        p1 = np.asarray(p1, dtype=float)
        bx = self.breakpoint[0]
        first = self.m1 * p1 + self.left
        second = self.m2 * (p1 - self.right)
        out = np.where(p1 <= bx, first, second)
        out = np.where(p1 > self.right, 0.0, np.maximum(out, 0.0))
        return float(out) if out.ndim == 0 else out

    def sample(self, n: int = 101) -> np.ndarray:
        p1 = np.linspace(0.0, self.right, n)
        return np.column_stack([p1, self.p2_at(p1)])

    def distance(self, points) -> np.ndarray:
        """Euclidean distance in (p1, p2) from each point to the polyline."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        v = self.vertices
        best = np.full(len(pts), np.inf)
        for a, b in zip(v[:-1], v[1:]):
            ab = b - a
            denom = float(ab @ ab)
            t = np.zeros(len(pts)) if denom == 0 else np.clip((pts - a) @ ab / denom, 0.0, 1.0)
            d = np.linalg.norm(pts - (a + t[:, None] * ab), axis=1)
            best = np.minimum(best, d)
        return best


@dataclass(frozen=True)
class ParetoPoint:
    p1: float
    p2: float
    U1: float
    U2: float


# ---------------------------------------------------------------------------
# non-collision probabilities


def _binom_cdf_matrix(n: int, ps: np.ndarray, kmax: int) -> np.ndarray:
    """cdf[g, k] = P(Binom(n, ps[g]) <= k) for k = 0..kmax."""
    out = np.ones((len(ps), kmax + 1))
    for g, p in enumerate(ps):
        c = np.cumsum(binom_pmf_vector(n, float(p)))
        m = min(kmax + 1, n + 1)
        out[g, :m] = np.minimum(c[:m], 1.0)
    return out


def _binom_pmf_matrix(n: int, ps: np.ndarray, kmax: int) -> np.ndarray:
    out = np.zeros((len(ps), kmax + 1))
    for g, p in enumerate(ps):
        v = binom_pmf_vector(n, float(p))
        m = min(kmax + 1, n + 1)
        out[g, :m] = v[:m]
    return out


def _fixed_others_cdf(own_ps, other_ps, n_own_others, n_other, K):
    """P(Binom(n_own_others, p_own) + Binom(n_other, p_other) <= K) on the outer grid."""
    a = _binom_pmf_matrix(n_own_others, own_ps, K)  # (G1, K+1)
    c = _binom_cdf_matrix(n_other, other_ps, K)  # (G2, K+1)
    c_rev = c[:, ::-1]  # c_rev[g, i] = P(B_other <= K - i)
    return np.minimum(a @ c_rev.T, 1.0)


def pnc_two_types_fixed_grid(p1s, p2s, cfg: TwoTypeConfig):
    """Both non-collision probabilities on the outer product grid ``p1s x p2s``."""
    if cfg.is_poisson:
        raise DomainError("pnc_two_types_fixed needs a fixed population")
    p1s = np.atleast_1d(np.asarray(p1s, dtype=float))
    p2s = np.atleast_1d(np.asarray(p2s, dtype=float))
    q1 = _fixed_others_cdf(p1s, p2s, cfg.N1 - 1, cfg.N2, cfg.K1)
    if cfg.N2 >= 1:
        q2 = _fixed_others_cdf(p2s, p1s, cfg.N2 - 1, cfg.N1, cfg.K2).T
    else:
        q2 = np.zeros_like(q1)
    return p1s[:, None] * q1, p2s[None, :] * q2


def pnc_two_types_fixed(p1: float, p2: float, cfg: TwoTypeConfig) -> tuple[float, float]:
    """(P_nc^(1), P_nc^(2)) for known type counts ``N1``, ``N2``."""
    as_prob(p1, "p1")
    as_prob(p2, "p2")
    a, b = pnc_two_types_fixed_grid([p1], [p2], cfg)
    return float(a[0, 0]), float(b[0, 0])


def pnc_two_types_poisson_grid(p1s, p2s, cfg: TwoTypeConfig):
    if not cfg.is_poisson:
        raise DomainError("pnc_two_types_poisson needs a Poisson population")
    p1s = np.atleast_1d(np.asarray(p1s, dtype=float))
    p2s = np.atleast_1d(np.asarray(p2s, dtype=float))
    mu = cfg.lam * (cfg.r1 * p1s[:, None] + cfg.r2 * p2s[None, :])
    q1 = special.pdtr(cfg.K1, mu)
    q2 = special.pdtr(cfg.K2, mu)
    return p1s[:, None] * q1, p2s[None, :] * q2


def pnc_two_types_poisson(p1: float, p2: float, cfg: TwoTypeConfig) -> tuple[float, float]:
    """(P_nc^(1), P_nc^(2)) in the Poisson game: ``p_t P(Pois(lam tau) <= K_t)``."""
    as_prob(p1, "p1")
    as_prob(p2, "p2")
    if not cfg.is_poisson:
        raise DomainError("pnc_two_types_poisson needs a Poisson population")
    mu = cfg.lam * (cfg.r1 * p1 + cfg.r2 * p2)
    ks1 = np.arange(cfg.K1 + 1)
    ks2 = np.arange(cfg.K2 + 1)
    q1 = float(np.sum(poisson_pmf(ks1, mu)))
    q2 = float(np.sum(poisson_pmf(ks2, mu)))
    return p1 * min(q1, 1.0), p2 * min(q2, 1.0)


def pnc_two_types(p1: float, p2: float, cfg: TwoTypeConfig) -> tuple[float, float]:
    if cfg.is_poisson:
        return pnc_two_types_poisson(p1, p2, cfg)
    return pnc_two_types_fixed(p1, p2, cfg)


def pnc_grid(p1s, p2s, cfg: TwoTypeConfig):
    if cfg.is_poisson:
        return pnc_two_types_poisson_grid(p1s, p2s, cfg)
    return pnc_two_types_fixed_grid(p1s, p2s, cfg)


def transmitting_count_weight(x: int, p: float, mean: float, include_shortfall: bool = True) -> float:
    """Weight of ``x`` type-n transmitters in the per-type double-sum form.

    ``P(Pois(mean) < x)`` (the "fewer than ``x`` players exist" term, empty at
    ``x = 0``) plus ``sum_{l>=x} C(l, x) p^x (1-p)^(l-x) Pois(l; mean)``; the
    second sum equals ``Pois(x; mean p)``.
    """
    horizon = poisson_horizon(mean)
    total = 0.0
    if include_shortfall and x > 0:
        total += float(np.sum(poisson_pmf(np.arange(x), mean)))
    for l in range(x, horizon + 1):
        bp = binom_pmf_vector(l, p)[x]
        total += float(bp) * poisson_pmf(l, mean)
    return total


def pnc_two_types_poisson_diagnostic(
    p1: float, p2: float, cfg: TwoTypeConfig, include_shortfall: bool = True
) -> tuple[float, float]:
    """Per-type convolution ``sum_j sum_i W_1(i) W_2(j - i)`` of transmitter-count weights.

    With ``include_shortfall=False`` this is exactly P(Pois(lam tau) <= K_t),
    i.e. the thinning form without the leading ``p_t``.
    """
    if not cfg.is_poisson:
        raise DomainError("diagnostic form needs a Poisson population")
    kmax = max(cfg.K1, cfg.K2)
    w1 = [transmitting_count_weight(x, p1, cfg.r1 * cfg.lam, include_shortfall) for x in range(kmax + 1)]
    w2 = [transmitting_count_weight(x, p2, cfg.r2 * cfg.lam, include_shortfall) for x in range(kmax + 1)]
    out = []
    for K in (cfg.K1, cfg.K2):
        out.append(sum(w1[i] * w2[j - i] for j in range(K + 1) for i in range(j + 1)))
    return out[0], out[1]


def designated_player_utilities_two_types(p1: float, p2: float, cfg: TwoTypeConfig) -> tuple[float, float]:
    """Designated-player average utilities with no penalty (Poisson type counts).

    A type-``t`` player among ``i`` type-``t`` players takes the share
    ``k / i`` of the ``k`` successful type-``t`` transmissions; the other type
    contributes Pois(r lam p) transmitters. Reduces to
    :func:`poissonaloha.game.designated_player_utility` when ``r1 = 1``.
    """
    if not cfg.is_poisson:
        raise DomainError("designated-player form needs a Poisson population")

    def side(p_own, mean_own, p_other, mean_other, K, R):
        horizon = poisson_horizon(mean_own)
        share = np.zeros(K + 2)
        for i in range(1, horizon + 1):
            w = poisson_pmf(i, mean_own)
            bp = binom_pmf_vector(i, p_own)
            for k in range(1, min(K + 1, i) + 1):
                share[k] += k / i * bp[k] * w
        other = np.atleast_1d(poisson_pmf(np.arange(K + 2), mean_other * p_other))
        total = 0.0
        for n in range(1, K + 2):
            for k in range(1, n + 1):
                total += share[k] * other[n - k]
        return R * total

    lam = cfg.lam
    u1 = side(p1, cfg.r1 * lam, p2, cfg.r2 * lam, cfg.K1, cfg.R1)
    u2 = side(p2, cfg.r2 * lam, p1, cfg.r1 * lam, cfg.K2, cfg.R2)
    return u1, u2


# ---------------------------------------------------------------------------
# frontiers


def _three_point_frontier(left: float, mid: float, right: float) -> FrontierSegment:
    if not (left > 0 and right > 0 and mid > 0):
        raise DegenerateFrontierError(f"anchors must be positive (left={left}, mid={mid}, right={right})")
    if not (mid < left and mid < right):
        raise DegenerateFrontierError(
            f"breakpoint {mid:.6g} must lie below both endpoints ({left:.6g}, {right:.6g})"
        )
    m1 = (mid - left) / mid
    m2 = -mid / (right - mid)
    return FrontierSegment(m1, m2, (mid, mid), ((0.0, left), (right, 0.0)))


def frontier_anchors(cfg: TwoTypeConfig) -> tuple[float, float, float]:
    """(left p2, breakpoint p, right p1) of the analytic Pareto frontier."""
    kb = cfg.K_bar
    if cfg.is_poisson:
        lam = cfg.lam
        left = (1 + cfg.K2) / (cfg.r2 * lam + cfg.K2 - 1)
        mid = (1 + kb) / (lam + kb)
        right = (1 + cfg.K1) / (cfg.r1 * lam + cfg.K1 - 1)
    else:
        left = (1 + cfg.K2) / (cfg.N2 + cfg.K2)
        mid = (1 + kb) / (cfg.N1 + cfg.N2 + kb)
        right = (1 + cfg.K1) / (cfg.N1 + cfg.K1)
    return left, mid, right


def pareto_frontier_fixed(cfg: TwoTypeConfig) -> FrontierSegment:
    if cfg.is_poisson:
        raise DomainError("pareto_frontier_fixed needs a fixed population")
    return _three_point_frontier(*frontier_anchors(cfg))


def pareto_frontier_poisson(cfg: TwoTypeConfig) -> FrontierSegment:
    if not cfg.is_poisson:
        raise DomainError("pareto_frontier_poisson needs a Poisson population")
    return _three_point_frontier(*frontier_anchors(cfg))


def pareto_frontier(cfg: TwoTypeConfig) -> FrontierSegment:
    return pareto_frontier_poisson(cfg) if cfg.is_poisson else pareto_frontier_fixed(cfg)


def nondominated(u1, u2) -> np.ndarray:
    """Indices of the points not dominated in (u1, u2), ordered by increasing u1.

    Exact duplicates of a nondominated point are all kept. The result does
    not depend on the input order beyond the index labels.
    """
    u1 = np.asarray(u1, dtype=float).ravel()
    u2 = np.asarray(u2, dtype=float).ravel()
    order = np.lexsort((np.arange(len(u1)), -u2, -u1))
    keep = []
    best_u2 = -np.inf
    last = None
    for idx in order:
        if u2[idx] > best_u2:
            keep.append(idx)
            best_u2 = u2[idx]
            last = (u1[idx], u2[idx])
        elif last is not None and (u1[idx], u2[idx]) == last:
            keep.append(idx)
    keep = np.array(keep, dtype=int)
    return keep[np.lexsort((keep, u1[keep]))]


def pareto_search(cfg: TwoTypeConfig, grid_n: int = 256) -> list[ParetoPoint]:
    """Nondominated utility pairs over a ``grid_n x grid_n`` lattice of [0, 1]^2."""
    if grid_n < 32:
        raise DomainError(f"grid_n must be >= 32, got {grid_n}")
    g = np.linspace(0.0, 1.0, grid_n)
    pnc1, pnc2 = pnc_grid(g, g, cfg)
    U1 = (cfg.R1 * pnc1).ravel()
    U2 = (cfg.R2 * pnc2).ravel()
    P1, P2 = np.meshgrid(g, g, indexing="ij")
    P1, P2 = P1.ravel(), P2.ravel()
    return [ParetoPoint(float(P1[i]), float(P2[i]), float(U1[i]), float(U2[i])) for i in nondominated(U1, U2)]


CONVENTIONS = ("joint", "conditional")


def _success_probs(p1: float, p2: float, cfg: TwoTypeConfig, convention: str) -> tuple[float, float]:
    """Joint P_nc (transmit and succeed) or the conditional P(others <= K_t)."""
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    a, b = pnc_two_types(p1, p2, cfg)
    if convention == "joint":
        return a, b
    if cfg.is_poisson:
        mu = cfg.lam * (cfg.r1 * p1 + cfg.r2 * p2)
        return float(special.pdtr(cfg.K1, mu)), float(special.pdtr(cfg.K2, mu))
    q1 = _fixed_others_cdf(np.array([p1]), np.array([p2]), cfg.N1 - 1, cfg.N2, cfg.K1)[0, 0]
    q2 = 0.0
    if cfg.N2 >= 1:
        q2 = _fixed_others_cdf(np.array([p2]), np.array([p1]), cfg.N2 - 1, cfg.N1, cfg.K2)[0, 0]
    return float(q1), float(q2)


def utilities_two_types(
    p1: float, p2: float, cfg: TwoTypeConfig, alpha: float = 0.0, beta: float = 0.0, convention: str = "joint"
) -> tuple[float, float]:
    """``U_t = R_t s_t - penalty_t R_t (1 - s_t)`` with ``s_t`` from ``convention``.

    ``"joint"`` uses the non-collision probabilities ``P_nc^(t)``;
    ``"conditional"`` uses the ON-utility success probability
    P(others <= K_t), matching :func:`poissonaloha.game.expected_utility`.
    """
    a, b = _success_probs(p1, p2, cfg, convention)
    return cfg.R1 * (a - alpha * (1.0 - a)), cfg.R2 * (b - beta * (1.0 - b))


def penalties_two_types(p1: float, p2: float, cfg: TwoTypeConfig, convention: str = "joint") -> tuple[float, float]:
    """(alpha, beta) = (s_1 / (1 - s_1), s_2 / (1 - s_2)); ``s_t`` as in :func:`utilities_two_types`."""
    out = []
    for s_t in _success_probs(p1, p2, cfg, convention):
        if s_t >= 1.0:
            raise InfinitePenaltyError("success probability is 1; no finite penalty")
        out.append(s_t / (1.0 - s_t))
    return out[0], out[1]
