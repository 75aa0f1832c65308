"""Special functions, root finding and 1-D maximisation.

Poisson masses are evaluated in log space and binomial masses through
scipy's boost-backed pmf, so Poisson means in the hundreds and binomial
populations in the thousands neither overflow nor lose precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, special, stats

from .errors import BracketError, DomainError, NumericError

Prob = float

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
_INV_GOLDEN = 1.0 / GOLDEN


def as_prob(value: float, name: str = "p") -> float:
    """Validate and return ``value`` as a probability in [0, 1]."""
    value = float(value)
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise DomainError(f"{name}={value!r} is not a probability in [0, 1]")
    return value


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 0.0
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.rel_tol < 0:
            raise DomainError(f"rel_tol must be >= 0, got {self.rel_tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")


DEFAULT_TOL = Tolerance()


def poisson_horizon(lam: float) -> int:
    """Truncation point for sums over a Poisson(lam) support.

    The omitted tail beyond ``lam + 20 sqrt(lam) + 20`` is below 1e-12 for
    every lam >= 0 (about 20 standard deviations plus a margin for small lam).
    """
    return int(math.ceil(lam + 20.0 * math.sqrt(lam) + 20.0))


def poisson_pmf(k, lam: float):
    """Poisson probability mass ``e^-lam lam^k / k!``.

    ``k`` may be an integer or an integer array; the result has the same shape.
    """
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise DomainError("k must be non-negative")
    out = np.exp(special.xlogy(k_arr, lam) - lam - special.gammaln(k_arr + 1.0))
    return float(out) if out.ndim == 0 else out


def poisson_cdf(k: int, mu: float) -> float:
    """P(Pois(mu) <= k) as a finite sum of log-space pmf terms."""
    if k < 0:
        return 0.0
    return float(min(1.0, np.sum(poisson_pmf(np.arange(k + 1), mu))))


def poisson_sf(k: int, mu: float) -> float:
    """P(Pois(mu) > k), computed without cancellation for small tails."""
    if k < 0:
        return 1.0
    if mu <= k + 1:
        return max(0.0, 1.0 - poisson_cdf(k, mu))
    return float(special.gammainc(k + 1, mu))


def log_binom_coef(n, k):
    return special.gammaln(np.asarray(n) + 1.0) - special.gammaln(np.asarray(k) + 1.0) - special.gammaln(
        np.asarray(n) - np.asarray(k) + 1.0
    )


def binom_pmf(k, n, p: float):
    """Binomial(n, p) probability mass at ``k`` (scalar or array ``k``/``n``)."""
    p = as_prob(p)
    k_arr = np.asarray(k)
    n_arr = np.asarray(n)
    if np.any(k_arr < 0) or np.any(n_arr < 0):
        raise DomainError("k and n must be non-negative")
    if np.any(k_arr > n_arr):
        raise DomainError(f"k must not exceed n (k={k}, n={n})")
    # boost's pmf stays accurate to ~1e-16 for n in the thousands, where a
    # plain lgamma difference loses about 1e-12
    try:
        out = np.asarray(stats.binom.pmf(k_arr, n_arr, p), dtype=float)
    except OverflowError:
        # boost overflows for subnormal p; the log form is exact enough there
        with np.errstate(divide="ignore"):
            logp = k_arr * math.log(p) if p > 0 else np.where(k_arr == 0, 0.0, -np.inf)
        out = np.exp(log_binom_coef(n_arr, k_arr) + logp + (n_arr - k_arr) * math.log1p(-p))
    return float(out) if np.ndim(out) == 0 else out


def binom_pmf_vector(n: int, p: float) -> np.ndarray:
    """Full pmf vector of Binomial(n, p) over 0..n."""
    return np.atleast_1d(binom_pmf(np.arange(n + 1), n, p))


def binom_cdf(k: int, n: int, p: float) -> float:
    """P(Binom(n, p) <= k)."""
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    return float(min(1.0, np.sum(binom_pmf(np.arange(k + 1), n, p))))


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    x = as_prob(x, "x")
    if a <= 0 or b <= 0:
        raise DomainError(f"a and b must be > 0 (a={a}, b={b})")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    value = float(special.betainc(a, b, x))
    if not math.isfinite(value):
        raise NumericError(f"incomplete beta did not converge at x={x}, a={a}, b={b}")
    return value


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of ``f`` on a sign-changing bracket [lo, hi] (Brent's method)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    try:
        root, info = optimize.brentq(
            f,
            lo,
            hi,
            xtol=tol.abs_tol,
            rtol=max(tol.rel_tol, 4 * np.finfo(float).eps),
            maxiter=tol.max_iter,
            full_output=True,
            disp=False,
        )
    except RuntimeError as exc:  # pragma: no cover - brentq raises only with disp=True
        raise NumericError(str(exc)) from exc
    if not info.converged:
        raise NumericError(f"root finding did not converge in {tol.max_iter} iterations")
    return float(root)


def argmax_grid(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    n_coarse: int = 201,
    refine_rounds: int = 40,
) -> float:
    """Maximise ``f`` on [lo, hi] by a coarse scan plus golden-section refinement.

    The golden-section search runs inside the two grid cells adjacent to the
    best grid point, so for unimodal ``f`` the result is accurate to roughly
    ``2 (hi - lo) / (n_coarse - 1) * GOLDEN**(-refine_rounds)``.
    """
    if n_coarse < 3:
        raise DomainError(f"n_coarse must be >= 3, got {n_coarse}")
    grid = np.linspace(lo, hi, n_coarse)
    values = np.array([f(float(x)) for x in grid])
    i = int(np.nanargmax(values))
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, n_coarse - 1)])
    best_x, best_v = float(grid[i]), float(values[i])

    c = b - (b - a) * _INV_GOLDEN
    d = a + (b - a) * _INV_GOLDEN
    fc, fd = f(c), f(d)
    for _ in range(refine_rounds):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _INV_GOLDEN
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _INV_GOLDEN
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    # the grid point wins when f is flat or maximal on the boundary
    if fx >= best_v:
        return x
    return best_x


def poisson_tail_beyond_horizon(lam: float) -> float:
    """Poisson mass omitted by truncating at :func:`poisson_horizon`."""
    if lam == 0:
        return 0.0
    return float(special.pdtrc(poisson_horizon(lam), lam))
