"""Normalized throughput (packets per slot) of the game schemes and the backoff baseline.

A slot succeeds for every transmitter when the total number of simultaneous
transmitters is at most ``K_max + 1``; otherwise all of them collide.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .single_type import p_opt_poisson
from .specfun import as_prob, binom_pmf_vector, poisson_horizon, poisson_pmf


@dataclass(frozen=True)
class ThroughputResult:
    """Expected successful packets per slot.

    ``components[k]`` is the contribution of slots with exactly ``k``
    successful packets, so ``value == sum(components.values())``.
    """

    value: float
    components: dict = field(default_factory=dict)
    p_tx: float | None = None
    stderr: float = 0.0


def throughput_fixedN(N: int, K_max: int, p: float) -> ThroughputResult:
    """Expected successes per slot for ``N`` saturated players transmitting w.p. ``p``."""
    p = as_prob(p)
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    pmf = binom_pmf_vector(N, p)
    top = min(K_max + 1, N)
    components = {k: float(k * pmf[k]) for k in range(1, top + 1)}
    p_tx = float(-math.expm1(N * math.log1p(-p))) if p < 1 else 1.0
    return ThroughputResult(float(sum(components.values())), components, p_tx)


def conditional_success_probs(N: int, K_max: int, p: float) -> dict:
    """P(k packets succeed | at least one transmission) for k = 1..K_max+1."""
    res = throughput_fixedN(N, K_max, p)
    if res.p_tx == 0:
        return {k: 0.0 for k in res.components}
    return {k: term / k / res.p_tx for k, term in res.components.items()}


def throughput_poisson(
    lam: float,
    K_max: int,
    p: float | None = None,
    full_rate_small_population: bool = True,
) -> ThroughputResult:
    """Expected successes per slot when the population is Poisson(lam).

    ``p`` defaults to :func:`p_opt_poisson`. With ``full_rate_small_population``
    a slot whose population does not exceed ``K_max`` has everyone transmit
    (all succeed); larger populations use ``p``.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    if p is None:
        p = p_opt_poisson(lam, K_max)
    p = as_prob(p)
    horizon = poisson_horizon(lam)
    weights = np.atleast_1d(poisson_pmf(np.arange(horizon + 1), lam))
    components = {k: 0.0 for k in range(1, K_max + 2)}
    start = 0
    if full_rate_small_population:
        for j in range(1, K_max + 1):
            components[j] += j * float(weights[j]) if j <= horizon else 0.0
        start = K_max + 1
    for n in range(max(start, 1), horizon + 1):
        w = float(weights[n])
        if w == 0.0:
            continue
        pmf = binom_pmf_vector(n, p)
        for k in range(1, min(K_max + 1, n) + 1):
            components[k] += w * k * float(pmf[k])
    return ThroughputResult(float(sum(components.values())), components)


def backoff_throughput(
    N: int,
    W0: int = 32,
    max_stage: int = 5,
    K_max: int = 0,
    slots: int = 100_000,
    seed: int = 0,
    batches: int = 50,
) -> ThroughputResult:
    """Simulated saturated binary exponential backoff with an MPR receiver.

    Each node waits a uniform number of idle slots in ``[0, W-1]`` before
    transmitting. ``W`` starts at ``W0``, doubles after each collision up to
    ``W0 * 2**max_stage`` and resets after a success. ``stderr`` comes from
    batch means over ``batches`` equal blocks of slots.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if W0 < 1 or max_stage < 0:
        raise DomainError("W0 must be >= 1 and max_stage >= 0")
    if slots < 10_000:
        warnings.warn(f"only {slots} slots simulated; throughput estimate has low confidence", stacklevel=2)
    rng = np.random.default_rng(seed)
    stage = np.zeros(N, dtype=np.int64)
    counters = rng.integers(0, W0, size=N)
    batch_len = max(1, slots // batches)
    n_batches = math.ceil(slots / batch_len)
    per_batch = np.zeros(n_batches)
    slot = 0
    while True:
        skip = int(counters.min())
        slot += skip
        if slot >= slots:
            break
        counters -= skip
        tx = counters == 0
        n_tx = int(tx.sum())
        if n_tx <= K_max + 1:
            per_batch[slot // batch_len] += n_tx
            stage[tx] = 0
        else:
            stage[tx] = np.minimum(stage[tx] + 1, max_stage)
        counters[~tx] -= 1
        counters[tx] = rng.integers(0, W0 * (2 ** stage[tx]))
        slot += 1
    lengths = np.full(n_batches, batch_len, dtype=float)
    lengths[-1] = slots - batch_len * (n_batches - 1)
    value = float(per_batch.sum() / slots)
    stderr = 0.0
    if n_batches > 1:
        stderr = float(np.std(per_batch / lengths, ddof=1) / math.sqrt(n_batches))
    return ThroughputResult(value, {}, None, stderr)
