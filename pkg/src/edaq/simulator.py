"""Monte Carlo simulation of the (queue length, late customers) chain.

One slot of the chain, from state (n, l):

  1. the customer scheduled for this slot survives thinning with probability rho;
  2. each of the l (+1 if it survived) pending customers shows up in the slot
     independently with probability p = 1 - q;
  3. the server removes one customer if the queue was non-empty.

Randomness comes exclusively from ``numpy.random.PCG64`` through
``Generator.random`` (53-bit doubles), consumed strictly in order: one
uniform for the thinning decision, then one per pending customer when there
are at most ``BERNOULLI_CUTOFF`` of them, otherwise a single uniform driving
an inverse-CDF binomial draw.  A run with a given seed is therefore the same
sequence of states as repeated calls to :func:`step` on a fresh generator
with that seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba as nb
import numpy as np

RNG_NAME = "numpy.random.PCG64"
BERNOULLI_CUTOFF = 32
DEFAULT_BURN_IN = 10_000
_MAX_DRAWS = BERNOULLI_CUTOFF + 1
_BLOCK = 1 << 16


@dataclass(frozen=True)
class ModelParamsFloat:
    rho: float
    q: float

    def __post_init__(self):
        if not 0 <= self.rho < 1:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if not 0 <= self.q < 1:
            raise ValueError(f"q must lie in [0, 1), got {self.q}")

    @property
    def p(self) -> float:
        return 1.0 - self.q


@dataclass(frozen=True)
class QueueState:
    n: int = 0
    l: int = 0

    def __post_init__(self):
        if self.n < 0 or self.l < 0:
            raise ValueError(f"state components must be non-negative: {self}")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# --------------------------------------------------------------------------
# compiled kernel
# --------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _binomial_inverse(c, p, u):
    q = 1.0 - p
    if q == 0.0:
        return c
    if p == 0.0:
        return 0
    log_ratio = math.log(p) - math.log(q)
    log_pmf = c * math.log(q)
    cdf = 0.0
    for k in range(c):
        cdf += math.exp(log_pmf)
        if u < cdf:
            return k
        log_pmf += math.log((c - k) / (k + 1.0)) + log_ratio
    return c


@nb.njit(cache=True, nogil=True)
def _advance(n, l, rho, p, u, pos):
    keep = 1 if u[pos] < rho else 0
    pos += 1
    c = l + keep
    if c <= BERNOULLI_CUTOFF:
        m = 0
        for _ in range(c):
            if u[pos] < p:
                m += 1
            pos += 1
    else:
        m = _binomial_inverse(c, p, u[pos])
        pos += 1
    served = 1 if n > 0 else 0
    return n + m - served, c - m, pos


@nb.njit(cache=True, nogil=True)
def _run_block(n, l, rho, p, u, steps_left, skip_left, counts):
    """Advance until steps, buffer or count grid run out.

    Returns (n, l, pos, steps_done, skip_left, pending) where ``pending``
    flags a post-burn-in state that fell outside ``counts`` and was not
    recorded.
    """
    pos = 0
    done = 0
    limit = u.shape[0] - _MAX_DRAWS
    while done < steps_left and pos <= limit:
        n, l, pos = _advance(n, l, rho, p, u, pos)
        done += 1
        if skip_left > 0:
            skip_left -= 1
            continue
        if n >= counts.shape[0] or l >= counts.shape[1]:
            return n, l, pos, done, skip_left, True
        counts[n, l] += 1
    return n, l, pos, done, skip_left, False


@nb.njit(cache=True, nogil=True)
def _sample_from(n, l, rho, p, u, draws, out_n, out_l):
    pos = 0
    filled = 0
    limit = u.shape[0] - _MAX_DRAWS
    while filled < draws and pos <= limit:
        nn, ll, pos = _advance(n, l, rho, p, u, pos)
        out_n[filled] = nn
        out_l[filled] = ll
        filled += 1
    return pos, filled


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------


def step(state: QueueState, params: ModelParamsFloat, rng: np.random.Generator) -> QueueState:
    u0 = rng.random()
    c = state.l + (1 if u0 < params.rho else 0)
    extra = rng.random(c if c <= BERNOULLI_CUTOFF else 1)
    u = np.concatenate(([u0], extra))
    n, l, _ = _advance(state.n, state.l, params.rho, params.p, u, 0)
    return QueueState(int(n), int(l))


def sample_transitions(state: QueueState, params: ModelParamsFloat,
                       rng: np.random.Generator, draws: int):
    """``draws`` independent one-step successors of ``state`` as (n, l) arrays."""
    out_n = np.empty(draws, dtype=np.int64)
    out_l = np.empty(draws, dtype=np.int64)
    buf = np.empty(0)
    filled = 0
    while filled < draws:
        buf = np.concatenate((buf, rng.random(_BLOCK)))
        pos, got = _sample_from(state.n, state.l, params.rho, params.p, buf,
                                draws - filled, out_n[filled:], out_l[filled:])
        filled += got
        buf = buf[pos:]
    return out_n, out_l


@dataclass
class EmpiricalDist:
    """Visit counts of the chain over (n, l) after burn-in."""

    counts: dict = field(default_factory=dict)
    total: int = 0
    burn_in: int = 0

    def probabilities(self) -> dict:
        if self.total <= 0:
            raise ValueError("empty distribution")
        return {s: c / self.total for s, c in sorted(self.counts.items())}

    def merge(self, other: EmpiricalDist) -> EmpiricalDist:
        counts = dict(self.counts)
        for s, c in other.counts.items():
            counts[s] = counts.get(s, 0) + c
        return EmpiricalDist(counts, self.total + other.total, self.burn_in + other.burn_in)


def _grow(counts: np.ndarray, n: int, l: int) -> np.ndarray:
    rows = max(counts.shape[0], 2 * (n + 1))
    cols = max(counts.shape[1], 2 * (l + 1))
    bigger = np.zeros((rows, cols), dtype=np.int64)
    bigger[: counts.shape[0], : counts.shape[1]] = counts
    return bigger


def run(params: ModelParamsFloat, steps: int, burn_in: int = DEFAULT_BURN_IN,
        seed: int = 0) -> EmpiricalDist:
    """Start at (0, 0), discard ``burn_in`` steps, then record ``steps`` states."""
    if steps <= 0:
        raise ValueError("steps must be positive")
    if burn_in < 0:
        raise ValueError("burn_in must be non-negative")
    rng = make_rng(seed)
    counts = np.zeros((64, 16), dtype=np.int64)
    n = l = 0
    remaining = steps + burn_in
    skip = burn_in
    buf = np.empty(0)
    while remaining > 0:
        if buf.shape[0] < _BLOCK:
            buf = np.concatenate((buf, rng.random(_BLOCK)))
        n, l, pos, done, skip, pending = _run_block(n, l, params.rho, params.p, buf,
                                                    remaining, skip, counts)
        remaining -= done
        buf = buf[pos:]
        if pending:
            counts = _grow(counts, n, l)
            counts[n, l] += 1

    nz = np.argwhere(counts)
    table = {(int(i), int(j)): int(counts[i, j]) for i, j in nz}
    return EmpiricalDist(table, steps, burn_in)


def run_replicas(params: ModelParamsFloat, steps: int, burn_in: int, seeds,
                 workers: int | None = None) -> EmpiricalDist:
    """Independent runs, one per seed, merged into a single table."""
    seeds = list(seeds)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda s: run(params, steps, burn_in, s), seeds))
    out = EmpiricalDist()
    for part in parts:
        out = out.merge(part)
    return out


def marginal_n(dist: EmpiricalDist) -> dict:
    return _marginal(dist, 0)


def marginal_l(dist: EmpiricalDist) -> dict:
    return _marginal(dist, 1)


def _marginal(dist: EmpiricalDist, axis: int) -> dict:
    if dist.total <= 0:
        raise ValueError("empty distribution")
    acc = {}
    for s, c in dist.counts.items():
        acc[s[axis]] = acc.get(s[axis], 0) + c
    return {k: acc[k] / dist.total for k in sorted(acc)}
