"""Seeded simulation of run chains for cross-checking exact results.

Randomness comes from numpy's counter-based Philox generator.  Excursion
``k`` of a run with seed ``s`` draws from the stream keyed ``(s, k)``, so the
result does not depend on how excursions are scheduled across workers.
Categorical draws compare a uniform against cumulative row sums with a
strict ``<``; a draw that falls past the last cumulative sum (rounding)
selects the last target.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .kernels import DownwardKernel, Kernel

GENERATOR_ID = "numpy.random.Philox(key=(seed, stream))"
#: stream index of the single long trajectory used for occupancy estimates
OCCUPANCY_STREAM = 2**64 - 1
_CHUNK = 32


@dataclass(frozen=True)
class SimulationConfig:
    seed: int
    excursions: int = 10_000
    max_steps: int = 100_000

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.excursions < 1:
            raise ValueError("excursions must be at least 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass(frozen=True)
class ExcursionStats:
    """Counts from excursions started at the root.

    ``hits[x]`` counts excursions that visited ``x`` before returning to the
    root (every excursion counts for the root itself).  ``return_times``
    holds the return time of each completed excursion in excursion order.
    """

    excursions: int
    hits: dict
    return_times: tuple
    truncated: int
    seed: int
    generator_id: str = GENERATOR_ID
    renormalization: float = 1.0
    first: int = field(default=0, repr=False)

    def merge(self, other: "ExcursionStats") -> "ExcursionStats":
        """Combine statistics of adjacent excursion ranges."""
        a, b = (self, other) if self.first <= other.first else (other, self)
        hits = dict(a.hits)
        for x, c in b.hits.items():
            hits[x] = hits.get(x, 0) + c
        return ExcursionStats(a.excursions + b.excursions, hits,
                              a.return_times + b.return_times, a.truncated + b.truncated,
                              a.seed, a.generator_id, a.renormalization, a.first)

    def hit_probability(self, x) -> float:
        return self.hits.get(x, 0) / self.excursions

    def half_width(self, x, z: float = 4.0) -> float:
        p = self.hit_probability(x)
        return z * math.sqrt(p * (1 - p) / self.excursions)

    def mean_return_time(self) -> float:
        return float(np.mean(self.return_times)) if self.return_times else math.nan

    def return_time_half_width(self, z: float = 4.0) -> float:
        n = len(self.return_times)
        if n < 2:
            return math.inf
        return z * float(np.std(self.return_times, ddof=1)) / math.sqrt(n)


class _Sampler:
    """Cumulative-sum categorical sampler with a per-call row cache."""

    def __init__(self, kernel: Kernel):
        self.kernel = kernel
        self.cache = {}
        self.renormalization = 1.0

    def table(self, x):
        t = self.cache.get(x)
        if t is None:
            row = self.kernel.row(x)
            targets = [y for y, p in row.items() if p > 0]
            cum = list(accumulate(float(row[y]) for y in targets))
            if isinstance(self.kernel, DownwardKernel) and x == self.kernel.root:
                total = cum[-1]
                if total < 1:
                    # truncated root row on an infinite poset
                    self.renormalization = total
                    cum = [c / total for c in cum]
            t = (targets, cum)
            self.cache[x] = t
        return t

    def step(self, x, u):
        targets, cum = self.table(x)
        j = bisect_right(cum, u)
        return targets[min(j, len(targets) - 1)]


def _uniforms(seed, stream):
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))
    while True:
        yield from gen.random(_CHUNK).tolist()


def _run_range(kernel, config, start, stop):
    sampler = _Sampler(kernel)
    e = kernel.root
    hits = {e: 0}
    times = []
    truncated = 0
    for k in range(start, stop):
        draws = _uniforms(config.seed, k)
        hits[e] += 1
        x = e
        seen = set()
        for t in range(1, config.max_steps + 1):
            x = sampler.step(x, next(draws))
            if x == e:
                times.append(t)
                break
            if x not in seen:
                seen.add(x)
                hits[x] = hits.get(x, 0) + 1
        else:
            truncated += 1
    return ExcursionStats(stop - start, hits, tuple(times), truncated, config.seed,
                          renormalization=sampler.renormalization, first=start)


def simulate_excursions(kernel: Kernel, config: SimulationConfig, workers: int = 1) -> ExcursionStats:
    """Run ``config.excursions`` excursions from the root.

    An excursion stops at the first return to the root or after
    ``config.max_steps`` steps (then it is counted as truncated).  With
    ``workers > 1`` contiguous excursion ranges run concurrently; the merged
    result equals the sequential one.
    """
    n = config.excursions
    if workers <= 1:
        return _run_range(kernel, config, 0, n)
    bounds = [n * w // workers for w in range(workers + 1)]
    with ThreadPoolExecutor(workers) as pool:
        parts = list(pool.map(lambda w: _run_range(kernel, config, bounds[w], bounds[w + 1]),
                              range(workers)))
    out = parts[0]
    for p in parts[1:]:
        out = out.merge(p)
    return out


def estimate_hitting(kernel: Kernel, x, config: SimulationConfig) -> tuple:
    """Empirical ``P_e(T_x <= T_e)`` and its 4-sigma half-width."""
    kernel.poset.check(x)
    stats = simulate_excursions(kernel, config)
    return stats.hit_probability(x), stats.half_width(x)


@dataclass(frozen=True)
class Occupancy:
    frequencies: dict
    steps: int
    burn_in: int
    seed: int
    generator_id: str = GENERATOR_ID
    renormalization: float = 1.0


def estimate_invariant(kernel: Kernel, steps: int, seed: int, burn_in: int = 1000) -> Occupancy:
    """Long-run occupancy frequencies of one trajectory started at the root."""
    sampler = _Sampler(kernel)
    draws = _uniforms(seed, OCCUPANCY_STREAM)
    x = kernel.root
    for _ in range(burn_in):
        x = sampler.step(x, next(draws))
    counts = {}
    for _ in range(steps):
        x = sampler.step(x, next(draws))
        counts[x] = counts.get(x, 0) + 1
    freq = {y: c / steps for y, c in counts.items()}
    return Occupancy(freq, steps, burn_in, seed, renormalization=sampler.renormalization)
