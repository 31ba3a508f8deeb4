"""Monte Carlo diagnostics for chain verdicts.

These routines corroborate classifier output empirically; they never
replace it. All of them run the chain as a vectorized ensemble: paths
are grouped into fixed-size blocks, each block draws from its own
stream spawned off the master seed, and every step consumes one
uniform angle and one exponential per path in a fixed order. That
makes every statistic bit-reproducible for identical (spec, args,
seed) and makes return events for a given seed a prefix-stable
function of n_steps (longer runs extend, never rewrite, history).

Heavy-tail guard: a path whose |state| reaches 1e300 is frozen there
and counted as non-returning; transient low-index chains can genuinely
overflow doubles.

The total-variation diagnostic is a two-start proxy: the distance
between empirical laws started from two points, on a fixed histogram,
must drain to the sampling noise floor if the chain is ergodic. The
invariant law itself is unavailable, so there is nothing else to
compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, simulate
from .errors import DomainError
from .stable import DensityGrid, cms_transform

_BLOCK = 8192
_FREEZE = 1e300
_HIST_HALF_RANGE = 500.0
_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class TrajectoryStats:
    """Ensemble return/occupation summary.

    return_fraction counts paths that entered the target set after
    first leaving it (paths started outside have trivially left).
    mean_return_time averages the first-entry step over returned paths
    and is nan when no path returned. occupation_fraction is the
    time-average indicator of the target set over the second half of
    each path, averaged over paths.
    """

    n_paths: int
    n_steps: int
    return_fraction: float
    mean_return_time: float
    occupation_fraction: float
    radius_a: float


@dataclass(frozen=True)
class TvEstimate:
    time_points: tuple
    tv_values: tuple
    bin_width: float
    n_paths: int


def _block_sizes(n_paths: int) -> list:
    sizes = [_BLOCK] * (n_paths // _BLOCK)
    if n_paths % _BLOCK:
        sizes.append(n_paths % _BLOCK)
    return sizes


def _step_ensemble(spec: ChainSpec, x: np.ndarray, frozen: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    """Advance one step in place-ordered draws; freeze overflowing paths."""
    n = x.size
    u = rng.uniform(-_HALF_PI, _HALF_PI, n)
    e = rng.standard_exponential(n)
    a = spec.alpha_profile.at(x)
    g = spec.family.gamma_profile.at(x)
    d = spec.family.delta_profile.at(x)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        xn = x + d + g * cms_transform(a, u, e)
    np.clip(xn, -_FREEZE, _FREEZE, out=xn)
    xn = np.where(frozen, x, xn)
    frozen |= np.abs(xn) >= _FREEZE
    return xn


def _hist_edges(bin_width: float) -> np.ndarray:
    if not bin_width > 0.0:
        raise DomainError(f"bin_width must be > 0, got {bin_width}")
    n_bins = max(1, int(math.ceil(2.0 * _HIST_HALF_RANGE / bin_width)))
    return -_HIST_HALF_RANGE + bin_width * np.arange(n_bins + 1)


def _clipped_counts(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Histogram with out-of-range mass folded into the end bins."""
    counts, _ = np.histogram(x, bins=edges)
    counts = counts.astype(float)
    counts[0] += np.count_nonzero(x < edges[0])
    counts[-1] += np.count_nonzero(x >= edges[-1])
    return counts


def _interval_stats(
    spec: ChainSpec,
    x0: float,
    lo: float,
    hi: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    radius_label: float,
) -> TrajectoryStats:
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths}")
    if n_steps < 2:
        raise DomainError(f"n_steps must be >= 2, got {n_steps}")
    empty = not lo < hi
    burn = n_steps // 2
    window = n_steps - burn
    children = np.random.SeedSequence(seed).spawn(len(_block_sizes(n_paths)))
    total_returned = 0
    total_return_time = 0.0
    total_occ = 0.0
    for size, child in zip(_block_sizes(n_paths), children):
        rng = np.random.default_rng(child)
        x = np.full(size, float(x0))
        frozen = np.zeros(size, dtype=bool)
        if empty:
            for _ in range(n_steps):
                x = _step_ensemble(spec, x, frozen, rng)
            continue
        inside0 = (lo <= x0) and (x0 <= hi)
        left = np.full(size, not inside0)
        returned = np.zeros(size, dtype=bool)
        return_time = np.zeros(size, dtype=np.int64)
        occ = np.zeros(size, dtype=np.int64)
        for t in range(1, n_steps + 1):
            x = _step_ensemble(spec, x, frozen, rng)
            inside = (x >= lo) & (x <= hi)
            hit = left & ~returned & inside
            if hit.any():
                return_time[hit] = t
                returned |= hit
            left |= ~inside
            if t > burn:
                occ += inside
        total_returned += int(returned.sum())
        total_return_time += float(return_time[returned].sum())
        total_occ += float(occ.sum())
    if empty:
        return TrajectoryStats(n_paths, n_steps, 0.0, math.nan, 0.0, radius_label)
    frac = total_returned / n_paths
    mean_rt = total_return_time / total_returned if total_returned else math.nan
    occ_frac = total_occ / (n_paths * window)
    return TrajectoryStats(n_paths, n_steps, frac, mean_rt, occ_frac, radius_label)


def return_stats(
    spec: ChainSpec,
    x0: float,
    radius_a: float,
    n_steps: int,
    n_paths: int,
    seed: int,
) -> TrajectoryStats:
    """First-return statistics for the centered ball [-a, a].

    Counts paths that enter the ball after first leaving it (a start
    outside the ball counts as already having left). Freezing at the
    overflow guard counts as never returning.
    """
    if not radius_a > 0.0:
        raise DomainError(f"radius_a must be > 0, got {radius_a}")
    return _interval_stats(
        spec, x0, -radius_a, radius_a, n_steps, n_paths, seed, radius_a
    )


def occupation(
    spec: ChainSpec,
    x0: float,
    compact_c: tuple,
    n_steps: int,
    n_paths: int,
    seed: int,
) -> TrajectoryStats:
    """Time-average occupation of the interval compact_c = (lo, hi).

    Uses the second half of each path (burn-in discard). An empty
    interval has occupation 0 by convention. n_steps below 1000 gives
    a window too short to mean anything, so it is rejected.
    """
    lo, hi = (float(compact_c[0]), float(compact_c[1]))
    if n_steps < 1000:
        raise DomainError(f"occupation needs n_steps >= 1000, got {n_steps}")
    return _interval_stats(
        spec, x0, lo, hi, n_steps, n_paths, seed, max(0.0, (hi - lo) / 2.0)
    )


def tv_convergence(
    spec: ChainSpec,
    x0_a: float,
    x0_b: float,
    time_points,
    n_paths: int,
    bin_width: float,
    seed: int,
) -> TvEstimate:
    """Histogram total-variation distance between two start points.

    Two independent ensembles (streams spawned from the same master
    seed) are advanced to each requested time; the TV value at a time
    point is half the L1 distance between the empirical bin laws. Bins
    are fixed on [-500, 500] with out-of-range mass folded into the
    end bins, so the estimate is a lower bound on the true TV.
    """
    tps = tuple(int(t) for t in time_points)
    if not tps or any(t < 1 for t in tps):
        raise DomainError("time_points must be positive step counts")
    if any(t2 <= t1 for t1, t2 in zip(tps, tps[1:])):
        raise DomainError("time_points must be strictly increasing")
    if n_paths < 2:
        raise DomainError(f"n_paths must be >= 2, got {n_paths}")
    edges = _hist_edges(bin_width)
    n_bins = len(edges) - 1
    counts = {
        "a": np.zeros((len(tps), n_bins)),
        "b": np.zeros((len(tps), n_bins)),
    }
    master = np.random.SeedSequence(seed)
    stream_roots = dict(zip(("a", "b"), master.spawn(2)))
    for label, x0 in (("a", x0_a), ("b", x0_b)):
        sizes = _block_sizes(n_paths)
        children = stream_roots[label].spawn(len(sizes))
        for size, child in zip(sizes, children):
            rng = np.random.default_rng(child)
            x = np.full(size, float(x0))
            frozen = np.zeros(size, dtype=bool)
            next_idx = 0
            for t in range(1, tps[-1] + 1):
                x = _step_ensemble(spec, x, frozen, rng)
                if next_idx < len(tps) and t == tps[next_idx]:
                    counts[label][next_idx] += _clipped_counts(x, edges)
                    next_idx += 1
    tv_values = tuple(
        float(0.5 * np.abs(counts["a"][i] / n_paths - counts["b"][i] / n_paths).sum())
        for i in range(len(tps))
    )
    return TvEstimate(tps, tv_values, float(bin_width), n_paths)


def invariant_histogram(
    spec: ChainSpec,
    x0: float,
    n_steps: int,
    burn_in: int | None,
    bin_width: float,
    seed: int,
) -> DensityGrid:
    """Invariant-law estimate from one long path after burn-in.

    Returns a DensityGrid whose values are histogram densities
    (mass / bin_width) at the bin centers; the masses sum to 1 by
    construction (out-of-range states fold into the end bins). The
    error field carries the 1/sqrt(n) statistical scale, not a
    quadrature bound.
    """
    if n_steps < 2:
        raise DomainError(f"n_steps must be >= 2, got {n_steps}")
    if burn_in is None:
        burn_in = n_steps // 2
    if not 0 <= burn_in < n_steps:
        raise DomainError(f"burn_in must lie in [0, n_steps), got {burn_in}")
    states = simulate(spec, x0, n_steps, seed).states[burn_in:]
    edges = _hist_edges(bin_width)
    counts = _clipped_counts(states, edges)
    total = counts.sum()
    centers = 0.5 * (edges[:-1] + edges[1:])
    mass = counts / total
    return DensityGrid(
        points=centers,
        values=mass / bin_width,
        quadrature_error=1.0 / math.sqrt(total),
    )
