"""Tail-index, scaled-tail and conditional-distribution estimators.

All counting goes through :mod:`cevm._kernels`, so results are integer
counts combined by exact arithmetic and therefore independent of how the
data is partitioned.  :class:`TopK` keeps the largest order statistics of a
stream for Hill-type estimates at sample sizes that do not fit in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import _kernels
from .evt_core import RvIndex

__all__ = [
    "TailEstimate",
    "ScaledTailEstimate",
    "ConditionalH",
    "IndexFit",
    "TopK",
    "default_k",
    "sweep_ks",
    "hill",
    "hill_from_top",
    "hill_sweep",
    "scaled_tail",
    "scaled_tail_from_count",
    "conditional_H",
    "asy_indep_diag",
    "degeneracy_diag",
    "index_regression",
    "index_regression_fit",
    "index_regression_from_top",
]

Scaling = Union[float, Callable[[float], float]]
Z_95 = 1.959963984540054


@dataclass(frozen=True)
class TailEstimate:
    """Hill estimate of ``xi = 1 / tail exponent`` with a normal 95% band."""

    xi_hat: float
    k: int
    n: int
    ci_low: float
    ci_high: float

    @property
    def tail_exponent(self) -> float:
        return 1.0 / self.xi_hat

    @property
    def rv_index(self) -> RvIndex:
        return RvIndex(-1.0 / self.xi_hat)


@dataclass(frozen=True)
class ScaledTailEstimate:
    """Estimate of ``t P[(x/s1(t), y/s2(t)) in region]``."""

    t: float
    region: tuple
    value: float
    se: float
    count: int
    n: int


@dataclass(frozen=True)
class ConditionalH:
    """Empirical conditional distribution function on a fixed grid."""

    grid: tuple
    values: tuple
    se: tuple
    exceedances: int

    def spread(self) -> float:
        return max(self.values) - min(self.values)


@dataclass(frozen=True)
class IndexFit:
    rv_index: RvIndex
    tail_exponent: float
    se: float
    points: int


def default_k(n: int) -> int:
    return int(math.ceil(math.sqrt(n)))


def sweep_ks(n: int) -> list[int]:
    """Hill ``k`` for the sensitivity sweep ``n^0.4, n^0.5, n^0.6``."""
    return [max(1, min(n - 1, int(math.ceil(n ** e)))) for e in (0.4, 0.5, 0.6)]


def _band(xi: float, k: int, n: int) -> TailEstimate:
    half = Z_95 / math.sqrt(k)
    return TailEstimate(float(xi), int(k), int(n), xi * (1.0 - half), xi * (1.0 + half))


def hill_from_top(top_desc: np.ndarray, k: int, n: int) -> TailEstimate:
    """Hill estimate from the ``k + 1`` (or more) largest values, descending."""
    top_desc = np.asarray(top_desc, dtype=float)
    if not 1 <= k < n:
        raise ValueError(f"k out of range: need 1 <= k < n, got k={k}, n={n}")
    if top_desc.size < k + 1:
        raise ValueError("need at least k + 1 order statistics")
    head = top_desc[: k + 1]
    if not np.all(head > 0):
        raise ValueError("nonpositive samples among the top k + 1")
    ref = head[k]
    xi = float(np.mean(np.log(head[:k] / ref)))
    return _band(xi, k, n)


def _top_desc(samples: np.ndarray, m: int) -> np.ndarray:
    n = samples.size
    m = min(m, n)
    if m == n:
        return np.sort(samples)[::-1]
    part = np.partition(samples, n - m)[n - m:]
    return np.sort(part)[::-1]


def hill(samples, k: int) -> TailEstimate:
    """Hill estimator ``(1/k) sum_{i<=k} log s_(i) - log s_(k+1)``.

    Raises:
        ValueError: ``k`` out of range or nonpositive values among the top
            ``k + 1`` order statistics.
    """
    s = np.asarray(samples, dtype=float).ravel()
    n = s.size
    if not 1 <= k < n:
        raise ValueError(f"k out of range: need 1 <= k < n, got k={k}, n={n}")
    if np.any(np.isnan(s)):
        raise ValueError("samples contain NaN")
    return hill_from_top(_top_desc(s, k + 1), k, n)


def hill_sweep(samples, ks: Optional[Sequence[int]] = None) -> dict[int, TailEstimate]:
    s = np.asarray(samples, dtype=float).ravel()
    ks = list(ks) if ks is not None else sweep_ks(s.size)
    top = _top_desc(s, max(ks) + 1)
    return {k: hill_from_top(top, k, s.size) for k in ks}


class TopK:
    """Running multiset of the ``capacity`` largest values of a stream."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.n = 0
        self._vals = np.empty(0)

    def update(self, values) -> None:
        v = np.asarray(values, dtype=float).ravel()
        self.n += v.size
        merged = np.concatenate([self._vals, v])
        if merged.size > self.capacity:
            merged = np.partition(merged, merged.size - self.capacity)[-self.capacity:]
        self._vals = merged

    def merge(self, other: "TopK") -> None:
        n = self.n + other.n
        self.update(other._vals)
        self.n = n

    def descending(self) -> np.ndarray:
        return np.sort(self._vals)[::-1]


def _scale(s: Scaling, t: float) -> float:
    return float(s(t)) if callable(s) else float(s)


def _split(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2:
        x, y = pairs
    else:
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must have shape (n, 2) or be an (x, y) tuple")
        x, y = arr[:, 0], arr[:, 1]
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def scaled_tail_from_count(t: float, count: int, n: int, region=None) -> ScaledTailEstimate:
    """``value = t count / n``; zero counts get the rule-of-three bound ``3t/n`` as se."""
    if n <= 0:
        raise ValueError("no samples")
    p = count / n
    if count == 0:
        se = 3.0 * t / n
    else:
        se = t * math.sqrt(p * (1.0 - p) / n)
    return ScaledTailEstimate(float(t), region, t * p, se, int(count), int(n))


def _check_region(region):
    (x0, x1), (y0, y1) = region
    if not (x0 < x1 and y0 < y1):
        raise ValueError("empty region")
    if not y0 > 0:
        raise ValueError("region must be bounded away from y = 0")


def scaled_tail(pairs, t: float, scalings: tuple, region) -> ScaledTailEstimate:
    """Estimate ``t P[(x/s1(t), y/s2(t)) in region]``.

    ``region`` is ``((x_lo, x_hi), (y_lo, y_hi))`` with half-open sides
    ``(lo, hi]``; infinite bounds are allowed.
    """
    _check_region(region)
    x, y = _split(pairs)
    n = x.size
    if n < t:
        raise ValueError("need n >= t")
    s1, s2 = _scale(scalings[0], t), _scale(scalings[1], t)
    (x0, x1), (y0, y1) = region
    rect = np.array([[x0 * s1, x1 * s1, y0 * s2, y1 * s2]])
    count = int(_kernels.count_rects(x, y, rect)[0])
    return scaled_tail_from_count(t, count, n, region)


def conditional_H(pairs, t: float, alpha_scaling: Scaling, y_threshold_scaling: Scaling,
                  x_grid: Sequence[float], y: float = 1.0, min_exceedances: int = 30) -> ConditionalH:
    """Empirical ``P[x / alpha(t) <= grid | y > y_threshold(t) * y]``."""
    xs, ys = _split(pairs)
    thr = _scale(y_threshold_scaling, t) * y
    sel = xs[ys > thr]
    m = sel.size
    if m < min_exceedances:
        raise ValueError(f"insufficient tail data: {m} exceedances, need {min_exceedances}")
    scaled = np.sort(sel / _scale(alpha_scaling, t))
    grid = np.asarray(x_grid, dtype=float)
    vals = np.searchsorted(scaled, grid, side="right") / m
    se = np.sqrt(vals * (1.0 - vals) / m)
    return ConditionalH(tuple(grid.tolist()), tuple(vals.tolist()), tuple(se.tolist()), m)


def asy_indep_diag(pairs, t: float, A_scaling: Scaling, a_scaling: Scaling, x: float, y: float) -> ScaledTailEstimate:
    """Estimate of ``t P[X > A(t) x, Y > a(t) y]``."""
    return scaled_tail(pairs, t, (A_scaling, a_scaling), ((x, math.inf), (y, math.inf)))


def degeneracy_diag(pairs, t: float, A_scaling: Scaling, B_scaling: Scaling, y: float,
                    x_grid: Sequence[float]) -> float:
    """Spread ``max - min`` of the conditional distribution under scaling ``A``.

    A limit that does not depend on ``x`` drives the spread to zero.
    """
    return conditional_H(pairs, t, A_scaling, B_scaling, x_grid, y).spread()


def _regression(log_u: np.ndarray, log_p: np.ndarray, k_min: int) -> IndexFit:
    if log_u.size < 2 or np.ptp(log_u) == 0:
        raise ValueError("degenerate spread: thresholds do not vary")
    slope = np.polyfit(log_u, log_p, 1)[0]
    if not slope < 0:
        raise ValueError("degenerate spread: survival does not decrease")
    alpha = -float(slope)
    return IndexFit(RvIndex(-alpha), alpha, alpha / math.sqrt(k_min), int(log_u.size))


def _levels(n: int, k: Optional[int], quantile_grid) -> np.ndarray:
    if quantile_grid is not None:
        js = np.rint(np.asarray(quantile_grid, dtype=float) * n).astype(np.int64)
    else:
        k = k or default_k(n)
        js = np.rint(np.geomspace(k, 10 * k, 25)).astype(np.int64)
    js = np.unique(js)
    if js.size == 0 or js[0] < 1 or js[-1] > n:
        raise ValueError("quantile grid outside (0, 1]")
    return js


def index_regression_from_top(top_desc: np.ndarray, n: int, k: Optional[int] = None,
                              quantile_grid=None) -> IndexFit:
    """Log-log regression of empirical survival ``j/n`` on the ``j``-th largest value."""
    top = np.asarray(top_desc, dtype=float)
    js = _levels(n, k, quantile_grid)
    if js[-1] > top.size:
        raise ValueError("not enough order statistics for the quantile grid")
    u = top[js - 1]
    if np.any(u <= 0):
        raise ValueError("thresholds must be positive")
    return _regression(np.log(u), np.log(js / n), int(js[0]))


def index_regression_fit(samples, quantile_grid=None, k: Optional[int] = None) -> IndexFit:
    """Tail exponent from the survival slope over the top decade ``p in [k/n, 10k/n]``."""
    s = np.asarray(samples, dtype=float).ravel()
    n = s.size
    if n < 1000:
        raise ValueError("index regression needs at least 1000 samples")
    js = _levels(n, k, quantile_grid)
    return index_regression_from_top(_top_desc(s, int(js[-1])), n, k, quantile_grid)


def index_regression(samples, quantile_grid=None) -> RvIndex:
    return index_regression_fit(samples, quantile_grid).rv_index
