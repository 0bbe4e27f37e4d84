"""Univariate extreme value primitives.

GEV distribution function, regular-variation index bookkeeping, scaling
functions, the left-continuous inverse of a nondecreasing function, the
construction of domain-of-attraction normalizations from a survival
function, and the two limit forms of the conditional scaling/centering.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "GevShape",
    "RvIndex",
    "ScalingFunction",
    "PsiPair",
    "Survival",
    "gev_cdf",
    "left_inverse",
    "doa_scalings",
    "psi_eval",
]


@dataclass(frozen=True)
class GevShape:
    """Shape parameter of the generalized extreme value law."""

    gamma: float

    def support(self) -> tuple[float, float]:
        """Open interval ``{x : 1 + gamma * x > 0}`` as ``(lower, upper)``."""
        g = self.gamma
        if g > 0:
            return -1.0 / g, math.inf
        if g < 0:
            return -math.inf, -1.0 / g
        return -math.inf, math.inf


@dataclass(frozen=True)
class RvIndex:
    """Exponent of regular variation.

    For a survival function the index is negative; ``tail_exponent`` is its
    magnitude and ``xi`` the reciprocal, which is what a Hill estimator
    targets.
    """

    index: float

    def __post_init__(self):
        if not math.isfinite(self.index):
            raise ValueError("regular variation index must be finite")

    @property
    def tail_exponent(self) -> float:
        return -self.index

    @property
    def xi(self) -> float:
        return -1.0 / self.index


@dataclass(frozen=True)
class ScalingFunction:
    """A positive (or centering) function of ``t >= 1`` with known RV index.

    ``form`` is ``"power"`` for ``coef * t**kappa``, ``"tabulated"`` for a
    monotone grid interpolated linearly in ``(log t, value)``, or
    ``"quantile"`` for functions derived from a survival function.
    """

    form: str
    kappa: float
    coef: float = 1.0
    limit_at_infinity: Optional[float] = None
    _fn: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.form not in ("power", "tabulated", "quantile"):
            raise ValueError(f"unknown scaling form {self.form!r}")
        if self.form != "power" and self._fn is None:
            raise ValueError(f"{self.form} scaling needs an evaluator")

    @classmethod
    def power(cls, coef: float, kappa: float, limit_at_infinity: Optional[float] = None) -> "ScalingFunction":
        if limit_at_infinity is None and kappa < 0:
            limit_at_infinity = 0.0
        return cls("power", float(kappa), float(coef), limit_at_infinity)

    @classmethod
    def tabulated(cls, ts: Sequence[float], values: Sequence[float], kappa: float,
                  limit_at_infinity: Optional[float] = None) -> "ScalingFunction":
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape or len(ts) < 2:
            raise ValueError("tabulated scaling needs matching 1-d grids of length >= 2")
        if np.any(np.diff(ts) <= 0) or ts[0] < 1:
            raise ValueError("tabulated scaling grid must be increasing and start at t >= 1")
        d = np.diff(values)
        if not (np.all(d >= 0) or np.all(d <= 0)):
            raise ValueError("tabulated scaling values must be monotone")
        logt = np.log(ts)

        def fn(t):
            return np.interp(np.log(t), logt, values)

        return cls("tabulated", float(kappa), 1.0, limit_at_infinity, fn)

    @classmethod
    def from_callable(cls, fn: Callable, kappa: float, limit_at_infinity: Optional[float] = None,
                      form: str = "quantile") -> "ScalingFunction":
        return cls(form, float(kappa), 1.0, limit_at_infinity, fn)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 1):
            raise ValueError("scaling functions are evaluated at t >= 1")
        if self.form == "power":
            out = self.coef * t_arr ** self.kappa
        else:
            out = np.asarray(self._fn(t_arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    def describe(self) -> dict:
        d = {"form": self.form, "kappa": self.kappa}
        if self.form == "power":
            d["coef"] = self.coef
        if self.limit_at_infinity is not None:
            d["limit_at_infinity"] = self.limit_at_infinity
        return d


@dataclass(frozen=True)
class PsiPair:
    """Limits of ``alpha(tx)/alpha(t)`` and ``(beta(tx) - beta(t))/alpha(t)``."""

    rho: float
    k: float = 0.0
    psi2_zero: bool = False


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValueError("invalid argument: NaN")
    return arr


def gev_cdf(x, shape: GevShape):
    """Evaluate ``G_gamma(x)``, clamped to 0/1 outside the support."""
    arr = _as_float_array(x)
    g = float(shape.gamma)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if g == 0.0:
            out = np.exp(-np.exp(-arr))
        else:
            base = 1.0 + g * arr
            inside = base > 0
            safe = np.where(inside, base, 1.0)
            out = np.where(inside, np.exp(-safe ** (-1.0 / g)), 0.0 if g > 0 else 1.0)
    return float(out) if out.ndim == 0 else out


_SIGN = 0x8000000000000000


def _float_to_ordered(v: float) -> int:
    (i,) = struct.unpack("<q", struct.pack("<d", v))
    return i if i >= 0 else -(i & 0x7FFFFFFFFFFFFFFF)


def _ordered_to_float(i: int) -> float:
    if i >= 0:
        return struct.unpack("<d", struct.pack("<q", i))[0]
    return struct.unpack("<d", struct.pack("<Q", (-i) | _SIGN))[0]


def left_inverse(f: Callable[[float], float], y: float, lo: float, hi: float) -> float:
    """Return ``inf{s in [lo, hi] : f(s) >= y}`` for nondecreasing ``f``.

    The search bisects over the ordered bit patterns of doubles, so the
    result is the smallest representable ``s`` with ``f(s) >= y``.  This keeps
    ``left_inverse(f, f(s)) <= s`` exact in floating point.

    Raises:
        ValueError: if ``y`` exceeds ``f(hi)`` ("inverse undefined") or is NaN.
    """
    if math.isnan(y):
        raise ValueError("invalid argument: NaN")
    if not lo <= hi:
        raise ValueError("empty domain")
    if f(hi) < y:
        raise ValueError("inverse undefined: level above the range of f")
    if f(lo) >= y:
        return float(lo)
    L, H = _float_to_ordered(float(lo)), _float_to_ordered(float(hi))
    while H - L > 1:
        M = (L + H) // 2
        if f(_ordered_to_float(M)) >= y:
            H = M
        else:
            L = M
    return _ordered_to_float(H)


@dataclass(frozen=True)
class Survival:
    """Survival function ``P[Y > x]`` on ``[lower, upper]``.

    ``isf`` is the analytic inverse ``p -> inf{x : sf(x) <= p}`` when known;
    otherwise quantiles fall back to :func:`left_inverse`.
    """

    sf: Callable
    lower: float
    upper: float
    isf: Optional[Callable] = None
    name: str = "custom"

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            out = np.where(arr < self.lower, 1.0, np.where(arr >= self.upper, 0.0, self.sf(np.clip(arr, self.lower, self.upper))))
        return float(out) if out.ndim == 0 else out

    @classmethod
    def pareto(cls, alpha: float, scale: float = 1.0) -> "Survival":
        if alpha <= 0 or scale <= 0:
            raise ValueError("Pareto needs alpha > 0 and scale > 0")
        return cls(lambda x: (x / scale) ** (-alpha), scale, math.inf,
                   lambda p: scale * np.asarray(p, dtype=float) ** (-1.0 / alpha), f"pareto({alpha})")

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0) -> "Survival":
        w = hi - lo
        return cls(lambda x: (hi - x) / w, lo, hi, lambda p: hi - np.asarray(p, dtype=float) * w, "uniform")

    @classmethod
    def bounded_power(cls, power: float, endpoint: float = 1.0, width: float = 1.0) -> "Survival":
        """``((endpoint - x) / width) ** power`` on ``[endpoint - width, endpoint]``."""
        return cls(lambda x: ((endpoint - x) / width) ** power, endpoint - width, endpoint,
                   lambda p: endpoint - width * np.asarray(p, dtype=float) ** (1.0 / power),
                   f"bounded_power({power})")

    @classmethod
    def tabulated(cls, xs: Sequence[float], values: Sequence[float]) -> "Survival":
        """Linear interpolation between knots; values must strictly decrease."""
        xs = np.asarray(xs, dtype=float)
        values = np.asarray(values, dtype=float)
        if xs.ndim != 1 or xs.shape != values.shape or len(xs) < 2:
            raise ValueError("tabulated survival needs matching grids of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("knots must be increasing")
        pos = values > 0
        if np.any(np.diff(values[pos]) >= 0) or np.any(np.diff(values) > 0):
            raise ValueError("non-monotone survival: values must strictly decrease where positive")
        if values[0] > 1 or values[-1] < 0:
            raise ValueError("survival values must lie in [0, 1]")
        rx, rv = xs[::-1], values[::-1]

        def isf(p):
            return np.interp(p, rv, rx)

        return cls(lambda x: np.interp(x, xs, values), float(xs[0]), float(xs[-1]), isf, "tabulated")

    def check_monotone(self, points: int = 257) -> None:
        lo = self.lower
        hi = self.upper if math.isfinite(self.upper) else max(abs(lo), 1.0) * 1e6
        grid = np.linspace(lo, hi, points) if math.isfinite(self.upper) else np.geomspace(max(lo, 1e-12), hi, points)
        vals = np.asarray(self.sf(grid), dtype=float)
        pos = vals > 0
        if np.any(np.diff(vals) > 0) or np.any(np.diff(vals[pos]) >= 0):
            raise ValueError("non-monotone survival")

    def quantile_level(self, t):
        """``b(t) = (1/sf)^{<-}(t)``, i.e. the quantile at level ``1 - 1/t``."""
        t_arr = np.asarray(t, dtype=float)
        if self.isf is not None:
            out = np.asarray(self.isf(1.0 / t_arr), dtype=float)
        else:
            hi = self.upper if math.isfinite(self.upper) else 1e300

            def one(tv):
                return left_inverse(lambda s: 1.0 / max(self(s), 1e-300), float(tv), self.lower, hi)

            out = np.vectorize(one, otypes=[float])(t_arr)
        return float(out) if out.ndim == 0 else out


def doa_scalings(survival: Survival, shape: GevShape) -> tuple[ScalingFunction, ScalingFunction]:
    """Scaling ``a`` and centering ``b`` putting ``survival`` in ``D(G_gamma)``.

    ``b(t)`` is the quantile at level ``1 - 1/t``.  For ``gamma > 0`` we take
    ``a(t) = gamma * b(t)``; for ``gamma < 0``, ``a(t) = |gamma| (b(inf) - b(t))``
    with ``b(inf)`` the finite upper endpoint.
    """
    g = float(shape.gamma)
    if g == 0.0:
        raise ValueError("gamma = 0 is not supported for product analysis")
    survival.check_monotone()
    if g < 0:
        if not math.isfinite(survival.upper):
            raise ValueError("gamma < 0 requires a finite upper endpoint")
        b_inf = float(survival.upper)
        b = ScalingFunction.from_callable(survival.quantile_level, 0.0, b_inf)

        def a_fn(t):
            return abs(g) * (b_inf - survival.quantile_level(t))

        a = ScalingFunction.from_callable(a_fn, g, 0.0)
    else:
        b = ScalingFunction.from_callable(survival.quantile_level, g, math.inf)

        def a_fn(t):
            return g * survival.quantile_level(t)

        a = ScalingFunction.from_callable(a_fn, g, math.inf)
    return a, b


def psi_eval(p: PsiPair, x: float) -> tuple[float, float]:
    """Evaluate ``(psi1(x), psi2(x))``."""
    if not x > 0:
        raise ValueError("psi functions are defined for x > 0")
    psi1 = x ** p.rho
    if p.psi2_zero:
        psi2 = 0.0
    elif p.rho == 0:
        psi2 = p.k * math.log(x)
    else:
        psi2 = (p.k / p.rho) * (x ** p.rho - 1.0)
    return float(psi1), float(psi2)
