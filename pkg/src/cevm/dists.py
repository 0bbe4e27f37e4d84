"""Bounded one-dimensional laws used as mixing factors in the model zoo.

Each law samples by inverse transform from a single uniform, serializes to
JSON and supports expectations of vectorized functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate


@dataclass(frozen=True)
class DistSpec:
    kind: str  # "point" | "uniform" | "discrete"
    params: tuple

    def __post_init__(self):
        if self.kind == "point":
            (v,) = self.params
            if not np.isfinite(v):
                raise ValueError("point mass needs a finite location")
        elif self.kind == "uniform":
            lo, hi = self.params
            if not lo < hi:
                raise ValueError("uniform needs low < high")
        elif self.kind == "discrete":
            values, probs = self.params
            if len(values) != len(probs) or not values:
                raise ValueError("discrete law needs matching nonempty values/probs")
            if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
                raise ValueError("discrete probabilities must be nonnegative and sum to 1")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def point(cls, value: float) -> "DistSpec":
        return cls("point", (float(value),))

    @classmethod
    def uniform(cls, low: float, high: float) -> "DistSpec":
        return cls("uniform", (float(low), float(high)))

    @classmethod
    def discrete(cls, values, probs) -> "DistSpec":
        return cls("discrete", (tuple(float(v) for v in values), tuple(float(p) for p in probs)))

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "point":
            return self.params[0], self.params[0]
        if self.kind == "uniform":
            return self.params
        return min(self.params[0]), max(self.params[0])

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "point":
            return np.full_like(u, self.params[0])
        if self.kind == "uniform":
            lo, hi = self.params
            return lo + (hi - lo) * u
        values, probs = self.params
        cum = np.cumsum(probs)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u, side="right")
        return np.asarray(values)[np.minimum(idx, len(values) - 1)]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "point":
            return (x >= self.params[0]).astype(float)
        if self.kind == "uniform":
            lo, hi = self.params
            return np.clip((x - lo) / (hi - lo), 0.0, 1.0)
        values, probs = self.params
        return sum(p * (x >= v) for v, p in zip(values, probs)).astype(float)

    def expect(self, g: Callable) -> float:
        """``E[g(V)]`` for vectorized ``g``."""
        if self.kind == "point":
            return float(g(np.asarray([self.params[0]]))[0])
        if self.kind == "discrete":
            values, probs = self.params
            return float(np.dot(probs, g(np.asarray(values))))
        lo, hi = self.params
        val, _ = sp_integrate.quad(lambda v: float(g(np.asarray([v]))[0]), lo, hi, limit=200,
                                   epsabs=1e-13, epsrel=1e-11)
        return val / (hi - lo)

    def moment(self, p: float) -> float:
        return self.expect(lambda v: v ** p)

    def to_json(self) -> dict:
        if self.kind == "point":
            return {"kind": "point", "value": self.params[0]}
        if self.kind == "uniform":
            return {"kind": "uniform", "low": self.params[0], "high": self.params[1]}
        return {"kind": "discrete", "values": list(self.params[0]), "probs": list(self.params[1])}

    @classmethod
    def from_json(cls, d) -> "DistSpec":
        if isinstance(d, (int, float)):
            return cls.point(d)
        kind = d.get("kind")
        if kind == "point":
            return cls.point(d["value"])
        if kind == "uniform":
            return cls.uniform(d["low"], d["high"])
        if kind == "discrete":
            return cls.discrete(d["values"], d["probs"])
        raise ValueError(f"unknown distribution kind {kind!r}")
