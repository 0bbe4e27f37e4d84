"""Closed-form product limits and spectral-measure utilities."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .quadrature import integrate

__all__ = [
    "SpectralMeasure",
    "case1_spectral_limit",
    "case4_limit",
    "example7_integral",
    "example7_limit",
    "spectral_from_samples",
    "homogeneity_check",
    "scale_rect",
]


@dataclass(frozen=True)
class SpectralMeasure:
    """Finite measure on angles ``omega = x / (x + y)`` in ``[0, 1)``, stored as atoms."""

    omegas: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.omegas) != len(self.weights):
            raise ValueError("omegas and weights differ in length")
        for w in self.omegas:
            if not 0.0 <= w < 1.0:
                raise ValueError("spectral atoms must lie in [0, 1)")
        for m in self.weights:
            if not (m >= 0 and math.isfinite(m)):
                raise ValueError("spectral weights must be finite and nonnegative")

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple[float, float]]) -> "SpectralMeasure":
        atoms = list(atoms)
        return cls(tuple(float(o) for o, _ in atoms), tuple(float(w) for _, w in atoms))

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def integrate(self, g: Callable) -> float:
        if not self.omegas:
            return 0.0
        om = np.asarray(self.omegas)
        return float(np.dot(np.asarray(self.weights), g(om)))

    def to_json(self) -> list:
        return [{"omega": o, "weight": w} for o, w in zip(self.omegas, self.weights)]

    @classmethod
    def from_json(cls, items: list) -> "SpectralMeasure":
        return cls.from_atoms((d["omega"], d["weight"]) for d in items)


def case1_spectral_limit(z: float, S: SpectralMeasure, rho: float, gamma: float) -> float:
    """``z^(-1/(rho+gamma)) * int omega^(rho/(rho+gamma)) (1-omega)^(gamma/(rho+gamma)) S(d omega)``."""
    if not (z > 0 and rho > 0 and gamma > 0):
        raise ValueError("case1 limit needs z, rho, gamma > 0")
    if not S.omegas or S.total_mass == 0:
        warnings.warn("empty spectral measure: degenerate product limit", RuntimeWarning, stacklevel=2)
        return 0.0
    s = rho + gamma
    integral = S.integrate(lambda om: om ** (rho / s) * (1.0 - om) ** (gamma / s))
    return z ** (-1.0 / s) * integral


def case4_limit(z: float, beta_inf: float, gamma: float) -> float:
    """``z^(-1/gamma) * beta_inf^(1/gamma)``."""
    if not (z > 0 and beta_inf > 0 and gamma > 0):
        raise ValueError("case4 limit needs z, beta_inf, gamma > 0")
    return z ** (-1.0 / gamma) * beta_inf ** (1.0 / gamma)


def example7_integral(a: float, b: float, rel_tol: float = 1e-11) -> float:
    """``int_0^(1/2) (1 - z)^b z^(a-1) dz``.

    For ``a < 1`` the substitution ``z = u^(1/a)`` turns the integrand into
    the bounded ``(1 - u^(1/a))^b / a`` on ``[0, 2^-a]``.  For ``a >= 1`` the
    original integrand is bounded already and the substitution would only
    introduce a steep derivative at zero.  The tolerance is relative to the
    bound ``2^-a / a`` on the integral.
    """
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    scale = 0.5 ** a / a
    if a < 1:
        def g(u):
            return (1.0 - u ** (1.0 / a)) ** b / a

        value, _ = integrate(g, 0.0, 0.5 ** a, abs_tol=rel_tol * scale)
    else:
        def g(z):
            return (1.0 - z) ** b * z ** (a - 1.0)

        value, _ = integrate(g, 0.0, 0.5, abs_tol=rel_tol * scale)
    return value


def example7_limit(y: float, a: float, b: float) -> float:
    """Limit of ``t P[(1 - XY)^-1 / a~(t) > y]`` for the Beta-minimum model."""
    if not y > 0:
        raise ValueError("y must be positive")
    return a * y ** (-(a + b)) * example7_integral(a, b)


def spectral_from_samples(pairs, r_threshold: float, bins: int, t_scale: float = 1.0,
                          min_exceedances: int = 50) -> SpectralMeasure:
    """Histogram estimate of the spectral measure from nonnegative pairs.

    Points with ``r = x + y > r_threshold`` are binned by ``w = x / r``.  Each
    nonempty bin becomes one atom located at the mean angle of its points, and
    total mass is ``r_threshold * (exceedances / n) * t_scale``.
    """
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must have shape (n, 2)")
    if np.any(arr < 0):
        raise ValueError("pairs must be nonnegative")
    if bins < 1:
        raise ValueError("bins must be positive")
    n = arr.shape[0]
    r = arr.sum(axis=1)
    keep = r > r_threshold
    count = int(np.count_nonzero(keep))
    if count < min_exceedances:
        raise ValueError(f"insufficient tail data: {count} exceedances of r > {r_threshold}")
    w = arr[keep, 0] / r[keep]
    # w == 1 only when y == 0, which lies outside the cone; fold into the last bin
    idx = np.minimum((w * bins).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    sums = np.bincount(idx, weights=w, minlength=bins)
    mass = r_threshold * (count / n) * t_scale
    atoms = []
    for j in range(bins):
        if counts[j]:
            om = min(sums[j] / counts[j], np.nextafter(1.0, 0.0))
            atoms.append((float(om), mass * counts[j] / count))
    return SpectralMeasure.from_atoms(atoms)


def scale_rect(rect, c: float):
    (x0, x1), (y0, y1) = rect
    return ((c * x0, c * x1), (c * y0, c * y1))


def homogeneity_check(nu_estimate: Callable, c: float, rect, tol: float) -> bool:
    """Test ``nu(c * rect) == nu(rect) / c`` within ``tol``.

    ``rect`` is ``((x0, x1), (y0, y1))`` and must stay away from the axes.
    """
    (x0, _), (y0, _) = rect
    if not (c > 0):
        raise ValueError("c must be positive")
    if x0 <= 0 and y0 <= 0:
        raise ValueError("rectangle must be bounded away from the origin")
    lhs = nu_estimate(scale_rect(rect, c))
    rhs = nu_estimate(rect) / c
    return bool(abs(lhs - rhs) <= tol)
