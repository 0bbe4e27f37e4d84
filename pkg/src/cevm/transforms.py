"""Reductions of a CEVM pair to zero-centered form and the product pivots.

Cases I-IV reduce ``(X, Y)`` to, respectively, ``(X, Y)``, ``(X~, Y~)``,
``(X, Y~)`` and ``(beta(inf) - X, Y)``, where ``v~ = 1 / (endpoint - v)``.
After the reduction both coordinates need only a positive scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .classifier import Case, CaseId, Pivot
from .evt_core import ScalingFunction

__all__ = [
    "tilde",
    "tilde_inverse",
    "tilde_scalings",
    "CoordinateMap",
    "coordinate_map",
    "ReducedPair",
    "reduce_model",
    "pivot_for_case",
    "pivot_value",
    "pivot_array",
    "pivot_scaling",
]

CONE_FULL = "[-inf,inf]x(0,inf]"
CONE_POSITIVE = "[0,inf]x(0,inf]"


def tilde(x, endpoint: float):
    """``1 / (endpoint - x)``; requires ``x < endpoint``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr >= endpoint):
        raise ValueError("beyond endpoint: tilde needs x < endpoint")
    out = 1.0 / (endpoint - arr)
    return float(out) if out.ndim == 0 else out


def tilde_inverse(x_tilde, endpoint: float):
    """Inverse of :func:`tilde`: ``endpoint - 1 / x_tilde``."""
    arr = np.asarray(x_tilde, dtype=float)
    out = endpoint - 1.0 / arr
    return float(out) if out.ndim == 0 else out


def _reciprocal(f: ScalingFunction) -> ScalingFunction:
    if f.form == "power":
        return ScalingFunction.power(1.0 / f.coef, -f.kappa)
    limit = None
    if f.limit_at_infinity is not None:
        limit = math.inf if f.limit_at_infinity == 0 else 1.0 / f.limit_at_infinity
    return ScalingFunction.from_callable(lambda t: 1.0 / f(t), -f.kappa, limit)


def tilde_scalings(alpha: ScalingFunction, beta: ScalingFunction, a: ScalingFunction,
                   psi2_zero: bool) -> tuple[ScalingFunction, ScalingFunction]:
    """Scalings of ``(X~, Y~)`` in Case II.

    ``alpha~ = 1 / (|rho| (beta(inf) - beta(t)))`` when ``psi2 != 0``, else
    ``1 / alpha``; ``a~ = 1 / a``.  ``rho`` is read from ``alpha.kappa``.
    """
    if beta.limit_at_infinity is None or not math.isfinite(beta.limit_at_infinity):
        raise ValueError("beta(inf) must be finite for the tilde scalings")
    if psi2_zero:
        alpha_tilde = _reciprocal(alpha)
    else:
        rho = alpha.kappa
        if rho >= 0:
            raise ValueError("tilde scalings need rho < 0")
        beta_inf = beta.limit_at_infinity

        def fn(t):
            return 1.0 / (abs(rho) * (beta_inf - np.asarray(beta(t), dtype=float)))

        alpha_tilde = ScalingFunction.from_callable(fn, -rho, math.inf)
    return alpha_tilde, _reciprocal(a)


@dataclass(frozen=True)
class CoordinateMap:
    """Forward reduction and its inverse for one case."""

    case: Case
    beta_inf: Optional[float]
    b_inf: Optional[float]

    def forward(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c = self.case
        if c is Case.I:
            return x, y
        if c in (Case.IIa, Case.IIb, Case.IIc, Case.IId):
            return tilde(x, self.beta_inf), tilde(y, self.b_inf)
        if c is Case.III:
            return x, tilde(y, self.b_inf)
        if c is Case.IV:
            return self.beta_inf - x, y
        raise ValueError("no reduction for an unsupported case")

    def inverse(self, rx, ry):
        rx = np.asarray(rx, dtype=float)
        ry = np.asarray(ry, dtype=float)
        c = self.case
        if c is Case.I:
            return rx, ry
        if c in (Case.IIa, Case.IIb, Case.IIc, Case.IId):
            return self.beta_inf - 1.0 / rx, self.b_inf - 1.0 / ry
        if c is Case.III:
            return rx, self.b_inf - 1.0 / ry
        if c is Case.IV:
            return self.beta_inf - rx, ry
        raise ValueError("no reduction for an unsupported case")


def coordinate_map(case: Case, beta_inf: Optional[float] = None, b_inf: Optional[float] = None) -> CoordinateMap:
    if case is Case.UNSUPPORTED:
        raise ValueError("no reduction for an unsupported case")
    if case in (Case.IIa, Case.IIb, Case.IIc, Case.IId, Case.IV) and beta_inf is None:
        raise ValueError("reduction needs beta_inf")
    if case in (Case.IIa, Case.IIb, Case.IIc, Case.IId, Case.III) and b_inf is None:
        raise ValueError("reduction needs b_inf")
    return CoordinateMap(case, beta_inf, b_inf)


@dataclass(frozen=True)
class ReducedPair:
    sampler: Callable  # (seed, n) -> (rx, ry)
    alpha_tilde: ScalingFunction
    a_tilde: ScalingFunction
    cone: str
    coords: CoordinateMap

    def sample(self, seed: int, n: int):
        return self.sampler(seed, n)

    def inverse(self, rx, ry):
        return self.coords.inverse(rx, ry)


def reduce_model(model) -> ReducedPair:
    """Reduce a classified model to zero-centered coordinates.

    ``model`` must expose ``case``, ``params``, ``scalings`` (mapping with
    ``alpha``, ``beta``, ``a``, ``b``) and ``sample(seed, n)``.  Models that can
    sample their reduced coordinates natively (``sample_reduced``) are used
    as is, so that ``inverse(sample_reduced) == sample`` holds exactly.
    """
    case = model.case.tag if isinstance(model.case, CaseId) else model.case
    if case is Case.UNSUPPORTED:
        raise ValueError("cannot reduce an unsupported model")
    p = model.params
    coords = coordinate_map(case, p.beta_inf, p.b_inf)
    s = model.scalings
    if case in (Case.IIa, Case.IIb, Case.IIc, Case.IId):
        alpha_t, a_t = tilde_scalings(s["alpha"], s["beta"], s["a"], p.psi2_zero)
        cone = CONE_POSITIVE
    elif case is Case.III:
        alpha_t, a_t = s["alpha"], _reciprocal(s["a"])
        cone = CONE_FULL
    elif case is Case.IV:
        alpha_t, a_t = s["alpha"], s["a"]
        cone = CONE_POSITIVE
    else:
        alpha_t, a_t = s["alpha"], s["a"]
        cone = CONE_FULL

    native = getattr(model, "sample_reduced", None)
    if native is not None:
        sampler = native
    else:
        def sampler(seed, n):
            x, y = model.sample(seed, n)
            return coords.forward(x, y)

    return ReducedPair(sampler, alpha_t, a_t, cone, coords)


def pivot_for_case(case: Case) -> Pivot:
    return {
        Case.I: Pivot.XY,
        Case.III: Pivot.XY,
        Case.IV: Pivot.XY,
        Case.IIa: Pivot.INV_SHIFT_MINUS_XY,
        Case.IIb: Pivot.INV_XY,
        Case.IIc: Pivot.NEG_INV_XY,
        Case.IId: Pivot.INV_XY_MINUS_SHIFT,
    }[case]


def _shift(case: Case, beta_inf, b_inf) -> float:
    if case in (Case.IIa, Case.IId):
        if beta_inf is None or b_inf is None:
            raise ValueError("pivot needs both endpoints")
        return float(beta_inf) * float(b_inf)
    return 0.0


def pivot_value(c, x: float, y: float, beta_inf: Optional[float] = None,
                b_inf: Optional[float] = None) -> float:
    """Evaluate the case's pivot at one point, checking declared endpoints."""
    case = c.tag if isinstance(c, CaseId) else Case(c)
    if case is Case.UNSUPPORTED:
        raise ValueError("no pivot for an unsupported case")
    if beta_inf is not None and x > beta_inf:
        raise ValueError("outside support: x exceeds beta_inf")
    if b_inf is not None and y > b_inf:
        raise ValueError("outside support: y exceeds b_inf")
    piv = pivot_for_case(case)
    shift = _shift(case, beta_inf, b_inf)
    xy = x * y
    if piv is Pivot.XY:
        return float(xy)
    den = {
        Pivot.INV_SHIFT_MINUS_XY: shift - xy,
        Pivot.INV_XY: xy,
        Pivot.NEG_INV_XY: -xy,
        Pivot.INV_XY_MINUS_SHIFT: xy - shift,
    }[piv]
    if den == 0:
        raise ValueError("pivot singular")
    return 1.0 / den


def pivot_array(case: Case, x, y, beta_inf: Optional[float] = None, b_inf: Optional[float] = None,
                kernels=None):
    """Vectorized pivot; no support checks (samplers guarantee them)."""
    k = kernels or _kernels.ACTIVE
    return k.pivot(pivot_for_case(case).code, x, y, _shift(case, beta_inf, b_inf))


def pivot_scaling(case: Case, reduced: ReducedPair) -> Callable:
    """Normalization of the pivot at level ``t`` for the case's theorem."""
    al, at = reduced.alpha_tilde, reduced.a_tilde
    if case in (Case.I, Case.IIb):
        return lambda t: al(t) * at(t)
    if case in (Case.IIa, Case.IIc, Case.IId):
        return al
    # III uses a~, IV uses a; both are stored as the second scaling
    return at
