"""Case taxonomy for products under the conditional extreme value model.

Maps the indices of the two scalings (``rho`` for X, ``gamma`` for Y), the
upper endpoints and the side conditions on the scalings to one of the cases
I, II(a)-II(d), III, IV, and predicts which transform of ``XY`` is
regularly varying, with which index and under which normalization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .evt_core import RvIndex

__all__ = [
    "Case",
    "UnsupportedReason",
    "CaseId",
    "ModelParams",
    "Pivot",
    "ProductLaw",
    "Hypothesis",
    "classify",
    "product_prediction",
    "hypotheses_report",
]


class Case(str, enum.Enum):
    I = "I"
    IIa = "IIa"
    IIb = "IIb"
    IIc = "IIc"
    IId = "IId"
    III = "III"
    IV = "IV"
    UNSUPPORTED = "Unsupported"


class UnsupportedReason(str, enum.Enum):
    GAMMA_ZERO = "gamma-zero"
    RHO_ZERO = "rho-zero"
    MIXED_X_POSITIVE_Y_ZERO = "mixed-endpoint-x-positive-y-zero"
    MIXED_X_NEGATIVE_Y_POSITIVE = "mixed-endpoint-x-negative-y-positive"
    CASE3_ENDPOINT = "case3-endpoint"
    # combinations outside the paper's case list that the fixed set above does not name
    CASE2_RATIO_UNBOUNDED = "case2-ratio-unbounded"
    CASE3_SCALING = "case3-scaling-not-reciprocal"
    CASE4_ENDPOINT = "case4-endpoint"
    CASE2_OTHER_ENDPOINTS = "case2-endpoints-not-covered"


_REASON_TEXT = {
    UnsupportedReason.GAMMA_ZERO: "gamma = 0 (Gumbel domain) is not treated",
    UnsupportedReason.RHO_ZERO: "rho = 0 gives no regular variation of the X scaling",
    UnsupportedReason.MIXED_X_POSITIVE_Y_ZERO: (
        "beta(inf) > 0 with b(inf) = 0: behavior of X near zero is not controlled by the model"),
    UnsupportedReason.MIXED_X_NEGATIVE_Y_POSITIVE: (
        "beta(inf) < 0 with b(inf) > 0: remodel (X, -Y) to reduce to II(d)"),
    UnsupportedReason.CASE3_ENDPOINT: "Case III needs b(inf) > 0",
    UnsupportedReason.CASE2_RATIO_UNBOUNDED: (
        "II(a)/II(d) need gamma < rho, or gamma = rho with alpha~/a~ bounded"),
    UnsupportedReason.CASE3_SCALING: "Case III needs alpha(t) ~ 1/a(t) (so rho = -gamma)",
    UnsupportedReason.CASE4_ENDPOINT: "Case IV needs beta(inf) > 0",
    UnsupportedReason.CASE2_OTHER_ENDPOINTS: "endpoint signs not covered by II(a)-II(d)",
}


@dataclass(frozen=True)
class CaseId:
    tag: Case
    reason: Optional[UnsupportedReason] = None

    @property
    def supported(self) -> bool:
        return self.tag is not Case.UNSUPPORTED

    def describe(self) -> str:
        if self.supported:
            return self.tag.value
        return f"Unsupported({self.reason.value})"

    def explanation(self) -> str:
        return "" if self.supported else _REASON_TEXT[self.reason]


@dataclass(frozen=True)
class ModelParams:
    rho: float
    gamma: float
    beta_inf: Optional[float] = None
    b_inf: Optional[float] = None
    psi2_zero: bool = True
    alpha_over_a_bounded: bool = False
    alpha_sim_recip_a: bool = False

    def validate(self) -> None:
        for name in ("rho", "gamma"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"invalid parameters: {name} must be a finite real")
        for name in ("beta_inf", "b_inf"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise ValueError(f"invalid parameters: {name} must be finite when given")
        if self.gamma < 0 and self.b_inf is None:
            raise ValueError("invalid parameters: gamma < 0 requires b_inf")
        if self.rho < 0 and self.beta_inf is None:
            raise ValueError("invalid parameters: rho < 0 requires beta_inf")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "ModelParams":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"invalid parameters: unknown fields {sorted(extra)}")
        return cls(**d)


class Pivot(str, enum.Enum):
    XY = "XY"
    INV_SHIFT_MINUS_XY = "inv(beta_inf*b_inf - XY)"
    INV_XY = "inv(XY)"
    NEG_INV_XY = "neg_inv(XY)"
    INV_XY_MINUS_SHIFT = "inv(XY - beta_inf*b_inf)"

    @property
    def code(self) -> int:
        return _PIVOT_CODES[self]


_PIVOT_CODES = {
    Pivot.XY: 0,
    Pivot.INV_SHIFT_MINUS_XY: 1,
    Pivot.INV_XY: 2,
    Pivot.NEG_INV_XY: 3,
    Pivot.INV_XY_MINUS_SHIFT: 4,
}


@dataclass(frozen=True)
class Hypothesis:
    """A named theorem hypothesis.

    ``status`` is ``declared`` (asserted by the model parameters),
    ``checkable`` (testable from samples or an analytic marginal, e.g. a moment
    exponent) or ``unknown``.
    """

    name: str
    status: str
    detail: str = ""
    moment_exponent: Optional[float] = None
    variable: Optional[str] = None
    value: Optional[bool] = None


@dataclass(frozen=True)
class ProductLaw:
    case: Case
    pivot: Pivot
    rv_index: RvIndex
    scaling: str
    hypotheses: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "case": self.case.value,
            "pivot": self.pivot.value,
            "rv_index": self.rv_index.index,
            "tail_exponent": self.rv_index.tail_exponent,
            "xi": self.rv_index.xi,
            "scaling": self.scaling,
            "hypotheses": list(self.hypotheses),
        }


def _unsupported(reason: UnsupportedReason) -> CaseId:
    return CaseId(Case.UNSUPPORTED, reason)


def _is_zero(v: float, tol: float) -> bool:
    return abs(v) <= tol


def classify(p: ModelParams, zero_tol: float = 0.0) -> CaseId:
    """Assign the case for ``p``.  Endpoint signs are compared with ``zero_tol``."""
    p.validate()
    rho, gamma = p.rho, p.gamma
    if gamma == 0:
        return _unsupported(UnsupportedReason.GAMMA_ZERO)
    if rho == 0:
        return _unsupported(UnsupportedReason.RHO_ZERO)

    def sign(v):
        if _is_zero(v, zero_tol):
            return 0
        return 1 if v > 0 else -1

    if rho > 0 and gamma > 0:
        return CaseId(Case.I)

    if rho < 0 and gamma < 0:
        sx, sy = sign(p.beta_inf), sign(p.b_inf)
        if sx == 0 and sy == 0:
            return CaseId(Case.IIb)
        if sx == 0 and sy > 0:
            return CaseId(Case.IIc)
        if sx > 0 and sy == 0:
            return _unsupported(UnsupportedReason.MIXED_X_POSITIVE_Y_ZERO)
        if sx < 0 and sy > 0:
            return _unsupported(UnsupportedReason.MIXED_X_NEGATIVE_Y_POSITIVE)
        if (sx > 0 and sy > 0) or (sx < 0 and sy < 0):
            if gamma < rho or (gamma == rho and p.alpha_over_a_bounded):
                return CaseId(Case.IIa if sx > 0 else Case.IId)
            return _unsupported(UnsupportedReason.CASE2_RATIO_UNBOUNDED)
        return _unsupported(UnsupportedReason.CASE2_OTHER_ENDPOINTS)

    if rho > 0 and gamma < 0:
        if sign(p.b_inf) <= 0:
            return _unsupported(UnsupportedReason.CASE3_ENDPOINT)
        if not p.alpha_sim_recip_a or rho != -gamma:
            return _unsupported(UnsupportedReason.CASE3_SCALING)
        return CaseId(Case.III)

    # rho < 0 < gamma
    if sign(p.beta_inf) <= 0:
        return _unsupported(UnsupportedReason.CASE4_ENDPOINT)
    return CaseId(Case.IV)


_TAIL_CONDITION = Hypothesis(
    "tail condition: lim_eps limsup_t t P[|X|/alpha(t) > z/eps] = 0",
    "checkable",
    "implied by E|X|^(1/rho + delta) < inf",
)


def _moment(variable: str, exponent: float, note: str = "") -> Hypothesis:
    return Hypothesis(
        f"E[{variable}^({exponent:g} + delta)] < inf",
        "checkable",
        note,
        moment_exponent=float(exponent),
        variable=variable,
    )


def hypotheses_report(c: CaseId, p: ModelParams) -> list[Hypothesis]:
    """Enumerate the hypotheses of the theorem covering ``c``."""
    if not c.supported:
        return [Hypothesis("case supported", "declared", c.explanation(), value=False)]
    rho, gamma = p.rho, p.gamma
    tag = c.tag
    if tag is Case.I:
        return [
            Hypothesis("Y >= 0", "declared"),
            _TAIL_CONDITION,
            _moment("|X|", 1.0 / rho, "sufficient for the tail condition"),
        ]
    ratio = Hypothesis(
        "alpha~/a~ bounded", "declared", "needed when gamma = rho", value=p.alpha_over_a_bounded)
    order = Hypothesis("gamma < rho", "declared", value=gamma < rho)
    if tag is Case.IIa:
        return [
            Hypothesis("0 <= X, 0 <= Y", "declared"),
            _moment("X~", 1.0 / abs(rho), "sufficient, not necessary"),
            order,
            ratio,
        ]
    if tag is Case.IIb:
        return [
            Hypothesis("X <= 0, Y <= 0", "declared"),
            Hypothesis(
                "tail condition: lim_eps limsup_t t P[X~/alpha~(t) > z/eps] = 0",
                "checkable",
                moment_exponent=1.0 / abs(rho),
                variable="X~",
            ),
        ]
    if tag is Case.IIc:
        return [
            Hypothesis("Y >= 0", "declared"),
            _moment("X~", 1.0 / abs(rho)),
        ]
    if tag is Case.IId:
        return [
            _moment("X~", 1.0 / abs(rho)),
            order,
            ratio,
        ]
    if tag is Case.III:
        return [
            Hypothesis("X >= 0", "declared"),
            Hypothesis("b(inf) > 0", "declared", value=p.b_inf > 0),
            Hypothesis("alpha(t) ~ 1/a(t)", "declared", value=p.alpha_sim_recip_a),
            _moment("X", 1.0 / abs(gamma)),
        ]
    # Case IV
    return [
        Hypothesis("0 <= X <= beta(inf)", "declared", "the right end point of X is positive",
                   value=p.beta_inf > 0),
        Hypothesis("Y >= 0", "declared"),
    ]


def product_prediction(c: CaseId, p: ModelParams) -> ProductLaw:
    """Predicted regularly varying transform of ``XY`` for case ``c``."""
    if not c.supported:
        raise ValueError(f"no prediction for unsupported case: {c.explanation()}")
    rho, gamma = p.rho, p.gamma
    tag = c.tag
    if tag is Case.I:
        pivot, index, scaling = Pivot.XY, -1.0 / (gamma + rho), "alpha(t)*a(t)"
    elif tag is Case.IIa:
        pivot, index, scaling = Pivot.INV_SHIFT_MINUS_XY, -1.0 / abs(rho), "alpha~(t)"
    elif tag is Case.IIb:
        pivot, index, scaling = Pivot.INV_XY, -1.0 / (abs(gamma) + abs(rho)), "alpha~(t)*a~(t)"
    elif tag is Case.IIc:
        pivot, index, scaling = Pivot.NEG_INV_XY, -1.0 / abs(rho), "alpha~(t)"
    elif tag is Case.IId:
        pivot, index, scaling = Pivot.INV_XY_MINUS_SHIFT, -1.0 / abs(rho), "alpha~(t)"
    elif tag is Case.III:
        pivot, index, scaling = Pivot.XY, -1.0 / abs(gamma), "a~(t)"
    else:
        # the tail decays: index -1/gamma, matching the limit z^(-1/gamma) beta(inf)^(1/gamma)
        pivot, index, scaling = Pivot.XY, -1.0 / gamma, "a(t)"
    hyps = tuple(h.name for h in hypotheses_report(c, p))
    return ProductLaw(tag, pivot, RvIndex(index), scaling, hyps)
