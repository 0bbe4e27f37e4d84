"""Concrete, samplable CEVM instances covering every supported case.

Every model draws its *reduced* coordinates first (the zero-centered pair
the theorems scale) by inverse transform, then maps back to ``(X, Y)``
through the case's :class:`~cevm.transforms.CoordinateMap`.  Sampling is
block-deterministic (see :mod:`cevm.sampling`), so output depends only on
``(seed, n)`` and never on the worker count.

All slowly varying factors are identically one, which makes the scalings
pure powers and every limit measure available in closed form or by
one-dimensional quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .classifier import CaseId, ModelParams, ProductLaw, classify, product_prediction
from .dists import DistSpec
from .evt_core import ScalingFunction
from .limit_laws import SpectralMeasure, case4_limit, example7_limit
from .quadrature import integrate
from .sampling import block_uniforms, map_blocks
from .transforms import CoordinateMap, ReducedPair, coordinate_map, reduce_model

__all__ = [
    "Analytic",
    "CevmModel",
    "MomentDiagnosis",
    "beta_min_model",
    "mrv_power_model",
    "coupled_negative_model",
    "case3_model",
    "case4_model",
    "moment_diagnostic",
    "model_from_json",
    "catalog",
]

COUPLED_ENDPOINTS = {"IIa": (1.0, 1.0), "IIb": (0.0, 0.0), "IIc": (0.0, 1.0), "IId": (-1.0, -1.0)}


@dataclass(frozen=True)
class Analytic:
    """Closed-form facts about a model.

    ``joint_limit(x, y)`` is ``mu([0, x] x (y, inf])`` for the reduced pair
    divided by its scalings.  ``product_limit(z)`` is the limit of
    ``t P[pivot / scale(t) > z]``.  The moment fields describe the variable
    named in the case's moment hypothesis.
    """

    sf_x: Optional[Callable] = None
    sf_y: Optional[Callable] = None
    product_limit: Optional[Callable] = None
    joint_limit: Optional[Callable] = None
    spectral: Optional[SpectralMeasure] = None
    moment_variable: str = "X"
    moment_tail_exponent: Optional[float] = None
    moment_value: Optional[Callable] = None
    moment_tag: str = ""


@dataclass(frozen=True, eq=False)
class CevmModel:
    """A named CEVM instance.

    ``latent`` maps a ``(rows, n_uniforms)`` block of uniforms on ``(0, 1]``
    to the reduced pair ``(rx, ry)``.
    """

    name: str
    params: ModelParams
    family: dict
    n_uniforms: int
    latent: Callable
    scalings: dict
    analytic: Optional[Analytic] = None

    @cached_property
    def case(self) -> CaseId:
        return classify(self.params)

    @cached_property
    def coords(self) -> CoordinateMap:
        return coordinate_map(self.case.tag, self.params.beta_inf, self.params.b_inf)

    @cached_property
    def reduced(self) -> ReducedPair:
        return reduce_model(self)

    def product_law(self) -> ProductLaw:
        return product_prediction(self.case, self.params)

    def reduced_block(self, seed: int, block: int, rows: int):
        return self.latent(block_uniforms(seed, block, rows, self.n_uniforms))

    def block(self, seed: int, block: int, rows: int):
        """Original-coordinate block together with its reduced coordinates."""
        rx, ry = self.reduced_block(seed, block, rows)
        x, y = self.coords.inverse(rx, ry)
        return x, y, rx, ry

    def sample_reduced(self, seed: int, n: int, workers: int = 1):
        parts = map_blocks(lambda j, m: self.reduced_block(seed, j, m), n, workers)
        return _concat(parts, 2)

    def sample(self, seed: int, n: int, workers: int = 1):
        rx, ry = self.sample_reduced(seed, n, workers)
        return self.coords.inverse(rx, ry)

    def pairs(self, seed: int, n: int, workers: int = 1) -> np.ndarray:
        """Samples as an ``(n, 2)`` array."""
        x, y = self.sample(seed, n, workers)
        return np.column_stack([x, y])

    def to_json(self, seed: Optional[int] = None) -> dict:
        d = {"name": self.name, "params": self.params.to_json()}
        for key, val in self.family.items():
            d[key] = val.to_json() if isinstance(val, DistSpec) else val
        if seed is not None:
            d["seed"] = int(seed)
        return d


def _concat(parts, width):
    if not parts:
        return tuple(np.empty(0) for _ in range(width))
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(width))


def _mixture_integral(law: DistSpec, x: float, e: float, w_max: float) -> float:
    """``int_0^w_max F(x w^e) dw`` for the cdf ``F`` of a law on ``[0, inf)``."""
    if x <= 0 or w_max <= 0:
        return 0.0
    if law.kind in ("point", "discrete"):
        atoms = [(law.params[0], 1.0)] if law.kind == "point" else zip(*law.params)
        total = 0.0
        for v, p in atoms:
            if v <= 0:
                total += p * w_max
                continue
            r = (v / x) ** (1.0 / e)
            total += p * (max(0.0, w_max - r) if e > 0 else min(w_max, r))
        return total
    lo, hi = law.params
    cuts = {0.0, w_max}
    for v in (lo, hi):
        if v > 0:
            r = (v / x) ** (1.0 / e)
            if 0 < r < w_max:
                cuts.add(r)
    cuts = sorted(cuts)

    def g(w):
        return law.cdf(x * w ** e)

    return math.fsum(integrate(g, a, b, abs_tol=1e-12)[0] for a, b in zip(cuts[:-1], cuts[1:]))


def _check_positive(name, v):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ValueError(f"{name} must be a positive real")


# ------------------------------------------------------------------ factories


def beta_min_model(a: float, b: float) -> CevmModel:
    """``X ~ Beta(1, a)``, ``Y = min(X, Z)`` with ``P[Z > 1 - 1/x] = x^-b``.

    Reduced coordinates are ``X~ = U1^(-1/a)`` and ``Y~ = min(X~, U2^(-1/b))``.
    """
    _check_positive("a", a)
    _check_positive("b", b)
    a, b = float(a), float(b)
    s = a + b
    rho = -1.0 / s

    def latent(u):
        xt = u[:, 0] ** (-1.0 / a)
        zt = u[:, 1] ** (-1.0 / b)
        return xt, np.minimum(xt, zt)

    def joint(x, y):
        if x <= y or y <= 0:
            return 0.0
        return (y ** -a - x ** -a) * y ** -b

    analytic = Analytic(
        sf_x=lambda x: np.clip(1.0 - np.asarray(x, dtype=float), 0.0, 1.0) ** a,
        sf_y=lambda y: np.clip(1.0 - np.asarray(y, dtype=float), 0.0, 1.0) ** s,
        product_limit=lambda z: example7_limit(z, a, b),
        joint_limit=joint,
        moment_variable="X~",
        moment_tail_exponent=a,
        moment_value=lambda p: a / (a - p),
        moment_tag="X~ is Pareto(a): E[X~^p] = a/(a-p) for p < a",
    )
    params = ModelParams(rho, rho, 1.0, 1.0, psi2_zero=True, alpha_over_a_bounded=True)
    scalings = {
        "alpha": ScalingFunction.power(1.0, rho),
        "beta": ScalingFunction.power(1.0, 0.0, 1.0),
        "a": ScalingFunction.power(1.0, rho),
        "b": ScalingFunction.from_callable(lambda t: 1.0 - t ** rho, rho, 1.0),
    }
    return CevmModel("beta_min", params, {"a": a, "b": b}, 2, latent, scalings, analytic)


def _spectral_atoms(w: DistSpec, bins: int = 2048) -> SpectralMeasure:
    if w.kind == "point":
        return SpectralMeasure.from_atoms([(w.params[0], 1.0)])
    if w.kind == "discrete":
        return SpectralMeasure.from_atoms(zip(*w.params))
    lo, hi = w.params
    mids = lo + (hi - lo) * (np.arange(bins) + 0.5) / bins
    return SpectralMeasure.from_atoms((float(m), 1.0 / bins) for m in mids)


def mrv_power_model(rho: float, gamma: float, w) -> CevmModel:
    """``(X, Y) = ((R W)^rho, (R (1 - W))^gamma)`` with ``R`` standard Pareto.

    ``(RW, R(1-W))`` is standard multivariate regularly varying with spectral
    measure equal to the law of ``W``.
    """
    _check_positive("rho", rho)
    _check_positive("gamma", gamma)
    rho, gamma = float(rho), float(gamma)
    w = w if isinstance(w, DistSpec) else DistSpec.from_json(w)
    lo, hi = w.support
    if lo < 0 or hi > 1 or (w.kind != "uniform" and hi >= 1):
        raise ValueError("w must be supported in [0, 1)")
    s = rho + gamma

    def latent(u):
        r = 1.0 / u[:, 0]
        wv = w.ppf(u[:, 1])
        return (r * wv) ** rho, (r * (1.0 - wv)) ** gamma

    def sf_x(x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        pos = x > 0
        out[pos] = [w.expect(lambda v, q=q: np.minimum(1.0, v * q ** (-1.0 / rho))) for q in x[pos]]
        return out

    def sf_y(y):
        y = np.asarray(y, dtype=float)
        out = np.ones_like(y)
        pos = y > 0
        out[pos] = [w.expect(lambda v, q=q: np.minimum(1.0, (1.0 - v) * q ** (-1.0 / gamma))) for q in y[pos]]
        return out

    def joint(x, y):
        if y <= 0:
            raise ValueError("joint limit needs y > 0")
        yp = y ** (1.0 / gamma)
        if x <= 0:
            return 0.0
        xp = math.inf if math.isinf(x) else x ** (1.0 / rho)
        return w.expect(lambda v: np.maximum((1.0 - v) / yp - v / xp, 0.0))

    spectral_integral = w.expect(lambda v: v ** (rho / s) * (1.0 - v) ** (gamma / s))

    def product_limit(z):
        if not z > 0:
            raise ValueError("z must be positive")
        return z ** (-1.0 / s) * spectral_integral

    analytic = Analytic(
        sf_x=sf_x,
        sf_y=sf_y,
        product_limit=product_limit,
        joint_limit=joint,
        spectral=_spectral_atoms(w),
        moment_variable="X",
        moment_tail_exponent=1.0 / rho,
        moment_value=lambda p: w.moment(p * rho) / (1.0 - p * rho),
        moment_tag="X = (RW)^rho with Pareto R: E[X^p] = E[W^(p rho)]/(1 - p rho)",
    )
    params = ModelParams(rho, gamma)
    scalings = {
        "alpha": ScalingFunction.power(1.0, rho),
        "beta": ScalingFunction.power(0.0, 0.0, 0.0),
        "a": ScalingFunction.power(1.0, gamma),
        "b": ScalingFunction.power(0.0, 0.0, 0.0),
    }
    family = {"rho": rho, "gamma": gamma, "w": w}
    return CevmModel("mrv_power", params, family, 2, latent, scalings, analytic)


def coupled_negative_model(rho: float, gamma: float, variant: str, u, y_tilde_floor: float = 1.0) -> CevmModel:
    """Case II family: ``X~ = Y~^(|rho|/|gamma|) U`` with Pareto ``Y~``.

    ``P[Y~ > y] = (y / f)^(1/gamma)`` for ``y >= f`` where ``f`` is
    ``y_tilde_floor``.  A floor above one keeps ``Y`` away from the origin,
    which matters for the ``-1/(XY)`` pivot of variant IIc.
    """
    if not (rho < 0 and gamma < 0):
        raise ValueError("coupled model needs rho < 0 and gamma < 0")
    if abs(rho) > abs(gamma):
        raise ValueError("unsupported coupling: needs |rho| <= |gamma|")
    if variant not in COUPLED_ENDPOINTS:
        raise ValueError(f"unknown variant {variant!r}")
    u = u if isinstance(u, DistSpec) else DistSpec.from_json(u)
    ulo, uhi = u.support
    if ulo < 1 or uhi > 2:
        raise ValueError("u must be supported in [1, 2]")
    if not y_tilde_floor >= 1:
        raise ValueError("y_tilde_floor must be >= 1")
    rho, gamma, f = float(rho), float(gamma), float(y_tilde_floor)
    c = abs(rho) / abs(gamma)
    beta_inf, b_inf = COUPLED_ENDPOINTS[variant]

    def latent(uu):
        yt = f * uu[:, 0] ** gamma
        return yt ** c * u.ppf(uu[:, 1]), yt

    def sf_yt(s):
        return np.minimum(1.0, (np.maximum(s, f) / f) ** (1.0 / gamma))

    def sf_y(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        inside = y < b_inf
        out[inside] = sf_yt(1.0 / (b_inf - y[inside]))
        return out

    def sf_x(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        inside = x < beta_inf
        out[inside] = [u.expect(lambda v, s=s: sf_yt((s / v) ** (1.0 / c)))
                       for s in 1.0 / (beta_inf - x[inside])]
        return out

    def joint(x, y):
        if y <= 0:
            raise ValueError("joint limit needs y > 0")
        return _mixture_integral(u, x, abs(rho), y ** (1.0 / gamma))

    analytic = Analytic(
        sf_x=sf_x,
        sf_y=sf_y,
        joint_limit=joint,
        moment_variable="X~",
        moment_tail_exponent=1.0 / abs(rho),
        moment_value=lambda p: f ** (p * c) / (1.0 - p * abs(rho)) * u.moment(p),
        moment_tag="X~ = Y~^c U with Pareto Y~: E[X~^p] = f^(pc) E[U^p]/(1 - p|rho|)",
    )
    params = ModelParams(rho, gamma, beta_inf, b_inf, psi2_zero=True, alpha_over_a_bounded=True)
    scalings = {
        "alpha": ScalingFunction.power(f ** -c, rho),
        "beta": ScalingFunction.power(beta_inf, 0.0, beta_inf),
        "a": ScalingFunction.power(1.0 / f, gamma),
        "b": ScalingFunction.from_callable(lambda t: b_inf - t ** gamma / f, gamma, b_inf),
    }
    family = {"rho": rho, "gamma": gamma, "variant": variant, "u": u, "y_tilde_floor": f,
              "coupling_exponent": c}
    return CevmModel("coupled_negative", params, family, 2, latent, scalings, analytic)


def case3_model(gamma: float, v, b_inf: float) -> CevmModel:
    """``X = Y~ V`` and ``Y = b_inf - 1/Y~`` with ``Y~`` Pareto of index ``1/|gamma|``."""
    if not gamma < 0:
        raise ValueError("case3 model needs gamma < 0")
    _check_positive("b_inf", b_inf)
    v = v if isinstance(v, DistSpec) else DistSpec.from_json(v)
    if v.support[0] <= 0:
        raise ValueError("v must be supported on positive reals")
    gamma, b_inf = float(gamma), float(b_inf)
    g = abs(gamma)

    def latent(u):
        yt = u[:, 0] ** gamma
        return yt * v.ppf(u[:, 1]), yt

    def sf_x(x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        pos = x > 0
        out[pos] = [v.expect(lambda vv, q=q: np.minimum(1.0, (q / vv) ** (1.0 / gamma))) for q in x[pos]]
        return out

    def sf_y(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        inside = y < b_inf
        out[inside] = np.minimum(1.0, (1.0 / (b_inf - y[inside])) ** (1.0 / gamma))
        return out

    def joint(x, y):
        if y <= 0:
            raise ValueError("joint limit needs y > 0")
        return _mixture_integral(v, x, g, y ** (1.0 / gamma))

    # XY = V (b_inf Y~ - 1), so t P[XY > t^|gamma| z] -> E[(b_inf V)^(1/|gamma|)] z^(-1/|gamma|)
    const = v.moment(1.0 / g) * b_inf ** (1.0 / g)

    def product_limit(z):
        if not z > 0:
            raise ValueError("z must be positive")
        return const * z ** (-1.0 / g)

    analytic = Analytic(
        sf_x=sf_x,
        sf_y=sf_y,
        product_limit=product_limit,
        joint_limit=joint,
        moment_variable="X",
        moment_tail_exponent=1.0 / g,
        moment_value=lambda p: v.moment(p) / (1.0 - p * g),
        moment_tag="X = Y~ V with Pareto Y~: E[X^p] = E[V^p]/(1 - p|gamma|)",
    )
    params = ModelParams(g, gamma, None, b_inf, alpha_sim_recip_a=True)
    scalings = {
        "alpha": ScalingFunction.power(1.0, g),
        "beta": ScalingFunction.power(0.0, 0.0, 0.0),
        "a": ScalingFunction.power(1.0, gamma),
        "b": ScalingFunction.from_callable(lambda t: b_inf - t ** gamma, gamma, b_inf),
    }
    family = {"gamma": gamma, "v": v, "b_inf": b_inf}
    return CevmModel("case3", params, family, 2, latent, scalings, analytic)


def case4_model(rho: float, gamma: float, beta_inf: float) -> CevmModel:
    """``X = beta_inf - Y^(rho/gamma) U`` with ``U ~ Uniform(0, beta_inf)``."""
    if not (rho < 0 < gamma):
        raise ValueError("case4 model needs rho < 0 < gamma")
    _check_positive("beta_inf", beta_inf)
    rho, gamma, beta_inf = float(rho), float(gamma), float(beta_inf)
    law_u = DistSpec.uniform(0.0, beta_inf)

    def latent(u):
        y = u[:, 0] ** (-gamma)
        return y ** (rho / gamma) * (beta_inf * u[:, 1]), y

    def sf_x(x):
        # P[X > x] = int_0^1 min(1, q w^rho) dw with q = (beta_inf - x)/beta_inf
        x = np.asarray(x, dtype=float)
        q = np.clip((beta_inf - x) / beta_inf, 0.0, 1.0)
        w0 = q ** (1.0 / abs(rho))
        with np.errstate(divide="ignore", invalid="ignore"):
            if rho == -1.0:
                tail = np.where(q > 0, -q * np.log(w0), 0.0)
            else:
                tail = q * (1.0 - w0 ** (rho + 1.0)) / (rho + 1.0)
        return w0 + tail

    def sf_y(y):
        y = np.asarray(y, dtype=float)
        return np.minimum(1.0, np.maximum(y, 1.0) ** (-1.0 / gamma))

    def joint(x, y):
        if y <= 0:
            raise ValueError("joint limit needs y > 0")
        return _mixture_integral(law_u, x, rho, y ** (-1.0 / gamma))

    analytic = Analytic(
        sf_x=sf_x,
        sf_y=sf_y,
        product_limit=lambda z: case4_limit(z, beta_inf, gamma),
        joint_limit=joint,
        moment_variable="X",
        moment_tail_exponent=math.inf,
        moment_tag="X is bounded by beta(inf)",
    )
    params = ModelParams(rho, gamma, beta_inf, None)
    scalings = {
        "alpha": ScalingFunction.power(1.0, rho),
        "beta": ScalingFunction.power(beta_inf, 0.0, beta_inf),
        "a": ScalingFunction.power(1.0, gamma),
        "b": ScalingFunction.power(1.0, gamma),
    }
    family = {"rho": rho, "gamma": gamma, "beta_inf": beta_inf}
    return CevmModel("case4", params, family, 2, latent, scalings, analytic)


# --------------------------------------------------------------- moments


@dataclass(frozen=True)
class MomentDiagnosis:
    """Whether ``E[V^p]`` is finite for the case's moment variable ``V``.

    ``verdict`` is ``finite-analytic``, ``infinite-analytic`` or ``empirical``.
    """

    exponent: float
    verdict: str
    variable: str
    tail_exponent: Optional[float] = None
    value: Optional[float] = None
    justification: str = ""
    slope: Optional[float] = None
    ci: Optional[tuple] = None

    @property
    def finite(self) -> Optional[bool]:
        if self.verdict == "finite-analytic":
            return True
        if self.verdict == "infinite-analytic":
            return False
        return None


def moment_diagnostic(model: CevmModel, p: float, seed: int = 0, n: int = 100_000) -> MomentDiagnosis:
    """Analytic verdict when the tail is closed-form, else an empirical slope."""
    if not p > 0:
        raise ValueError("p must be positive")
    an = model.analytic
    if an is not None and an.moment_tail_exponent is not None:
        finite = p < an.moment_tail_exponent
        value = an.moment_value(p) if finite and an.moment_value is not None else None
        return MomentDiagnosis(
            exponent=float(p),
            verdict="finite-analytic" if finite else "infinite-analytic",
            variable=an.moment_variable,
            tail_exponent=an.moment_tail_exponent,
            value=None if value is None else float(value),
            justification=an.moment_tag,
        )
    from .estimators import hill

    rx, _ = model.sample_reduced(seed, n)
    vals = np.abs(rx[np.isfinite(rx)])
    est = hill(vals[vals > 0], int(math.ceil(math.sqrt(vals.size))))
    slope = 1.0 / est.xi_hat
    ci = (1.0 / est.ci_high, 1.0 / est.ci_low) if est.ci_low > 0 else (1.0 / est.ci_high, math.inf)
    return MomentDiagnosis(
        exponent=float(p),
        verdict="empirical",
        variable=an.moment_variable if an else "X",
        tail_exponent=slope,
        justification="Hill estimate of the tail exponent",
        slope=slope,
        ci=ci,
    )


# ------------------------------------------------------------------ JSON


_FACTORIES = {
    "beta_min": (beta_min_model, ("a", "b")),
    "mrv_power": (mrv_power_model, ("rho", "gamma", "w")),
    "coupled_negative": (coupled_negative_model, ("rho", "gamma", "variant", "u", "y_tilde_floor")),
    "case3": (case3_model, ("gamma", "v", "b_inf")),
    "case4": (case4_model, ("rho", "gamma", "beta_inf")),
}
_INFORMATIONAL = {"name", "params", "seed", "coupling_exponent"}


def model_from_json(d: dict) -> CevmModel:
    """Build a model from its JSON spec.

    Declared ``params``, when present, must agree with the family's derived
    parameters.
    """
    if not isinstance(d, dict) or "name" not in d:
        raise ValueError("model spec must be an object with a 'name'")
    try:
        factory, keys = _FACTORIES[d["name"]]
    except KeyError:
        raise ValueError(f"unknown model {d['name']!r}") from None
    unknown = set(d) - set(keys) - _INFORMATIONAL
    if unknown:
        raise ValueError(f"unknown model fields {sorted(unknown)}")
    kwargs = {k: d[k] for k in keys if k in d}
    try:
        model = factory(**kwargs)
    except TypeError as exc:
        raise ValueError(f"bad model spec: {exc}") from None
    if "params" in d:
        declared = ModelParams.from_json(d["params"])
        if declared != model.params:
            raise ValueError("declared params disagree with the model family")
    return model


def catalog() -> list[CevmModel]:
    """One representative model per supported case (plus the Beta-min example)."""
    return [
        beta_min_model(1.0, 1.0),
        mrv_power_model(1.0, 1.0, DistSpec.point(0.5)),
        mrv_power_model(2.0, 1.0, DistSpec.uniform(0.2, 0.8)),
        coupled_negative_model(-1.0, -1.0, "IIa", DistSpec.uniform(1.0, 2.0)),
        coupled_negative_model(-1.0, -2.0, "IIb", DistSpec.uniform(1.0, 2.0)),
        coupled_negative_model(-0.5, -1.0, "IIc", DistSpec.uniform(1.0, 2.0), y_tilde_floor=2.0),
        coupled_negative_model(-1.0, -1.0, "IId", DistSpec.uniform(1.0, 2.0)),
        case3_model(-0.5, DistSpec.uniform(1.0, 2.0), 1.0),
        case4_model(-1.0, 1.0, 1.0),
    ]
