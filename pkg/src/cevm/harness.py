"""Config-driven verification runs.

A run classifies the configured zoo model, streams ``n`` samples through the
counting kernels in fixed blocks, and turns the integer counts into
estimates compared against the model's predictions.  Per-block results are
reduced in block order, so the CSV is byte-identical for any worker count.

CSV columns (fixed)::

    model, case, quantity, t_or_k, z, estimate, se, ci_low, ci_high,
    predicted, tolerance, verdict

``verdict`` is ``pass``, ``fail``, ``info`` or ``skipped: <reason>``.  Only
``pass``/``fail`` rows are mandatory; a report passes iff it has no ``fail``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import _kernels
from .classifier import Case, hypotheses_report
from .estimators import (
    TopK,
    default_k,
    hill_from_top,
    index_regression_from_top,
    scaled_tail_from_count,
    sweep_ks,
)
from .model_zoo import CevmModel, model_from_json, moment_diagnostic
from .sampling import BLOCK_SIZE, map_blocks
from .transforms import pivot_array, pivot_scaling

__all__ = [
    "CSV_COLUMNS",
    "ConfigError",
    "KPolicy",
    "Tolerances",
    "ExperimentConfig",
    "Row",
    "VerificationReport",
    "run",
    "write_outputs",
    "verify_suite",
    "aggregate",
]

CSV_COLUMNS = ("model", "case", "quantity", "t_or_k", "z", "estimate", "se", "ci_low", "ci_high",
               "predicted", "tolerance", "verdict")
MOMENT_DELTA = 0.01
CHECKS = ("hypotheses", "index", "scaled_tail", "joint")
Z_95 = 1.959963984540054


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


def _req(d: dict, key: str):
    if key not in d:
        raise ConfigError(f"missing config field {key!r}")
    return d[key]


def _positive_list(d: dict, key: str) -> tuple:
    vals = d.get(key)
    if not isinstance(vals, list) or not vals:
        raise ConfigError(f"{key} must be a nonempty list")
    out = []
    for v in vals:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not (v > 0 and math.isfinite(v)):
            raise ConfigError(f"{key} entries must be positive reals")
        out.append(float(v))
    return tuple(out)


def _pos_int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
        raise ConfigError(f"{what} must be a positive integer")
    return v


@dataclass(frozen=True)
class KPolicy:
    """Hill ``k`` rule: ``sqrt`` (``ceil(sqrt n)``) or ``fixed``."""

    rule: str = "sqrt"
    k: Optional[int] = None

    def resolve(self, n: int) -> int:
        return default_k(n) if self.rule == "sqrt" else int(self.k)

    def describe(self) -> str:
        return "k=ceil(sqrt(n))" if self.rule == "sqrt" else f"k={self.k}"

    @classmethod
    def from_json(cls, v) -> "KPolicy":
        if v is None or v == "sqrt":
            return cls()
        if isinstance(v, int) and not isinstance(v, bool):
            return cls("fixed", _pos_int(v, "k_policy"))
        if isinstance(v, dict):
            rule = v.get("rule", "fixed" if "k" in v else "sqrt")
            if rule == "sqrt":
                return cls()
            if rule == "fixed":
                return cls("fixed", _pos_int(v.get("k"), "k_policy.k"))
        raise ConfigError(f"bad k_policy {v!r}")


@dataclass(frozen=True)
class Tolerances:
    """``index_abs`` bounds ``|xi_hat - xi|``; ``index_rel`` bounds the exponent relatively."""

    index_abs: Optional[float] = None
    index_rel: Optional[float] = None
    constant_rel: float = 0.1
    joint_se: float = 3.0

    @classmethod
    def from_json(cls, d) -> "Tolerances":
        if not isinstance(d, dict):
            raise ConfigError("tolerances must be an object")
        unknown = set(d) - {"index_abs", "index_rel", "constant_rel", "joint_se"}
        if unknown:
            raise ConfigError(f"unknown tolerance fields {sorted(unknown)}")
        vals = {}
        for key in ("index_abs", "index_rel", "constant_rel", "joint_se"):
            if key in d:
                v = d[key]
                if isinstance(v, bool) or not isinstance(v, (int, float)) or not v >= 0:
                    raise ConfigError(f"tolerance {key} must be a nonnegative real")
                vals[key] = float(v)
        if "index_abs" not in vals and "index_rel" not in vals:
            raise ConfigError("tolerances need index_abs or index_rel")
        return cls(**vals)

    def describe_index(self) -> str:
        parts = []
        if self.index_abs is not None:
            parts.append(f"|xi-xi0|<={self.index_abs!r}")
        if self.index_rel is not None:
            parts.append(f"|e-e0|<={self.index_rel!r}*e0")
        return "; ".join(parts)

    def index_ok(self, xi_hat: float, xi: float) -> bool:
        ok = True
        if self.index_abs is not None:
            ok &= abs(xi_hat - xi) <= self.index_abs
        if self.index_rel is not None:
            e, e0 = 1.0 / xi_hat, 1.0 / xi
            ok &= abs(e - e0) <= self.index_rel * e0
        return bool(ok)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    model_spec: dict
    n: int
    seed: int
    t_grid: tuple
    z_grid: tuple
    k_policy: KPolicy
    tolerances: Tolerances
    hill_n: int
    expect_case: Optional[str] = None
    joint_grid: tuple = ()
    asy_indep: Optional[dict] = None
    degeneracy: Optional[dict] = None
    checks: tuple = CHECKS

    _KEYS = {"name", "model", "n", "seed", "t_grid", "z_grid", "y_grid", "k_policy", "tolerances",
             "hill_n", "expect_case", "joint_grid", "asy_indep", "degeneracy", "checks", "description"}

    @classmethod
    def from_json(cls, d: Any, default_name: str = "experiment") -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - cls._KEYS
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        model_spec = _req(d, "model")
        try:
            model_from_json(model_spec)
        except ValueError as exc:
            raise ConfigError(f"bad model spec: {exc}") from None
        n = _pos_int(_req(d, "n"), "n")
        seed = _req(d, "seed")
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        t_grid = _positive_list(d, "t_grid")
        if "z_grid" in d and "y_grid" in d:
            raise ConfigError("give z_grid or y_grid, not both")
        z_grid = _positive_list(d, "y_grid" if "y_grid" in d else "z_grid")
        if n < 10 * max(t_grid):
            raise ConfigError("n must be at least 10 * max(t_grid)")
        hill_n = _pos_int(d.get("hill_n", n), "hill_n")
        if hill_n > n:
            raise ConfigError("hill_n must not exceed n")
        k_policy = KPolicy.from_json(d.get("k_policy"))
        if not 1 <= k_policy.resolve(hill_n) < hill_n:
            raise ConfigError("Hill k out of range for hill_n")
        joint = d.get("joint_grid", [])
        if not isinstance(joint, list) or any(
                not (isinstance(p, list) and len(p) == 2 and all(isinstance(v, (int, float)) and v > 0 for v in p))
                for p in joint):
            raise ConfigError("joint_grid must be a list of positive [x, y] pairs")
        asy = d.get("asy_indep")
        if asy is not None:
            _check_section(asy, "asy_indep", {"A_kappa", "x", "y", "t_grid", "min_decay"})
            ts = _positive_list(asy, "t_grid")
            if len(ts) < 2 or n < 10 * max(ts):
                raise ConfigError("asy_indep.t_grid needs two levels with n >= 10 t")
        deg = d.get("degeneracy")
        if deg is not None:
            _check_section(deg, "degeneracy", {"A_kappa", "y", "t", "x_grid", "max_spread", "min_spread_correct"})
            _positive_list(deg, "x_grid")
        checks = d.get("checks", list(CHECKS))
        if not isinstance(checks, list) or not set(checks) <= set(CHECKS):
            raise ConfigError(f"checks must be a list drawn from {list(CHECKS)}")
        expect = d.get("expect_case")
        if expect is not None and expect not in {c.value for c in Case}:
            raise ConfigError(f"unknown expect_case {expect!r}")
        return cls(
            name=str(d.get("name", default_name)),
            model_spec=model_spec,
            n=n,
            seed=seed,
            t_grid=t_grid,
            z_grid=z_grid,
            k_policy=k_policy,
            tolerances=Tolerances.from_json(_req(d, "tolerances")),
            hill_n=hill_n,
            expect_case=expect,
            joint_grid=tuple((float(a), float(b)) for a, b in joint),
            asy_indep=asy,
            degeneracy=deg,
            checks=tuple(c for c in CHECKS if c in checks),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_json(d, default_name=path.stem)

    @cached_property
    def model(self) -> CevmModel:
        return model_from_json(self.model_spec)


def _check_section(sec, name: str, keys: set):
    if not isinstance(sec, dict):
        raise ConfigError(f"{name} must be an object")
    missing = keys - set(sec)
    if missing:
        raise ConfigError(f"{name} missing fields {sorted(missing)}")
    extra = set(sec) - keys
    if extra:
        raise ConfigError(f"{name} has unknown fields {sorted(extra)}")


@dataclass(frozen=True)
class Row:
    model: str
    case: str
    quantity: str
    t_or_k: Any = None
    z: Any = None
    estimate: Any = None
    se: Any = None
    ci_low: Any = None
    ci_high: Any = None
    predicted: Any = None
    tolerance: Any = None
    verdict: str = "info"

    def cells(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


@dataclass
class VerificationReport:
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    series: list = field(default_factory=list)  # (series, x, y)

    @property
    def passed(self) -> bool:
        return not any(r.verdict == "fail" for r in self.rows)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def series_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("series", "x", "y"))
        for name, x, y in self.series:
            w.writerow((name, _fmt(x), _fmt(y)))
        return buf.getvalue()

    def markdown(self) -> str:
        cfg = self.config
        lines = [
            f"# Verification report: {cfg.name}",
            "",
            f"- model: `{json.dumps(cfg.model_spec, sort_keys=True)}`",
            f"- n = {cfg.n}, seed = {cfg.seed}, Hill on first {cfg.hill_n} samples ({cfg.k_policy.describe()})",
            f"- overall verdict: **{'PASS' if self.passed else 'FAIL'}**",
            "",
            "| check | t or k | z | estimate | band | predicted | verdict |",
            "|---|---|---|---|---|---|---|",
        ]
        for r in self.rows:
            band = ""
            if r.ci_low is not None and r.ci_high is not None:
                band = f"[{_short(r.ci_low)}, {_short(r.ci_high)}]"
            lines.append(f"| {r.quantity} | {_short(r.t_or_k)} | {_short(r.z)} | {_short(r.estimate)} | "
                         f"{band} | {_short(r.predicted)} | {r.verdict} |")
        return "\n".join(lines) + "\n"


def _short(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return _fmt(v)


# ------------------------------------------------------------------ counting


@dataclass
class _Plan:
    pivot_thresholds: np.ndarray
    reduced_rects: np.ndarray
    original_rects: np.ndarray
    top_capacity: int
    hill_n: int


def _count_blocks(model: CevmModel, seed: int, n: int, plan: _Plan, workers: int):
    case = model.case.tag
    p = model.params
    kern = _kernels.ACTIVE

    def work(j: int, m: int):
        x, y, rx, ry = model.block(seed, j, m)
        piv = pivot_array(case, x, y, p.beta_inf, p.b_inf, kern)
        c_piv = kern.count_exceed(piv, plan.pivot_thresholds)
        c_red = kern.count_rects(rx, ry, plan.reduced_rects)
        c_org = kern.count_rects(x, y, plan.original_rects)
        lim = max(0, min(m, plan.hill_n - j * BLOCK_SIZE))
        head = piv[:lim]
        head = head[np.isfinite(head)]
        cap = min(plan.top_capacity, head.size)
        top = np.partition(head, head.size - cap)[head.size - cap:] if cap else head[:0]
        return c_piv, c_red, c_org, top, lim

    parts = map_blocks(work, n, workers)
    c_piv = np.sum([q[0] for q in parts], axis=0, dtype=np.int64)
    c_red = np.sum([q[1] for q in parts], axis=0, dtype=np.int64)
    c_org = np.sum([q[2] for q in parts], axis=0, dtype=np.int64)
    top = TopK(plan.top_capacity)
    for q in parts:
        top.update(q[3])
    return c_piv, c_red, c_org, top.descending()


def _power(kappa: float):
    return lambda t: float(t) ** kappa


# ------------------------------------------------------------------ run


def run(cfg: ExperimentConfig, workers: int = 1) -> VerificationReport:
    """Execute one experiment; deterministic given ``cfg``."""
    model = cfg.model
    cid = model.case
    report = VerificationReport(cfg)
    rows = report.rows
    mname = model.name
    tag = cid.tag.value

    def add(quantity, **kw):
        rows.append(Row(mname, tag, quantity, **kw))

    if cfg.expect_case is not None:
        add("case", estimate=tag, predicted=cfg.expect_case,
            verdict="pass" if tag == cfg.expect_case else "fail")
    else:
        add("case", estimate=tag)
    if not cid.supported:
        add("product_index", verdict=f"skipped: {cid.explanation()}")
        return report

    law = model.product_law()
    xi0 = law.rv_index.xi
    e0 = law.rv_index.tail_exponent
    add("pivot", estimate=law.pivot.value, predicted=law.rv_index.index, tolerance="rv index of the pivot tail")

    for h in hypotheses_report(cid, model.params):
        if "hypotheses" not in cfg.checks:
            add(f"hypothesis: {h.name}", verdict="skipped: disabled in config")
        elif h.moment_exponent is not None:
            diag = moment_diagnostic(model, h.moment_exponent + MOMENT_DELTA, seed=cfg.seed)
            est = diag.verdict
            add(f"hypothesis: {h.name}", estimate=est, predicted=diag.value,
                tolerance=f"p={h.moment_exponent + MOMENT_DELTA!r}; {diag.justification}")
        else:
            add(f"hypothesis: {h.name}", estimate=h.value if h.value is not None else h.status,
                tolerance=h.detail or None)

    # ---- plan the single streaming pass
    reduced = model.reduced
    scale = pivot_scaling(cid.tag, reduced)
    an = model.analytic
    tz = [(t, z) for t in cfg.t_grid for z in cfg.z_grid]
    piv_thr = np.array([scale(t) * z for t, z in tz], dtype=float)

    red_rects = []
    joint_keys = []
    if cfg.joint_grid:
        for t in cfg.t_grid:
            s1, s2 = reduced.alpha_tilde(t), reduced.a_tilde(t)
            for x, y in cfg.joint_grid:
                red_rects.append((-math.inf, x * s1, y * s2, math.inf))
                joint_keys.append((t, x, y))

    org_rects = []
    asy_keys = []
    if cfg.asy_indep:
        a = cfg.asy_indep
        A = _power(float(a["A_kappa"]))
        for t in a["t_grid"]:
            org_rects.append((A(t) * a["x"], math.inf, model.scalings["a"](t) * a["y"], math.inf))
            asy_keys.append(float(t))
    deg_slots = {}
    if cfg.degeneracy:
        d = cfg.degeneracy
        t = float(d["t"])
        thr = model.scalings["a"](t) * d["y"]
        for label, A in (("wrong", _power(float(d["A_kappa"]))), ("correct", model.scalings["alpha"])):
            start = len(org_rects)
            org_rects.append((-math.inf, math.inf, thr, math.inf))
            for g in d["x_grid"]:
                org_rects.append((-math.inf, A(t) * g, thr, math.inf))
            deg_slots[label] = start

    k_main = cfg.k_policy.resolve(cfg.hill_n)
    ks = sorted(set(sweep_ks(cfg.hill_n)))
    capacity = max(max(ks), 10 * k_main) + 1
    plan = _Plan(piv_thr, np.array(red_rects, dtype=float).reshape(-1, 4),
                 np.array(org_rects, dtype=float).reshape(-1, 4), capacity, cfg.hill_n)
    c_piv, c_red, c_org, top = _count_blocks(model, cfg.seed, cfg.n, plan, workers)

    # ---- tail index
    tol = cfg.tolerances
    if "index" not in cfg.checks:
        add("hill_xi", t_or_k=k_main, predicted=xi0, verdict="skipped: disabled in config")
    est = hill_from_top(top, k_main, cfg.hill_n)
    if "index" in cfg.checks:
        add("hill_xi", t_or_k=k_main, estimate=est.xi_hat, se=est.xi_hat / math.sqrt(k_main),
            ci_low=est.ci_low, ci_high=est.ci_high, predicted=xi0, tolerance=tol.describe_index(),
            verdict="pass" if tol.index_ok(est.xi_hat, xi0) else "fail")
    for k in ks:
        e = hill_from_top(top, k, cfg.hill_n)
        add("hill_xi_sweep", t_or_k=k, estimate=e.xi_hat, se=e.xi_hat / math.sqrt(k),
            ci_low=e.ci_low, ci_high=e.ci_high, predicted=xi0)
    try:
        fit = index_regression_from_top(top, cfg.hill_n, k_main)
        add("regression_exponent", t_or_k=k_main, estimate=fit.tail_exponent, se=fit.se,
            ci_low=fit.tail_exponent - Z_95 * fit.se, ci_high=fit.tail_exponent + Z_95 * fit.se,
            predicted=e0, tolerance="cross-check of Hill")
    except ValueError as exc:
        add("regression_exponent", t_or_k=k_main, verdict=f"skipped: {exc}")

    # ---- scaled tail of the pivot
    limit = an.product_limit if an is not None else None
    for (t, z), cnt in zip(tz, c_piv):
        st = scaled_tail_from_count(t, int(cnt), cfg.n)
        common = dict(t_or_k=t, z=z, estimate=st.value, se=st.se,
                      ci_low=st.value - Z_95 * st.se, ci_high=st.value + Z_95 * st.se)
        report.series.append((f"scaled_tail t={t!r}", z, st.value))
        if "scaled_tail" not in cfg.checks:
            add("scaled_tail", **common, verdict="skipped: disabled in config")
            continue
        if limit is None:
            add("scaled_tail", **common, verdict="skipped: no closed-form product limit")
            continue
        pred = float(limit(z))
        ok = abs(st.value - pred) <= tol.constant_rel * pred
        add("scaled_tail", **common, predicted=pred, tolerance=f"rel {tol.constant_rel!r}",
            verdict="pass" if ok else "fail")
    if limit is not None:
        for z in cfg.z_grid:
            report.series.append(("limit", z, float(limit(z))))

    # ---- joint reduced measure
    for (t, x, y), cnt in zip(joint_keys, c_red):
        st = scaled_tail_from_count(t, int(cnt), cfg.n)
        common = dict(t_or_k=t, z=f"{x!r}|{y!r}", estimate=st.value, se=st.se,
                      ci_low=st.value - Z_95 * st.se, ci_high=st.value + Z_95 * st.se)
        if "joint" not in cfg.checks:
            add("joint_measure", **common, verdict="skipped: disabled in config")
            continue
        if an is None or an.joint_limit is None:
            add("joint_measure", **common, verdict="skipped: no analytic joint limit")
            continue
        pred = float(an.joint_limit(x, y))
        ok = abs(st.value - pred) <= tol.joint_se * st.se
        add("joint_measure", **common, predicted=pred, tolerance=f"{tol.joint_se!r} se",
            verdict="pass" if ok else "fail")

    # ---- asymptotic independence at a higher-order scaling
    if cfg.asy_indep:
        vals = []
        for t, cnt in zip(asy_keys, c_org[: len(asy_keys)]):
            st = scaled_tail_from_count(t, int(cnt), cfg.n)
            vals.append(st.value)
            add("asy_indep_tail", t_or_k=t, z=f"{cfg.asy_indep['x']!r}|{cfg.asy_indep['y']!r}",
                estimate=st.value, se=st.se, ci_low=max(0.0, st.value - Z_95 * st.se),
                ci_high=st.value + Z_95 * st.se, predicted=0.0, tolerance="decreasing in t")
        ratio = math.inf if vals[-1] == 0 else vals[0] / vals[-1]
        need = float(cfg.asy_indep["min_decay"])
        add("asy_indep_decay", t_or_k=f"{asy_keys[0]!r}->{asy_keys[-1]!r}", estimate=ratio,
            predicted=need, tolerance=f">= {need!r}", verdict="pass" if ratio >= need else "fail")

    # ---- degeneracy under a lower-order scaling
    if cfg.degeneracy:
        d = cfg.degeneracy
        grid = [float(g) for g in d["x_grid"]]
        for label, bound in (("wrong", float(d["max_spread"])), ("correct", float(d["min_spread_correct"]))):
            s = deg_slots[label]
            m = int(c_org[s])
            quantity = f"degeneracy_spread_{label}"
            if m < 30:
                add(quantity, t_or_k=float(d["t"]), estimate=m, verdict="fail",
                    tolerance="needs >= 30 exceedances")
                continue
            H = [int(c) / m for c in c_org[s + 1: s + 1 + len(grid)]]
            for g, h in zip(grid, H):
                report.series.append((f"conditional_H {label}", g, h))
            spread = max(H) - min(H)
            if label == "wrong":
                ok, tol_s = spread < bound, f"< {bound!r}"
            else:
                ok, tol_s = spread > bound, f"> {bound!r}"
            add(quantity, t_or_k=float(d["t"]), z=f"y={float(d['y'])!r}", estimate=spread,
                predicted=0.0 if label == "wrong" else None, tolerance=tol_s,
                verdict="pass" if ok else "fail")

    # Hill plot series
    k_hi = min(top.size - 1, cfg.hill_n - 1)
    if k_hi >= 2:
        for k in np.unique(np.rint(np.geomspace(2, k_hi, 40)).astype(int)):
            report.series.append(("hill", int(k), hill_from_top(top, int(k), cfg.hill_n).xi_hat))
    return report


def write_outputs(report: VerificationReport, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = report.config.name
    paths = {
        "csv": out / f"{name}.csv",
        "report": out / f"{name}.md",
        "series": out / f"{name}.series.csv",
    }
    paths["csv"].write_text(report.csv_text())
    paths["report"].write_text(report.markdown())
    paths["series"].write_text(report.series_text())
    return paths


def _config_paths(path) -> list[Path]:
    p = Path(path)
    if p.is_dir():
        return sorted(q for q in p.iterdir() if q.suffix == ".json" and q.is_file())
    return [p]


def verify_suite(path, out_dir, workers: int = 1) -> tuple[int, list]:
    """Run every ``*.json`` config under ``path`` (sorted by filename).

    Returns ``(exit_code, reports)``: 2 for an empty suite or any config
    error, else 1 if any report fails, else 0.
    """
    paths = _config_paths(path)
    if not paths:
        raise ConfigError(f"no configs found in {path}")
    configs = [ExperimentConfig.load(p) for p in paths]
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError("config names must be unique within a suite")
    reports = []
    for cfg in configs:
        rep = run(cfg, workers)
        write_outputs(rep, out_dir)
        reports.append(rep)
    summary = aggregate(reports)
    Path(out_dir, "summary.md").write_text(summary)
    return (0 if all(r.passed for r in reports) else 1), reports


def aggregate(reports: Sequence[VerificationReport]) -> str:
    lines = ["# Verification summary", "", "| config | model | case | mandatory rows | failures | verdict |",
             "|---|---|---|---|---|---|"]
    for r in reports:
        mandatory = [row for row in r.rows if row.verdict in ("pass", "fail")]
        fails = sum(row.verdict == "fail" for row in mandatory)
        lines.append(f"| {r.config.name} | {r.config.model.name} | {r.config.model.case.tag.value} | "
                     f"{len(mandatory)} | {fails} | {'PASS' if r.passed else 'FAIL'} |")
    overall = all(r.passed for r in reports)
    lines += ["", f"Overall: **{'PASS' if overall else 'FAIL'}**", ""]
    return "\n".join(lines)


def summarize_csvs(out_dir) -> tuple[int, str]:
    """Aggregate existing result CSVs in ``out_dir`` (used by ``cevm report``)."""
    files = sorted(p for p in Path(out_dir).glob("*.csv") if not p.name.endswith(".series.csv"))
    if not files:
        raise ConfigError(f"no result CSVs in {out_dir}")
    lines = ["# Verification summary", "", "| config | rows | failures | verdict |", "|---|---|---|---|"]
    any_fail = False
    for f in files:
        with open(f, newline="") as fh:
            rd = csv.DictReader(fh)
            if tuple(rd.fieldnames or ()) != CSV_COLUMNS:
                raise ConfigError(f"{f.name} is not a result CSV")
            verdicts = [row["verdict"] for row in rd]
        fails = verdicts.count("fail")
        any_fail |= fails > 0
        lines.append(f"| {f.stem} | {len(verdicts)} | {fails} | {'FAIL' if fails else 'PASS'} |")
    lines += ["", f"Overall: **{'FAIL' if any_fail else 'PASS'}**", ""]
    return (1 if any_fail else 0), "\n".join(lines)
