"""Command line entry point: ``cevm {classify,simulate,estimate,verify,report}``.

Exit status: 0 success, 1 tolerance failure, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .classifier import ModelParams, classify, hypotheses_report, product_prediction
from .estimators import default_k, hill, index_regression_fit, scaled_tail_from_count
from .harness import CSV_COLUMNS, ConfigError, ExperimentConfig, Row, run, summarize_csvs, verify_suite, write_outputs
from .model_zoo import model_from_json
from .samplefile import SampleWriter, read_samples, write_samples
from .sampling import iter_blocks
from .transforms import pivot_array, pivot_scaling

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _model_spec(d: dict) -> dict:
    """Accept an experiment config or a bare model spec."""
    return d["model"] if isinstance(d, dict) and "model" in d else d


def cmd_classify(args) -> int:
    d = _load_json(args.config)
    if isinstance(d, dict) and ("model" in d or "name" in d):
        try:
            params = model_from_json(_model_spec(d)).params
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    else:
        try:
            params = ModelParams.from_json(d.get("params", d) if isinstance(d, dict) else d)
            params.validate()
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"invalid parameters: {exc}") from None
    cid = classify(params)
    out = {"params": params.to_json(), "case": cid.tag.value, "description": cid.describe()}
    if cid.supported:
        out["prediction"] = product_prediction(cid, params).to_json()
        out["hypotheses"] = [h.name for h in hypotheses_report(cid, params)]
    else:
        out["reason"] = cid.reason.value
        out["explanation"] = cid.explanation()
    text = json.dumps(out, indent=2, sort_keys=True)
    print(text)
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        Path(args.out_dir, "classification.json").write_text(text + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    d = _load_json(args.config)
    try:
        model = model_from_json(_model_spec(d))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    n = args.n if args.n is not None else d.get("n") if isinstance(d, dict) else None
    seed = args.seed if args.seed is not None else d.get("seed", 0)
    if not isinstance(n, int) or n <= 0:
        raise ConfigError("simulate needs a positive --n (or n in the config)")
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "bin":
        path = out / "samples.bin"
        with SampleWriter(path) as w:
            for x, y, _, _ in iter_blocks(lambda j, m: model.block(seed, j, m), n):
                w.write(x, y)
    else:
        path = out / "samples.csv"
        x, y = model.sample(seed, n, args.workers)
        write_samples(path, x, y, fmt="csv")
    print(path)
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        x, y = read_samples(args.input)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read samples: {exc}") from None
    model = None
    if args.config:
        try:
            model = model_from_json(_model_spec(_load_json(args.config)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    name = model.name if model else Path(args.input).stem
    case = model.case.tag.value if model else ""
    if args.variable == "pivot":
        if model is None:
            raise ConfigError("the pivot needs --config with the model spec")
        p = model.params
        values = pivot_array(model.case.tag, x, y, p.beta_inf, p.b_inf)
    else:
        values = x if args.variable == "x" else y
    rows = []
    if args.quantity == "hill":
        k = args.k or default_k(values.size)
        try:
            est = hill(values, k)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rows.append(Row(name, case, f"hill_xi:{args.variable}", k, None, est.xi_hat,
                        est.xi_hat / math.sqrt(k), est.ci_low, est.ci_high))
    elif args.quantity == "regression":
        try:
            fit = index_regression_fit(values, k=args.k)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rows.append(Row(name, case, f"regression_exponent:{args.variable}", args.k, None, fit.tail_exponent, fit.se))
    else:
        if args.t is None:
            raise ConfigError("scaled-tail needs --t")
        if model is not None and args.variable == "pivot":
            s = pivot_scaling(model.case.tag, model.reduced)(args.t)
        else:
            s = args.scale if args.scale is not None else args.t
        for z in args.z or [1.0]:
            cnt = int(np.count_nonzero(values > s * z))
            st = scaled_tail_from_count(args.t, cnt, values.size)
            rows.append(Row(name, case, f"scaled_tail:{args.variable}", args.t, z, st.value, st.se))
    text_rows = [CSV_COLUMNS] + [r.cells() for r in rows]
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        with open(Path(args.out_dir, "estimates.csv"), "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(text_rows)
    else:
        csv.writer(sys.stdout, lineterminator="\n").writerows(text_rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    out_dir = args.out_dir or "cevm-out"
    path = Path(args.config)
    if path.is_dir():
        code, reports = verify_suite(path, out_dir, args.workers)
        for r in reports:
            print(f"{r.config.name}: {'PASS' if r.passed else 'FAIL'}")
        print(f"overall: {'PASS' if code == 0 else 'FAIL'}")
        return code
    cfg = ExperimentConfig.load(path)
    if args.seed is not None:
        cfg = ExperimentConfig.from_json({**_load_json(path), "seed": args.seed}, default_name=path.stem)
    rep = run(cfg, args.workers)
    paths = write_outputs(rep, out_dir)
    print(f"{cfg.name}: {'PASS' if rep.passed else 'FAIL'} ({paths['csv']})")
    return rep.exit_code


def cmd_report(args) -> int:
    out_dir = args.out_dir or "cevm-out"
    code, text = summarize_csvs(out_dir)
    Path(out_dir, "summary.md").write_text(text)
    print(text)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cevm", description="Conditional extreme value model toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON config or model spec")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("classify", help="parameters -> case and product prediction (JSON)")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="model spec -> sample file")
    common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--format", choices=("bin", "csv"), default="bin")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="sample file -> estimates CSV")
    common(p, config_required=False)
    p.add_argument("--input", required=True, help="sample file")
    p.add_argument("--quantity", choices=("hill", "regression", "scaled-tail"), default="hill")
    p.add_argument("--variable", choices=("x", "y", "pivot"), default="pivot")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--z", type=float, nargs="*", default=None)
    p.add_argument("--scale", type=float, default=None, help="threshold scale when no model is given")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="config (file or directory) -> report, exit code")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="aggregate result CSVs in --out-dir")
    common(p, config_required=False)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.workers < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
