"""Command-line front end: fit, eval, and a distribution-shift benchmark.

Output records are canonical sorted key=value text so that fixed seeds give
byte-identical files; floats are written with repr and round-trip exactly.
Wall time goes to stdout only, keeping the files deterministic.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from .calibrate import resolve_config
from .core import AUX_STREAM_BASE, Dataset, ModelParams, RobustConfig, derive_stream, validate_dataset
from .errors import DimensionMismatch, ParseError, WdroError
from .losses import Logistic, Loss, SquaredError
from .train import TrainSettings, evaluate, fit_erm, fit_wdro

log = logging.getLogger("wdro")

TASKS = {"classification": Logistic, "regression": SquaredError}


def load_csv(path: str, label_col: str | None = None) -> Dataset:
    """Parse a headered CSV; label_col defaults to the last column."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    header = [h.strip() for h in lines[0].split(",")]
    if label_col is None:
        label_idx = len(header) - 1
    else:
        if label_col not in header:
            raise ParseError(f"label column '{label_col}' not in header {header}", line=1)
        label_idx = header.index(label_col)
    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != len(header):
            raise ParseError(
                f"line {lineno}: expected {len(header)} fields, got {len(cells)}",
                line=lineno,
            )
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric value", line=lineno) from None
        label = vals.pop(label_idx)
        rows.append((np.array(vals), label))
    return validate_dataset(rows)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_record(path: str, record: dict) -> None:
    lines = [f"{k}={_fmt(record[k])}" for k in sorted(record)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_record(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh.read().splitlines(), start=1):
            if not raw.strip():
                continue
            if "=" not in raw:
                raise ParseError(f"line {lineno}: expected key=value", line=lineno)
            k, v = raw.split("=", 1)
            out[k] = v
    return out


def _load_model(path: str) -> tuple[str, ModelParams]:
    rec = read_record(path)
    task = rec.get("task")
    if task not in TASKS:
        raise ParseError(f"model file has unknown task '{task}'")
    dim = int(rec["dim"])
    w = np.array([float(rec[f"weight{i}"]) for i in range(dim)])
    return task, ModelParams(w, float(rec["bias"]))


def _loss_for(task: str) -> Loss:
    return TASKS[task]()


def _settings_from(args) -> TrainSettings:
    kw = {}
    if args.max_iters is not None:
        kw["max_iters"] = args.max_iters
    if args.lr is not None:
        kw["learning_rate"] = args.lr
    return TrainSettings(**kw)


def _config_from(args) -> RobustConfig:
    return RobustConfig(
        rho=args.rho,
        epsilon=args.epsilon,
        sigma=args.sigma,
        m_samples=args.samples,
        cost_power=args.cost_power,
        seed=args.seed,
    )


def cmd_fit(args) -> int:
    dataset = load_csv(args.input, args.label_col)
    loss = _loss_for(args.task)
    settings = _settings_from(args)
    started = time.perf_counter()
    record = {"task": args.task, "dim": dataset.dim, "n_train": dataset.n}
    if args.rho is None:
        report = fit_erm(loss, dataset, settings)
        record["method"] = "erm"
    else:
        config = resolve_config(_config_from(args), dataset)
        report = fit_wdro(loss, dataset, config, settings)
        record.update(
            method="wdro",
            rho=config.rho,
            epsilon=config.epsilon,
            sigma=config.sigma,
            m_samples=config.m_samples,
            cost_power=config.cost_power,
            seed=config.seed,
        )
    elapsed = time.perf_counter() - started
    record.update(
        bias=report.final_params.bias,
        final_objective=report.objective_trace[-1],
        iterations=report.iterations_run,
        converged=report.converged,
        max_iters=settings.max_iters,
        learning_rate=settings.learning_rate,
    )
    record["lambda"] = report.final_lambda
    for i, wi in enumerate(report.final_params.weights):
        record[f"weight{i}"] = float(wi)
    write_record(args.output, record)
    log.info("fit completed in %.3f s", elapsed)
    print(f"wrote {args.output} (wall time {elapsed:.3f} s)")
    return 0


def cmd_eval(args) -> int:
    task, params = _load_model(args.model)
    dataset = load_csv(args.input, args.label_col)
    if params.dim != dataset.dim:
        raise DimensionMismatch(
            f"model dim {params.dim} does not match data dim {dataset.dim}"
        )
    metrics = evaluate(_loss_for(task), params, dataset)
    metrics["n_eval"] = dataset.n
    write_record(args.output, metrics)
    print(f"wrote {args.output}")
    return 0


def cmd_bench_shift(args) -> int:
    if args.task != "classification":
        raise WdroError("bench-shift requires --task classification")
    dataset = load_csv(args.input, args.label_col)
    loss = Logistic()
    settings = _settings_from(args)
    shifts = [float(s) for s in args.shifts.split(",") if s.strip()]
    u = np.ones(dataset.dim) / np.sqrt(dataset.dim)
    record = {"trials": args.trials, "rho": args.rho, "seed": args.seed}
    sums: dict[tuple[float, str, str], float] = {}
    started = time.perf_counter()
    for t in range(args.trials):
        rng = derive_stream(args.seed, AUX_STREAM_BASE + t)
        perm = rng.permutation(dataset.n)
        n_train = int(0.7 * dataset.n)
        train = dataset.subset(perm[:n_train])
        test = dataset.subset(perm[n_train:])
        trial_seed = int(rng.integers(2**63))
        config = resolve_config(
            RobustConfig(
                rho=args.rho, epsilon=args.epsilon, sigma=args.sigma,
                m_samples=args.samples, cost_power=args.cost_power,
                seed=trial_seed,
            ),
            train,
        )
        fits = {
            "erm": fit_erm(loss, train, settings),
            "wdro": fit_wdro(loss, train, config, settings),
        }
        for delta in shifts:
            shifted = Dataset(test.features + delta * u, test.labels)
            for model, report in fits.items():
                metrics = evaluate(loss, report.final_params, shifted)
                for name in ("mean_loss", "accuracy"):
                    key = f"trial{t:03d}.delta{delta!r}.{model}.{name}"
                    record[key] = metrics[name]
                    agg = (delta, model, name)
                    sums[agg] = sums.get(agg, 0.0) + metrics[name]
        log.info("trial %d done", t)
    for (delta, model, name), total in sums.items():
        record[f"mean.delta{delta!r}.{model}.{name}"] = total / args.trials
    elapsed = time.perf_counter() - started
    write_record(args.output, record)
    print(f"wrote {args.output} (wall time {elapsed:.3f} s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wdro", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_rho_default=None):
        p.add_argument("--input", required=True, help="input CSV path")
        p.add_argument("--output", required=True, help="output record path")
        p.add_argument("--label-col", default=None, help="label column name (default: last)")
        p.add_argument("--rho", type=float, default=need_rho_default)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--sigma", type=float, default=None)
        p.add_argument("--samples", type=int, default=16, help="cloud size m")
        p.add_argument("--cost-power", type=int, default=2, choices=(1, 2))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--lr", type=float, default=None)

    p_fit = sub.add_parser("fit", help="train a model and write params+metrics")
    p_fit.add_argument("--task", required=True, choices=sorted(TASKS))
    common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_eval = sub.add_parser("eval", help="evaluate a saved model on a CSV")
    p_eval.add_argument("--model", required=True, help="model record from fit")
    p_eval.add_argument("--input", required=True)
    p_eval.add_argument("--output", required=True)
    p_eval.add_argument("--label-col", default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser("bench-shift", help="ERM vs WDRO under feature shifts")
    p_bench.add_argument("--task", default="classification", choices=sorted(TASKS))
    common(p_bench, need_rho_default=0.1)
    p_bench.add_argument("--trials", type=int, default=5)
    p_bench.add_argument("--shifts", default="0,0.5", help="comma list of deltas")
    p_bench.set_defaults(func=cmd_bench_shift)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("WDRO_LOG", "").upper()
    if level:
        logging.basicConfig(level=getattr(logging, level, logging.INFO))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (WdroError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
