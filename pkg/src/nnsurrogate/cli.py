"""Command-line harness: gen-data, train, eval, run, suite, sweep-iv.

Experiment settings come from a flat `key = value` config file and/or
command-line flags; flags win. Every run is deterministic in its seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import benchfn, configs, device, metrics, mlp, pipeline, trainer
from .experiment import (
    BenchSource,
    DeviceSource,
    ExperimentConfig,
    StageError,
    run_experiment,
    run_suite,
)
from .trainer import LMConfig, SGDConfig

__all__ = ["main", "entrypoint", "parse_config_file", "config_from_mapping"]

CONFIG_KEYS = {
    "name", "function", "samples", "seed", "arch", "trainer",
    "train_fraction", "validation_fraction", "out", "plan",
    "init", "init_lo", "init_hi", "init_c",
    "lm_mu0", "lm_mu_inc", "lm_mu_dec", "lm_mu_max",
    "lm_max_epochs", "lm_mse_goal", "lm_min_grad", "lm_patience",
    "sgd_learning_rate", "sgd_max_epochs", "sgd_mse_goal",
}


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat `key = value` file; `#` starts a comment."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        mapping[key] = value.strip()
    return mapping


def _parse_arch(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(p) for p in text.split("-"))
    except ValueError:
        raise ValueError(f"bad architecture {text!r}; expected sizes like 2-10-10-1")
    if len(sizes) < 2:
        raise ValueError(f"architecture {text!r} needs at least two sizes")
    return sizes


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    """Build an ExperimentConfig from flat string settings."""
    unknown = set(mapping) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "function" not in mapping:
        raise ValueError("config needs a 'function' entry")
    function = mapping["function"]
    source = configs.resolve_source(function)
    if isinstance(source, BenchSource) and "plan" in mapping:
        source = replace(source, plan_kind=mapping["plan"])

    lm = LMConfig(
        mu0=float(mapping.get("lm_mu0", 1e-3)),
        mu_inc=float(mapping.get("lm_mu_inc", 10.0)),
        mu_dec=float(mapping.get("lm_mu_dec", 10.0)),
        mu_max=float(mapping.get("lm_mu_max", 1e10)),
        max_epochs=int(mapping.get("lm_max_epochs", 1000)),
        mse_goal=float(mapping.get("lm_mse_goal", 1e-8)),
        min_grad=float(mapping.get("lm_min_grad", 1e-10)),
        patience=int(mapping.get("lm_patience", 6)),
    )
    sgd = SGDConfig(
        learning_rate=float(mapping.get("sgd_learning_rate", 0.01)),
        max_epochs=int(mapping.get("sgd_max_epochs", 100)),
        mse_goal=float(mapping.get("sgd_mse_goal", 0.0)),
    )
    return ExperimentConfig(
        name=mapping.get("name", function),
        source=source,
        seed=int(mapping.get("seed", 0)),
        samples=int(mapping.get("samples", 500)),
        train_fraction=float(mapping.get("train_fraction", 0.8)),
        validation_fraction=float(mapping.get("validation_fraction", 0.0)),
        architecture=_parse_arch(mapping.get("arch", "2-10-10-1")),
        init_kind=mapping.get("init", "uniform"),
        init_lo=float(mapping.get("init_lo", -0.5)),
        init_hi=float(mapping.get("init_hi", 0.5)),
        init_c=float(mapping.get("init_c", 1.0)),
        trainer_kind=mapping.get("trainer", "lm"),
        lm=lm,
        sgd=sgd,
        out_dir=mapping.get("out", "runs"),
    )


def _merge_overrides(mapping: dict[str, str], args: argparse.Namespace) -> dict[str, str]:
    for key, attr in (
        ("function", "function"), ("samples", "samples"), ("seed", "seed"),
        ("arch", "arch"), ("trainer", "trainer"), ("out", "out"),
        ("train_fraction", "train_fraction"),
        ("validation_fraction", "validation_fraction"),
        ("lm_max_epochs", "max_epochs"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            mapping[key] = str(value)
    return mapping


def _cmd_gen_data(args: argparse.Namespace) -> int:
    source = configs.resolve_source(args.function)
    if isinstance(source, BenchSource):
        f = benchfn.get_function(source.function)
        if args.plan == "random":
            plan = pipeline.RandomUniformPlan(args.samples, args.seed)
        elif args.plan.startswith("grid:"):
            plan = pipeline.UniformGridPlan(int(args.plan.split(":", 1)[1]))
        else:
            raise ValueError(f"unknown plan {args.plan!r}")
        ds = benchfn.domain_samples(f, plan)
        meta = {
            "plan": {"kind": args.plan, "samples": ds.n},
            "domain": [list(axis) for axis in f.domain],
            "seed": args.seed,
        }
    else:
        ds = device.circuit_dataset(source.sweep, args.samples, args.seed)
        meta = {"plan": {"kind": "sweep-sample", "samples": ds.n}, "seed": args.seed}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pipeline.write_dataset_csv(ds, out, metadata=meta)
    print(f"wrote {ds.n} samples to {out}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    ds = pipeline.read_dataset_csv(args.data)
    seeds = np.random.SeedSequence(args.seed).generate_state(3, np.uint64)
    shuffled, perm = pipeline.shuffle_paired(ds, int(seeds[0]))
    parts = pipeline.split(
        shuffled, args.train_fraction, args.validation_fraction, permutation=perm
    )
    sp = pipeline.fit_scale(parts.train)

    def scaled(part):
        return pipeline.Dataset(
            pipeline.apply_scale(sp.inputs, part.inputs),
            pipeline.apply_scale(sp.targets, part.targets),
            provenance=part.provenance,
        )

    arch = _parse_arch(args.arch)
    if arch[0] != ds.n_inputs or arch[-1] != ds.n_targets:
        raise ValueError(
            f"architecture {args.arch} does not match data dims "
            f"{ds.n_inputs}->{ds.n_targets}"
        )
    net0 = mlp.init_network(
        mlp.layer_specs_from_sizes(arch),
        mlp.UniformInit(seed=int(seeds[1])),
    )
    if args.trainer == "lm":
        cfg = LMConfig(max_epochs=args.max_epochs, mse_goal=args.mse_goal)
        val = scaled(parts.validation) if parts.validation is not None else None
        net, history = trainer.train_lm(net0, scaled(parts.train), val, cfg)
    else:
        cfg = SGDConfig(
            learning_rate=args.learning_rate,
            max_epochs=args.max_epochs,
            mse_goal=args.mse_goal,
            seed=int(seeds[2]),
        )
        net, history = trainer.train_sgd_online(net0, scaled(parts.train), cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mlp.save_network(net, out / "model.txt")
    pipeline.write_scale_json(sp, out / "scale.json")
    trainer.write_history_csv(history, out / "history.csv")
    pipeline.write_dataset_csv(parts.test, out / "test.csv")
    final = history.records[-1].train_mse if history.records else float("nan")
    print(
        f"trained {args.arch} with {args.trainer}: final train MSE {final:.6g}, "
        f"stop {history.stop_reason}, {history.wall_clock_seconds:.3f}s -> {out}"
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    net = mlp.load_network(args.model)
    sp = pipeline.read_scale_json(args.scale)
    ds = pipeline.read_dataset_csv(args.data)
    report = metrics.evaluate_surrogate(
        net, sp, ds, function_name=args.function or ds.provenance or "dataset"
    )
    print(metrics.REPORT_HEADER)
    print(metrics.report_row(report))
    if args.out:
        metrics.write_report_csv(
            [
                {
                    "function": report.function_name,
                    "error_percent": report.e_percent,
                    "seconds": report.seconds,
                }
            ],
            args.out,
        )
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    mapping = parse_config_file(args.config) if args.config else {}
    mapping = _merge_overrides(mapping, args)
    cfg = config_from_mapping(mapping)
    result = run_experiment(cfg)
    print(metrics.REPORT_HEADER)
    print(metrics.report_row(result.report))
    print(f"artifacts in {result.files['report'].parent}")
    return 0


def _cmd_suite(args: argparse.Namespace) -> int:
    if args.config:
        suite_configs = [
            config_from_mapping(_merge_overrides(parse_config_file(p), args))
            for p in args.config
        ]
    else:
        suite_configs = list(
            configs.bundled_configs(
                seed=args.seed if args.seed is not None else configs.ACCEPTANCE_SEEDS[0],
                out_dir=args.out,
                include_easom=args.include_easom,
            )
        )
        if args.max_epochs is not None:
            suite_configs = [
                replace(c, lm=replace(c.lm, max_epochs=args.max_epochs))
                for c in suite_configs
            ]
    suite = run_suite(suite_configs, out_dir=args.out)
    print(metrics.REPORT_HEADER)
    for row in suite.rows:
        err = row["error_percent"]
        err_s = f"{err:.5f}" if isinstance(err, float) else str(err)
        sec = row["seconds"]
        sec_s = f"{sec:.3f}" if isinstance(sec, float) else ""
        print(f"{row['function']},{err_s},{sec_s}")
    print(f"table written to {Path(args.out) / 'suite_report.csv'}")
    return 1 if suite.failures else 0


def _parse_vds(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad v_ds spec {text!r}; expected lo:hi:steps")
    return float(parts[0]), float(parts[1]), int(parts[2])


def _cmd_sweep_iv(args: argparse.Namespace) -> int:
    lo, hi, steps = _parse_vds(args.vds)
    spec = device.SweepSpec(
        v_gs_values=tuple(float(v) for v in args.vgs.split(",")),
        v_ds_range=(lo, hi),
        v_ds_steps=steps,
        params=device.MosfetParams(
            k_prime=args.kprime,
            width=args.width,
            length=args.length,
            v_th=args.vth,
            lambda_=getattr(args, "lambda"),
        ),
    )
    table = device.iv_sweep(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    device.write_sweep_csv(table, out)
    print(f"wrote {table.shape[0]} sweep rows to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nnsurrogate",
        description="Train and evaluate neural surrogates of closed-form "
        "benchmark functions and an analytic MOSFET model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="sample a function or device sweep to CSV")
    p.add_argument("--function", required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plan", default="random", help="random or grid:<points-per-axis>")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="train a surrogate on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--arch", default="2-10-10-1")
    p.add_argument("--trainer", choices=("lm", "sgd"), default="lm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.8, dest="train_fraction")
    p.add_argument(
        "--validation-fraction", type=float, default=0.0, dest="validation_fraction"
    )
    p.add_argument("--max-epochs", type=int, default=1000, dest="max_epochs")
    p.add_argument("--mse-goal", type=float, default=1e-8, dest="mse_goal")
    p.add_argument("--learning-rate", type=float, default=0.01, dest="learning_rate")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a saved model against a dataset CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--scale", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--function", default="", help="label for the report row")
    p.add_argument("--out", default="", help="optional report CSV path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("run", help="run one full experiment")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--function")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--arch")
    p.add_argument("--trainer", choices=("lm", "sgd"))
    p.add_argument("--out")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument(
        "--validation-fraction", type=float, dest="validation_fraction"
    )
    p.add_argument("--max-epochs", type=int, dest="max_epochs")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("suite", help="run the bundled table rows (or given configs)")
    p.add_argument("--config", action="append", help="config file; may repeat")
    p.add_argument("--out", default="runs")
    p.add_argument("--seed", type=int)
    p.add_argument("--include-easom", action="store_true")
    p.add_argument("--max-epochs", type=int, dest="max_epochs")
    p.add_argument("--function")  # accepted for symmetry with run
    p.add_argument("--samples", type=int)
    p.add_argument("--arch")
    p.add_argument("--trainer", choices=("lm", "sgd"))
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument("--validation-fraction", type=float, dest="validation_fraction")
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("sweep-iv", help="export a device I-V sweep CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--vgs", default="0,1,2,3", help="comma-separated v_gs values")
    p.add_argument("--vds", default="0:5:51", help="v_ds as lo:hi:steps")
    p.add_argument("--vth", type=float, default=0.7)
    p.add_argument("--lambda", type=float, default=0.04)
    p.add_argument("--kprime", type=float, default=100e-6)
    p.add_argument("--width", type=float, default=10e-6)
    p.add_argument("--length", type=float, default=1e-6)
    p.set_defaults(func=_cmd_sweep_iv)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as err:
        print(f"error [{err.stage}]: {err.cause}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
