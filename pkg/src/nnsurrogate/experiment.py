"""End-to-end experiment orchestration: sample, split, scale, train, report.

A run executes generate -> shuffle -> split -> scale -> init -> train ->
evaluate -> write and is a pure function of its config (wall-clock fields
aside). Any stage failure aborts with the stage name and removes whatever
files the run had already written.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import benchfn, device, metrics, mlp, pipeline, trainer
from .device import SweepSpec
from .metrics import ErrorReport
from .mlp import Activation, FanInScaledInit, Network, UniformInit
from .pipeline import Dataset, RandomUniformPlan, UniformGridPlan
from .trainer import LMConfig, SGDConfig, TrainHistory

__all__ = [
    "StageError",
    "BenchSource",
    "DeviceSource",
    "ExperimentConfig",
    "RunResult",
    "SuiteResult",
    "run_experiment",
    "run_suite",
    "write_curve_csv",
    "read_curve_csv",
]


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, cause: BaseException | str):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


@dataclass(frozen=True)
class BenchSource:
    """Data from a registered benchmark function, sampled over its domain."""

    function: str
    plan_kind: str = "random"  # "random" or "grid:<points-per-axis>"


@dataclass(frozen=True)
class DeviceSource:
    """Data drawn from a MOSFET I-V sweep table."""

    sweep: SweepSpec


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    source: Union[BenchSource, DeviceSource]
    seed: int = 0
    samples: int = 500
    train_fraction: float = 0.8
    validation_fraction: float = 0.0
    architecture: tuple[int, ...] = (2, 10, 10, 1)
    init_kind: str = "uniform"  # "uniform" or "fanin"
    init_lo: float = -0.5
    init_hi: float = 0.5
    init_c: float = 1.0
    trainer_kind: str = "lm"  # "lm" or "sgd"
    lm: LMConfig = LMConfig()
    sgd: SGDConfig = SGDConfig(learning_rate=0.01)
    out_dir: str = "runs"
    target_error_percent: Optional[float] = None  # bundled reference value
    threshold_percent: Optional[float] = None     # acceptance bound


@dataclass(frozen=True)
class RunResult:
    report: ErrorReport
    history: TrainHistory
    files: dict[str, Path]


def _derived_seeds(seed: int) -> tuple[int, int, int, int]:
    """Stable (data, shuffle, init, sgd) sub-seeds from the run seed."""
    state = np.random.SeedSequence(seed).generate_state(4, np.uint64)
    return tuple(int(s) for s in state)  # type: ignore[return-value]


def _stage(name: str):
    """Context manager tagging any exception with the failing stage."""

    class _Ctx:
        def __enter__(self):
            return None

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, StageError):
                raise StageError(name, exc) from exc
            return False

    return _Ctx()


def _build_plan(source: BenchSource, samples: int, seed: int):
    kind = source.plan_kind
    if kind == "random":
        return RandomUniformPlan(samples, seed)
    if kind.startswith("grid:"):
        return UniformGridPlan(int(kind.split(":", 1)[1]))
    raise ValueError(f"unknown plan kind {kind!r}")


def _generate(cfg: ExperimentConfig, data_seed: int) -> tuple[Dataset, dict]:
    if isinstance(cfg.source, BenchSource):
        f = benchfn.get_function(cfg.source.function)
        plan = _build_plan(cfg.source, cfg.samples, data_seed)
        ds = benchfn.domain_samples(f, plan)
        meta = {
            "plan": {"kind": cfg.source.plan_kind, "samples": cfg.samples},
            "domain": [list(axis) for axis in f.domain],
        }
    elif isinstance(cfg.source, DeviceSource):
        sweep = cfg.source.sweep
        ds = device.circuit_dataset(sweep, cfg.samples, data_seed)
        meta = {
            "plan": {"kind": "sweep-sample", "samples": cfg.samples},
            "domain": [
                [min(sweep.v_gs_values), max(sweep.v_gs_values)],
                list(sweep.v_ds_range),
            ],
        }
    else:
        raise ValueError(f"unknown source {type(cfg.source).__name__}")
    meta["seed"] = cfg.seed
    meta["data_seed"] = data_seed
    return ds, meta


def _init_strategy(cfg: ExperimentConfig, init_seed: int):
    if cfg.init_kind == "uniform":
        return UniformInit(cfg.init_lo, cfg.init_hi, init_seed)
    if cfg.init_kind == "fanin":
        return FanInScaledInit(cfg.init_c, init_seed)
    raise ValueError(f"unknown init kind {cfg.init_kind!r}")


def write_curve_csv(
    inputs: np.ndarray, actual: np.ndarray, predicted: np.ndarray, path: str | Path
) -> None:
    """Prediction-vs-actual rows sorted by the first input column."""
    x = np.asarray(inputs, dtype=float)
    a = np.asarray(actual, dtype=float).reshape(x.shape[0], -1)
    p = np.asarray(predicted, dtype=float).reshape(x.shape[0], -1)
    order = np.argsort(x[:, 0], kind="stable")
    cols = [f"x{i + 1}" for i in range(x.shape[1])]
    if a.shape[1] == 1:
        cols += ["actual", "predicted"]
    else:
        cols += [f"actual{j + 1}" for j in range(a.shape[1])]
        cols += [f"predicted{j + 1}" for j in range(p.shape[1])]
    lines = [",".join(cols)]
    for i in order:
        vals = (*x[i], *a[i], *p[i])
        lines.append(",".join(f"{v:.17g}" for v in vals))
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    header = lines[0].split(",")
    d = sum(1 for h in header if h.startswith("x"))
    n_actual = sum(1 for h in header if h.startswith("actual"))
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return rows[:, :d], rows[:, d : d + n_actual], rows[:, d + n_actual :]


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Execute one full experiment and write its artifacts under out_dir/name."""
    data_seed, shuffle_seed, init_seed, sgd_seed = _derived_seeds(cfg.seed)

    with _stage("generate"):
        ds, meta = _generate(cfg, data_seed)

    with _stage("shuffle"):
        shuffled, perm = pipeline.shuffle_paired(ds, shuffle_seed)

    with _stage("split"):
        parts = pipeline.split(
            shuffled, cfg.train_fraction, cfg.validation_fraction, permutation=perm
        )

    with _stage("scale"):
        sp = pipeline.fit_scale(parts.train)
        train_scaled = Dataset(
            pipeline.apply_scale(sp.inputs, parts.train.inputs),
            pipeline.apply_scale(sp.targets, parts.train.targets),
            provenance=f"{ds.provenance} (scaled train)",
        )
        val_scaled = None
        if parts.validation is not None:
            val_scaled = Dataset(
                pipeline.apply_scale(sp.inputs, parts.validation.inputs),
                pipeline.apply_scale(sp.targets, parts.validation.targets),
                provenance=f"{ds.provenance} (scaled validation)",
            )

    with _stage("init"):
        if cfg.architecture[0] != ds.n_inputs or cfg.architecture[-1] != ds.n_targets:
            raise ValueError(
                f"architecture {'-'.join(map(str, cfg.architecture))} does not "
                f"match data dims {ds.n_inputs}->{ds.n_targets}"
            )
        specs = mlp.layer_specs_from_sizes(cfg.architecture)
        net0 = mlp.init_network(specs, _init_strategy(cfg, init_seed))

    with _stage("train"):
        if cfg.trainer_kind == "lm":
            net, history = trainer.train_lm(net0, train_scaled, val_scaled, cfg.lm)
        elif cfg.trainer_kind == "sgd":
            sgd_cfg = replace(cfg.sgd, seed=sgd_seed)
            net, history = trainer.train_sgd_online(net0, train_scaled, sgd_cfg)
        else:
            raise ValueError(f"unknown trainer {cfg.trainer_kind!r}")

    with _stage("evaluate"):
        report = metrics.evaluate_surrogate(
            net, sp, parts.test,
            function_name=cfg.name,
            seconds=history.wall_clock_seconds,
        )
        predictions = pipeline.invert_scale(
            sp.targets,
            mlp.forward_batch(net, pipeline.apply_scale(sp.inputs, parts.test.inputs)),
        )

    run_dir = Path(cfg.out_dir) / cfg.name
    created: list[Path] = []
    try:
        with _stage("write"):
            run_dir.mkdir(parents=True, exist_ok=True)
            files: dict[str, Path] = {}

            def record(key: str, path: Path) -> Path:
                created.append(path)
                files[key] = path
                return path

            sidecar = pipeline.write_dataset_csv(
                ds, record("dataset", run_dir / "dataset.csv"), metadata=meta
            )
            record("dataset_meta", sidecar)
            mlp.save_network(net, record("model", run_dir / "model.txt"))
            pipeline.write_scale_json(sp, record("scale", run_dir / "scale.json"))
            trainer.write_history_csv(history, record("history", run_dir / "history.csv"))
            metrics.write_report_csv(
                [
                    {
                        "function": report.function_name,
                        "error_percent": report.e_percent,
                        "seconds": report.seconds,
                    }
                ],
                record("report", run_dir / "report.csv"),
            )
            write_curve_csv(
                parts.test.inputs,
                parts.test.targets,
                predictions,
                record("curve", run_dir / "curve.csv"),
            )
    except StageError:
        for path in created:
            path.unlink(missing_ok=True)
        raise

    return RunResult(report=report, history=history, files=files)


@dataclass
class SuiteResult:
    rows: list[dict]
    results: dict[str, RunResult] = field(default_factory=dict)
    failures: dict[str, StageError] = field(default_factory=dict)


def run_suite(
    configs: list[ExperimentConfig] | tuple[ExperimentConfig, ...],
    out_dir: Optional[str | Path] = None,
) -> SuiteResult:
    """Run every config, isolating failures, and emit the combined table.

    Failed rows carry an `error:<stage>` marker in the error column; the
    remaining rows are unaffected. Row order follows config order.
    """
    suite = SuiteResult(rows=[])
    for cfg in configs:
        if out_dir is not None:
            cfg = replace(cfg, out_dir=str(out_dir))
        try:
            result = run_experiment(cfg)
            suite.results[cfg.name] = result
            suite.rows.append(
                {
                    "function": cfg.name,
                    "error_percent": result.report.e_percent,
                    "seconds": result.report.seconds,
                }
            )
        except StageError as err:
            suite.failures[cfg.name] = err
            suite.rows.append(
                {"function": cfg.name, "error_percent": f"error:{err.stage}", "seconds": ""}
            )
    if out_dir is not None:
        table = Path(out_dir) / "suite_report.csv"
        table.parent.mkdir(parents=True, exist_ok=True)
        metrics.write_report_csv(suite.rows, table)
    return suite
