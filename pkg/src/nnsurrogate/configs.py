"""Bundled experiment configurations for the reference error table.

Nine rows (two general-function variants, the five benchmark surfaces with
published targets, three analog device configs) plus an extra `easom` row
that has no bundled error target. Architectures and epoch budgets are part
of the declared configuration: the reference table reports errors per row
but not the networks behind them.
"""

from __future__ import annotations

from dataclasses import replace

from .device import MosfetParams, SweepSpec
from .experiment import BenchSource, DeviceSource, ExperimentConfig
from .trainer import LMConfig

__all__ = [
    "ACCEPTANCE_SEEDS",
    "DEVICE_SOURCES",
    "bundled_configs",
    "resolve_source",
]

# The five documented seeds used for stochastic acceptance checks.
ACCEPTANCE_SEEDS = (11, 23, 42, 77, 101)

# Declared analog device configurations. v_gs values stay above threshold so
# every sampled current is nonzero and the relative-error metric is defined.
DEVICE_SOURCES: dict[str, DeviceSource] = {
    "analog-1": DeviceSource(
        SweepSpec(
            v_gs_values=(1.0, 2.0, 3.0),
            v_ds_range=(0.0, 5.0),
            v_ds_steps=200,
            params=MosfetParams(v_th=0.7, lambda_=0.04),
        )
    ),
    "analog-2": DeviceSource(
        SweepSpec(
            v_gs_values=(1.5, 2.0, 2.5, 3.0),
            v_ds_range=(0.0, 5.0),
            v_ds_steps=170,
            params=MosfetParams(v_th=1.0, lambda_=0.1),
        )
    ),
    "analog-3": DeviceSource(
        SweepSpec(
            v_gs_values=(1.0, 2.0, 3.0),
            v_ds_range=(0.0, 3.0),
            v_ds_steps=180,
            params=MosfetParams(v_th=0.7, lambda_=0.0),
        )
    ),
}


def _lm(max_epochs: int, mse_goal: float = 1e-10) -> LMConfig:
    return LMConfig(max_epochs=max_epochs, mse_goal=mse_goal)


def _bench(name: str, function: str, arch: tuple[int, ...], lm: LMConfig,
           target: float | None, threshold: float | None) -> ExperimentConfig:
    return ExperimentConfig(
        name=name,
        source=BenchSource(function),
        architecture=arch,
        lm=lm,
        target_error_percent=target,
        threshold_percent=threshold,
    )


def _device(name: str, arch: tuple[int, ...], lm: LMConfig,
            target: float, threshold: float) -> ExperimentConfig:
    return ExperimentConfig(
        name=name,
        source=DEVICE_SOURCES[name],
        architecture=arch,
        lm=lm,
        target_error_percent=target,
        threshold_percent=threshold,
    )


def bundled_configs(
    seed: int = ACCEPTANCE_SEEDS[0],
    out_dir: str = "runs",
    include_easom: bool = False,
) -> tuple[ExperimentConfig, ...]:
    """The bundled table rows, in table order, bound to one seed."""
    configs = (
        _bench("general-small", "general", (2, 6, 1), _lm(400), 0.59167, 2.0),
        _bench("general-large", "general", (2, 12, 12, 1), _lm(400), 0.52124, 2.0),
        _bench("bohachevsky1", "bohachevsky1", (2, 10, 10, 1), _lm(1000), 4.6018, 10.0),
        _bench("bohachevsky2", "bohachevsky2", (2, 10, 10, 1), _lm(1000), 0.67286, 2.0),
        _bench("hump", "hump", (2, 14, 14, 1), _lm(1500, 1e-12), 5.0895, 10.0),
        _bench("beale", "beale", (2, 12, 12, 1), _lm(4000, 1e-14), 2.2085, 5.0),
        _bench("booth", "booth", (2, 10, 10, 1), _lm(800), 0.65626, 2.0),
        _device("analog-1", (2, 10, 10, 1), _lm(600, 1e-12), 0.19039, 1.0),
        _device("analog-2", (2, 10, 10, 1), _lm(600, 1e-12), 0.33277, 1.0),
        _device("analog-3", (2, 10, 10, 1), _lm(600, 1e-12), 0.060012, 1.0),
    )
    if include_easom:
        configs = configs + (
            _bench("easom", "easom", (2, 14, 14, 1), _lm(1500, 1e-12), None, None),
        )
    return tuple(replace(c, seed=seed, out_dir=out_dir) for c in configs)


def resolve_source(name: str) -> BenchSource | DeviceSource:
    """Map a CLI/config function name to a data source.

    Benchmark registry names win; `analog-*` names resolve to the bundled
    device sweeps.
    """
    if name in DEVICE_SOURCES:
        return DEVICE_SOURCES[name]
    from .benchfn import function_names

    if name in function_names():
        return BenchSource(name)
    raise ValueError(
        f"unknown function {name!r}; choose a benchmark "
        f"({', '.join(function_names())}) or a device config "
        f"({', '.join(DEVICE_SOURCES)})"
    )
