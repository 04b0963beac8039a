"""Analytic square-law MOSFET model with channel-length modulation.

Stands in for a circuit simulator: `iv_sweep` builds the I-V table a
simulator would export, and `circuit_dataset` draws training rows from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .pipeline import Dataset

__all__ = [
    "MosfetParams",
    "BiasPoint",
    "SweepSpec",
    "drain_current",
    "iv_sweep",
    "circuit_dataset",
    "write_sweep_csv",
    "read_sweep_csv",
]

SWEEP_HEADER = "v_gs,v_ds,i_d"


@dataclass(frozen=True)
class MosfetParams:
    """Device constants: I_D = k' * W/(2L) * (V_GS - V_TH)^2 * (1 + lambda*V_DS)."""

    k_prime: float = 100e-6  # transconductance parameter (A/V^2)
    width: float = 10e-6     # effective channel width (m)
    length: float = 1e-6     # effective channel length (m)
    v_th: float = 0.7        # threshold voltage (V)
    lambda_: float = 0.04    # channel-length modulation (1/V)

    def __post_init__(self):
        if not self.k_prime > 0:
            raise ValueError("k_prime must be positive")
        if not self.width > 0 or not self.length > 0:
            raise ValueError("channel width and length must be positive")
        if self.lambda_ < 0:
            raise ValueError("lambda must be non-negative")
        if not math.isfinite(self.v_th):
            raise ValueError("v_th must be finite")


@dataclass(frozen=True)
class BiasPoint:
    v_gs: float
    v_ds: float

    def __post_init__(self):
        if not (math.isfinite(self.v_gs) and math.isfinite(self.v_ds)):
            raise ValueError("bias voltages must be finite")


def _current(p: MosfetParams, v_gs: np.ndarray, v_ds: np.ndarray) -> np.ndarray:
    overdrive = v_gs - p.v_th
    i_on = p.k_prime * (p.width / (2.0 * p.length)) * overdrive**2 * (1.0 + p.lambda_ * v_ds)
    return np.where(overdrive > 0, i_on, 0.0)


def drain_current(p: MosfetParams, b: BiasPoint) -> float:
    """Drain current in amperes; zero in cutoff (v_gs <= v_th)."""
    return float(_current(p, np.float64(b.v_gs), np.float64(b.v_ds)))


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian I-V sweep: every v_gs value crossed with a stepped v_ds range."""

    v_gs_values: tuple[float, ...]
    v_ds_range: tuple[float, float]
    v_ds_steps: int
    params: MosfetParams

    def __post_init__(self):
        object.__setattr__(self, "v_gs_values", tuple(float(v) for v in self.v_gs_values))
        lo, hi = self.v_ds_range
        object.__setattr__(self, "v_ds_range", (float(lo), float(hi)))
        if not self.v_gs_values:
            raise ValueError("need at least one v_gs value")
        if self.v_ds_steps < 2:
            raise ValueError("v_ds range needs at least 2 steps")
        if not lo < hi:
            raise ValueError(f"bad v_ds range [{lo}, {hi}]")

    @property
    def n_rows(self) -> int:
        return len(self.v_gs_values) * self.v_ds_steps


def iv_sweep(spec: SweepSpec) -> np.ndarray:
    """(n, 3) table of (v_gs, v_ds, i_d), v_gs-major, v_ds ascending."""
    lo, hi = spec.v_ds_range
    v_ds = np.linspace(lo, hi, spec.v_ds_steps)
    v_gs = np.repeat(np.asarray(spec.v_gs_values, dtype=float), spec.v_ds_steps)
    v_ds = np.tile(v_ds, len(spec.v_gs_values))
    i_d = _current(spec.params, v_gs, v_ds)
    return np.column_stack([v_gs, v_ds, i_d])


def circuit_dataset(spec: SweepSpec, n: int, seed: int) -> Dataset:
    """Draw n distinct sweep rows (inputs v_gs, v_ds; target i_d), shuffled."""
    table = iv_sweep(spec)
    if n < 1:
        raise ValueError("need at least one sample")
    if n > table.shape[0]:
        raise ValueError(
            f"requested {n} rows but the sweep table has only {table.shape[0]}"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    picked = table[rng.permutation(table.shape[0])[:n]]
    return Dataset(picked[:, :2], picked[:, 2:3], provenance="mosfet-sweep")


def write_sweep_csv(table: np.ndarray, path: str | Path) -> None:
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[1] != 3:
        raise ValueError("sweep table must be (n, 3)")
    lines = [SWEEP_HEADER]
    for row in table:
        lines.append(",".join(f"{v:.12g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_sweep_csv(path: str | Path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or lines[0] != SWEEP_HEADER:
        raise ValueError(f"{path} is not a sweep CSV")
    return np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
