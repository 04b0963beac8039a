"""Data generation plans, paired shuffling/splitting, and min-max scaling.

Scaling is always fitted on the training part only; the affine map is total,
so rows outside the training range land outside the target interval.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "UniformGridPlan",
    "NonuniformGridPlan",
    "RandomUniformPlan",
    "StarPlan",
    "SamplingPlan",
    "Dataset",
    "SplitDataset",
    "MinMaxScale",
    "ScaleParams",
    "generate",
    "shuffle_paired",
    "split",
    "fit_scale",
    "apply_scale",
    "invert_scale",
    "write_dataset_csv",
    "read_dataset_csv",
    "write_scale_json",
    "read_scale_json",
]

Domain = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class UniformGridPlan:
    """Cartesian product of equally spaced points, `points_per_axis` per axis."""

    points_per_axis: int

    def __post_init__(self):
        if self.points_per_axis < 1:
            raise ValueError("points_per_axis must be >= 1")


@dataclass(frozen=True)
class NonuniformGridPlan:
    """Cartesian product of explicit, strictly increasing per-axis knots."""

    knots: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        knots = tuple(tuple(float(k) for k in axis) for axis in self.knots)
        for axis in knots:
            if len(axis) < 1:
                raise ValueError("each axis needs at least one knot")
            if any(a >= b for a, b in zip(axis, axis[1:])):
                raise ValueError("knots must be strictly increasing")
        object.__setattr__(self, "knots", knots)


@dataclass(frozen=True)
class RandomUniformPlan:
    """`count` i.i.d. uniform draws over the domain box."""

    count: int
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")


@dataclass(frozen=True)
class StarPlan:
    """Center point plus per-axis sweeps holding the other axes at center."""

    center: tuple[float, ...]
    points_per_axis: int

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.points_per_axis < 1:
            raise ValueError("points_per_axis must be >= 1")


SamplingPlan = Union[UniformGridPlan, NonuniformGridPlan, RandomUniformPlan, StarPlan]


def _validate_domain(domain: Domain) -> tuple[tuple[float, float], ...]:
    dom = tuple((float(lo), float(hi)) for lo, hi in domain)
    if not dom:
        raise ValueError("domain must have at least one axis")
    for lo, hi in dom:
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise ValueError(f"bad axis interval [{lo}, {hi}]")
    return dom


def _cartesian(axes: list[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in grids])


def generate(plan: SamplingPlan, domain: Domain) -> np.ndarray:
    """Produce an (n, d) point matrix for the plan over the domain box."""
    dom = _validate_domain(domain)
    d = len(dom)
    if isinstance(plan, UniformGridPlan):
        axes = [np.linspace(lo, hi, plan.points_per_axis) for lo, hi in dom]
        return _cartesian(axes)
    if isinstance(plan, NonuniformGridPlan):
        if len(plan.knots) != d:
            raise ValueError(
                f"plan has {len(plan.knots)} knot axes, domain has {d}"
            )
        axes = []
        for axis_knots, (lo, hi) in zip(plan.knots, dom):
            arr = np.asarray(axis_knots, dtype=float)
            if arr.min() < lo or arr.max() > hi:
                raise ValueError("knots fall outside the domain")
            axes.append(arr)
        return _cartesian(axes)
    if isinstance(plan, RandomUniformPlan):
        rng = np.random.Generator(np.random.PCG64(plan.seed))
        cols = [rng.uniform(lo, hi, size=plan.count) for lo, hi in dom]
        return np.column_stack(cols)
    if isinstance(plan, StarPlan):
        if len(plan.center) != d:
            raise ValueError(
                f"star center has {len(plan.center)} coordinates, domain has {d}"
            )
        for c, (lo, hi) in zip(plan.center, dom):
            if c < lo or c > hi:
                raise ValueError("star center lies outside the domain")
        rows = [np.asarray(plan.center, dtype=float)]
        for axis, (lo, hi) in enumerate(dom):
            sweep = np.linspace(lo, hi, plan.points_per_axis)
            block = np.tile(np.asarray(plan.center, dtype=float), (len(sweep), 1))
            block[:, axis] = sweep
            rows.append(block)
        return np.vstack([rows[0][np.newaxis, :]] + rows[1:])
    raise TypeError(f"unknown sampling plan {type(plan).__name__}")


def _as_matrix(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, np.newaxis]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Dataset:
    """Paired input/target samples; rows stay aligned through the pipeline."""

    inputs: np.ndarray
    targets: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        x = _as_matrix(self.inputs, "inputs").copy()
        y = _as_matrix(self.targets, "targets").copy()
        if x.shape[0] != y.shape[0]:
            raise ValueError(
                f"inputs have {x.shape[0]} rows, targets {y.shape[0]}"
            )
        if x.shape[0] < 1:
            raise ValueError("a dataset needs at least one sample")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "targets", y)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_targets(self) -> int:
        return self.targets.shape[1]


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    validation: Optional[Dataset]
    test: Dataset
    permutation: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=int).copy()
        perm.setflags(write=False)
        object.__setattr__(self, "permutation", perm)


def shuffle_paired(ds: Dataset, seed: int) -> tuple[Dataset, np.ndarray]:
    """Apply one random permutation to inputs and targets alike."""
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(ds.n)
    shuffled = Dataset(ds.inputs[perm], ds.targets[perm], ds.provenance)
    return shuffled, perm


def split(
    ds: Dataset,
    train_fraction: float,
    validation_fraction: float = 0.0,
    permutation: Optional[np.ndarray] = None,
) -> SplitDataset:
    """Contiguous train/validation/test partition of an already shuffled dataset.

    Train and validation counts are floored; the remainder goes to test.
    """
    if train_fraction < 0 or validation_fraction < 0:
        raise ValueError("fractions must be non-negative")
    if train_fraction + validation_fraction > 1.0:
        raise ValueError("train + validation fractions exceed 1")
    n = ds.n
    n_train = math.floor(n * train_fraction)
    n_val = math.floor(n * validation_fraction)
    n_test = n - n_train - n_val
    if n_train < 1 or n_test < 1:
        raise ValueError(
            f"split {n_train}/{n_val}/{n_test} of {n} rows leaves an empty part"
        )

    def part(lo: int, hi: int) -> Dataset:
        return Dataset(ds.inputs[lo:hi], ds.targets[lo:hi], ds.provenance)

    validation = part(n_train, n_train + n_val) if n_val else None
    perm = np.arange(n) if permutation is None else np.asarray(permutation, dtype=int)
    if perm.shape != (n,):
        raise ValueError("permutation length does not match dataset size")
    return SplitDataset(
        train=part(0, n_train),
        validation=validation,
        test=part(n_train + n_val, n),
        permutation=perm,
    )


@dataclass(frozen=True)
class MinMaxScale:
    """Per-feature affine map [min, max] -> [lo, hi] for one matrix."""

    mins: np.ndarray
    maxs: np.ndarray
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=float).copy()
        maxs = np.asarray(self.maxs, dtype=float).copy()
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("mins and maxs must be matching 1-d arrays")
        if np.any(mins > maxs):
            raise ValueError("every feature min must be <= its max")
        if not self.lo < self.hi:
            raise ValueError("target interval must be non-empty")
        mins.setflags(write=False)
        maxs.setflags(write=False)
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def n_features(self) -> int:
        return self.mins.shape[0]


@dataclass(frozen=True)
class ScaleParams:
    """Min-max maps for the input and target sides, fitted on training data."""

    inputs: MinMaxScale
    targets: MinMaxScale


def _fit_minmax(rows: np.ndarray, side: str, allow_constant: bool) -> MinMaxScale:
    mins = rows.min(axis=0)
    maxs = rows.max(axis=0)
    constant = np.flatnonzero(mins == maxs)
    if constant.size and not allow_constant:
        raise ValueError(
            f"constant {side} feature(s) {constant.tolist()} cannot be min-max "
            "scaled; pass allow_constant=True to map them to the interval midpoint"
        )
    return MinMaxScale(mins, maxs)


def fit_scale(train: Dataset, allow_constant: bool = False) -> ScaleParams:
    """Fit per-feature min/max on the training rows only."""
    return ScaleParams(
        inputs=_fit_minmax(train.inputs, "input", allow_constant),
        targets=_fit_minmax(train.targets, "target", allow_constant),
    )


def _check_features(scale: MinMaxScale, rows: np.ndarray) -> np.ndarray:
    arr = _as_matrix(rows, "rows")
    if arr.shape[1] != scale.n_features:
        raise ValueError(
            f"rows have {arr.shape[1]} features, scale was fitted on {scale.n_features}"
        )
    return arr


def apply_scale(scale: MinMaxScale, rows: np.ndarray) -> np.ndarray:
    """Map rows feature-wise into [lo, hi]; constant features go to the midpoint."""
    arr = _check_features(scale, rows)
    span = scale.maxs - scale.mins
    safe = np.where(span > 0, span, 1.0)
    out = (arr - scale.mins) / safe * (scale.hi - scale.lo) + scale.lo
    mid = 0.5 * (scale.lo + scale.hi)
    return np.where(span > 0, out, mid)


def invert_scale(scale: MinMaxScale, rows: np.ndarray) -> np.ndarray:
    """Inverse of apply_scale; constant features recover their fitted value."""
    arr = _check_features(scale, rows)
    span = scale.maxs - scale.mins
    out = (arr - scale.lo) / (scale.hi - scale.lo) * span + scale.mins
    return np.where(span > 0, out, scale.mins)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_dataset_csv(ds: Dataset, path: str | Path, metadata: Optional[dict] = None) -> Path:
    """Write `x1..xd,y1..ym` rows plus a JSON sidecar with plan/provenance info.

    The sidecar lands next to the CSV as `<stem>.meta.json`.
    """
    path = Path(path)
    header = [f"x{i + 1}" for i in range(ds.n_inputs)] + [
        f"y{j + 1}" for j in range(ds.n_targets)
    ]
    lines = [",".join(header)]
    for xi, yi in zip(ds.inputs, ds.targets):
        lines.append(",".join(_fmt(v) for v in (*xi, *yi)))
    path.write_text("\n".join(lines) + "\n")
    meta = {"provenance": ds.provenance}
    if metadata:
        meta.update(metadata)
    sidecar = path.with_suffix(".meta.json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return sidecar


def read_dataset_csv(path: str | Path) -> Dataset:
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path} is empty")
    header = lines[0].split(",")
    d = sum(1 for h in header if h.startswith("x"))
    m = sum(1 for h in header if h.startswith("y"))
    if d + m != len(header) or d < 1 or m < 1:
        raise ValueError(f"{path} has an unrecognized header {header!r}")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    provenance = ""
    sidecar = path.with_suffix(".meta.json")
    if sidecar.exists():
        provenance = json.loads(sidecar.read_text()).get("provenance", "")
    return Dataset(rows[:, :d], rows[:, d:], provenance)


def write_scale_json(sp: ScaleParams, path: str | Path) -> None:
    payload = {
        side: {
            "mins": scale.mins.tolist(),
            "maxs": scale.maxs.tolist(),
            "lo": scale.lo,
            "hi": scale.hi,
        }
        for side, scale in (("inputs", sp.inputs), ("targets", sp.targets))
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_scale_json(path: str | Path) -> ScaleParams:
    payload = json.loads(Path(path).read_text())

    def side(name: str) -> MinMaxScale:
        block = payload[name]
        return MinMaxScale(
            np.asarray(block["mins"], dtype=float),
            np.asarray(block["maxs"], dtype=float),
            lo=float(block["lo"]),
            hi=float(block["hi"]),
        )

    return ScaleParams(inputs=side("inputs"), targets=side("targets"))
