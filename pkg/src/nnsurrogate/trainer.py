"""Batch Levenberg-Marquardt training and sample-by-sample gradient descent.

The LM step solves the damped normal equations
(J'J + mu*I) delta = -J'r over the stacked residual r = prediction - target
and the batch Jacobian J of network outputs wrt all parameters. One step is
taken per epoch; mu shrinks on accepted steps and grows on rejected ones.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.linalg

from .mlp import Network, flatten_params, forward_batch, jacobian_batch, unflatten_params
from .pipeline import Dataset

__all__ = [
    "LMConfig",
    "SGDConfig",
    "EpochRecord",
    "TrainHistory",
    "STOP_REASONS",
    "mse",
    "lm_step",
    "train_lm",
    "train_sgd_online",
    "write_history_csv",
    "read_history_csv",
]

STOP_REASONS = (
    "goal-met",
    "max-epochs",
    "damping-overflow",
    "gradient-vanished",
    "validation-early-stop",
    "non-finite-loss",
)

HISTORY_HEADER = "epoch,train_mse,val_mse,mu"


@dataclass(frozen=True)
class LMConfig:
    mu0: float = 1e-3
    mu_inc: float = 10.0
    mu_dec: float = 10.0
    mu_max: float = 1e10
    max_epochs: int = 1000
    mse_goal: float = 1e-8
    min_grad: float = 1e-10
    patience: int = 6  # consecutive validation failures before early stop

    def __post_init__(self):
        if not self.mu0 > 0:
            raise ValueError("mu0 must be positive")
        if not (self.mu_inc > 1 and self.mu_dec > 1):
            raise ValueError("mu factors must exceed 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass(frozen=True)
class SGDConfig:
    learning_rate: float
    max_epochs: int = 100
    mse_goal: float = 0.0
    seed: int = 0  # shuffles the per-epoch visiting order

    def __post_init__(self):
        # 0 is allowed as a degenerate no-op rate
        if self.learning_rate < 0:
            raise ValueError("learning_rate cannot be negative")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_mse: float
    val_mse: Optional[float] = None
    mu: Optional[float] = None        # damping used this epoch (LM only)
    accepted: Optional[bool] = None   # LM step outcome (not exported to CSV)


@dataclass(frozen=True)
class TrainHistory:
    records: tuple[EpochRecord, ...]
    stop_reason: str
    wall_clock_seconds: float

    def __post_init__(self):
        if self.stop_reason not in STOP_REASONS:
            raise ValueError(f"unknown stop reason {self.stop_reason!r}")
        epochs = [r.epoch for r in self.records]
        if any(a >= b for a, b in zip(epochs, epochs[1:])):
            raise ValueError("epoch indices must be strictly increasing")
        object.__setattr__(self, "records", tuple(self.records))


def _training_matrices(net: Network, inputs, targets) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(inputs, dtype=float)
    t = np.asarray(targets, dtype=float)
    if t.ndim == 1:
        t = t[:, np.newaxis]
    if x.ndim != 2 or t.ndim != 2:
        raise ValueError("inputs and targets must be 2-d matrices")
    if x.shape[0] != t.shape[0]:
        raise ValueError(f"row mismatch: {x.shape[0]} inputs vs {t.shape[0]} targets")
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    if x.shape[1] != net.n_inputs or t.shape[1] != net.n_outputs:
        raise ValueError(
            f"data is {x.shape[1]}->{t.shape[1]}, network is "
            f"{net.n_inputs}->{net.n_outputs}"
        )
    return x, t


def mse(net: Network, inputs, targets) -> float:
    """Mean squared residual over all samples and output components."""
    x, t = _training_matrices(net, inputs, targets)
    r = forward_batch(net, x) - t
    with np.errstate(over="ignore"):  # overflow to inf is the divergence signal
        return float(np.mean(r * r))


def _residual_jacobian(net: Network, x: np.ndarray, t: np.ndarray):
    r = (forward_batch(net, x) - t).ravel()
    j = jacobian_batch(net, x).reshape(r.size, net.parameter_count)
    return r, j


def _damped_step(r: np.ndarray, j: np.ndarray, mu: float) -> Optional[np.ndarray]:
    """Solve (J'J + mu*I) delta = -J'r via Cholesky; None if it fails."""
    a = j.T @ j
    a[np.diag_indices_from(a)] += mu
    g = j.T @ r
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(lower)):
        return None
    y = scipy.linalg.solve_triangular(lower, g, lower=True, check_finite=False)
    return -scipy.linalg.solve_triangular(lower.T, y, lower=False, check_finite=False)


def _try_step(net, x, t, cost, r, j, mu, mu_inc, mu_dec):
    """One damped step attempt; returns (net, cost, accepted, new_mu)."""
    delta = _damped_step(r, j, mu)
    if delta is not None:
        candidate = unflatten_params(net, flatten_params(net) + delta)
        cand_cost = mse(candidate, x, t)
        if np.isfinite(cand_cost) and cand_cost <= cost:
            return candidate, cand_cost, True, mu / mu_dec
    return net, cost, False, mu * mu_inc


def lm_step(
    net: Network,
    inputs,
    targets,
    mu: float,
    mu_inc: float = 10.0,
    mu_dec: float = 10.0,
):
    """Single damped Gauss-Newton step.

    Returns (network, cost, accepted, new_mu): the candidate network and its
    cost when the step lowered the cost, otherwise the unchanged network,
    with mu divided/multiplied accordingly. A failed factorization counts
    as a rejected step.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    x, t = _training_matrices(net, inputs, targets)
    r, j = _residual_jacobian(net, x, t)
    cost = float(np.mean(r * r))
    if not np.isfinite(cost):
        raise ValueError("training cost is not finite")
    return _try_step(net, x, t, cost, r, j, mu, mu_inc, mu_dec)


def train_lm(
    net: Network,
    train: Dataset,
    validation: Optional[Dataset] = None,
    cfg: LMConfig = LMConfig(),
) -> tuple[Network, TrainHistory]:
    """Batch Levenberg-Marquardt loop with one step attempt per epoch.

    Returns the best network seen (by validation MSE when a validation set
    is given, else by training MSE) and the full per-epoch history.
    """
    t0 = time.perf_counter()
    x, t = _training_matrices(net, train.inputs, train.targets)
    has_val = validation is not None
    if has_val:
        xv, tv = _training_matrices(net, validation.inputs, validation.targets)

    current = net
    cost = mse(current, x, t)
    val_cost = mse(current, xv, tv) if has_val else None
    best_net = current
    best_metric = val_cost if has_val else cost
    mu = cfg.mu0
    fails = 0
    records: list[EpochRecord] = []
    stop = None

    if not np.isfinite(cost):
        stop = "non-finite-loss"
    elif cost <= cfg.mse_goal:
        stop = "goal-met"

    cached = None  # (r, J) at the current parameters
    epoch = 0
    while stop is None and epoch < cfg.max_epochs:
        epoch += 1
        if cached is None:
            cached = _residual_jacobian(current, x, t)
        r, j = cached
        gradient = 2.0 * (j.T @ r) / r.size
        if np.max(np.abs(gradient)) < cfg.min_grad:
            stop = "gradient-vanished"
            break

        mu_used = mu
        current, cost, accepted, mu = _try_step(
            current, x, t, cost, r, j, mu, cfg.mu_inc, cfg.mu_dec
        )
        if accepted:
            cached = None
            if has_val:
                val_cost = mse(current, xv, tv)

        records.append(EpochRecord(epoch, cost, val_cost, mu_used, accepted))

        metric = val_cost if has_val else cost
        if metric < best_metric:
            best_metric = metric
            best_net = current
            fails = 0
        elif has_val:
            fails += 1

        if not np.isfinite(cost):
            stop = "non-finite-loss"
        elif cost <= cfg.mse_goal:
            stop = "goal-met"
        elif mu > cfg.mu_max:
            stop = "damping-overflow"
        elif has_val and fails >= cfg.patience:
            stop = "validation-early-stop"
    if stop is None:
        stop = "max-epochs"

    seconds = round(time.perf_counter() - t0, 3)
    return best_net, TrainHistory(tuple(records), stop, seconds)


def train_sgd_online(
    net: Network,
    train: Dataset,
    cfg: SGDConfig,
) -> tuple[Network, TrainHistory]:
    """Per-sample gradient descent: one step per sample, shuffled each epoch.

    Each step descends the half squared error of a single sample:
    theta += learning_rate * J_s' (target - prediction).
    """
    t0 = time.perf_counter()
    x, t = _training_matrices(net, train.inputs, train.targets)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    current = net
    records: list[EpochRecord] = []
    stop = None
    epoch = 0
    while stop is None and epoch < cfg.max_epochs:
        epoch += 1
        params = flatten_params(current)
        for i in rng.permutation(x.shape[0]):
            sample_net = unflatten_params(current, params)
            xi = x[i : i + 1]
            error = t[i] - forward_batch(sample_net, xi)[0]
            j = jacobian_batch(sample_net, xi)[0]
            params = params + cfg.learning_rate * (j.T @ error)
        current = unflatten_params(current, params)
        cost = mse(current, x, t)
        records.append(EpochRecord(epoch, cost))
        if not np.isfinite(cost):
            stop = "non-finite-loss"
        elif cost <= cfg.mse_goal:
            stop = "goal-met"
    if stop is None:
        stop = "max-epochs"

    seconds = round(time.perf_counter() - t0, 3)
    return current, TrainHistory(tuple(records), stop, seconds)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_history_csv(history: TrainHistory, path: str | Path) -> None:
    """CSV with one row per epoch and a footer comment for stop/time."""
    lines = [HISTORY_HEADER]
    for rec in history.records:
        val = _fmt(rec.val_mse) if rec.val_mse is not None else ""
        mu = _fmt(rec.mu) if rec.mu is not None else ""
        lines.append(f"{rec.epoch},{_fmt(rec.train_mse)},{val},{mu}")
    lines.append(
        f"# stop_reason={history.stop_reason} seconds={history.wall_clock_seconds:.3f}"
    )
    Path(path).write_text("\n".join(lines) + "\n")


def read_history_csv(path: str | Path) -> TrainHistory:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or lines[0] != HISTORY_HEADER:
        raise ValueError(f"{path} is not a history CSV")
    records = []
    stop_reason = None
    seconds = 0.0
    for ln in lines[1:]:
        if ln.startswith("#"):
            for field in ln.lstrip("# ").split():
                key, _, value = field.partition("=")
                if key == "stop_reason":
                    stop_reason = value
                elif key == "seconds":
                    seconds = float(value)
            continue
        epoch, train, val, mu = ln.split(",")
        records.append(
            EpochRecord(
                int(epoch),
                float(train),
                float(val) if val else None,
                float(mu) if mu else None,
            )
        )
    if stop_reason is None:
        raise ValueError(f"{path} is missing the stop-reason footer")
    return TrainHistory(tuple(records), stop_reason, seconds)
