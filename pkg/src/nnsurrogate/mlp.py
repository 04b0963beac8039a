"""Dense feed-forward networks with analytic parameter Jacobians.

Parameters are flattened layer-major, weights (row-major) before biases,
so layer k contributes ``W_k.ravel()`` followed by ``b_k``. Every routine
that maps between a network and a flat parameter vector uses this order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Activation",
    "LayerSpec",
    "Network",
    "UniformInit",
    "FanInScaledInit",
    "InitStrategy",
    "layer_specs_from_sizes",
    "init_network",
    "forward",
    "forward_batch",
    "jacobian",
    "jacobian_batch",
    "flatten_params",
    "unflatten_params",
    "network_to_text",
    "network_from_text",
    "save_network",
    "load_network",
]

NETWORK_FORMAT_VERSION = 1


class Activation(enum.Enum):
    """Layer excitation function, with a closed-form derivative."""

    TANH = "tanh"
    LOGISTIC = "logistic"
    LINEAR = "linear"

    def apply(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self is Activation.TANH:
            return np.tanh(z)
        if self is Activation.LOGISTIC:
            # tanh form avoids exp overflow for large negative inputs
            return 0.5 * (1.0 + np.tanh(0.5 * z))
        return z

    def derivative_from_output(self, a: np.ndarray) -> np.ndarray:
        """Derivative wrt the pre-activation, expressed via the output value."""
        a = np.asarray(a, dtype=float)
        if self is Activation.TANH:
            return 1.0 - a * a
        if self is Activation.LOGISTIC:
            return a * (1.0 - a)
        return np.ones_like(a)


@dataclass(frozen=True)
class LayerSpec:
    fan_in: int
    fan_out: int
    activation: Activation

    def __post_init__(self):
        if self.fan_in < 1 or self.fan_out < 1:
            raise ValueError(
                f"layer dimensions must be >= 1, got {self.fan_in}x{self.fan_out}"
            )


def _validate_specs(specs: Sequence[LayerSpec]) -> tuple[LayerSpec, ...]:
    specs = tuple(specs)
    if not specs:
        raise ValueError("a network needs at least one layer")
    for k in range(len(specs) - 1):
        if specs[k].fan_out != specs[k + 1].fan_in:
            raise ValueError(
                f"layer {k} fan_out {specs[k].fan_out} does not match "
                f"layer {k + 1} fan_in {specs[k + 1].fan_in}"
            )
    return specs


def layer_specs_from_sizes(
    sizes: Sequence[int],
    hidden: Activation = Activation.TANH,
    output: Activation = Activation.LINEAR,
) -> tuple[LayerSpec, ...]:
    """Build layer specs from a size chain like (2, 10, 10, 1)."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 2:
        raise ValueError("need at least an input and an output size")
    specs = []
    for k in range(len(sizes) - 1):
        act = output if k == len(sizes) - 2 else hidden
        specs.append(LayerSpec(sizes[k], sizes[k + 1], act))
    return tuple(specs)


def _frozen_array(a, shape) -> np.ndarray:
    out = np.array(a, dtype=float)
    if out.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {out.shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Network:
    """Immutable MLP: per-layer dense weights (fan_out x fan_in) and biases."""

    layers: tuple[LayerSpec, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self):
        specs = _validate_specs(self.layers)
        if len(self.weights) != len(specs) or len(self.biases) != len(specs):
            raise ValueError("need one weight matrix and one bias vector per layer")
        ws = tuple(
            _frozen_array(w, (s.fan_out, s.fan_in))
            for w, s in zip(self.weights, specs)
        )
        bs = tuple(
            _frozen_array(b, (s.fan_out,)) for b, s in zip(self.biases, specs)
        )
        object.__setattr__(self, "layers", specs)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)

    @property
    def n_inputs(self) -> int:
        return self.layers[0].fan_in

    @property
    def n_outputs(self) -> int:
        return self.layers[-1].fan_out

    @property
    def parameter_count(self) -> int:
        return sum(s.fan_out * (s.fan_in + 1) for s in self.layers)


@dataclass(frozen=True)
class UniformInit:
    """Draw every weight and bias uniformly from [lo, hi]."""

    lo: float = -0.5
    hi: float = 0.5
    seed: int = 0

    def __post_init__(self):
        # lo == hi is allowed as a degenerate constant draw
        if self.lo > self.hi:
            raise ValueError(f"lo {self.lo} must not exceed hi {self.hi}")

    def bounds(self, fan_in: int) -> tuple[float, float]:
        return self.lo, self.hi


@dataclass(frozen=True)
class FanInScaledInit:
    """Draw from [-c/sqrt(fan_in), +c/sqrt(fan_in)] per layer."""

    c: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")

    def bounds(self, fan_in: int) -> tuple[float, float]:
        half = self.c / np.sqrt(fan_in)
        return -half, half


InitStrategy = Union[UniformInit, FanInScaledInit]


def init_network(specs: Sequence[LayerSpec], strategy: InitStrategy) -> Network:
    """Initialize weights and biases per strategy, deterministically in the seed.

    Draw order is fixed: layer 0 weights (row-major), layer 0 biases,
    layer 1 weights, ... using a PCG64 stream.
    """
    specs = _validate_specs(specs)
    rng = np.random.Generator(np.random.PCG64(strategy.seed))
    ws, bs = [], []
    for spec in specs:
        lo, hi = strategy.bounds(spec.fan_in)
        ws.append(rng.uniform(lo, hi, size=(spec.fan_out, spec.fan_in)))
        bs.append(rng.uniform(lo, hi, size=spec.fan_out))
    return Network(specs, tuple(ws), tuple(bs))


def forward_batch(net: Network, inputs: np.ndarray) -> np.ndarray:
    """Row-wise forward pass over a (n, fan_in) matrix of samples."""
    x = np.asarray(inputs, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d sample matrix, got shape {x.shape}")
    if x.shape[1] != net.n_inputs:
        raise ValueError(
            f"input has {x.shape[1]} columns, network expects {net.n_inputs}"
        )
    a = x
    for spec, w, b in zip(net.layers, net.weights, net.biases):
        a = spec.activation.apply(a @ w.T + b)
    return a


def forward(net: Network, input: np.ndarray) -> np.ndarray:
    """Evaluate the network on a single input vector."""
    x = np.asarray(input, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d input vector, got shape {x.shape}")
    return forward_batch(net, x[np.newaxis, :])[0]


def _forward_activations(net: Network, x: np.ndarray) -> list[np.ndarray]:
    acts = [x]
    for spec, w, b in zip(net.layers, net.weights, net.biases):
        acts.append(spec.activation.apply(acts[-1] @ w.T + b))
    return acts


def jacobian_batch(net: Network, inputs: np.ndarray) -> np.ndarray:
    """Per-sample Jacobian of outputs wrt all parameters.

    Returns an (n, n_outputs, parameter_count) array; the last axis follows
    the module-level flattening order.
    """
    x = np.asarray(inputs, dtype=float)
    if x.ndim != 2 or x.shape[1] != net.n_inputs:
        raise ValueError(
            f"expected (n, {net.n_inputs}) sample matrix, got shape {x.shape}"
        )
    acts = _forward_activations(net, x)
    n = x.shape[0]
    m = net.n_outputs
    n_layers = len(net.layers)

    # g holds d(outputs)/d(pre-activation of layer k), shape (n, m, fan_out_k)
    g = np.zeros((n, m, m))
    idx = np.arange(m)
    g[:, idx, idx] = net.layers[-1].activation.derivative_from_output(acts[-1])

    w_blocks: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    b_blocks: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    for k in range(n_layers - 1, -1, -1):
        a_prev = acts[k]
        w_blocks[k] = (g[:, :, :, np.newaxis] * a_prev[:, np.newaxis, np.newaxis, :]).reshape(n, m, -1)
        b_blocks[k] = g
        if k > 0:
            deriv = net.layers[k - 1].activation.derivative_from_output(acts[k])
            g = (g @ net.weights[k]) * deriv[:, np.newaxis, :]

    blocks = []
    for k in range(n_layers):
        blocks.append(w_blocks[k])
        blocks.append(b_blocks[k])
    return np.concatenate(blocks, axis=2)


def jacobian(net: Network, input: np.ndarray) -> np.ndarray:
    """Jacobian (n_outputs x parameter_count) for a single input vector."""
    x = np.asarray(input, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d input vector, got shape {x.shape}")
    return jacobian_batch(net, x[np.newaxis, :])[0]


def flatten_params(net: Network) -> np.ndarray:
    parts = []
    for w, b in zip(net.weights, net.biases):
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def unflatten_params(net: Network, params: np.ndarray) -> Network:
    """Rebuild a network with the same topology from a flat parameter vector."""
    params = np.asarray(params, dtype=float)
    if params.shape != (net.parameter_count,):
        raise ValueError(
            f"expected {net.parameter_count} parameters, got shape {params.shape}"
        )
    ws, bs = [], []
    pos = 0
    for spec in net.layers:
        n_w = spec.fan_out * spec.fan_in
        ws.append(params[pos : pos + n_w].reshape(spec.fan_out, spec.fan_in))
        pos += n_w
        bs.append(params[pos : pos + spec.fan_out])
        pos += spec.fan_out
    return Network(net.layers, tuple(ws), tuple(bs))


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def network_to_text(net: Network) -> str:
    """Serialize to the versioned text format (exact float round-trip)."""
    lines = [f"nnsurrogate-network {NETWORK_FORMAT_VERSION}", f"layers {len(net.layers)}"]
    for spec in net.layers:
        lines.append(f"layer {spec.fan_in} {spec.fan_out} {spec.activation.value}")
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        lines.append(f"weights {k}")
        for row in w:
            lines.append(" ".join(_fmt(v) for v in row))
        lines.append(f"biases {k}")
        lines.append(" ".join(_fmt(v) for v in b))
    return "\n".join(lines) + "\n"


def network_from_text(text: str) -> Network:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ValueError("truncated network file")
        line = lines[pos]
        pos += 1
        return line

    magic = take().split()
    if len(magic) != 2 or magic[0] != "nnsurrogate-network":
        raise ValueError("not a network file (bad header)")
    if int(magic[1]) != NETWORK_FORMAT_VERSION:
        raise ValueError(f"unsupported network format version {magic[1]}")
    head = take().split()
    if head[0] != "layers":
        raise ValueError("expected layer count")
    n_layers = int(head[1])
    specs = []
    for _ in range(n_layers):
        fields = take().split()
        if fields[0] != "layer":
            raise ValueError("expected a layer line")
        specs.append(LayerSpec(int(fields[1]), int(fields[2]), Activation(fields[3])))
    ws, bs = [], []
    for k, spec in enumerate(specs):
        if take() != f"weights {k}":
            raise ValueError(f"expected 'weights {k}' block")
        rows = [[float(v) for v in take().split()] for _ in range(spec.fan_out)]
        ws.append(np.array(rows))
        if take() != f"biases {k}":
            raise ValueError(f"expected 'biases {k}' block")
        bs.append(np.array([float(v) for v in take().split()]))
    return Network(tuple(specs), tuple(ws), tuple(bs))


def save_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(network_to_text(net))


def load_network(path: str | Path) -> Network:
    return network_from_text(Path(path).read_text())
