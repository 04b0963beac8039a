"""Shared test helpers: single-threaded BLAS and a finite-difference oracle."""

import os

# Must happen before numpy's first import: the suite works on small dense
# matrices where threaded BLAS only adds overhead (and noise to timings).
for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

import numpy as np
import pytest

from nnsurrogate import mlp


def fd_jacobian(net, x, h=1e-6):
    """Central-difference Jacobian of outputs wrt all parameters."""
    p0 = mlp.flatten_params(net)
    out = np.empty((net.n_outputs, p0.size))
    for j in range(p0.size):
        plus, minus = p0.copy(), p0.copy()
        plus[j] += h
        minus[j] -= h
        out[:, j] = (
            mlp.forward(mlp.unflatten_params(net, plus), x)
            - mlp.forward(mlp.unflatten_params(net, minus), x)
        ) / (2.0 * h)
    return out


def jacobian_deviation(analytic, numeric):
    """Max elementwise deviation, relative with a unit absolute floor."""
    return float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(numeric))))


def random_network(rng, max_hidden_layers=3, max_width=16):
    """Random small net with weights in [-1, 1], linear output."""
    depth = rng.integers(1, max_hidden_layers + 1)
    sizes = [int(rng.integers(1, 5))]
    sizes += [int(rng.integers(1, max_width + 1)) for _ in range(depth)]
    sizes.append(int(rng.integers(1, 4)))
    hidden = mlp.Activation.TANH if rng.random() < 0.5 else mlp.Activation.LOGISTIC
    specs = mlp.layer_specs_from_sizes(sizes, hidden=hidden)
    return mlp.init_network(specs, mlp.UniformInit(-1.0, 1.0, seed=int(rng.integers(2**32))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
