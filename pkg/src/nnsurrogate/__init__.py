"""Neural surrogate modeling of closed-form functions and a MOSFET device model.

Feed-forward networks trained with batch Levenberg-Marquardt (or online
gradient descent) on data sampled from benchmark surfaces or an analytic
square-law device; evaluation uses a relative-percent-error metric on
descaled predictions.
"""

import os as _os

# The linear algebra here is all small dense matrices (<= a few hundred
# square); multithreaded BLAS is measurably slower on them. Respect any
# explicit user setting. Only effective if numpy is not yet imported.
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    _os.environ.setdefault(_var, "1")
del _os, _var

from .benchfn import BenchFunction, domain_samples, get_function, function_names
from .device import BiasPoint, MosfetParams, SweepSpec, circuit_dataset, drain_current, iv_sweep
from .experiment import (
    BenchSource,
    DeviceSource,
    ExperimentConfig,
    RunResult,
    StageError,
    run_experiment,
    run_suite,
)
from .metrics import ErrorReport, evaluate_surrogate, relative_percent_error
from .mlp import (
    Activation,
    FanInScaledInit,
    LayerSpec,
    Network,
    UniformInit,
    forward,
    forward_batch,
    init_network,
    jacobian,
    layer_specs_from_sizes,
    load_network,
    save_network,
)
from .pipeline import (
    Dataset,
    MinMaxScale,
    RandomUniformPlan,
    ScaleParams,
    SplitDataset,
    StarPlan,
    UniformGridPlan,
    apply_scale,
    fit_scale,
    generate,
    invert_scale,
    shuffle_paired,
    split,
)
from .trainer import LMConfig, SGDConfig, TrainHistory, lm_step, mse, train_lm, train_sgd_online

__version__ = "0.1.0"
