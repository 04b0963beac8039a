"""Closed-form two-variable benchmark surfaces used as data-generating oracles.

Each function is pure, finite on its domain, and vectorizes over numpy
arrays. Domains are part of the registry entry and drive sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import pipeline
from .pipeline import Dataset, SamplingPlan

__all__ = [
    "GeneralFunctionParams",
    "BenchFunction",
    "eval_general",
    "eval_bohachevsky1",
    "eval_bohachevsky2",
    "eval_beale",
    "eval_booth",
    "eval_easom_variant",
    "eval_hump",
    "make_general",
    "get_function",
    "function_names",
    "domain_samples",
]


@dataclass(frozen=True)
class GeneralFunctionParams:
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coefficient {name} must be finite")


def eval_general(p: GeneralFunctionParams, x, y):
    """Quadratic form a*x^2 + 2*b*x*y + c*y^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return p.a * x**2 + 2.0 * p.b * x * y + p.c * y**2


def eval_bohachevsky1(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (
        x1**2
        + 2.0 * x2**2
        - 0.3 * np.cos(3.0 * np.pi * x1)
        - 0.4 * np.cos(4.0 * np.pi * x2)
        + 0.7
    )


def eval_bohachevsky2(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (
        x1**2
        + 2.0 * x2**2
        - 0.3 * np.cos(3.0 * np.pi * x1) * np.cos(4.0 * np.pi * x2)
        + 0.3
    )


def eval_beale(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (
        (1.5 - x1 + x1 * x2) ** 2
        + (2.25 - x1 + x1 * x2**2) ** 2
        + (2.625 - x1 + x1 * x2**3) ** 2
    )


def eval_booth(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (x1 + 2.0 * x2 - 7.0) ** 2 + (2.0 * x1 + x2 - 5.0) ** 2


def eval_easom_variant(x1, x2):
    """Oscillatory bowl x1^2 + x2^2 - cos(18 x1) - cos(18 x2) on [-1, 1]^2."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return x1**2 + x2**2 - np.cos(18.0 * x1) - np.cos(18.0 * x2)


def eval_hump(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (
        4.0 * x1**2
        - 2.1 * x1**4
        + 0.33 * x1**6
        + x1 * x2
        - 4.0 * x2**2
        + 4.0 * x2**4
    )


@dataclass(frozen=True)
class BenchFunction:
    """Named two-input surface with its sampling domain."""

    name: str
    domain: tuple[tuple[float, float], tuple[float, float]]
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]

    arity = 2

    def evaluate(self, x1, x2):
        return self.fn(x1, x2)


def make_general(
    a: float = 1.0,
    b: float = 1.0,
    c: float = 1.0,
    domain: tuple[tuple[float, float], tuple[float, float]] = ((1.0, 5.0), (1.0, 5.0)),
) -> BenchFunction:
    """General quadratic-form target; defaults keep it positive on its domain.

    The default box [1, 5]^2 keeps target values well away from zero so the
    relative-error metric stays defined on random test sets.
    """
    p = GeneralFunctionParams(a, b, c)
    return BenchFunction("general", domain, lambda x1, x2: eval_general(p, x1, x2))


_REGISTRY: dict[str, BenchFunction] = {
    f.name: f
    for f in (
        make_general(),
        BenchFunction("bohachevsky1", ((-50.0, 100.0), (-50.0, 100.0)), eval_bohachevsky1),
        BenchFunction("bohachevsky2", ((-50.0, 100.0), (-50.0, 100.0)), eval_bohachevsky2),
        BenchFunction("beale", ((-4.5, 4.5), (-4.5, 4.5)), eval_beale),
        BenchFunction("booth", ((-4.5, 4.5), (-4.5, 4.5)), eval_booth),
        BenchFunction("easom", ((-1.0, 1.0), (-1.0, 1.0)), eval_easom_variant),
        BenchFunction("hump", ((-5.0, 5.0), (-5.0, 5.0)), eval_hump),
    )
}


def function_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def get_function(name: str) -> BenchFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown function {name!r}; choose from {', '.join(_REGISTRY)}"
        ) from None


def domain_samples(f: BenchFunction, plan: SamplingPlan) -> Dataset:
    """Sample the function's domain per the plan and evaluate it pointwise."""
    points = pipeline.generate(plan, f.domain)
    values = f.evaluate(points[:, 0], points[:, 1])
    return Dataset(points, np.asarray(values, dtype=float)[:, np.newaxis], provenance=f.name)
