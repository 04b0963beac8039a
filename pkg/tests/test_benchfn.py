import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nnsurrogate import benchfn
from nnsurrogate.benchfn import (
    GeneralFunctionParams,
    domain_samples,
    eval_beale,
    eval_bohachevsky1,
    eval_bohachevsky2,
    eval_booth,
    eval_easom_variant,
    eval_general,
    eval_hump,
    function_names,
    get_function,
)
from nnsurrogate.pipeline import RandomUniformPlan, UniformGridPlan

EASOM_1_0 = -0.6603167082440802  # 1 - cos(18) - 1, frozen from math.cos


class TestGeneral:
    def test_pythagorean_form(self):
        p = GeneralFunctionParams(1.0, 0.0, 1.0)
        assert eval_general(p, 2.0, 3.0) == 13.0

    def test_all_ones(self):
        p = GeneralFunctionParams(1.0, 1.0, 1.0)
        assert eval_general(p, 1.0, 1.0) == 4.0

    def test_origin(self):
        p = GeneralFunctionParams(3.0, -2.0, 7.5)
        assert eval_general(p, 0.0, 0.0) == 0.0

    def test_nonfinite_coefficient_rejected(self):
        with pytest.raises(ValueError):
            GeneralFunctionParams(float("nan"), 0.0, 0.0)


POINT_ORACLES = [
    (eval_bohachevsky1, (0.0, 0.0), 0.0),
    (eval_bohachevsky1, (1.0, 0.5), 2.1),
    (eval_bohachevsky1, (-1.0, 0.0), 1.6),
    (eval_bohachevsky2, (0.0, 0.0), 0.0),
    (eval_bohachevsky2, (1.0, 0.0), 1.6),
    (eval_bohachevsky2, (0.0, 0.25), 0.725),
    (eval_beale, (3.0, 0.5), 0.0),
    (eval_beale, (0.0, 0.0), 14.203125),
    (eval_booth, (1.0, 3.0), 0.0),
    (eval_booth, (0.0, 0.0), 74.0),
    (eval_booth, (1.0, 1.0), 20.0),
    (eval_easom_variant, (0.0, 0.0), -2.0),
    (eval_easom_variant, (1.0, 0.0), EASOM_1_0),
    (eval_hump, (0.0, 0.0), 0.0),
    (eval_hump, (1.0, 0.0), 2.23),
    (eval_hump, (0.0, 1.0), 0.0),
]


@pytest.mark.parametrize("fn,point,expected", POINT_ORACLES)
def test_point_oracles(fn, point, expected):
    assert fn(*point) == pytest.approx(expected, abs=1e-12)


def test_beale_is_constant_along_x1_zero(rng):
    x2 = rng.uniform(-4.5, 4.5, 25)
    assert np.allclose(eval_beale(np.zeros(25), x2), 14.203125, atol=1e-12)


coord = st.floats(-50, 100, allow_nan=False)


class TestSymmetry:
    @settings(max_examples=100, deadline=None)
    @given(x=coord, y=coord)
    def test_bohachevsky_even_in_each_argument(self, x, y):
        for fn in (eval_bohachevsky1, eval_bohachevsky2):
            assert fn(x, y) == pytest.approx(fn(-x, y), rel=1e-12, abs=1e-12)
            assert fn(x, y) == pytest.approx(fn(x, -y), rel=1e-12, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(x=st.floats(-1, 1), y=st.floats(-1, 1))
    def test_easom_symmetries(self, x, y):
        f = eval_easom_variant
        assert f(x, y) == pytest.approx(f(y, x), rel=1e-12, abs=1e-12)
        assert f(x, y) == pytest.approx(f(-x, y), rel=1e-12, abs=1e-12)


class TestRegistry:
    def test_names(self):
        assert set(function_names()) == {
            "general", "bohachevsky1", "bohachevsky2", "beale", "booth", "easom", "hump",
        }

    def test_domains_as_stated(self):
        assert get_function("bohachevsky1").domain == ((-50.0, 100.0), (-50.0, 100.0))
        assert get_function("booth").domain == ((-4.5, 4.5), (-4.5, 4.5))
        assert get_function("easom").domain == ((-1.0, 1.0), (-1.0, 1.0))
        assert get_function("hump").domain == ((-5.0, 5.0), (-5.0, 5.0))

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown function"):
            get_function("rosenbrock")

    @pytest.mark.parametrize("name", sorted({"general", "bohachevsky1", "bohachevsky2",
                                             "beale", "booth", "easom", "hump"}))
    def test_finite_on_domain(self, name):
        f = get_function(name)
        rng = np.random.default_rng(99)
        x1 = rng.uniform(*f.domain[0], 2000)
        x2 = rng.uniform(*f.domain[1], 2000)
        values = f.evaluate(x1, x2)
        assert np.all(np.isfinite(values))

    def test_evaluators_are_pure(self):
        f = get_function("hump")
        x1, x2 = np.array([1.0, -2.0]), np.array([0.5, 3.0])
        assert np.array_equal(f.evaluate(x1, x2), f.evaluate(x1, x2))


class TestDomainSamples:
    def test_random_plan(self):
        f = get_function("booth")
        ds = domain_samples(f, RandomUniformPlan(500, seed=12))
        assert ds.n == 500
        assert ds.provenance == "booth"
        for (lo, hi), col in zip(f.domain, ds.inputs.T):
            assert np.all((col >= lo) & (col <= hi))
        assert np.array_equal(
            ds.targets.ravel(), eval_booth(ds.inputs[:, 0], ds.inputs[:, 1])
        )

    def test_grid_plan_includes_corners(self):
        f = get_function("booth")
        ds = domain_samples(f, UniformGridPlan(3))
        assert ds.n == 9
        assert (-4.5, -4.5) in set(map(tuple, ds.inputs.tolist()))
        assert (4.5, 4.5) in set(map(tuple, ds.inputs.tolist()))

    def test_zero_count_plan_rejected(self):
        with pytest.raises(ValueError):
            RandomUniformPlan(0, seed=1)

    def test_plan_arity_mismatch(self):
        from nnsurrogate.pipeline import StarPlan

        f = get_function("booth")
        with pytest.raises(ValueError):
            domain_samples(f, StarPlan(center=(0.0,), points_per_axis=3))
