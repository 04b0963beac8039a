import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nnsurrogate import pipeline
from nnsurrogate.pipeline import (
    Dataset,
    MinMaxScale,
    NonuniformGridPlan,
    RandomUniformPlan,
    StarPlan,
    UniformGridPlan,
    apply_scale,
    fit_scale,
    generate,
    invert_scale,
    read_dataset_csv,
    read_scale_json,
    shuffle_paired,
    split,
    write_dataset_csv,
    write_scale_json,
)

BOX = ((-1.0, 1.0), (0.0, 2.0))


def pair_multiset(ds):
    return sorted(map(tuple, np.column_stack([ds.inputs, ds.targets]).tolist()))


class TestGenerate:
    def test_uniform_grid_includes_corners(self):
        pts = generate(UniformGridPlan(3), BOX)
        assert pts.shape == (9, 2)
        corners = {(-1.0, 0.0), (-1.0, 2.0), (1.0, 0.0), (1.0, 2.0)}
        assert corners <= set(map(tuple, pts.tolist()))

    def test_nonuniform_grid_is_knot_product(self):
        plan = NonuniformGridPlan(((-1.0, 0.5), (0.0, 0.25, 2.0)))
        pts = generate(plan, BOX)
        assert pts.shape == (6, 2)
        assert (0.5, 0.25) in set(map(tuple, pts.tolist()))

    def test_random_uniform_stays_in_domain(self):
        pts = generate(RandomUniformPlan(500, seed=4), BOX)
        assert pts.shape == (500, 2)
        for (lo, hi), col in zip(BOX, pts.T):
            assert np.all((col >= lo) & (col <= hi))

    def test_random_uniform_deterministic(self):
        a = generate(RandomUniformPlan(50, seed=9), BOX)
        b = generate(RandomUniformPlan(50, seed=9), BOX)
        assert np.array_equal(a, b)

    def test_star_count(self):
        pts = generate(StarPlan(center=(0.0, 1.0), points_per_axis=5), BOX)
        assert pts.shape == (2 * 5 + 1, 2)
        assert tuple(pts[0]) == (0.0, 1.0)
        # axis sweeps hold the other coordinate at center
        assert np.all(pts[1:6, 1] == 1.0)
        assert np.all(pts[6:, 0] == 0.0)

    def test_zero_count_plan_rejected(self):
        with pytest.raises(ValueError):
            RandomUniformPlan(0)

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            generate(NonuniformGridPlan(((0.0, 1.0),)), BOX)
        with pytest.raises(ValueError):
            generate(StarPlan(center=(0.0,), points_per_axis=3), BOX)

    def test_star_center_outside_domain(self):
        with pytest.raises(ValueError):
            generate(StarPlan(center=(5.0, 1.0), points_per_axis=3), BOX)

    def test_knots_outside_domain(self):
        with pytest.raises(ValueError):
            generate(NonuniformGridPlan(((-3.0, 0.0), (0.0, 1.0))), BOX)

    def test_decreasing_knots_rejected(self):
        with pytest.raises(ValueError):
            NonuniformGridPlan(((1.0, 0.0), (0.0, 1.0)))

    def test_empty_domain_rejected(self):
        with pytest.raises(ValueError):
            generate(UniformGridPlan(3), ())
        with pytest.raises(ValueError):
            generate(UniformGridPlan(3), ((1.0, 1.0),))


class TestDataset:
    def test_row_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((3, 2)), np.zeros((4, 1)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((0, 2)), np.zeros((0, 1)))

    def test_1d_targets_promoted(self):
        ds = Dataset(np.zeros((3, 2)), np.arange(3.0))
        assert ds.targets.shape == (3, 1)

    def test_arrays_are_readonly(self):
        ds = Dataset(np.zeros((3, 2)), np.zeros((3, 1)))
        with pytest.raises(ValueError):
            ds.inputs[0, 0] = 1.0


class TestShuffle:
    def test_single_row_identity(self):
        ds = Dataset(np.array([[1.0, 2.0]]), np.array([[3.0]]))
        shuffled, perm = shuffle_paired(ds, seed=0)
        assert np.array_equal(perm, [0])
        assert np.array_equal(shuffled.inputs, ds.inputs)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(1, 40))
    def test_pair_multiset_invariant(self, seed, n):
        rng = np.random.default_rng(seed)
        ds = Dataset(rng.normal(size=(n, 2)), rng.normal(size=(n, 1)))
        shuffled, perm = shuffle_paired(ds, seed)
        assert pair_multiset(shuffled) == pair_multiset(ds)
        assert np.array_equal(shuffled.inputs, ds.inputs[perm])
        assert np.array_equal(shuffled.targets, ds.targets[perm])

    def test_same_seed_same_permutation(self, rng):
        ds = Dataset(rng.normal(size=(20, 2)), rng.normal(size=(20, 1)))
        _, p1 = shuffle_paired(ds, seed=77)
        _, p2 = shuffle_paired(ds, seed=77)
        assert np.array_equal(p1, p2)


class TestSplit:
    def test_protocol_400_100(self, rng):
        ds = Dataset(rng.normal(size=(500, 2)), rng.normal(size=(500, 1)))
        parts = split(ds, 0.8, 0.0)
        assert parts.train.n == 400
        assert parts.validation is None
        assert parts.test.n == 100

    def test_8_1_1(self, rng):
        ds = Dataset(rng.normal(size=(10, 2)), rng.normal(size=(10, 1)))
        parts = split(ds, 0.8, 0.1)
        assert (parts.train.n, parts.validation.n, parts.test.n) == (8, 1, 1)

    def test_single_row_rejected(self):
        ds = Dataset(np.zeros((1, 2)), np.zeros((1, 1)))
        with pytest.raises(ValueError):
            split(ds, 0.8, 0.0)

    def test_full_train_fraction_rejected(self, rng):
        ds = Dataset(rng.normal(size=(10, 2)), rng.normal(size=(10, 1)))
        with pytest.raises(ValueError):
            split(ds, 1.0, 0.0)

    def test_fractions_over_one_rejected(self, rng):
        ds = Dataset(rng.normal(size=(10, 2)), rng.normal(size=(10, 1)))
        with pytest.raises(ValueError):
            split(ds, 0.8, 0.3)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(4, 60))
    def test_exact_partition(self, seed, n):
        rng = np.random.default_rng(seed)
        ds = Dataset(rng.normal(size=(n, 2)), rng.normal(size=(n, 1)))
        parts = split(ds, 0.6, 0.2)
        sizes = parts.train.n + (parts.validation.n if parts.validation else 0) + parts.test.n
        assert sizes == n
        joined = [parts.train, *( [parts.validation] if parts.validation else [] ), parts.test]
        combined = sorted(
            pair
            for part in joined
            for pair in map(tuple, np.column_stack([part.inputs, part.targets]).tolist())
        )
        assert combined == pair_multiset(ds)

    def test_permutation_recorded(self, rng):
        ds = Dataset(rng.normal(size=(10, 2)), rng.normal(size=(10, 1)))
        shuffled, perm = shuffle_paired(ds, seed=3)
        parts = split(shuffled, 0.8, 0.0, permutation=perm)
        assert np.array_equal(parts.permutation, perm)


class TestScaling:
    def test_fit_min_max(self):
        ds = Dataset(np.array([[1.0], [3.0], [5.0]]), np.array([[0.0], [1.0], [2.0]]))
        sp = fit_scale(ds)
        assert sp.inputs.mins[0] == 1.0 and sp.inputs.maxs[0] == 5.0

    def test_endpoints_map_exactly(self):
        scale = MinMaxScale(np.array([1.0]), np.array([5.0]))
        out = apply_scale(scale, np.array([[1.0], [5.0], [3.0]]))
        assert out[0, 0] == -1.0
        assert out[1, 0] == 1.0
        assert out[2, 0] == 0.0  # midpoint -> 0

    def test_known_value(self):
        scale = MinMaxScale(np.array([0.0]), np.array([10.0]))
        assert apply_scale(scale, np.array([[2.5]]))[0, 0] == -0.5

    def test_extrapolation_is_total(self):
        scale = MinMaxScale(np.array([0.0]), np.array([1.0]))
        out = apply_scale(scale, np.array([[2.0], [-1.0]]))
        assert out[0, 0] == 3.0 and out[1, 0] == -3.0

    def test_constant_feature_rejected_by_default(self):
        ds = Dataset(np.array([[1.0, 2.0], [1.0, 3.0]]), np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError, match="constant"):
            fit_scale(ds)

    def test_constant_feature_bypass_maps_to_zero(self):
        ds = Dataset(np.array([[1.0, 2.0], [1.0, 3.0]]), np.array([[0.0], [1.0]]))
        sp = fit_scale(ds, allow_constant=True)
        scaled = apply_scale(sp.inputs, ds.inputs)
        assert np.all(scaled[:, 0] == 0.0)
        back = invert_scale(sp.inputs, scaled)
        assert np.all(back[:, 0] == 1.0)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        rows = rng.uniform(-100, 100, size=(rng.integers(2, 30), 3))
        scale = MinMaxScale(rows.min(axis=0), rows.max(axis=0))
        back = invert_scale(scale, apply_scale(scale, rows))
        assert np.allclose(back, rows, rtol=1e-12, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_train_rows_stay_inside_interval(self, seed):
        rng = np.random.default_rng(seed)
        rows = rng.uniform(-50, 50, size=(rng.integers(2, 30), 2))
        scale = MinMaxScale(rows.min(axis=0), rows.max(axis=0))
        scaled = apply_scale(scale, rows)
        assert np.all(scaled >= -1.0) and np.all(scaled <= 1.0)

    def test_feature_count_mismatch(self):
        scale = MinMaxScale(np.array([0.0]), np.array([1.0]))
        with pytest.raises(ValueError):
            apply_scale(scale, np.zeros((2, 2)))


class TestCsv:
    def test_dataset_round_trip_exact(self, tmp_path, rng):
        ds = Dataset(rng.normal(size=(7, 2)), rng.normal(size=(7, 1)), provenance="unit")
        path = tmp_path / "data.csv"
        sidecar = write_dataset_csv(ds, path, metadata={"seed": 5})
        assert sidecar.exists()
        back = read_dataset_csv(path)
        assert np.array_equal(back.inputs, ds.inputs)
        assert np.array_equal(back.targets, ds.targets)
        assert back.provenance == "unit"

    def test_scale_json_round_trip(self, tmp_path, rng):
        rows_x = rng.uniform(-3, 4, (10, 2))
        rows_y = rng.uniform(0, 9, (10, 1))
        sp = fit_scale(Dataset(rows_x, rows_y))
        path = tmp_path / "scale.json"
        write_scale_json(sp, path)
        back = read_scale_json(path)
        assert np.array_equal(back.inputs.mins, sp.inputs.mins)
        assert np.array_equal(back.targets.maxs, sp.targets.maxs)
        assert back.inputs.lo == -1.0 and back.inputs.hi == 1.0
