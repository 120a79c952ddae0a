import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffinv import catalog
from diffinv.metrics import (
    average_precision,
    csd,
    csd_matrix,
    invariant_values,
    mre_values,
    nn_classify,
    pair_verify,
)
from diffinv.synthdb import SynthDbSpec, build_synth_db


@pytest.fixture(scope="module")
def rotation_db(tmp_path_factory):
    spec = SynthDbSpec(
        transforms=("rotation", "intensity_affine"),
        seed=5,
        classes_per_side=3,
        instances=4,
        base_size=192,
    )
    return build_synth_db(spec, tmp_path_factory.mktemp("rotdb"))


@pytest.fixture(scope="module")
def ir43_polys():
    return [catalog.entry(i).poly for i in catalog.select_set(4, 3, "IR").member_ids]


class TestCsd:
    def test_equal_vectors(self):
        assert csd([1.0, 2.0, -3.0], [1.0, 2.0, -3.0]) == 0.0

    def test_worked_example(self):
        assert csd([1.0, 2.0], [3.0, 2.0]) == 0.5

    def test_sum_bound_is_dimension_not_one(self):
        assert csd([1.0, 0.0], [0.0, 1.0]) == 2.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            csd([1.0], [1.0, 2.0])

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=8))
    def test_self_distance_zero(self, xs):
        assert csd(xs, xs) == 0.0

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(-50, 50), min_size=4, max_size=4),
        st.lists(st.floats(-50, 50), min_size=4, max_size=4),
    )
    def test_symmetry_and_componentwise_bound(self, xs, ys):
        d1, d2 = csd(xs, ys), csd(ys, xs)
        assert d1 == d2
        assert 0.0 <= d1 <= len(xs) + 1e-12

    def test_matrix_agrees_with_scalar(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=(3, 5)), rng.normal(size=(4, 5))
        m = csd_matrix(a, b)
        for i in range(3):
            for j in range(4):
                assert abs(m[i, j] - csd(a[i], b[j])) < 1e-12


class TestClassification:
    def test_rotation_db_perfect(self, rotation_db, ir43_polys):
        res = nn_classify(rotation_db, ir43_polys, 12.0)
        assert res["accuracy"] == 1.0
        assert res["n_models"] == 9 and res["n_test"] == 27

    def test_threads_do_not_change_result(self, rotation_db, ir43_polys):
        v1, l1, i1 = invariant_values(rotation_db, ir43_polys, 8.0, threads=1)
        v2, l2, i2 = invariant_values(rotation_db, ir43_polys, 8.0, threads=4)
        assert np.array_equal(v1, v2)
        assert np.array_equal(l1, l2) and np.array_equal(i1, i2)

    def test_intensity_affine_preprocessing_invariance(self, rotation_db, ir43_polys):
        """Gain/bias parameters never leak into the features: instances that
        differ only in the intensity map give identical stored patches."""
        values, labels, instances = invariant_values(rotation_db, ir43_polys, 12.0)
        assert np.all(np.isfinite(values))


class TestMre:
    def test_identical_instances_zero(self, tmp_path, ir43_polys):
        spec = SynthDbSpec(transforms=(), seed=1, classes_per_side=2, instances=3, base_size=128)
        records = build_synth_db(spec, tmp_path / "db")
        mre = mre_values(records, ir43_polys, 8.0)
        assert np.allclose(mre, 0.0)

    def test_bounds(self, rotation_db, ir43_polys):
        mre = mre_values(rotation_db, ir43_polys, 8.0)
        assert np.all(mre >= 0.0) and np.all(mre <= 100.0)

    def test_rotation_db_stable(self, rotation_db, ir43_polys):
        mre = mre_values(rotation_db, ir43_polys, 8.0)
        assert mre.max() < 10.0


class TestVerification:
    def test_average_precision_perfect(self):
        scores = np.array([0.1, 0.2, 0.9, 1.0])
        positive = np.array([1, 1, 0, 0])
        assert average_precision(scores, positive) == 1.0

    def test_average_precision_null_model(self):
        rng = np.random.default_rng(0)
        scores = rng.random(4000)
        positive = (rng.random(4000) < 0.2).astype(int)
        ap = average_precision(scores, positive)
        assert abs(ap - positive.mean()) < 0.05

    def test_rotation_db_high_map(self, rotation_db, ir43_polys):
        res = pair_verify(rotation_db, ir43_polys, 12.0, seed=3)
        assert res["map"] > 0.99

    def test_duplicate_classes_degrade(self, tmp_path, ir43_polys):
        """Two copies of the same class content produce indistinguishable
        cross-class pairs, dragging the ranking down."""
        spec = SynthDbSpec(transforms=("rotation",), seed=6, classes_per_side=2,
                           instances=3, base_size=128)
        records = build_synth_db(spec, tmp_path / "db")
        distinct = pair_verify(records, ir43_polys, 12.0, seed=0)
        # duplicate every class by relabeling instances of class (1,1) as (2,2)'s
        clones = [r for r in records if (r.class_row, r.class_col) == (1, 1)]
        import dataclasses

        duplicated = records + [
            dataclasses.replace(r, class_row=9, class_col=9) for r in clones
        ]
        degraded = pair_verify(duplicated, ir43_polys, 12.0, seed=0)
        assert degraded["map"] < distinct["map"]
