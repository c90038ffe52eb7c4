import numpy as np
import pytest

from mtfs.dataset import (
    BadValueError,
    Dataset,
    DatasetError,
    EmptyFileError,
    MalformedRowError,
    SingleClassError,
    generate_synthetic,
    load_csv,
    minmax_scale_fit_apply,
    stratified_folds,
)
from mtfs.relevance import discretize_matrix, su_profile


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_basic_parse(self, tmp_path):
        path = write_csv(tmp_path, "1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n7.0,8.0,b\n")
        ds = load_csv(path)
        assert ds.n_samples == 4
        assert ds.n_features == 2
        assert ds.n_classes == 2
        # first-appearance order: a -> 0, b -> 1
        assert ds.labels.tolist() == [0, 1, 0, 1]
        assert ds.class_names == ("a", "b")

    def test_header_detected(self, tmp_path):
        path = write_csv(tmp_path, "f1,f2,target\n1,2,x\n3,4,y\n5,6,x\n7,8,y\n")
        ds = load_csv(path)
        assert ds.n_samples == 4
        assert ds.feature_names == ("f1", "f2")

    def test_label_col_by_name(self, tmp_path):
        path = write_csv(tmp_path, "y,f1\nx,1\nz,2\nx,3\nz,4\n")
        ds = load_csv(path, label_column="y")
        assert ds.n_features == 1
        assert ds.labels.tolist() == [0, 1, 0, 1]

    def test_label_col_by_index(self, tmp_path):
        path = write_csv(tmp_path, "0,1.5\n1,2.5\n0,3.5\n1,4.5\n")
        ds = load_csv(path, label_column=0)
        assert ds.n_features == 1
        assert np.allclose(ds.features[:, 0], [1.5, 2.5, 3.5, 4.5])

    def test_missing_cell_reports_row(self, tmp_path):
        path = write_csv(tmp_path, "1,2,a\n3,b\n5,6,a\n7,8,b\n")
        with pytest.raises(MalformedRowError) as err:
            load_csv(path)
        assert err.value.row == 1

    def test_unparseable_cell_reports_position(self, tmp_path):
        path = write_csv(tmp_path, "1,2,a\n3,oops,b\n5,6,a\n7,8,b\n")
        with pytest.raises(BadValueError) as err:
            load_csv(path)
        assert (err.value.row, err.value.column) == (1, 1)

    def test_non_finite_rejected(self, tmp_path):
        path = write_csv(tmp_path, "1,2,a\n3,nan,b\n5,6,a\n7,8,b\n")
        with pytest.raises(BadValueError):
            load_csv(path)

    def test_single_class(self, tmp_path):
        path = write_csv(tmp_path, "1,2,a\n3,4,a\n")
        with pytest.raises(SingleClassError):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        path = write_csv(tmp_path, "")
        with pytest.raises(EmptyFileError):
            load_csv(path)

    def test_too_few_samples_per_class(self, tmp_path):
        path = write_csv(tmp_path, "1,2,a\n3,4,b\n5,6,c\n")
        with pytest.raises(DatasetError):
            load_csv(path)


class TestStratifiedFolds:
    def test_balanced_exact_split(self):
        ds = Dataset(np.zeros((10, 1)), np.tile([0, 1], 5), 2)
        plan = stratified_folds(ds, 5, seed=0)
        for f in range(5):
            idx = plan.test_indices(f)
            assert len(idx) == 2
            assert sorted(ds.labels[idx]) == [0, 1]

    def test_deterministic(self):
        ds = Dataset(np.zeros((23, 1)), np.arange(23) % 3, 3)
        a = stratified_folds(ds, 4, seed=7)
        b = stratified_folds(ds, 4, seed=7)
        assert np.array_equal(a.fold_assignment, b.fold_assignment)

    def test_unbalanced_proportional(self):
        # 9 of class 0 plus 3 of class 1 over 3 folds: 3 + 1 in each
        labels = np.array([0] * 9 + [1] * 3)
        ds = Dataset(np.zeros((12, 1)), labels, 2)
        plan = stratified_folds(ds, 3, seed=11)
        for f in range(3):
            fold_labels = ds.labels[plan.test_indices(f)]
            assert (fold_labels == 0).sum() == 3
            assert (fold_labels == 1).sum() == 1

    def test_every_sample_exactly_once(self):
        ds = Dataset(np.zeros((17, 1)), np.arange(17) % 4, 4)
        plan = stratified_folds(ds, 5, seed=3)
        assert np.all(plan.fold_assignment >= 0)
        assert len(np.concatenate([plan.test_indices(f) for f in range(5)])) == 17

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("k", [2, 3, 5, 7])
    def test_stratification_bound(self, k, seed):
        rng = np.random.default_rng(seed)
        n_classes = int(rng.integers(2, 5))
        labels = rng.integers(0, n_classes, size=40)
        labels[:n_classes] = np.arange(n_classes)  # every class occurs
        ds = Dataset(np.zeros((40, 1)), labels, n_classes)
        plan = stratified_folds(ds, k, seed=seed)
        for c in range(n_classes):
            share = (labels == c).sum() / k
            for f in range(k):
                count = (ds.labels[plan.test_indices(f)] == c).sum()
                assert abs(count - share) <= 1

    def test_k_exceeding_samples(self):
        ds = Dataset(np.zeros((4, 1)), np.array([0, 1, 0, 1]), 2)
        with pytest.raises(ValueError):
            stratified_folds(ds, 5, seed=0)


class TestMinMaxScaling:
    def test_affine_map(self):
        train = np.array([[2.0], [4.0], [6.0]])
        scaled, _, _ = minmax_scale_fit_apply(train)
        assert np.allclose(scaled[:, 0], [0.0, 0.5, 1.0])

    def test_constant_column(self):
        train = np.array([[7.0], [7.0]])
        scaled, (test,), _ = minmax_scale_fit_apply(train, [np.array([[9.0]])])
        assert np.all(scaled == 0.0)
        assert test[0, 0] == 0.0

    def test_extrapolation_clamped(self):
        train = np.array([[0.0], [1.0]])
        _, (test,), _ = minmax_scale_fit_apply(train, [np.array([[100.0], [-100.0]])])
        assert test[0, 0] == 1.5
        assert test[1, 0] == -0.5

    def test_idempotent_on_scaled(self):
        rng = np.random.default_rng(0)
        train = rng.random((20, 6))
        once, _, _ = minmax_scale_fit_apply(train)
        twice, _, _ = minmax_scale_fit_apply(once)
        assert np.allclose(once, twice, atol=1e-12)


class TestGenerateSynthetic:
    def test_shapes_and_indices(self):
        ds, informative = generate_synthetic(200, 1000, 10, 3, 2.0, seed=5)
        assert ds.features.shape == (200, 1000)
        assert ds.n_classes == 3
        assert informative.shape == (10,)
        assert np.all(np.diff(informative) > 0)

    def test_bit_reproducible(self):
        a, ia = generate_synthetic(50, 30, 5, 2, 1.0, seed=9)
        b, ib = generate_synthetic(50, 30, 5, 2, 1.0, seed=9)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(ia, ib)

    def test_zero_shift_carries_no_signal(self):
        # with class_shift = 0 the planted columns are distributed exactly
        # like the noise columns, so their SU against the label matches
        diffs = []
        for seed in range(20):
            ds, informative = generate_synthetic(150, 60, 10, 3, 0.0, seed=seed)
            codes, _ = discretize_matrix(ds.features, 10)
            su = su_profile(codes, ds.labels, 10, ds.n_classes)
            noise = np.setdiff1d(np.arange(60), informative)
            diffs.append(su[informative].mean() - su[noise].mean())
        assert abs(float(np.mean(diffs))) < 0.02

    def test_no_informative_means_chance_accuracy(self):
        from mtfs import kernels

        accs = []
        for seed in range(10):
            ds, _ = generate_synthetic(120, 20, 0, 2, 2.0, seed=seed)
            half = 60
            pred = kernels.knn_predict(
                ds.features[:half], ds.labels[:half], ds.features[half:], 5, 2
            )
            accs.append(float((pred == ds.labels[half:]).mean()))
        assert abs(float(np.mean(accs)) - 0.5) < 0.12

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            generate_synthetic(50, 10, 11, 2, 1.0, seed=0)
        with pytest.raises(ValueError):
            generate_synthetic(50, 10, 2, 2, -1.0, seed=0)
        with pytest.raises(ValueError):
            generate_synthetic(3, 10, 2, 2, 1.0, seed=0)
