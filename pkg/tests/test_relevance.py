import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtfs.dataset import Dataset, generate_synthetic
from mtfs.relevance import (
    discretize_equal_frequency,
    relevance_threshold,
    remove_irrelevant,
    su_profile,
    symmetric_uncertainty,
)


class TestDiscretize:
    def test_median_split(self):
        codes, _ = discretize_equal_frequency([1, 2, 3, 4], 2)
        assert codes.tolist() == [0, 0, 1, 1]

    def test_constant_column(self):
        codes, _ = discretize_equal_frequency([5, 5, 5, 5], 3)
        assert codes.tolist() == [0, 0, 0, 0]

    def test_tied_values_go_to_lower_bin(self):
        # quantile edges of [1,5,5,5,9,9] at 1/3 and 2/3 are 5 and 6.33...;
        # ties at an edge stay below it
        codes, _ = discretize_equal_frequency([5, 5, 5, 1, 9, 9], 3)
        assert codes.tolist() == [0, 0, 0, 0, 2, 2]

    def test_codes_in_range(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            v = rng.random(rng.integers(2, 60))
            codes, _ = discretize_equal_frequency(v, 10)
            assert codes.min() >= 0
            assert codes.max() <= 9


class TestSymmetricUncertainty:
    def test_identical_columns(self):
        assert symmetric_uncertainty([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0

    def test_independent_columns(self):
        assert symmetric_uncertainty([0, 1, 0, 1], [0, 0, 1, 1]) == 0.0

    def test_partial_dependence(self):
        # H(X)=1, H(Y)=0.8113, I=0.3113 -> SU = 0.3437
        su = symmetric_uncertainty([0, 0, 1, 1], [0, 1, 1, 1])
        assert su == pytest.approx(0.3437, abs=1e-4)

    def test_constant_against_anything(self):
        assert symmetric_uncertainty([0, 0, 0], [0, 1, 2]) == 0.0
        assert symmetric_uncertainty([0, 0, 0], [0, 0, 0]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            symmetric_uncertainty([0, 1], [0, 1, 2])

    @given(st.lists(st.integers(0, 5), min_size=2, max_size=40))
    def test_self_su_is_one_for_nonconstant(self, xs):
        x = np.array(xs)
        if np.unique(x).size < 2:
            assert symmetric_uncertainty(x, x) == 0.0
        else:
            assert symmetric_uncertainty(x, x) == 1.0

    @given(
        st.lists(st.integers(0, 4), min_size=3, max_size=30),
        st.permutations(list(range(5))),
    )
    @settings(max_examples=60)
    def test_invariant_under_relabeling(self, xs, perm):
        x = np.array(xs)
        y = (x + 1) % 3  # arbitrary dependent column
        relabeled = np.array(perm)[x]
        assert symmetric_uncertainty(x, y) == pytest.approx(
            symmetric_uncertainty(relabeled, y), abs=1e-12
        )

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = rng.integers(0, 4, 30)
            y = rng.integers(0, 3, 30)
            assert symmetric_uncertainty(x, y) == pytest.approx(
                symmetric_uncertainty(y, x), abs=1e-12
            )

    def test_profile_matches_scalar(self):
        rng = np.random.default_rng(2)
        codes = rng.integers(0, 5, (40, 8))
        target = rng.integers(0, 3, 40)
        profile = su_profile(codes, target, 5, 3)
        for j in range(8):
            assert profile[j] == pytest.approx(
                symmetric_uncertainty(codes[:, j], target), abs=1e-12
            )


class TestRemoveIrrelevant:
    def test_threshold_hand_example(self):
        # D=100: rank floor(100/ln 100) = 21; threshold is the smaller of
        # 0.2 * 0.5 and the rank-21 value 0.3
        su = np.linspace(0.5, 0.3, 21).tolist() + [0.01] * 79
        rho0 = relevance_threshold(np.array(su), 0.2, "e")
        assert rho0 == pytest.approx(0.1, abs=1e-12)

    def test_all_equal_su_keeps_everything(self):
        # identical SU everywhere: threshold is 0.2 * s, strictly below s
        x = np.tile(np.array([[0.0], [1.0], [0.0], [1.0]]), (1, 5))
        ds = Dataset(x, np.array([0, 1, 0, 1]), 2)
        mask, scores = remove_irrelevant(ds)
        assert np.all(scores.su_with_class == scores.su_with_class[0])
        assert scores.su_with_class[0] > 0
        assert mask.kept_indices.tolist() == [0, 1, 2, 3, 4]

    def test_planted_features_survive(self):
        survived_all = 0
        for seed in range(20):
            ds, informative = generate_synthetic(150, 300, 10, 3, 2.0, seed=seed)
            mask, _ = remove_irrelevant(ds)
            if np.isin(informative, mask.kept_indices).all():
                survived_all += 1
        assert survived_all >= 19

    def test_deterministic(self):
        ds, _ = generate_synthetic(80, 100, 5, 2, 1.5, seed=4)
        a, _ = remove_irrelevant(ds)
        b, _ = remove_irrelevant(ds)
        assert np.array_equal(a.kept_indices, b.kept_indices)
        assert a.threshold_used == b.threshold_used

    def test_at_least_two_kept(self):
        # one strong feature, the rest constant: the rule alone would keep 1
        rng = np.random.default_rng(0)
        labels = np.arange(40) % 2
        x = np.zeros((40, 6))
        x[:, 2] = labels + 0.01 * rng.random(40)
        ds = Dataset(x, labels, 2)
        mask, _ = remove_irrelevant(ds)
        assert mask.kept_indices.size >= 2
        assert 2 in mask.kept_indices

    def test_kept_indices_strictly_increasing(self):
        ds, _ = generate_synthetic(60, 80, 6, 2, 1.0, seed=8)
        mask, scores = remove_irrelevant(ds)
        assert np.all(np.diff(mask.kept_indices) > 0)
        assert np.all(scores.su_with_class[mask.kept_indices] > mask.threshold_used)
