import numpy as np
import pytest

from mtfs.filtering import FeatureScores, chi_square_scores, knee_point_mask, relieff_scores


def relieff_oracle(x, y, n_classes, n_neighbors):
    """Plain-loop re-derivation of the ReliefF update rule."""
    m, d = x.shape
    counts = np.bincount(y, minlength=n_classes)
    priors = counts / m
    smallest = counts[counts > 0].min()
    k = max(1, min(n_neighbors, smallest - 1)) if smallest > 1 else 1
    w = np.zeros(d)
    for i in range(m):
        dists = [sum(abs(x[i, f] - x[j, f]) for f in range(d)) for j in range(m)]
        for c in range(n_classes):
            if counts[c] == 0:
                continue
            pool = [j for j in range(m) if y[j] == c and j != i]
            pool.sort(key=lambda j: (dists[j], j))
            if c == y[i]:
                if not pool:
                    continue
                for j in pool[:k]:
                    for f in range(d):
                        w[f] -= abs(x[i, f] - x[j, f]) / (m * k)
            else:
                factor = priors[c] / (1.0 - priors[y[i]])
                for j in pool[: min(k, len(pool))]:
                    for f in range(d):
                        w[f] += factor * abs(x[i, f] - x[j, f]) / (m * k)
    return w


class TestRelieff:
    def test_separable_feature_scores_positive(self):
        x = np.array([[0.0], [0.1], [0.9], [1.0]])
        y = np.array([0, 0, 1, 1])
        scores = relieff_scores(x, y, 2, n_neighbors=1)
        assert scores.scores[0] > 0

    def test_constant_feature_scores_zero(self):
        rng = np.random.default_rng(0)
        x = np.column_stack([rng.random(12), np.full(12, 0.5)])
        y = np.arange(12) % 2
        scores = relieff_scores(x, y, 2)
        assert scores.scores[1] == 0.0

    def test_matches_hand_oracle_small(self):
        x = np.array(
            [[0.0, 0.2], [0.1, 0.1], [0.2, 0.9], [0.8, 0.8], [0.9, 0.3], [1.0, 1.0]]
        )
        y = np.array([0, 0, 0, 1, 1, 1])
        scores = relieff_scores(x, y, 2, n_neighbors=2)
        expected = relieff_oracle(x, y, 2, 2)
        assert np.allclose(scores.scores, expected, atol=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_hand_oracle_random(self, seed):
        rng = np.random.default_rng(seed)
        n, d = 14, 3
        x = rng.random((n, d))
        y = rng.integers(0, 3, n)
        y[:3] = [0, 1, 2]
        scores = relieff_scores(x, y, 3, n_neighbors=3)
        expected = relieff_oracle(x, y, 3, 3)
        assert np.allclose(scores.scores, expected, atol=1e-12)

    def test_sample_order_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.random((16, 4))
        y = np.arange(16) % 2
        base = relieff_scores(x, y, 2).scores
        perm = rng.permutation(16)
        shuffled = relieff_scores(x[perm], y[perm], 2).scores
        assert np.allclose(base, shuffled, atol=1e-10)

    def test_singleton_class_skips_hit_term(self):
        x = np.array([[0.0], [0.2], [0.9]])
        y = np.array([0, 0, 1])
        scores = relieff_scores(x, y, 2, n_neighbors=1)
        expected = relieff_oracle(x, y, 2, 1)
        assert np.allclose(scores.scores, expected, atol=1e-12)


class TestChiSquare:
    def test_bins_identical_to_labels(self):
        x = np.array([[0.0], [0.0], [1.0], [1.0]])
        y = np.array([0, 0, 1, 1])
        scores = chi_square_scores(x, y, 2)
        assert scores.scores[0] == pytest.approx(4.0)

    def test_constant_feature(self):
        x = np.full((8, 1), 3.0)
        y = np.arange(8) % 2
        scores = chi_square_scores(x, y, 2)
        assert scores.scores[0] == 0.0

    def test_two_by_two_table(self):
        # contingency [[3,1],[1,3]]: every cell deviates by 1 from expected 2
        x = np.array([0, 0, 0, 1, 0, 1, 1, 1], dtype=float).reshape(-1, 1)
        y = np.array([0, 0, 0, 0, 1, 1, 1, 1])
        scores = chi_square_scores(x, y, 2)
        assert scores.scores[0] == pytest.approx(2.0)

    def test_non_negative(self):
        rng = np.random.default_rng(3)
        x = rng.random((30, 10))
        y = rng.integers(0, 3, 30)
        scores = chi_square_scores(x, y, 3)
        assert np.all(scores.scores >= 0)


def knee_oracle_rank(ranked):
    """Direct point-to-line distance enumeration over (rank, score) points."""
    d = len(ranked)
    x1, y1 = 1.0, float(ranked[0])
    x2, y2 = float(d), float(ranked[-1])
    length = np.hypot(x2 - x1, y2 - y1)
    best_rank, best_dist = 1, -1.0
    for r in range(1, d + 1):
        px, py = float(r), float(ranked[r - 1])
        dist = abs((x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)) / length
        if dist > best_dist + 1e-15:
            best_rank, best_dist = r, dist
    return best_rank


def make_scores(values):
    values = np.asarray(values, dtype=float)
    ranking = np.lexsort((np.arange(values.size), -values))
    return FeatureScores("chi_square", values, ranking)


class TestKneePoint:
    def test_convex_profile(self):
        # distances at ranks 2..4 are about 0.534, 1.261, 0.728
        mask = knee_point_mask(make_scores([10, 9, 2, 1, 0.5]))
        assert mask.dim == 3
        assert mask.selected.tolist() == [True, True, True, False, False]

    def test_collinear_profile(self):
        mask = knee_point_mask(make_scores([5, 4, 3, 2, 1]))
        assert mask.dim == 1
        assert mask.selected.sum() == 1

    def test_all_equal_fallback(self):
        mask = knee_point_mask(make_scores([2.0] * 7))
        assert mask.dim == 4

    def test_matches_oracle_random(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            values = rng.random(int(rng.integers(2, 60)))
            scores = make_scores(values)
            ranked = values[scores.ranking]
            if np.all(ranked == ranked[0]):
                continue
            mask = knee_point_mask(scores)
            assert mask.dim == knee_oracle_rank(ranked)

    def test_affine_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            values = rng.random(20)
            a = float(rng.uniform(0.1, 10.0))
            b = float(rng.uniform(-5.0, 5.0))
            base = knee_point_mask(make_scores(values))
            scaled = knee_point_mask(make_scores(a * values + b))
            assert base.dim == scaled.dim
            assert np.array_equal(base.selected, scaled.selected)

    def test_selected_are_top_ranked(self):
        scores = make_scores([0.2, 5.0, 0.1, 4.0, 3.0])
        mask = knee_point_mask(scores)
        selected_scores = scores.scores[mask.selected]
        dropped = scores.scores[~mask.selected]
        if mask.dim < 5:
            assert selected_scores.min() >= dropped.max()
