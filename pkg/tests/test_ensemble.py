import numpy as np
import pytest

from merchcast.ensemble import (
    EnsembleWeights,
    WeightedEnsembleModel,
    combine,
    ensemble_from_doc,
    ensemble_to_doc,
    search_weights,
    we_predict,
)
from merchcast.errors import InvalidStepError, InvalidWeightsError, LengthMismatchError
from merchcast.learners import GbtParams, fit_gbt_exact, fit_gbt_hist, fit_lasso, fit_linear


class TestWeights:
    def test_simplex_validation(self):
        EnsembleWeights(0.5, 0.25, 0.25)
        with pytest.raises(InvalidWeightsError):
            EnsembleWeights(0.5, 0.5, 0.5)
        with pytest.raises(InvalidWeightsError):
            EnsembleWeights(-0.1, 0.6, 0.5)

    def test_tolerates_float_noise(self):
        EnsembleWeights(1 / 3, 1 / 3, 1 - 2 / 3)


class TestCombine:
    def test_convexity_identity(self):
        v = np.array([1.0, 7.0, 25.0])
        w = EnsembleWeights(0.2, 0.3, 0.5)
        assert np.allclose(combine(v, v, v, w), v, atol=1e-12)

    def test_corner_recovers_component(self):
        a, b, c = np.array([1.0, 2.0]), np.array([9.0, 9.0]), np.array([4.0, 4.0])
        assert np.array_equal(combine(a, b, c, EnsembleWeights(1.0, 0.0, 0.0)), a)

    def test_weighted_mean_rounds_up(self):
        from merchcast.evaluation import round_prediction
        out = combine([3.0], [2.0], [2.0], EnsembleWeights(0.5, 0.25, 0.25))
        assert out[0] == pytest.approx(2.5)
        assert round_prediction(out[0]) == 3

    def test_affine_equivariance(self):
        rng = np.random.default_rng(0)
        p, q, r = rng.normal(size=(3, 20))
        w = EnsembleWeights(0.4, 0.35, 0.25)
        c = 3.7
        assert np.allclose(combine(p + c, q + c, r + c, w),
                           combine(p, q, r, w) + c, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            combine([1.0], [1.0, 2.0], [1.0], EnsembleWeights(1.0, 0.0, 0.0))


class TestSearchWeights:
    def test_grid_has_231_points_at_default_step(self):
        rng = np.random.default_rng(1)
        preds = tuple(rng.normal(10, 3, size=40) for _ in range(3))
        scores = rng.integers(0, 26, size=40)
        _, trace = search_weights(preds, scores, step=0.05)
        assert trace.n_grid_points == 231  # C(22, 2) lattice points

    def test_corners_always_evaluated(self):
        rng = np.random.default_rng(2)
        preds = tuple(rng.normal(10, 3, size=30) for _ in range(3))
        scores = rng.integers(0, 26, size=30)
        _, trace = search_weights(preds, scores, step=0.25)
        seen = {w for w, _ in trace.evaluated}
        for corner in [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]:
            assert corner in seen

    def test_perfect_component_reaches_accuracy_one(self):
        rng = np.random.default_rng(3)
        scores = rng.integers(0, 26, size=50)
        perfect = scores.astype(float)
        noise = tuple(rng.normal(12, 5, size=50) for _ in range(2))
        best, trace = search_weights((perfect, *noise), scores, step=0.05)
        assert trace.best[1] == 1.0

    def test_dominates_every_corner(self):
        rng = np.random.default_rng(4)
        scores = rng.integers(0, 26, size=60)
        preds = tuple(scores + rng.normal(0, s, size=60) for s in (1.0, 2.0, 3.0))
        best, trace = search_weights(preds, scores, step=0.05)
        accs = dict(trace.evaluated)
        corner_best = max(accs[(1.0, 0.0, 0.0)], accs[(0.0, 1.0, 0.0)],
                          accs[(0.0, 0.0, 1.0)])
        assert trace.best[1] >= corner_best

    def test_tie_break_lexicographically_smallest(self):
        # identical components: every grid point scores the same
        preds = tuple(np.array([1.0, 2.0, 3.0]) for _ in range(3))
        best, _ = search_weights(preds, np.array([1, 2, 3]), step=0.5)
        assert best.as_tuple() == (0.0, 0.0, 1.0)

    def test_all_weights_on_simplex(self):
        rng = np.random.default_rng(5)
        preds = tuple(rng.normal(10, 4, size=30) for _ in range(3))
        scores = rng.integers(0, 26, size=30)
        _, trace = search_weights(preds, scores, step=0.1, restarts=3, seed=9)
        for w, _ in trace.evaluated:
            assert abs(sum(w) - 1.0) <= 1e-12
            assert all(-1e-12 <= x <= 1 + 1e-12 for x in w)

    def test_restarts_deterministic(self):
        rng = np.random.default_rng(6)
        preds = tuple(rng.normal(8, 4, size=40) for _ in range(3))
        scores = rng.integers(0, 26, size=40)
        a, ta = search_weights(preds, scores, step=0.1, restarts=4, seed=21)
        b, tb = search_weights(preds, scores, step=0.1, restarts=4, seed=21)
        assert a.as_tuple() == b.as_tuple()
        assert ta.evaluated == tb.evaluated

    def test_invalid_step(self):
        with pytest.raises(InvalidStepError):
            search_weights((np.ones(3),) * 3, np.ones(3, dtype=int), step=0.03)


def _fitted_components(seed=0, n=60):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 4))
    y = np.clip(np.round(X @ np.array([2.0, 1.0, 0.0, -1.0]) + 8), 0, 25)
    hist = fit_gbt_hist(X, y, GbtParams(n_trees=15, max_depth=3))
    lasso = fit_lasso(X, y, lam=0.05)
    exact = fit_gbt_exact(X, y, GbtParams(n_trees=15, max_depth=3))
    return X, y, hist, lasso, exact


class TestWeightedEnsembleModel:
    def test_rejects_linear_component(self):
        X, y, hist, lasso, exact = _fitted_components()
        linear = fit_linear(X, y)
        w = EnsembleWeights(0.5, 0.25, 0.25)
        with pytest.raises(InvalidWeightsError):
            WeightedEnsembleModel(linear, lasso, exact, w)
        with pytest.raises(InvalidWeightsError):
            WeightedEnsembleModel(hist, linear, exact, w)

    def test_rejects_swapped_modes(self):
        X, y, hist, lasso, exact = _fitted_components()
        with pytest.raises(InvalidWeightsError):
            WeightedEnsembleModel(exact, lasso, hist, EnsembleWeights(0.5, 0.25, 0.25))

    def test_all_zero_components_blend_to_zero(self):
        from merchcast.evaluation import round_prediction
        out = combine([0.0], [0.0], [0.0], EnsembleWeights(0.4, 0.3, 0.3))
        assert round_prediction(out[0]) == 0

    def test_identical_rows_identical_scores(self):
        X, y, hist, lasso, exact = _fitted_components()
        w = EnsembleWeights(0.4, 0.3, 0.3)
        row = np.tile(X[5], (3, 1))
        scores = we_predict((hist, lasso, exact), row, w)
        assert scores[0] == scores[1] == scores[2]

    def test_majority_weight_pulls_rounding(self):
        from merchcast.evaluation import round_prediction
        out = combine([2.0], [2.0], [3.0], EnsembleWeights(0.25, 0.25, 0.5))
        assert round_prediction(out[0]) == 3

    def test_doc_round_trip_prediction_identical(self):
        X, y, hist, lasso, exact = _fitted_components(seed=3)
        model = WeightedEnsembleModel(hist, lasso, exact,
                                      EnsembleWeights(0.5, 0.3, 0.2))
        clone = ensemble_from_doc(ensemble_to_doc(model))
        assert np.array_equal(model.predict(X), clone.predict(X))
        assert clone.weights.as_tuple() == model.weights.as_tuple()
