"""Convex blending of the three strong learners into one predictor.

The blend is alpha1 * histogram-GBT + alpha2 * LASSO + alpha3 * exact-GBT
with non-negative weights summing to one. Weights are chosen by evaluating
the score-rounded accuracy of every lattice point on the probability simplex
(step 0.05 gives 231 points, corners included), optionally refined by seeded
random restarts of a finer-step hill climb around the grid optimum. Ties
break toward the lexicographically smallest weight triple, so the search is
fully deterministic.

The plain linear baseline is deliberately not blendable: its validation
accuracy sits far below the other three, and the ensemble constructor
rejects it outright.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStepError, InvalidWeightsError, LengthMismatchError
from .evaluation import accuracy, round_prediction
from .learners.boosting import GbtModel
from .learners.lasso import LassoModel
from .learners.linear import LinearModel

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class EnsembleWeights:
    """(histogram-GBT, LASSO, exact-GBT) blend weights on the simplex."""

    hist_gbt: float
    lasso: float
    exact_gbt: float

    def __post_init__(self):
        triple = (self.hist_gbt, self.lasso, self.exact_gbt)
        if any(w < -SIMPLEX_TOL or w > 1 + SIMPLEX_TOL for w in triple):
            raise InvalidWeightsError(f"weights outside [0, 1]: {triple}")
        if abs(sum(triple) - 1.0) > SIMPLEX_TOL:
            raise InvalidWeightsError(f"weights must sum to 1, got {sum(triple)!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.hist_gbt, self.lasso, self.exact_gbt)


@dataclass(frozen=True)
class WeightSearchTrace:
    step: float
    n_grid_points: int
    evaluated: tuple[tuple[tuple[float, float, float], float], ...]
    best: tuple[tuple[float, float, float], float]
    restarts_used: int


def combine(preds_hist, preds_lasso, preds_exact, weights: EnsembleWeights) -> np.ndarray:
    """Element-wise weighted sum of the three raw prediction vectors."""
    a = np.asarray(preds_hist, dtype=float).ravel()
    b = np.asarray(preds_lasso, dtype=float).ravel()
    c = np.asarray(preds_exact, dtype=float).ravel()
    if not (a.shape == b.shape == c.shape):
        raise LengthMismatchError(
            f"prediction lengths differ: {a.shape[0]}, {b.shape[0]}, {c.shape[0]}"
        )
    return weights.hist_gbt * a + weights.lasso * b + weights.exact_gbt * c


def _blend_accuracy(triple, scores, weights: EnsembleWeights) -> float:
    raw = combine(*triple, weights)
    rounded = np.array([round_prediction(v) for v in raw])
    return accuracy(rounded, scores)


def _simplex_point(i: int, j: int, m: int) -> EnsembleWeights:
    a = i / m
    b = j / m
    return EnsembleWeights(hist_gbt=a, lasso=b, exact_gbt=max(0.0, 1.0 - a - b))


def search_weights(val_preds: tuple, val_scores, step: float = 0.05,
                   restarts: int = 0, seed: int = 0):
    """Exhaustive simplex-grid search of blend weights on validation data.

    val_preds is the (hist-GBT, LASSO, exact-GBT) triple of raw validation
    prediction vectors. Returns (EnsembleWeights, WeightSearchTrace).
    """
    m = round(1.0 / step)
    if m < 1 or abs(m * step - 1.0) > 1e-9:
        raise InvalidStepError(f"step {step} does not divide 1 evenly")
    triple = tuple(np.asarray(p, dtype=float).ravel() for p in val_preds)
    scores = np.asarray(val_scores, dtype=int).ravel()
    if len(triple) != 3:
        raise LengthMismatchError("expected exactly three prediction vectors")

    evaluated: list[tuple[tuple[float, float, float], float]] = []
    best_w: EnsembleWeights | None = None
    best_acc = -1.0

    def consider(w: EnsembleWeights) -> float:
        nonlocal best_w, best_acc
        acc = _blend_accuracy(triple, scores, w)
        evaluated.append((w.as_tuple(), acc))
        if acc > best_acc or (acc == best_acc and w.as_tuple() < best_w.as_tuple()):
            best_w, best_acc = w, acc
        return acc

    for i in range(m + 1):
        for j in range(m + 1 - i):
            consider(_simplex_point(i, j, m))
    n_grid = len(evaluated)

    rng = np.random.default_rng(seed)
    fine = step / 5.0
    for _ in range(restarts):
        # jitter the grid optimum onto a nearby simplex point, then hill-climb
        start = np.array(best_w.as_tuple())
        jitter = rng.uniform(-step, step, size=3)
        point = np.clip(start + jitter, 0.0, None)
        total = point.sum()
        point = point / total if total > 0 else np.array([1 / 3, 1 / 3, 1 / 3])
        current = EnsembleWeights(*point)
        current_acc = consider(current)
        improved = True
        while improved:
            improved = False
            for u in range(3):
                for v in range(3):
                    if u == v:
                        continue
                    w = list(current.as_tuple())
                    if w[u] < fine:
                        continue
                    w[u] -= fine
                    w[v] += fine
                    if w[v] > 1.0:
                        continue
                    candidate = EnsembleWeights(*_renormalize(w))
                    acc = consider(candidate)
                    if acc > current_acc:
                        current, current_acc = candidate, acc
                        improved = True
    return best_w, WeightSearchTrace(
        step=step,
        n_grid_points=n_grid,
        evaluated=tuple(evaluated),
        best=(best_w.as_tuple(), best_acc),
        restarts_used=restarts,
    )


def _renormalize(w) -> tuple[float, float, float]:
    arr = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
    total = float(arr.sum())
    arr = arr / total
    return (float(arr[0]), float(arr[1]), float(max(0.0, 1.0 - arr[0] - arr[1])))


class WeightedEnsembleModel:
    """Blend of a histogram-GBT, a LASSO and an exact-GBT model."""

    def __init__(self, hist_gbt: GbtModel, lasso: LassoModel, exact_gbt: GbtModel,
                 weights: EnsembleWeights):
        for component in (hist_gbt, lasso, exact_gbt):
            if isinstance(component, LinearModel):
                raise InvalidWeightsError(
                    "the plain linear baseline is not an ensemble component"
                )
        if not isinstance(hist_gbt, GbtModel) or hist_gbt.mode != "histogram":
            raise InvalidWeightsError("first component must be a histogram-mode GBT model")
        if not isinstance(lasso, LassoModel):
            raise InvalidWeightsError("second component must be a LASSO model")
        if not isinstance(exact_gbt, GbtModel) or exact_gbt.mode != "exact":
            raise InvalidWeightsError("third component must be an exact-mode GBT model")
        self.hist_gbt = hist_gbt
        self.lasso = lasso
        self.exact_gbt = exact_gbt
        self.weights = weights

    def predict(self, X) -> np.ndarray:
        return combine(
            self.hist_gbt.predict(X),
            self.lasso.predict(X),
            self.exact_gbt.predict(X),
            self.weights,
        )

    def predict_scores(self, X) -> np.ndarray:
        return np.array([round_prediction(v) for v in self.predict(X)], dtype=int)


def we_predict(models: tuple, X, weights: EnsembleWeights) -> np.ndarray:
    """Blend the three component models' predictions and round to scores."""
    hist_gbt, lasso, exact_gbt = models
    model = WeightedEnsembleModel(hist_gbt, lasso, exact_gbt, weights)
    return model.predict_scores(X)


def ensemble_to_doc(model: WeightedEnsembleModel) -> dict:
    from .learners.serialize import MODEL_SCHEMA_VERSION, model_to_doc

    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": "weighted_ensemble",
        "weights": {
            "hist_gbt": model.weights.hist_gbt,
            "lasso": model.weights.lasso,
            "exact_gbt": model.weights.exact_gbt,
        },
        "components": {
            "hist_gbt": model_to_doc(model.hist_gbt),
            "lasso": model_to_doc(model.lasso),
            "exact_gbt": model_to_doc(model.exact_gbt),
        },
    }


def ensemble_from_doc(doc: dict) -> WeightedEnsembleModel:
    from .learners.serialize import model_from_doc

    if doc.get("kind") != "weighted_ensemble":
        raise ValueError("not a weighted-ensemble document")
    weights = EnsembleWeights(**doc["weights"])
    return WeightedEnsembleModel(
        hist_gbt=model_from_doc(doc["components"]["hist_gbt"]),
        lasso=model_from_doc(doc["components"]["lasso"]),
        exact_gbt=model_from_doc(doc["components"]["exact_gbt"]),
        weights=weights,
    )
