"""Second-order gradient boosting with exact greedy split search.

Each boosting step fits one regression tree to the squared-error gradient
statistics g_i = pred_i - y_i, h_i = 1. Split gain is

    1/2 * (GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)) - gamma

and a node splits only when the best gain is strictly positive and both
children carry at least min_child_hessian of hessian mass. Leaf weights are
-G/(H+lambda). Predictions are base_score plus learning_rate times the sum
of tree outputs.

Candidate enumeration is deterministic: features in ascending index order,
thresholds ascending, first strict improvement wins. The histogram-mode
fitter in histogram.py follows the same enumeration so the two agree when
binning is lossless.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import InvalidParamsError
from ._common import as_matrix, as_targets, check_schema


def loss_grad_hess(y: float, pred: float) -> tuple[float, float]:
    """Gradient and hessian of the squared-error loss 1/2 (y - pred)^2."""
    return pred - y, 1.0


@dataclass(frozen=True)
class GbtParams:
    n_trees: int = 200
    learning_rate: float = 0.1
    max_depth: int = 4
    reg_lambda: float = 1.0
    gamma_split: float = 0.0
    min_child_hessian: float = 1.0

    def __post_init__(self):
        if self.n_trees < 0:
            raise InvalidParamsError("n_trees must be >= 0")
        if not (0.0 < self.learning_rate <= 1.0):
            raise InvalidParamsError("learning_rate must lie in (0, 1]")
        if self.max_depth < 0:
            raise InvalidParamsError("max_depth must be >= 0")
        if self.reg_lambda < 0 or self.gamma_split < 0 or self.min_child_hessian < 0:
            raise InvalidParamsError("regularization parameters must be >= 0")


@dataclass
class TreeNode:
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    weight: Optional[float] = None

    @property
    def is_leaf(self) -> bool:
        return self.weight is not None


@dataclass(frozen=True)
class RegressionTree:
    root: TreeNode

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        self._route(self.root, X, np.arange(X.shape[0]), out)
        return out

    def _route(self, node: TreeNode, X, idx, out):
        if node.is_leaf:
            out[idx] = node.weight
            return
        mask = X[idx, node.feature] <= node.threshold
        self._route(node.left, X, idx[mask], out)
        self._route(node.right, X, idx[~mask], out)

    def n_leaves(self) -> int:
        def count(node):
            return 1 if node.is_leaf else count(node.left) + count(node.right)
        return count(self.root)


@dataclass(frozen=True)
class GbtModel:
    base_score: float
    learning_rate: float
    trees: tuple[RegressionTree, ...]
    params: GbtParams
    mode: str  # "exact" or "histogram"
    n_features: int
    training_mse: tuple[float, ...] = field(default_factory=tuple)

    def predict(self, X) -> np.ndarray:
        arr = as_matrix(X)
        check_schema(self.n_features, arr)
        preds = np.full(arr.shape[0], self.base_score)
        for tree in self.trees:
            preds += self.learning_rate * tree.predict(arr)
        return preds


def _leaf(g_sum: float, h_sum: float, reg_lambda: float) -> TreeNode:
    return TreeNode(weight=-g_sum / (h_sum + reg_lambda))


def _best_split_exact(X, g, h, idx, params: GbtParams):
    """Scan every feature's distinct-value midpoints; return (gain, feature, threshold).

    Vectorized over all features at once: one column-wise argsort of the node
    submatrix, cumulative sums down the rows, and a single argmax over the
    (feature, boundary) grid. Candidates are ranked feature-major so ties
    resolve to the lowest feature index, then the lowest threshold.
    """
    if idx.size < 2:
        return 0.0, None, None
    sub = X[idx]
    gs = g[idx]
    hs = h[idx]
    G = float(gs.sum())
    H = float(hs.sum())
    lam = params.reg_lambda
    parent_score = G * G / (H + lam)

    order = np.argsort(sub, axis=0, kind="stable")
    sv = np.take_along_axis(sub, order, axis=0)
    cg = np.cumsum(gs[order], axis=0)
    ch = np.cumsum(hs[order], axis=0)
    GL = cg[:-1]
    HL = ch[:-1]
    GR = G - GL
    HR = H - HL
    ok = (sv[1:] != sv[:-1]) \
        & (HL >= params.min_child_hessian) & (HR >= params.min_child_hessian)
    with np.errstate(divide="ignore", invalid="ignore"):
        gains = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent_score) \
            - params.gamma_split
    gains = np.where(ok & np.isfinite(gains), gains, -np.inf)

    flat = np.argmax(gains.T.ravel())
    best_gain = float(gains.T.ravel()[flat])
    if best_gain <= 0.0:
        return 0.0, None, None
    n_bound = sub.shape[0] - 1
    feature = int(flat // n_bound)
    boundary = int(flat % n_bound)
    threshold = float((sv[boundary, feature] + sv[boundary + 1, feature]) / 2.0)
    return best_gain, feature, threshold


def _grow_exact(X, g, h, idx, depth, params: GbtParams) -> TreeNode:
    G = float(g[idx].sum())
    H = float(h[idx].sum())
    if depth >= params.max_depth:
        return _leaf(G, H, params.reg_lambda)
    gain, feature, threshold = _best_split_exact(X, g, h, idx, params)
    if feature is None or gain <= 0.0:
        return _leaf(G, H, params.reg_lambda)
    mask = X[idx, feature] <= threshold
    node = TreeNode(feature=feature, threshold=threshold)
    node.left = _grow_exact(X, g, h, idx[mask], depth + 1, params)
    node.right = _grow_exact(X, g, h, idx[~mask], depth + 1, params)
    return node


def fit_gbt_exact(X, y=None, params: GbtParams | None = None) -> GbtModel:
    """Boosted trees with exact split search over raw feature values."""
    params = params or GbtParams()
    arr = as_matrix(X)
    targets = as_targets(X, y)
    if arr.shape[0] != targets.shape[0]:
        raise ValueError("X and y row counts differ")
    if arr.shape[0] < 2:
        raise ValueError("boosting needs at least 2 rows")

    base = float(targets.mean())
    preds = np.full(arr.shape[0], base)
    all_idx = np.arange(arr.shape[0])
    hess = np.ones(arr.shape[0])
    trees: list[RegressionTree] = []
    trace: list[float] = []
    for _ in range(params.n_trees):
        grad = preds - targets
        if not np.any(grad):
            break  # residuals exhausted (constant target or perfect fit)
        root = _grow_exact(arr, grad, hess, all_idx, 0, params)
        tree = RegressionTree(root=root)
        trees.append(tree)
        preds = preds + params.learning_rate * tree.predict(arr)
        trace.append(float(np.mean((preds - targets) ** 2)))
    return GbtModel(
        base_score=base,
        learning_rate=params.learning_rate,
        trees=tuple(trees),
        params=params,
        mode="exact",
        n_features=arr.shape[1],
        training_mse=tuple(trace),
    )
