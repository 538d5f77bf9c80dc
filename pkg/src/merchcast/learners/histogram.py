"""Histogram-based boosting: binned split search, one-side sampling, feature bundling.

Features are quantile-binned once up front; split search scans bin boundaries
instead of raw values. When a feature has no more distinct values than
max_bins, boundaries fall on the midpoints between consecutive distinct
values, which makes binned search enumerate exactly the same candidates as
the exact fitter.

GOSS (gradient-based one-side sampling) keeps the top_rate fraction of rows
by absolute gradient, samples other_rate of the total uniformly from the
rest, and amplifies the sampled rows' gradient and hessian by
(1 - top_rate) / other_rate. The first tree always sees every row; gradients
only become informative after it.

EFB (exclusive feature bundling) merges sparse non-negative features that are
(almost) never simultaneously nonzero into a single code column, so one
histogram pass covers the whole bundle. Split evaluation still happens per
original feature over that feature's slice of the bundle histogram, so
bundling changes speed, never predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParamsError
from ._common import as_matrix, as_targets
from .boosting import GbtModel, GbtParams, RegressionTree, TreeNode, _leaf

EFB_SPARSITY_CEILING = 0.5  # a feature is "sparse" if at most half its rows are nonzero


@dataclass(frozen=True)
class HistogramBinMap:
    """Per-feature strictly increasing bin upper bounds (boundary k closes bin k)."""

    uppers: tuple[np.ndarray, ...]
    max_bins: int

    def n_bins(self, feature: int) -> int:
        return len(self.uppers[feature]) + 1

    def bin_column(self, values: np.ndarray, feature: int) -> np.ndarray:
        return np.searchsorted(self.uppers[feature], values, side="left").astype(np.int32)

    def bin_matrix(self, X: np.ndarray) -> np.ndarray:
        binned = np.empty(X.shape, dtype=np.int32)
        for j in range(X.shape[1]):
            binned[:, j] = self.bin_column(X[:, j], j)
        return binned


def build_bin_map(X, max_bins: int = 256) -> HistogramBinMap:
    if max_bins < 2:
        raise InvalidParamsError("max_bins must be >= 2")
    arr = as_matrix(X)
    uppers = []
    for j in range(arr.shape[1]):
        distinct = np.unique(arr[:, j])
        if distinct.size <= max_bins:
            bounds = (distinct[:-1] + distinct[1:]) / 2.0
        else:
            qs = np.quantile(arr[:, j], np.arange(1, max_bins) / max_bins)
            bounds = np.unique(qs)
        uppers.append(bounds)
    return HistogramBinMap(uppers=tuple(uppers), max_bins=max_bins)


@dataclass(frozen=True)
class GossConfig:
    top_rate: float = 0.2
    other_rate: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.top_rate <= 1.0):
            raise InvalidParamsError("top_rate must lie in (0, 1]")
        if self.other_rate < 0.0 or self.other_rate > 1.0 - self.top_rate + 1e-12:
            raise InvalidParamsError("other_rate must lie in [0, 1 - top_rate]")


@dataclass(frozen=True)
class EfbBundles:
    """Partition of feature indices; multi-feature bundles share one code column."""

    bundles: tuple[tuple[int, ...], ...]
    conflict_rate: float

    def n_merged(self) -> int:
        return sum(1 for b in self.bundles if len(b) > 1)


def _efb_eligible(arr: np.ndarray, binned: np.ndarray, feature: int) -> bool:
    col = arr[:, feature]
    if col.min() < 0:
        return False
    nonzero = col != 0
    nnz = int(nonzero.sum())
    if nnz == 0 or nnz == len(col):
        return False
    if nnz / len(col) > EFB_SPARSITY_CEILING:
        return False
    # Bundling identifies "value 0" with "bin 0"; binning must preserve that.
    return bool((binned[nonzero, feature] > 0).all())


def find_bundles(X, binned: np.ndarray, conflict_rate: float = 0.0) -> EfbBundles:
    """Greedy mutual-exclusion bundling, densest eligible feature first."""
    arr = as_matrix(X)
    n, p = arr.shape
    budget = int(math.floor(conflict_rate * n))
    eligible = [j for j in range(p) if _efb_eligible(arr, binned, j)]
    eligible.sort(key=lambda j: (-int((arr[:, j] != 0).sum()), j))

    groups: list[list[int]] = []
    occupancy: list[np.ndarray] = []
    conflicts: list[int] = []
    for j in eligible:
        nz = arr[:, j] != 0
        placed = False
        for gi, occ in enumerate(occupancy):
            overlap = int((occ & nz).sum())
            if conflicts[gi] + overlap <= budget:
                groups[gi].append(j)
                occupancy[gi] = occ | nz
                conflicts[gi] += overlap
                placed = True
                break
        if not placed:
            groups.append([j])
            occupancy.append(nz.copy())
            conflicts.append(0)

    bundled = {j for g in groups if len(g) > 1 for j in g}
    merged = [tuple(sorted(g)) for g in groups if len(g) > 1]
    singles = [(j,) for j in range(p) if j not in bundled]
    ordered = sorted(merged + singles, key=lambda b: b[0])
    return EfbBundles(bundles=tuple(ordered), conflict_rate=conflict_rate)


class _BundleLayout:
    """Precomputed code columns and per-feature segment locations."""

    def __init__(self, binned: np.ndarray, bin_map: HistogramBinMap,
                 bundles: EfbBundles | None):
        p = binned.shape[1]
        groups = bundles.bundles if bundles is not None else tuple((j,) for j in range(p))
        self.codes: list[np.ndarray] = []
        self.totals: list[int] = []
        self.feature_loc: dict[int, tuple[int, int, int]] = {}  # j -> (bundle, start, n_bins)
        for bi, members in enumerate(groups):
            if len(members) == 1:
                j = members[0]
                self.codes.append(binned[:, j])
                self.totals.append(bin_map.n_bins(j))
                self.feature_loc[j] = (bi, 1, bin_map.n_bins(j))
            else:
                codes = np.zeros(binned.shape[0], dtype=np.int32)
                start = 1
                for j in members:
                    nb = bin_map.n_bins(j)
                    nz = binned[:, j] > 0
                    codes[nz] = start + binned[nz, j] - 1
                    self.feature_loc[j] = (bi, start, nb)
                    start += nb - 1
                self.codes.append(codes)
                self.totals.append(start)


def _goss_sample(grad: np.ndarray, cfg: GossConfig, rng: np.random.Generator):
    """Row subset (sorted ascending) and per-row stat weights."""
    n = grad.shape[0]
    n_top = int(math.ceil(cfg.top_rate * n))
    order = np.argsort(-np.abs(grad), kind="stable")
    top = order[:n_top]
    rest = np.sort(order[n_top:])
    n_other = min(int(math.ceil(cfg.other_rate * n)), rest.size)
    if rest.size == 0 or n_other == 0:
        used = np.sort(top)
        return used, np.ones(used.size)
    sampled = np.sort(rng.choice(rest, size=n_other, replace=False))
    amplify = (1.0 - cfg.top_rate) / cfg.other_rate
    used = np.sort(np.concatenate([top, sampled]))
    weights = np.ones(used.size)
    weights[np.isin(used, sampled)] = amplify
    return used, weights


def _best_split_hist(layout: _BundleLayout, bin_map: HistogramBinMap,
                     rows, gw, hw, params: GbtParams):
    G = float(gw[rows].sum())
    H = float(hw[rows].sum())
    lam = params.reg_lambda
    parent_score = G * G / (H + lam)

    hist_g: dict[int, np.ndarray] = {}
    hist_h: dict[int, np.ndarray] = {}
    best_gain = 0.0
    best = None
    for j in sorted(layout.feature_loc):
        bi, start, nb = layout.feature_loc[j]
        if nb < 2:
            continue
        if bi not in hist_g:
            codes = layout.codes[bi][rows]
            hist_g[bi] = np.bincount(codes, weights=gw[rows], minlength=layout.totals[bi])
            hist_h[bi] = np.bincount(codes, weights=hw[rows], minlength=layout.totals[bi])
        seg_g = hist_g[bi][start:start + nb - 1]
        seg_h = hist_h[bi][start:start + nb - 1]
        zero_g = G - float(seg_g.sum())
        zero_h = H - float(seg_h.sum())
        # left stats at boundary k cover bin 0 plus bins 1..k
        prefix_g = np.concatenate(([0.0], np.cumsum(seg_g)[:-1])) if nb > 2 \
            else np.array([0.0])
        prefix_h = np.concatenate(([0.0], np.cumsum(seg_h)[:-1])) if nb > 2 \
            else np.array([0.0])
        GL = zero_g + prefix_g
        HL = zero_h + prefix_h
        GR = G - GL
        HR = H - HL
        ok = (HL >= params.min_child_hessian) & (HR >= params.min_child_hessian)
        if not ok.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent_score) \
                - params.gamma_split
        gains = np.where(ok & np.isfinite(gains), gains, -np.inf)
        k = int(np.argmax(gains))
        if gains[k] > best_gain:
            best_gain = float(gains[k])
            best = (j, k)
    if best is None:
        return 0.0, None, None, None
    j, k = best
    return best_gain, j, float(bin_map.uppers[j][k]), k


def _grow_hist(layout, bin_map, binned, rows, gw, hw, depth, params) -> TreeNode:
    G = float(gw[rows].sum())
    H = float(hw[rows].sum())
    if depth >= params.max_depth:
        return _leaf(G, H, params.reg_lambda)
    gain, feature, threshold, boundary = _best_split_hist(
        layout, bin_map, rows, gw, hw, params)
    if feature is None or gain <= 0.0:
        return _leaf(G, H, params.reg_lambda)
    mask = binned[rows, feature] <= boundary
    node = TreeNode(feature=feature, threshold=threshold)
    node.left = _grow_hist(layout, bin_map, binned, rows[mask], gw, hw, depth + 1, params)
    node.right = _grow_hist(layout, bin_map, binned, rows[~mask], gw, hw, depth + 1, params)
    return node


def fit_gbt_hist(X, y=None, params: GbtParams | None = None, max_bins: int = 256,
                 goss: GossConfig | None = None, efb: bool = False,
                 conflict_rate: float = 0.0, seed: int = 0) -> GbtModel:
    """Histogram-mode booster; GOSS and EFB are opt-in."""
    params = params or GbtParams()
    arr = as_matrix(X)
    targets = as_targets(X, y)
    if arr.shape[0] != targets.shape[0]:
        raise ValueError("X and y row counts differ")
    if arr.shape[0] < 2:
        raise ValueError("boosting needs at least 2 rows")

    bin_map = build_bin_map(arr, max_bins=max_bins)
    binned = bin_map.bin_matrix(arr)
    bundles = find_bundles(arr, binned, conflict_rate) if efb else None
    layout = _BundleLayout(binned, bin_map, bundles)
    rng = np.random.default_rng(seed)

    base = float(targets.mean())
    preds = np.full(arr.shape[0], base)
    hess = np.ones(arr.shape[0])
    trees: list[RegressionTree] = []
    trace: list[float] = []
    for t in range(params.n_trees):
        grad = preds - targets
        if not np.any(grad):
            break
        if goss is not None and t >= 1:
            used, weights = _goss_sample(grad, goss, rng)
        else:
            used = np.arange(arr.shape[0])
            weights = np.ones(arr.shape[0])
        gw = np.zeros(arr.shape[0])
        hw = np.zeros(arr.shape[0])
        gw[used] = grad[used] * weights
        hw[used] = hess[used] * weights
        root = _grow_hist(layout, bin_map, binned, used, gw, hw, 0, params)
        tree = RegressionTree(root=root)
        trees.append(tree)
        preds = preds + params.learning_rate * tree.predict(arr)
        trace.append(float(np.mean((preds - targets) ** 2)))
    return GbtModel(
        base_score=base,
        learning_rate=params.learning_rate,
        trees=tuple(trees),
        params=params,
        mode="histogram",
        n_features=arr.shape[1],
        training_mse=tuple(trace),
    )
