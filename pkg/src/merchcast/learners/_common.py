"""Input plumbing shared by the learners."""

from __future__ import annotations

import numpy as np

from ..errors import SchemaMismatchError


def as_matrix(X) -> np.ndarray:
    """Accept a FeatureMatrix or a plain 2-D array."""
    rows = getattr(X, "rows", X)
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2:
        raise ValueError("X must be 2-D")
    return arr


def as_targets(X, y=None) -> np.ndarray:
    if y is None:
        y = getattr(X, "targets", None)
        if y is None:
            raise ValueError("no targets supplied")
    arr = np.asarray(y, dtype=float).ravel()
    return arr


def check_schema(n_features: int, X: np.ndarray) -> None:
    if X.shape[1] != n_features:
        raise SchemaMismatchError(
            f"model was fitted on {n_features} features, got {X.shape[1]}"
        )
