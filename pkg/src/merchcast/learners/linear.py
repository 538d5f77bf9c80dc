"""Ordinary least squares by normal equations.

Minimizes mean squared error over an intercept plus one coefficient per
feature. The Gram matrix is factorized as symmetric positive definite; when
that fails (collinear or constant columns) a tiny ridge goes on the diagonal
and a SingularDesignWarning is emitted instead of crashing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..errors import SingularDesignWarning
from ._common import as_matrix, as_targets, check_schema

RIDGE_FALLBACK = 1e-8


@dataclass(frozen=True)
class LinearModel:
    intercept: float
    coefficients: np.ndarray

    def predict(self, X) -> np.ndarray:
        arr = as_matrix(X)
        check_schema(len(self.coefficients), arr)
        return self.intercept + arr @ self.coefficients


def fit_linear(X, y=None) -> LinearModel:
    arr = as_matrix(X)
    targets = as_targets(X, y)
    if arr.shape[0] != targets.shape[0]:
        raise ValueError("X and y row counts differ")
    n = arr.shape[0]
    design = np.hstack([np.ones((n, 1)), arr])
    gram = design.T @ design
    rhs = design.T @ targets
    try:
        factor = cho_factor(gram)
    except LinAlgError:
        warnings.warn(
            "design matrix is singular; adding a tiny ridge to the normal equations",
            SingularDesignWarning,
        )
        factor = cho_factor(gram + RIDGE_FALLBACK * np.eye(gram.shape[0]))
    beta = cho_solve(factor, rhs)
    return LinearModel(intercept=float(beta[0]), coefficients=beta[1:].copy())
