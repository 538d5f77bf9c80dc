"""Four regression learners with a shared fit/predict contract.

fit_linear       ordinary least squares via normal equations
fit_lasso        L1-penalized least squares, cyclic coordinate descent
fit_gbt_exact    second-order boosted trees, exact greedy split search
fit_gbt_hist     the same booster over quantile-binned features, optionally
                 with gradient-based one-side sampling and exclusive feature
                 bundling

Every model exposes predict(X) returning raw real-valued predictions; score
rounding is the evaluation layer's job.
"""

from .boosting import GbtModel, GbtParams, RegressionTree, fit_gbt_exact, loss_grad_hess
from .histogram import EfbBundles, GossConfig, HistogramBinMap, build_bin_map, fit_gbt_hist
from .lasso import LassoModel, fit_lasso, select_lasso_lambda
from .linear import LinearModel, fit_linear
from .serialize import load_model, model_from_doc, model_to_doc, save_model

__all__ = [
    "EfbBundles",
    "GbtModel",
    "GbtParams",
    "GossConfig",
    "HistogramBinMap",
    "LassoModel",
    "LinearModel",
    "RegressionTree",
    "build_bin_map",
    "fit_gbt_exact",
    "fit_gbt_hist",
    "fit_lasso",
    "fit_linear",
    "load_model",
    "loss_grad_hess",
    "model_from_doc",
    "model_to_doc",
    "predict",
    "save_model",
    "select_lasso_lambda",
]


def predict(model, X):
    """Dispatch to the model's own predict; kept for symmetry with the fit functions."""
    return model.predict(X)
