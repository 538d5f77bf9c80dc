"""Versioned JSON documents for trained models; round-trips are prediction-identical.

Floats survive json round-trips exactly (repr-based), so a reloaded model
produces bit-for-bit identical predictions.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .boosting import GbtModel, GbtParams, RegressionTree, TreeNode
from .lasso import LassoModel
from .linear import LinearModel

MODEL_SCHEMA_VERSION = 1


def _node_to_obj(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"weight": node.weight}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_obj(node.left),
        "right": _node_to_obj(node.right),
    }


def _node_from_obj(obj: dict) -> TreeNode:
    if "weight" in obj:
        return TreeNode(weight=obj["weight"])
    return TreeNode(
        feature=obj["feature"],
        threshold=obj["threshold"],
        left=_node_from_obj(obj["left"]),
        right=_node_from_obj(obj["right"]),
    )


def model_to_doc(model) -> dict:
    base = {"schema_version": MODEL_SCHEMA_VERSION}
    if isinstance(model, LinearModel):
        return {
            **base,
            "kind": "linear",
            "intercept": model.intercept,
            "coefficients": [float(c) for c in model.coefficients],
        }
    if isinstance(model, LassoModel):
        return {
            **base,
            "kind": "lasso",
            "intercept": model.intercept,
            "coefficients": [float(c) for c in model.coefficients],
            "lambda": model.lam,
            "t_equivalent": model.t_equivalent,
            "converged": model.converged,
            "n_sweeps": model.n_sweeps,
        }
    if isinstance(model, GbtModel):
        return {
            **base,
            "kind": "gbt",
            "mode": model.mode,
            "base_score": model.base_score,
            "learning_rate": model.learning_rate,
            "n_features": model.n_features,
            "params": {
                "n_trees": model.params.n_trees,
                "learning_rate": model.params.learning_rate,
                "max_depth": model.params.max_depth,
                "reg_lambda": model.params.reg_lambda,
                "gamma_split": model.params.gamma_split,
                "min_child_hessian": model.params.min_child_hessian,
            },
            "trees": [_node_to_obj(t.root) for t in model.trees],
        }
    # late import to avoid a cycle; the ensemble wraps three learner models
    from ..ensemble import WeightedEnsembleModel, ensemble_to_doc

    if isinstance(model, WeightedEnsembleModel):
        return ensemble_to_doc(model)
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def model_from_doc(doc: dict):
    if doc.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema {doc.get('schema_version')!r}")
    kind = doc.get("kind")
    if kind == "linear":
        return LinearModel(
            intercept=doc["intercept"],
            coefficients=np.array(doc["coefficients"], dtype=float),
        )
    if kind == "lasso":
        return LassoModel(
            intercept=doc["intercept"],
            coefficients=np.array(doc["coefficients"], dtype=float),
            lam=doc["lambda"],
            t_equivalent=doc["t_equivalent"],
            converged=doc["converged"],
            n_sweeps=doc["n_sweeps"],
        )
    if kind == "gbt":
        params = GbtParams(**doc["params"])
        trees = tuple(RegressionTree(root=_node_from_obj(o)) for o in doc["trees"])
        return GbtModel(
            base_score=doc["base_score"],
            learning_rate=doc["learning_rate"],
            trees=trees,
            params=params,
            mode=doc["mode"],
            n_features=doc["n_features"],
        )
    if kind == "weighted_ensemble":
        from ..ensemble import ensemble_from_doc

        return ensemble_from_doc(doc)
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path: str | Path, extra: dict | None = None) -> None:
    doc = model_to_doc(model)
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2), encoding="utf-8")


def load_model(path: str | Path):
    return model_from_doc(json.loads(Path(path).read_text(encoding="utf-8")))
