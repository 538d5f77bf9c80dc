"""End-to-end orchestration of the synth / label / train / evaluate stages.

All stage functions are pure given their config, and every artifact they
write embeds the config hash, so identical configs reproduce byte-identical
files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import PipelineConfig
from .delphi import (
    DelphiSession,
    SimulationProfile,
    open_session,
    simulate_experts,
    write_labels_csv,
)
from .encoding import EncoderSpec, FeatureMatrix, encode, encoder_from_doc, encoder_to_doc, fit_encoder
from .ensemble import WeightedEnsembleModel, ensemble_to_doc, search_weights
from .errors import UnlabeledRecordError
from .evaluation import (
    AccuracyReport,
    CrossValResult,
    SplitSpec,
    comparison_report,
    cross_validate,
    kfold,
    stratified_split,
)
from .learners import (
    GbtParams,
    GossConfig,
    fit_gbt_exact,
    fit_gbt_hist,
    fit_lasso,
    fit_linear,
    select_lasso_lambda,
)
from .learners.serialize import model_from_doc, model_to_doc
from .records import MovieRecord, impute, write_records_csv

# Display names for report rows, in fixed order.
MODEL_LABELS = ("Linear", "LightGBM", "LASSO", "XGBoost", "WeightedEnsemble")


@dataclass
class TrainResult:
    encoder: EncoderSpec
    train_records: list[MovieRecord]
    test_records: list[MovieRecord]
    train_matrix: FeatureMatrix
    test_matrix: FeatureMatrix
    cv: dict[str, CrossValResult]
    lasso_lambda: float
    lasso_cv_curve: list
    weights: "object"
    weight_trace: "object"
    ensemble: WeightedEnsembleModel

    @property
    def models(self) -> dict[str, object]:
        return {
            "Linear": self.cv["linear"].model,
            "LightGBM": self.cv["gbt_hist"].model,
            "LASSO": self.cv["lasso"].model,
            "XGBoost": self.cv["gbt_exact"].model,
            "WeightedEnsemble": self.ensemble,
        }


def simulate_labels(records: Sequence[MovieRecord], config: PipelineConfig
                    ) -> tuple[DelphiSession, list[MovieRecord]]:
    """Run the expert simulator seeded by each record's label as latent value."""
    for rec in records:
        if rec.label is None:
            raise UnlabeledRecordError(
                f"record {rec.id} has no label to seed the expert simulation"
            )
    dc = config.delphi
    session = open_session(
        experts=[f"expert-{i + 1:02d}" for i in range(dc.experts)],
        samples=[r.id for r in records],
        epsilon=dc.epsilon,
        max_rounds=dc.max_rounds,
    )
    profile = SimulationProfile(
        contraction=dc.contraction, noise_sd=dc.noise_sd, initial_sd=dc.initial_sd,
    )
    simulate_experts(session, profile, seed=dc.seed,
                     latents={r.id: float(r.label) for r in records})
    labeled = [
        rec.replace(label=session.labels[rec.id][0]) for rec in records
    ]
    return session, labeled


def _fit_factories(config: PipelineConfig, lasso_lambda: float):
    gbt_params = GbtParams(
        n_trees=config.gbt.n_trees,
        learning_rate=config.gbt.learning_rate,
        max_depth=config.gbt.max_depth,
        reg_lambda=config.gbt.reg_lambda,
        gamma_split=config.gbt.gamma_split,
        min_child_hessian=config.gbt.min_child_hessian,
    )
    hist_cfg = config.hist
    goss = GossConfig(hist_cfg.top_rate, hist_cfg.other_rate) if hist_cfg.goss else None

    return {
        "linear": lambda X, y: fit_linear(X, y),
        "lasso": lambda X, y: fit_lasso(X, y, lam=lasso_lambda,
                                        max_sweeps=config.lasso.max_sweeps,
                                        tol=config.lasso.tol),
        "gbt_exact": lambda X, y: fit_gbt_exact(X, y, params=gbt_params),
        "gbt_hist": lambda X, y: fit_gbt_hist(
            X, y, params=gbt_params, max_bins=hist_cfg.max_bins,
            goss=goss, efb=hist_cfg.efb, seed=hist_cfg.seed),
    }


def train(records: Sequence[MovieRecord], config: PipelineConfig) -> TrainResult:
    """Split, cross-validate the four learners, and blend the three strong ones."""
    clean = impute(records, policy="median_mode")
    train_records, test_records = stratified_split(
        clean, SplitSpec(test_fraction=config.split.fraction, seed=config.split.seed))
    encoder = fit_encoder(train_records)
    train_matrix = encode(train_records, encoder)
    test_matrix = encode(test_records, encoder) if test_records else None
    folds = kfold(train_records, K=config.cv.k, seed=config.cv.seed)

    from .learners.lasso import default_lambda_grid

    grid = default_lambda_grid(train_matrix, train_matrix.targets,
                               size=config.lasso.grid_size)
    lasso_lambda, curve = select_lasso_lambda(
        train_matrix, train_matrix.targets, folds=folds, lambda_grid=grid,
        max_sweeps=config.lasso.max_sweeps, tol=config.lasso.tol)

    factories = _fit_factories(config, lasso_lambda)
    cv = {name: cross_validate(fit, train_matrix, folds)
          for name, fit in factories.items()}

    y_train = np.asarray(train_matrix.targets, dtype=int)
    weights, trace = search_weights(
        (cv["gbt_hist"].oof_predictions,
         cv["lasso"].oof_predictions,
         cv["gbt_exact"].oof_predictions),
        y_train,
        step=config.ensemble.step,
        restarts=config.ensemble.restarts,
        seed=config.ensemble.seed,
    )
    blend = WeightedEnsembleModel(
        hist_gbt=cv["gbt_hist"].model,
        lasso=cv["lasso"].model,
        exact_gbt=cv["gbt_exact"].model,
        weights=weights,
    )
    return TrainResult(
        encoder=encoder,
        train_records=list(train_records),
        test_records=list(test_records),
        train_matrix=train_matrix,
        test_matrix=test_matrix,
        cv=cv,
        lasso_lambda=lasso_lambda,
        lasso_cv_curve=curve,
        weights=weights,
        weight_trace=trace,
        ensemble=blend,
    )


def evaluate(result: TrainResult) -> AccuracyReport:
    films = [r.film or f"record {r.id}" for r in result.test_records]
    return comparison_report(result.models, result.test_matrix, films=films)


# --- artifact writing ---------------------------------------------------------

def _write_json(path: Path, doc: dict, config_hash: str) -> None:
    doc = {**doc, "config_hash": config_hash}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2), encoding="utf-8")


def append_hash_comment(path: Path, config_hash: str) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(f"# config_hash={config_hash}\n")


def write_train_artifacts(result: TrainResult, out_dir: str | Path,
                          config: PipelineConfig) -> dict[str, Path]:
    out = Path(out_dir)
    models_dir = out / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    h = config.hash()

    paths: dict[str, Path] = {}
    _write_json(out / "encoder.json", encoder_to_doc(result.encoder), h)
    paths["encoder"] = out / "encoder.json"

    _write_json(out / "split.json", {
        "schema_version": 1,
        "kind": "split",
        "train_ids": [r.id for r in result.train_records],
        "test_ids": [r.id for r in result.test_records],
    }, h)
    paths["split"] = out / "split.json"

    file_keys = {"linear": "linear", "lasso": "lasso",
                 "gbt_exact": "gbt_exact", "gbt_hist": "gbt_hist"}
    for key, stem in file_keys.items():
        doc = model_to_doc(result.cv[key].model)
        _write_json(models_dir / f"{stem}.json", doc, h)
        paths[stem] = models_dir / f"{stem}.json"

    ens_doc = ensemble_to_doc(result.ensemble)
    ens_doc["encoder"] = encoder_to_doc(result.encoder)
    ens_doc["weight_trace"] = {
        "step": result.weight_trace.step,
        "n_grid_points": result.weight_trace.n_grid_points,
        "restarts_used": result.weight_trace.restarts_used,
        "best": list(result.weight_trace.best[0]) + [result.weight_trace.best[1]],
    }
    _write_json(models_dir / "ensemble.json", ens_doc, h)
    paths["ensemble"] = models_dir / "ensemble.json"

    _write_json(out / "cv_report.json", {
        "schema_version": 1,
        "kind": "cv_report",
        "lasso_lambda": result.lasso_lambda,
        "validation_accuracy": {
            name: {
                "mean": result.cv[name].mean_accuracy,
                "folds": list(result.cv[name].fold_accuracies),
            }
            for name in sorted(result.cv)
        },
        "ensemble_validation_accuracy": result.weight_trace.best[1],
    }, h)
    paths["cv_report"] = out / "cv_report.json"
    return paths


def write_evaluation_artifacts(report: AccuracyReport, out_dir: str | Path,
                               config: PipelineConfig) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = config.hash()
    text = report.render() + f"\n\nconfig hash: {h}\n"
    (out / "report.txt").write_text(text, encoding="utf-8")
    _write_json(out / "report.json", report.to_doc(), h)
    return {"report_txt": out / "report.txt", "report_json": out / "report.json"}


def write_label_artifacts(session: DelphiSession, labeled: list[MovieRecord],
                          out_dir: str | Path, config: PipelineConfig) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = config.hash()
    labels_path = out / "labels.csv"
    write_labels_csv(session.export_labels(), labels_path)
    append_hash_comment(labels_path, h)
    movies_path = out / "movies_labeled.csv"
    write_records_csv(labeled, movies_path)
    append_hash_comment(movies_path, h)
    session_path = out / "session.json"
    from .delphi import session_to_doc

    _write_json(session_path, session_to_doc(session), h)
    return {"labels": labels_path, "movies_labeled": movies_path, "session": session_path}


def load_pipeline_models(out_dir: str | Path) -> dict[str, object]:
    """Reload the five fitted models from a training output directory."""
    models_dir = Path(out_dir) / "models"
    docs = {
        "Linear": "linear.json",
        "LightGBM": "gbt_hist.json",
        "LASSO": "lasso.json",
        "XGBoost": "gbt_exact.json",
        "WeightedEnsemble": "ensemble.json",
    }
    loaded = {}
    for label, fname in docs.items():
        doc = json.loads((models_dir / fname).read_text(encoding="utf-8"))
        loaded[label] = model_from_doc(doc)
    return loaded


def load_test_matrix(out_dir: str | Path, records: Sequence[MovieRecord]) -> tuple:
    """Rebuild the held-out matrix exactly as training left it."""
    out = Path(out_dir)
    split_doc = json.loads((out / "split.json").read_text(encoding="utf-8"))
    encoder = encoder_from_doc(json.loads((out / "encoder.json").read_text(encoding="utf-8")))
    clean = impute(records, policy="median_mode")
    test_ids = set(split_doc["test_ids"])
    test_records = [r for r in clean if r.id in test_ids]
    return encode(test_records, encoder), test_records
