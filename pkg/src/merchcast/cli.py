"""Command-line entry point driving every pipeline stage.

Subcommands: ingest, nulls, synth, label-simulate, serve, train, evaluate,
predict, report. Each writes its artifacts under --output-dir (falling back
to the MERCHCAST_OUTPUT_DIR environment variable, then ./out) and exits 0 on
success; usage problems exit 2 and pipeline errors exit 1 with a
module-qualified diagnostic.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from .config import PipelineConfig, apply_setting, load_config
from .errors import CliError, EmptyDatasetError, MerchcastError, UnlabeledRecordError
from .pipeline import (
    append_hash_comment,
    load_pipeline_models,
    load_test_matrix,
    simulate_labels,
    train as train_pipeline,
    write_evaluation_artifacts,
    write_label_artifacts,
    write_train_artifacts,
)
from .records import null_report, parse_dataset, write_records_csv, write_records_jsonl
from .synthetic import generate_synthetic


def distribution_report(records) -> str:
    """Text histogram of labels 0..25 plus headline statistics."""
    if not records:
        raise EmptyDatasetError("no records to report on")
    labels = []
    for rec in records:
        if rec.label is None:
            raise UnlabeledRecordError(f"record {rec.id} has no label")
        labels.append(rec.label)
    counts = Counter(labels)
    n = len(labels)
    peak = max(counts.values())
    lines = ["score  count  share", "-" * 40]
    for score in range(26):
        c = counts.get(score, 0)
        bar = "#" * round(30 * c / peak) if c else ""
        lines.append(f"{score:>5}  {c:>5}  {c / n:>6.1%}  {bar}")
    lines.append("-" * 40)
    lines.append(f"records: {n}")
    lines.append(f"zero-score share: {counts.get(0, 0) / n:.1%}")
    lines.append(f"mean score: {float(np.mean(labels)):.3f}")
    lines.append(f"max score: {max(labels)}")
    return "\n".join(lines)


def _output_dir(args) -> Path:
    out = args.output_dir or os.environ.get("MERCHCAST_OUTPUT_DIR") or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _build_config(args) -> PipelineConfig:
    config = load_config(getattr(args, "config", None))
    for setting in getattr(args, "set", None) or []:
        if "=" not in setting:
            raise CliError(f"--set expects section.key=value, got {setting!r}")
        key, raw = setting.split("=", 1)
        apply_setting(config, key.strip(), raw.strip())
    return config


def _require_input(args) -> Path:
    if not args.input:
        raise CliError("--input is required for this subcommand")
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    return path


def cmd_ingest(args) -> int:
    records = parse_dataset(_require_input(args))
    out = _output_dir(args)
    write_records_jsonl(records, out / "records.jsonl")
    config = _build_config(args)
    append_hash_comment(out / "records.jsonl", config.hash())
    print(f"ingested {len(records)} records -> {out / 'records.jsonl'}")
    return 0


def cmd_nulls(args) -> int:
    records = parse_dataset(_require_input(args))
    report = null_report(records)
    text = report.render()
    print(text)
    out = _output_dir(args)
    config = _build_config(args)
    (out / "nulls.txt").write_text(text + f"\n\nconfig hash: {config.hash()}\n",
                                   encoding="utf-8")
    return 0


def cmd_synth(args) -> int:
    config = _build_config(args)
    if args.n is not None:
        config.synth.n = args.n
    if args.seed is not None:
        config.synth.seed = args.seed
    records = generate_synthetic(config.synth.n, config.synth.seed)
    out = _output_dir(args)
    path = out / "movies.csv"
    write_records_csv(records, path)
    append_hash_comment(path, config.hash())
    zero = sum(1 for r in records if r.label == 0)
    print(f"generated {len(records)} records (zero-score share {zero / len(records):.1%}) "
          f"-> {path}")
    return 0


def cmd_label_simulate(args) -> int:
    config = _build_config(args)
    if args.seed is not None:
        config.delphi.seed = args.seed
    records = parse_dataset(_require_input(args))
    session, labeled = simulate_labels(records, config)
    out = _output_dir(args)
    paths = write_label_artifacts(session, labeled, out, config)
    rounds = Counter(session.rounds_to_convergence().values())
    summary = ", ".join(f"round {r}: {c}" for r, c in sorted(rounds.items()))
    forced = sum(1 for _, (lab, f) in session.labels.items() if f)
    print(f"labeled {len(labeled)} samples over {session.current_round} rounds "
          f"({summary}; forced: {forced}) -> {paths['movies_labeled']}")
    return 0


def cmd_train(args) -> int:
    config = _build_config(args)
    records = parse_dataset(_require_input(args))
    result = train_pipeline(records, config)
    out = _output_dir(args)
    paths = write_train_artifacts(result, out, config)
    print("validation accuracy (5-fold means):")
    for name in ("linear", "gbt_hist", "lasso", "gbt_exact"):
        print(f"  {name:<10} {result.cv[name].mean_accuracy:.4f}")
    print(f"  ensemble   {result.weight_trace.best[1]:.4f} "
          f"(weights {tuple(round(w, 4) for w in result.weights.as_tuple())})")
    print(f"models -> {paths['ensemble'].parent}")
    return 0


def cmd_evaluate(args) -> int:
    config = _build_config(args)
    records = parse_dataset(_require_input(args))
    out = _output_dir(args)
    models = load_pipeline_models(out)
    test_matrix, test_records = load_test_matrix(out, records)
    from .evaluation import comparison_report

    films = [r.film or f"record {r.id}" for r in test_records]
    report = comparison_report(models, test_matrix, films=films)
    paths = write_evaluation_artifacts(report, out, config)
    print(report.render())
    print(f"\nreport -> {paths['report_txt']}")
    return 0


def cmd_predict(args) -> int:
    if not args.model:
        raise CliError("--model is required for predict")
    from .encoding import encode, encoder_from_doc
    from .learners.serialize import model_from_doc
    from .records import impute

    doc = json.loads(Path(args.model).read_text(encoding="utf-8"))
    if "encoder" not in doc:
        raise CliError("model document carries no encoder; cannot featurize input")
    encoder = encoder_from_doc(doc["encoder"])
    model = model_from_doc(doc)
    records = parse_dataset(_require_input(args))
    clean = impute(records, policy="median_mode")
    matrix = encode(clean, encoder)
    raw = model.predict(matrix)
    from .evaluation import round_prediction

    out = _output_dir(args)
    path = out / "predictions.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("film,predicted_score\n")
        for rec, value in zip(clean, raw):
            name = (rec.film or f"record {rec.id}").replace(",", ";")
            fh.write(f"{name},{round_prediction(float(value))}\n")
        fh.write(f"# config_hash={doc.get('config_hash', 'unknown')}\n")
    print(f"predicted {len(clean)} records -> {path}")
    return 0


def cmd_report(args) -> int:
    config = _build_config(args)
    records = parse_dataset(_require_input(args))
    text = distribution_report(records)
    print(text)
    out = _output_dir(args)
    (out / "distribution.txt").write_text(
        text + f"\n\nconfig hash: {config.hash()}\n", encoding="utf-8")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    out = _output_dir(args)
    store = out / "delphi-store"
    store.mkdir(parents=True, exist_ok=True)
    admin_token = os.environ.get("MERCHCAST_ADMIN_TOKEN", "change-me-admin")
    app = create_app(store_dir=store, admin_token=admin_token)
    print(f"delphi service on port {args.port}, store {store}")
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="merchcast",
        description="Movie merchandising value prediction pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, input_help="input records file (csv or jsonl)"):
        p.add_argument("--input", help=input_help)
        p.add_argument("--output-dir", help="artifact directory "
                       "(default: $MERCHCAST_OUTPUT_DIR or ./out)")
        p.add_argument("--config", help="key-value config file")
        p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                       help="override one config entry (repeatable)")
        p.add_argument("--seed", type=int, help="override the stage's primary seed")

    p = sub.add_parser("ingest", help="parse and normalize a records file")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("nulls", help="per-column null audit")
    common(p)
    p.set_defaults(func=cmd_nulls)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    common(p)
    p.add_argument("--n", type=int, help="number of records")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("label-simulate", help="label records via simulated expert rounds")
    common(p)
    p.set_defaults(func=cmd_label_simulate)

    p = sub.add_parser("train", help="train the four learners and the ensemble")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score the trained models on the held-out split")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="predict scores for new movies")
    common(p)
    p.add_argument("--model", help="path to a model document with an embedded encoder")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="label distribution report")
    common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the delphi scoring HTTP service")
    common(p)
    p.add_argument("--port", type=int, default=8321)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MerchcastError as err:
        print(f"{err.module}: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"cli: file not found: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
