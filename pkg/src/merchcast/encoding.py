"""Turn imputed movie records into a dense numeric feature matrix.

Per-field policies:

  multi_hot            one 0/1 column per vocabulary entry (set/list fields)
  top_k_frequency(k)   multi-hot restricted to the k most frequent entries
  ordinal              fixed-order integer code (MPAA: G < PG < PG-13 < R <
                       NC-17 < NotRated)
  binary               0/1 for a boolean field
  numeric_passthrough  the value itself
  drop                 field contributes no columns

Fitting collects vocabularies from data in a deterministic order (sorted, or
frequency-then-name for top-k), so the same records always produce the same
matrix. Unknown categories at encode time become all-zero contributions in
lenient mode (default) or raise in strict mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import UnfittedEncoderError, UnknownCategoryError
from .records import MPAA_ORDER, MovieRecord

ENCODABLE_FIELDS = (
    "year",
    "mpaa",
    "runtime_minutes",
    "imdb_rating",
    "genres",
    "directors",
    "writers",
    "stars",
    "countries",
    "languages",
    "filming_locations",
    "production_companies",
    "box_office",
    "is_series",
    "series_count",
    "film",
    "script",
)

VALID_KINDS = ("multi_hot", "ordinal", "numeric_passthrough", "binary", "top_k_frequency", "drop")


@dataclass(frozen=True)
class Policy:
    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "top_k_frequency" and (self.k is None or self.k < 1):
            raise ValueError("top_k_frequency needs k >= 1")


def default_policies() -> dict[str, Policy]:
    return {
        "year": Policy("numeric_passthrough"),
        "mpaa": Policy("ordinal"),
        "runtime_minutes": Policy("numeric_passthrough"),
        "imdb_rating": Policy("numeric_passthrough"),
        "genres": Policy("multi_hot"),
        "directors": Policy("top_k_frequency", k=20),
        "writers": Policy("top_k_frequency", k=20),
        "stars": Policy("top_k_frequency", k=20),
        "countries": Policy("multi_hot"),
        "languages": Policy("multi_hot"),
        "filming_locations": Policy("drop"),
        "production_companies": Policy("top_k_frequency", k=20),
        "box_office": Policy("numeric_passthrough"),
        "is_series": Policy("binary"),
        "series_count": Policy("numeric_passthrough"),
        "film": Policy("drop"),
        "script": Policy("drop"),
    }


@dataclass(frozen=True)
class EncoderSpec:
    """Field policies plus (after fitting) per-field vocabularies."""

    policies: Mapping[str, Policy] = field(default_factory=default_policies)
    vocabularies: Mapping[str, tuple[str, ...]] | None = None
    strict: bool = False

    def __post_init__(self):
        missing = set(ENCODABLE_FIELDS) - set(self.policies)
        extra = set(self.policies) - set(ENCODABLE_FIELDS)
        if missing or extra:
            raise ValueError(f"policy map mismatch: missing={sorted(missing)} extra={sorted(extra)}")

    @property
    def fitted(self) -> bool:
        return self.vocabularies is not None

    def with_overrides(self, overrides: Mapping[str, Policy]) -> "EncoderSpec":
        merged = dict(self.policies)
        merged.update(overrides)
        return replace(self, policies=merged, vocabularies=None)


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense row-major feature matrix with column metadata."""

    rows: np.ndarray
    column_names: tuple[str, ...]
    row_ids: tuple[int, ...]
    targets: np.ndarray | None = None

    def __post_init__(self):
        if self.rows.ndim != 2:
            raise ValueError("rows must be 2-D")
        if self.rows.shape[1] != len(self.column_names):
            raise ValueError("column name count does not match matrix width")
        if len(set(self.column_names)) != len(self.column_names):
            raise ValueError("column names must be unique")
        if self.rows.shape[0] != len(self.row_ids):
            raise ValueError("row id count does not match matrix height")
        if np.isnan(self.rows).any():
            raise ValueError("feature matrix contains missing entries")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]

    def subset(self, indices: Sequence[int]) -> "FeatureMatrix":
        idx = np.asarray(indices, dtype=int)
        return FeatureMatrix(
            rows=self.rows[idx],
            column_names=self.column_names,
            row_ids=tuple(self.row_ids[i] for i in idx),
            targets=None if self.targets is None else self.targets[idx],
        )


def _values_of(rec: MovieRecord, fld: str):
    value = rec.value(fld)
    if value is None:
        raise ValueError(f"record {rec.id}: field {fld!r} is missing; impute before encoding")
    return value


def fit_encoder(records: Sequence[MovieRecord], spec: EncoderSpec | None = None) -> EncoderSpec:
    """Collect vocabularies for every categorical policy; returns a fitted spec."""
    if spec is None:
        spec = EncoderSpec()
    if not records:
        raise ValueError("cannot fit an encoder on zero records")
    vocab: dict[str, tuple[str, ...]] = {}
    for fld, policy in sorted(spec.policies.items()):
        if policy.kind == "multi_hot":
            seen = set()
            for rec in records:
                seen.update(_values_of(rec, fld))
            vocab[fld] = tuple(sorted(seen))
        elif policy.kind == "top_k_frequency":
            counts: dict[str, int] = {}
            for rec in records:
                for v in _values_of(rec, fld):
                    counts[v] = counts.get(v, 0) + 1
            ranked = sorted(counts, key=lambda v: (-counts[v], v))
            vocab[fld] = tuple(sorted(ranked[: policy.k]))
        elif policy.kind == "ordinal":
            vocab[fld] = MPAA_ORDER
    return replace(spec, vocabularies=vocab)


def encode(records: Sequence[MovieRecord], spec: EncoderSpec) -> FeatureMatrix:
    """Encode records with a fitted spec. Targets are attached when every
    record carries a label."""
    if not spec.fitted:
        raise UnfittedEncoderError("encoder must be fitted before encoding")
    if not records:
        raise ValueError("cannot encode zero records")

    columns: list[str] = []
    blocks: list[np.ndarray] = []
    n = len(records)
    for fld, policy in sorted(spec.policies.items()):
        if policy.kind == "drop":
            continue
        if policy.kind == "numeric_passthrough":
            col = np.array([float(_values_of(r, fld)) for r in records], dtype=float)
            blocks.append(col.reshape(n, 1))
            columns.append(fld)
        elif policy.kind == "binary":
            col = np.array([1.0 if _values_of(r, fld) else 0.0 for r in records])
            blocks.append(col.reshape(n, 1))
            columns.append(fld)
        elif policy.kind == "ordinal":
            order = {v: i for i, v in enumerate(spec.vocabularies[fld])}
            vals = []
            for r in records:
                v = _values_of(r, fld)
                if v not in order:
                    if spec.strict:
                        raise UnknownCategoryError(f"{fld}: unknown category {v!r}")
                    vals.append(0.0)
                else:
                    vals.append(float(order[v]))
            blocks.append(np.array(vals).reshape(n, 1))
            columns.append(fld)
        else:  # multi_hot / top_k_frequency
            entries = spec.vocabularies[fld]
            index = {v: i for i, v in enumerate(entries)}
            block = np.zeros((n, len(entries)))
            for row, r in enumerate(records):
                for v in _values_of(r, fld):
                    if v in index:
                        block[row, index[v]] = 1.0
                    elif spec.strict and policy.kind == "multi_hot":
                        raise UnknownCategoryError(f"{fld}: unknown category {v!r}")
            blocks.append(block)
            columns.extend(f"{fld}={v}" for v in entries)

    if not blocks:
        raise ValueError("all fields dropped; nothing to encode")
    matrix = np.hstack(blocks)
    labels = [r.label for r in records]
    targets = np.array(labels, dtype=int) if all(l is not None for l in labels) else None
    return FeatureMatrix(
        rows=matrix,
        column_names=tuple(columns),
        row_ids=tuple(r.id for r in records),
        targets=targets,
    )


def encoder_to_doc(spec: EncoderSpec) -> dict:
    return {
        "schema_version": 1,
        "kind": "encoder",
        "strict": spec.strict,
        "policies": {
            f: {"kind": p.kind, **({"k": p.k} if p.k is not None else {})}
            for f, p in sorted(spec.policies.items())
        },
        "vocabularies": None
        if spec.vocabularies is None
        else {f: list(v) for f, v in sorted(spec.vocabularies.items())},
    }


def encoder_from_doc(doc: dict) -> EncoderSpec:
    if doc.get("kind") != "encoder":
        raise ValueError("not an encoder document")
    policies = {f: Policy(d["kind"], d.get("k")) for f, d in doc["policies"].items()}
    vocab = doc.get("vocabularies")
    return EncoderSpec(
        policies=policies,
        vocabularies=None if vocab is None else {f: tuple(v) for f, v in vocab.items()},
        strict=bool(doc.get("strict", False)),
    )
