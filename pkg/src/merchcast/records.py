"""Movie records: ingest, null audit, and imputation.

A record mirrors the raw movie-information sheet: identity and release data,
MPAA rating, runtime, IMDB rating, people and place lists, box office in
units of $100 million, series membership, free-text script summary, and an
optional merchandising score label in [0, 25].

Records are immutable; every operation here returns new records and leaves
its inputs untouched.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import re
import statistics
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

from ._util import round_half_up
from .errors import (
    AllMissingColumnError,
    DuplicateIdError,
    EmptyDatasetError,
    FieldTypeError,
    MissingDataRejectedError,
    UnknownColumnError,
)

MPAA_ORDER = ("G", "PG", "PG-13", "R", "NC-17", "NotRated")
MIN_YEAR = 1970

# Fields that hold a single number.
NUMERIC_FIELDS = ("year", "runtime_minutes", "imdb_rating", "box_office", "series_count")
INT_FIELDS = ("year", "runtime_minutes", "series_count")
LIST_FIELDS = (
    "directors",
    "writers",
    "stars",
    "countries",
    "languages",
    "filming_locations",
    "production_companies",
)

# Column order used by the null report and the CSV writer.
COLUMN_ORDER = (
    "id",
    "film",
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
    "script",
    "label",
)

# Display headers for files and reports, matching the movie-information sheet.
DISPLAY_HEADERS = {
    "id": "id",
    "film": "film",
    "year": "year",
    "mpaa": "Motion Picture Rating(MPAA)",
    "runtime_minutes": "time",
    "imdb_rating": "IMDB rating",
    "genres": "Genres",
    "directors": "Directors",
    "writers": "writers",
    "stars": "stars",
    "countries": "countries of origin",
    "languages": "languages",
    "filming_locations": "Filming locations",
    "production_companies": "Production Companies",
    "box_office": "Box Office ($ 100 million)",
    "is_series": "movie series",
    "series_count": "How many movie series",
    "script": "Script",
    "label": "Experts' score",
}

# Accepted header spellings, keyed by normalized form (lower snake case).
_ALIASES = {
    "id": "id",
    "film": "film",
    "movie": "film",
    "title": "film",
    "year": "year",
    "mpaa": "mpaa",
    "motion_picture_rating": "mpaa",
    "motion_picture_rating_mpaa": "mpaa",
    "rating_mpaa": "mpaa",
    "time": "runtime_minutes",
    "runtime": "runtime_minutes",
    "runtime_minutes": "runtime_minutes",
    "imdb_rating": "imdb_rating",
    "imdb": "imdb_rating",
    "genres": "genres",
    "genre": "genres",
    "directors": "directors",
    "director": "directors",
    "writers": "writers",
    "writer": "writers",
    "stars": "stars",
    "star": "stars",
    "countries": "countries",
    "countries_of_origin": "countries",
    "countries_of_origina": "countries",
    "country": "countries",
    "languages": "languages",
    "language": "languages",
    "filming_locations": "filming_locations",
    "filming_location": "filming_locations",
    "production_companies": "production_companies",
    "production_company": "production_companies",
    "box_office": "box_office",
    "box_office_100_million": "box_office",
    "box_office_usd_100_million": "box_office",
    "is_series": "is_series",
    "movie_series": "is_series",
    "series": "is_series",
    "series_count": "series_count",
    "how_many_movie_series": "series_count",
    "number_of_movie_series": "series_count",
    "script": "script",
    "label": "label",
    "experts_score": "label",
    "expert_score": "label",
    "total_score": "label",
    "score": "label",
}

_MPAA_ALIASES = {
    "g": "G",
    "pg": "PG",
    "pg-13": "PG-13",
    "pg13": "PG-13",
    "r": "R",
    "nc-17": "NC-17",
    "nc17": "NC-17",
    "notrated": "NotRated",
    "not rated": "NotRated",
    "not-rated": "NotRated",
    "unrated": "NotRated",
}

_TRUE_WORDS = {"yes", "true", "y", "1"}
_FALSE_WORDS = {"no", "false", "n", "0"}

_RUNTIME_RE = re.compile(r"^\s*(?:(\d+)\s*h)?\s*(?:(\d+)\s*m(?:in)?)?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class MovieRecord:
    """One film's attributes. None marks a missing value, never a default."""

    id: int
    film: str | None = None
    year: int | None = None
    mpaa: str | None = None
    runtime_minutes: int | None = None
    imdb_rating: float | None = None
    genres: frozenset[str] | None = None
    directors: tuple[str, ...] | None = None
    writers: tuple[str, ...] | None = None
    stars: tuple[str, ...] | None = None
    countries: tuple[str, ...] | None = None
    languages: tuple[str, ...] | None = None
    filming_locations: tuple[str, ...] | None = None
    production_companies: tuple[str, ...] | None = None
    box_office: float | None = None
    is_series: bool | None = None
    series_count: int | None = None
    script: str | None = None
    label: int | None = None
    imputed_fields: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.year is not None and not (MIN_YEAR <= self.year <= date.today().year):
            raise FieldTypeError(
                f"record {self.id}: year {self.year} outside [{MIN_YEAR}, current year]"
            )
        if self.mpaa is not None and self.mpaa not in MPAA_ORDER:
            raise FieldTypeError(f"record {self.id}: unknown MPAA rating {self.mpaa!r}")
        if self.runtime_minutes is not None and self.runtime_minutes < 0:
            raise FieldTypeError(f"record {self.id}: negative runtime")
        if self.imdb_rating is not None and not (0.0 <= self.imdb_rating <= 10.0):
            raise FieldTypeError(f"record {self.id}: IMDB rating outside [0, 10]")
        if self.box_office is not None and self.box_office < 0:
            raise FieldTypeError(f"record {self.id}: negative box office")
        if self.series_count is not None and self.series_count < 0:
            raise FieldTypeError(f"record {self.id}: negative series count")
        if self.is_series is False and self.series_count not in (None, 0):
            raise FieldTypeError(
                f"record {self.id}: non-series film with series count {self.series_count}"
            )
        if self.label is not None and not (0 <= self.label <= 25):
            raise FieldTypeError(f"record {self.id}: label {self.label} outside [0, 25]")

    def value(self, field_name: str):
        return getattr(self, field_name)

    def replace(self, **changes) -> "MovieRecord":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class NullReport:
    """Per-column non-null counts and dtypes over a record list."""

    total_rows: int
    columns: tuple[tuple[str, int, str], ...]  # (column, non_null_count, dtype)

    def non_null(self, column: str) -> int:
        for name, count, _ in self.columns:
            if name == column:
                return count
        raise KeyError(column)

    def render(self) -> str:
        header = ("#", "Column", "Non-Null Count", "Dtype")
        rows = [
            (str(i), DISPLAY_HEADERS[name], f"{count} non-null", dtype)
            for i, (name, count, dtype) in enumerate(self.columns)
        ]
        widths = [max(len(r[c]) for r in [header, *rows]) for c in range(4)]
        lines = ["  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip()
                 for row in [header, *rows]]
        lines.append(f"total rows: {self.total_rows}")
        return "\n".join(lines)


def normalize_header(name: str) -> str:
    cleaned = re.sub(r"[^0-9a-z]+", "_", name.strip().lower()).strip("_")
    return cleaned


def _canonical_field(header: str) -> str:
    norm = normalize_header(header)
    if norm not in _ALIASES:
        raise UnknownColumnError(f"unrecognized column {header!r}")
    return _ALIASES[norm]


def parse_runtime(text: str) -> int:
    """'2h13m' -> 133; bare integers are taken as minutes."""
    raw = text.strip()
    if raw.isdigit():
        return int(raw)
    m = _RUNTIME_RE.match(raw)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise FieldTypeError(f"cannot parse runtime {text!r}")
    hours = int(m.group(1) or 0)
    minutes = int(m.group(2) or 0)
    return hours * 60 + minutes


def format_runtime(minutes: int) -> str:
    return f"{minutes // 60}h{minutes % 60}m"


def _parse_mpaa(text: str) -> str:
    key = text.strip().lower()
    if key not in _MPAA_ALIASES:
        raise FieldTypeError(f"unknown MPAA rating {text!r}")
    return _MPAA_ALIASES[key]


def _parse_bool(text: str, column: str) -> bool:
    key = text.strip().lower()
    if key in _TRUE_WORDS:
        return True
    if key in _FALSE_WORDS:
        return False
    raise FieldTypeError(f"cannot parse {column} value {text!r} as yes/no")


def _parse_list(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(str(v).strip() for v in text if str(v).strip())
    return tuple(part.strip() for part in str(text).split(",") if part.strip())


def _parse_int(text, column: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise FieldTypeError(f"non-numeric {column} value {text!r}") from None


def _parse_float(text, column: str) -> float:
    try:
        return float(str(text).strip())
    except ValueError:
        raise FieldTypeError(f"non-numeric {column} value {text!r}") from None


def _is_blank(value) -> bool:
    if value is None:
        return True
    if isinstance(value, str) and value.strip() == "":
        return True
    if isinstance(value, (list, tuple, set)) and len(value) == 0:
        return True
    return False


def _coerce(fld: str, value, record_id):
    """Raw cell -> typed field value. Blank cells never reach here."""
    if fld == "id":
        return _parse_int(value, "id")
    if fld in ("film", "script"):
        return str(value).strip()
    if fld == "year":
        return _parse_int(value, "year")
    if fld == "mpaa":
        return _parse_mpaa(str(value))
    if fld == "runtime_minutes":
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return int(value)
        return parse_runtime(str(value))
    if fld == "imdb_rating":
        return _parse_float(value, "imdb rating")
    if fld == "genres":
        return frozenset(_parse_list(value))
    if fld in LIST_FIELDS:
        return _parse_list(value)
    if fld == "box_office":
        return _parse_float(value, "box office")
    if fld == "is_series":
        if isinstance(value, bool):
            return value
        return _parse_bool(str(value), "movie series")
    if fld == "series_count":
        return _parse_int(value, "how many movie series")
    if fld == "label":
        return _parse_int(value, "experts' score")
    raise AssertionError(f"unhandled field {fld}")


def record_from_cells(cells: dict, fallback_id: int) -> MovieRecord:
    """Build a record from {canonical field: raw value}, skipping blanks."""
    kwargs = {}
    for fld, raw in cells.items():
        if _is_blank(raw):
            continue
        kwargs[fld] = _coerce(fld, raw, cells.get("id", fallback_id))
    kwargs.setdefault("id", fallback_id)
    return MovieRecord(**kwargs)


def parse_dataset(path: str | Path, format: str | None = None) -> list[MovieRecord]:
    """Read movie records from a CSV or JSON-lines file.

    The header row (CSV) or object keys (JSONL) must all map onto the movie
    schema; spellings are matched case-insensitively, in any order, and
    lower-snake-case aliases are accepted. Missing cells produce absent
    fields, never defaults.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if format is None:
        format = "jsonl" if path.suffix in (".jsonl", ".ndjson", ".json") else "csv"
    if format not in ("csv", "jsonl"):
        raise ValueError(f"unknown format {format!r}")

    rows: list[dict] = []
    if format == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise EmptyDatasetError(f"{path} has no header row") from None
            fields = [_canonical_field(col) for col in header]
            if len(set(fields)) != len(fields):
                dupes = [f for f, n in Counter(fields).items() if n > 1]
                raise UnknownColumnError(f"duplicate columns for fields: {dupes}")
            for raw in reader:
                if not raw or raw[0].startswith("#"):
                    continue  # trailing provenance comments (config hash)
                rows.append({fld: val for fld, val in zip(fields, raw)})
    else:
        flags_by_row: dict[int, frozenset[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                obj = json.loads(line)
                flags = obj.pop("imputed_fields", None)
                if flags:
                    flags_by_row[len(rows)] = frozenset(flags)
                rows.append({_canonical_field(k): v for k, v in obj.items()})

    records = []
    seen_ids: set[int] = set()
    for i, cells in enumerate(rows):
        rec = record_from_cells(cells, fallback_id=i)
        if format == "jsonl" and i in flags_by_row:
            rec = rec.replace(imputed_fields=flags_by_row[i])
        if rec.id in seen_ids:
            raise DuplicateIdError(f"duplicate record id {rec.id}")
        seen_ids.add(rec.id)
        records.append(rec)
    return records


def _column_dtype(fld: str) -> str:
    if fld in ("id", "year", "runtime_minutes", "series_count", "label"):
        return "int64"
    if fld in ("imdb_rating", "box_office"):
        return "float64"
    if fld == "is_series":
        return "bool"
    return "object"


def null_report(records: Sequence[MovieRecord]) -> NullReport:
    """Per-column non-null counts in the fixed column order."""
    if not records:
        raise EmptyDatasetError("null report needs at least one record")
    columns = []
    for fld in COLUMN_ORDER:
        count = sum(1 for r in records if r.value(fld) is not None)
        columns.append((fld, count, _column_dtype(fld)))
    return NullReport(total_rows=len(records), columns=tuple(columns))


def _canon_for_mode(fld: str, value):
    """Hashable canonical form so mode counting is deterministic."""
    if fld == "genres":
        return tuple(sorted(value))
    return value


def _from_canon(fld: str, canon):
    if fld == "genres":
        return frozenset(canon)
    return canon


def _median_fill(fld: str, values: list[float]):
    med = statistics.median(values)
    if fld in INT_FIELDS:
        return round_half_up(med)
    return float(med)


def impute(records: Sequence[MovieRecord], policy: str = "median_mode") -> list[MovieRecord]:
    """Fill gaps column by column.

    median_mode: numeric gaps take the column median, everything else the
    column mode (ties broken by sorted value); each filled cell is flagged in
    the record's imputed_fields. reject: raise on the first gap. The label
    column is the supervision target, not a feature; its absence is never a
    gap.
    """
    if policy not in ("median_mode", "reject"):
        raise ValueError(f"unknown imputation policy {policy!r}")
    feature_fields = [f for f in COLUMN_ORDER if f not in ("id", "label")]

    if policy == "reject":
        for rec in records:
            gaps = [f for f in feature_fields if rec.value(f) is None]
            if gaps:
                raise MissingDataRejectedError(
                    f"record {rec.id} has missing fields: {', '.join(gaps)}"
                )
        return list(records)

    fills: dict[str, object] = {}
    for fld in feature_fields:
        present = [rec.value(fld) for rec in records if rec.value(fld) is not None]
        n_missing = len(records) - len(present)
        if n_missing == 0:
            continue
        if not present:
            raise AllMissingColumnError(f"column {fld!r} has no present values to impute from")
        if fld in NUMERIC_FIELDS:
            fills[fld] = _median_fill(fld, present)
        else:
            counts = Counter(_canon_for_mode(fld, v) for v in present)
            best = max(sorted(counts, key=repr), key=lambda k: counts[k])
            fills[fld] = _from_canon(fld, best)

    out = []
    for rec in records:
        changes = {}
        flagged = set(rec.imputed_fields)
        for fld, fill in fills.items():
            if rec.value(fld) is None:
                changes[fld] = fill
                flagged.add(fld)
        # Closing the series invariant: a film imputed (or known) as non-series
        # cannot carry a positive series count.
        is_series = changes.get("is_series", rec.is_series)
        series_count = changes.get("series_count", rec.series_count)
        if is_series is False and series_count not in (None, 0):
            changes["series_count"] = 0
            flagged.add("series_count")
        if changes:
            changes["imputed_fields"] = frozenset(flagged)
            rec = rec.replace(**changes)
        out.append(rec)
    return out


# --- writers -----------------------------------------------------------------

def _cell_for_csv(fld: str, value) -> str:
    if value is None:
        return ""
    if fld == "runtime_minutes":
        return format_runtime(value)
    if fld == "genres":
        return ", ".join(sorted(value))
    if fld in LIST_FIELDS:
        return ", ".join(value)
    if fld == "is_series":
        return "yes" if value else "no"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records: Iterable[MovieRecord], path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([DISPLAY_HEADERS[f] for f in COLUMN_ORDER])
        for rec in records:
            writer.writerow([_cell_for_csv(f, rec.value(f)) for f in COLUMN_ORDER])


def record_to_json_obj(rec: MovieRecord) -> dict:
    obj = {}
    for fld in COLUMN_ORDER:
        value = rec.value(fld)
        if value is None:
            continue
        if fld == "genres":
            value = sorted(value)
        elif fld in LIST_FIELDS:
            value = list(value)
        obj[fld] = value
    if rec.imputed_fields:
        obj["imputed_fields"] = sorted(rec.imputed_fields)
    return obj


def write_records_jsonl(records: Iterable[MovieRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_json_obj(rec), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
