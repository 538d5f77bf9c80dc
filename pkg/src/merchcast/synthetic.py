"""Schema-faithful synthetic movie datasets with plantable merchandising signal.

The generator mimics the real corpus's headline shape: release decades skewed
heavily toward recent years (3% from the 1970s up to 40% from the 2020s),
roughly half of all labels exactly zero, and the rest skewed toward small
values. Labels are a noisy monotone function of series count, box office and
a few merchandising-friendly genres, so learners have recoverable signal.

Everything is drawn from one seeded generator in a fixed order; the same
(n, seed) always yields byte-identical records.
"""

from __future__ import annotations

import math

import numpy as np

from ._util import round_half_up
from .records import MovieRecord

# Decade mix targeted by the generator (fractions sum to 1).
DECADE_SHARES = (
    (1970, 0.03),
    (1980, 0.07),
    (1990, 0.12),
    (2000, 0.15),
    (2010, 0.23),
    (2020, 0.40),
)
MAX_YEAR = 2025

GENRES = (
    "Action", "Adventure", "Animation", "Biography", "Comedy", "Crime",
    "Drama", "Family", "Fantasy", "History", "Horror", "Romance",
    "Sci-Fi", "Thriller",
)
# Merchandising-friendly genres add to the latent value.
GENRE_BONUS = {
    "Action": 1.6, "Adventure": 1.6, "Animation": 2.2, "Family": 1.8,
    "Fantasy": 1.3, "Sci-Fi": 1.2, "Comedy": 0.4,
    "Drama": -0.6, "Biography": -0.8, "History": -0.8, "Romance": -0.4,
    "Horror": -0.3, "Crime": -0.2, "Thriller": 0.0,
}

MPAA_CHOICES = ("G", "PG", "PG-13", "R", "NC-17", "NotRated")
MPAA_WEIGHTS = (0.06, 0.22, 0.38, 0.28, 0.02, 0.04)

_FIRST = ("Alex", "Casey", "Dana", "Elliot", "Frankie", "Harper", "Jordan",
          "Kai", "Logan", "Morgan", "Noa", "Quinn", "Riley", "Sam", "Taylor")
_LAST = ("Abrams", "Bennett", "Cole", "Dawson", "Ellis", "Flores", "Grant",
         "Hayes", "Ito", "Jensen", "Kim", "Laurent", "Mori", "Novak",
         "Ortega", "Park", "Reyes", "Silva", "Tran", "Vega")

COUNTRIES = ("United States", "United Kingdom", "Canada", "France", "Germany",
             "Japan", "South Korea", "Australia", "New Zealand", "China")
LANGUAGES = ("English", "Spanish", "French", "German", "Japanese", "Korean",
             "Mandarin", "Italian", "Russian")
LOCATIONS = ("Los Angeles, California, USA", "Vancouver, British Columbia, Canada",
             "London, England, UK", "Atlanta, Georgia, USA", "Sydney, Australia",
             "Berlin, Germany", "Toronto, Ontario, Canada", "Wellington, New Zealand",
             "Budapest, Hungary", "Prague, Czech Republic")
STUDIOS = ("Summit Peak Pictures", "Bluegate Studios", "Northlight Films",
           "Crescent Bay Entertainment", "Ironwood Productions", "Starfall Media",
           "Harborline Pictures", "Redrock Entertainment", "Silvercrest Studios",
           "Atlas Gate Films")

_WORDS = ("daring", "quiet", "relentless", "curious", "lost", "last", "hidden",
          "broken", "golden", "distant", "midnight", "crimson", "silent",
          "electric", "forgotten")
_NOUNS = ("voyage", "kingdom", "signal", "horizon", "legacy", "protocol",
          "covenant", "awakening", "frontier", "gambit", "paradox", "reckoning",
          "odyssey", "sanctuary", "uprising")


def _decade_counts(n: int) -> list[tuple[int, int]]:
    """Largest-remainder apportionment of n samples over the decade mix."""
    raw = [(decade, n * share) for decade, share in DECADE_SHARES]
    counts = {decade: math.floor(x) for decade, x in raw}
    short = n - sum(counts.values())
    by_remainder = sorted(raw, key=lambda dx: (-(dx[1] - math.floor(dx[1])), dx[0]))
    for decade, _ in by_remainder[:short]:
        counts[decade] += 1
    return [(decade, counts[decade]) for decade, _ in DECADE_SHARES]


def _names(rng: np.random.Generator, count: int) -> tuple[str, ...]:
    picks = []
    for _ in range(count):
        picks.append(f"{_FIRST[rng.integers(len(_FIRST))]} {_LAST[rng.integers(len(_LAST))]}")
    return tuple(dict.fromkeys(picks))


def _pick(rng: np.random.Generator, pool, lo: int, hi: int) -> tuple[str, ...]:
    count = int(rng.integers(lo, hi + 1))
    idx = sorted(rng.choice(len(pool), size=min(count, len(pool)), replace=False).tolist())
    return tuple(pool[i] for i in idx)


def generate_synthetic(n: int, seed: int) -> list[MovieRecord]:
    """Generate n labeled records, deterministic under seed."""
    if n < 10:
        raise ValueError("synthetic datasets need n >= 10")
    rng = np.random.default_rng(seed)

    years: list[int] = []
    for decade, count in _decade_counts(n):
        hi = min(decade + 9, MAX_YEAR)
        years.extend(int(y) for y in rng.integers(decade, hi + 1, size=count))
    order = rng.permutation(n)
    years = [years[i] for i in order]

    records: list[MovieRecord] = []
    latent: list[float] = []
    drafts: list[dict] = []
    for i in range(n):
        mpaa = MPAA_CHOICES[rng.choice(len(MPAA_CHOICES), p=MPAA_WEIGHTS)]
        n_genres = int(rng.integers(1, 4))
        genre_idx = sorted(rng.choice(len(GENRES), size=n_genres, replace=False).tolist())
        genres = frozenset(GENRES[g] for g in genre_idx)
        runtime = int(np.clip(rng.normal(112, 18), 70, 200))
        imdb = float(np.clip(np.round(rng.normal(6.6, 1.0), 1), 1.0, 10.0))
        is_series = bool(rng.random() < 0.32)
        series_count = int(np.clip(rng.geometric(0.35) + 1, 2, 9)) if is_series else 0
        base = 0.55 + 0.9 * series_count + 0.8 * sum(g in ("Action", "Adventure", "Animation", "Family") for g in genres)
        box_office = float(np.round(min(rng.lognormal(mean=np.log(base), sigma=0.75), 30.0), 2))
        title = (f"The {_WORDS[rng.integers(len(_WORDS))].capitalize()} "
                 f"{_NOUNS[rng.integers(len(_NOUNS))].capitalize()} #{i:04d}")
        drafts.append({
            "id": i,
            "film": title,
            "year": years[i],
            "mpaa": mpaa,
            "runtime_minutes": runtime,
            "imdb_rating": imdb,
            "genres": genres,
            "directors": _names(rng, 1),
            "writers": _names(rng, int(rng.integers(1, 4))),
            "stars": _names(rng, 3),
            "countries": _pick(rng, COUNTRIES, 1, 2),
            "languages": _pick(rng, LANGUAGES, 1, 3),
            "filming_locations": _pick(rng, LOCATIONS, 1, 2),
            "production_companies": _pick(rng, STUDIOS, 1, 3),
            "box_office": box_office,
            "is_series": is_series,
            "series_count": series_count,
            "script": f"A {_WORDS[rng.integers(len(_WORDS))]} story about a "
                      f"{_NOUNS[rng.integers(len(_NOUNS))]}.",
        })
        bonus = sum(GENRE_BONUS[g] for g in sorted(genres))
        raw = (2.0 * series_count
               + 1.1 * min(box_office, 12.0)
               + bonus
               + 0.3 * (imdb - 6.5)
               + rng.normal(0.0, 1.6))
        latent.append(raw)

    # Half the corpus scores zero: everything at or below the median latent
    # value collapses to 0, the rest maps monotonically onto 1..25.
    cutoff = float(np.median(latent))
    for draft, raw in zip(drafts, latent):
        if raw <= cutoff:
            label = 0
        else:
            label = min(25, max(1, round_half_up(1.05 * (raw - cutoff))))
        records.append(MovieRecord(label=label, **draft))
    return records
