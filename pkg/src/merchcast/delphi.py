"""Iterated anonymous expert scoring until score dispersion falls below a cap.

A session walks a panel of experts through numbered rounds. Each round every
expert scores every still-open movie sample across five merchandising
categories (toys, stationery, daily use, clothes and accessories, luggage and
bags), each 0..5, so a sheet's total lands in 0..25. When a round closes, the
per-sample mean M and population standard deviation sigma of the expert
totals are computed; samples with sigma below the session's epsilon take the
rounded mean as their final label and leave the pool. Samples still open when
the round cap is reached are force-labeled with the rounded mean and flagged.

Between rounds, experts only ever see anonymized aggregates (mean, sigma,
histogram of totals), never each other's sheets or identities.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._util import clamp_score, round_half_up
from .errors import (
    EmptySampleSetError,
    IncompleteSheetError,
    MissingSubmissionsError,
    RoundAlreadyClosedError,
    RoundClosedError,
    RoundNotClosedError,
    ScoreOutOfRangeError,
    SessionIncompleteError,
    TooFewExpertsError,
    UnknownExpertError,
    UnknownSampleError,
)

SESSION_SCHEMA_VERSION = 1


class Category(str, Enum):
    TOYS = "toys"
    STATIONERY = "stationery"
    DAILY_USE = "daily_use"
    CLOTHES_ACCESSORIES = "clothes_accessories"
    LUGGAGE_BAGS = "luggage_bags"


CATEGORIES = tuple(Category)


@dataclass(frozen=True)
class ScoreSheet:
    """One expert's category scores for one sample in one round.

    Human submissions carry integer scores; the expert simulator writes
    fractional ones so consensus dynamics stay exact. Both live in [0, 5]
    per category.
    """

    expert_id: str
    round_index: int
    sample_id: int
    scores: Mapping[Category, float]

    def __post_init__(self):
        object.__setattr__(self, "scores", dict(self.scores))
        missing = [c for c in CATEGORIES if c not in self.scores]
        if missing:
            raise ScoreOutOfRangeError(
                f"sheet for sample {self.sample_id} missing categories: "
                + ", ".join(c.value for c in missing)
            )
        for cat, score in self.scores.items():
            if not (0 <= score <= 5):
                raise ScoreOutOfRangeError(
                    f"sample {self.sample_id}, {Category(cat).value}: score {score} outside [0, 5]"
                )

    @property
    def total(self) -> float:
        return float(sum(self.scores[c] for c in CATEGORIES))


@dataclass(frozen=True)
class RoundResult:
    sample_id: int
    round_index: int
    mean: float
    sigma: float
    converged: bool
    n_scores: int


@dataclass(frozen=True)
class LabelExport:
    sample_id: int
    label: int
    forced: bool


def score_sigma(totals: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation of one sample's expert totals."""
    arr = np.asarray(totals, dtype=float)
    mean = float(arr.mean())
    sigma = float(math.sqrt(float(np.mean((arr - mean) ** 2))))
    return mean, sigma


@dataclass
class SimulationProfile:
    """Behavior of simulated experts.

    contraction: how far each expert moves toward the previous round's mean
    (1 adopts it outright, 0 never budges). noise_sd: per-round jitter.
    initial_sd: scale of each expert's round-1 offset from the sample's
    latent value; the effective spread grows with the latent value, since
    panels agree quickly that a worthless film is worthless but argue over
    how valuable a strong one is.
    """

    contraction: float = 0.6
    noise_sd: float = 1.0
    initial_sd: float = 3.0

    def __post_init__(self):
        if not (0.0 <= self.contraction <= 1.0):
            raise ValueError("contraction must lie in [0, 1]")
        if self.noise_sd < 0 or self.initial_sd < 0:
            raise ValueError("noise_sd and initial_sd must be >= 0")


class DelphiSession:
    """Round-based scoring state machine. Use open_session() to create one."""

    def __init__(self, experts: Sequence[str], samples: Sequence[int],
                 epsilon: float = 2.0, max_rounds: int = 10):
        if len(set(experts)) < 2:
            raise TooFewExpertsError("a session needs at least 2 experts")
        if len(experts) != len(set(experts)):
            raise ValueError("duplicate expert ids")
        if not samples:
            raise EmptySampleSetError("a session needs at least 1 sample")
        if len(samples) != len(set(samples)):
            raise ValueError("duplicate sample ids")
        if epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        self.experts = tuple(str(e) for e in experts)
        self.samples = tuple(int(s) for s in samples)
        self.epsilon = float(epsilon)
        self.max_rounds = int(max_rounds)
        self.current_round = 1
        self.open_samples: tuple[int, ...] = self.samples
        # submissions[round][expert][sample] -> ScoreSheet
        self._submissions: dict[int, dict[str, dict[int, ScoreSheet]]] = {1: {}}
        self.results: dict[int, list[RoundResult]] = {}
        self.labels: dict[int, tuple[int, bool]] = {}

    # -- state queries ------------------------------------------------------

    @property
    def complete(self) -> bool:
        return len(self.labels) == len(self.samples)

    def is_closed(self, round_index: int) -> bool:
        return round_index in self.results

    def pending_experts(self, round_index: int | None = None) -> tuple[str, ...]:
        """Experts who have not yet covered every open sample this round."""
        round_index = self.current_round if round_index is None else round_index
        submitted = self._submissions.get(round_index, {})
        open_set = set(self.open_samples)
        return tuple(
            e for e in self.experts
            if not open_set.issubset(submitted.get(e, {}).keys())
        )

    def fresh(self) -> bool:
        return self.current_round == 1 and not self._submissions[1] and not self.results

    # -- round lifecycle ------------------------------------------------------

    def submit_scores(self, expert_id: str, round_index: int,
                      sheets: Iterable[ScoreSheet], *, integral: bool = True) -> int:
        """Store one expert's sheets for the open round; resubmission overwrites.

        Returns the number of sheets stored.
        """
        if self.complete or round_index != self.current_round or self.is_closed(round_index):
            raise RoundClosedError(f"round {round_index} is not open for submissions")
        if expert_id not in self.experts:
            raise UnknownExpertError(f"unknown expert {expert_id!r}")
        sheets = list(sheets)
        for sheet in sheets:
            if sheet.expert_id != expert_id:
                raise UnknownExpertError(
                    f"sheet for sample {sheet.sample_id} names {sheet.expert_id!r}, "
                    f"submission is by {expert_id!r}"
                )
            if sheet.round_index != round_index:
                raise RoundClosedError(
                    f"sheet for sample {sheet.sample_id} targets round {sheet.round_index}"
                )
            if integral:
                for cat, score in sheet.scores.items():
                    if float(score) != int(score):
                        raise ScoreOutOfRangeError(
                            f"sample {sheet.sample_id}, {Category(cat).value}: "
                            f"score {score} is not an integer"
                        )
        covered = {s.sample_id for s in sheets}
        open_set = set(self.open_samples)
        unknown = covered - open_set
        if unknown:
            raise UnknownSampleError(f"samples not open this round: {sorted(unknown)}")
        missing = open_set - covered
        if missing:
            raise IncompleteSheetError(f"submission missing open samples: {sorted(missing)}")
        if len(covered) != len(sheets):
            raise ValueError("duplicate sample in submission")
        self._submissions.setdefault(round_index, {})[expert_id] = {
            s.sample_id: s for s in sheets
        }
        return len(sheets)

    def close_round(self, round_index: int) -> list[RoundResult]:
        """Aggregate the open round; converged samples take their final label."""
        if self.is_closed(round_index):
            raise RoundAlreadyClosedError(f"round {round_index} already closed")
        if round_index != self.current_round:
            raise RoundClosedError(f"round {round_index} is not the open round")
        pending = self.pending_experts(round_index)
        if pending:
            raise MissingSubmissionsError(pending)

        submitted = self._submissions[round_index]
        results: list[RoundResult] = []
        still_open: list[int] = []
        forced_round = round_index >= self.max_rounds
        for sample in self.open_samples:
            totals = [submitted[e][sample].total for e in self.experts]
            mean, sigma = score_sigma(totals)
            converged = sigma < self.epsilon
            results.append(RoundResult(
                sample_id=sample, round_index=round_index, mean=mean,
                sigma=sigma, converged=converged, n_scores=len(totals),
            ))
            if converged:
                self.labels[sample] = (clamp_score(round_half_up(mean)), False)
            elif forced_round:
                self.labels[sample] = (clamp_score(round_half_up(mean)), True)
            else:
                still_open.append(sample)

        self.results[round_index] = results
        self.open_samples = tuple(still_open)
        if still_open:
            self.current_round = round_index + 1
            self._submissions.setdefault(self.current_round, {})
        return results

    def feedback(self, round_index: int, expert_id: str) -> dict:
        """Anonymized aggregates of a closed round; identical for every expert."""
        if expert_id not in self.experts:
            raise UnknownExpertError(f"unknown expert {expert_id!r}")
        if not self.is_closed(round_index):
            raise RoundNotClosedError(f"round {round_index} is not closed yet")
        submitted = self._submissions[round_index]
        payload = {"round": round_index, "samples": []}
        for result in self.results[round_index]:
            totals = sorted(
                submitted[e][result.sample_id].total for e in self.experts
            )
            hist: dict[int, int] = {}
            for t in totals:
                key = round_half_up(t)
                hist[key] = hist.get(key, 0) + 1
            payload["samples"].append({
                "sample_id": result.sample_id,
                "mean": result.mean,
                "sigma": result.sigma,
                "histogram": {str(k): v for k, v in sorted(hist.items())},
                "converged": result.converged,
                "n_scores": result.n_scores,
            })
        return payload

    # -- exports --------------------------------------------------------------

    def export_labels(self) -> list[LabelExport]:
        if not self.complete:
            open_left = [s for s in self.samples if s not in self.labels]
            raise SessionIncompleteError(
                f"{len(open_left)} samples still unlabeled: {open_left[:5]}..."
                if len(open_left) > 5 else
                f"samples still unlabeled: {open_left}"
            )
        return [LabelExport(s, self.labels[s][0], self.labels[s][1]) for s in self.samples]

    def rounds_to_convergence(self) -> dict[int, int]:
        """sample_id -> round at which it received its label."""
        out = {}
        for round_index, results in self.results.items():
            for r in results:
                if r.sample_id in self.labels and r.sample_id not in out:
                    if r.converged or round_index >= self.max_rounds:
                        out[r.sample_id] = round_index
        return out


def open_session(experts: Sequence[str], samples: Sequence[int],
                 epsilon: float = 2.0, max_rounds: int = 10) -> DelphiSession:
    """Round 1 opens with every sample assigned to every expert."""
    return DelphiSession(experts, samples, epsilon=epsilon, max_rounds=max_rounds)


def submit_scores(session: DelphiSession, expert_id: str, round_index: int,
                  sheets: Iterable[ScoreSheet]) -> int:
    return session.submit_scores(expert_id, round_index, sheets)


def close_round(session: DelphiSession, round_index: int) -> list[RoundResult]:
    return session.close_round(round_index)


def feedback(session: DelphiSession, round_index: int, expert_id: str) -> dict:
    return session.feedback(round_index, expert_id)


def export_labels(session: DelphiSession) -> list[LabelExport]:
    return session.export_labels()


def _sheets_from_totals(session: DelphiSession, expert: str, totals: Mapping[int, float]):
    """Spread each total evenly over the five categories (total/5 each <= 5)."""
    sheets = []
    for sample, total in totals.items():
        per_cat = float(total) / len(CATEGORIES)
        sheets.append(ScoreSheet(
            expert_id=expert, round_index=session.current_round,
            sample_id=sample, scores={c: per_cat for c in CATEGORIES},
        ))
    return sheets


def simulate_experts(session: DelphiSession, profile: SimulationProfile, seed: int,
                     latents: Mapping[int, float] | None = None) -> DelphiSession:
    """Drive a fresh session to completion with simulated experts.

    Round 1 draws each expert's total for each sample around the sample's
    latent value (spread initial_sd). Every later round each expert moves its
    previous total toward the prior round's mean by the contraction factor,
    plus fresh noise. Deterministic under seed.
    """
    if not session.fresh():
        raise ValueError("simulate_experts needs a fresh session")
    rng = np.random.default_rng(seed)
    experts = session.experts
    samples = list(session.samples)
    if latents is None:
        latent_arr = rng.uniform(0.0, 25.0, size=len(samples))
    else:
        latent_arr = np.array([float(latents[s]) for s in samples])

    # totals[e, k] for the currently open samples, order matching open_order.
    # Round-1 spread scales with the latent value (cheap consensus on
    # worthless films, real disagreement on valuable ones).
    open_order = list(samples)
    spread = profile.initial_sd * (0.15 + latent_arr / 12.5)
    totals = latent_arr[None, :] + spread[None, :] * rng.normal(
        0.0, 1.0, size=(len(experts), len(samples)))
    totals = np.clip(totals, 0.0, 25.0)

    while not session.complete:
        round_index = session.current_round
        for ei, expert in enumerate(experts):
            session.submit_scores(
                expert, round_index,
                _sheets_from_totals(session, expert,
                                    {s: totals[ei, ki] for ki, s in enumerate(open_order)}),
                integral=False,
            )
        results = {r.sample_id: r for r in session.close_round(round_index)}
        if session.complete:
            break
        keep = [ki for ki, s in enumerate(open_order) if not results[s].converged]
        means = np.array([results[open_order[ki]].mean for ki in keep])
        totals = totals[:, keep]
        open_order = [open_order[ki] for ki in keep]
        if profile.contraction == 1.0:
            totals = np.tile(means, (len(experts), 1))
        else:
            totals = totals + profile.contraction * (means[None, :] - totals)
        if profile.noise_sd > 0:
            totals = totals + rng.normal(0.0, profile.noise_sd, size=totals.shape)
            totals = np.clip(totals, 0.0, 25.0)
    return session


# --- persistence ---------------------------------------------------------------

def session_to_doc(session: DelphiSession) -> dict:
    return {
        "schema_version": SESSION_SCHEMA_VERSION,
        "kind": "delphi_session",
        "experts": list(session.experts),
        "samples": list(session.samples),
        "epsilon": session.epsilon,
        "max_rounds": session.max_rounds,
        "current_round": session.current_round,
        "open_samples": list(session.open_samples),
        "submissions": [
            {
                "round": rnd,
                "expert": expert,
                "sheets": [
                    {"sample_id": sheet.sample_id,
                     "scores": {c.value: sheet.scores[c] for c in CATEGORIES}}
                    for sheet in sorted(by_sample.values(), key=lambda s: s.sample_id)
                ],
            }
            for rnd in sorted(session._submissions)
            for expert, by_sample in sorted(session._submissions[rnd].items())
        ],
        "results": [
            {"round": rnd,
             "sample_id": r.sample_id, "mean": r.mean, "sigma": r.sigma,
             "converged": r.converged, "n_scores": r.n_scores}
            for rnd in sorted(session.results)
            for r in session.results[rnd]
        ],
        "labels": [
            {"sample_id": s, "label": lab, "forced": forced}
            for s, (lab, forced) in sorted(session.labels.items())
        ],
    }


def session_from_doc(doc: dict) -> DelphiSession:
    if doc.get("kind") != "delphi_session":
        raise ValueError("not a session document")
    if doc.get("schema_version") != SESSION_SCHEMA_VERSION:
        raise ValueError(f"unsupported session schema {doc.get('schema_version')}")
    session = DelphiSession(doc["experts"], doc["samples"],
                            epsilon=doc["epsilon"], max_rounds=doc["max_rounds"])
    session.current_round = doc["current_round"]
    session.open_samples = tuple(doc["open_samples"])
    session._submissions = {}
    for entry in doc["submissions"]:
        rnd, expert = entry["round"], entry["expert"]
        sheets = {
            s["sample_id"]: ScoreSheet(
                expert_id=expert, round_index=rnd, sample_id=s["sample_id"],
                scores={Category(c): v for c, v in s["scores"].items()},
            )
            for s in entry["sheets"]
        }
        session._submissions.setdefault(rnd, {})[expert] = sheets
    session._submissions.setdefault(session.current_round, {})
    for entry in doc["results"]:
        session.results.setdefault(entry["round"], []).append(RoundResult(
            sample_id=entry["sample_id"], round_index=entry["round"],
            mean=entry["mean"], sigma=entry["sigma"],
            converged=entry["converged"], n_scores=entry["n_scores"],
        ))
    session.labels = {
        e["sample_id"]: (e["label"], e["forced"]) for e in doc["labels"]
    }
    return session


def save_session(session: DelphiSession, path: str | Path) -> None:
    Path(path).write_text(json.dumps(session_to_doc(session), sort_keys=True, indent=2),
                          encoding="utf-8")


def load_session(path: str | Path) -> DelphiSession:
    return session_from_doc(json.loads(Path(path).read_text(encoding="utf-8")))


def write_labels_csv(rows: Iterable[LabelExport], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "label", "forced"])
        for row in rows:
            writer.writerow([row.sample_id, row.label, str(row.forced).lower()])
