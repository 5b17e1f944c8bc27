"""Match datasets: domain types, file ingestion, splitting, and the mutable training pool.

A match is two five-player teams and an outcome (win for either side, or a
draw). Datasets load from flat CSV or JSONL files, split 50/50 into train and
eval sets, and support the pop-based consumption the training simulator uses.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

ROSTER_SIZE = 5

CSV_COLUMNS = (
    ["match_id", "team1", "team2"]
    + [f"p1_{i}" for i in range(1, 6)]
    + [f"p2_{i}" for i in range(1, 6)]
    + ["outcome", "timestamp"]
)


class DatasetError(ValueError):
    """Malformed dataset file or invalid dataset operation."""


class Outcome(str, Enum):
    WIN1 = "win1"
    WIN2 = "win2"
    DRAW = "draw"


@dataclass(frozen=True)
class Team:
    """A named team with a roster of exactly five distinct players."""

    id: str
    roster: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise DatasetError("team id must be non-empty")
        if len(self.roster) != ROSTER_SIZE:
            raise DatasetError(
                f"team {self.id!r} roster has {len(self.roster)} players, expected {ROSTER_SIZE}"
            )
        if len(set(self.roster)) != ROSTER_SIZE:
            raise DatasetError(f"team {self.id!r} roster has duplicate players")
        if any(not p for p in self.roster):
            raise DatasetError(f"team {self.id!r} roster has an empty player id")


@dataclass(frozen=True)
class MatchRecord:
    match_id: str
    team1: Team
    team2: Team
    outcome: Outcome
    timestamp: int

    def __post_init__(self) -> None:
        if not self.match_id:
            raise DatasetError("match_id must be non-empty")
        if self.team1.id == self.team2.id:
            raise DatasetError(f"match {self.match_id!r}: team plays itself ({self.team1.id!r})")

    @property
    def pair_key(self) -> tuple[str, str]:
        """Order-independent key for the pair of teams."""
        a, b = self.team1.id, self.team2.id
        return (a, b) if a <= b else (b, a)


class MatchDataset:
    """An ordered collection of matches with a team-pair index.

    Immutable after construction except through :meth:`pop`, which is how the
    simulator consumes its training pool. The index maps each unordered team
    pair to the ids of the matches between them.
    """

    def __init__(self, records: Iterable[MatchRecord] = ()):
        self._records: dict[str, MatchRecord] = {}
        self._index: dict[tuple[str, str], list[str]] = {}
        for rec in records:
            self._add(rec)

    def _add(self, rec: MatchRecord) -> None:
        if rec.match_id in self._records:
            raise DatasetError(f"duplicate match_id {rec.match_id!r}")
        self._records[rec.match_id] = rec
        self._index.setdefault(rec.pair_key, []).append(rec.match_id)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[MatchRecord]:
        return iter(self._records.values())

    def __contains__(self, match_id: str) -> bool:
        return match_id in self._records

    def get(self, match_id: str) -> MatchRecord:
        return self._records[match_id]

    @property
    def match_ids(self) -> list[str]:
        return list(self._records)

    def matches_between(self, team1_id: str, team2_id: str) -> list[str]:
        key = (team1_id, team2_id) if team1_id <= team2_id else (team2_id, team1_id)
        return list(self._index.get(key, ()))

    def team_ids(self) -> set[str]:
        out: set[str] = set()
        for rec in self:
            out.add(rec.team1.id)
            out.add(rec.team2.id)
        return out

    def copy(self) -> "MatchDataset":
        return MatchDataset(self)

    def pop(self, match_id: str) -> MatchRecord:
        """Remove and return one match; keeps the pair index consistent."""
        if match_id not in self._records:
            raise DatasetError(f"unknown match_id {match_id!r}")
        rec = self._records.pop(match_id)
        ids = self._index[rec.pair_key]
        ids.remove(match_id)
        if not ids:
            del self._index[rec.pair_key]
        return rec


@dataclass(frozen=True)
class DatasetSplit:
    train: MatchDataset
    eval: MatchDataset
    seed: int


def _parse_row(values: dict[str, str], row_num: int) -> MatchRecord:
    missing = [c for c in CSV_COLUMNS if values.get(c) in (None, "")]
    if missing:
        raise DatasetError(f"row {row_num}: missing fields {missing}")
    try:
        timestamp = int(values["timestamp"])
    except ValueError:
        raise DatasetError(f"row {row_num}: timestamp {values['timestamp']!r} is not an integer")
    outcome_token = values["outcome"].strip().lower()
    try:
        outcome = Outcome(outcome_token)
    except ValueError:
        raise DatasetError(
            f"row {row_num}: unknown outcome {values['outcome']!r} "
            f"(expected one of {[o.value for o in Outcome]})"
        )
    try:
        team1 = Team(values["team1"], tuple(values[f"p1_{i}"] for i in range(1, 6)))
        team2 = Team(values["team2"], tuple(values[f"p2_{i}"] for i in range(1, 6)))
        return MatchRecord(values["match_id"], team1, team2, outcome, timestamp)
    except DatasetError as exc:
        raise DatasetError(f"row {row_num}: {exc}") from exc


def _rows_from_csv(path: Path) -> Iterator[tuple[dict[str, str], int]]:
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise DatasetError(f"{path}: empty file")
        unknown = set(reader.fieldnames) - set(CSV_COLUMNS)
        if set(CSV_COLUMNS) - set(reader.fieldnames):
            raise DatasetError(
                f"{path}: header must contain columns {CSV_COLUMNS}, got {reader.fieldnames}"
            )
        if unknown:
            raise DatasetError(f"{path}: unexpected columns {sorted(unknown)}")
        for row_num, row in enumerate(reader, start=2):
            yield row, row_num


def _rows_from_jsonl(path: Path) -> Iterator[tuple[dict[str, str], int]]:
    with path.open(encoding="utf-8") as f:
        for row_num, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"row {row_num}: invalid JSON ({exc})") from exc
            players1 = obj.get("players1", [])
            players2 = obj.get("players2", [])
            if len(players1) != ROSTER_SIZE:
                raise DatasetError(
                    f"row {row_num}: team {obj.get('team1')!r} roster has "
                    f"{len(players1)} players, expected {ROSTER_SIZE}"
                )
            if len(players2) != ROSTER_SIZE:
                raise DatasetError(
                    f"row {row_num}: team {obj.get('team2')!r} roster has "
                    f"{len(players2)} players, expected {ROSTER_SIZE}"
                )
            flat = {
                "match_id": str(obj.get("match_id", "")),
                "team1": str(obj.get("team1", "")),
                "team2": str(obj.get("team2", "")),
                "outcome": str(obj.get("outcome", "")),
                "timestamp": str(obj.get("timestamp", "")),
            }
            for i, p in enumerate(players1, start=1):
                flat[f"p1_{i}"] = str(p)
            for i, p in enumerate(players2, start=1):
                flat[f"p2_{i}"] = str(p)
            yield flat, row_num


def load_dataset(path: str | Path, format: str = "csv") -> MatchDataset:
    """Load a dataset file.

    CSV files carry the columns ``match_id,team1,team2,p1_1..p1_5,p2_1..p2_5,
    outcome,timestamp``; JSONL files carry one object per line with the same
    fields except that rosters are the lists ``players1`` and ``players2``.
    Outcome tokens are ``win1``, ``win2``, ``draw``. Errors name the offending
    row.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")
    if format == "csv":
        rows = _rows_from_csv(path)
    elif format == "jsonl":
        rows = _rows_from_jsonl(path)
    else:
        raise DatasetError(f"unknown dataset format {format!r} (expected 'csv' or 'jsonl')")
    dataset = MatchDataset()
    for values, row_num in rows:
        rec = _parse_row(values, row_num)
        try:
            dataset._add(rec)
        except DatasetError as exc:
            raise DatasetError(f"row {row_num}: {exc}") from exc
    return dataset


def save_dataset(dataset: MatchDataset, path: str | Path) -> None:
    """Write a dataset to CSV in the standard column layout."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for rec in dataset:
            writer.writerow(
                [rec.match_id, rec.team1.id, rec.team2.id]
                + list(rec.team1.roster)
                + list(rec.team2.roster)
                + [rec.outcome.value, rec.timestamp]
            )


def split_dataset(dataset: MatchDataset, seed: int) -> DatasetSplit:
    """Uniform random 50/50 partition; odd sizes put the extra match in train."""
    n = len(dataset)
    if n < 2:
        raise DatasetError(f"dataset of size {n} is too small to split")
    rng = np.random.default_rng(seed)
    ids = dataset.match_ids
    perm = rng.permutation(n)
    n_train = (n + 1) // 2
    train_ids = {ids[i] for i in perm[:n_train]}
    train = MatchDataset(rec for rec in dataset if rec.match_id in train_ids)
    eval_set = MatchDataset(rec for rec in dataset if rec.match_id not in train_ids)
    return DatasetSplit(train=train, eval=eval_set, seed=seed)


def sample_candidates(
    dataset: MatchDataset, k: int, rng: np.random.Generator
) -> list[MatchRecord]:
    """Sample min(k, |dataset|) distinct matches uniformly, without mutation."""
    n = len(dataset)
    if n == 0:
        raise DatasetError("cannot sample candidates from an empty dataset")
    ids = dataset.match_ids
    take = min(k, n)
    chosen = rng.choice(n, size=take, replace=False)
    return [dataset.get(ids[i]) for i in chosen]
