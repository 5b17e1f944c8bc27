"""Shared fixtures and tiny dataset builders."""

from __future__ import annotations

import pytest

from ratinglab.data import MatchDataset, MatchRecord, Outcome, Team


def make_team(tid: str) -> Team:
    return Team(tid, tuple(f"{tid}_p{i}" for i in range(5)))


def make_match(
    mid: str, team1: Team, team2: Team, outcome: Outcome = Outcome.WIN1, ts: int = 0
) -> MatchRecord:
    return MatchRecord(mid, team1, team2, outcome, ts)


@pytest.fixture
def teams() -> list[Team]:
    return [make_team(f"T{i}") for i in range(6)]


@pytest.fixture
def small_dataset(teams) -> MatchDataset:
    records = [
        make_match("m0", teams[0], teams[1], Outcome.WIN1, 100),
        make_match("m1", teams[1], teams[2], Outcome.WIN2, 200),
        make_match("m2", teams[0], teams[2], Outcome.DRAW, 300),
        make_match("m3", teams[2], teams[3], Outcome.WIN1, 400),
        make_match("m4", teams[3], teams[0], Outcome.WIN2, 500),
        make_match("m5", teams[4], teams[5], Outcome.WIN1, 600),
    ]
    return MatchDataset(records)
