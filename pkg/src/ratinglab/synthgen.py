"""Synthetic match generator with known latent team skills.

Teams draw a fixed latent skill; each match draws noisy performances around
the two skills and compares them, with an optional draw band. Because the
latent skills are known, the generator also provides the best achievable
prediction accuracy on its own output, which bounds every emulator from
above.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import MatchDataset, MatchRecord, Outcome, Team

PAIRING_MODES = ("uniform", "skill-banded")

_TIMESTAMP_BASE = 1_500_000_000
_TIMESTAMP_STEP = 3600


@dataclass(frozen=True)
class SynthConfig:
    n_teams: int
    matches: int
    latent_mean: float = 25.0
    latent_sd: float = 25.0 / 3.0
    performance_sd: float = 25.0 / 6.0
    draw_margin: float = 0.0
    pairing: str = "uniform"
    players_per_team: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_teams < 2:
            raise ValueError("need at least two teams")
        if self.matches < 1:
            raise ValueError("need at least one match")
        if self.latent_sd < 0 or self.performance_sd < 0:
            raise ValueError("latent_sd and performance_sd must be non-negative")
        if self.draw_margin < 0:
            raise ValueError("draw_margin must be non-negative")
        if self.pairing not in PAIRING_MODES:
            raise ValueError(f"pairing must be one of {PAIRING_MODES}, got {self.pairing!r}")
        if self.players_per_team != 5:
            raise ValueError("rosters are fixed at five players")


def _make_teams(cfg: SynthConfig) -> list[Team]:
    teams = []
    for i in range(cfg.n_teams):
        tid = f"T{i:04d}"
        roster = tuple(f"{tid}_p{k}" for k in range(cfg.players_per_team))
        teams.append(Team(tid, roster))
    return teams


def _pick_pair(
    cfg: SynthConfig, skills: np.ndarray, rng: np.random.Generator
) -> tuple[int, int]:
    n = cfg.n_teams
    if cfg.pairing == "uniform":
        i, j = rng.choice(n, size=2, replace=False)
        return int(i), int(j)
    # Skill-banded: the second team is drawn with weight decaying in the
    # latent-skill gap, mimicking matchmaking that pairs similar teams.
    i = int(rng.integers(n))
    band = cfg.latent_sd / 2.0 if cfg.latent_sd > 0 else 1.0
    gaps = skills - skills[i]
    weights = np.exp(-(gaps * gaps) / (2.0 * band * band))
    weights[i] = 0.0
    weights /= weights.sum()
    j = int(rng.choice(n, p=weights))
    return i, j


def generate(cfg: SynthConfig) -> tuple[MatchDataset, dict[str, float]]:
    """Generate a dataset plus the latent skill of every team."""
    rng = np.random.default_rng(cfg.seed)
    teams = _make_teams(cfg)
    skills = cfg.latent_mean + cfg.latent_sd * rng.standard_normal(cfg.n_teams)

    records = []
    for m in range(cfg.matches):
        i, j = _pick_pair(cfg, skills, rng)
        perf = skills[[i, j]] + cfg.performance_sd * rng.standard_normal(2)
        diff = perf[0] - perf[1]
        if abs(diff) < cfg.draw_margin:
            outcome = Outcome.DRAW
        elif diff > 0:
            outcome = Outcome.WIN1
        else:
            outcome = Outcome.WIN2
        records.append(
            MatchRecord(
                match_id=f"m{m:06d}",
                team1=teams[i],
                team2=teams[j],
                outcome=outcome,
                timestamp=_TIMESTAMP_BASE + m * _TIMESTAMP_STEP,
            )
        )
    latent = {teams[i].id: float(skills[i]) for i in range(cfg.n_teams)}
    return MatchDataset(records), latent


def bayes_accuracy(dataset: MatchDataset, latent: dict[str, float]) -> float:
    """Accuracy of the oracle that always picks the higher-latent team.

    Draws are skipped as in emulator evaluation; no emulator can beat this
    on average.
    """
    hits = 0.0
    total = 0
    for rec in dataset:
        if rec.outcome is Outcome.DRAW:
            continue
        total += 1
        s1 = latent[rec.team1.id]
        s2 = latent[rec.team2.id]
        if s1 == s2:
            # Exactly tied skills: the outcome is a fair coin for any
            # predictor, so the oracle is credited its expected half.
            hits += 0.5
        elif (s1 > s2) == (rec.outcome is Outcome.WIN1):
            hits += 1.0
    if total == 0:
        raise ValueError("dataset has no non-draw matches")
    return hits / total


def save_latent_skills(latent: dict[str, float], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["team_id", "latent_skill"])
        for tid in sorted(latent):
            writer.writerow([tid, f"{latent[tid]:.10g}"])
