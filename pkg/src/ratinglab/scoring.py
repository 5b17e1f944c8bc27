"""Accuracy scoring shared by the evaluation loop and the lookahead scorer.

A prediction is credited only when the probability falls strictly on the
winner's side of 0.5; an exact 0.5 counts as incorrect, and draws are never
scored.
"""

from __future__ import annotations

from typing import Iterable

from .data import MatchRecord, Outcome


class EvaluationError(ValueError):
    """No scorable (non-draw) matches in the evaluation set."""


def prediction_is_correct(p: float, match: MatchRecord) -> bool:
    if match.outcome is Outcome.WIN1:
        return p > 0.5
    if match.outcome is Outcome.WIN2:
        return p < 0.5
    raise EvaluationError(f"match {match.match_id!r} is a draw and cannot be scored")


def evaluate(emulator, matches: Iterable[MatchRecord]) -> float:
    """Fraction of non-draw matches whose winner the emulator calls correctly."""
    hits = 0
    total = 0
    for match in matches:
        if match.outcome is Outcome.DRAW:
            continue
        total += 1
        if prediction_is_correct(emulator.predict(match.team1, match.team2), match):
            hits += 1
    if total == 0:
        raise EvaluationError("no non-draw matches to evaluate")
    return hits / total


def evaluate_or_nan(emulator, matches: Iterable[MatchRecord]) -> float:
    """evaluate(), but an unscorable set yields NaN instead of raising."""
    try:
        return evaluate(emulator, matches)
    except EvaluationError:
        return float("nan")
