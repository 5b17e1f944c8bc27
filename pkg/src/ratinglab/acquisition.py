"""Acquisition functions: heuristic scores for how informative a candidate
match would be to an emulator. The training loop picks the highest-scoring
candidate each round.

Scoring never mutates the emulator (the lookahead scorer works on a clone),
and every observation count is add-one smoothed before entering a logarithm
or denominator so unseen teams get maximal priority instead of dividing by
zero.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .data import MatchDataset, MatchRecord, Team
from .emulators import Emulator
from .scoring import evaluate_or_nan


class AcquisitionError(RuntimeError):
    """Acquisition function misuse."""


class InapplicablePairingError(AcquisitionError):
    """This acquisition function is undefined for the given emulator."""


@dataclass(frozen=True)
class WeightedAFParams:
    alpha: float = 1.0
    beta_w: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta_w)):
            raise ValueError("weighted-AF weights must be finite")


def binary_entropy(p: float) -> float:
    """Entropy of a win/loss outcome in nats, with 0*log(0) taken as 0."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log(p) + (1.0 - p) * math.log1p(-p))


def _smoothed(count: int) -> int:
    return count + 1


class AcquisitionFunction(ABC):
    name = "af"

    def check_applicable(self, emulator: Emulator) -> None:
        """Raise InapplicablePairingError when the pairing is undefined."""

    @abstractmethod
    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        """Higher means the match is preferred for training."""


class RandomAF(AcquisitionFunction):
    """Uniform scores from a private stream; ignores emulator and match."""

    name = "random"

    def __init__(self, rng: np.random.Generator | None = None):
        self._rng = rng if rng is not None else np.random.default_rng()

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        return float(self._rng.random())


class LeastSeenAF(AcquisitionFunction):
    """Prefers matches whose rated entities have been observed least.

    Score is -sum(log(c_i + 1)) over both teams' rated entities (the teams
    themselves, or all ten players for the player-level emulator); two unseen
    teams score the maximum of 0.
    """

    name = "least_seen"

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        total = 0.0
        for team in (match.team1, match.team2):
            for c in emulator.entity_counts(team):
                total += math.log(_smoothed(c))
        return -total


class MostSeenAF(AcquisitionFunction):
    """Negation of the least-seen score."""

    name = "most_seen"

    def __init__(self) -> None:
        self._least = LeastSeenAF()

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        return -self._least.score(emulator, match)


class LikeliestDrawAF(AcquisitionFunction):
    """Outcome entropy of the predicted result; maximal at p = 0.5."""

    name = "likeliest_draw"

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        return binary_entropy(emulator.predict(match.team1, match.team2))


class LikeliestWinAF(AcquisitionFunction):
    """Negation of the outcome-entropy score; prefers foregone conclusions."""

    name = "likeliest_win"

    def __init__(self) -> None:
        self._draw = LikeliestDrawAF()

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        return -self._draw.score(emulator, match)


class CrossEntropyAF(AcquisitionFunction):
    """Surprisal of the predicted result against everything seen so far.

    The matchup probability p(m) treats team appearances as independent:
    p(m) = (c1/total) * (c2/total) with smoothed counts, total summed over
    all seen teams plus the two candidates. The score is the cross-entropy
    -p*log(p*p(m)) - (1-p)*log((1-p)*p(m)).
    """

    name = "cross_entropy"

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        p = emulator.predict(match.team1, match.team2)
        c1 = _smoothed(emulator.seen_count(match.team1))
        c2 = _smoothed(emulator.seen_count(match.team2))
        total = emulator.smoothed_count_total(match.team1, match.team2)
        p_m = (c1 / total) * (c2 / total)

        def term(q: float) -> float:
            return 0.0 if q == 0.0 else q * math.log(q * p_m)

        return -(term(p) + term(1.0 - p))


class WeightedAF(AcquisitionFunction):
    """Explicit two-factor score: closeness to a draw plus team novelty.

    score = alpha * (1 - |p - (1-p)|)
          + beta_w * sum over both teams of (1/c - 1/(c+1)) with smoothed c.
    """

    name = "weighted"

    def __init__(self, params: WeightedAFParams | None = None):
        self.params = params if params is not None else WeightedAFParams()

    @staticmethod
    def _seen_term(team: Team, emulator: Emulator) -> float:
        c = _smoothed(emulator.seen_count(team))
        return 1.0 / c - 1.0 / (c + 1)

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        p = emulator.predict(match.team1, match.team2)
        draw_factor = 1.0 - abs(2.0 * p - 1.0)
        seen_factor = self._seen_term(match.team1, emulator) + self._seen_term(
            match.team2, emulator
        )
        return self.params.alpha * draw_factor + self.params.beta_w * seen_factor


class TSQualityAF(AcquisitionFunction):
    """The emulator's own match-quality metric; defined only where one exists."""

    name = "ts_quality"

    def check_applicable(self, emulator: Emulator) -> None:
        if not emulator.has_quality:
            raise InapplicablePairingError(
                f"ts_quality is undefined for the {emulator.name} emulator"
            )

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        self.check_applicable(emulator)
        return emulator.quality(match.team1, match.team2)


class CheatAF(AcquisitionFunction):
    """One-step lookahead against held-out data.

    Clones the emulator, fits the clone on the candidate's actual outcome,
    and scores the negated 0/1 prediction error of the clone over the
    holdout pool. The original emulator is untouched.
    """

    name = "cheat"

    def __init__(self, holdout: MatchDataset):
        if holdout is None:
            raise AcquisitionError("cheat AF requires a holdout dataset")
        self._holdout = holdout

    def score(self, emulator: Emulator, match: MatchRecord) -> float:
        if len(self._holdout) == 0:
            raise AcquisitionError("cheat AF holdout is empty")
        trial = emulator.clone()
        trial.fit(match)
        accuracy = evaluate_or_nan(trial, self._holdout)
        if math.isnan(accuracy):
            return 0.0
        return -(1.0 - accuracy)


AF_NAMES = (
    "random",
    "least_seen",
    "most_seen",
    "likeliest_draw",
    "likeliest_win",
    "cross_entropy",
    "weighted",
    "ts_quality",
    "cheat",
)


def make_af(
    name: str,
    params: dict | None = None,
    rng: np.random.Generator | None = None,
    holdout: MatchDataset | None = None,
) -> AcquisitionFunction:
    """Build an acquisition function by registry name.

    ``rng`` feeds the random AF; ``holdout`` feeds the cheat AF (typically the
    live training pool). Both are ignored by the other functions.
    """
    params = params or {}
    simple = {
        "least_seen": LeastSeenAF,
        "most_seen": MostSeenAF,
        "likeliest_draw": LikeliestDrawAF,
        "likeliest_win": LikeliestWinAF,
        "cross_entropy": CrossEntropyAF,
        "ts_quality": TSQualityAF,
    }
    if name in simple:
        if params:
            raise AcquisitionError(f"{name} AF takes no parameters")
        return simple[name]()
    if name == "random":
        if params:
            raise AcquisitionError("random AF takes no parameters")
        return RandomAF(rng)
    if name == "weighted":
        return WeightedAF(WeightedAFParams(**params))
    if name == "cheat":
        if params:
            raise AcquisitionError("cheat AF takes no parameters")
        if holdout is None:
            raise AcquisitionError("cheat AF requires a holdout dataset")
        return CheatAF(holdout)
    raise AcquisitionError(f"unknown acquisition function {name!r} (expected one of {AF_NAMES})")
