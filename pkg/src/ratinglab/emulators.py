"""Rating-system emulators behind a common predict/fit interface.

Each emulator predicts the probability that team1 beats team2, updates its
internal ratings from observed match results, and tracks how often it has
seen each team (per player, for the player-level variant). Team emulators
treat a whole team as one rated entity; the player variant rates all ten
players of a match individually.
"""

from __future__ import annotations

import copy
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .data import MatchRecord, Outcome, Team
from .gaussmath import std_cdf, std_inv_cdf, v_draw, v_win, w_draw, w_win

STATE_FORMAT_VERSION = 1

GLICKO2_SCALE = 173.7178


class EmulatorError(RuntimeError):
    """Emulator misuse or numerical failure."""


class QualityUnsupportedError(EmulatorError):
    """The emulator has no match-quality metric; the pairing is undefined."""


class VolatilityConvergenceError(EmulatorError):
    """Volatility root-finding failed to converge (bad tau / tolerance)."""


@dataclass(frozen=True)
class EloParams:
    k: float = 32.0
    mu0: float = 1500.0

    def __post_init__(self) -> None:
        if self.k <= 0:
            raise ValueError(f"k-factor must be positive, got {self.k}")


@dataclass(frozen=True)
class Glicko2Params:
    mu0: float = 1500.0
    phi0: float = 350.0
    sigma0: float = 0.06
    tau: float = 0.5
    conv_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.phi0 <= 0 or self.sigma0 <= 0 or self.tau <= 0 or self.conv_tol <= 0:
            raise ValueError("phi0, sigma0, tau and conv_tol must all be positive")


@dataclass(frozen=True)
class TrueSkillParams:
    mu0: float = 25.0
    sigma0: float = 25.0 / 3.0
    beta: float = 25.0 / 6.0
    tau: float = 25.0 / 300.0
    p_draw: float = 0.10

    def __post_init__(self) -> None:
        if self.sigma0 <= 0 or self.beta <= 0 or self.tau < 0:
            raise ValueError("sigma0 and beta must be positive, tau non-negative")
        if not 0.0 <= self.p_draw < 1.0:
            raise ValueError(f"p_draw must be in [0, 1), got {self.p_draw}")


def _score_for(outcome: Outcome, first_team: bool) -> float:
    if outcome is Outcome.DRAW:
        return 0.5
    won = (outcome is Outcome.WIN1) == first_team
    return 1.0 if won else 0.0


class Emulator(ABC):
    """Behavioural contract shared by every rating system.

    predict never mutates ratings; fit is the only mutator and also maintains
    the observation counts backing the count-aware acquisition functions.
    """

    name = "emulator"

    def __init__(self) -> None:
        self._team_counts: dict[str, int] = {}

    # -- observation counting -------------------------------------------------

    def _observe(self, match: MatchRecord) -> None:
        for team in (match.team1, match.team2):
            self._team_counts[team.id] = self._team_counts.get(team.id, 0) + 1

    def seen_count(self, team: Team) -> int:
        """Number of fitted matches involving this team."""
        return self._team_counts.get(team.id, 0)

    def entity_counts(self, team: Team) -> list[int]:
        """Observation counts of the rated entities behind a team (itself, here)."""
        return [self.seen_count(team)]

    def smoothed_count_total(self, team1: Team, team2: Team) -> int:
        """Sum of add-one-smoothed counts over all seen teams plus the candidates."""
        total = self.seen_count(team1) + 1 + self.seen_count(team2) + 1
        for tid, c in self._team_counts.items():
            if tid != team1.id and tid != team2.id:
                total += c + 1
        return total

    # -- core contract ---------------------------------------------------------

    @abstractmethod
    def predict(self, team1: Team, team2: Team) -> float:
        """Probability that team1 wins."""

    def fit(self, match: MatchRecord) -> None:
        self._observe(match)
        self._update(match)

    @abstractmethod
    def _update(self, match: MatchRecord) -> None: ...

    @property
    def has_quality(self) -> bool:
        return False

    def quality(self, team1: Team, team2: Team) -> float:
        raise QualityUnsupportedError(f"{self.name} emulator has no quality metric")

    def clone(self) -> "Emulator":
        return copy.deepcopy(self)

    # -- serialization ---------------------------------------------------------

    def to_state(self) -> dict:
        return {
            "format_version": STATE_FORMAT_VERSION,
            "emulator": self.name,
            "team_counts": dict(sorted(self._team_counts.items())),
            "ratings": self._ratings_state(),
        }

    def state_json(self) -> str:
        return json.dumps(self.to_state(), sort_keys=True)

    @abstractmethod
    def _ratings_state(self) -> dict: ...

    def _load_common(self, state: dict) -> None:
        if state.get("format_version") != STATE_FORMAT_VERSION:
            raise EmulatorError(f"unsupported state format {state.get('format_version')!r}")
        if state.get("emulator") != self.name:
            raise EmulatorError(f"state is for {state.get('emulator')!r}, not {self.name!r}")
        self._team_counts = {k: int(v) for k, v in state["team_counts"].items()}


class RandomEmulator(Emulator):
    """Coin-flip baseline: predictions are uniform draws from its own stream.

    The generator position is runtime state, not rating state, so it is left
    out of the serialized document.
    """

    name = "random"

    def __init__(self, rng: np.random.Generator | None = None):
        super().__init__()
        self._rng = rng if rng is not None else np.random.default_rng()

    def predict(self, team1: Team, team2: Team) -> float:
        return float(self._rng.random())

    def _update(self, match: MatchRecord) -> None:
        pass

    def _ratings_state(self) -> dict:
        return {}

    @classmethod
    def from_state(cls, state: dict, rng: np.random.Generator | None = None) -> "RandomEmulator":
        emu = cls(rng)
        emu._load_common(state)
        return emu


class WinRateEmulator(Emulator):
    """Predicts from each team's observed win proportion.

    p(team1) = (1 + w(team1) - w(team2)) / 2, with draws counted as half a
    win and unseen teams defaulting to w = 0.5.
    """

    name = "winrate"

    def __init__(self) -> None:
        super().__init__()
        self._stats: dict[str, list[int]] = {}  # team id -> [wins, draws, games]

    def _win_fraction(self, team: Team) -> float:
        stats = self._stats.get(team.id)
        if stats is None or stats[2] == 0:
            return 0.5
        wins, draws, games = stats
        return (wins + 0.5 * draws) / games

    def predict(self, team1: Team, team2: Team) -> float:
        return (1.0 + self._win_fraction(team1) - self._win_fraction(team2)) / 2.0

    def _update(self, match: MatchRecord) -> None:
        for team, first in ((match.team1, True), (match.team2, False)):
            stats = self._stats.setdefault(team.id, [0, 0, 0])
            s = _score_for(match.outcome, first)
            if s == 1.0:
                stats[0] += 1
            elif s == 0.5:
                stats[1] += 1
            stats[2] += 1

    def _ratings_state(self) -> dict:
        return {
            tid: {"wins": w, "draws": d, "games": g}
            for tid, (w, d, g) in sorted(self._stats.items())
        }

    @classmethod
    def from_state(cls, state: dict) -> "WinRateEmulator":
        emu = cls()
        emu._load_common(state)
        emu._stats = {
            tid: [int(r["wins"]), int(r["draws"]), int(r["games"])]
            for tid, r in state["ratings"].items()
        }
        return emu


class EloEmulator(Emulator):
    """Classic logistic rating on the 400-point scale with a fixed k-factor."""

    name = "elo"

    def __init__(self, params: EloParams | None = None):
        super().__init__()
        self.params = params if params is not None else EloParams()
        self._ratings: dict[str, float] = {}

    def rating(self, team: Team) -> float:
        return self._ratings.get(team.id, self.params.mu0)

    def predict(self, team1: Team, team2: Team) -> float:
        return 1.0 / (1.0 + 10.0 ** ((self.rating(team2) - self.rating(team1)) / 400.0))

    def _update(self, match: MatchRecord) -> None:
        expected1 = self.predict(match.team1, match.team2)
        s1 = _score_for(match.outcome, True)
        delta = self.params.k * (s1 - expected1)
        self._ratings[match.team1.id] = self.rating(match.team1) + delta
        self._ratings[match.team2.id] = self.rating(match.team2) - delta

    def _ratings_state(self) -> dict:
        return dict(sorted(self._ratings.items()))

    @classmethod
    def from_state(cls, state: dict, params: EloParams | None = None) -> "EloEmulator":
        emu = cls(params)
        emu._load_common(state)
        emu._ratings = {tid: float(r) for tid, r in state["ratings"].items()}
        return emu


def _g(phi: float) -> float:
    """Glicko-2 impact dampening: g(phi) = 1 / sqrt(1 + 3*phi^2 / pi^2)."""
    return 1.0 / math.sqrt(1.0 + 3.0 * phi * phi / (math.pi * math.pi))


def _new_volatility(
    sigma: float, phi: float, v: float, delta: float, tau: float, tol: float
) -> float:
    """Solve for the post-period volatility with the Illinois variant of
    regula falsi, on x = ln(sigma'^2)."""
    a = math.log(sigma * sigma)
    phi_sq = phi * phi

    def f(x: float) -> float:
        ex = math.exp(x)
        num = ex * (delta * delta - phi_sq - v - ex)
        den = 2.0 * (phi_sq + v + ex) ** 2
        return num / den - (x - a) / (tau * tau)

    big_a = a
    if delta * delta > phi_sq + v:
        big_b = math.log(delta * delta - phi_sq - v)
    else:
        k = 1
        while f(a - k * tau) < 0.0:
            k += 1
            if k > 100:
                raise VolatilityConvergenceError("no bracket found for volatility update")
        big_b = a - k * tau

    f_a = f(big_a)
    f_b = f(big_b)
    steps = 0
    while abs(big_b - big_a) > tol:
        steps += 1
        if steps > 100:
            raise VolatilityConvergenceError(
                f"volatility iteration did not converge within 100 steps "
                f"(tau={tau}, tol={tol})"
            )
        big_c = big_a + (big_a - big_b) * f_a / (f_b - f_a)
        f_c = f(big_c)
        if f_c * f_b <= 0.0:
            big_a, f_a = big_b, f_b
        else:
            f_a /= 2.0
        big_b, f_b = big_c, f_c
    return math.exp(big_a / 2.0)


class Glicko2Emulator(Emulator):
    """Glicko-2 ratings with each match fitted as its own rating period.

    Ratings are kept on the display scale (rating, deviation, volatility);
    updates convert to the internal scale, apply one rating period, and
    convert back.
    """

    name = "glicko2"

    def __init__(self, params: Glicko2Params | None = None):
        super().__init__()
        self.params = params if params is not None else Glicko2Params()
        self._ratings: dict[str, tuple[float, float, float]] = {}

    def rating(self, team: Team) -> tuple[float, float, float]:
        p = self.params
        return self._ratings.get(team.id, (p.mu0, p.phi0, p.sigma0))

    def rate_period(
        self,
        rating: tuple[float, float, float],
        results: list[tuple[float, float, float]],
    ) -> tuple[float, float, float]:
        """Apply one rating period against (opp_rating, opp_rd, score) results."""
        p = self.params
        r, rd, sigma = rating
        mu = (r - p.mu0) / GLICKO2_SCALE
        phi = rd / GLICKO2_SCALE
        if not results:
            phi_star = math.sqrt(phi * phi + sigma * sigma)
            return (r, phi_star * GLICKO2_SCALE, sigma)

        opponents = [((ro - p.mu0) / GLICKO2_SCALE, rdo / GLICKO2_SCALE, s) for ro, rdo, s in results]
        v_inv = 0.0
        delta_sum = 0.0
        for mu_j, phi_j, s in opponents:
            g_j = _g(phi_j)
            e_j = 1.0 / (1.0 + math.exp(-g_j * (mu - mu_j)))
            v_inv += g_j * g_j * e_j * (1.0 - e_j)
            delta_sum += g_j * (s - e_j)
        v = 1.0 / v_inv
        delta = v * delta_sum

        sigma_new = _new_volatility(sigma, phi, v, delta, p.tau, p.conv_tol)
        phi_star = math.sqrt(phi * phi + sigma_new * sigma_new)
        phi_new = 1.0 / math.sqrt(1.0 / (phi_star * phi_star) + 1.0 / v)
        mu_new = mu + phi_new * phi_new * delta_sum
        return (p.mu0 + GLICKO2_SCALE * mu_new, GLICKO2_SCALE * phi_new, sigma_new)

    def predict(self, team1: Team, team2: Team) -> float:
        p = self.params
        r1, rd1, _ = self.rating(team1)
        r2, rd2, _ = self.rating(team2)
        mu1 = (r1 - p.mu0) / GLICKO2_SCALE
        mu2 = (r2 - p.mu0) / GLICKO2_SCALE
        phi1 = rd1 / GLICKO2_SCALE
        phi2 = rd2 / GLICKO2_SCALE
        # Combined deviation keeps the prediction symmetric between the teams.
        g = _g(math.sqrt(phi1 * phi1 + phi2 * phi2))
        return 1.0 / (1.0 + math.exp(-g * (mu1 - mu2)))

    def _update(self, match: MatchRecord) -> None:
        r1 = self.rating(match.team1)
        r2 = self.rating(match.team2)
        s1 = _score_for(match.outcome, True)
        new1 = self.rate_period(r1, [(r2[0], r2[1], s1)])
        new2 = self.rate_period(r2, [(r1[0], r1[1], 1.0 - s1)])
        self._ratings[match.team1.id] = new1
        self._ratings[match.team2.id] = new2

    def _ratings_state(self) -> dict:
        return {
            tid: {"rating": r, "rd": rd, "volatility": vol}
            for tid, (r, rd, vol) in sorted(self._ratings.items())
        }

    @classmethod
    def from_state(cls, state: dict, params: Glicko2Params | None = None) -> "Glicko2Emulator":
        emu = cls(params)
        emu._load_common(state)
        emu._ratings = {
            tid: (float(r["rating"]), float(r["rd"]), float(r["volatility"]))
            for tid, r in state["ratings"].items()
        }
        return emu


class TrueSkillTeamEmulator(Emulator):
    """Gaussian skill ratings with one rated entity per team.

    A match result truncates the Gaussian over the performance difference;
    moment matching maps the truncation back onto each team's (mu, sigma).
    """

    name = "trueskill"

    n_entities = 2

    def __init__(self, params: TrueSkillParams | None = None):
        super().__init__()
        self.params = params if params is not None else TrueSkillParams()
        self._ratings: dict[str, tuple[float, float]] = {}

    def rating(self, team: Team) -> tuple[float, float]:
        return self._ratings.get(team.id, (self.params.mu0, self.params.sigma0))

    def _draw_margin(self) -> float:
        p = self.params
        if p.p_draw == 0.0:
            return 0.0
        return std_inv_cdf((p.p_draw + 1.0) / 2.0) * math.sqrt(self.n_entities) * p.beta

    def _c_squared(self, team1: Team, team2: Team) -> float:
        p = self.params
        _, s1 = self.rating(team1)
        _, s2 = self.rating(team2)
        return self.n_entities * p.beta * p.beta + s1 * s1 + s2 * s2

    def predict(self, team1: Team, team2: Team) -> float:
        mu1, _ = self.rating(team1)
        mu2, _ = self.rating(team2)
        return std_cdf((mu1 - mu2) / math.sqrt(self._c_squared(team1, team2)))

    @property
    def has_quality(self) -> bool:
        return True

    def quality(self, team1: Team, team2: Team) -> float:
        p = self.params
        mu1, _ = self.rating(team1)
        mu2, _ = self.rating(team2)
        c2 = self._c_squared(team1, team2)
        nb2 = self.n_entities * p.beta * p.beta
        return math.sqrt(nb2 / c2) * math.exp(-((mu1 - mu2) ** 2) / (2.0 * c2))

    def _update(self, match: MatchRecord) -> None:
        p = self.params
        mu1, s1 = self.rating(match.team1)
        mu2, s2 = self.rating(match.team2)
        var1 = s1 * s1 + p.tau * p.tau
        var2 = s2 * s2 + p.tau * p.tau
        c2 = self.n_entities * p.beta * p.beta + var1 + var2
        c = math.sqrt(c2)
        eps = self._draw_margin()

        if match.outcome is Outcome.DRAW:
            t = (mu1 - mu2) / c
            v = v_draw(t, eps / c)
            w = w_draw(t, eps / c)
            mu1 += var1 / c * v
            mu2 -= var2 / c * v
        else:
            win1 = match.outcome is Outcome.WIN1
            mu_w, var_w = (mu1, var1) if win1 else (mu2, var2)
            mu_l, var_l = (mu2, var2) if win1 else (mu1, var1)
            t = (mu_w - mu_l) / c
            v = v_win(t, eps / c)
            w = w_win(t, eps / c)
            mu_w += var_w / c * v
            mu_l -= var_l / c * v
            mu1, var1 = (mu_w, var_w) if win1 else (mu_l, var_l)
            mu2, var2 = (mu_l, var_l) if win1 else (mu_w, var_w)

        var1 *= 1.0 - var1 / c2 * w
        var2 *= 1.0 - var2 / c2 * w
        self._ratings[match.team1.id] = (mu1, math.sqrt(var1))
        self._ratings[match.team2.id] = (mu2, math.sqrt(var2))

    def _ratings_state(self) -> dict:
        return {tid: {"mu": mu, "sigma": s} for tid, (mu, s) in sorted(self._ratings.items())}

    @classmethod
    def from_state(
        cls, state: dict, params: TrueSkillParams | None = None
    ) -> "TrueSkillTeamEmulator":
        emu = cls(params)
        emu._load_common(state)
        emu._ratings = {
            tid: (float(r["mu"]), float(r["sigma"])) for tid, r in state["ratings"].items()
        }
        return emu


class TrueSkillPlayersEmulator(Emulator):
    """TrueSkill over individual players: one update adjusts all ten ratings.

    Team skill is the sum of the roster's player skills, so players carry
    their ratings with them when they change teams.
    """

    name = "tsplayers"

    def __init__(self, params: TrueSkillParams | None = None):
        super().__init__()
        self.params = params if params is not None else TrueSkillParams()
        self._players: dict[str, tuple[float, float]] = {}
        self._player_counts: dict[str, int] = {}
        self._team_rosters: dict[str, tuple[str, ...]] = {}

    def player_rating(self, player_id: str) -> tuple[float, float]:
        return self._players.get(player_id, (self.params.mu0, self.params.sigma0))

    def _observe(self, match: MatchRecord) -> None:
        super()._observe(match)
        for team in (match.team1, match.team2):
            self._team_rosters[team.id] = team.roster
            for pid in team.roster:
                self._player_counts[pid] = self._player_counts.get(pid, 0) + 1

    def seen_count(self, team: Team) -> int:
        return sum(self._player_counts.get(pid, 0) for pid in team.roster)

    def entity_counts(self, team: Team) -> list[int]:
        return [self._player_counts.get(pid, 0) for pid in team.roster]

    def smoothed_count_total(self, team1: Team, team2: Team) -> int:
        total = self.seen_count(team1) + 1 + self.seen_count(team2) + 1
        for tid, roster in self._team_rosters.items():
            if tid != team1.id and tid != team2.id:
                total += sum(self._player_counts.get(pid, 0) for pid in roster) + 1
        return total

    def _team_moments(self, team: Team) -> tuple[float, float]:
        mu = 0.0
        var = 0.0
        for pid in team.roster:
            m, s = self.player_rating(pid)
            mu += m
            var += s * s
        return mu, var

    def _c_squared(self, team1: Team, team2: Team) -> float:
        p = self.params
        _, v1 = self._team_moments(team1)
        _, v2 = self._team_moments(team2)
        n = 2 * len(team1.roster)
        return n * p.beta * p.beta + v1 + v2

    def predict(self, team1: Team, team2: Team) -> float:
        mu1, _ = self._team_moments(team1)
        mu2, _ = self._team_moments(team2)
        return std_cdf((mu1 - mu2) / math.sqrt(self._c_squared(team1, team2)))

    @property
    def has_quality(self) -> bool:
        return True

    def quality(self, team1: Team, team2: Team) -> float:
        p = self.params
        mu1, _ = self._team_moments(team1)
        mu2, _ = self._team_moments(team2)
        c2 = self._c_squared(team1, team2)
        n = 2 * len(team1.roster)
        nb2 = n * p.beta * p.beta
        return math.sqrt(nb2 / c2) * math.exp(-((mu1 - mu2) ** 2) / (2.0 * c2))

    def _update(self, match: MatchRecord) -> None:
        p = self.params
        team1, team2 = match.team1, match.team2
        n = 2 * len(team1.roster)

        inflated: dict[str, tuple[float, float]] = {}
        for pid in team1.roster + team2.roster:
            mu_i, s_i = self.player_rating(pid)
            inflated[pid] = (mu_i, s_i * s_i + p.tau * p.tau)

        mu1 = sum(inflated[pid][0] for pid in team1.roster)
        mu2 = sum(inflated[pid][0] for pid in team2.roster)
        c2 = n * p.beta * p.beta + sum(var for _, var in inflated.values())
        c = math.sqrt(c2)
        eps = std_inv_cdf((p.p_draw + 1.0) / 2.0) * math.sqrt(n) * p.beta if p.p_draw else 0.0

        if match.outcome is Outcome.DRAW:
            t = (mu1 - mu2) / c
            v = v_draw(t, eps / c)
            w = w_draw(t, eps / c)
            sign1 = 1.0
        else:
            win1 = match.outcome is Outcome.WIN1
            t = ((mu1 - mu2) if win1 else (mu2 - mu1)) / c
            v = v_win(t, eps / c)
            w = w_win(t, eps / c)
            sign1 = 1.0 if win1 else -1.0

        for team, sign in ((team1, sign1), (team2, -sign1)):
            for pid in team.roster:
                mu_i, var_i = inflated[pid]
                mu_i += sign * var_i / c * v
                var_i *= 1.0 - var_i / c2 * w
                self._players[pid] = (mu_i, math.sqrt(var_i))

    def _ratings_state(self) -> dict:
        return {
            "players": {
                pid: {"mu": mu, "sigma": s} for pid, (mu, s) in sorted(self._players.items())
            },
            "player_counts": dict(sorted(self._player_counts.items())),
            "team_rosters": {tid: list(r) for tid, r in sorted(self._team_rosters.items())},
        }

    @classmethod
    def from_state(
        cls, state: dict, params: TrueSkillParams | None = None
    ) -> "TrueSkillPlayersEmulator":
        emu = cls(params)
        emu._load_common(state)
        ratings = state["ratings"]
        emu._players = {
            pid: (float(r["mu"]), float(r["sigma"])) for pid, r in ratings["players"].items()
        }
        emu._player_counts = {pid: int(c) for pid, c in ratings["player_counts"].items()}
        emu._team_rosters = {tid: tuple(r) for tid, r in ratings["team_rosters"].items()}
        return emu


EMULATOR_NAMES = ("random", "winrate", "elo", "glicko2", "trueskill", "tsplayers")


def make_emulator(
    name: str,
    params: dict | None = None,
    rng: np.random.Generator | None = None,
) -> Emulator:
    """Build an emulator by registry name with optional parameter overrides."""
    params = params or {}
    if name == "random":
        if params:
            raise EmulatorError("random emulator takes no parameters")
        return RandomEmulator(rng)
    if name == "winrate":
        if params:
            raise EmulatorError("winrate emulator takes no parameters")
        return WinRateEmulator()
    if name == "elo":
        return EloEmulator(EloParams(**params))
    if name == "glicko2":
        return Glicko2Emulator(Glicko2Params(**params))
    if name == "trueskill":
        return TrueSkillTeamEmulator(TrueSkillParams(**params))
    if name == "tsplayers":
        return TrueSkillPlayersEmulator(TrueSkillParams(**params))
    raise EmulatorError(f"unknown emulator {name!r} (expected one of {EMULATOR_NAMES})")
