"""Acquisition-function worked examples, purity, and ordering contracts."""

import math

import numpy as np
import pytest

from ratinglab.acquisition import (
    AF_NAMES,
    AcquisitionError,
    CheatAF,
    CrossEntropyAF,
    InapplicablePairingError,
    LeastSeenAF,
    LikeliestDrawAF,
    LikeliestWinAF,
    MostSeenAF,
    RandomAF,
    TSQualityAF,
    WeightedAF,
    WeightedAFParams,
    binary_entropy,
    make_af,
)
from ratinglab.data import MatchDataset, Outcome
from ratinglab.emulators import (
    EloEmulator,
    TrueSkillPlayersEmulator,
    TrueSkillTeamEmulator,
    WinRateEmulator,
    make_emulator,
)

from conftest import make_match, make_team

A = make_team("A")
B = make_team("B")
C = make_team("C")
D = make_team("D")


class FixedPredictEmulator(EloEmulator):
    """Test stub: predict a fixed probability regardless of state."""

    def __init__(self, p: float):
        super().__init__()
        self._p = p

    def predict(self, team1, team2):
        return self._p


class TestRandomAF:
    def test_deterministic_under_fixed_rng(self):
        m = make_match("m0", A, B)
        a = RandomAF(np.random.default_rng(3)).score(EloEmulator(), m)
        b = RandomAF(np.random.default_rng(3)).score(EloEmulator(), m)
        assert a == b

    def test_uniform_distribution(self):
        af = RandomAF(np.random.default_rng(0))
        m = make_match("m0", A, B)
        emu = EloEmulator()
        draws = np.array([af.score(emu, m) for _ in range(100_000)])
        assert draws.mean() == pytest.approx(0.5, abs=0.005)
        hist, _ = np.histogram(draws, bins=10, range=(0, 1))
        assert hist.min() > 100_000 / 10 * 0.9

    def test_ignores_emulator_state(self):
        m = make_match("m0", A, B)
        one = RandomAF(np.random.default_rng(5))
        two = RandomAF(np.random.default_rng(5))
        trained = EloEmulator()
        trained.fit(make_match("x", A, B))
        assert one.score(EloEmulator(), m) == two.score(trained, m)


class TestLeastAndMostSeen:
    def test_unseen_teams_score_zero(self):
        af = LeastSeenAF()
        assert af.score(EloEmulator(), make_match("m0", A, B)) == 0.0

    def test_direct_value(self):
        emu = EloEmulator()
        emu.fit(make_match("x0", A, C))
        emu.fit(make_match("x1", B, C))
        emu.fit(make_match("x2", B, C))
        emu.fit(make_match("x3", B, D))
        # counts: A=1, B=3
        af = LeastSeenAF()
        assert af.score(emu, make_match("m0", A, B)) == pytest.approx(
            -(math.log(2) + math.log(4)), abs=1e-12
        )

    def test_decreasing_in_counts(self):
        emu = EloEmulator()
        af = LeastSeenAF()
        m = make_match("m0", A, B)
        prev = af.score(emu, m)
        for i in range(5):
            emu.fit(make_match(f"x{i}", A, B))
            cur = af.score(emu, m)
            assert cur < prev
            prev = cur

    def test_player_emulator_uses_player_counts(self):
        emu = TrueSkillPlayersEmulator()
        emu.fit(make_match("x0", A, B))
        af = LeastSeenAF()
        # All ten players seen once: -10 * ln 2.
        assert af.score(emu, make_match("m0", A, B)) == pytest.approx(
            -10 * math.log(2), abs=1e-12
        )

    def test_most_seen_is_negation(self):
        emu = EloEmulator()
        emu.fit(make_match("x0", A, B))
        emu.fit(make_match("x1", A, C))
        least, most = LeastSeenAF(), MostSeenAF()
        for m in (make_match("m0", A, B), make_match("m1", C, D), make_match("m2", B, D)):
            assert most.score(emu, m) == -least.score(emu, m)

    def test_argmax_flip(self):
        emu = EloEmulator()
        emu.fit(make_match("x0", A, B))
        candidates = [make_match("m0", A, B), make_match("m1", C, D)]
        least = [LeastSeenAF().score(emu, m) for m in candidates]
        most = [MostSeenAF().score(emu, m) for m in candidates]
        assert int(np.argmax(least)) != int(np.argmax(most))


class TestLikeliestDrawAndWin:
    def test_half_gives_ln2(self):
        af = LikeliestDrawAF()
        assert af.score(FixedPredictEmulator(0.5), make_match("m0", A, B)) == pytest.approx(
            math.log(2), abs=1e-12
        )

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_degenerate_entropy(self, p):
        af = LikeliestDrawAF()
        assert af.score(FixedPredictEmulator(p), make_match("m0", A, B)) == 0.0

    def test_p09_value(self):
        af = LikeliestDrawAF()
        expected = -(0.9 * math.log(0.9) + 0.1 * math.log(0.1))
        assert af.score(FixedPredictEmulator(0.9), make_match("m0", A, B)) == pytest.approx(
            expected, abs=1e-12
        )
        assert expected == pytest.approx(0.3251, abs=1e-4)

    def test_symmetry_in_team_order(self):
        for p in np.linspace(0.01, 0.99, 21):
            assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)

    def test_likeliest_win_negation_and_maximum(self):
        win = LikeliestWinAF()
        m = make_match("m0", A, B)
        scores = {p: win.score(FixedPredictEmulator(p), m) for p in (0.0, 0.3, 0.5, 1.0)}
        assert scores[0.0] == 0.0
        assert scores[1.0] == 0.0
        assert scores[0.5] == pytest.approx(-math.log(2), abs=1e-12)
        assert scores[0.0] > scores[0.3] > scores[0.5]


class TestCrossEntropy:
    def test_two_team_worked_example(self):
        # Both teams observed once (smoothed counts 2, total 4), p = 0.5:
        # -ln(0.5 * 0.25) = ln 8.
        emu = WinRateEmulator()
        emu.fit(make_match("x0", A, B, Outcome.DRAW))
        af = CrossEntropyAF()
        assert af.score(emu, make_match("m0", A, B)) == pytest.approx(
            math.log(8), abs=1e-9
        )
        assert math.log(8) == pytest.approx(2.0794, abs=1e-4)

    def test_decreasing_in_candidate_count(self):
        # Partial monotonicity in c(T1): move count mass from a bystander
        # team onto the candidate so the smoothed total stays fixed.
        af = CrossEntropyAF()
        m = make_match("m0", A, B)
        prev = None
        for k in range(5):
            emu = FixedPredictEmulator(0.5)
            emu._team_counts = {"A": k, "B": 0, "C": 10 - k}
            cur = af.score(emu, m)
            if prev is not None:
                assert cur < prev
            prev = cur

    def test_maximized_at_half_for_fixed_counts(self):
        emu_half = FixedPredictEmulator(0.5)
        emu_ninety = FixedPredictEmulator(0.9)
        m = make_match("m0", A, B)
        af = CrossEntropyAF()
        assert af.score(emu_half, m) > af.score(emu_ninety, m)

    def test_zero_prediction_is_finite(self):
        af = CrossEntropyAF()
        assert math.isfinite(af.score(FixedPredictEmulator(0.0), make_match("m0", A, B)))


class TestWeighted:
    def test_worked_example_equals_two(self):
        af = WeightedAF(WeightedAFParams(alpha=1.0, beta_w=1.0))
        score = af.score(FixedPredictEmulator(0.5), make_match("m0", A, B))
        assert score == 2.0

    def test_zero_weights(self):
        af = WeightedAF(WeightedAFParams(alpha=0.0, beta_w=0.0))
        emu = WinRateEmulator()
        emu.fit(make_match("x0", A, B))
        for m in (make_match("m0", A, B), make_match("m1", C, D)):
            assert af.score(emu, m) == 0.0

    def test_draw_factor_maximized_at_half(self):
        af = WeightedAF(WeightedAFParams(alpha=1.0, beta_w=0.0))
        m = make_match("m0", A, B)
        assert af.score(FixedPredictEmulator(0.5), m) == 1.0
        assert af.score(FixedPredictEmulator(0.8), m) == pytest.approx(0.4, abs=1e-12)

    def test_seen_factor_telescopes(self):
        af = WeightedAF(WeightedAFParams(alpha=0.0, beta_w=1.0))
        emu = WinRateEmulator()
        m = make_match("m0", A, B)
        assert af.score(emu, m) == pytest.approx(1.0, abs=1e-12)  # 1/2 per unseen team
        emu.fit(make_match("x0", A, B))
        assert af.score(emu, m) == pytest.approx(2 * (1 / 2 - 1 / 3), abs=1e-12)


class TestTSQuality:
    def test_equal_defaults_value(self):
        af = TSQualityAF()
        emu = TrueSkillTeamEmulator()
        assert af.score(emu, make_match("m0", A, B)) == pytest.approx(
            math.sqrt(0.2), abs=1e-9
        )

    def test_elo_pairing_undefined(self):
        af = TSQualityAF()
        with pytest.raises(InapplicablePairingError):
            af.check_applicable(EloEmulator())
        with pytest.raises(InapplicablePairingError):
            af.score(EloEmulator(), make_match("m0", A, B))

    def test_maximized_at_zero_gap(self):
        af = TSQualityAF()
        emu = TrueSkillTeamEmulator()
        emu._ratings = {"A": (25.0, 25 / 3), "B": (25.0, 25 / 3)}
        q0 = af.score(emu, make_match("m0", A, B))
        emu._ratings["A"] = (32.0, 25 / 3)
        assert af.score(emu, make_match("m0", A, B)) < q0


class TestCheat:
    def _holdout(self):
        return MatchDataset(
            [
                make_match("h0", A, B, Outcome.WIN1),
                make_match("h1", C, D, Outcome.WIN2),
            ]
        )

    def test_score_is_negated_error(self):
        emu = WinRateEmulator()
        af = CheatAF(self._holdout())
        # Fitting A beats B makes the clone call h0 correctly; h1 stays 0.5
        # which counts as incorrect -> error 0.5.
        score = af.score(emu, make_match("m0", A, B, Outcome.WIN1))
        assert score == pytest.approx(-0.5, abs=1e-12)

    def test_never_positive(self):
        rng = np.random.default_rng(3)
        af = CheatAF(self._holdout())
        emu = WinRateEmulator()
        for i in range(20):
            outcome = [Outcome.WIN1, Outcome.WIN2, Outcome.DRAW][int(rng.integers(3))]
            m = make_match(f"m{i}", A, B, outcome)
            assert af.score(emu, m) <= 0.0

    def test_original_emulator_untouched(self):
        emu = WinRateEmulator()
        before = emu.state_json()
        CheatAF(self._holdout()).score(emu, make_match("m0", A, B, Outcome.WIN1))
        assert emu.state_json() == before

    def test_perfect_holdout_scores_zero(self):
        holdout = MatchDataset([make_match("h0", A, B, Outcome.WIN1)])
        emu = WinRateEmulator()
        score = CheatAF(holdout).score(emu, make_match("m0", A, B, Outcome.WIN1))
        assert score == 0.0

    def test_empty_holdout_rejected(self):
        af = CheatAF(MatchDataset())
        with pytest.raises(AcquisitionError, match="empty"):
            af.score(WinRateEmulator(), make_match("m0", A, B))


class TestSharedContracts:
    def _all_afs(self, holdout):
        rng = np.random.default_rng(0)
        return [make_af(name, rng=rng, holdout=holdout) for name in AF_NAMES]

    def test_purity_no_af_mutates_deterministic_emulators(self):
        holdout = MatchDataset([make_match("h0", A, B, Outcome.WIN1)])
        m = make_match("m0", A, B)
        for maker in ("winrate", "elo", "glicko2", "trueskill", "tsplayers"):
            emu = make_emulator(maker)
            emu.fit(make_match("x0", A, C))
            before = emu.state_json()
            for af in self._all_afs(holdout):
                if af.name == "ts_quality" and not emu.has_quality:
                    continue
                af.score(emu, m)
                assert emu.state_json() == before, (maker, af.name)

    def test_scoring_deterministic(self):
        holdout = MatchDataset([make_match("h0", A, B, Outcome.WIN1)])
        m = make_match("m0", A, B)
        emu = TrueSkillTeamEmulator()
        for name in AF_NAMES:
            one = make_af(name, rng=np.random.default_rng(9), holdout=holdout)
            two = make_af(name, rng=np.random.default_rng(9), holdout=holdout)
            assert one.score(emu, m) == two.score(emu, m), name

    def test_argmax_invariant_to_constant_shift(self):
        emu = WinRateEmulator()
        emu.fit(make_match("x0", A, B, Outcome.WIN1))
        emu.fit(make_match("x1", A, C, Outcome.WIN2))
        candidates = [
            make_match("m0", A, B),
            make_match("m1", C, D),
            make_match("m2", B, C),
        ]
        for name in ("least_seen", "likeliest_draw", "cross_entropy", "weighted"):
            af = make_af(name)
            scores = [af.score(emu, m) for m in candidates]
            shifted = [s + 10.0 for s in scores]
            assert int(np.argmax(scores)) == int(np.argmax(shifted))

    def test_unknown_name_rejected(self):
        with pytest.raises(AcquisitionError, match="unknown acquisition"):
            make_af("expected_improvement")
