"""Generator contracts: outcome model, determinism, and the accuracy bound."""

import numpy as np
import pytest
from scipy import stats

from ratinglab.data import Outcome, load_dataset, save_dataset
from ratinglab.gaussmath import std_cdf
from ratinglab.synthgen import SynthConfig, bayes_accuracy, generate, save_latent_skills


class TestGenerate:
    def test_requested_size(self):
        ds, latent = generate(SynthConfig(n_teams=12, matches=250, seed=0))
        assert len(ds) == 250
        assert len(latent) == 12

    def test_deterministic(self):
        a, la = generate(SynthConfig(n_teams=10, matches=100, seed=5))
        b, lb = generate(SynthConfig(n_teams=10, matches=100, seed=5))
        assert la == lb
        assert [(r.match_id, r.team1.id, r.team2.id, r.outcome) for r in a] == [
            (r.match_id, r.team1.id, r.team2.id, r.outcome) for r in b
        ]

    def test_zero_margin_no_draws(self):
        ds, _ = generate(SynthConfig(n_teams=10, matches=500, draw_margin=0.0, seed=1))
        assert all(r.outcome is not Outcome.DRAW for r in ds)

    def test_margin_produces_draws(self):
        ds, _ = generate(
            SynthConfig(n_teams=10, matches=500, draw_margin=2.0, performance_sd=4.0, seed=1)
        )
        assert any(r.outcome is Outcome.DRAW for r in ds)

    def test_zero_performance_noise_is_deterministic_outcome(self):
        ds, latent = generate(SynthConfig(n_teams=8, matches=300, performance_sd=0.0, seed=2))
        for rec in ds:
            s1, s2 = latent[rec.team1.id], latent[rec.team2.id]
            expected = Outcome.WIN1 if s1 > s2 else Outcome.WIN2
            assert rec.outcome is expected

    def test_win_frequency_matches_probit_model(self):
        # Conditional on a pair, P(win1) = Phi(skill_gap / (sqrt(2)*perf_sd));
        # binned by gap, empirical frequencies stay within 3-sigma binomial
        # bands.
        cfg = SynthConfig(n_teams=6, matches=20000, performance_sd=5.0, latent_sd=6.0, seed=9)
        ds, latent = generate(cfg)
        from collections import defaultdict

        wins = defaultdict(int)
        totals = defaultdict(int)
        for rec in ds:
            gap = latent[rec.team1.id] - latent[rec.team2.id]
            key = (rec.team1.id, rec.team2.id)
            totals[key] += 1
            if rec.outcome is Outcome.WIN1:
                wins[key] += 1
        checked = 0
        for key, n in totals.items():
            if n < 200:
                continue
            gap = latent[key[0]] - latent[key[1]]
            p = std_cdf(gap / (np.sqrt(2) * cfg.performance_sd))
            sigma = np.sqrt(p * (1 - p) / n)
            assert abs(wins[key] / n - p) < 3 * sigma + 1e-9, key
            checked += 1
        assert checked >= 5

    def test_skill_banded_pairs_closer_skills(self):
        base = dict(n_teams=40, matches=4000, latent_sd=8.0, seed=3)
        uniform_ds, latent_u = generate(SynthConfig(pairing="uniform", **base))
        banded_ds, latent_b = generate(SynthConfig(pairing="skill-banded", **base))

        def mean_gap(ds, latent):
            gaps = [abs(latent[r.team1.id] - latent[r.team2.id]) for r in ds]
            return float(np.mean(gaps))

        assert mean_gap(banded_ds, latent_b) < mean_gap(uniform_ds, latent_u)

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            SynthConfig(n_teams=1, matches=10)
        with pytest.raises(ValueError):
            SynthConfig(n_teams=4, matches=0)
        with pytest.raises(ValueError):
            SynthConfig(n_teams=4, matches=10, pairing="swiss")


class TestBayesAccuracy:
    def test_noiseless_is_perfect(self):
        ds, latent = generate(SynthConfig(n_teams=8, matches=200, performance_sd=0.0, seed=4))
        assert bayes_accuracy(ds, latent) == 1.0

    def test_indistinguishable_teams_near_half(self):
        ds, latent = generate(
            SynthConfig(n_teams=8, matches=4000, latent_sd=0.0, performance_sd=3.0, seed=4)
        )
        assert bayes_accuracy(ds, latent) == pytest.approx(0.5, abs=0.05)

    def test_direct_counting(self):
        ds, latent = generate(SynthConfig(n_teams=6, matches=500, seed=6))
        hits = 0
        total = 0
        for rec in ds:
            if rec.outcome is Outcome.DRAW:
                continue
            total += 1
            higher_is_1 = latent[rec.team1.id] > latent[rec.team2.id]
            if (higher_is_1 and rec.outcome is Outcome.WIN1) or (
                not higher_is_1 and rec.outcome is Outcome.WIN2
            ):
                hits += 1
        assert bayes_accuracy(ds, latent) == hits / total


class TestFileOutputs:
    def test_dataset_roundtrip_through_standard_loader(self, tmp_path):
        ds, latent = generate(SynthConfig(n_teams=6, matches=50, seed=8))
        path = tmp_path / "synth.csv"
        save_dataset(ds, path)
        loaded = load_dataset(path, "csv")
        assert len(loaded) == 50
        assert loaded.match_ids == ds.match_ids

    def test_latent_sidecar_rows(self, tmp_path):
        ds, latent = generate(SynthConfig(n_teams=6, matches=50, seed=8))
        path = tmp_path / "skills.csv"
        save_latent_skills(latent, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "team_id,latent_skill"
        assert len(lines) == 1 + 6
