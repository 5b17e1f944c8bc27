"""GP regression unit suite and sweep-grid contracts."""

import numpy as np
import pytest

from ratinglab.data import split_dataset
from ratinglab.sensitivity import (
    GPConfig,
    GPPosterior,
    GridSpec,
    SensitivityError,
    _point_accuracy,
    build_surface,
    default_value,
    gp_fit,
    params_at,
    run_grid,
)
from ratinglab.synthgen import SynthConfig, generate


def synth_split(seed=1, n_teams=12, matches=300):
    ds, _ = generate(SynthConfig(n_teams=n_teams, matches=matches, seed=seed))
    return split_dataset(ds, seed=3)


class TestGridSpec:
    def test_rejects_even_resolution(self):
        with pytest.raises(SensitivityError):
            GridSpec(("sigma", "beta"), resolution=4)

    def test_rejects_repeated_param(self):
        with pytest.raises(SensitivityError):
            GridSpec(("sigma", "sigma"))

    def test_rejects_unknown_param(self):
        with pytest.raises(SensitivityError):
            GridSpec(("sigma", "mu"))

    def test_offsets_centered(self):
        spec = GridSpec(("sigma", "beta"), resolution=7)
        offsets = spec.offsets
        assert len(offsets) == 7
        assert offsets[3] == 0.0
        assert offsets[0] == -1.0
        assert offsets[-1] == 1.0

    def test_params_at_center_are_defaults(self):
        params = params_at(("sigma", "beta"), (0.0, 0.0))
        assert params["sigma0"] == pytest.approx(25 / 3)
        assert params["beta"] == pytest.approx(25 / 6)

    def test_params_at_decade(self):
        params = params_at(("beta", "tau"), (1.0, -1.0))
        assert params["beta"] == pytest.approx(10 * 25 / 6)
        assert params["tau"] == pytest.approx(0.1 * 25 / 300)


class TestRunGrid:
    def test_grid_shape_and_determinism(self):
        split = synth_split()
        spec = GridSpec(("sigma", "beta"), resolution=3)
        a = run_grid(spec, "trueskill", split, budget=30, seed=11)
        b = run_grid(spec, "trueskill", split, budget=30, seed=11)
        assert a == b
        assert len(a.accuracy) == 3
        assert all(len(row) == 3 for row in a.accuracy)

    def test_center_point_matches_standalone_run(self):
        split = synth_split()
        spec = GridSpec(("sigma", "tau"), resolution=3)
        grid = run_grid(spec, "trueskill", split, budget=30, seed=11)
        center = grid.accuracy[1][1]
        standalone = _point_accuracy(
            "trueskill", ("sigma", "tau"), (0.0, 0.0), split, 30, 11, (1, 1, 0), 25
        )
        assert center == standalone

    def test_rejects_non_gaussian_emulator(self):
        split = synth_split()
        with pytest.raises(SensitivityError, match="requires one of"):
            run_grid(GridSpec(("sigma", "beta"), resolution=3), "elo", split, budget=30)

    def test_rejects_oversized_budget(self):
        split = synth_split()
        with pytest.raises(SensitivityError, match="exceeds"):
            run_grid(GridSpec(("sigma", "beta"), resolution=3), "trueskill", split, budget=10**6)

    def test_parallel_grid_matches_serial(self):
        split = synth_split()
        spec = GridSpec(("sigma", "beta"), resolution=3)
        serial = run_grid(spec, "tsplayers", split, budget=20, seed=7)
        parallel = run_grid(spec, "tsplayers", split, budget=20, seed=7, jobs=2)
        assert serial == parallel


class TestGPRegression:
    def test_zero_observations_returns_prior(self):
        posterior = gp_fit((np.zeros((0, 2)), np.zeros(0)), GPConfig())
        xs = np.array([[0.0, 0.0], [5.0, -3.0]])
        assert np.allclose(posterior.mean(xs), 0.60)

    def test_single_point_interpolation_noise_free(self):
        cfg = GPConfig(noise_variance=0.0)
        posterior = gp_fit((np.array([[0.3, -0.4]]), np.array([0.72])), cfg)
        assert posterior.mean(np.array([[0.3, -0.4]]))[0] == pytest.approx(0.72, abs=1e-8)

    def test_training_targets_within_noise_tolerance(self):
        rng = np.random.default_rng(5)
        cfg = GPConfig()
        x = rng.uniform(-1, 1, size=(49, 2))
        y = 0.6 + 0.05 * np.sin(3 * x[:, 0]) * np.cos(2 * x[:, 1])
        posterior = gp_fit((x, y), cfg)
        recon = posterior.mean(x)
        assert np.all(np.abs(recon - y) <= 3 * np.sqrt(cfg.noise_variance))

    def test_far_field_decays_to_prior(self):
        x = np.array([[0.0, 0.0], [1.0, 1.0]])
        y = np.array([0.9, 0.2])
        posterior = gp_fit((x, y), GPConfig())
        far = posterior.mean(np.array([[12.0, 0.0], [0.0, -15.0]]))
        assert np.all(np.abs(far - 0.60) < 1e-4)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(9)
        x = rng.uniform(-1, 1, size=(20, 2))
        y = rng.uniform(0.4, 0.8, size=20)
        perm = rng.permutation(20)
        a = gp_fit((x, y), GPConfig())
        b = gp_fit((x[perm], y[perm]), GPConfig())
        probe = rng.uniform(-1, 1, size=(15, 2))
        assert np.allclose(a.mean(probe), b.mean(probe), atol=1e-10)

    def test_kernel_matrix_symmetric(self):
        rng = np.random.default_rng(13)
        x = rng.uniform(-1, 1, size=(12, 2))
        posterior = GPPosterior(x, np.full(12, 0.6), GPConfig())
        k = posterior._kernel(x, x)
        assert np.array_equal(k, k.T)

    def test_kernel_value_matches_closed_form(self):
        cfg = GPConfig()
        posterior = GPPosterior(np.zeros((1, 2)), np.array([0.6]), cfg)
        a = np.array([[0.0, 0.0]])
        b = np.array([[0.5, 0.5]])
        k = posterior._kernel(a, b)[0, 0]
        assert k == pytest.approx(1e-3 * np.exp(-0.5 / 0.5), abs=1e-12)


class TestSurface:
    def test_constant_grid_has_zero_range(self):
        split = synth_split()
        grid = run_grid(GridSpec(("sigma", "beta"), resolution=3), "trueskill", split, budget=20, seed=1)
        constant = type(grid)(
            emulator=grid.emulator,
            param_pair=grid.param_pair,
            offsets=grid.offsets,
            accuracy=tuple(tuple(0.65 for _ in row) for row in grid.accuracy),
            defaults=grid.defaults,
            budget=grid.budget,
            seed=grid.seed,
            runs_per_point=grid.runs_per_point,
        )
        surface = build_surface(constant)
        assert surface.raw_range == 0.0

    def test_surface_fields_consistent(self):
        split = synth_split()
        grid = run_grid(GridSpec(("beta", "tau"), resolution=3), "trueskill", split, budget=30, seed=2)
        surface = build_surface(grid, display_resolution=21)
        values = np.asarray(surface.smoothed)
        assert values.shape == (21, 21)
        assert values.min() >= 0.0
        assert values.max() <= 1.0
        bi = surface.display_offsets.index(surface.argmax_offsets[0])
        bj = surface.display_offsets.index(surface.argmax_offsets[1])
        assert values[bi, bj] == surface.optimum_value
        assert surface.optimum_value == values.max()

    def test_defaults_flag_respects_tolerance(self):
        split = synth_split()
        grid = run_grid(GridSpec(("beta", "tau"), resolution=3), "trueskill", split, budget=30, seed=2)
        always = build_surface(grid, tolerance=1.0)
        assert always.defaults_near_optimal
        never = build_surface(grid, tolerance=-1.0)
        assert not never.defaults_near_optimal
