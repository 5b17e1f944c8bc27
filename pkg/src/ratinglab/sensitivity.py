"""Parameter sensitivity sweeps for the Gaussian skill emulators.

A logarithmic grid varies two of (sigma, beta, tau) at a time, one decade
either side of the defaults with the rating mean pinned; each grid point is
scored by training a fresh emulator and measuring evaluation accuracy. An
exact Gaussian-process regression with an RBF kernel then smooths the noisy
grid into a surface whose optimum can be compared against the defaults.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import DatasetSplit
from .emulators import TrueSkillParams
from .simulator import AFSpec, EmulatorSpec, SimulatorConfig, _run_once

SWEEP_PARAMS = ("sigma", "beta", "tau")

_PARAM_FIELDS = {"sigma": "sigma0", "beta": "beta", "tau": "tau"}

_DEFAULTS = TrueSkillParams()

SWEEP_EMULATORS = ("trueskill", "tsplayers")


class SensitivityError(ValueError):
    """Invalid sweep configuration or degenerate GP fit."""


@dataclass(frozen=True)
class GridSpec:
    param_pair: tuple[str, str]
    resolution: int = 7
    span: float = 1.0  # decades either side of the default

    def __post_init__(self) -> None:
        if len(self.param_pair) != 2 or self.param_pair[0] == self.param_pair[1]:
            raise SensitivityError(f"param_pair must name two distinct parameters, got {self.param_pair}")
        for p in self.param_pair:
            if p not in SWEEP_PARAMS:
                raise SensitivityError(f"unknown sweep parameter {p!r} (expected one of {SWEEP_PARAMS})")
        if self.resolution < 3 or self.resolution % 2 == 0:
            raise SensitivityError("resolution must be odd and >= 3 so the defaults sit on the grid")
        if self.span <= 0:
            raise SensitivityError("span must be positive")

    @property
    def offsets(self) -> np.ndarray:
        return np.linspace(-self.span, self.span, self.resolution)


@dataclass(frozen=True)
class GPConfig:
    kernel_variance: float = 1e-3
    lengthscale_sq: float = 0.25
    prior_mean: float = 0.60
    noise_variance: float = 1e-4

    def __post_init__(self) -> None:
        if self.kernel_variance <= 0 or self.lengthscale_sq <= 0:
            raise SensitivityError("kernel_variance and lengthscale_sq must be positive")
        if self.noise_variance < 0:
            raise SensitivityError("noise_variance must be non-negative")


@dataclass(frozen=True)
class SensitivityGrid:
    """Raw sweep results in log10(value/default) coordinates."""

    emulator: str
    param_pair: tuple[str, str]
    offsets: tuple[float, ...]
    accuracy: tuple[tuple[float, ...], ...]  # [i][j] for offsets (i: first param)
    defaults: tuple[float, float]
    budget: int
    seed: int
    runs_per_point: int

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Flatten to (n, 2) coordinates and n accuracies."""
        xs = []
        ys = []
        for i, a in enumerate(self.offsets):
            for j, b in enumerate(self.offsets):
                xs.append((a, b))
                ys.append(self.accuracy[i][j])
        return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


def default_value(param: str) -> float:
    return float(getattr(_DEFAULTS, _PARAM_FIELDS[param]))


def params_at(param_pair: tuple[str, str], offsets: tuple[float, float]) -> dict:
    """Emulator parameter overrides for a grid point, others at defaults."""
    return {
        _PARAM_FIELDS[p]: default_value(p) * 10.0**off for p, off in zip(param_pair, offsets)
    }


def _point_accuracy(
    emulator_name: str,
    param_pair: tuple[str, str],
    offsets: tuple[float, float],
    split: DatasetSplit,
    budget: int,
    seed: int,
    spawn_key: tuple[int, ...],
    candidate_pool_size: int,
) -> float:
    cfg = SimulatorConfig(
        train_budget=budget,
        checkpoints=(budget,),
        runs=1,
        candidate_pool_size=candidate_pool_size,
        seed=seed,
    )
    spec = EmulatorSpec(emulator_name, params_at(param_pair, offsets))
    eval_accs, _ = _run_once(
        cfg, split.train, split.eval, spec, AFSpec("likeliest_draw"), spawn_key, (budget,)
    )
    return eval_accs[0]


_POINT_ARGS: dict = {}


def _init_point_worker(emulator_name, param_pair, split, budget, seed, pool_size) -> None:
    _POINT_ARGS.update(
        emulator_name=emulator_name,
        param_pair=param_pair,
        split=split,
        budget=budget,
        seed=seed,
        pool_size=pool_size,
    )


def _point_worker(task: tuple[int, int, int, float, float]) -> float:
    i, j, rep, off_a, off_b = task
    a = _POINT_ARGS
    return _point_accuracy(
        a["emulator_name"],
        a["param_pair"],
        (off_a, off_b),
        a["split"],
        a["budget"],
        a["seed"],
        (i, j, rep),
        a["pool_size"],
    )


def run_grid(
    grid: GridSpec,
    emulator_name: str,
    split: DatasetSplit,
    budget: int = 2000,
    seed: int = 0,
    runs_per_point: int = 1,
    candidate_pool_size: int = 25,
    jobs: int = 1,
) -> SensitivityGrid:
    """Measure accuracy at every grid point with fresh, independently seeded
    runs; the acquisition policy is the outcome-entropy (likeliest-draw) one."""
    if emulator_name not in SWEEP_EMULATORS:
        raise SensitivityError(
            f"sensitivity sweep requires one of {SWEEP_EMULATORS}, got {emulator_name!r}"
        )
    if budget > len(split.train):
        raise SensitivityError(
            f"budget {budget} exceeds training pool size {len(split.train)}"
        )
    if runs_per_point < 1:
        raise SensitivityError("runs_per_point must be >= 1")

    offsets = grid.offsets
    tasks = [
        (i, j, rep, float(offsets[i]), float(offsets[j]))
        for i in range(grid.resolution)
        for j in range(grid.resolution)
        for rep in range(runs_per_point)
    ]
    if jobs <= 1:
        _init_point_worker(emulator_name, grid.param_pair, split, budget, seed, candidate_pool_size)
        results = [_point_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_init_point_worker,
            initargs=(emulator_name, grid.param_pair, split, budget, seed, candidate_pool_size),
        ) as pool:
            results = list(pool.map(_point_worker, tasks))

    acc = np.zeros((grid.resolution, grid.resolution))
    for task, value in zip(tasks, results):
        i, j = task[0], task[1]
        acc[i, j] += value / runs_per_point
    return SensitivityGrid(
        emulator=emulator_name,
        param_pair=grid.param_pair,
        offsets=tuple(float(o) for o in offsets),
        accuracy=tuple(tuple(float(v) for v in row) for row in acc),
        defaults=(default_value(grid.param_pair[0]), default_value(grid.param_pair[1])),
        budget=budget,
        seed=seed,
        runs_per_point=runs_per_point,
    )


class GPPosterior:
    """Exact GP regression posterior mean around a constant prior."""

    def __init__(self, x: np.ndarray, y: np.ndarray, cfg: GPConfig):
        self.cfg = cfg
        self._x = np.atleast_2d(np.asarray(x, dtype=float)) if len(x) else np.zeros((0, 2))
        y = np.asarray(y, dtype=float)
        if len(self._x) == 0:
            self._alpha = np.zeros(0)
            return
        k = self._kernel(self._x, self._x)
        k[np.diag_indices_from(k)] += cfg.noise_variance
        chol = self._chol_with_jitter(k)
        resid = y - cfg.prior_mean
        self._alpha = np.linalg.solve(chol.T, np.linalg.solve(chol, resid))

    def _kernel(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        return self.cfg.kernel_variance * np.exp(-d2 / (2.0 * self.cfg.lengthscale_sq))

    @staticmethod
    def _chol_with_jitter(k: np.ndarray) -> np.ndarray:
        for jitter in (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6):
            try:
                return np.linalg.cholesky(k + jitter * np.eye(len(k)))
            except np.linalg.LinAlgError:
                continue
        raise SensitivityError("kernel matrix is not positive definite (degenerate grid)")

    def mean(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if len(self._x) == 0:
            return np.full(len(xs), self.cfg.prior_mean)
        k_star = self._kernel(xs, self._x)
        return self.cfg.prior_mean + k_star @ self._alpha


def gp_fit(grid: SensitivityGrid | tuple[np.ndarray, np.ndarray], cfg: GPConfig | None = None) -> GPPosterior:
    """Fit the smoothing GP to a sweep (or directly to (coords, values))."""
    cfg = cfg if cfg is not None else GPConfig()
    if isinstance(grid, SensitivityGrid):
        x, y = grid.points()
    else:
        x, y = grid
    return GPPosterior(np.asarray(x, dtype=float), np.asarray(y, dtype=float), cfg)


@dataclass(frozen=True)
class SensitivitySurface:
    grid: SensitivityGrid
    display_offsets: tuple[float, ...]
    smoothed: tuple[tuple[float, ...], ...]  # [i][j], clamped to [0, 1]
    argmax_offsets: tuple[float, float]
    optimum_value: float
    default_value: float
    raw_range: float
    smoothed_range: float
    defaults_near_optimal: bool
    tolerance: float


def build_surface(
    grid: SensitivityGrid,
    gp_cfg: GPConfig | None = None,
    display_resolution: int = 41,
    tolerance: float = 0.02,
) -> SensitivitySurface:
    """Smooth a sweep and locate its optimum on a dense display grid."""
    gp_cfg = gp_cfg if gp_cfg is not None else GPConfig()
    posterior = gp_fit(grid, gp_cfg)
    span = max(abs(grid.offsets[0]), abs(grid.offsets[-1]))
    display = np.linspace(-span, span, display_resolution)
    coords = np.array([(a, b) for a in display for b in display])
    values = np.clip(posterior.mean(coords), 0.0, 1.0).reshape(display_resolution, display_resolution)

    best_flat = int(values.argmax())
    bi, bj = divmod(best_flat, display_resolution)
    at_default = float(np.clip(posterior.mean(np.array([[0.0, 0.0]]))[0], 0.0, 1.0))
    raw = np.asarray(grid.accuracy)
    optimum = float(values[bi, bj])
    return SensitivitySurface(
        grid=grid,
        display_offsets=tuple(float(d) for d in display),
        smoothed=tuple(tuple(float(v) for v in row) for row in values),
        argmax_offsets=(float(display[bi]), float(display[bj])),
        optimum_value=optimum,
        default_value=at_default,
        raw_range=float(raw.max() - raw.min()),
        smoothed_range=float(values.max() - values.min()),
        defaults_near_optimal=bool(abs(optimum - at_default) <= tolerance),
        tolerance=tolerance,
    )
