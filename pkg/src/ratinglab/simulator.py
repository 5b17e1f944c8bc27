"""The training/evaluation driver.

Each training step samples a small candidate pool of unplayed matches, scores
them with an acquisition function, reveals the best one to the emulator, and
removes it from the pool. Experiments repeat this loop over many
independently seeded runs and aggregate prediction accuracy on a held-out
evaluation set at fixed budget checkpoints.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .acquisition import AcquisitionFunction, make_af
from .data import DatasetSplit, MatchDataset, MatchRecord, sample_candidates
from .emulators import Emulator, make_emulator
from .scoring import evaluate, evaluate_or_nan

DEFAULT_CANDIDATE_POOL = 25


class SimulatorError(ValueError):
    """Invalid simulator configuration or usage."""


@dataclass(frozen=True)
class EmulatorSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AFSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SimulatorConfig:
    train_budget: int
    checkpoints: tuple[int, ...]
    runs: int = 1
    candidate_pool_size: int = DEFAULT_CANDIDATE_POOL
    seed: int = 0

    def __post_init__(self) -> None:
        if self.candidate_pool_size < 1:
            raise SimulatorError("candidate_pool_size must be >= 1")
        if self.train_budget < 1:
            raise SimulatorError("train_budget must be >= 1")
        if self.runs < 1:
            raise SimulatorError("runs must be >= 1")
        if not self.checkpoints:
            raise SimulatorError("at least one checkpoint is required")
        if list(self.checkpoints) != sorted(set(self.checkpoints)):
            raise SimulatorError("checkpoints must be strictly increasing")
        if self.checkpoints[0] < 1 or self.checkpoints[-1] > self.train_budget:
            raise SimulatorError(
                f"checkpoints must lie in [1, {self.train_budget}], got {self.checkpoints}"
            )


@dataclass(frozen=True)
class ExperimentReport:
    emulator: str
    af: str
    checkpoints: tuple[int, ...]
    mean: tuple[float, ...]
    stderr: tuple[float, ...]
    runs: int
    seed: int
    per_run: tuple[tuple[float, ...], ...]  # [checkpoint][run]


@dataclass(frozen=True)
class TrainingCurve:
    emulator: str
    af: str
    budgets: tuple[int, ...]
    train_mean: tuple[float, ...]
    train_sigma: tuple[float, ...]
    eval_mean: tuple[float, ...]
    eval_sigma: tuple[float, ...]
    runs: int
    seed: int


def run_streams(seed: int, spawn_key: tuple[int, ...]) -> tuple[np.random.Generator, ...]:
    """Three independent generators (candidate sampling, emulator, AF) for one
    run, derived counter-style from the master seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)
    return tuple(np.random.default_rng(child) for child in ss.spawn(3))


def train_step(
    emulator: Emulator,
    af: AcquisitionFunction,
    pool: MatchDataset,
    rng: np.random.Generator,
    candidate_pool_size: int = DEFAULT_CANDIDATE_POOL,
) -> MatchRecord:
    """One acquisition round: sample candidates, fit the argmax, pop it.

    Ties keep the earliest sampled candidate, so a constant scorer degrades
    to uniform random selection.
    """
    if len(pool) == 0:
        raise SimulatorError("training pool is empty")
    candidates = sample_candidates(pool, candidate_pool_size, rng)
    best_i = 0
    best_score = af.score(emulator, candidates[0])
    for i in range(1, len(candidates)):
        s = af.score(emulator, candidates[i])
        if s > best_score:
            best_i, best_score = i, s
    record = pool.pop(candidates[best_i].match_id)
    emulator.fit(record)
    return record


def _check_applicable(emulator_spec: EmulatorSpec, af_spec: AFSpec) -> None:
    probe_emulator = make_emulator(emulator_spec.name, emulator_spec.params)
    probe_af = make_af(af_spec.name, af_spec.params, holdout=MatchDataset())
    probe_af.check_applicable(probe_emulator)


def _run_once(
    cfg: SimulatorConfig,
    train: MatchDataset,
    eval_set: MatchDataset,
    emulator_spec: EmulatorSpec,
    af_spec: AFSpec,
    spawn_key: tuple[int, ...],
    budgets: tuple[int, ...],
    track_train_accuracy: bool = False,
) -> tuple[list[float], list[float]]:
    """One seeded run; returns eval accuracies (and optionally accuracies on
    the consumed matches) at each requested budget."""
    sampler_rng, emulator_rng, af_rng = run_streams(cfg.seed, spawn_key)
    pool = train.copy()
    emulator = make_emulator(emulator_spec.name, emulator_spec.params, rng=emulator_rng)
    af = make_af(af_spec.name, af_spec.params, rng=af_rng, holdout=pool)
    af.check_applicable(emulator)

    wanted = set(budgets)
    eval_accs: list[float] = []
    train_accs: list[float] = []
    consumed: list[MatchRecord] = []

    def snapshot() -> None:
        eval_accs.append(evaluate(emulator, eval_set))
        if track_train_accuracy:
            train_accs.append(evaluate_or_nan(emulator, consumed))

    if 0 in wanted:
        snapshot()
    last = max(budgets)
    for step in range(1, last + 1):
        record = train_step(emulator, af, pool, sampler_rng, cfg.candidate_pool_size)
        if track_train_accuracy:
            consumed.append(record)
        if step in wanted:
            snapshot()
    return eval_accs, train_accs


# Module-level worker state for process pools; set once per worker process.
_WORKER_ARGS: dict = {}


def _init_worker(cfg, train, eval_set, emulator_spec, af_spec, budgets, track_train) -> None:
    _WORKER_ARGS.update(
        cfg=cfg,
        train=train,
        eval_set=eval_set,
        emulator_spec=emulator_spec,
        af_spec=af_spec,
        budgets=budgets,
        track_train=track_train,
    )


def _worker_run(run_index: int) -> tuple[list[float], list[float]]:
    a = _WORKER_ARGS
    return _run_once(
        a["cfg"],
        a["train"],
        a["eval_set"],
        a["emulator_spec"],
        a["af_spec"],
        (run_index,),
        a["budgets"],
        a["track_train"],
    )


def _all_runs(
    cfg: SimulatorConfig,
    split: DatasetSplit,
    emulator_spec: EmulatorSpec,
    af_spec: AFSpec,
    budgets: tuple[int, ...],
    track_train: bool,
    jobs: int,
) -> list[tuple[list[float], list[float]]]:
    if jobs <= 1:
        return [
            _run_once(cfg, split.train, split.eval, emulator_spec, af_spec, (r,), budgets, track_train)
            for r in range(cfg.runs)
        ]
    with ProcessPoolExecutor(
        max_workers=jobs,
        initializer=_init_worker,
        initargs=(cfg, split.train, split.eval, emulator_spec, af_spec, budgets, track_train),
    ) as pool:
        return list(pool.map(_worker_run, range(cfg.runs)))


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if len(arr) < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(len(arr)))


def _mean_sigma(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if len(arr) < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1))


def run_experiment(
    cfg: SimulatorConfig,
    split: DatasetSplit,
    emulator_spec: EmulatorSpec,
    af_spec: AFSpec,
    jobs: int = 1,
) -> ExperimentReport:
    """Repeated seeded runs of the training loop, with accuracy on the full
    evaluation set recorded at each checkpoint.

    Fully deterministic for a fixed config; raises InapplicablePairingError
    before any work when the AF is undefined for the emulator.
    """
    if cfg.train_budget > len(split.train):
        raise SimulatorError(
            f"train_budget {cfg.train_budget} exceeds training pool size {len(split.train)}"
        )
    _check_applicable(emulator_spec, af_spec)
    results = _all_runs(cfg, split, emulator_spec, af_spec, cfg.checkpoints, False, jobs)

    per_checkpoint: list[list[float]] = [[] for _ in cfg.checkpoints]
    for eval_accs, _ in results:
        for i, acc in enumerate(eval_accs):
            per_checkpoint[i].append(acc)
    stats = [_mean_stderr(v) for v in per_checkpoint]
    return ExperimentReport(
        emulator=emulator_spec.name,
        af=af_spec.name,
        checkpoints=cfg.checkpoints,
        mean=tuple(m for m, _ in stats),
        stderr=tuple(s for _, s in stats),
        runs=cfg.runs,
        seed=cfg.seed,
        per_run=tuple(tuple(v) for v in per_checkpoint),
    )


def curve_budgets(pool_size: int, points: int = 20) -> tuple[int, ...]:
    """Evenly spaced budget grid from 0 to the full pool, ending exactly there."""
    if pool_size < 1:
        raise SimulatorError("pool must contain at least one match")
    points = max(2, min(points, pool_size + 1))
    grid = np.unique(np.linspace(0, pool_size, points).round().astype(int))
    return tuple(int(b) for b in grid)


def run_training_curve(
    cfg: SimulatorConfig,
    split: DatasetSplit,
    emulator_spec: EmulatorSpec,
    af_spec: AFSpec,
    points: int = 20,
    jobs: int = 1,
) -> TrainingCurve:
    """Accuracy over the whole training history, on both the matches consumed
    so far and the evaluation set, until the pool is exhausted.

    The budget-0 entry evaluates the untrained emulator; its train-side
    accuracy is NaN (nothing consumed yet).
    """
    _check_applicable(emulator_spec, af_spec)
    budgets = curve_budgets(len(split.train), points)
    results = _all_runs(cfg, split, emulator_spec, af_spec, budgets, True, jobs)

    eval_cols: list[list[float]] = [[] for _ in budgets]
    train_cols: list[list[float]] = [[] for _ in budgets]
    for eval_accs, train_accs in results:
        for i in range(len(budgets)):
            eval_cols[i].append(eval_accs[i])
            train_cols[i].append(train_accs[i])
    eval_stats = [_mean_sigma(v) for v in eval_cols]
    train_stats = [_mean_sigma(v) for v in train_cols]
    return TrainingCurve(
        emulator=emulator_spec.name,
        af=af_spec.name,
        budgets=budgets,
        train_mean=tuple(m for m, _ in train_stats),
        train_sigma=tuple(s for _, s in train_stats),
        eval_mean=tuple(m for m, _ in eval_stats),
        eval_sigma=tuple(s for _, s in eval_stats),
        runs=cfg.runs,
        seed=cfg.seed,
    )
