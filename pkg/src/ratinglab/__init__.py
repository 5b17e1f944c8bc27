"""ratinglab: a workbench for skill-rating systems and matchmaking policies.

Rating systems are wrapped as emulators (predict a win probability, fit one
match at a time); matchmaking policies are acquisition functions that score
candidate matches by expected informativeness. A simulator replays historical
matches chosen by the acquisition function and measures how prediction
accuracy grows with the training budget.
"""

from .acquisition import (
    AF_NAMES,
    AcquisitionFunction,
    InapplicablePairingError,
    WeightedAFParams,
    make_af,
)
from .data import (
    DatasetSplit,
    MatchDataset,
    MatchRecord,
    Outcome,
    Team,
    load_dataset,
    sample_candidates,
    save_dataset,
    split_dataset,
)
from .emulators import (
    EMULATOR_NAMES,
    EloParams,
    Emulator,
    Glicko2Params,
    TrueSkillParams,
    make_emulator,
)
from .scoring import evaluate
from .sensitivity import GPConfig, GridSpec, build_surface, gp_fit, run_grid
from .simulator import (
    AFSpec,
    EmulatorSpec,
    ExperimentReport,
    SimulatorConfig,
    TrainingCurve,
    run_experiment,
    run_training_curve,
    train_step,
)
from .synthgen import SynthConfig, bayes_accuracy, generate

__all__ = [
    "AF_NAMES",
    "AFSpec",
    "AcquisitionFunction",
    "DatasetSplit",
    "EMULATOR_NAMES",
    "EloParams",
    "Emulator",
    "EmulatorSpec",
    "ExperimentReport",
    "GPConfig",
    "Glicko2Params",
    "GridSpec",
    "InapplicablePairingError",
    "MatchDataset",
    "MatchRecord",
    "Outcome",
    "SimulatorConfig",
    "SynthConfig",
    "Team",
    "TrainingCurve",
    "TrueSkillParams",
    "WeightedAFParams",
    "bayes_accuracy",
    "build_surface",
    "evaluate",
    "generate",
    "gp_fit",
    "load_dataset",
    "make_af",
    "make_emulator",
    "run_experiment",
    "run_grid",
    "run_training_curve",
    "sample_candidates",
    "save_dataset",
    "split_dataset",
    "train_step",
]
