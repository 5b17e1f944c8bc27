"""Command-line interface.

Commands read a YAML config (flags override the top-level fields), run the
requested experiment grid, and write CSV plus rendered PNG figures and a JSON
run manifest into the output directory. All randomness flows from the
declared seeds, so reruns with the same config are byte-identical on the CSV
side.
"""

from __future__ import annotations

import hashlib
import json
from importlib import metadata
from pathlib import Path

import click
import yaml

from . import reporting
from .acquisition import AF_NAMES, InapplicablePairingError
from .data import DatasetError, load_dataset, save_dataset, split_dataset
from .emulators import EMULATOR_NAMES
from .sensitivity import (
    SWEEP_EMULATORS,
    SWEEP_PARAMS,
    GridSpec,
    build_surface,
    run_grid,
)
from .simulator import (
    AFSpec,
    EmulatorSpec,
    SimulatorConfig,
    run_experiment,
    run_training_curve,
)
from .synthgen import SynthConfig, generate, save_latent_skills


class ConfigError(click.ClickException):
    def __init__(self, path: str, message: str):
        super().__init__(f"config error at {path}: {message}")


def _package_version() -> str:
    try:
        return metadata.version("ratinglab")
    except metadata.PackageNotFoundError:
        return "unknown"


def _load_config(path: str | None) -> dict:
    if path is None:
        raise click.ClickException("--config is required for this command")
    p = Path(path)
    if not p.exists():
        raise click.ClickException(f"config file not found: {p}")
    loaded = yaml.safe_load(p.read_text(encoding="utf-8"))
    if not isinstance(loaded, dict):
        raise ConfigError("<root>", "config must be a mapping")
    return loaded


def _get(cfg: dict, path: str, kind, default=None, required: bool = False):
    node = cfg
    parts = path.split(".")
    for i, part in enumerate(parts):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(".".join(parts[: i + 1]), "missing required field")
            return default
        node = node[part]
    if kind is float and isinstance(node, int):
        node = float(node)
    if not isinstance(node, kind):
        raise ConfigError(path, f"expected {kind.__name__}, got {type(node).__name__}")
    return node


def _spec_list(cfg: dict, path: str, known: tuple[str, ...]) -> list[tuple[str, dict]]:
    raw = _get(cfg, path, list, required=True)
    if not raw:
        raise ConfigError(path, "list must be non-empty")
    specs = []
    for i, entry in enumerate(raw):
        if isinstance(entry, str):
            name, params = entry, {}
        elif isinstance(entry, dict):
            name = entry.get("name")
            params = entry.get("params") or {}
            if not isinstance(name, str):
                raise ConfigError(f"{path}[{i}].name", "expected string")
            if not isinstance(params, dict):
                raise ConfigError(f"{path}[{i}].params", "expected mapping")
        else:
            raise ConfigError(f"{path}[{i}]", "expected string or mapping")
        if name not in known:
            raise ConfigError(f"{path}[{i}]", f"unknown name {name!r} (expected one of {known})")
        specs.append((name, params))
    return specs


def _load_split(cfg: dict):
    path = _get(cfg, "dataset.path", str, required=True)
    fmt = _get(cfg, "dataset.format", str, default="csv")
    split_seed = _get(cfg, "split_seed", int, default=0)
    try:
        dataset = load_dataset(path, fmt)
        return split_dataset(dataset, split_seed), split_seed
    except DatasetError as exc:
        raise click.ClickException(str(exc))


def _simulator_config(cfg: dict, seed: int) -> SimulatorConfig:
    budget = _get(cfg, "simulator.train_budget", int, required=True)
    checkpoints = _get(cfg, "simulator.checkpoints", list, default=[budget])
    runs = _get(cfg, "simulator.runs", int, default=1)
    pool = _get(cfg, "simulator.candidate_pool_size", int, default=25)
    try:
        return SimulatorConfig(
            train_budget=budget,
            checkpoints=tuple(int(c) for c in checkpoints),
            runs=runs,
            candidate_pool_size=pool,
            seed=seed,
        )
    except ValueError as exc:
        raise ConfigError("simulator", str(exc))


def _config_sha256(effective: dict) -> str:
    return hashlib.sha256(
        json.dumps(effective, sort_keys=True, default=str).encode()
    ).hexdigest()


def _write_manifest(out_dir: Path, command: str, effective: dict, outputs: list[Path]) -> Path:
    manifest = {
        "command": command,
        "config_sha256": _config_sha256(effective),
        "seed": effective.get("seed"),
        "split_seed": effective.get("split_seed"),
        "package_version": _package_version(),
        "outputs": sorted(p.name for p in outputs),
    }
    path = out_dir / f"{command}_manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _apply_overrides(cfg: dict, seed: int | None, jobs: int | None, out: str | None) -> dict:
    cfg = dict(cfg)
    if seed is not None:
        cfg["seed"] = seed
    if jobs is not None:
        cfg["jobs"] = jobs
    if out is not None:
        cfg["out"] = out
    cfg.setdefault("seed", 0)
    cfg.setdefault("jobs", 1)
    cfg.setdefault("out", "out")
    cfg.setdefault("figures", True)
    return cfg


_shared_options = [
    click.option("--config", "config_path", type=click.Path(), help="YAML config file."),
    click.option("--seed", type=int, default=None, help="Override the master seed."),
    click.option("--jobs", type=int, default=None, help="Worker processes for independent tasks."),
    click.option("--out", type=click.Path(), default=None, help="Override the output directory."),
    click.option("--no-figures", is_flag=True, help="Skip PNG rendering."),
]


def shared_options(fn):
    for opt in reversed(_shared_options):
        fn = opt(fn)
    return fn


@click.group()
def main() -> None:
    """Skill-rating workbench: emulators, acquisition policies, and the
    match-replay experiment harness."""


@main.command()
@click.argument("path", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv")
def validate_dataset(path: str, fmt: str) -> None:
    """Check a dataset file and print summary statistics."""
    try:
        dataset = load_dataset(path, fmt)
    except DatasetError as exc:
        raise click.ClickException(str(exc))
    outcomes: dict[str, int] = {}
    players: set[str] = set()
    for rec in dataset:
        outcomes[rec.outcome.value] = outcomes.get(rec.outcome.value, 0) + 1
        players.update(rec.team1.roster)
        players.update(rec.team2.roster)
    click.echo(f"OK: {len(dataset)} matches, {len(dataset.team_ids())} teams, {len(players)} players")
    for token in ("win1", "win2", "draw"):
        click.echo(f"  {token}: {outcomes.get(token, 0)}")


@main.command()
@shared_options
def table(config_path, seed, jobs, out, no_figures) -> None:
    """Accuracy grid over every configured (emulator, AF, checkpoint) cell."""
    cfg = _apply_overrides(_load_config(config_path), seed, jobs, out)
    split, _ = _load_split(cfg)
    sim_cfg = _simulator_config(cfg, cfg["seed"])
    emulators = _spec_list(cfg, "emulators", EMULATOR_NAMES)
    afs = _spec_list(cfg, "afs", AF_NAMES)
    out_dir = Path(cfg["out"])

    rows: list[tuple] = []
    for emulator_name, emulator_params in emulators:
        for af_name, af_params in afs:
            try:
                report = run_experiment(
                    sim_cfg,
                    split,
                    EmulatorSpec(emulator_name, emulator_params),
                    AFSpec(af_name, af_params),
                    jobs=cfg["jobs"],
                )
                rows.extend(reporting.table_rows(report))
            except InapplicablePairingError:
                rows.extend(
                    reporting.undefined_rows(
                        emulator_name, af_name, sim_cfg.checkpoints, sim_cfg.runs
                    )
                )
                click.echo(f"cell ({emulator_name}, {af_name}): undefined pairing", err=True)

    outputs = [reporting.write_table_csv(out_dir / "table.csv", rows)]
    if cfg["figures"] and not no_figures:
        emulator_names = [name for name, _ in emulators]
        af_names = [name for name, _ in afs]
        for budget in sim_cfg.checkpoints:
            outputs.append(
                reporting.render_table_heatmap(
                    rows, emulator_names, af_names, budget, out_dir / f"table_{budget}.png"
                )
            )
    outputs.append(_write_manifest(out_dir, "table", cfg, outputs))
    click.echo(f"wrote {len(outputs)} files to {out_dir}")


@main.command()
@shared_options
@click.option("--points", type=int, default=20, help="Budget grid points per curve.")
def curve(config_path, seed, jobs, out, no_figures, points) -> None:
    """Full training curves (train and eval accuracy) per (emulator, AF)."""
    cfg = _apply_overrides(_load_config(config_path), seed, jobs, out)
    split, _ = _load_split(cfg)
    sim_cfg = _simulator_config(cfg, cfg["seed"])
    emulators = _spec_list(cfg, "emulators", EMULATOR_NAMES)
    afs = _spec_list(cfg, "afs", AF_NAMES)
    out_dir = Path(cfg["out"])

    outputs: list[Path] = []
    for emulator_name, emulator_params in emulators:
        for af_name, af_params in afs:
            try:
                result = run_training_curve(
                    sim_cfg,
                    split,
                    EmulatorSpec(emulator_name, emulator_params),
                    AFSpec(af_name, af_params),
                    points=points,
                    jobs=cfg["jobs"],
                )
            except InapplicablePairingError:
                click.echo(f"curve ({emulator_name}, {af_name}): undefined pairing", err=True)
                continue
            base = f"curve_{emulator_name}_{af_name}"
            outputs.append(reporting.write_curve_csv(out_dir / f"{base}.csv", result))
            if cfg["figures"] and not no_figures:
                outputs.append(reporting.render_curve(result, out_dir / f"{base}.png"))
    outputs.append(_write_manifest(out_dir, "curve", cfg, outputs))
    click.echo(f"wrote {len(outputs)} files to {out_dir}")


@main.command()
@shared_options
@click.option("--resolution", type=int, default=None, help="Grid points per axis (odd).")
def sensitivity(config_path, seed, jobs, out, no_figures, resolution) -> None:
    """Logarithmic parameter sweeps with GP-smoothed accuracy surfaces."""
    cfg = _apply_overrides(_load_config(config_path), seed, jobs, out)
    split, _ = _load_split(cfg)
    out_dir = Path(cfg["out"])

    emulator_names = _get(cfg, "sensitivity.emulators", list, default=list(SWEEP_EMULATORS))
    pairs = _get(cfg, "sensitivity.pairs", list, default=[["sigma", "beta"], ["sigma", "tau"], ["beta", "tau"]])
    res = resolution if resolution is not None else _get(cfg, "sensitivity.resolution", int, default=7)
    budget = _get(cfg, "sensitivity.budget", int, default=2000)
    runs_per_point = _get(cfg, "sensitivity.runs_per_point", int, default=1)

    for name in emulator_names:
        if name not in SWEEP_EMULATORS:
            raise ConfigError("sensitivity.emulators", f"unknown variant {name!r}")
    outputs: list[Path] = []
    for emulator_name in emulator_names:
        for pair in pairs:
            if len(pair) != 2 or any(p not in SWEEP_PARAMS for p in pair):
                raise ConfigError("sensitivity.pairs", f"invalid pair {pair!r}")
            try:
                grid_spec = GridSpec(param_pair=(pair[0], pair[1]), resolution=res)
                grid = run_grid(
                    grid_spec,
                    emulator_name,
                    split,
                    budget=budget,
                    seed=cfg["seed"],
                    runs_per_point=runs_per_point,
                    jobs=cfg["jobs"],
                )
            except ValueError as exc:
                raise click.ClickException(str(exc))
            surface = build_surface(grid)
            base = f"sensitivity_{emulator_name}_{pair[0]}_{pair[1]}"
            outputs.extend(reporting.write_surface_csvs(surface, out_dir, base))
            if cfg["figures"] and not no_figures:
                outputs.append(reporting.render_surface(surface, out_dir / f"{base}.png"))
    outputs.append(_write_manifest(out_dir, "sensitivity", cfg, outputs))
    click.echo(f"wrote {len(outputs)} files to {out_dir}")


@main.command()
@shared_options
def synth(config_path, seed, jobs, out, no_figures) -> None:
    """Generate a synthetic dataset plus its latent-skill sidecar."""
    cfg = _apply_overrides(_load_config(config_path), seed, jobs, out)
    section = _get(cfg, "synth", dict, required=True)
    out_dir = Path(cfg["out"])
    data_path = Path(section.get("out_path", out_dir / "synth.csv"))
    skills_path = Path(section.get("skills_path", data_path.with_name(data_path.stem + "_skills.csv")))
    try:
        synth_cfg = SynthConfig(
            n_teams=int(section["n_teams"]),
            matches=int(section["matches"]),
            latent_mean=float(section.get("latent_mean", 25.0)),
            latent_sd=float(section.get("latent_sd", 25.0 / 3.0)),
            performance_sd=float(section.get("performance_sd", 25.0 / 6.0)),
            draw_margin=float(section.get("draw_margin", 0.0)),
            pairing=section.get("pairing", "uniform"),
            seed=cfg["seed"],
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError("synth", str(exc))
    dataset, latent = generate(synth_cfg)
    save_dataset(dataset, data_path)
    save_latent_skills(latent, skills_path)
    outputs = [data_path, skills_path]
    outputs.append(_write_manifest(out_dir, "synth", cfg, outputs))
    click.echo(f"wrote {len(dataset)} matches to {data_path}")


if __name__ == "__main__":
    main()
