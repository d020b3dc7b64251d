"""Command-line entry point: ``coverbot <command> [flags]``.

Settings are merged as defaults <- ``--preset`` <- ``--config`` file <- flags.
The config file is flat ``key = value`` text with ``#`` comments; keys are
the long flag names with dashes or underscores (``eps-decay = 0.99``).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

from . import report
from .checkpoint import CheckpointError, load_checkpoint
from .dqn import DqnAgent, DqnHyper, EpsilonSchedule
from .envgen import GenConfig, generate
from .experiment import Summary, TrainConfig, evaluate, train

MODES = ("train", "evaluate", "baseline", "gen-env", "plot")
METRICS_FILE = "metrics.csv"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "train"
    master_seed: int = 0
    total_episodes: int = 5000  # training episodes (X)
    eval_episodes: int = 500
    mini_epochs: int = 5
    eps0: float = 1.0
    eps_decay: float = 0.9997
    gamma: float = 0.99
    learning_rate: float = 2e-4
    budget: int = 1800
    window: int = 50
    workers: int = 1
    raw_time: bool = False
    out: str = "runs"
    checkpoint: Optional[str] = None

    def validate(self) -> "RunConfig":
        checks = [
            ("master_seed", 0 <= self.master_seed < 2 ** 64, "must be in [0, 2^64)"),
            ("episodes", self.total_episodes >= 1 and self.eval_episodes >= 1, "must be >= 1"),
            ("mini_epochs", self.mini_epochs >= 1, "must be >= 1"),
            ("eps0", 0.0 <= self.eps0 <= 1.0, "must be in [0,1]"),
            ("eps_decay", 0.0 < self.eps_decay <= 1.0, "must be in (0,1]"),
            ("gamma", 0.0 <= self.gamma < 1.0, "must be in [0,1)"),
            ("learning_rate", self.learning_rate > 0.0, "must be > 0"),
            ("budget", self.budget >= 1, "must be >= 1"),
            ("window", self.window >= 1, "must be >= 1"),
            ("workers", self.workers >= 1, "must be >= 1"),
        ]
        for name, ok, msg in checks:
            if not ok:
                raise ConfigError(f"{name} {msg}")
        if self.mode == "evaluate" and not self.checkpoint:
            raise ConfigError("checkpoint path is required for evaluate (--checkpoint)")
        return self

    def schedule(self) -> EpsilonSchedule:
        return EpsilonSchedule(self.eps0, self.eps_decay, self.mini_epochs, self.total_episodes)

    def train_config(self) -> TrainConfig:
        return TrainConfig(self.master_seed, self.schedule(), self.gamma, self.learning_rate,
                           self.budget, self.raw_time)

    def hyper(self) -> DqnHyper:
        return DqnHyper(self.gamma, self.learning_rate, self.schedule(), self.raw_time)


PRESETS = {
    "full": {},
    "desk": {"total_episodes": 300, "mini_epochs": 3, "eps_decay": 0.99, "gamma": 0.8},
}

# config-file key / flag dest -> RunConfig field
_KEYS = {
    "seed": "master_seed",
    "episodes": None,  # mode dependent
    "mini_epochs": "mini_epochs",
    "eps0": "eps0",
    "eps_decay": "eps_decay",
    "gamma": "gamma",
    "lr": "learning_rate",
    "budget": "budget",
    "out": "out",
    "checkpoint": "checkpoint",
    "window": "window",
    "workers": "workers",
    "raw_time": "raw_time",
    "preset": None,
}
_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str, "bool": None, "Optional[str]": str}


def _cast(field_name: str, raw: str):
    kind = _TYPES[field_name]
    if kind == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{field_name} must be a boolean, got {raw!r}")
    try:
        return _CASTS[kind](raw)
    except ValueError:
        raise ConfigError(f"{field_name} must be {kind}, got {raw!r}") from None


def read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _apply(settings: dict, key: str, value, mode: str, from_text: bool) -> None:
    if key == "preset":
        return
    if key == "episodes":
        name = "total_episodes" if mode == "train" else "eval_episodes"
    else:
        name = _KEYS[key]
    settings[name] = _cast(name, value) if from_text else value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coverbot",
        description="Coverage path planning gridworld: Roomba baseline vs. online DQN.",
    )
    sub = parser.add_subparsers(dest="mode", metavar="command")
    helps = {
        "train": "train a DQN online; writes metrics.csv and checkpoints to --out",
        "evaluate": "run a saved DQN checkpoint greedily on fresh rooms",
        "baseline": "run the Roomba baseline on fresh rooms",
        "gen-env": "print the room generated for --seed",
        "plot": "render running-average SVG plots from --out/metrics.csv",
    }
    for mode in MODES:
        p = sub.add_parser(mode, help=helps[mode], argument_default=argparse.SUPPRESS)
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--episodes", type=int, help="training episodes (train) or evaluation episodes")
        p.add_argument("--mini-epochs", dest="mini_epochs", type=int, help="exploration cycles over training")
        p.add_argument("--eps0", type=float, help="initial exploration rate")
        p.add_argument("--eps-decay", dest="eps_decay", type=float, help="per-episode decay of the envelope")
        p.add_argument("--gamma", type=float, help="discount factor")
        p.add_argument("--lr", type=float, help="Adam learning rate")
        p.add_argument("--budget", type=int, help="steps per episode")
        p.add_argument("--out", help="output directory (default $COVERBOT_OUT or ./runs)")
        p.add_argument("--checkpoint", help="checkpoint file to load (evaluate) or write (train)")
        p.add_argument("--window", type=int, help="running-average window for plots")
        p.add_argument("--workers", type=int, help="parallel evaluation processes")
        p.add_argument("--raw-time", dest="raw_time", action="store_const", const=True,
                       help="feed raw elapsed steps instead of the budget fraction")
        p.add_argument("--preset", choices=sorted(PRESETS), help="hyperparameter preset")
        p.add_argument("--config", help="key = value config file")
    return parser


def parse_cli(argv: Sequence[str]) -> RunConfig:
    """Parse argv into a validated RunConfig. Raises SystemExit(2) on usage errors."""
    parser = build_parser()
    if not argv:
        parser.print_help(sys.stderr)
        raise SystemExit(2)
    args = vars(parser.parse_args(list(argv)))
    mode = args.pop("mode")
    if mode is None:
        parser.print_help(sys.stderr)
        raise SystemExit(2)

    settings: dict = {"mode": mode}
    env_out = os.environ.get("COVERBOT_OUT")
    if env_out:
        settings["out"] = env_out
    config_file = read_config_file(args["config"]) if "config" in args else {}
    preset = args.get("preset", config_file.get("preset", "full"))
    if preset not in PRESETS:
        raise ConfigError(f"preset must be one of {sorted(PRESETS)}")
    settings.update(PRESETS[preset])
    for key, value in config_file.items():
        _apply(settings, key, value, mode, from_text=True)
    for key, value in args.items():
        if key != "config":
            _apply(settings, key, value, mode, from_text=False)
    return RunConfig(**settings).validate()


def _print_summary(label: str, s: Summary) -> None:
    print(f"{label}: episodes={s.episodes} "
          f"coverage={s.coverage_mean:.4f}+-{s.coverage_std:.4f} "
          f"collisions={s.collisions_mean:.2f}+-{s.collisions_std:.2f} "
          f"steps={s.steps_mean:.1f}+-{s.steps_std:.1f}")


def run(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    if cfg.mode == "gen-env":
        sys.stdout.write(generate(GenConfig(seed=cfg.master_seed)).to_text())
        return 0

    if cfg.mode == "plot":
        rows = report.read_metrics_csv(out / METRICS_FILE)
        if not rows:
            raise ValueError(f"{out / METRICS_FILE} has no episodes to plot")
        report.coverage_plot([float(r["coverage"]) for r in rows], cfg.window, out / "coverage.svg")
        report.collisions_plot([float(r["collisions"]) for r in rows], cfg.window, out / "collisions.svg")
        print(f"wrote {out / 'coverage.svg'} and {out / 'collisions.svg'}")
        return 0

    out.mkdir(parents=True, exist_ok=True)
    if cfg.mode == "train":
        log = train(cfg.train_config(), out_dir=out)
        report.write_metrics_csv(log.episodes, out / METRICS_FILE)
        if cfg.checkpoint:
            from .checkpoint import save_checkpoint
            save_checkpoint(cfg.checkpoint, log.agent.net, log.agent.adam)
        tail = log.episodes[-min(50, len(log.episodes)):]
        _print_summary("train (last episodes)", Summary.of(tail))
        print(f"checkpoints at episodes {log.checkpoints}; metrics in {out / METRICS_FILE}")
        return 0

    if cfg.mode == "baseline":
        s = evaluate("baseline", cfg.eval_episodes, cfg.master_seed, cfg.budget, workers=cfg.workers)
        report.write_metrics_csv(s.metrics, out / "eval_baseline.csv")
        _print_summary("baseline", s)
        return 0

    if cfg.mode == "evaluate":
        net, adam = load_checkpoint(cfg.checkpoint, lr=cfg.learning_rate)
        agent = DqnAgent(net, adam, cfg.hyper(), cfg.budget)
        s = evaluate(agent, cfg.eval_episodes, cfg.master_seed, cfg.budget, workers=cfg.workers)
        report.write_metrics_csv(s.metrics, out / "eval_dqn.csv")
        _print_summary("dqn", s)
        return 0
    raise ConfigError(f"unknown mode {cfg.mode!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("COVERBOT_LOG", "WARNING"))
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_cli(argv)
    except ConfigError as exc:
        print(f"coverbot: error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except (OSError, ValueError, CheckpointError) as exc:
        print(f"coverbot: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
