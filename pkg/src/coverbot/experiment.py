"""Episode loop, online training, frozen-policy evaluation."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .baseline import BaselineAgent
from .checkpoint import save_checkpoint
from .dqn import DqnAgent, DqnHyper, EpsilonSchedule, epsilon
from .envgen import GenConfig, Layout, generate
from .grid import DEFAULT_BUDGET, N_ACTIONS, Action, World
from .nn import NonFiniteError
from .rng import Xoshiro256, derive_seed

log = logging.getLogger(__name__)

# seed streams; see rng.derive_seed
STREAM_TRAIN_ENV = 1
STREAM_TRAIN_AGENT = 2
STREAM_EVAL_ENV = 3
STREAM_EVAL_AGENT = 4
STREAM_NET_INIT = 5


class TrainingError(RuntimeError):
    pass


class RandomAgent:
    """Uniform random actions; the reference point for the learning check."""

    name = "random"
    uses_observation = False

    def __init__(self) -> None:
        self.rng = Xoshiro256(0)

    def begin_episode(self, seed: int) -> None:
        self.rng = Xoshiro256(seed)

    def act(self, obs, last_outcome) -> Action:
        return Action(self.rng.randbelow(N_ACTIONS))


@dataclass(frozen=True)
class EpisodeMetrics:
    episode_index: int
    coverage: float
    collisions: int
    steps: int
    terminal_reason: str
    total_reward: int
    epsilon_used: float = 0.0
    newly_visited: int = 0


def run_episode(layout: Layout, agent, budget: int = DEFAULT_BUDGET, train: bool = False,
                episode_index: int = 0, epsilon_used: float = 0.0) -> EpisodeMetrics:
    """Run one episode. The agent must already have had ``begin_episode`` called."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    world = World(layout.cells, layout.base, budget)
    learning = train and hasattr(agent, "learn")
    needs_obs = agent.uses_observation
    obs = world.observe() if needs_obs else None
    last = None
    total = newly = 0
    while not world.done:
        action = agent.act(obs, last)
        last = world.apply_action(action)
        total += last.reward
        newly += last.newly_visited
        next_obs = world.observe() if needs_obs else None
        if learning:
            loss = agent.learn(obs, action, last, next_obs)
            if not math.isfinite(loss):
                raise TrainingError(f"non-finite loss in episode {episode_index}")
        obs = next_obs
    return EpisodeMetrics(
        episode_index=episode_index,
        coverage=world.coverage(),
        collisions=world.collision_count,
        steps=world.step,
        terminal_reason=world.done_reason or "",
        total_reward=total,
        epsilon_used=epsilon_used,
        newly_visited=newly,
    )


@dataclass(frozen=True)
class TrainConfig:
    master_seed: int = 0
    schedule: EpsilonSchedule = field(default_factory=lambda: EpsilonSchedule(total_episodes=5000))
    gamma: float = 0.99
    learning_rate: float = 2e-4
    budget: int = DEFAULT_BUDGET
    raw_time: bool = False

    @property
    def episodes(self) -> int:
        return self.schedule.total_episodes

    def hyper(self) -> DqnHyper:
        return DqnHyper(self.gamma, self.learning_rate, self.schedule, self.raw_time)


DESK_SCHEDULE = EpsilonSchedule(eps0=1.0, decay=0.99, mini_epochs=3, total_episodes=300)
# a shorter horizon learns collision avoidance within 300 episodes
DESK_GAMMA = 0.8


def desk_preset(master_seed: int = 0) -> TrainConfig:
    """Small run that finishes in a few minutes on a laptop CPU."""
    return TrainConfig(master_seed=master_seed, schedule=DESK_SCHEDULE, gamma=DESK_GAMMA)


@dataclass
class TrainingLog:
    config: TrainConfig
    episodes: list[EpisodeMetrics] = field(default_factory=list)
    checkpoints: list[int] = field(default_factory=list)
    agent: Optional[DqnAgent] = None

    @property
    def master_seed(self) -> int:
        return self.config.master_seed


def train_layout(master_seed: int, x: int) -> Layout:
    return generate(GenConfig(seed=derive_seed(master_seed, STREAM_TRAIN_ENV, x)))


def eval_layout(master_seed: int, i: int) -> Layout:
    return generate(GenConfig(seed=derive_seed(master_seed, STREAM_EVAL_ENV, i)))


def train(config: TrainConfig, out_dir: Union[str, Path, None] = None) -> TrainingLog:
    """Train a fresh DQN online, one generated room per episode.

    With ``out_dir`` set, the network is checkpointed after each episode at an
    exploration trough (``epoch<k>.ckpt``, k from 1) and at the end
    (``final.ckpt``).
    """
    hyper = config.hyper()
    agent = DqnAgent.fresh(derive_seed(config.master_seed, STREAM_NET_INIT, 0), hyper, config.budget)
    troughs = config.schedule.troughs()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    log_ = TrainingLog(config=config, agent=agent)
    for x in range(config.episodes):
        layout = train_layout(config.master_seed, x)
        eps = epsilon(x, config.schedule)
        agent.begin_episode(derive_seed(config.master_seed, STREAM_TRAIN_AGENT, x), eps)
        try:
            m = run_episode(layout, agent, config.budget, train=True, episode_index=x, epsilon_used=eps)
        except NonFiniteError as exc:
            raise TrainingError(f"training diverged in episode {x}: {exc}") from exc
        log_.episodes.append(m)
        log.debug("episode %d eps=%.4f coverage=%.3f collisions=%d", x, eps, m.coverage, m.collisions)
        if x in troughs:
            log_.checkpoints.append(x)
            if out is not None:
                save_checkpoint(out / f"epoch{len(log_.checkpoints)}.ckpt", agent.net, agent.adam)
    if out is not None:
        save_checkpoint(out / "final.ckpt", agent.net, agent.adam)
    return log_


@dataclass(frozen=True)
class Summary:
    episodes: int
    coverage_mean: float
    coverage_std: float
    collisions_mean: float
    collisions_std: float
    steps_mean: float
    steps_std: float
    metrics: tuple[EpisodeMetrics, ...] = ()

    @classmethod
    def of(cls, metrics: Sequence[EpisodeMetrics]) -> "Summary":
        cov = np.array([m.coverage for m in metrics])
        col = np.array([m.collisions for m in metrics], dtype=float)
        st = np.array([m.steps for m in metrics], dtype=float)
        return cls(len(metrics), float(cov.mean()), float(cov.std()), float(col.mean()),
                   float(col.std()), float(st.mean()), float(st.std()), tuple(metrics))


def _make_agent(kind: str, net_params: Optional[np.ndarray], hyper: DqnHyper, budget: int):
    if kind == "baseline":
        return BaselineAgent()
    if kind == "random":
        return RandomAgent()
    if kind == "dqn":
        from .nn import DenseNet
        return DqnAgent(DenseNet(net_params), hyper=hyper, budget=budget)
    raise ValueError(f"unknown agent kind {kind!r}")


def _eval_one(args) -> EpisodeMetrics:
    kind, params, hyper, budget, master_seed, i, layout = args
    agent = _make_agent(kind, params, hyper, budget)
    if layout is None:
        layout = eval_layout(master_seed, i)
    agent_seed = derive_seed(master_seed, STREAM_EVAL_AGENT, i)
    if kind == "dqn":
        agent.begin_episode(agent_seed, eps=0.0)
    else:
        agent.begin_episode(agent_seed)
    return run_episode(layout, agent, budget, train=False, episode_index=i)


def evaluate(agent: Union[str, DqnAgent], episodes: int, master_seed: int, budget: int = DEFAULT_BUDGET,
             workers: int = 1, layouts: Optional[Sequence[Layout]] = None) -> Summary:
    """Frozen-policy evaluation on freshly generated rooms.

    ``agent`` is ``"baseline"``, ``"random"`` or a DQN agent (run greedily).
    Results are ordered by episode index whatever the worker count. Custom
    ``layouts`` replace the generated rooms (one per episode).
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if layouts is not None and len(layouts) != episodes:
        raise ValueError("need exactly one layout per episode")
    if isinstance(agent, DqnAgent):
        kind, params, hyper = "dqn", agent.net.params.copy(), agent.hyper
    else:
        kind, params, hyper = agent, None, DqnHyper()
    jobs = [(kind, params, hyper, budget, master_seed, i, layouts[i] if layouts is not None else None)
            for i in range(episodes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            metrics = list(pool.map(_eval_one, jobs, chunksize=max(1, episodes // (4 * workers))))
    else:
        metrics = [_eval_one(job) for job in jobs]
    return Summary.of(metrics)


def running_average(series: Sequence[float], window: int) -> list[float]:
    """Trailing mean: element i averages ``series[max(0, i-window+1) : i+1]``."""
    if window < 1:
        raise ValueError("window must be >= 1")
    values = np.asarray(series, dtype=float)
    csum = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(len(values))
    lo = np.maximum(0, idx - window + 1)
    return list((csum[idx + 1] - csum[lo]) / (idx + 1 - lo))
