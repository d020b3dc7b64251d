"""Online deep Q-learning with a sinusoidally decaying exploration rate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import N_ACTIONS, WINDOW, Action, Observation, StepOutcome
from .nn import Adam, DenseNet, NonFiniteError, adam_step, backward, forward, init_net, masked_l2_grad, q_values
from .rng import Xoshiro256

ENCODED_SIZE = 1 + WINDOW * WINDOW


@dataclass(frozen=True)
class EpsilonSchedule:
    eps0: float = 1.0
    decay: float = 0.9997
    mini_epochs: int = 5
    total_episodes: int = 10000

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps0 <= 1.0:
            raise ValueError("eps0 must be in [0,1]")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("eps_decay must be in (0,1]")
        if self.mini_epochs < 1:
            raise ValueError("mini_epochs must be >= 1")
        if self.total_episodes < 1:
            raise ValueError("episodes must be >= 1")

    def troughs(self) -> list[int]:
        """Episodes (rounded half-up) where the cosine factor reaches zero."""
        X, n = self.total_episodes, self.mini_epochs
        return [math.floor((2 * k + 1) * X / (2 * n) + 0.5) for k in range(n)]


def epsilon(x: int, s: EpsilonSchedule) -> float:
    """eps0 * decay**x * (1 + cos(2*pi*x*n/X)) / 2."""
    wave = 0.5 * (1.0 + math.cos(2.0 * math.pi * x * s.mini_epochs / s.total_episodes))
    return s.eps0 * s.decay ** x * wave


def encode(obs: Observation, budget: int, raw_time: bool = False) -> np.ndarray:
    """Flatten an observation: [elapsed time, 81 window cells row-major]."""
    vec = np.empty(ENCODED_SIZE)
    vec[0] = obs.step if raw_time else obs.step / budget
    vec[1:] = obs.window.ravel()
    return vec


def decode_window(vec: np.ndarray) -> np.ndarray:
    return vec[1:].reshape(WINDOW, WINDOW).astype(np.int8)


def greedy_action(q: np.ndarray) -> Action:
    # np.argmax returns the first maximum, i.e. the lowest action index on ties
    return Action(int(np.argmax(q)))


def select_action(net: DenseNet, x_vec: np.ndarray, eps: float, rng: Xoshiro256) -> Action:
    if eps > 0.0 and rng.random() < eps:
        return Action(rng.randbelow(N_ACTIONS))
    return greedy_action(q_values(net, x_vec))


@dataclass(frozen=True)
class Transition:
    s: np.ndarray
    a: int
    r: int
    s_next: np.ndarray
    terminal: bool


@dataclass(frozen=True)
class DqnHyper:
    gamma: float = 0.99
    learning_rate: float = 2e-4
    schedule: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    raw_time: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0,1)")
        if not self.learning_rate > 0.0:
            raise ValueError("learning_rate must be > 0")


def td_update(net: DenseNet, adam: Adam, tr: Transition, h: DqnHyper) -> float:
    """One online Q-learning step on a single transition; returns the pre-update loss.

    The bootstrap target uses the network being trained (no target network).
    """
    q, cache = forward(net, tr.s)
    if tr.terminal:
        target = float(tr.r)
    else:
        target = tr.r + h.gamma * float(np.max(q_values(net, tr.s_next)))
    loss, dq = masked_l2_grad(q, tr.a, target)
    if not math.isfinite(loss):
        raise NonFiniteError("non-finite TD loss")
    adam_step(net, adam, backward(net, cache, dq))
    return loss


class DqnAgent:
    name = "dqn"
    uses_observation = True

    def __init__(self, net: DenseNet, adam: Optional[Adam] = None, hyper: Optional[DqnHyper] = None,
                 budget: int = 1800) -> None:
        self.hyper = hyper or DqnHyper()
        self.net = net
        self.adam = adam if adam is not None else Adam(lr=self.hyper.learning_rate)
        self.budget = budget
        self.eps = 0.0
        self.rng = Xoshiro256(0)
        self.losses: list[float] = []

    @classmethod
    def fresh(cls, seed: int, hyper: Optional[DqnHyper] = None, budget: int = 1800) -> "DqnAgent":
        return cls(init_net(seed), hyper=hyper, budget=budget)

    def begin_episode(self, seed: int, eps: float = 0.0) -> None:
        self.rng = Xoshiro256(seed)
        self.eps = eps
        self.losses = []

    def encode(self, obs: Observation) -> np.ndarray:
        return encode(obs, self.budget, self.hyper.raw_time)

    def act(self, obs: Observation, last_outcome: Optional[StepOutcome]) -> Action:
        return select_action(self.net, self.encode(obs), self.eps, self.rng)

    def learn(self, obs: Observation, action: Action, outcome: StepOutcome, next_obs: Observation) -> float:
        tr = Transition(self.encode(obs), int(action), outcome.reward, self.encode(next_obs), outcome.done)
        loss = td_update(self.net, self.adam, tr, self.hyper)
        self.losses.append(loss)
        return loss

    def frozen(self) -> "DqnAgent":
        """A copy for evaluation; shares nothing mutable with the original."""
        clone = DqnAgent(self.net.copy(), hyper=self.hyper, budget=self.budget)
        return clone
