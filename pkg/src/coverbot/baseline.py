"""Grid version of the stock Roomba behaviour.

The robot drives an outward square spiral (legs of 1, 1, 2, 2, 3, 3, ...
cells, always turning the same way) until it first bumps something, then
random-walks for the rest of the episode: drive straight until a bump, turn
left or right at random, and keep turning the same way while the next
forward move still bumps.

Only the previous step's outcome is consulted; the knowledge map is never
read, as the real robot has nothing but a bumper.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .grid import Action, Observation, StepOutcome
from .rng import Xoshiro256


class Mode(Enum):
    SPIRAL = "spiral"
    RANDOM_WALK = "random_walk"


@dataclass
class BaselineState:
    rng: Xoshiro256
    turn_direction: Action
    mode: Mode = Mode.SPIRAL
    spiral_leg_length: int = 1
    spiral_steps_remaining: int = 1
    spiral_legs_completed_at_length: int = 0
    last_action: Optional[Action] = None
    # Turn being repeated while forward moves keep bumping.
    escape_turn: Optional[Action] = None

    @classmethod
    def fresh(cls, seed: int) -> "BaselineState":
        rng = Xoshiro256(seed)
        direction = Action.TURN_LEFT if rng.randbelow(2) == 0 else Action.TURN_RIGHT
        return cls(rng=rng, turn_direction=direction)


def spiral_next(state: BaselineState) -> Action:
    if state.spiral_steps_remaining > 0:
        state.spiral_steps_remaining -= 1
        return Action.FORWARD
    state.spiral_legs_completed_at_length += 1
    if state.spiral_legs_completed_at_length == 2:
        state.spiral_leg_length += 1
        state.spiral_legs_completed_at_length = 0
    state.spiral_steps_remaining = state.spiral_leg_length
    return state.turn_direction


def random_walk_next(state: BaselineState, last_outcome: Optional[StepOutcome]) -> Action:
    if last_outcome is None or not last_outcome.collided:
        if state.last_action == Action.FORWARD:
            state.escape_turn = None
        return Action.FORWARD
    if state.last_action == Action.FORWARD and state.escape_turn is not None:
        # the forward move after our last turn bumped too: keep rotating the same way
        return state.escape_turn
    state.escape_turn = Action.TURN_LEFT if state.rng.randbelow(2) == 0 else Action.TURN_RIGHT
    return state.escape_turn


def baseline_next(
    state: BaselineState, obs: Optional[Observation], last_outcome: Optional[StepOutcome]
) -> Action:
    """Next baseline action. ``obs`` is accepted for interface parity and ignored."""
    if state.mode is Mode.SPIRAL and last_outcome is not None and last_outcome.collided:
        state.mode = Mode.RANDOM_WALK
    if state.mode is Mode.SPIRAL:
        action = spiral_next(state)
    else:
        action = random_walk_next(state, last_outcome)
    state.last_action = action
    return action


class BaselineAgent:
    """Episode-level wrapper used by the experiment runner."""

    name = "baseline"
    uses_observation = False

    def __init__(self) -> None:
        self.state: Optional[BaselineState] = None

    def begin_episode(self, seed: int) -> None:
        self.state = BaselineState.fresh(seed)

    def act(self, obs: Optional[Observation], last_outcome: Optional[StepOutcome]) -> Action:
        assert self.state is not None, "begin_episode() not called"
        return baseline_next(self.state, obs, last_outcome)
