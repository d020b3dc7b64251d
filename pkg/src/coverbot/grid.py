"""Ground-truth gridworld dynamics with a bumper-only agent.

The agent starts knowing only its base cell. Driving forward into a hidden
cell either moves onto it or bumps an obstacle; bumping costs a step, leaves
the agent in place and marks the cell as a known obstacle. The layout border
is an implicit wall that produces a collision but no knowledge.

Rewards: +1 for entering an unvisited cell, -1 for a collision, 0 otherwise.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

DEFAULT_BUDGET = 1800
WINDOW = 9
_HALF = WINDOW // 2

UNOBSERVED = -1
EMPTY = 0
OBSTACLE = 1
BASE = 2


class Heading(IntEnum):
    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3


class Action(IntEnum):
    FORWARD = 0
    TURN_LEFT = 1
    TURN_RIGHT = 2


N_ACTIONS = len(Action)

# (drow, dcol) per heading; row 0 is the northern edge.
HEADING_DELTA = {
    Heading.NORTH: (-1, 0),
    Heading.EAST: (0, 1),
    Heading.SOUTH: (1, 0),
    Heading.WEST: (0, -1),
}


def turn_left(h: Heading) -> Heading:
    return Heading((h + 3) % 4)


def turn_right(h: Heading) -> Heading:
    return Heading((h + 1) % 4)


# Flat gather indices turning a north-up crop into the heading-up window:
# counter-clockwise by 90 degrees per heading step brings "ahead" to row 0.
_ROTATION_INDEX = [
    np.ascontiguousarray(np.rot90(np.arange(WINDOW * WINDOW).reshape(WINDOW, WINDOW), k=h)).ravel()
    for h in range(4)
]


class WorldFinished(RuntimeError):
    """Raised when an action is applied to a world whose episode is over."""


@dataclass(frozen=True)
class StepOutcome:
    reward: int
    collided: bool
    newly_visited: bool
    done: bool
    done_reason: Optional[str] = None  # "budget_exhausted" | "full_coverage"


@dataclass(frozen=True)
class Observation:
    """What the agent may see: elapsed steps and its egocentric 9x9 window."""

    step: int
    window: np.ndarray  # int8, (9, 9), heading points to row 0


def reachable_empty(obstacles: np.ndarray, start: tuple[int, int]) -> int:
    """Number of empty cells 4-connected to ``start`` (BFS flood fill)."""
    rows, cols = obstacles.shape
    seen = np.zeros_like(obstacles, dtype=bool)
    seen[start] = True
    queue = deque([start])
    count = 0
    while queue:
        r, c = queue.popleft()
        count += 1
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols and not seen[nr, nc] and not obstacles[nr, nc]:
                seen[nr, nc] = True
                queue.append((nr, nc))
    return count


class World:
    """Full simulation state: hidden layout, agent knowledge, pose, counters.

    ``knowledge`` is stored with a border of ``UNOBSERVED`` padding so the
    observation window never needs bounds checks; use :attr:`knowledge` for
    the unpadded view.
    """

    def __init__(self, obstacles: np.ndarray, base: tuple[int, int], budget: int = DEFAULT_BUDGET) -> None:
        obstacles = np.asarray(obstacles, dtype=bool)
        if obstacles.ndim != 2 or obstacles.size == 0:
            raise ValueError("layout must be a non-empty 2-D grid")
        if budget < 1:
            raise ValueError("budget must be >= 1")
        rows, cols = obstacles.shape
        br, bc = base
        if not (0 <= br < rows and 0 <= bc < cols):
            raise ValueError(f"base {base} outside the {rows}x{cols} layout")
        if obstacles[br, bc]:
            raise ValueError(f"base {base} lies on an obstacle")
        empty_count = int((~obstacles).sum())
        if reachable_empty(obstacles, (br, bc)) != empty_count:
            raise ValueError("layout's empty region is not 4-connected")

        self.obstacles = obstacles.copy()
        self.obstacles.setflags(write=False)
        self.rows, self.cols = rows, cols
        self.base = (br, bc)
        self.budget = budget
        self._padded = np.full((rows + 2 * _HALF, cols + 2 * _HALF), UNOBSERVED, dtype=np.int8)
        self._padded[br + _HALF, bc + _HALF] = BASE
        self.visited = np.zeros((rows, cols), dtype=bool)
        self.visited[br, bc] = True
        self.row, self.col = br, bc
        self.heading = Heading.NORTH
        self.step = 0
        self.empty_count = empty_count
        self.visited_count = 1
        self.collision_count = 0
        self.done = empty_count == 1
        self.done_reason: Optional[str] = "full_coverage" if self.done else None

    @property
    def knowledge(self) -> np.ndarray:
        return self._padded[_HALF:_HALF + self.rows, _HALF:_HALF + self.cols]

    @property
    def pose(self) -> tuple[tuple[int, int], Heading]:
        return (self.row, self.col), self.heading

    def coverage(self) -> float:
        return self.visited_count / self.empty_count

    def apply_action(self, action: Action) -> StepOutcome:
        if self.done:
            raise WorldFinished(f"episode already ended ({self.done_reason})")
        self.step += 1
        reward = 0
        collided = newly = False
        if action == Action.TURN_LEFT:
            self.heading = turn_left(self.heading)
        elif action == Action.TURN_RIGHT:
            self.heading = turn_right(self.heading)
        elif action == Action.FORWARD:
            dr, dc = HEADING_DELTA[self.heading]
            tr, tc = self.row + dr, self.col + dc
            inside = 0 <= tr < self.rows and 0 <= tc < self.cols
            if not inside or self.obstacles[tr, tc]:
                if inside:
                    self._padded[tr + _HALF, tc + _HALF] = OBSTACLE
                self.collision_count += 1
                collided = True
                reward = -1
            else:
                self.row, self.col = tr, tc
                cell = (tr + _HALF, tc + _HALF)
                if self._padded[cell] == UNOBSERVED:
                    self._padded[cell] = EMPTY
                if not self.visited[tr, tc]:
                    self.visited[tr, tc] = True
                    self.visited_count += 1
                    newly = True
                    reward = 1
        else:
            raise ValueError(f"unknown action {action!r}")

        if self.visited_count == self.empty_count:
            self.done, self.done_reason = True, "full_coverage"
        elif self.step >= self.budget:
            self.done, self.done_reason = True, "budget_exhausted"
        return StepOutcome(reward, collided, newly, self.done, self.done_reason)

    def window_north_up(self) -> np.ndarray:
        """The 9x9 knowledge crop around the agent, unrotated (north on top)."""
        return self._padded[self.row:self.row + WINDOW, self.col:self.col + WINDOW].copy()

    def observe(self) -> Observation:
        crop = self._padded[self.row:self.row + WINDOW, self.col:self.col + WINDOW]
        window = crop.ravel()[_ROTATION_INDEX[self.heading]].reshape(WINDOW, WINDOW)
        return Observation(self.step, window)


def new_world(obstacles: np.ndarray, base: tuple[int, int], budget: int = DEFAULT_BUDGET) -> World:
    return World(obstacles, base, budget)


def coverage(world: World) -> float:
    return world.coverage()


def apply_action(world: World, action: Action) -> StepOutcome:
    return world.apply_action(action)


def observe(world: World) -> Observation:
    return world.observe()
