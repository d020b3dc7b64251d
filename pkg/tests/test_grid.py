import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coverbot.envgen import GenConfig, generate
from coverbot.grid import (
    BASE, EMPTY, OBSTACLE, UNOBSERVED, Action, Heading, WorldFinished,
    apply_action, coverage, new_world, observe,
)

from conftest import flood_fill_count


def test_fresh_world(open_room):
    w = new_world(open_room(), (1, 1), 1800)
    assert w.visited_count == 1 and w.empty_count == 9
    assert coverage(w) == pytest.approx(1 / 9)
    assert w.pose == ((1, 1), Heading.NORTH)
    assert w.step == 0
    k = w.knowledge
    assert k[1, 1] == BASE
    assert (k == UNOBSERVED).sum() == 8


def test_base_on_obstacle_rejected(open_room):
    cells = open_room()
    cells[1, 1] = True
    with pytest.raises(ValueError, match="obstacle"):
        new_world(cells, (1, 1))


def test_disconnected_layout_rejected(open_room):
    cells = open_room(5, 5)
    cells[2, :] = True
    with pytest.raises(ValueError, match="connected"):
        new_world(cells, (0, 0))


def test_generated_layout_accepted():
    lay = generate(GenConfig(seed=42))
    w = new_world(lay.cells, lay.base)
    free = int((~lay.cells).sum())
    assert flood_fill_count(lay.cells.tolist(), lay.base) == free
    assert w.empty_count == free
    assert coverage(w) == 1 / free


def test_turn_left_from_north(open_room):
    w = new_world(open_room(), (1, 1))
    out = apply_action(w, Action.TURN_LEFT)
    assert w.pose == ((1, 1), Heading.WEST)
    assert out.reward == 0 and not out.collided and not out.newly_visited


def test_headings_cycle(open_room):
    w = new_world(open_room(), (1, 1))
    seen = []
    for _ in range(4):
        apply_action(w, Action.TURN_RIGHT)
        seen.append(w.heading)
    assert seen == [Heading.EAST, Heading.SOUTH, Heading.WEST, Heading.NORTH]


def test_forward_into_obstacle(open_room):
    cells = open_room()
    cells[0, 1] = True
    w = new_world(cells, (1, 1))
    out = apply_action(w, Action.FORWARD)
    assert out.reward == -1 and out.collided and not out.newly_visited
    assert w.pose == ((1, 1), Heading.NORTH)
    assert w.knowledge[0, 1] == OBSTACLE
    assert w.collision_count == 1 and w.step == 1


def test_forward_into_boundary_writes_no_knowledge(open_room):
    w = new_world(open_room(), (0, 1))
    before = w.knowledge.copy()
    out = apply_action(w, Action.FORWARD)
    assert out.reward == -1 and out.collided
    assert np.array_equal(w.knowledge, before)


def test_forward_into_unvisited_then_visited(open_room):
    w = new_world(open_room(), (1, 1))
    out = apply_action(w, Action.FORWARD)
    assert out.reward == 1 and out.newly_visited
    assert w.knowledge[0, 1] == EMPTY
    apply_action(w, Action.TURN_LEFT)
    apply_action(w, Action.TURN_LEFT)
    out = apply_action(w, Action.FORWARD)  # back onto the base
    assert out.reward == 0 and not out.newly_visited
    assert w.knowledge[1, 1] == BASE


def test_coverage_after_two_forwards_from_center(open_room):
    # Hand simulation: (1,1) -> (0,1) is new; the second move hits the north wall.
    w = new_world(open_room(), (1, 1))
    rewards = [apply_action(w, Action.FORWARD).reward for _ in range(2)]
    assert rewards == [1, -1]
    assert coverage(w) == pytest.approx(2 / 9)
    # with room to move, two steps north visit two new cells
    w5 = new_world(open_room(5, 5), (2, 2))
    for _ in range(2):
        apply_action(w5, Action.FORWARD)
    assert coverage(w5) == pytest.approx(3 / 25)


def test_full_coverage_terminates(open_room):
    w = new_world(open_room(1, 3), (0, 0))
    apply_action(w, Action.TURN_RIGHT)
    apply_action(w, Action.FORWARD)
    out = apply_action(w, Action.FORWARD)
    assert out.done and out.done_reason == "full_coverage"
    assert coverage(w) == 1.0
    with pytest.raises(WorldFinished):
        apply_action(w, Action.FORWARD)


def test_budget_terminates(open_room):
    w = new_world(open_room(), (1, 1), budget=3)
    outs = [apply_action(w, Action.TURN_LEFT) for _ in range(3)]
    assert [o.done for o in outs] == [False, False, True]
    assert outs[-1].done_reason == "budget_exhausted"
    assert w.step == 3


def test_observe_fresh_world(open_room):
    w = new_world(open_room(), (1, 1))
    obs = observe(w)
    assert obs.window.shape == (9, 9)
    assert obs.window[4, 4] == BASE
    assert (obs.window == UNOBSERVED).sum() == 80
    assert obs.step == 0


def test_observe_at_corner_pads_unobserved(open_room):
    cells = open_room(10, 10)
    cells[1, 0] = True
    w = new_world(cells, (0, 0))
    apply_action(w, Action.TURN_LEFT)
    apply_action(w, Action.TURN_LEFT)
    apply_action(w, Action.FORWARD)  # south into the obstacle at (1, 0)
    win = w.window_north_up()
    assert (win[:4, :] == UNOBSERVED).all() and (win[:, :4] == UNOBSERVED).all()
    assert win[4, 4] == BASE and win[5, 4] == OBSTACLE


def _rotate_oracle(win, heading):
    """Explicit index rotation: out[i][j] such that 'ahead' is row 0."""
    n = len(win)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if heading == Heading.NORTH:
                out[i][j] = win[i][j]
            elif heading == Heading.EAST:   # ahead = +col, left = north
                out[i][j] = win[j][n - 1 - i]
            elif heading == Heading.SOUTH:  # ahead = +row, left = east
                out[i][j] = win[n - 1 - i][n - 1 - j]
            else:                           # ahead = -col, left = south
                out[i][j] = win[n - 1 - j][i]
    return np.array(out)


def _world_with_knowledge(seed):
    rng = np.random.default_rng(seed)
    w = new_world(np.zeros((15, 15), dtype=bool), (7, 7))
    k = w.knowledge
    k[...] = rng.integers(-1, 2, size=k.shape)
    k[7, 7] = BASE
    return w


@pytest.mark.parametrize("heading", list(Heading))
def test_window_rotation_matches_oracle(heading):
    w = _world_with_knowledge(int(heading))
    north = w.window_north_up()
    w.heading = heading
    assert np.array_equal(observe(w).window, _rotate_oracle(north.tolist(), heading))


def test_east_window_is_north_window_rotated_counterclockwise():
    w = _world_with_knowledge(5)
    north = observe(w).window
    w.heading = Heading.EAST
    east = observe(w).window
    assert np.array_equal(east, np.rot90(north, 1))
    # the cell straight ahead of an east-facing agent is its east neighbour
    assert east[3, 4] == w.knowledge[7, 8]
    # the cell to its left is its north neighbour
    assert east[4, 3] == w.knowledge[6, 7]


def test_observe_is_pure(open_room):
    w = new_world(open_room(6, 6), (3, 3))
    apply_action(w, Action.FORWARD)
    a, b = observe(w), observe(w)
    assert a.step == b.step and np.array_equal(a.window, b.window)


def test_observation_has_no_visited_values(open_room):
    w = new_world(open_room(6, 6), (3, 3))
    for a in (Action.FORWARD, Action.FORWARD, Action.TURN_LEFT, Action.FORWARD):
        apply_action(w, a)
    assert set(np.unique(observe(w).window)) <= {-1, 0, 1, 2}


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32), actions=st.lists(st.sampled_from(list(Action)), min_size=1, max_size=300))
def test_dynamics_invariants(seed, actions):
    lay = generate(GenConfig(seed=seed))
    w = new_world(lay.cells, lay.base, budget=len(actions))
    prev_cov = coverage(w)
    total = newly = 0
    for i, a in enumerate(actions):
        pos_before = w.pose[0]
        visited_before = w.visited_count
        out = apply_action(w, a)
        assert out.reward in (-1, 0, 1)
        assert out.collided == (out.reward == -1)
        assert out.newly_visited == (out.reward == 1)
        assert out.newly_visited == (w.visited_count == visited_before + 1)
        if a == Action.FORWARD and out.collided:
            assert w.pose[0] == pos_before
        assert coverage(w) >= prev_cov
        prev_cov = coverage(w)
        total += out.reward
        newly += out.newly_visited
        assert w.step == i + 1
        if out.done:
            break
    assert total == newly - w.collision_count
    k = w.knowledge
    assert not lay.cells[k == EMPTY].any()
    assert lay.cells[k == OBSTACLE].all()
    assert k[lay.base] == BASE
    assert not lay.cells[w.pose[0]]
