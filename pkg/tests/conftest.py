from collections import deque

import numpy as np
import pytest


def flood_fill_count(cells, start):
    """Reference 4-neighbour flood fill over a nested-list/array grid (True = obstacle)."""
    rows, cols = len(cells), len(cells[0])
    seen = {tuple(start)}
    todo = deque([tuple(start)])
    while todo:
        r, c = todo.popleft()
        for nr, nc in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
            if 0 <= nr < rows and 0 <= nc < cols and (nr, nc) not in seen and not cells[nr][nc]:
                seen.add((nr, nc))
                todo.append((nr, nc))
    return len(seen)


@pytest.fixture
def open_room():
    def make(rows=3, cols=3):
        return np.zeros((rows, cols), dtype=bool)
    return make
