"""Random furnished rooms.

A rectangular room of 10..20 cells per side receives up to six pieces drawn
from a fixed catalog of 17 furniture shapes, each rotated by a random multiple
of 90 degrees. A placement is rejected (and redrawn, at most 50 times per
piece) when it would overlap an earlier piece or split the free floor into
more than one 4-connected region. The base is then drawn uniformly from the
free cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import reachable_empty
from .rng import Xoshiro256

PLACEMENT_RETRIES = 50


def _mask(*rows: str) -> np.ndarray:
    return np.array([[ch == "x" for ch in row] for row in rows], dtype=bool)


def _rect(h: int, w: int) -> np.ndarray:
    return np.ones((h, w), dtype=bool)


@dataclass(frozen=True)
class FurniturePiece:
    id: int
    name: str
    mask: np.ndarray = field(repr=False)


_CATALOG_MASKS = [
    ("block-1x1", _rect(1, 1)),
    ("bar-1x2", _rect(1, 2)),
    ("bar-1x3", _rect(1, 3)),
    ("bar-1x4", _rect(1, 4)),
    ("table-2x2", _rect(2, 2)),
    ("table-2x3", _rect(2, 3)),
    ("table-2x4", _rect(2, 4)),
    ("table-3x3", _rect(3, 3)),
    ("table-3x4", _rect(3, 4)),
    ("table-4x4", _rect(4, 4)),
    ("sofa-L", _mask("x.", "x.", "xx")),
    ("desk-T", _mask("xxx", ".x.")),
    ("bench-S", _mask(".xx", "xx.")),
    ("bench-Z", _mask("xx.", ".xx")),
    ("sectional-U", _mask("x.x", "xxx")),
    ("plus", _mask(".x.", "xxx", ".x.")),
    ("rack-H", _mask("x.x", "xxx", "x.x")),
]


def furniture_catalog() -> list[FurniturePiece]:
    """The fixed 17-piece catalog; piece 0 is the 1x1 block."""
    pieces = []
    for i, (name, mask) in enumerate(_CATALOG_MASKS):
        mask = mask.copy()
        mask.setflags(write=False)
        pieces.append(FurniturePiece(i, name, mask))
    return pieces


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    min_dim: int = 10
    max_dim: int = 20
    max_pieces: int = 6

    def __post_init__(self) -> None:
        if not 10 <= self.min_dim <= self.max_dim <= 20:
            raise ValueError("need 10 <= min_dim <= max_dim <= 20")
        if not 0 <= self.max_pieces <= 6:
            raise ValueError("max_pieces must be in [0, 6]")


@dataclass
class Layout:
    cells: np.ndarray  # bool, True = obstacle
    base: tuple[int, int]
    pieces_placed: int = 0

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def empty_count(self) -> int:
        return int((~self.cells).sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Layout):
            return NotImplemented
        return self.base == other.base and np.array_equal(self.cells, other.cells)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.base[0]} {self.base[1]}"]
        lines += ["".join("x" if v else "." for v in row) for row in self.cells]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Layout":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty layout text")
        try:
            rows, cols, br, bc = (int(tok) for tok in lines[0].split())
        except ValueError as exc:
            raise ValueError(f"bad layout header {lines[0]!r}") from exc
        body = lines[1:]
        if len(body) != rows or any(len(line) != cols for line in body):
            raise ValueError(f"layout body does not match header {rows}x{cols}")
        if any(ch not in ".x" for line in body for ch in line):
            raise ValueError("layout cells must be '.' or 'x'")
        cells = np.array([[ch == "x" for ch in line] for line in body], dtype=bool)
        return cls(cells, (br, bc))


def is_connected(layout: Layout) -> bool:
    """True iff every empty cell is 4-reachable from the base."""
    if layout.cells[layout.base]:
        return False
    return reachable_empty(layout.cells, layout.base) == layout.empty_count


def _floor_connected(cells: np.ndarray) -> bool:
    free = np.argwhere(~cells)
    if len(free) == 0:
        return False
    return reachable_empty(cells, tuple(free[0])) == len(free)


def generate(config: GenConfig) -> Layout:
    rng = Xoshiro256(config.seed)
    rows = rng.randint(config.min_dim, config.max_dim)
    cols = rng.randint(config.min_dim, config.max_dim)
    cells = np.zeros((rows, cols), dtype=bool)
    catalog = furniture_catalog()

    n_pieces = rng.randint(0, config.max_pieces)
    placed = 0
    for _ in range(n_pieces):
        piece = catalog[rng.randbelow(len(catalog))]
        for _attempt in range(PLACEMENT_RETRIES):
            shape = np.rot90(piece.mask, k=rng.randbelow(4))
            h, w = shape.shape
            r0 = rng.randint(0, rows - h)
            c0 = rng.randint(0, cols - w)
            region = cells[r0:r0 + h, c0:c0 + w]
            if (region & shape).any():
                continue
            trial = cells.copy()
            trial[r0:r0 + h, c0:c0 + w] |= shape
            if not _floor_connected(trial):
                continue
            cells = trial
            placed += 1
            break

    free = np.argwhere(~cells)
    br, bc = free[rng.randbelow(len(free))]
    return Layout(cells, (int(br), int(bc)), placed)
