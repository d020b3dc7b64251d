"""Versioned text checkpoints for the Q-network and its Adam state.

Layout::

    coverbot-ckpt v1
    dims 82 64 3
    <params, one float per line: W1 row-major, b1, W2 row-major, b2>
    <Adam first moments, same order>
    <Adam second moments, same order>
    t <adam step>

Floats are written with ``repr`` so the round trip is exact.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Union

import numpy as np

from .nn import N_HIDDEN, N_INPUT, N_OUTPUT, N_PARAMS, Adam, DenseNet

MAGIC = "coverbot-ckpt v1"
DIMS = f"dims {N_INPUT} {N_HIDDEN} {N_OUTPUT}"


class CheckpointError(ValueError):
    pass


def dumps(net: DenseNet, adam: Adam) -> str:
    lines = [MAGIC, DIMS]
    for block in (net.params, adam.m, adam.v):
        lines.extend(repr(float(v)) for v in block)
    lines.append(f"t {adam.t}")
    return "\n".join(lines) + "\n"


def loads(text: str, lr: float = 2e-4) -> tuple[DenseNet, Adam]:
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise CheckpointError(f"unsupported checkpoint version: {lines[0] if lines else '<empty>'!r}")
    if len(lines) < 2 or lines[1] != DIMS:
        raise CheckpointError(f"dimension mismatch: expected {DIMS!r}, got {lines[1] if len(lines) > 1 else '<missing>'!r}")
    body = lines[2:]
    expected = 3 * N_PARAMS + 1
    if len(body) != expected or not body[-1].startswith("t "):
        raise CheckpointError(f"dimension mismatch: expected {expected} value lines, got {len(body)}")
    try:
        values = np.array([float(s) for s in body[:-1]], dtype=np.float64)
    except ValueError as exc:
        raise CheckpointError(f"malformed float: {exc}") from exc
    try:
        t = int(body[-1][2:])
    except ValueError as exc:
        raise CheckpointError(f"malformed step line {body[-1]!r}") from exc

    net = DenseNet(values[:N_PARAMS])
    adam = Adam(lr=lr)
    adam.m = values[N_PARAMS:2 * N_PARAMS].copy()
    adam.v = values[2 * N_PARAMS:].copy()
    adam.t = t
    return net, adam


def save_checkpoint(path: Union[str, os.PathLike], net: DenseNet, adam: Adam) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(dumps(net, adam))
    except OSError as exc:
        raise OSError(f"cannot write checkpoint {path}: {exc}") from exc


def load_checkpoint(path: Union[str, os.PathLike], lr: float = 2e-4) -> tuple[DenseNet, Adam]:
    path = Path(path)
    with open(path, encoding="ascii") as fh:
        return loads(fh.read(), lr=lr)
