"""A small dense Q-network (82 -> 64 -> ReLU -> 3) trained with Adam.

All parameters live in one flat float64 vector; ``W1``, ``b1``, ``W2`` and
``b2`` are views into it, in that order. Adam and the checkpoint format work
on the flat vector directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .rng import Xoshiro256

N_INPUT = 82
N_HIDDEN = 64
N_OUTPUT = 3

SHAPES = ((N_HIDDEN, N_INPUT), (N_HIDDEN,), (N_OUTPUT, N_HIDDEN), (N_OUTPUT,))
_SIZES = [int(np.prod(s)) for s in SHAPES]
_OFFSETS = [int(o) for o in np.cumsum([0] + _SIZES)]
N_PARAMS = _OFFSETS[-1]


class NonFiniteError(FloatingPointError):
    """A parameter or loss became NaN or infinite."""


def _views(flat: np.ndarray) -> list[np.ndarray]:
    return [flat[_OFFSETS[i]:_OFFSETS[i + 1]].reshape(shape) for i, shape in enumerate(SHAPES)]


class DenseNet:
    def __init__(self, params: Optional[np.ndarray] = None) -> None:
        if params is None:
            params = np.zeros(N_PARAMS)
        params = np.array(params, dtype=np.float64)
        if params.shape != (N_PARAMS,):
            raise ValueError(f"expected {N_PARAMS} parameters, got {params.shape}")
        self.params = params
        self.W1, self.b1, self.W2, self.b2 = _views(self.params)

    def copy(self) -> "DenseNet":
        return DenseNet(self.params.copy())


def init_net(seed: int) -> DenseNet:
    """Glorot-uniform weights drawn from the portable generator; zero biases."""
    rng = Xoshiro256(seed)
    net = DenseNet()
    for W in (net.W1, net.W2):
        fan_out, fan_in = W.shape
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        draws = np.array([rng.random() for _ in range(W.size)])
        W[...] = (2.0 * draws - 1.0).reshape(W.shape) * limit
    return net


@dataclass
class ForwardCache:
    x: np.ndarray
    pre: np.ndarray
    hidden: np.ndarray
    q: np.ndarray


def forward(net: DenseNet, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    pre = net.W1 @ x + net.b1
    hidden = np.maximum(pre, 0.0)
    q = net.W2 @ hidden + net.b2
    return q, ForwardCache(x, pre, hidden, q)


def q_values(net: DenseNet, x: np.ndarray) -> np.ndarray:
    return net.W2 @ np.maximum(net.W1 @ x + net.b1, 0.0) + net.b2


def masked_l2_grad(q: np.ndarray, action: int, target: float) -> tuple[float, np.ndarray]:
    """Squared TD error on the chosen action only; other outputs get zero gradient."""
    err = float(q[action]) - target
    dq = np.zeros(N_OUTPUT)
    dq[action] = 2.0 * err
    return err * err, dq


def backward(net: DenseNet, cache: ForwardCache, dq: np.ndarray) -> np.ndarray:
    """Gradient of the loss w.r.t. the flat parameter vector.

    The ReLU derivative at exactly zero is taken as zero.
    """
    grads = np.zeros(N_PARAMS)
    gW1, gb1, gW2, gb2 = _views(grads)
    np.multiply(dq[:, None], cache.hidden[None, :], out=gW2)
    gb2[...] = dq
    dpre = (net.W2.T @ dq) * (cache.pre > 0.0)
    np.multiply(dpre[:, None], cache.x[None, :], out=gW1)
    gb1[...] = dpre
    return grads


class Adam:
    """Adam on a flat parameter vector (Kingma & Ba, bias-corrected moments)."""

    def __init__(self, n_params: int = N_PARAMS, lr: float = 2e-4, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0
        self._buf = np.empty(n_params)
        self._buf2 = np.empty(n_params)

    def step(self, params: np.ndarray, grads: np.ndarray) -> None:
        """Update ``params`` in place.

        m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
        params -= lr * m_hat / (sqrt(v_hat) + eps), with bias-corrected
        m_hat = m / (1 - b1^t) and v_hat = v / (1 - b2^t).
        """
        self.t += 1
        buf, buf2 = self._buf, self._buf2
        self.m *= self.beta1
        np.multiply(grads, 1.0 - self.beta1, out=buf)
        self.m += buf
        self.v *= self.beta2
        np.multiply(grads, grads, out=buf)
        buf *= 1.0 - self.beta2
        self.v += buf
        np.divide(self.v, 1.0 - self.beta2 ** self.t, out=buf)
        np.sqrt(buf, out=buf)
        buf += self.eps
        np.divide(self.m, 1.0 - self.beta1 ** self.t, out=buf2)
        buf2 /= buf
        buf2 *= self.lr
        params -= buf2
        if not math.isfinite(float(params.sum())) and not np.isfinite(params).all():
            raise NonFiniteError(f"non-finite parameters after Adam step {self.t}")


def adam_step(net: DenseNet, adam: Adam, grads: np.ndarray) -> None:
    adam.step(net.params, grads)


def perturbed_losses(net: DenseNet, x: np.ndarray, action: int, target: float, delta: float,
                     dtype=np.float64) -> np.ndarray:
    """Loss of every network obtained by adding ``delta`` to one parameter.

    Entry ``i`` is the loss after ``params[i] += delta``, each evaluated with
    a full forward pass of that perturbed network (batched; the first layer's
    perturbed pre-activation is ``W1 x + b1`` plus ``delta`` times the input
    the changed weight multiplies). Arithmetic runs in ``dtype``.
    """
    W1, b1, W2, b2 = (a.astype(dtype) for a in (net.W1, net.b1, net.W2, net.b2))
    x = np.asarray(x).astype(dtype)
    target, delta = dtype(target), dtype(delta)
    pre = W1 @ x + b1
    hidden = np.maximum(pre, 0)
    eye = np.eye(N_HIDDEN, dtype=dtype)

    # W1[j, k] and b1[j]: pre-activation of unit j shifts by delta * input_k
    inputs = np.append(x, dtype(1))
    pre_b = pre[None, None, :] + delta * eye[:, None, :] * inputs[None, :, None]
    q_first = np.maximum(pre_b, 0) @ W2.T + b2
    loss_w1 = (q_first[:, :N_INPUT, action] - target) ** 2
    loss_b1 = (q_first[:, N_INPUT, action] - target) ** 2

    # W2[a, j] and b2[a]
    W2_b = np.broadcast_to(W2, (N_OUTPUT, N_HIDDEN, N_OUTPUT, N_HIDDEN)).copy()
    idx_a, idx_j = np.meshgrid(np.arange(N_OUTPUT), np.arange(N_HIDDEN), indexing="ij")
    W2_b[idx_a, idx_j, idx_a, idx_j] += delta
    q_w2 = W2_b @ hidden + b2
    loss_w2 = (q_w2[..., action] - target) ** 2
    b2_b = b2[None, :] + delta * np.eye(N_OUTPUT, dtype=dtype)
    q_b2 = (W2 @ hidden)[None, :] + b2_b
    loss_b2 = (q_b2[:, action] - target) ** 2

    return np.concatenate([loss_w1.ravel(), loss_b1, loss_w2.ravel(), loss_b2])


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-10) -> float:
    """Max of ``|a - n| / max(|a|, |n|)``, ignoring entries where both are below ``floor``."""
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    significant = scale > floor
    if not significant.any():
        return 0.0
    return float(np.max(np.abs(analytic - numeric)[significant] / scale[significant]))


def grad_check(
    net: DenseNet,
    x: np.ndarray,
    action: int,
    target: float,
    h: float = 1e-5,
    backward_fn: Callable[[DenseNet, ForwardCache, np.ndarray], np.ndarray] = backward,
) -> float:
    """Max relative error between ``backward_fn`` and central differences.

    The differences are taken in extended precision where the platform has
    it: in float64 the rounding of a large loss divided by ``2h`` alone can
    exceed 1e-6 of a small gradient entry.
    """
    q, cache = forward(net, x)
    _, dq = masked_l2_grad(q, action, target)
    analytic = backward_fn(net, cache, dq)
    plus = perturbed_losses(net, x, action, target, h, dtype=np.longdouble)
    minus = perturbed_losses(net, x, action, target, -h, dtype=np.longdouble)
    numeric = ((plus - minus) / (2 * np.longdouble(h))).astype(np.float64)
    return relative_error(analytic, numeric)
