"""Stripe-classification smoke training for the micro variant."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from axwin.errors import NonFiniteError
from axwin.model import build_variant
from axwin.tensor import GradTape, Rng, Tensor, backward, cross_entropy, no_grad
from axwin.tensor.core import resolve_dtype


def stripe_dataset(n: int = 64, size: int = 64, noise: float = 0.1, seed: int = 0, dtype="f32"):
    """Class 0: horizontal stripes (intensity varies down the rows); class 1: vertical.

    Each image gets its own period (4..16 px) and phase, three identical
    channels, plus Gaussian noise of std ``noise``.
    """
    rng = Rng(seed)
    labels = np.arange(n) % 2
    coord = np.arange(size, dtype=np.float64)
    images = np.empty((n, size, size, 3), dtype=np.float64)
    for i in range(n):
        period = float(rng.integers(4, 17))
        phase = float(rng.uniform((), 0.0, 2.0 * math.pi))
        wave = np.sin(2.0 * math.pi * coord / period + phase)
        pattern = np.repeat(wave[:, None], size, axis=1) if labels[i] == 0 else np.repeat(wave[None, :], size, axis=0)
        images[i] = pattern[:, :, None] + rng.normal((size, size, 3), noise)
    return images.astype(resolve_dtype(dtype)), labels


class SGD:
    """Heavy-ball SGD: ``v <- momentum * v + g``; ``p <- p - lr * v``."""

    def __init__(self, params, lr: float = 0.01, momentum: float = 0.9):
        self.params = list(params)
        self.lr, self.momentum = lr, momentum
        self.velocity = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        for p, v in zip(self.params, self.velocity):
            if p.grad is None:
                continue
            v *= self.momentum
            v += p.grad
            p.data = p.data - p.data.dtype.type(self.lr) * v

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None


@dataclass
class TrainResult:
    step_losses: list[float] = field(default_factory=list)
    eval_curve: list[tuple[int, float]] = field(default_factory=list)
    model: object = None

    @property
    def final_loss(self) -> float:
        return self.eval_curve[-1][1]


def dataset_loss(model, images: np.ndarray, labels: np.ndarray, chunk: int = 16) -> float:
    total = 0.0
    with no_grad():
        for start in range(0, len(labels), chunk):
            sl = slice(start, start + chunk)
            _, logits = model(Tensor(images[sl]))
            total += float(cross_entropy(logits, labels[sl]).data) * len(labels[sl])
    return total / len(labels)


def train_smoke(
    steps: int = 500,
    seed: int = 0,
    lr: float = 0.01,
    momentum: float = 0.9,
    batch: int = 8,
    eval_every: int = 25,
    dtype: str = "f32",
    callback=None,
    return_model: bool = False,
) -> TrainResult:
    """Train micro on the stripe set; the eval curve is the full-dataset loss."""
    images, labels = stripe_dataset(seed=seed, dtype=dtype)
    model = build_variant("micro", num_classes=2, seed=seed, dtype=dtype)
    opt = SGD(model.parameters(), lr, momentum)
    order_rng = Rng(seed + 1)
    result = TrainResult()
    result.eval_curve.append((0, dataset_loss(model, images, labels)))
    order = np.array([], dtype=int)
    for step in range(1, steps + 1):
        if len(order) < batch:
            order = np.concatenate([order, order_rng.permutation(len(labels))])
        idx, order = order[:batch], order[batch:]
        opt.zero_grad()
        with GradTape() as tape:
            _, logits = model(Tensor(images[idx]))
            loss = cross_entropy(logits, labels[idx])
        backward(tape, loss)
        opt.step()
        value = float(loss.data)
        if not math.isfinite(value):
            raise NonFiniteError(f"loss diverged at step {step}")
        result.step_losses.append(value)
        if step % eval_every == 0 or step == steps:
            result.eval_curve.append((step, dataset_loss(model, images, labels)))
            if callback is not None:
                callback(step, value, result.eval_curve[-1][1])
    if return_model:
        result.model = model
    return result
