"""Minimal fully connected networks with explicit gradients.

Two tiny MLPs are all the tabular GAN needs, so the forward and backward
passes are written out by hand instead of pulling in an autograd framework.
Everything is float64 and deterministic given the initialization rng.
"""

from __future__ import annotations

import numpy as np

RELU = "relu"
LEAKY_RELU = "leaky_relu"
LEAK = 0.2


class FeedForward:
    """Linear stack with a fixed hidden activation and a linear output layer."""

    def __init__(self, sizes: list[int], activation: str, rng: np.random.Generator) -> None:
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if activation not in (RELU, LEAKY_RELU):
            raise ValueError(f"unsupported activation {activation!r}")
        self.activation = activation
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)
            self.weights.append(rng.standard_normal((fan_in, fan_out)) * scale)
            self.biases.append(np.zeros(fan_out))
        self._cache: list[tuple[np.ndarray, np.ndarray]] | None = None

    @property
    def params(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def _act(self, pre: np.ndarray) -> np.ndarray:
        if self.activation == RELU:
            return np.maximum(pre, 0.0)
        return np.where(pre > 0, pre, LEAK * pre)

    def _act_grad(self, pre: np.ndarray) -> np.ndarray:
        if self.activation == RELU:
            return (pre > 0).astype(float)
        return np.where(pre > 0, 1.0, LEAK)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Run the stack, keeping the per-layer cache for one backward pass."""
        cache: list[tuple[np.ndarray, np.ndarray]] = []
        out = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            pre = out @ w + b
            cache.append((out, pre))
            out = pre if i == last else self._act(pre)
        self._cache = cache
        return out

    def backward(self, grad_out: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        """Gradients for the most recent forward; returns (param grads, input grad)."""
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        grads: list[np.ndarray] = [np.empty(0)] * (2 * len(self.weights))
        grad = grad_out
        last = len(self.weights) - 1
        for i in range(last, -1, -1):
            x_in, pre = self._cache[i]
            if i != last:
                grad = grad * self._act_grad(pre)
            grads[2 * i] = x_in.T @ grad
            grads[2 * i + 1] = grad.sum(axis=0)
            grad = grad @ self.weights[i].T
        self._cache = None
        return grads, grad


class Adam:
    """Adam updates over a fixed parameter list, in place."""

    def __init__(
        self,
        params: list[np.ndarray],
        learning_rate: float,
        beta1: float,
        beta2: float,
        eps: float = 1e-8,
    ) -> None:
        self.params = params
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        self.step_count += 1
        t = self.step_count
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            m_hat = m / (1 - self.beta1**t)
            v_hat = v / (1 - self.beta2**t)
            p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
