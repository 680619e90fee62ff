"""Fully connected networks with hand-written backpropagation, and Adam."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def relu(x):
    return np.maximum(x, 0.0)


class MLP:
    """ReLU hidden layers, linear output, optional tanh head.

    Weights are stored ``(fan_in, fan_out)`` so a batch ``x`` of shape
    ``(n, fan_in)`` maps through ``x @ W + b``.
    """

    def __init__(self, sizes, rng: np.random.Generator, out_tanh: bool = False, dtype=np.float32):
        self.sizes = tuple(int(s) for s in sizes)
        self.out_tanh = out_tanh
        self.dtype = np.dtype(dtype)
        self.params: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.params.append(rng.uniform(-bound, bound, (fan_in, fan_out)).astype(self.dtype))
            self.params.append(rng.uniform(-bound, bound, fan_out).astype(self.dtype))

    @property
    def n_layers(self) -> int:
        return len(self.params) // 2

    def forward(self, x, cache: bool = False):
        h = np.asarray(x, dtype=self.dtype)
        acts = [h]
        for k in range(self.n_layers):
            W, b = self.params[2 * k], self.params[2 * k + 1]
            z = h @ W + b
            last = k == self.n_layers - 1
            if not last:
                h = relu(z)
            elif self.out_tanh:
                h = np.tanh(z)
            else:
                h = z
            acts.append(h)
        return (h, acts) if cache else h

    __call__ = forward

    def backward(self, acts, grad_out):
        """Gradients of a scalar loss given ``dL/d(output)``.

        Returns ``(param_grads, dL/d(input))`` with ``param_grads`` aligned to
        ``self.params``.
        """
        grads: list[np.ndarray] = [None] * len(self.params)  # type: ignore[list-item]
        g = np.asarray(grad_out, dtype=self.dtype)
        for k in reversed(range(self.n_layers)):
            out = acts[k + 1]
            if k == self.n_layers - 1:
                if self.out_tanh:
                    g = g * (1.0 - out * out)
            else:
                g = g * (out > 0)
            grads[2 * k] = acts[k].T @ g
            grads[2 * k + 1] = g.sum(axis=0)
            g = g @ self.params[2 * k].T
        return grads, g

    def copy(self) -> "MLP":
        clone = MLP.__new__(MLP)
        clone.sizes, clone.out_tanh, clone.dtype = self.sizes, self.out_tanh, self.dtype
        clone.params = [p.copy() for p in self.params]
        return clone

    def soft_update_from(self, other: "MLP", tau: float) -> None:
        for p, q in zip(self.params, other.params):
            p *= 1.0 - tau
            p += tau * q


@dataclass
class Adam:
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= (self.lr / c1) * m / (np.sqrt(v / c2) + self.eps)
