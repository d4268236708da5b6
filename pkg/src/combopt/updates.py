"""Gradient addition rules: plain ascent, AdaGrad, and Adam.

Each rule owns its accumulator state and exposes ``add(theta, delta)``,
returning the updated parameter table.  All three are ascent rules (the
optimizer maximizes), and each state object belongs to exactly one run.
"""

import numpy as np


class Sga:
    """theta + lr * delta."""

    def __init__(self, lr=0.01):
        if lr <= 0:
            raise ValueError("lr must be positive")
        self.lr = lr

    def add(self, theta, delta):
        if theta.shape != delta.shape:
            raise ValueError("theta/delta shape mismatch")
        return theta + self.lr * delta


class AdaGrad:
    """Per-entry step scaled by the root of the accumulated squared gradients."""

    def __init__(self, lr=0.01, delta=1e-6):
        if lr <= 0:
            raise ValueError("lr must be positive")
        self.lr = lr
        self.delta = delta
        self.accumulator = None

    def add(self, theta, grad):
        if self.accumulator is None:
            self.accumulator = np.zeros_like(theta)
        if theta.shape != grad.shape or theta.shape != self.accumulator.shape:
            raise ValueError("theta/delta shape mismatch")
        self.accumulator += grad * grad
        return theta + self.lr * grad / (np.sqrt(self.accumulator) + self.delta)


class Adam:
    """Bias-corrected first/second moment steps."""

    def __init__(self, lr=0.01, beta1=0.9, beta2=0.999, eps=1e-6):
        if lr <= 0:
            raise ValueError("lr must be positive")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.first = None
        self.second = None

    def add(self, theta, grad):
        if self.first is None:
            self.first = np.zeros_like(theta)
            self.second = np.zeros_like(theta)
        if theta.shape != grad.shape or theta.shape != self.first.shape:
            raise ValueError("theta/delta shape mismatch")
        self.step += 1
        self.first = self.beta1 * self.first + (1 - self.beta1) * grad
        self.second = self.beta2 * self.second + (1 - self.beta2) * grad * grad
        first_hat = self.first / (1 - self.beta1 ** self.step)
        second_hat = self.second / (1 - self.beta2 ** self.step)
        return theta + self.lr * first_hat / (np.sqrt(second_hat) + self.eps)


_RULES = {"sga": Sga, "adagrad": AdaGrad, "adam": Adam}


def make_rule(name, lr=0.01, **options):
    """Build a fresh rule from its config string (sga | adagrad | adam)."""
    try:
        cls = _RULES[name]
    except KeyError:
        raise ValueError(f"unknown update rule {name!r}, expected one of {sorted(_RULES)}") from None
    return cls(lr=lr, **options)
