"""Entropy of the pheromone probability set and the relative-change stopping rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ZERO_ENTROPY = 1e-12


def _log(x, base: str):
    if base == "natural":
        return np.log(x)
    if base == "two":
        return np.log2(x)
    raise ValueError(f"log base must be 'natural' or 'two', got {base!r}")


def max_entropy(m: int, log_base: str = "natural") -> float:
    """Entropy of the uniform distribution over ``m`` outcomes."""
    return float(_log(m, log_base))


def entropy(probs: Sequence[float], log_base: str = "natural") -> float:
    """Shannon entropy ``-sum p log p`` with ``0 log 0 = 0``.

    The result is clipped into ``[0, log m]``; rounding can otherwise push a
    uniform vector a few ulps above its maximum.
    """
    p = np.asarray(probs, dtype=float)
    if p.size == 0:
        raise ValueError("empty probability set")
    if np.any(p < 0):
        raise ValueError("negative probability")
    if abs(math.fsum(p) - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {math.fsum(p)!r}, not 1")
    nz = p[p > 0]
    h = -math.fsum(nz * _log(nz, log_base))
    return min(max(0.0, h), max_entropy(p.size, log_base))


def relative_change(h_prev: float, h_curr: float) -> float:
    """``|h_curr - h_prev| / h_prev``; infinite when ``h_prev`` is ~0 but ``h_curr`` is not."""
    if h_prev <= ZERO_ENTROPY:
        return 0.0 if abs(h_curr) <= ZERO_ENTROPY else math.inf
    return abs(h_curr - h_prev) / h_prev


def converged(h_prev: float, h_curr: float, epsilon: float) -> bool:
    if h_prev <= ZERO_ENTROPY:
        return abs(h_curr) <= ZERO_ENTROPY
    return abs(h_curr - h_prev) / h_prev < epsilon


@dataclass
class EntropyTrace:
    """``values[0]`` is the prior ``log m``; ``values[t]`` belongs to iteration ``t``."""

    values: list[float]
    log_base: str
    epsilon: float
    converged_at: int | None = field(default=None)

    def __post_init__(self):
        if self.converged_at is None:
            self.converged_at = first_convergence(self.values, self.epsilon)


def first_convergence(values: Sequence[float], epsilon: float, patience: int = 1) -> int | None:
    """First ``t`` at which the criterion has held for ``patience`` consecutive steps."""
    run = 0
    for t in range(1, len(values)):
        run = run + 1 if converged(values[t - 1], values[t], epsilon) else 0
        if run >= patience:
            return t
    return None
