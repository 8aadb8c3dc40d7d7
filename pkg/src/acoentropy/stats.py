"""Per-iteration statistics of the route length set.

Each ant ``i`` contributes its tour length ``L_i`` and a pheromone probability
``p_i = f_i / sum f`` where ``f_i`` is the pheromone summed over the edges of its
tour. Ants on identical routes each keep their own entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .colony import ColonyState, Params, Tour
from .entropy import entropy, relative_change


@dataclass(frozen=True)
class IterationRecord:
    t: int
    lengths: tuple[int, ...]
    pheromone_probs: tuple[float, ...]
    mean: float
    std_dev: float
    pseudo_mean: float
    pseudo_std_dev: float
    entropy: float
    entropy_rel_change: float
    best_length: int


@dataclass(frozen=True)
class Histogram:
    origin: float
    bin_width: float
    masses: tuple[float, ...]

    def __post_init__(self):
        if not self.bin_width > 0:
            raise ValueError(f"bin width must be positive, got {self.bin_width}")

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.bin_width * np.arange(len(self.masses) + 1)

    def mass_at(self, x: float) -> float:
        """Mass of the bin holding ``x``; zero off the histogram's support."""
        top = self.origin + self.bin_width * len(self.masses)
        if x < self.origin or x > top:
            return 0.0
        b = min(int((x - self.origin) // self.bin_width), len(self.masses) - 1)
        return self.masses[b]


def route_pheromone(state: ColonyState, tour: Tour) -> float:
    order = np.asarray(tour.order, dtype=np.intp)
    return float(state.pheromone[order, np.roll(order, -1)].sum())


def pheromone_probabilities(f_values: Sequence[float]) -> np.ndarray:
    f = np.asarray(f_values, dtype=float)
    if f.size == 0:
        raise ValueError("no pheromone values")
    if np.any(~(f > 0)):
        raise ValueError("pheromone values must be positive")
    return f / math.fsum(f)


def default_binning(lengths: Sequence[float]) -> tuple[float, float, int]:
    """``(bin_width, origin, n_bins)`` with ``ceil(sqrt(m))`` bins spanning [min, max]."""
    lo, hi = float(np.min(lengths)), float(np.max(lengths))
    n_bins = math.ceil(math.sqrt(len(lengths)))
    if hi == lo:
        return 1.0, lo, 1
    return (hi - lo) / n_bins, lo, n_bins


def _bin_index(lengths: np.ndarray, bin_width: float, origin: float, n_bins: int | None) -> tuple[np.ndarray, int]:
    if lengths.size == 0:
        raise ValueError("empty length set")
    if not bin_width > 0:
        raise ValueError(f"bin width must be positive, got {bin_width}")
    if origin > lengths.min():
        raise ValueError(f"origin {origin} lies above the smallest length {lengths.min()}")
    idx = np.floor((lengths - origin) / bin_width).astype(np.int64)
    if n_bins is None:
        n_bins = int(idx.max()) + 1
    else:
        # Closed top: a length sitting on the last right edge joins the last bin.
        idx = np.minimum(idx, n_bins - 1)
    return idx, n_bins


def histogram(
    lengths: Sequence[float], bin_width: float, origin: float, n_bins: int | None = None
) -> Histogram:
    """Fraction of ants whose length falls in each half-open bin ``[lo, lo + width)``.

    Without ``n_bins`` the grid grows until it covers the largest length.
    """
    L = np.asarray(lengths, dtype=float)
    idx, n_bins = _bin_index(L, bin_width, origin, n_bins)
    counts = np.bincount(idx, minlength=n_bins)
    return Histogram(origin, bin_width, tuple(float(c) / L.size for c in counts))


def pseudo_histogram(
    lengths: Sequence[float],
    probs: Sequence[float],
    bin_width: float,
    origin: float,
    n_bins: int | None = None,
) -> Histogram:
    """Like :func:`histogram` but each ant weighs its pheromone probability."""
    L = np.asarray(lengths, dtype=float)
    p = np.asarray(probs, dtype=float)
    if L.shape != p.shape:
        raise ValueError(f"{L.size} lengths but {p.size} probabilities")
    idx, n_bins = _bin_index(L, bin_width, origin, n_bins)
    masses = [0.0] * n_bins
    for b in np.unique(idx):
        masses[b] = math.fsum(p[idx == b])
    return Histogram(origin, bin_width, tuple(masses))


def expectation(lengths: Sequence[float]) -> float:
    L = np.asarray(lengths, dtype=float)
    if L.size == 0:
        raise ValueError("empty length set")
    return math.fsum(L) / L.size


def std_deviation(lengths: Sequence[float], mean: float) -> float:
    """Population standard deviation (divisor m)."""
    L = np.asarray(lengths, dtype=float)
    if L.size == 0:
        raise ValueError("empty length set")
    return math.sqrt(math.fsum((L - mean) ** 2) / L.size)


def _aligned(lengths, probs) -> tuple[np.ndarray, np.ndarray]:
    L = np.asarray(lengths, dtype=float)
    p = np.asarray(probs, dtype=float)
    if L.shape != p.shape:
        raise ValueError(f"{L.size} lengths but {p.size} probabilities")
    if L.size == 0:
        raise ValueError("empty length set")
    return L, p


def pseudo_expectation(lengths: Sequence[float], probs: Sequence[float]) -> float:
    L, p = _aligned(lengths, probs)
    # Convex combination; clip rounding spill past the extremes.
    return min(max(math.fsum(L * p), float(L.min())), float(L.max()))


def pseudo_deviation(lengths: Sequence[float], probs: Sequence[float], pseudo_mean: float) -> float:
    L, p = _aligned(lengths, probs)
    return math.sqrt(math.fsum(p * (L - pseudo_mean) ** 2))


def build_record(
    t: int, tours: Sequence[Tour], state: ColonyState, params: Params, h_prev: float
) -> IterationRecord:
    """Summarize iteration ``t`` from its tours and the post-update colony state."""
    lengths = [tour.length for tour in tours]
    probs = pheromone_probabilities([route_pheromone(state, tour) for tour in tours])
    mean = expectation(lengths)
    pmean = pseudo_expectation(lengths, probs)
    h = entropy(probs, params.log_base)
    return IterationRecord(
        t=t,
        lengths=tuple(lengths),
        pheromone_probs=tuple(float(p) for p in probs),
        mean=mean,
        std_dev=std_deviation(lengths, mean),
        pseudo_mean=pmean,
        pseudo_std_dev=pseudo_deviation(lengths, probs, pmean),
        entropy=h,
        entropy_rel_change=relative_change(h_prev, h),
        best_length=min(lengths) if state.best_tour is None else state.best_tour.length,
    )
