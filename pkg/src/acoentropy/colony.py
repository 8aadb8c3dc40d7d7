"""Ant-Cycle ant system for the symmetric TSP.

Randomness is counter based: ant ``k`` at iteration ``t`` draws from its own
stream derived from ``(seed, t, k)``, and ant placement for iteration ``t``
from ``(seed, t)``. Tours built one at a time with :func:`construct_tour` are
therefore identical to the batched construction used by :func:`run_iteration`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .tsplib import Instance, build_distance_matrix, distance

TAU_MIN = 1e-12

LogBase = Literal["natural", "two"]


@dataclass(frozen=True)
class Params:
    alpha: float = 1.0
    beta: float = 8.0
    # Fraction of trail that evaporates each iteration: tau <- (1 - rho) * tau + delta.
    rho: float = 0.4
    q: float = 100.0
    tau0: float = 1.0
    # None means one ant per city.
    m: int | None = None
    nc_max: int = 1000
    epsilon: float = 0.001
    log_base: LogBase = "natural"
    seed: int = 0
    # Draw fresh start cities every iteration instead of keeping the initial ones.
    replace_ants: bool = True

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if not 0 <= self.rho < 1:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if self.q <= 0 or self.tau0 <= 0:
            raise ValueError("q and tau0 must be positive")
        if self.m is not None and self.m < 1:
            raise ValueError(f"m must be at least 1, got {self.m}")
        if self.nc_max < 1:
            raise ValueError(f"nc_max must be at least 1, got {self.nc_max}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.log_base not in ("natural", "two"):
            raise ValueError(f"log_base must be 'natural' or 'two', got {self.log_base!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def ants(self, n: int) -> int:
        return n if self.m is None else self.m


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    length: int


@dataclass
class ColonyState:
    pheromone: np.ndarray
    heuristic: np.ndarray
    dist: np.ndarray
    start_cities: np.ndarray
    seed: int
    t: int = 0
    best_tour: Tour | None = None
    _weights: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.pheromone.shape[0]

    def weights(self, params: Params) -> np.ndarray:
        """``tau**alpha * eta**beta`` for every edge, cached per pheromone matrix."""
        if self._weights is None:
            w = np.power(self.pheromone, params.alpha) * np.power(self.heuristic, params.beta)
            np.fill_diagonal(w, 0.0)
            self._weights = w
        return self._weights


def ant_rng(seed: int, t: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(t, k))))


def placement_rng(seed: int, t: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(t,))))


def place_ants(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Distinct start cities while they last, then uniform with replacement."""
    first = rng.permutation(n)[: min(m, n)]
    if m <= n:
        return first
    return np.concatenate([first, rng.integers(0, n, size=m - n)])


def init_colony(inst: Instance, params: Params) -> ColonyState:
    dist, eta = build_distance_matrix(inst)
    n = inst.dimension
    tau = np.full((n, n), float(params.tau0))
    np.fill_diagonal(tau, 0.0)
    starts = place_ants(n, params.ants(n), placement_rng(params.seed, 0))
    return ColonyState(pheromone=tau, heuristic=eta, dist=dist, start_cities=starts, seed=params.seed)


def transition_probabilities(
    state: ColonyState, params: Params, current: int, allowed: Sequence[int]
) -> np.ndarray:
    """Probability of moving from ``current`` to each city of ``allowed``.

    The returned vector is aligned with ``allowed``.
    """
    allowed = np.asarray(allowed, dtype=np.intp)
    if allowed.size == 0:
        raise ValueError("allowed set is empty")
    if np.any(allowed == current):
        raise ValueError(f"current city {current} is in the allowed set")
    w = state.weights(params)[current, allowed]
    total = np.cumsum(w)[-1]
    if not (np.isfinite(total) and total > 0):
        raise FloatingPointError(f"degenerate transition weights from city {current}: total={total}")
    return w / total


def _pick(w: np.ndarray, cum: np.ndarray, u: float) -> int:
    # Inverse transform on unnormalized cumulative weights.
    hit = np.flatnonzero(cum > u * cum[-1])
    if hit.size:
        return int(hit[0])
    # u * total rounded up to total: take the last city with positive weight.
    return int(np.flatnonzero(w > 0)[-1])


def _check_permutation(order: np.ndarray, n: int) -> None:
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError("order is not a permutation of the cities")


def tour_length(inst: Instance, order: Sequence[int]) -> int:
    """Closed tour length, return edge included."""
    order = np.asarray(order, dtype=np.intp)
    _check_permutation(order, inst.dimension)
    return sum(distance(inst, int(a), int(b)) for a, b in zip(order, np.roll(order, -1)))


def closed_length(dist: np.ndarray, order: Sequence[int]) -> int:
    """Same as :func:`tour_length` against a precomputed distance matrix."""
    order = np.asarray(order, dtype=np.intp)
    _check_permutation(order, dist.shape[0])
    return int(dist[order, np.roll(order, -1)].sum())


def construct_tour(state: ColonyState, params: Params, ant_index: int) -> Tour:
    m = len(state.start_cities)
    if not 0 <= ant_index < m:
        raise IndexError(f"ant index {ant_index} out of range for m={m}")
    n = state.n
    w_all = state.weights(params)
    u = ant_rng(state.seed, state.t, ant_index).random(n - 1)
    unvisited = np.ones(n, dtype=bool)
    cur = int(state.start_cities[ant_index])
    unvisited[cur] = False
    order = [cur]
    for step in range(n - 1):
        allowed = np.flatnonzero(unvisited)
        w = w_all[cur, allowed]
        cum = np.cumsum(w)
        if not (np.isfinite(cum[-1]) and cum[-1] > 0):
            raise FloatingPointError(f"degenerate transition weights from city {cur}")
        cur = int(allowed[_pick(w, cum, u[step])])
        unvisited[cur] = False
        order.append(cur)
    return Tour(tuple(order), closed_length(state.dist, order))


def construct_tours(state: ColonyState, params: Params) -> list[Tour]:
    """All ants at once; same result as ``construct_tour`` for each index."""
    n = state.n
    starts = np.asarray(state.start_cities, dtype=np.intp)
    m = starts.size
    w_all = state.weights(params)
    u = np.stack([ant_rng(state.seed, state.t, k).random(n - 1) for k in range(m)])
    rows = np.arange(m)
    # 1.0 for unvisited cities; multiplying keeps allowed weights bit-exact.
    open_ = np.ones((m, n))
    open_[rows, starts] = 0.0
    orders = np.empty((m, n), dtype=np.intp)
    orders[:, 0] = starts
    cur = starts
    for step in range(n - 1):
        w = w_all[cur]
        w *= open_
        cum = np.cumsum(w, axis=1)
        total = cum[:, -1]
        if not np.all(np.isfinite(total) & (total > 0)):
            raise FloatingPointError("degenerate transition weights during construction")
        hit = cum > (u[:, step] * total)[:, None]
        nxt = np.argmax(hit, axis=1)
        missed = ~hit.any(axis=1)
        for r in np.flatnonzero(missed):
            nxt[r] = np.flatnonzero(w[r] > 0)[-1]
        cur = nxt
        open_[rows, cur] = 0.0
        orders[:, step + 1] = cur
    lengths = state.dist[orders, np.roll(orders, -1, axis=1)].sum(axis=1)
    return [Tour(tuple(int(c) for c in o), int(L)) for o, L in zip(orders, lengths)]


def deposit_matrix(tours: Sequence[Tour], params: Params, n: int) -> np.ndarray:
    delta = np.zeros((n, n))
    for tour in tours:
        order = np.asarray(tour.order, dtype=np.intp)
        nxt = np.roll(order, -1)
        amount = params.q / tour.length
        # Each undirected edge occurs at most once per tour, so plain fancy adds are safe.
        delta[order, nxt] += amount
        delta[nxt, order] += amount
    return delta


def update_pheromone(state: ColonyState, deposits: np.ndarray, params: Params) -> ColonyState:
    tau = np.maximum((1.0 - params.rho) * state.pheromone + deposits, TAU_MIN)
    np.fill_diagonal(tau, 0.0)
    return replace(state, pheromone=tau, _weights=None)


def run_iteration(state: ColonyState, params: Params) -> tuple[ColonyState, list[Tour]]:
    if params.replace_ants and state.t > 0:
        m = len(state.start_cities)
        state = replace(state, start_cities=place_ants(state.n, m, placement_rng(state.seed, state.t)))
    tours = construct_tours(state, params)
    new = update_pheromone(state, deposit_matrix(tours, params, state.n), params)
    best = min(range(len(tours)), key=lambda k: (tours[k].length, k))
    incumbent = state.best_tour
    if incumbent is None or tours[best].length < incumbent.length:
        incumbent = tours[best]
    return replace(new, t=state.t + 1, best_tour=incumbent), tours
