"""Fixed-length and entropy-terminated colony runs.

Both run kinds share one driver, so with the same parameters they produce the
same trace up to the point where the entropy rule stops.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Literal

from .colony import ColonyState, Params, Tour, init_colony, run_iteration
from .entropy import EntropyTrace, converged, max_entropy
from .stats import IterationRecord, build_record
from .tsplib import Instance

Termination = Literal["entropy-converged", "iteration-cap"]


@dataclass
class RunResult:
    best_tour: Tour
    iterations_run: int
    termination: Termination
    trace: list[IterationRecord]
    wall_time: float
    h0: float
    params: Params

    @property
    def best_length(self) -> int:
        return self.best_tour.length

    @property
    def entropy_trace(self) -> EntropyTrace:
        return EntropyTrace(
            values=[self.h0] + [rec.entropy for rec in self.trace],
            log_base=self.params.log_base,
            epsilon=self.params.epsilon,
        )


def iterate(inst: Instance, params: Params) -> Iterator[tuple[ColonyState, IterationRecord]]:
    """Yield ``(state, record)`` after every iteration, without end."""
    state = init_colony(inst, params)
    h_prev = max_entropy(len(state.start_cities), params.log_base)
    while True:
        state, tours = run_iteration(state, params)
        record = build_record(state.t, tours, state, params, h_prev)
        h_prev = record.entropy
        yield state, record


def run_fixed(inst: Instance, params: Params) -> RunResult:
    """Exactly ``params.nc_max`` iterations."""
    start = time.perf_counter()
    trace: list[IterationRecord] = []
    for state, record in iterate(inst, params):
        trace.append(record)
        if state.t >= params.nc_max:
            break
    return RunResult(
        best_tour=state.best_tour,
        iterations_run=len(trace),
        termination="iteration-cap",
        trace=trace,
        wall_time=time.perf_counter() - start,
        h0=max_entropy(params.ants(inst.dimension), params.log_base),
        params=params,
    )


def run_entropy_terminated(inst: Instance, params: Params, patience: int = 1) -> RunResult:
    """Iterate until the relative entropy change stays below ``epsilon`` for
    ``patience`` consecutive iterations, or ``nc_max`` iterations have run.

    The entropy before the first iteration is taken as ``log m``.
    """
    if patience < 1:
        raise ValueError(f"patience must be at least 1, got {patience}")
    start = time.perf_counter()
    h0 = max_entropy(params.ants(inst.dimension), params.log_base)
    h_prev = h0
    streak = 0
    trace: list[IterationRecord] = []
    termination: Termination = "iteration-cap"
    for state, record in iterate(inst, params):
        trace.append(record)
        streak = streak + 1 if converged(h_prev, record.entropy, params.epsilon) else 0
        h_prev = record.entropy
        if streak >= patience:
            termination = "entropy-converged"
            break
        if state.t >= params.nc_max:
            break
    return RunResult(
        best_tour=state.best_tour,
        iterations_run=len(trace),
        termination=termination,
        trace=trace,
        wall_time=time.perf_counter() - start,
        h0=h0,
        params=params,
    )
