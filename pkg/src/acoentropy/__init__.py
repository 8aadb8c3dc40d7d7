"""Ant-Cycle ACO for the TSP with pheromone-entropy convergence detection."""

from .colony import (
    ColonyState,
    Params,
    Tour,
    construct_tour,
    construct_tours,
    deposit_matrix,
    init_colony,
    run_iteration,
    tour_length,
    transition_probabilities,
    update_pheromone,
)
from .entropy import EntropyTrace, converged, entropy
from .runs import RunResult, run_entropy_terminated, run_fixed
from .stats import (
    Histogram,
    IterationRecord,
    build_record,
    expectation,
    histogram,
    pheromone_probabilities,
    pseudo_deviation,
    pseudo_expectation,
    pseudo_histogram,
    route_pheromone,
    std_deviation,
)
from .tsplib import Instance, bundled_instance, build_distance_matrix, distance, load_instance, parse_instance

__version__ = "0.1.0"
