"""Command-line driver: fixed, entropy and side-by-side comparison runs."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean
from typing import Sequence

from .colony import Params
from .runs import RunResult, run_entropy_terminated, run_fixed
from .stats import IterationRecord, default_binning, histogram, pseudo_histogram
from .tsplib import Instance, TsplibError, load_instance

log = logging.getLogger(__name__)

TRACE_HEADER = [
    "iteration",
    "best_length",
    "mean_length",
    "std_dev",
    "pseudo_mean",
    "pseudo_std_dev",
    "entropy",
    "entropy_rel_change",
]
HISTOGRAM_HEADER = ["bin_lo", "bin_hi", "mass_true", "mass_pseudo"]
DEFAULT_HIST_ITERS = (1, 10, 50, 100)
# Fixed-length runs default to 500 iterations.
DEFAULT_ITERS = 500

EXIT_USAGE = 2
EXIT_INSTANCE = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    instance_path: Path
    mode: str = "compare"
    params: Params = field(default_factory=lambda: Params(nc_max=DEFAULT_ITERS))
    repeats: int = 1
    output_dir: Path = Path("out")
    histogram_delta: float | None = None
    histogram_origin: float | None = None
    hist_iters: tuple[int, ...] | None = None
    patience: int = 1

    def __post_init__(self):
        if self.mode not in ("fixed", "entropy", "compare"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be at least 1, got {self.repeats}")
        if self.patience < 1:
            raise ValueError(f"patience must be at least 1, got {self.patience}")
        if self.histogram_delta is not None and not self.histogram_delta > 0:
            raise ValueError("histogram delta must be positive")

    def seeds(self) -> list[int]:
        return [self.params.seed + r for r in range(self.repeats)]


@dataclass
class ModeAggregate:
    avg_best: float
    avg_iters: float
    avg_seconds: float

    @classmethod
    def of(cls, runs: Sequence[RunResult]) -> ModeAggregate:
        return cls(
            avg_best=fmean(r.best_length for r in runs),
            avg_iters=fmean(r.iterations_run for r in runs),
            avg_seconds=fmean(r.wall_time for r in runs),
        )


@dataclass
class ComparisonSummary:
    instance: str
    repeats: int
    mode_fixed: ModeAggregate
    mode_entropy: ModeAggregate
    fixed_runs: list[RunResult] = field(default_factory=list, repr=False)
    entropy_runs: list[RunResult] = field(default_factory=list, repr=False)

    @property
    def iteration_ratio(self) -> float:
        return self.mode_fixed.avg_iters / self.mode_entropy.avg_iters

    @property
    def quality_gap(self) -> float:
        return (self.mode_entropy.avg_best - self.mode_fixed.avg_best) / self.mode_fixed.avg_best

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "repeats": self.repeats,
            "mode_fixed": vars(self.mode_fixed),
            "mode_entropy": vars(self.mode_entropy),
            "iteration_ratio": self.iteration_ratio,
            "quality_gap": self.quality_gap,
        }

    def table(self) -> str:
        rows = [
            ("mode", "avg best", "avg iters", "avg seconds"),
            ("ACO", *_cells(self.mode_fixed)),
            ("ACO-Entropy", *_cells(self.mode_entropy)),
        ]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = [f"{self.instance}, {self.repeats} repeat(s)"]
        lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
        lines.append(f"iteration ratio {self.iteration_ratio:.3f}, quality gap {self.quality_gap:+.2%}")
        return "\n".join(lines)


def _cells(agg: ModeAggregate) -> tuple[str, str, str]:
    return f"{agg.avg_best:.1f}", f"{agg.avg_iters:.1f}", f"{agg.avg_seconds:.2f}"


def _num(x: float | int) -> str:
    if isinstance(x, int):
        return str(x)
    return format(x, ".17g")


def write_trace(trace: Sequence[IterationRecord], path: str | Path) -> None:
    if not trace:
        raise ValueError("empty trace")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for r in trace:
            writer.writerow(
                [
                    _num(r.t),
                    _num(r.best_length),
                    _num(r.mean),
                    _num(r.std_dev),
                    _num(r.pseudo_mean),
                    _num(r.pseudo_std_dev),
                    _num(r.entropy),
                    _num(r.entropy_rel_change),
                ]
            )


def read_trace(path: str | Path) -> list[dict[str, float | int]]:
    """Rows of a trace CSV with integer columns as ``int`` and the rest as ``float``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {reader.fieldnames}")
        return [
            {k: int(v) if k in ("iteration", "best_length") else float(v) for k, v in row.items()}
            for row in reader
        ]


def histogram_iterations(
    trace: Sequence[IterationRecord], config: RunConfig, strict: bool = True
) -> list[int]:
    """Iterations to tabulate. With ``strict=False`` requested iterations the
    trace never reached (an early entropy stop) are skipped instead of rejected."""
    available = len(trace)
    if config.hist_iters is not None:
        bad = [t for t in config.hist_iters if not 1 <= t <= available]
        if not strict:
            return sorted(set(config.hist_iters) - set(bad))
        if bad:
            raise ValueError(f"histogram iterations {bad} outside 1..{available}")
        return sorted(set(config.hist_iters))
    wanted = set(DEFAULT_HIST_ITERS) | {config.params.nc_max}
    return sorted(t for t in wanted if t <= available)


def histogram_rows(record: IterationRecord, config: RunConfig) -> list[tuple[float, float, float, float]]:
    lengths, probs = record.lengths, record.pheromone_probs
    if config.histogram_delta is None and config.histogram_origin is None:
        width, origin, n_bins = default_binning(lengths)
    else:
        width = config.histogram_delta or default_binning(lengths)[0]
        origin = min(lengths) if config.histogram_origin is None else config.histogram_origin
        n_bins = None
    true = histogram(lengths, width, origin, n_bins)
    pseudo = pseudo_histogram(lengths, probs, width, origin, n_bins)
    edges = true.edges
    return [
        (float(edges[b]), float(edges[b + 1]), true.masses[b], pseudo.masses[b])
        for b in range(len(true.masses))
    ]


def emit_histograms(
    trace: Sequence[IterationRecord], config: RunConfig, prefix: str = "hist", strict: bool = True
) -> list[Path]:
    """Write one true/pseudo histogram table per selected iteration."""
    if not trace:
        raise ValueError("empty trace")
    written = []
    for t in histogram_iterations(trace, config, strict):
        path = config.output_dir / f"{prefix}_t{t}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(HISTOGRAM_HEADER)
            for row in histogram_rows(trace[t - 1], config):
                writer.writerow([_num(v) for v in row])
        written.append(path)
    return written


def _run_summary(inst: Instance, mode: str, result: RunResult) -> dict:
    return {
        "instance": inst.name,
        "mode": mode,
        "seed": result.params.seed,
        "best_length": result.best_length,
        "best_tour": list(result.best_tour.order),
        "iterations": result.iterations_run,
        "termination": result.termination,
        "seconds": result.wall_time,
    }


def _write_run(inst: Instance, mode: str, result: RunResult, config: RunConfig) -> None:
    stem = f"{mode}_seed{result.params.seed}"
    write_trace(result.trace, config.output_dir / f"trace_{stem}.csv")
    emit_histograms(result.trace, config, prefix=f"hist_{stem}", strict=mode == "fixed")


def _single(inst: Instance, config: RunConfig, mode: str, seed: int) -> RunResult:
    params = replace(config.params, seed=seed)
    if mode == "fixed":
        return run_fixed(inst, params)
    return run_entropy_terminated(inst, params, patience=config.patience)


def compare_modes(config: RunConfig, inst: Instance | None = None) -> ComparisonSummary:
    """Run every seed through both modes and write traces plus the summary files."""
    inst = inst or load_instance(config.instance_path)
    fixed, entropy = [], []
    for seed in config.seeds():
        for mode, bucket in (("fixed", fixed), ("entropy", entropy)):
            result = _single(inst, config, mode, seed)
            log.info("%s seed %d: best %d after %d iterations (%s)", mode, seed,
                     result.best_length, result.iterations_run, result.termination)
            _write_run(inst, mode, result, config)
            bucket.append(result)
    summary = ComparisonSummary(
        instance=inst.name,
        repeats=config.repeats,
        mode_fixed=ModeAggregate.of(fixed),
        mode_entropy=ModeAggregate.of(entropy),
        fixed_runs=fixed,
        entropy_runs=entropy,
    )
    (config.output_dir / "summary.json").write_text(json.dumps(summary.to_json(), indent=2) + "\n")
    (config.output_dir / "summary.txt").write_text(summary.table() + "\n")
    return summary


def run_mode(config: RunConfig, inst: Instance | None = None) -> list[RunResult]:
    """Single-mode (fixed or entropy) runs, one per seed."""
    inst = inst or load_instance(config.instance_path)
    results = []
    for seed in config.seeds():
        result = _single(inst, config, config.mode, seed)
        _write_run(inst, config.mode, result, config)
        results.append(result)
    summary = {
        "instance": inst.name,
        "repeats": config.repeats,
        f"mode_{config.mode}": vars(ModeAggregate.of(results)),
        "runs": [_run_summary(inst, config.mode, r) for r in results],
    }
    (config.output_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return results


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    defaults = Params()
    p = argparse.ArgumentParser(
        prog="aco-entropy",
        description="Ant-Cycle ACO on TSPLIB instances with entropy-based termination.",
    )
    p.add_argument("--instance", required=True, type=Path, help="TSPLIB .tsp file (EUC_2D)")
    p.add_argument("--mode", choices=("fixed", "entropy", "compare"), default="compare")
    p.add_argument("--alpha", type=float, default=defaults.alpha)
    p.add_argument("--beta", type=float, default=defaults.beta)
    p.add_argument("--rho", type=float, default=defaults.rho, help="evaporated fraction per iteration")
    p.add_argument("--q", type=float, default=defaults.q)
    p.add_argument("--tau0", type=float, default=defaults.tau0)
    p.add_argument("--ants", type=int, default=None, help="number of ants (default: one per city)")
    p.add_argument("--iters", type=int, default=DEFAULT_ITERS,
                   help="fixed-mode iterations and entropy-mode cap (default %(default)s)")
    p.add_argument("--epsilon", type=float, default=defaults.epsilon)
    p.add_argument("--patience", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--log-base", choices=("two", "natural"), default=defaults.log_base)
    p.add_argument("--keep-starts", action="store_true",
                   help="keep each ant's initial city instead of re-placing ants every iteration")
    p.add_argument("--hist-delta", type=float, default=None)
    p.add_argument("--hist-origin", type=float, default=None)
    p.add_argument("--hist-iters", type=_int_list, default=None)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = Params(
        alpha=args.alpha,
        beta=args.beta,
        rho=args.rho,
        q=args.q,
        tau0=args.tau0,
        m=args.ants,
        nc_max=args.iters,
        epsilon=args.epsilon,
        log_base=args.log_base,
        seed=args.seed,
        replace_ants=not args.keep_starts,
    )
    config = RunConfig(
        instance_path=args.instance,
        mode=args.mode,
        params=params,
        repeats=args.repeats,
        output_dir=args.out,
        histogram_delta=args.hist_delta,
        histogram_origin=args.hist_origin,
        hist_iters=args.hist_iters,
        patience=args.patience,
    )
    if config.hist_iters is not None and any(not 1 <= t <= params.nc_max for t in config.hist_iters):
        raise ValueError(f"--hist-iters must lie in 1..{params.nc_max}")
    return config


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"aco-entropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        inst = load_instance(config.instance_path)
    except (OSError, UnicodeDecodeError, TsplibError) as exc:
        print(f"aco-entropy: cannot load instance {config.instance_path}: {exc}", file=sys.stderr)
        return EXIT_INSTANCE

    try:
        config.output_dir.mkdir(parents=True, exist_ok=True)
        if config.mode == "compare":
            summary = compare_modes(config, inst)
            print(summary.table())
        else:
            for r in run_mode(config, inst):
                print(f"{inst.name} {config.mode} seed {r.params.seed}: best {r.best_length} "
                      f"after {r.iterations_run} iterations ({r.termination})")
    except OSError as exc:
        print(f"aco-entropy: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"aco-entropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


def main() -> None:
    sys.exit(run_cli())
