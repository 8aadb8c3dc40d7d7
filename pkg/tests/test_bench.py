import csv
import json
import math
from dataclasses import replace
from pathlib import Path

import pytest

from acoentropy.bench import (
    EXIT_INSTANCE,
    EXIT_IO,
    EXIT_USAGE,
    HISTOGRAM_HEADER,
    TRACE_HEADER,
    RunConfig,
    compare_modes,
    emit_histograms,
    histogram_iterations,
    histogram_rows,
    read_trace,
    run_cli,
    write_trace,
)
from acoentropy.colony import Params, init_colony, run_iteration
from acoentropy.runs import run_fixed
from acoentropy.stats import build_record
from acoentropy.tsplib import bundled_instance, format_instance

from conftest import random_instance

DATA = Path(__file__).resolve().parents[1] / "src" / "acoentropy" / "data"


@pytest.fixture
def small_tsp(tmp_path):
    path = tmp_path / "small.tsp"
    path.write_text(format_instance(random_instance(12, 0)))
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestTrace:
    def test_rows_and_round_trip(self, tmp_path):
        result = run_fixed(random_instance(10, 1), Params(nc_max=10, seed=3))
        path = tmp_path / "trace.csv"
        write_trace(result.trace, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 11
        assert lines[0] == ",".join(TRACE_HEADER)
        rows = read_trace(path)
        for row, rec in zip(rows, result.trace):
            assert row["iteration"] == rec.t
            assert row["best_length"] == rec.best_length
            assert row["mean_length"] == rec.mean
            assert row["std_dev"] == rec.std_dev
            assert row["pseudo_mean"] == rec.pseudo_mean
            assert row["pseudo_std_dev"] == rec.pseudo_std_dev
            assert row["entropy"] == rec.entropy
            assert row["entropy_rel_change"] == rec.entropy_rel_change

    def test_entropy_column_matches_entropy_trace(self, tmp_path):
        result = run_fixed(random_instance(10, 2), Params(nc_max=8, seed=1))
        path = tmp_path / "trace.csv"
        write_trace(result.trace, path)
        values = result.entropy_trace.values
        for row in read_trace(path):
            assert row["entropy"] == values[row["iteration"]]

    def test_empty(self, tmp_path):
        with pytest.raises(ValueError):
            write_trace([], tmp_path / "x.csv")


class TestHistograms:
    def config(self, tmp_path, **kw):
        return RunConfig(instance_path=tmp_path / "unused.tsp", output_dir=tmp_path, **kw)

    def test_default_iterations(self, tmp_path):
        trace = run_fixed(random_instance(9, 0), Params(nc_max=60, seed=2)).trace
        cfg = self.config(tmp_path, params=Params(nc_max=60))
        assert histogram_iterations(trace, cfg) == [1, 10, 50, 60]

    def test_out_of_range(self, tmp_path):
        trace = run_fixed(random_instance(9, 0), Params(nc_max=5)).trace
        cfg = self.config(tmp_path, hist_iters=(1, 6))
        with pytest.raises(ValueError):
            emit_histograms(trace, cfg)
        assert histogram_iterations(trace, cfg, strict=False) == [1]

    def test_masses_sum_to_one(self, tmp_path):
        trace = run_fixed(random_instance(25, 0), Params(nc_max=12, seed=2)).trace
        cfg = self.config(tmp_path, params=Params(nc_max=12))
        paths = emit_histograms(trace, cfg)
        assert [p.name for p in paths] == ["hist_t1.csv", "hist_t10.csv", "hist_t12.csv"]
        for p in paths:
            rows = read_rows(p)
            assert rows[0] == HISTOGRAM_HEADER
            assert abs(math.fsum(float(r[2]) for r in rows[1:]) - 1) < 1e-9
            assert abs(math.fsum(float(r[3]) for r in rows[1:]) - 1) < 1e-9

    def test_forced_delta_on_pr136(self, tmp_path):
        inst = bundled_instance("pr136")
        trace = run_fixed(inst, Params(nc_max=1, seed=0)).trace
        cfg = self.config(tmp_path, histogram_delta=2183.0, hist_iters=(1,))
        rows = histogram_rows(trace[0], cfg)
        lo = min(trace[0].lengths)
        assert rows[0][0] == lo
        for b, (a, z, _, _) in enumerate(rows):
            assert a == pytest.approx(lo + 2183 * b)
            assert z - a == pytest.approx(2183)
        assert rows[-1][1] > max(trace[0].lengths)

    def test_uniform_pheromone_tables_match(self, tmp_path):
        # Records computed against the initial (uniform) matrix have p_i = 1/m.
        inst = random_instance(16, 5)
        params = Params(seed=4)
        state = init_colony(inst, params)
        _, tours = run_iteration(state, params)
        rec = build_record(1, tours, state, params, h_prev=math.log(16))
        for cfg in (self.config(tmp_path), self.config(tmp_path, histogram_delta=150.0)):
            for _, _, true, pseudo in histogram_rows(rec, cfg):
                assert pseudo == pytest.approx(true, abs=1e-12)


class TestCompare:
    def test_degenerate_criterion(self, tmp_path, small_tsp):
        cfg = RunConfig(small_tsp, params=Params(nc_max=25, epsilon=1e9), output_dir=tmp_path)
        summary = compare_modes(cfg)
        assert summary.mode_entropy.avg_iters == 1
        assert summary.iteration_ratio == 25
        data = json.loads((tmp_path / "summary.json").read_text())
        assert set(data) == {"instance", "repeats", "mode_fixed", "mode_entropy", "iteration_ratio", "quality_gap"}
        assert set(data["mode_fixed"]) == {"avg_best", "avg_iters", "avg_seconds"}
        assert (tmp_path / "summary.txt").read_text().startswith(summary.instance)

    def test_prefix_agreement_and_self_consistency(self, tmp_path, small_tsp):
        cfg = RunConfig(small_tsp, params=Params(nc_max=40, epsilon=3e-4, seed=10), repeats=3,
                        output_dir=tmp_path, patience=2)
        summary = compare_modes(cfg)
        assert summary.repeats == len(summary.fixed_runs) == len(summary.entropy_runs) == 3
        for seed, fixed, ent in zip(cfg.seeds(), summary.fixed_runs, summary.entropy_runs):
            assert fixed.params.seed == ent.params.seed == seed
            f_rows = read_rows(tmp_path / f"trace_fixed_seed{seed}.csv")
            e_rows = read_rows(tmp_path / f"trace_entropy_seed{seed}.csv")
            assert f_rows[: len(e_rows)] == e_rows
        data = json.loads((tmp_path / "summary.json").read_text())
        for mode in ("fixed", "entropy"):
            traces = [read_trace(tmp_path / f"trace_{mode}_seed{s}.csv") for s in cfg.seeds()]
            assert data[f"mode_{mode}"]["avg_best"] == pytest.approx(sum(t[-1]["best_length"] for t in traces) / 3)
            assert data[f"mode_{mode}"]["avg_iters"] == pytest.approx(sum(len(t) for t in traces) / 3)
        assert data["iteration_ratio"] > 0
        gap = (data["mode_entropy"]["avg_best"] - data["mode_fixed"]["avg_best"]) / data["mode_fixed"]["avg_best"]
        assert data["quality_gap"] == pytest.approx(gap)

    def test_config_validation(self, tmp_path):
        with pytest.raises(ValueError):
            RunConfig(tmp_path, repeats=0)
        with pytest.raises(ValueError):
            RunConfig(tmp_path, mode="sprint")
        with pytest.raises(ValueError):
            RunConfig(tmp_path, patience=0)


class TestCli:
    def test_entropy_happy_path(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc = run_cli(["--instance", str(DATA / "pr136.tsp"), "--mode", "entropy", "--seed", "7", "--out", str(out)])
        assert rc == 0
        assert (out / "trace_entropy_seed7.csv").exists()
        data = json.loads((out / "summary.json").read_text())
        assert data["instance"] == "pr136"
        assert data["runs"][0]["seed"] == 7
        assert "entropy seed 7" in capsys.readouterr().out

    def test_fixed_mode_with_histograms(self, tmp_path, small_tsp):
        out = tmp_path / "out"
        rc = run_cli(["--instance", str(small_tsp), "--mode", "fixed", "--iters", "12", "--repeats", "2",
                      "--hist-iters", "2,12", "--hist-delta", "50", "--out", str(out)])
        assert rc == 0
        names = sorted(p.name for p in out.iterdir())
        assert "trace_fixed_seed0.csv" in names and "trace_fixed_seed1.csv" in names
        assert "hist_fixed_seed1_t12.csv" in names
        assert len(read_rows(out / "trace_fixed_seed0.csv")) == 13

    def test_missing_instance_flag(self, capsys):
        assert run_cli(["--mode", "fixed"]) == EXIT_USAGE
        assert "usage" in capsys.readouterr().err

    def test_bad_flag_values(self, small_tsp, tmp_path):
        assert run_cli(["--instance", str(small_tsp), "--mode", "sprint"]) == EXIT_USAGE
        assert run_cli(["--instance", str(small_tsp), "--rho", "1.5", "--out", str(tmp_path)]) == EXIT_USAGE
        assert run_cli(["--instance", str(small_tsp), "--hist-iters", "1,x"]) == EXIT_USAGE
        assert run_cli(["--instance", str(small_tsp), "--iters", "5", "--hist-iters", "9"]) == EXIT_USAGE

    def test_instance_errors(self, tmp_path):
        assert run_cli(["--instance", str(tmp_path / "nope.tsp"), "--out", str(tmp_path)]) == EXIT_INSTANCE
        bad = tmp_path / "bad.tsp"
        bad.write_text("NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : GEO\nNODE_COORD_SECTION\n")
        assert run_cli(["--instance", str(bad), "--out", str(tmp_path)]) == EXIT_INSTANCE

    def test_unusable_output_dir(self, tmp_path, small_tsp):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert run_cli(["--instance", str(small_tsp), "--iters", "3", "--out", str(blocker / "sub")]) == EXIT_IO

    def test_help(self, capsys):
        assert run_cli(["--help"]) == 0
        assert "--hist-delta" in capsys.readouterr().out

    def test_byte_identical_outputs(self, tmp_path, small_tsp):
        for name in ("a", "b"):
            rc = run_cli(["--instance", str(small_tsp), "--iters", "15", "--repeats", "2", "--epsilon", "1e-4",
                          "--seed", "3", "--out", str(tmp_path / name)])
            assert rc == 0
        files = sorted(p.name for p in (tmp_path / "a").iterdir() if p.suffix == ".csv")
        assert files
        for name in files:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_module_entry_point(self, tmp_path, small_tsp):
        import subprocess
        import sys

        proc = subprocess.run(
            [sys.executable, "-m", "acoentropy", "--instance", str(small_tsp), "--iters", "3", "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert "iteration ratio" in proc.stdout
