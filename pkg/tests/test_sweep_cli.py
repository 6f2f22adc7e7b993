"""Tests for the parameter sweep engine and the command-line interface."""

import csv
import hashlib
import io
import json
import math

import pytest

from bigraphgen import dataio, sweep
from bigraphgen.bigraph import ITEM
from bigraphgen.cli import main
from bigraphgen.generator import GeneratorParams, run


def base_params(**overrides):
    fields = dict(m=10, iterations=100, p=0.5, u=3, v=3)
    fields.update(overrides)
    return GeneratorParams(**fields)


def small_spec(**overrides):
    fields = dict(
        base=base_params(),
        axes=(("b", (0.0, 0.5)),),
        seeds_per_cell=2,
        measures=("blcc_mean",),
        master_seed=7,
    )
    fields.update(overrides)
    return sweep.SweepSpec(**fields)


class TestSweepSpec:
    def test_rejects_unknown_axis(self):
        with pytest.raises(ValueError, match="axis"):
            small_spec(axes=(("gamma", (0.1, 0.2)),))

    def test_rejects_empty_axis_values(self):
        with pytest.raises(ValueError, match="value"):
            small_spec(axes=(("b", ()),))

    def test_rejects_three_axes(self):
        axes = (("b", (0.0,)), ("alpha", (0.0,)), ("beta", (0.0,)))
        with pytest.raises(ValueError, match="axes"):
            small_spec(axes=axes)

    def test_rejects_unknown_measure(self):
        with pytest.raises(ValueError, match="measure"):
            small_spec(measures=("entropy",))

    def test_rejects_invalid_cell_params(self):
        # every cell is validated up front, not at run time
        with pytest.raises(ValueError, match="invalid parameters"):
            small_spec(axes=(("p", (0.5, 1.5)),))

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError, match="seeds_per_cell"):
            small_spec(seeds_per_cell=0)
        with pytest.raises(ValueError, match="workers"):
            small_spec(workers=0)

    def test_cell_enumeration_is_row_major(self):
        spec = small_spec(axes=(("alpha", (0.1, 0.2)), ("b", (0.0, 0.5, 0.9))))
        assert spec.cell_count == 6
        seen = [spec.cell_values(i) for i in range(spec.cell_count)]
        assert seen == [
            (0.1, 0.0), (0.1, 0.5), (0.1, 0.9),
            (0.2, 0.0), (0.2, 0.5), (0.2, 0.9),
        ]

    def test_cell_params_patch_named_fields(self):
        spec = small_spec(axes=(("T", (250,)), ("alpha", (0.25,))))
        params = spec.cell_params(0)
        assert params.iterations == 250
        assert params.alpha == 0.25
        assert params.m == spec.base.m

    def test_uv_axis_sets_both_edge_counts(self):
        spec = small_spec(axes=(("uv", (4, 9)),))
        assert spec.cell_params(1).u == 9
        assert spec.cell_params(1).v == 9


class TestCellSeeds:
    def test_matches_documented_formula(self):
        digest = hashlib.sha256(b"42:3:1").hexdigest()
        assert sweep.cell_seed(42, 3, 1) == int(digest, 16) % 2**63

    def test_distinct_across_cells_and_slots(self):
        seeds = {sweep.cell_seed(0, c, s) for c in range(20) for s in range(20)}
        assert len(seeds) == 400


class TestRunCell:
    def test_row_schema_and_aggregates(self):
        spec = small_spec(measures=("blcc_mean", "similar_users"))
        rows = sweep.run_cell(spec, 0)
        kinds = [r["kind"] for r in rows]
        assert kinds == ["seed", "seed", "mean", "std"]
        per_seed = [r["blcc_mean"] for r in rows[:2]]
        mean_row, std_row = rows[2], rows[3]
        assert mean_row["blcc_mean"] == pytest.approx(sum(per_seed) / 2)
        expected_std = math.sqrt(
            sum((x - mean_row["blcc_mean"]) ** 2 for x in per_seed)
        )
        assert std_row["blcc_mean"] == pytest.approx(expected_std)
        assert mean_row["seed"] == "" and std_row["seed"] == ""
        for row in rows:
            assert row["cell"] == 0
            assert row["b"] == 0.0
            assert row["t"] == spec.base.iterations

    def test_seed_rows_reproduce_direct_runs(self):
        spec = small_spec()
        rows = sweep.run_cell(spec, 1)
        seed = rows[0]["seed"]
        assert seed == sweep.cell_seed(7, 1, 0)
        result = run(spec.cell_params(1), seed)
        from bigraphgen.analytics import blcc_summary

        assert rows[0]["blcc_mean"] == pytest.approx(
            blcc_summary(result.graph, spec.modality).mean
        )

    def test_growth_rows_sample_run_trajectory(self):
        spec = small_spec(sample_growth=True,
                          measures=("blcc_mean", "similar_users"))
        rows = sweep.run_cell(spec, 0)
        growth = [r for r in rows if r["kind"] == "growth"]
        assert growth, "growth sampling requested but no rows produced"
        ts = sorted({r["t"] for r in growth})
        assert ts[-1] == spec.base.iterations
        assert all(0 < t <= spec.base.iterations for t in ts)
        step = max(1, spec.base.iterations // sweep.GROWTH_SAMPLES)
        assert all(t % step == 0 or t == spec.base.iterations for t in ts)
        # only neighborhood measures are tracked along the run
        assert all("blcc_mean" not in r for r in growth)
        assert all(not math.isnan(r["similar_users"]) for r in growth)

    def test_growth_rows_skipped_without_neighborhood_measures(self):
        spec = small_spec(sample_growth=True, measures=("blcc_mean",))
        rows = sweep.run_cell(spec, 0)
        assert all(r["kind"] != "growth" for r in rows)

    def test_degree_fit_nan_when_histogram_too_narrow(self):
        # 100 iterations at u=v=3 leaves too few occupied degrees
        spec = small_spec(measures=("degree_fit",),
                          base=base_params(iterations=30))
        rows = sweep.run_cell(spec, 0)
        assert all(math.isnan(r["degree_fit"]) for r in rows[:2])

    def test_item_modality_measures_item_side(self):
        spec_u = small_spec(measures=("blcc_mean",))
        spec_i = small_spec(measures=("blcc_mean",), modality=ITEM)
        row_u = sweep.run_cell(spec_u, 0)[0]
        row_i = sweep.run_cell(spec_i, 0)[0]
        assert row_u["blcc_mean"] != row_i["blcc_mean"]


class TestRunSweep:
    def test_preserves_cell_order(self):
        spec = small_spec(axes=(("b", (0.0, 0.3, 0.6)),))
        rows = sweep.run_sweep(spec)
        cells = [r["cell"] for r in rows]
        assert cells == sorted(cells)
        assert set(cells) == {0, 1, 2}

    def test_parallel_matches_sequential(self):
        spec_seq = small_spec()
        spec_par = small_spec(workers=2)
        assert sweep.run_sweep(spec_seq) == sweep.run_sweep(spec_par)

    def test_csv_layout(self):
        spec = small_spec(measures=("blcc_mean", "neighbor_items"))
        rows = sweep.run_sweep(spec)
        buf = io.StringIO()
        sweep.write_sweep_csv(spec, rows, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "cell,b,kind,seed,t,blcc_mean,neighbor_items"
        parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
        assert len(parsed) == 8
        mean_rows = [r for r in parsed if r["kind"] == "mean"]
        assert all(r["seed"] == "" for r in mean_rows)
        assert float(parsed[0]["blcc_mean"]) > 0

    def test_csv_nan_becomes_empty_field(self):
        spec = small_spec(measures=("degree_fit",),
                          base=base_params(iterations=30))
        buf = io.StringIO()
        sweep.write_sweep_csv(spec, sweep.run_sweep(spec), buf)
        parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
        assert all(r["degree_fit"] == "" for r in parsed)


class TestCliGenerate:
    def test_writes_edge_list_and_summary(self, tmp_path, capsys):
        out = tmp_path / "g.tsv"
        code = main(["generate", "--m", "5", "--iters", "40", "--seed", "3",
                     "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        loaded = dataio.load_edge_list(out, dataio.EdgeListFormat("tab"))
        assert summary["users"] == loaded.graph.user_count
        assert summary["items"] == loaded.graph.item_count
        assert summary["edges"] == loaded.graph.edge_count
        assert summary["edges"] == 5 + summary["realized_edges"]

    def test_zero_iterations_writes_initial_pairs(self, tmp_path, capsys):
        out = tmp_path / "g.tsv"
        assert main(["generate", "--m", "4", "--iters", "0",
                     "--out", str(out)]) == 0
        assert json.loads(capsys.readouterr().out)["edges"] == 4
        assert len(out.read_text().splitlines()) == 4

    def test_same_seed_same_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        for out in (a, b):
            assert main(["generate", "--m", "5", "--iters", "60",
                         "--seed", "11", "--out", str(out)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_comma_format(self, tmp_path, capsys):
        out = tmp_path / "g.csv"
        assert main(["generate", "--m", "2", "--iters", "0",
                     "--format", "comma", "--out", str(out)]) == 0
        capsys.readouterr()
        assert out.read_text() == "u0,i0\nu1,i1\n"

    def test_invalid_params_exit_1(self, tmp_path, capsys):
        code = main(["generate", "--m", "0", "--out", str(tmp_path / "x")])
        assert code == 1
        assert "invalid parameters" in capsys.readouterr().err

    def test_unwritable_path_exit_2(self, tmp_path, capsys):
        code = main(["generate", "--m", "2", "--iters", "0",
                     "--out", str(tmp_path / "no" / "dir" / "x.tsv")])
        assert code == 2


class TestCliAnalyze:
    def make_edge_list(self, tmp_path):
        out = tmp_path / "g.tsv"
        assert main(["generate", "--m", "10", "--iters", "200", "--seed", "5",
                     "--out", str(out)]) == 0
        return out

    def test_report_round_trip(self, tmp_path, capsys):
        src = self.make_edge_list(tmp_path)
        report_path = tmp_path / "report.json"
        capsys.readouterr()
        assert main(["analyze", str(src), "--out", str(report_path)]) == 0
        report = json.loads(report_path.read_text())
        assert report["format_version"] == dataio.REPORT_FORMAT_VERSION
        assert report["counts"]["edges"] == len(src.read_text().splitlines())
        assert report["second_neighbors"]["modality"] == "user"

    def test_stdout_output_and_item_modality(self, tmp_path, capsys):
        src = self.make_edge_list(tmp_path)
        capsys.readouterr()
        assert main(["analyze", str(src), "--modality", "item"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["second_neighbors"]["modality"] == "item"

    def test_per_node_and_named_row(self, tmp_path, capsys):
        src = self.make_edge_list(tmp_path)
        capsys.readouterr()
        assert main(["analyze", str(src), "--per-node", "--name", "demo"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert "per_node" in report["blcc"]
        assert report["dataset_row"]["name"] == "demo"

    def test_malformed_input_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("only_one_column\n")
        assert main(["analyze", str(bad)]) == 1
        assert "line 1" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tmp_path):
        assert main(["analyze", str(tmp_path / "absent.tsv")]) == 2


class TestCliSweep:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--m", "10", "--iters", "100", "--u", "3", "--v", "3",
            "--axis", "b=0,0.5", "--seeds-per-cell", "2",
            "--measures", "blcc_mean,similar_users", "--out", str(out),
        ])
        assert code == 0
        parsed = list(csv.DictReader(out.open()))
        assert len(parsed) == 8
        assert set(parsed[0]) == {"cell", "b", "kind", "seed", "t",
                                  "blcc_mean", "similar_users"}

    def test_two_axes(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--m", "10", "--iters", "60", "--u", "3", "--v", "3",
            "--axis", "alpha=0,0.9", "--axis", "beta=0,0.9",
            "--seeds-per-cell", "1", "--out", str(out),
        ])
        assert code == 0
        parsed = list(csv.DictReader(out.open()))
        assert {r["cell"] for r in parsed} == {"0", "1", "2", "3"}
        assert {"alpha", "beta"} <= set(parsed[0])

    def test_integer_axis_values_accepted(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--m", "10", "--iters", "50", "--axis", "uv=3,4",
            "--seeds-per-cell", "1", "--out", str(out),
        ])
        assert code == 0

    def test_bad_axis_name_exit_1(self, tmp_path, capsys):
        assert main(["sweep", "--axis", "gamma=1,2",
                     "--out", str(tmp_path / "x.csv")]) == 1

    def test_bad_axis_syntax_exit_1(self, tmp_path, capsys):
        assert main(["sweep", "--axis", "b", "--out",
                     str(tmp_path / "x.csv")]) == 1


class TestCliParsing:
    def test_no_command_exit_1(self, capsys):
        assert main([]) == 1

    def test_unknown_command_exit_1(self, capsys):
        assert main(["explode"]) == 1

    def test_help_exit_0(self, capsys):
        assert main(["--help"]) == 0
        assert "generate" in capsys.readouterr().out

    def test_missing_required_flag_exit_1(self, capsys):
        assert main(["generate"]) == 1
