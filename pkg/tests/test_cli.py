import csv
import os

import pytest

from sidelink_sps.cli import main


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestArgumentHandling:
    def test_run_requires_population(self, tmp_path, capsys):
        rc = main(["run", "--out", str(tmp_path)])
        assert rc == 2
        assert "required" in capsys.readouterr().err

    def test_conflicting_cbr_and_ues(self, tmp_path, capsys):
        rc = main(["run", "--cbr", "5", "--ues", "100", "--out", str(tmp_path)])
        assert rc == 2
        assert "mutually exclusive" in capsys.readouterr().err

    def test_capacity_exit_code(self, tmp_path):
        rc = main(["run", "--ues", "3000", "--duration", "1", "--runs", "1",
                   "--out", str(tmp_path)])
        assert rc == 3

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus = 1\n")
        rc = main(["run", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2
        assert "bogus" in capsys.readouterr().err

    def test_config_file_sets_flags_and_cli_overrides(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("ues = 50\nduration = 2\nruns = 1\nseed = 5\n# comment\n")
        rc = main(["run", "--config", str(cfg), "--duration", "3",
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "series.csv")
        t_values = {r[7] for r in rows[1:]}
        assert t_values == {"1", "2", "3"}  # CLI duration won over the file

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPS_SIM_SEED", "99")
        rc = main(["run", "--ues", "30", "--duration", "1", "--runs", "1",
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "series.csv")
        from sidelink_sps import derive_seed

        assert rows[1][6] == str(derive_seed(99, "sps", 0, 0))


class TestRunOutputs:
    def test_summary_and_series_schema(self, tmp_path):
        rc = main(["run", "--ues", "100", "--duration", "2", "--runs", "2",
                   "--seed", "4", "--jobs", "1", "--out", str(tmp_path)])
        assert rc == 0
        summary = read_csv(tmp_path / "summary.csv")
        assert summary[0] == ["scheduler", "cbr", "num_ues", "prob_keep", "churn",
                              "rc_la", "seed", "t_seconds", "collision_prob", "ci95"]
        assert len(summary) == 2
        assert summary[1][6] == "agg"
        series = read_csv(tmp_path / "series.csv")
        # 2 seeds x 2 seconds + 2 aggregate rows
        assert len(series) == 1 + 2 * 2 + 2

    def test_byte_identical_reruns(self, tmp_path):
        args = ["run", "--ues", "100", "--duration", "2", "--runs", "2",
                "--seed", "4", "--jobs", "1"]
        main(args + ["--out", str(tmp_path / "a")])
        main(args + ["--out", str(tmp_path / "b")])
        for name in ("summary.csv", "series.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_numeric_fields_round_trip(self, tmp_path):
        main(["run", "--ues", "100", "--duration", "2", "--runs", "2", "--seed", "4",
              "--jobs", "1", "--out", str(tmp_path)])
        for row in read_csv(tmp_path / "summary.csv")[1:]:
            val = float(row[8])
            assert repr(val) == row[8]

    def test_both_schedulers(self, tmp_path):
        rc = main(["run", "--ues", "50", "--duration", "1", "--runs", "1",
                   "--scheduler", "both", "--jobs", "1", "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "summary.csv")
        assert {r[0] for r in rows[1:]} == {"sps", "spsla"}


class TestSweepCommand:
    def test_cbr_axis_maps_to_populations(self, tmp_path):
        rc = main(["sweep", "--axis", "cbr", "--points", "1,2", "--runs", "1",
                   "--duration", "1", "--seed", "3", "--jobs", "1",
                   "--scheduler", "sps", "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "summary.csv")
        assert [r[2] for r in rows[1:]] == ["25", "50"]

    def test_prob_keep_axis(self, tmp_path):
        rc = main(["sweep", "--axis", "prob-keep", "--points", "0.2,0.4", "--ues", "50",
                   "--runs", "1", "--duration", "1", "--seed", "3", "--jobs", "1",
                   "--scheduler", "sps", "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "summary.csv")
        assert [r[3] for r in rows[1:]] == ["0.2", "0.4"]


class TestTablesCommand:
    def test_light_and_heavy_grids_for_both_schedulers(self, tmp_path):
        rc = main(["tables", "--runs", "1", "--duration", "1", "--seed", "2",
                   "--jobs", "1", "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "summary.csv")[1:]
        assert len(rows) == 14 * 2  # 5 light + 9 heavy points, both schedulers
        cbrs = sorted({float(r[1]) for r in rows})
        assert cbrs == [1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0, 30.0, 40.0,
                        50.0, 60.0, 70.0, 80.0, 90.0]


class TestAnalyticCommand:
    def test_outputs(self, tmp_path):
        rc = main(["analytic", "--cbr-grid", "0.1:0.9:0.1", "--max-subchannels", "30",
                   "--out", str(tmp_path)])
        assert rc == 0
        ana = read_csv(tmp_path / "analytic.csv")
        assert ana[0] == ["cbr", "p_col_sps", "p_col_spsla"]
        assert len(ana) == 10
        bits = read_csv(tmp_path / "bits.csv")
        assert bits[0] == ["n_subch", "bits_no_offset", "bits_with_offset"]
        assert bits[25] == ["25", "9", "19"]

    def test_bad_grid_rejected(self, tmp_path, capsys):
        assert main(["analytic", "--cbr-grid", "nope", "--out", str(tmp_path)]) == 2


class TestFigdataCommand:
    def test_analytic_figures_only(self, tmp_path):
        rc = main(["figdata", "--figures", "5,6", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "fig5.csv").exists()
        assert (tmp_path / "fig6.csv").exists()

    def test_simulated_figure_small(self, tmp_path):
        rc = main(["figdata", "--figures", "11", "--ues", "50", "--runs", "1",
                   "--duration", "2", "--seed", "2", "--jobs", "1",
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "fig11.csv")
        assert len(rows) == 1 + 4 * 2  # 4 churn levels x 2 schedulers

    def test_unknown_figure_rejected(self, tmp_path):
        assert main(["figdata", "--figures", "99", "--out", str(tmp_path)]) == 2
