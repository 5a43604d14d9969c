"""In-process tests for the command-line interface."""

import json

import pytest

from qswarm.cli import build_parser, main

TINY = [
    "--dim", "2",
    "--particles", "5",
    "--max-iter", "40",
    "--seed", "11",
]


def data_lines(path):
    return [
        line
        for line in path.read_text(encoding="utf-8").splitlines()
        if line and not line.startswith("#")
    ]


class TestParser:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_rejects_unknown_objective(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run", "--objective", "banana"])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert "qswarm" in capsys.readouterr().out


class TestRunCommand:
    def test_plain_output(self, capsys):
        rc = main(["run", "--objective", "sphere", "--q", "1.0"] + TINY)
        assert rc == 0
        out = capsys.readouterr().out
        assert "best_score" in out
        assert "termination" in out
        assert "objective     sphere" in out

    def test_json_output(self, capsys):
        rc = main(
            ["run", "--objective", "sphere", "--q", "1.32", "--json"] + TINY
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["objective"] == "sphere"
        assert payload["q"] == 1.32
        assert len(payload["best_position"]) == 2
        assert payload["termination"] in ("diversity", "cap")

    def test_out_writes_json(self, tmp_path, capsys):
        prefix = tmp_path / "single"
        rc = main(
            ["run", "--objective", "sphere", "--out", str(prefix)] + TINY
        )
        assert rc == 0
        payload = json.loads((tmp_path / "single.json").read_text())
        assert payload["seed"] == 11

    def test_rejects_multiple_q(self, capsys):
        rc = main(["run", "--q", "1.0", "--q", "1.32"] + TINY)
        assert rc == 2
        assert "single --q" in capsys.readouterr().err

    def test_deterministic_across_calls(self, capsys):
        argv = ["run", "--objective", "rastrigin", "--json"] + TINY
        main(argv)
        first = json.loads(capsys.readouterr().out)
        main(argv)
        second = json.loads(capsys.readouterr().out)
        assert first["best_score"] == second["best_score"]
        assert first["iterations"] == second["iterations"]


class TestSweepCommands:
    def test_failure_sweep_files(self, tmp_path, capsys):
        prefix = tmp_path / "fs"
        rc = main(
            [
                "failure-sweep",
                "--objective", "sphere",
                "--q", "1.0",
                "--q", "1.32",
                "--amplitude", "0.2",
                "--runs", "2",
                "--out", str(prefix),
            ]
            + TINY
        )
        assert rc == 0
        runs = data_lines(tmp_path / "fs.runs.csv")
        assert len(runs) - 1 == 2 * 1 * 2  # header + |q| x |A| x runs
        summary = data_lines(tmp_path / "fs.summary.csv")
        assert len(summary) - 1 == 2
        payload = json.loads((tmp_path / "fs.json").read_text())
        assert len(payload["cells"]) == 2
        out = capsys.readouterr().out
        assert "fs.runs.csv" in out

    def test_summary_table_on_stdout(self, capsys):
        rc = main(
            [
                "failure-sweep",
                "--objective", "sphere",
                "--q", "1.0",
                "--runs", "2",
            ]
            + TINY
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "fail%" in out
        assert "mean_best" in out

    def test_full_scale_swaps_amplitude_grid(self, tmp_path):
        prefix = tmp_path / "ps"
        rc = main(
            [
                "failure-sweep",
                "--objective", "sphere",
                "--q", "1.0",
                "--runs", "1",
                "--full-scale",
                "--out", str(prefix),
            ]
            + TINY
        )
        assert rc == 0
        summary = data_lines(tmp_path / "ps.summary.csv")
        assert len(summary) - 1 == 10  # ten amplitudes in the full grid

    def test_a_sweep_defaults_have_three_amplitudes(self, tmp_path):
        prefix = tmp_path / "as"
        rc = main(
            [
                "a-sweep",
                "--objective", "sphere",
                "--q", "1.0",
                "--runs", "1",
                "--out", str(prefix),
            ]
            + TINY
        )
        assert rc == 0
        summary = data_lines(tmp_path / "as.summary.csv")
        assert len(summary) - 1 == 3

    def test_diversity_trace_writes_trace_csv(self, tmp_path):
        prefix = tmp_path / "dt"
        rc = main(
            [
                "diversity-trace",
                "--objective", "sphere",
                "--q", "1.0",
                "--q", "1.32",
                "--runs", "2",
                "--out", str(prefix),
            ]
            + TINY
        )
        assert rc == 0
        trace = data_lines(tmp_path / "dt.diversity.csv")
        assert trace[0] == "iteration,q,mean_diversity"
        assert len(trace) > 2

    def test_cpu_bench_uses_critical_q_for_dim(self, capsys):
        rc = main(
            [
                "cpu-bench",
                "--objective", "sphere",
                "--runs", "2",
            ]
            + TINY
        )
        assert rc == 0
        out = capsys.readouterr().out
        # q_critical(2) = 1 + 1/sqrt(2) printed alongside the q=1 baseline
        assert "1.70711" in out

    def test_cpu_bench_respects_explicit_q(self, capsys):
        rc = main(
            [
                "cpu-bench",
                "--objective", "sphere",
                "--q", "1.0",
                "--q", "1.32",
                "--runs", "2",
                "--json",
            ]
            + TINY
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert {cell["q"] for cell in payload["cells"]} == {1.0, 1.32}


class TestConfigPrecedence:
    def test_config_supplies_defaults(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"runs": 3, "particles": 4}))
        prefix = tmp_path / "cfg"
        rc = main(
            [
                "failure-sweep",
                "--objective", "sphere",
                "--q", "1.0",
                "--config", str(config),
                "--out", str(prefix),
            ]
            + TINY[:0]
            + ["--dim", "2", "--max-iter", "40", "--seed", "11"]
        )
        assert rc == 0
        runs = data_lines(tmp_path / "cfg.runs.csv")
        assert len(runs) - 1 == 3
        header = (tmp_path / "cfg.runs.csv").read_text().splitlines()[1]
        assert "particles=4" in header

    def test_config_keys_mirror_spec_fields(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps(
                {
                    "q_values": [1.0, 1.32],
                    "amplitudes": [0.1, 0.3],
                    "base_seed": 99,
                    "max_iterations": 30,
                    "runs": 2,
                }
            )
        )
        prefix = tmp_path / "fields"
        rc = main(
            [
                "failure-sweep",
                "--objective", "sphere",
                "--dim", "2",
                "--particles", "5",
                "--config", str(config),
                "--out", str(prefix),
            ]
        )
        assert rc == 0
        runs = data_lines(tmp_path / "fields.runs.csv")
        assert len(runs) - 1 == 2 * 2 * 2
        header = (tmp_path / "fields.runs.csv").read_text().splitlines()[1]
        assert "base_seed=99" in header

    def test_cli_flag_beats_config(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"runs": 5}))
        prefix = tmp_path / "beat"
        rc = main(
            [
                "failure-sweep",
                "--objective", "sphere",
                "--q", "1.0",
                "--runs", "2",
                "--config", str(config),
                "--out", str(prefix),
            ]
            + TINY
        )
        assert rc == 0
        runs = data_lines(tmp_path / "beat.runs.csv")
        assert len(runs) - 1 == 2

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"walrus": 1}))
        rc = main(["failure-sweep", "--config", str(config)] + TINY)
        assert rc == 2
        assert "unknown config keys: walrus" in capsys.readouterr().err

    def test_config_must_be_object(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text("[1, 2]")
        rc = main(["failure-sweep", "--config", str(config)] + TINY)
        assert rc == 2
        assert "JSON object" in capsys.readouterr().err


class TestSolveY0:
    def test_plain_output(self, capsys):
        rc = main(["solve-y0", "--p0", "0.75", "--q", "1.0"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "q=1.0" in out
        value = float(out.strip().rsplit("y0=", 1)[1])
        assert value == pytest.approx(0.4769362762044699, abs=1e-9)

    def test_multiple_roots_json(self, capsys):
        rc = main(
            ["solve-y0", "--p0", "0.75", "--q", "1.0", "--q", "2.0", "--json"]
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["p0"] == 0.75
        assert payload["roots"]["1.0"] == pytest.approx(0.476936, abs=1e-5)
        assert payload["roots"]["2.0"] == pytest.approx(1.0, abs=1e-9)

    def test_out_writes_json(self, tmp_path):
        prefix = tmp_path / "roots"
        rc = main(["solve-y0", "--q", "1.32", "--out", str(prefix)])
        assert rc == 0
        payload = json.loads((tmp_path / "roots.json").read_text())
        assert "1.32" in payload["roots"]

    def test_invalid_q_reports_error(self, capsys):
        rc = main(["solve-y0", "--q", "3.5"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestErrorPaths:
    def test_bad_spec_value_returns_2(self, capsys):
        rc = main(["failure-sweep", "--runs", "0"] + TINY)
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_diversity_rejects_amplitude_grid(self, capsys):
        rc = main(
            [
                "diversity-trace",
                "--amplitude", "0.1",
                "--amplitude", "0.2",
                "--runs", "2",
            ]
            + TINY
        )
        assert rc == 2
        assert "one amplitude" in capsys.readouterr().err
