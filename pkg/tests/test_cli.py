import json

import numpy as np
import pytest

from spikempc.cli import main

TINY_INI = """\
[network]
seed = 3
n = 6
sizes = 2,2,2
p_within = 0.7
p_between = 0.3
inhibitory_fraction = 0.2
inhibitory_indices =

[init]
warmup_steps = 10
current_low = 0.0
current_high = 14.0

[optimizer]
iterations_per_increment = 2
multi_start_levels = 20.0

[mpc]
horizon = 2
t_switch = 2.0
t_end = 4.0
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.ini"
    path.write_text(TINY_INI)
    return path


class TestGenerate:
    def test_writes_deterministic_network_file(self, tiny_config, tmp_path, capsys):
        out1 = tmp_path / "net1.txt"
        out2 = tmp_path / "net2.txt"
        assert main(["generate", "--config", str(tiny_config), "--out", str(out1)]) == 0
        assert main(["generate", "--config", str(tiny_config), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        summary = capsys.readouterr().out
        assert "n=6" in summary and "edges=" in summary

    def test_seed_changes_file(self, tiny_config, tmp_path):
        out1 = tmp_path / "net1.txt"
        out2 = tmp_path / "net2.txt"
        main(["generate", "--config", str(tiny_config), "--out", str(out1)])
        main(["generate", "--config", str(tiny_config), "--seed", "9",
              "--out", str(out2)])
        assert out1.read_bytes() != out2.read_bytes()

    def test_invalid_probability_exits_with_message(self, tmp_path, capsys):
        bad = tmp_path / "bad.ini"
        bad.write_text("[network]\np_within = 1.5\n")
        rc = main(["generate", "--config", str(bad), "--out", str(tmp_path / "x.txt")])
        assert rc == 1
        assert "p_within" in capsys.readouterr().err

    def test_preset_n15_layout(self, tmp_path, capsys):
        out = tmp_path / "net.txt"
        assert main(["generate", "--preset", "n15", "--seed", "1", "--out", str(out)]) == 0
        text = out.read_text().splitlines()
        assert text[0] == "n=15"
        assert text[1] == "partition=5,5,5"
        assert text[2] == "inhibitory=6,9,13"


class TestRun:
    def test_produces_all_outputs(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(["run", "--config", str(tiny_config), "--out", str(out)])
        assert rc == 0
        for name in ("trace.csv", "control.csv", "report.json", "baseline_trace.csv"):
            assert (out / name).exists(), name
        report = json.loads((out / "report.json").read_text())
        assert report["seed"] == 3
        assert report["controlled"]["objective"] == (
            report["controlled"]["counts"]["module1"][0]
            - report["controlled"]["counts"]["module2"][0]
            + report["controlled"]["counts"]["module2"][1]
            - report["controlled"]["counts"]["module1"][1]
        )
        assert "config" in report and report["config"]["mpc"]["horizon"] == 2
        printed = capsys.readouterr().out
        assert "module1" in printed and "objective:" in printed

    def test_no_control_matches_baseline(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        rc = main(["run", "--config", str(tiny_config), "--out", str(out),
                   "--no-control"])
        assert rc == 0
        trace = (out / "trace.csv").read_bytes()
        baseline = (out / "baseline_trace.csv").read_bytes()
        assert trace == baseline
        control = (out / "control.csv").read_text().splitlines()[1:]
        assert all(line.endswith(",0.0") for line in control)

    def test_network_file_input(self, tiny_config, tmp_path):
        net = tmp_path / "net.txt"
        main(["generate", "--config", str(tiny_config), "--out", str(net)])
        out = tmp_path / "out"
        rc = main(["run", "--config", str(tiny_config), "--network", str(net),
                   "--out", str(out), "--no-control"])
        assert rc == 0

    def test_multiple_seeds_write_subdirectories(self, tiny_config, tmp_path):
        out = tmp_path / "multi"
        rc = main(["run", "--config", str(tiny_config), "--seed", "1", "2",
                   "--out", str(out), "--no-control"])
        assert rc == 0
        assert (out / "seed-1" / "report.json").exists()
        assert (out / "seed-2" / "report.json").exists()

    def test_jobs_flag_parallel_seeds(self, tiny_config, tmp_path):
        out = tmp_path / "par"
        rc = main(["run", "--config", str(tiny_config), "--seed", "1", "2",
                   "--jobs", "2", "--out", str(out), "--no-control"])
        assert rc == 0
        a = json.loads((out / "seed-1" / "report.json").read_text())
        assert a["seed"] == 1

    def test_byte_identical_reruns(self, tiny_config, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        main(["run", "--config", str(tiny_config), "--out", str(out1)])
        main(["run", "--config", str(tiny_config), "--out", str(out2)])
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
        assert (out1 / "control.csv").read_bytes() == (out2 / "control.csv").read_bytes()
        r1 = json.loads((out1 / "report.json").read_text())
        r2 = json.loads((out2 / "report.json").read_text())
        r1.pop("timing"); r2.pop("timing")
        assert r1 == r2


class TestGradcheckCommand:
    def test_passes_on_tiny_config(self, tiny_config, capsys):
        rc = main(["gradcheck", "--config", str(tiny_config), "--samples", "20"])
        out = capsys.readouterr().out
        assert "soft synapse" in out and "hard synapse" in out
        assert rc == 0
