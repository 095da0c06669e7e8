"""End-to-end tests of the command-line harness."""

import csv
import json
from pathlib import Path

import pytest

from core.config.models import ExperimentConfig
from core.harness import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, config_echo, run_cli


ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"
FIXTURES = ROOT / "fixtures.yaml"


def write_config(directory: Path, name: str, document: dict) -> str:
    path = directory / name
    path.write_text(json.dumps(document))
    return str(path)


def read_rows(directory: Path):
    with open(directory / "results.csv", newline="") as f:
        return list(csv.DictReader(f))


def read_summary(directory: Path) -> dict:
    with open(directory / "summary.json") as f:
        return json.load(f)


class TestCli:
    """Test run_cli exit codes and outputs."""

    @pytest.fixture
    def run(self, tmp_path):
        settings = str(tmp_path / "no-settings.toml")

        def invoke(*argv):
            return run_cli([*argv, "--settings", settings])

        return invoke

    def test_missing_config_file(self, run, tmp_path, capsys):
        assert run("rd", "--config", str(tmp_path / "missing.json")) == EXIT_CONFIG
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1 and err[0].startswith("error: Config file not found")

    def test_config_required(self, run):
        assert run("sim-wz") == EXIT_CONFIG

    def test_bad_json(self, run, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        assert run("rd", "--config", str(path)) == EXIT_CONFIG

    def test_unknown_field(self, run, tmp_path, capsys):
        path = write_config(tmp_path, "extra.json", {"scheme": "rd", "source": [0.5, 0.5], "targets": [0.1], "x": 1})
        assert run("rd", "--config", path) == EXIT_CONFIG
        assert "invalid config" in capsys.readouterr().err

    def test_scheme_must_match_command(self, run):
        assert run("sim-wz", "--config", str(CONFIGS / "rd_binary.json")) == EXIT_CONFIG

    def test_bad_probabilities(self, run, tmp_path):
        path = write_config(tmp_path, "bad.json", {"scheme": "rd", "source": [0.6, 0.6], "targets": [0.1]})
        assert run("rd", "--config", path, "--out", str(tmp_path / "out")) == EXIT_CONFIG

    def test_unknown_command(self, run):
        assert run("compress") == EXIT_CONFIG

    def test_help(self):
        assert run_cli(["--help"]) == EXIT_OK

    def test_infeasible_target_is_runtime_error(self, run, tmp_path):
        path = write_config(
            tmp_path,
            "floor.json",
            {"scheme": "rd", "source": [0.5, 0.5], "distortion": [[0.2, 1.0], [1.0, 0.2]], "targets": [0.1]},
        )
        assert run("rd", "--config", path, "--out", str(tmp_path / "out")) == EXIT_RUNTIME

    def test_rd_curve(self, run, tmp_path):
        out = tmp_path / "rd"
        assert run("rd", "--config", str(CONFIGS / "rd_binary.json"), "--out", str(out), "--plot") == EXIT_OK
        rows = read_rows(out)
        distortions = [float(row["distortion"]) for row in rows]
        assert distortions == sorted(distortions)
        assert float(rows[-1]["rate"]) == 0.0
        assert (out / "curve.html").exists()
        summary = read_summary(out)
        assert summary["artifact_version"] == "1.0"
        assert summary["config"]["name"] == "uniform-binary-hamming"
        assert {row["problem"] for row in rows} == {"uniform-binary-hamming"}

    def test_wz_rate(self, run, tmp_path):
        path = write_config(
            tmp_path,
            "wz.json",
            {"scheme": "wz-rate", "joint": [[0.45, 0.05], [0.05, 0.45]], "targets": [0.05], "restarts": 8},
        )
        out = tmp_path / "wz-rate"
        assert run("wz-rate", "--config", path, "--out", str(out)) == EXIT_OK
        point = read_summary(out)["points"][0]
        assert point["upper_bound"] is True
        assert 0.18 <= point["rate"] <= 0.32
        assert len(point["phi"]) == 3
        assert read_rows(out)[0]["problem"] == "experiment"

    def test_bt_corner_time_share(self, run, tmp_path):
        out = tmp_path / "bt"
        assert run("bt-corner", "--config", str(CONFIGS / "bt_corner.json"), "--out", str(out)) == EXIT_OK
        rows = read_rows(out)
        assert [row["status"] for row in rows] == ["corner-1", "corner-2", "time-shared"]
        assert {row["problem"] for row in rows} == {"correlated-pair"}
        summary = read_summary(out)
        total = float(rows[0]["rate1"]) + float(rows[0]["rate2"])
        assert total == pytest.approx(summary["bounds"]["sum_min"], abs=1e-9)
        assert summary["in_region_with_margin"] is True

    def test_softcover_is_byte_identical(self, run, tmp_path):
        path = write_config(
            tmp_path,
            "sweep.json",
            {"scheme": "softcover", "joint": [[0.4, 0.1], [0.1, 0.4]], "rates": [0.3, 0.8], "ns": [2, 4],
             "codebooks_per_cell": 5, "master_seed": 5},
        )
        first, second = tmp_path / "first", tmp_path / "second"
        assert run("softcover", "--config", path, "--out", str(first), "--threads", "1") == EXIT_OK
        assert run("softcover", "--config", path, "--out", str(second), "--threads", "4") == EXIT_OK
        assert (first / "results.csv").read_bytes() == (second / "results.csv").read_bytes()
        assert (first / "summary.json").read_bytes() == (second / "summary.json").read_bytes()
        rows = read_rows(first)
        assert len(rows) == 20
        assert [row["codebook_index"] for row in rows[:5]] == ["0", "1", "2", "3", "4"]

    def test_softcover_single_blocklength_override(self, run, tmp_path):
        out = tmp_path / "sweep"
        assert run("softcover", "--config", str(CONFIGS / "softcover_bsc.json"), "--n", "3", "--out", str(out)) == EXIT_OK
        assert {row["n"] for row in read_rows(out)} == {"3"}

    def test_simulated_mean_matches_csv(self, run, tmp_path):
        out = tmp_path / "wz"
        assert run("sim-wz", "--config", str(CONFIGS / "sim_wz.json"), "--trials", "40", "--out", str(out)) == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 40
        summary = read_summary(out)
        recomputed = sum(float(row["distortion"]) for row in rows) / len(rows)
        assert summary["mean_distortion"] == pytest.approx(recomputed, abs=1e-11)
        assert summary["config"]["trials"] == 40
        assert "threads" not in summary["config"] and "output_dir" not in summary["config"]

    def test_summary_config_reruns(self, run, tmp_path):
        out = tmp_path / "p2p"
        assert run("sim-p2p", "--config", str(CONFIGS / "sim_p2p.json"), "--trials", "10", "--seed", "4",
                   "--out", str(out)) == EXIT_OK
        echo = read_summary(out)["config"]
        rerun = write_config(tmp_path, "echo.json", echo)
        again = tmp_path / "again"
        assert run("sim-p2p", "--config", rerun, "--out", str(again)) == EXIT_OK
        assert (out / "results.csv").read_bytes() == (again / "results.csv").read_bytes()

    def test_dump_codebook(self, run, tmp_path):
        out = tmp_path / "dump"
        assert run("dump-codebook", "--config", str(CONFIGS / "sim_wz.json"), "--n", "6", "--block", "2",
                   "--out", str(out)) == EXIT_OK
        summary = read_summary(out)
        book = summary["codebooks"][0]
        rows = read_rows(out)
        assert len(rows) == book["num_m"] * book["num_mprime"]
        assert list(rows[0]) == ["role", "m", "mprime", "v1", "v2", "v3", "v4", "v5", "v6"]
        assert summary["block"] == 2

    def test_dump_codebook_bad_block(self, run):
        assert run("dump-codebook", "--config", str(CONFIGS / "sim_wz.json"), "--block", "99") == EXIT_CONFIG

    def test_verify_identities(self, run, tmp_path):
        out = tmp_path / "identities"
        assert run("verify-identities", "--fixtures", str(FIXTURES), "--out", str(out)) == EXIT_OK
        summary = read_summary(out)
        assert summary["all_passed"] is True
        assert [row["passed"] for row in read_rows(out)] == ["1", "1", "1"]

    def test_verify_unknown_fixture(self, run, tmp_path):
        path = write_config(tmp_path, "ids.json", {"scheme": "identities", "fixtures": ["nope"]})
        assert run("verify-identities", "--config", path, "--fixtures", str(FIXTURES)) == EXIT_CONFIG


class TestConfigEcho:
    def test_run_only_fields_dropped(self):
        cfg = ExperimentConfig(scheme="rd", source=[0.5, 0.5], targets=[0.1], threads=4, output_dir="x")
        echo = config_echo(cfg)
        assert "threads" not in echo and "output_dir" not in echo
        assert ExperimentConfig.model_validate(echo).targets == [0.1]

    def test_all_shipped_configs_validate(self):
        for path in sorted(CONFIGS.glob("*.json")):
            with open(path) as f:
                ExperimentConfig.model_validate(json.load(f))
