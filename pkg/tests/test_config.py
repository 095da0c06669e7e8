"""Unit tests for lab settings, experiment configs and config builders."""

import os
from unittest.mock import patch

import numpy as np
import pytest
import toml
from pydantic import ValidationError

from core.config.builders import SCHEME_BUILDERS, bt_parts, build_distortion, p2p_config, wz_config
from core.config.models import ExperimentConfig
from core.config.settings import LabSettings, load_lab_settings, load_settings_from_toml, validate_settings
from core.errors import ConfigError


DSBS = [[0.45, 0.05], [0.05, 0.45]]


class TestLabSettings:
    """Test the LabSettings class."""

    def test_default_settings(self):
        with patch.dict(os.environ, {}, clear=True):
            settings = LabSettings()
        assert settings.threads is None
        assert settings.log_level == "WARNING"
        assert settings.results_dir == "results"
        assert settings.codebook_budget == 2 ** 26
        assert settings.codebooks_per_experiment == 10
        assert settings.worker_count >= 1

    def test_environment_variable_override(self):
        with patch.dict(os.environ, {"SOFTCOVER_THREADS": "3", "SOFTCOVER_LOG_LEVEL": "DEBUG"}):
            settings = LabSettings()
        assert settings.threads == 3
        assert settings.worker_count == 3
        assert settings.log_level == "DEBUG"

    def test_invalid_threads(self):
        with patch.dict(os.environ, {"SOFTCOVER_THREADS": "0"}):
            with pytest.raises(ValidationError):
                LabSettings()


class TestTomlLayer:
    """Test loading settings from TOML."""

    def test_missing_file_gives_no_overrides(self, tmp_path):
        assert load_settings_from_toml(str(tmp_path / "absent.toml")) == {}

    def test_toml_values_apply(self, tmp_path):
        path = tmp_path / "lab.toml"
        path.write_text(toml.dumps({"lab": {"results_dir": "out", "codebooks_per_experiment": 4}}))
        with patch.dict(os.environ, {}, clear=True):
            settings = load_lab_settings(str(path))
        assert settings.results_dir == "out"
        assert settings.codebooks_per_experiment == 4

    def test_environment_wins_over_toml(self, tmp_path):
        path = tmp_path / "lab.toml"
        path.write_text(toml.dumps({"lab": {"threads": 2, "results_dir": "out"}}))
        with patch.dict(os.environ, {"SOFTCOVER_THREADS": "6"}, clear=True):
            settings = load_lab_settings(str(path))
        assert settings.threads == 6
        assert settings.results_dir == "out"

    def test_unknown_keys_ignored(self, tmp_path):
        path = tmp_path / "lab.toml"
        path.write_text('[lab]\ncolour = "blue"\n')
        with patch.dict(os.environ, {}, clear=True):
            assert load_lab_settings(str(path)).log_level == "WARNING"

    def test_malformed_toml(self, tmp_path):
        path = tmp_path / "lab.toml"
        path.write_text("[lab\nthreads = ")
        with pytest.raises(ConfigError, match="Failed to load settings"):
            load_settings_from_toml(str(path))

    def test_shipped_settings_file(self):
        shipped = os.path.join(os.path.dirname(__file__), "..", "softcover.toml")
        assert load_settings_from_toml(shipped)["log_level"] == "WARNING"


class TestValidateSettings:
    def test_valid(self, tmp_path):
        assert validate_settings(LabSettings(results_dir=str(tmp_path))) == []

    def test_bad_log_level(self):
        problems = validate_settings(LabSettings(log_level="LOUD"))
        assert len(problems) == 1 and "log level" in problems[0]

    def test_results_path_is_a_file(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert "not a directory" in validate_settings(LabSettings(results_dir=str(blocker)))[0]


class TestExperimentConfig:
    """Test experiment config validation."""

    def test_minimal_softcover(self):
        cfg = ExperimentConfig(scheme="softcover", joint=DSBS, rates=[0.5], ns=[2, 4])
        assert cfg.codebooks_per_cell == 20
        assert cfg.variant == "xy"

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(scheme="rd", source=[0.5, 0.5], targets=[0.1], colour="blue")

    def test_required_fields(self):
        with pytest.raises(ValidationError, match="requires test_channel, n"):
            ExperimentConfig(scheme="wz", joint=DSBS)
        with pytest.raises(ValidationError, match="test_channel"):
            ExperimentConfig(scheme="softcover", joint=DSBS, rates=[0.5], ns=[2], variant="xb")

    def test_grids_validated(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(scheme="softcover", joint=DSBS, rates=[0.5], ns=[0])
        with pytest.raises(ValidationError):
            ExperimentConfig(scheme="rd", source=[0.5, 0.5], targets=[])

    def test_unknown_scheme(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(scheme="turbo")


class TestBuilders:
    """Test conversion of configs into scheme configs."""

    @pytest.fixture
    def settings(self):
        return LabSettings(codebooks_per_experiment=5, codebook_budget=1000)

    def test_hamming_and_table(self):
        assert build_distortion("hamming", 2, 3).table.shape == (2, 3)
        assert build_distortion([[0, 2], [1, 0]], 2).table[0, 1] == 2.0

    def test_p2p_reconstruction_alphabet(self, settings):
        cfg = ExperimentConfig(scheme="p2p", source=[0.5, 0.5], test_channel=[[0.9, 0.1, 0.0], [0.1, 0.8, 0.1]], n=4)
        config = p2p_config(cfg, settings)
        assert config.d.table.shape == (2, 3)
        assert config.codebooks_per_experiment == 5
        assert config.codebook_budget == 1000

    def test_config_blocks_take_precedence(self, settings):
        cfg = ExperimentConfig(
            scheme="p2p", source=[0.5, 0.5], test_channel=[[0.9, 0.1], [0.1, 0.9]], n=4, codebooks_per_experiment=2
        )
        assert p2p_config(cfg, settings).codebooks_per_experiment == 2

    def test_wz_greedy_map(self, settings):
        cfg = ExperimentConfig(scheme="wz", joint=DSBS, test_channel=[[0.85, 0.15], [0.15, 0.85]], n=8)
        config = wz_config(cfg, settings)
        # B is the better guess whenever the two disagree
        assert config.phi.to_list() == [[0, 1], [0, 1]]

    def test_wz_explicit_map(self, settings):
        cfg = ExperimentConfig(
            scheme="wz", joint=DSBS, test_channel=[[0.85, 0.15], [0.15, 0.85]], n=8, phi=[[0, 0], [1, 1]]
        )
        assert wz_config(cfg, settings).phi.to_list() == [[0, 0], [1, 1]]

    def test_bt_parts(self):
        cfg = ExperimentConfig(
            scheme="bt-corner",
            joint=[[0.375, 0.125], [0.125, 0.375]],
            channel1=[[0.8, 0.2], [0.2, 0.8]],
            channel2=[[0.8, 0.2], [0.2, 0.8]],
        )
        joint, ch1, ch2, phi1, phi2, d1, d2 = bt_parts(cfg)
        assert joint.axes == ("X1", "X2")
        assert phi1.shape == phi2.shape == (2, 2)
        assert np.array_equal(d1.table, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_registered_builders(self):
        assert sorted(SCHEME_BUILDERS) == ["bt", "p2p", "wz"]
