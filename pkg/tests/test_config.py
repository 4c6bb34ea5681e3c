import pytest

from spikempc.config import (
    default_config,
    load_config,
    preset_config,
    save_config,
)
from spikempc.errors import ConfigurationError, FileFormatError


class TestPresets:
    def test_n15_constants(self):
        cfg = preset_config("n15", seed=7)
        assert cfg.network.n == 15
        assert cfg.network.sizes == (5, 5, 5)
        assert cfg.network.p_within == 0.5
        assert cfg.network.p_between == 1 / 8
        assert cfg.network.inhibitory_indices == (6, 9, 13)
        assert cfg.seed == 7
        assert (cfg.model.a, cfg.model.b, cfg.model.c, cfg.model.d) == (0.1, 0.2, -65.0, 2.0)
        assert (cfg.model.i_ex, cfg.model.i_in) == (15.0, -3.0)
        assert cfg.model.sigma == 0.38 and cfg.model.dt == 1.0
        assert cfg.mpc.horizon == 10
        assert (cfg.mpc.t_switch, cfg.mpc.t_end) == (10.0, 20.0)

    def test_n30_constants(self):
        cfg = preset_config("n30")
        assert cfg.network.n == 30
        assert cfg.network.sizes == (10, 10, 10)
        assert cfg.network.p_between == 1 / 25
        assert cfg.network.inhibitory_indices == (3, 4, 6, 20, 26, 27)

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            preset_config("n99")

    def test_seed_override(self):
        cfg = preset_config("n15", seed=1).with_seed(42)
        assert cfg.seed == 42
        assert cfg.network.seed == 42


class TestIniRoundTrip:
    def test_save_load_identity(self, tmp_path):
        cfg = preset_config("n30", seed=13)
        path = tmp_path / "exp.ini"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_partial_overlay_keeps_defaults(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[mpc]\nhorizon = 5\n")
        cfg = load_config(path)
        base = default_config()
        assert cfg.mpc.horizon == 5
        assert cfg.network == base.network
        assert cfg.model == base.model

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[mpc]\nhorizont = 5\n")
        with pytest.raises(FileFormatError, match="unknown key"):
            load_config(path)

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[plotting]\ncolor = red\n")
        with pytest.raises(FileFormatError, match="unknown section"):
            load_config(path)

    def test_invalid_probability_rejected_with_context(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[network]\np_within = 1.5\n")
        with pytest.raises(ConfigurationError, match="p_within"):
            load_config(path)

    def test_bad_value_type_reported(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[mpc]\nhorizon = ten\n")
        with pytest.raises(FileFormatError, match="horizon"):
            load_config(path)

    def test_optional_fields_round_trip(self, tmp_path):
        import dataclasses

        cfg = preset_config("n15")
        cfg = dataclasses.replace(
            cfg,
            optimizer=dataclasses.replace(
                cfg.optimizer, clip_low=-30.0, clip_high=30.0, increments=(2, 5, 10)
            ),
        )
        path = tmp_path / "exp.ini"
        save_config(cfg, path)
        back = load_config(path)
        assert back.optimizer.clip_low == -30.0
        assert back.optimizer.increments == (2, 5, 10)
        assert back == cfg
