"""Tests for Settings, config files and the frozen SketchConfig."""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from hypersketch.core.config import SketchConfig, Settings, load_settings, parse_rational
from hypersketch.core.prf import Prf


class TestParseRational:
    def test_forms(self):
        assert parse_rational("1/3") == Fraction(1, 3)
        assert parse_rational(0.25) == Fraction(1, 4)
        assert parse_rational(" 2 ") == 2

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_rational("half")
        with pytest.raises(ValueError):
            parse_rational(True)


class TestSettings:
    """Environment, config file and override precedence."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("M_MAX", raising=False)
        s = Settings()
        assert s.M_MAX == 256
        assert s.master_seed == bytes(32)

    def test_seed_is_padded_hex(self):
        s = Settings(MASTER_SEED="0xAB")
        assert s.MASTER_SEED == "00" * 31 + "ab"

    def test_bad_seed(self):
        with pytest.raises(ValidationError):
            Settings(MASTER_SEED="xyz")

    def test_epsilon_normalized(self):
        assert Settings(EPSILON="0.25").EPSILON == "1/4"

    def test_file_beats_environment(self, monkeypatch, fixtures_dir):
        monkeypatch.setenv("M_MAX", "999")
        s = load_settings(str(fixtures_dir / "small.env"))
        assert s.M_MAX == 32
        assert s.C_L0 == 1

    def test_overrides_beat_file(self, fixtures_dir):
        s = load_settings(str(fixtures_dir / "small.env"), M_MAX=64, EPSILON=None)
        assert s.M_MAX == 64
        assert s.EPSILON == "1/2"

    def test_environment_used_without_file(self, monkeypatch):
        monkeypatch.setenv("MAX_REPETITIONS", "5")
        assert load_settings().MAX_REPETITIONS == 5

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_settings(str(tmp_path / "nope.env"))

    def test_sketch_config_overrides(self):
        config = Settings(N_VERTICES=10).sketch_config(n=5, r_max=3)
        assert (config.n, config.r_max) == (5, 3)

    def test_prf_from_seed(self):
        s = Settings(MASTER_SEED="01")
        assert s.prf().commitment() == Prf(bytes(31) + b"\x01").commitment()


class TestSketchConfig:
    """Ranges, derived layout and identity."""

    def test_derived_layout(self, small_config):
        assert small_config.log_n == 3
        assert small_config.stages == 5
        assert small_config.fingerprint_levels == 4
        assert small_config.kappa < small_config.recovery_phi * small_config.log_n
        assert small_config.recovery_repetitions == 8

    @pytest.mark.parametrize("field,value", [
        ("n", 1), ("m_max", 0), ("r_max", 1), ("r_max", 7), ("eps", "1"), ("delta", "0"), ("tail_sparsity", 9),
        ("kappa_override", "0"), ("kappa_override", "-2"),
    ])
    def test_out_of_range(self, field, value):
        values = dict(n=6, m_max=16, r_max=3)
        values[field] = value
        with pytest.raises(ValidationError):
            SketchConfig(**values)

    def test_frozen(self, small_config):
        with pytest.raises(ValidationError):
            small_config.n = 7

    def test_hash_tracks_content(self, small_config):
        same = SketchConfig(n=6, m_max=16, r_max=3, c_l0=1, max_repetitions=8)
        assert same.config_hash() == small_config.config_hash()
        assert small_config.model_copy(update={"m_max": 32}).config_hash() != small_config.config_hash()

    def test_json_round_trip(self, small_config):
        assert SketchConfig.from_json(small_config.canonical_json()) == small_config

    def test_kappa_override(self, small_config):
        config = SketchConfig(n=6, m_max=16, r_max=3, kappa_override="12")
        assert config.kappa == Fraction(12)
        assert config.recovery_phi == Fraction(24)
        assert small_config.kappa == 100 * small_config.phi
        assert SketchConfig.from_json(config.canonical_json()) == config

    def test_kappa_setting(self):
        assert Settings(KAPPA="3/2").sketch_config(n=6, r_max=3).kappa == Fraction(3, 2)
        assert Settings(KAPPA=" ").sketch_config(n=6, r_max=3).kappa_override is None
