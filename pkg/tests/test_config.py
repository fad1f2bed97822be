import pytest

from jcells import config
from jcells.config import Settings, get_settings, load_config


def test_defaults_file_matches_dataclass_defaults():
    assert get_settings() == Settings()


def test_environment_override(monkeypatch):
    monkeypatch.setenv("JCELLS_RANK_BUDGET", "2")
    assert get_settings().rank_budget == 2
    assert get_settings().product_depth == 2


def test_non_integer_override_is_rejected(monkeypatch):
    monkeypatch.setenv("JCELLS_DIVIDES_POWER_BOUND", "many")
    with pytest.raises(ValueError, match="Expected an integer"):
        load_config()


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="JCELLS_CONFIG"):
        load_config(str(tmp_path / "absent.yaml"))


def test_invalid_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("fingroup: [unclosed\n")
    with pytest.raises(ValueError, match="Invalid YAML"):
        load_config(str(path))


def test_partial_config_falls_back(tmp_path, monkeypatch):
    path = tmp_path / "small.yaml"
    path.write_text("adjquot:\n  max_lattice_order: 12\n")
    monkeypatch.setattr(config, "CONFIG_PATH", str(path))
    settings = get_settings()
    assert settings.max_lattice_order == 12
    assert settings.max_character_table_order == 64
