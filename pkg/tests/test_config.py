import logging

import pytest

from src.config import RatlinConfig, configure_logging, load_config
from src.errors import FormatError


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("RATLIN_LOG_LEVEL", "RATLIN_LOG_FILE", "RATLIN_GRADE_SEARCH_BOUND", "RATLIN_VERIFY_BUILDS"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    config = load_config()
    assert config == RatlinConfig()
    assert config.log_level == "WARNING"
    assert config.grade_search_bound is None
    assert config.verify_builds and config.report_witness


def test_yaml_sections(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "logging:\n  level: debug\n  console: false\n"
        "analysis:\n  grade_search_bound: 3\n  verify_builds: false\n"
        "output:\n  report_witness: false\n"
    )
    config = load_config(str(path))
    assert config.log_level == "DEBUG"
    assert not config.log_console
    assert config.grade_search_bound == 3
    assert not config.verify_builds
    assert not config.report_witness


def test_environment_wins_over_file(tmp_path, monkeypatch):
    path = tmp_path / "config.yaml"
    path.write_text("analysis:\n  grade_search_bound: 3\n")
    monkeypatch.setenv("RATLIN_GRADE_SEARCH_BOUND", "5")
    monkeypatch.setenv("RATLIN_VERIFY_BUILDS", "no")
    monkeypatch.setenv("RATLIN_LOG_LEVEL", "info")
    config = load_config(str(path))
    assert config.grade_search_bound == 5
    assert not config.verify_builds
    assert config.log_level == "INFO"


def test_empty_file_keeps_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config(str(path)) == RatlinConfig()


@pytest.mark.parametrize("text", ["logging: [unclosed\n", "- just\n- a list\n"])
def test_invalid_files(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(FormatError):
        load_config(str(path))


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        load_config(str(tmp_path / "absent.yaml"))


def test_logging_to_file(tmp_path):
    log_file = tmp_path / "ratlin.log"
    configure_logging(RatlinConfig(log_level="INFO", log_file=str(log_file), log_console=False))
    logging.getLogger("src.test").info("configured")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "configured" in log_file.read_text()
    configure_logging(RatlinConfig())
