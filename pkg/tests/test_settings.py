"""Configuration, logging and query-file lookup."""
import sys
import pathlib

PROJECT_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from config.settings import AppConfig, parse_value_domain
from utils.logger import AppLogger
from utils.query_loader import list_queries, load_query_text, resolve_query_path


def test_parse_value_domain():
    assert parse_value_domain("NULL, 0,1 ,a,,") == (None, 0, 1, "a")
    assert parse_value_domain("null,-3") == (None, -3)
    assert parse_value_domain("99999999999999999999") == ("99999999999999999999",)


def test_defaults(monkeypatch):
    for name in ("NULLSQL_SEED", "NULLSQL_TRIALS", "NULLSQL_MAX_ROWS", "NULLSQL_VALUE_DOMAIN", "NULLSQL_SHRINK"):
        monkeypatch.delenv(name, raising=False)
    cfg = AppConfig()
    assert cfg.seed is None
    assert cfg.trials == 100
    assert cfg.max_rows == 4
    assert cfg.value_domain == (None, 0, 1, 2)
    assert cfg.shrink_counterexamples is True


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("NULLSQL_SEED", "42")
    monkeypatch.setenv("NULLSQL_TRIALS", "7")
    monkeypatch.setenv("NULLSQL_MAX_DEPTH", "1")
    monkeypatch.setenv("NULLSQL_VALUE_DOMAIN", "0,1")
    monkeypatch.setenv("NULLSQL_SHRINK", "off")
    cfg = AppConfig()
    gen = cfg.gen_config()
    assert gen.seed == 42 and gen.trials == 7
    assert gen.max_query_depth == 1
    assert gen.value_domain == (0, 1)
    assert cfg.shrink_counterexamples is False
    assert cfg.gen_config(seed=3, trials=2).seed == 3


def test_bad_numbers_fall_back(monkeypatch):
    monkeypatch.setenv("NULLSQL_SEED", "abc")
    monkeypatch.setenv("NULLSQL_TRIALS", "many")
    cfg = AppConfig()
    assert cfg.seed is None
    assert cfg.trials == 100
    assert cfg.gen_config().seed == 0


def test_logger_writes_timestamped_lines(tmp_path):
    logger = AppLogger(str(tmp_path / "logs" / "run.log"))
    logger.log_kv("RUN_DONE", logic="3vl", rows=2)
    logger.log("plain")
    lines = (tmp_path / "logs" / "run.log").read_text(encoding="utf-8").splitlines()
    assert lines[0].endswith("] RUN_DONE | logic=3vl rows=2")
    assert lines[0].startswith("[") and len(lines[0].split("]")[0]) == len("[YYYY-MM-DD HH:MM:SS")
    assert lines[1].endswith("] plain")


def test_logger_echo_and_fallback(tmp_path, capsys):
    echo = AppLogger(str(tmp_path / "echo.log"), echo=True)
    echo.log_kv("CLI_START")
    assert "CLI_START" in capsys.readouterr().err
    blocked = tmp_path / "dir_not_file"
    blocked.mkdir()
    fallback = AppLogger(str(blocked))
    fallback.log("still visible")
    err = capsys.readouterr().err
    assert "LOG_FILE_UNWRITABLE" in err and "still visible" in err


def test_query_loader(tmp_path, monkeypatch):
    (tmp_path / "mine.sql").write_text("SELECT * FROM table R AS (A) WHERE TRUE", encoding="utf-8")
    monkeypatch.setenv("NULLSQL_QUERIES_DIR", str(tmp_path))
    cfg = AppConfig()
    assert resolve_query_path("mine", cfg) == tmp_path / "mine.sql"
    assert resolve_query_path("mine.sql", cfg) == tmp_path / "mine.sql"
    assert load_query_text("mine", cfg).startswith("SELECT")
    assert list_queries(cfg) == ["mine"]
    with pytest.raises(FileNotFoundError):
        resolve_query_path("absent", cfg)


def test_bundled_queries_are_listed(monkeypatch):
    monkeypatch.setenv("NULLSQL_QUERIES_DIR", str(PROJECT_ROOT / "queries"))
    names = list_queries(AppConfig())
    assert {"not_in", "not_exists", "except"} <= set(names)


def main() -> int:
    from tests.script_runner import run_module_tests

    return run_module_tests(globals(), "Configuration and logging")


if __name__ == "__main__":
    try:
        rc = main()
        sys.exit(rc)
    except Exception as e:
        print("Unexpected error during test run:", repr(e))
        sys.exit(4)
