"""Centralized application configuration.

Reads from config/.env and exposes strongly-typed properties with sane defaults.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Optional, Tuple

from dotenv import load_dotenv

from harness.generators import GenConfig
from relations.kbag import INT64_MAX, INT64_MIN, Value


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except Exception:
        return default


def parse_value_domain(text: str) -> Tuple[Value, ...]:
    """Parse a comma list such as ``NULL,0,1,a`` into values.

    ``NULL`` is the null literal, 64-bit integers parse as ints, anything
    else is kept as a string. Blank items are skipped.
    """
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if item.upper() == "NULL":
            out.append(None)
            continue
        try:
            n = int(item)
        except ValueError:
            out.append(item)
            continue
        out.append(n if INT64_MIN <= n <= INT64_MAX else item)
    return tuple(out)


class AppConfig:
    """Application configuration loaded from config/.env with defaults.

    - Ensures the log directory exists when accessed.
    """

    def __init__(self) -> None:
        # Load .env from config/.env relative to project root
        root = Path(__file__).resolve().parent
        env_path = root / ".env"
        if env_path.exists():
            load_dotenv(dotenv_path=env_path)
        # Also attempt to load a repository-root .env
        try:
            repo_env = root.parent / ".env"
            if repo_env.exists():
                load_dotenv(dotenv_path=repo_env)
        except Exception:
            pass

    @property
    def log_file_path(self) -> str:
        path = os.getenv("NULLSQL_LOG_FILE", "logs/nullsql.log")
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
        except OSError:
            # AppLogger falls back to stderr
            pass
        return path

    @property
    def seed(self) -> Optional[int]:
        """Seed fallback for randomized commands, None when unset or not an integer."""
        v = os.getenv("NULLSQL_SEED")
        if v is None or v.strip() == "":
            return None
        try:
            return int(v)
        except ValueError:
            return None

    @property
    def trials(self) -> int:
        return _int_env("NULLSQL_TRIALS", 100)

    @property
    def max_rows(self) -> int:
        return _int_env("NULLSQL_MAX_ROWS", 4)

    @property
    def max_query_depth(self) -> int:
        return _int_env("NULLSQL_MAX_DEPTH", 3)

    @property
    def max_tables_per_from(self) -> int:
        return _int_env("NULLSQL_MAX_TABLES", 2)

    @property
    def max_select_width(self) -> int:
        return _int_env("NULLSQL_MAX_WIDTH", 3)

    @property
    def value_domain(self) -> Tuple[Value, ...]:
        return parse_value_domain(os.getenv("NULLSQL_VALUE_DOMAIN", "NULL,0,1,2"))

    @property
    def queries_dir(self) -> Path:
        """Folder holding .sql query files.

        NULLSQL_QUERIES_DIR wins. Otherwise `queries/` under the working
        directory, else the one next to the repository root.
        """
        v = os.getenv("NULLSQL_QUERIES_DIR")
        if v:
            return Path(v)
        cwd = Path.cwd() / "queries"
        if cwd.exists():
            return cwd
        return Path(__file__).resolve().parents[1] / "queries"

    @property
    def shrink_counterexamples(self) -> bool:
        return os.getenv("NULLSQL_SHRINK", "true").strip().lower() not in ("0", "false", "no", "off")

    def gen_config(self, seed: Optional[int] = None, trials: Optional[int] = None) -> GenConfig:
        """Generator bounds from the environment; explicit arguments win."""
        if seed is None:
            seed = self.seed if self.seed is not None else 0
        return GenConfig(
            seed=seed,
            max_rows=max(0, self.max_rows),
            value_domain=self.value_domain,
            max_query_depth=max(0, self.max_query_depth),
            max_tables_per_from=max(0, self.max_tables_per_from),
            max_select_width=max(0, self.max_select_width),
            trials=max(0, self.trials if trials is None else trials),
        )
