"""Query file loader.

Query texts live as ``.sql`` files in the `queries/` folder. Callers pass
either a path to an existing file or a bare name resolved inside that
folder, with or without the ``.sql`` suffix.

Examples
--------
from utils.query_loader import load_query_text

text = load_query_text("not_in")   # queries/not_in.sql
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional

from config.settings import AppConfig

logger = logging.getLogger(__name__)


def _resolve_queries_dir(cfg: Optional[AppConfig] = None) -> Path:
    return (cfg or AppConfig()).queries_dir


def resolve_query_path(name_or_path: str, cfg: Optional[AppConfig] = None) -> Path:
    """Return the file for ``name_or_path``: the path itself if it exists, else `queries/<name>[.sql]`."""
    direct = Path(name_or_path)
    if direct.is_file():
        return direct
    queries_dir = _resolve_queries_dir(cfg)
    for candidate in (queries_dir / name_or_path, queries_dir / f"{name_or_path}.sql"):
        if candidate.is_file():
            logger.debug("Resolved query %s to %s", name_or_path, candidate)
            return candidate
    raise FileNotFoundError(
        f"Query file not found: {name_or_path!s}. Pass a path or the name of a .sql file in {queries_dir!s}."
    )


def load_query_text(name_or_path: str, cfg: Optional[AppConfig] = None) -> str:
    return resolve_query_path(name_or_path, cfg).read_text(encoding="utf8")


def list_queries(cfg: Optional[AppConfig] = None) -> List[str]:
    """Names (without suffix) of the .sql files in the queries folder."""
    queries_dir = _resolve_queries_dir(cfg)
    if not queries_dir.is_dir():
        return []
    return sorted(p.stem for p in queries_dir.glob("*.sql"))


__all__ = ["resolve_query_path", "load_query_text", "list_queries"]
