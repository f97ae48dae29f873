"""Lightweight file logger with [TIMESTAMP] prefix and kv helper.

All writes go to the path configured in NULLSQL_LOG_FILE (config/.env via AppConfig).
"""
from __future__ import annotations

import sys
from datetime import datetime
from pathlib import Path


class AppLogger:
    """Simple file-backed logger used by the command-line front end.

    Each line is prefixed with a local timestamp. With ``echo=True`` every
    line is mirrored to stderr. If the log file cannot be written the logger
    keeps going on stderr alone.
    """

    def __init__(self, log_file_path: str, echo: bool = False) -> None:
        self._log_path = Path(log_file_path)
        self.echo = echo
        self._file_ok = True
        try:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)
        except OSError:
            self._file_ok = False

    @property
    def path(self) -> Path:
        return self._log_path

    def log(self, message: str) -> None:
        """Append a single-line message with a ``YYYY-MM-DD HH:MM:SS`` timestamp."""
        stamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        line = f"[{stamp}] {message}"
        if self._file_ok:
            try:
                with self._log_path.open("a", encoding="utf-8") as f:
                    f.write(line + "\n")
            except OSError:
                self._file_ok = False
                print(f"[{stamp}] LOG_FILE_UNWRITABLE | path={self._log_path}", file=sys.stderr)
                print(line, file=sys.stderr)
                return
        if self.echo or not self._file_ok:
            print(line, file=sys.stderr)

    def log_kv(self, event: str, **fields: object) -> None:
        """Log an event name with structured key/value pairs.

            MY_EVENT | seed=7 trials=100
        """
        parts = [f"{k}={v}" for k, v in fields.items()]
        msg = f"{event} | " + " ".join(parts) if parts else event
        self.log(msg)
