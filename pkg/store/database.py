"""Database values and their on-disk documents.

A :class:`Database` maps table names to ``(schema, relation)``. On disk a
database is a structured document (YAML or JSON; JSON documents are read
with :mod:`json`, everything else with PyYAML)::

    R:
      schema: [A]
      rows: [[1], [null]]
    S:
      schema: [A]
      rows: [[null]]

A cell is an integer, a string or the null literal (``null`` / ``NULL`` in
YAML, ``null`` in JSON). Booleans and floats are rejected.

An optional CSV importer reads one table per file: the header row is the
schema, an unquoted ``NULL`` cell is null, a quoted ``"NULL"`` is the string.
"""
from __future__ import annotations

import json
import logging
import re
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import yaml

from relations.kbag import Relation, Row, Value, is_value
from syntax.ast import Name, Schema

logger = logging.getLogger(__name__)


class DatabaseFormatError(ValueError):
    """A database, schema or CSV document is malformed."""


class Database:
    """Immutable mapping of table names to (schema, relation)."""

    def __init__(self, tables: Optional[Mapping[Name, Tuple[Sequence[Name], Relation]]] = None) -> None:
        self._tables: Dict[Name, Tuple[Schema, Relation]] = {}
        for name, (schema, rel) in (tables or {}).items():
            schema = tuple(schema)
            if len(schema) != rel.arity:
                raise DatabaseFormatError(
                    f"Table {name}: schema {schema} has {len(schema)} attributes but relation arity is {rel.arity}"
                )
            self._tables[name] = (schema, rel)

    @classmethod
    def from_rows(cls, tables: Mapping[Name, Tuple[Sequence[Name], Sequence[Sequence[Value]]]]) -> "Database":
        """Build from plain ``name -> (schema, rows)`` data."""
        return cls({name: (tuple(s), Relation(len(s), rows)) for name, (s, rows) in tables.items()})

    def __contains__(self, name: object) -> bool:
        return name in self._tables

    def __iter__(self) -> Iterator[Name]:
        return iter(sorted(self._tables))

    def __len__(self) -> int:
        return len(self._tables)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Database):
            return NotImplemented
        return self._tables == other._tables

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}{s}: {list(r.rows)}" for n, (s, r) in sorted(self._tables.items()))
        return f"Database({inner})"

    def schema(self, name: Name) -> Optional[Schema]:
        entry = self._tables.get(name)
        return entry[0] if entry else None

    def relation(self, name: Name) -> Relation:
        return self._tables[name][1]

    def rows(self, name: Name) -> List[Row]:
        """Plain row list (canonical order) for consumers that avoid relation operations."""
        return list(self._tables[name][1].rows)

    def schemas(self) -> Dict[Name, Schema]:
        return {name: schema for name, (schema, _) in self._tables.items()}

    def items(self) -> List[Tuple[Name, Schema, Relation]]:
        return [(n, s, r) for n, (s, r) in sorted(self._tables.items())]

    def with_table(self, name: Name, schema: Sequence[Name], rel: Relation) -> "Database":
        tables = dict(self._tables)
        tables[name] = (tuple(schema), rel)
        return Database(tables)

    def is_null_free(self) -> bool:
        return all(v is not None for _, _, rel in self.items() for row in rel.rows for v in row)


# ---- documents ----


def _check_schema(name: str, schema: object) -> Schema:
    if not isinstance(schema, list) or not all(isinstance(a, str) and a for a in schema):
        raise DatabaseFormatError(f"Table {name}: schema must be a list of non-empty names")
    if len(set(schema)) != len(schema):
        raise DatabaseFormatError(f"Table {name}: schema has duplicate attribute names {schema}")
    return tuple(schema)


def database_from_document(doc: object) -> Database:
    """Validate a parsed document and build the database it describes."""
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise DatabaseFormatError("Database document must be a mapping of table names")
    tables: Dict[Name, Tuple[Schema, Relation]] = {}
    for name, entry in doc.items():
        if not isinstance(name, str) or not name:
            raise DatabaseFormatError(f"Invalid table name: {name!r}")
        if not isinstance(entry, dict) or "schema" not in entry:
            raise DatabaseFormatError(f"Table {name}: expected an object with 'schema' and 'rows'")
        schema = _check_schema(name, entry["schema"])
        raw_rows = entry.get("rows") or []
        if not isinstance(raw_rows, list):
            raise DatabaseFormatError(f"Table {name}: rows must be a list")
        rows = []
        for i, row in enumerate(raw_rows):
            if not isinstance(row, list) or len(row) != len(schema):
                raise DatabaseFormatError(
                    f"Table {name}: row {i} must be a list of {len(schema)} cells, got {row!r}"
                )
            for cell in row:
                if not is_value(cell):
                    raise DatabaseFormatError(f"Table {name}: row {i} has invalid cell {cell!r}")
            rows.append(tuple(row))
        tables[name] = (schema, Relation(len(schema), rows))
    return Database(tables)


def database_to_document(db: Database) -> Dict[str, dict]:
    return {
        name: {"schema": list(schema), "rows": [list(row) for row in rel.rows]}
        for name, schema, rel in db.items()
    }


def dump_database(db: Database) -> str:
    """JSON text of ``db``; rows in canonical order so output is byte-stable."""
    return json.dumps(database_to_document(db), indent=2, ensure_ascii=False)


def _read_document(path: Path) -> object:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as ex:
        raise DatabaseFormatError(f"Cannot read {path}: {ex}") from ex
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as ex:
        raise DatabaseFormatError(f"Cannot parse {path}: {ex}") from ex


def load_database(path: str | Path) -> Database:
    """Load a database document, a single CSV table, or a directory of CSV tables."""
    p = Path(path)
    logger.debug("Loading database from %s", p)
    if p.is_dir():
        tables = {}
        for csv_path in sorted(p.glob("*.csv")):
            schema, rel = load_csv_table(csv_path)
            tables[csv_path.stem] = (schema, rel)
        return Database(tables)
    if p.suffix.lower() == ".csv":
        schema, rel = load_csv_table(p)
        return Database({p.stem: (schema, rel)})
    return database_from_document(_read_document(p))


def load_schemas(path: str | Path) -> Dict[Name, Schema]:
    """Read table schemas from a database document or a ``name -> [attrs]`` mapping."""
    p = Path(path)
    doc = _read_document(p)
    if not isinstance(doc, dict):
        raise DatabaseFormatError("Schema document must be a mapping of table names")
    schemas: Dict[Name, Schema] = {}
    for name, entry in doc.items():
        if isinstance(entry, dict):
            entry = entry.get("schema")
        schemas[str(name)] = _check_schema(str(name), entry)
    return schemas


# ---- CSV import ----

_CSV_CELL = re.compile(r'\s*(?:"(?P<quoted>(?:[^"]|"")*)"|(?P<bare>[^,"]*?))\s*(?:,|$)')
_CSV_INT = re.compile(r"-?\d+\Z")


def _split_csv_line(line: str, lineno: int) -> List[Tuple[str, bool]]:
    cells: List[Tuple[str, bool]] = []
    pos = 0
    while True:
        m = _CSV_CELL.match(line, pos)
        if m is None:
            raise DatabaseFormatError(f"CSV line {lineno}: malformed cell at column {pos + 1}")
        if m.group("quoted") is not None:
            cells.append((m.group("quoted").replace('""', '"'), True))
        else:
            cells.append((m.group("bare"), False))
        if not m.group(0).endswith(","):
            return cells
        pos = m.end()


def _csv_value(cell: str, quoted: bool) -> Value:
    if quoted:
        return cell
    if cell.upper() == "NULL":
        return None
    if _CSV_INT.match(cell):
        value = int(cell)
        if not is_value(value):
            raise DatabaseFormatError(f"CSV integer out of signed 64-bit range: {cell}")
        return value
    return cell


def load_csv_table(path: str | Path) -> Tuple[Schema, Relation]:
    """Read one table: header = schema, unquoted NULL = null, quoted "NULL" = string."""
    p = Path(path)
    try:
        lines = p.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as ex:
        raise DatabaseFormatError(f"Cannot read {p}: {ex}") from ex
    lines = [(i + 1, line) for i, line in enumerate(lines) if line.strip()]
    if not lines:
        raise DatabaseFormatError(f"CSV file {p} has no header row")
    header_no, header = lines[0]
    schema = _check_schema(p.stem, [cell for cell, _ in _split_csv_line(header, header_no)])
    rows = []
    for lineno, line in lines[1:]:
        cells = _split_csv_line(line, lineno)
        if len(cells) != len(schema):
            raise DatabaseFormatError(
                f"CSV line {lineno}: expected {len(schema)} cells, got {len(cells)}"
            )
        rows.append(tuple(_csv_value(cell, quoted) for cell, quoted in cells))
    return schema, Relation(len(schema), rows)


__all__ = [
    "Database",
    "DatabaseFormatError",
    "database_from_document",
    "database_to_document",
    "dump_database",
    "load_database",
    "load_schemas",
    "load_csv_table",
]
