"""Database documents: YAML/JSON/CSV loading, schema files and dumping."""
import sys
import json
import pathlib

PROJECT_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from relations.kbag import from_rows
from store.database import (
    Database,
    DatabaseFormatError,
    dump_database,
    load_csv_table,
    load_database,
    load_schemas,
)

QUERIES = PROJECT_ROOT / "queries"
NOT_UTF8_YAML = b"R:\n  schema: [A]\n  rows: [['\xff']]\n"


def test_load_bundled_yaml():
    db = load_database(QUERIES / "motivating_db.yaml")
    assert sorted(db) == ["R", "S", "T"]
    assert db.schema("T") == ("A", "B")
    assert db.relation("R") == from_rows(1, [[None], [1]])
    assert not db.is_null_free()


def test_dump_then_load_json(tmp_path):
    db = Database.from_rows({"R": (("A", "B"), [[2, "x"], [None, 1], [2, "x"]])})
    text = dump_database(db)
    assert json.loads(text) == {"R": {"schema": ["A", "B"], "rows": [[None, 1], [2, "x"], [2, "x"]]}}
    path = tmp_path / "db.json"
    path.write_text(text, encoding="utf-8")
    assert load_database(path) == db


def test_bad_documents(tmp_path):
    cases = {
        "list.yaml": "- 1\n- 2\n",
        "noschema.yaml": "R:\n  rows: [[1]]\n",
        "dupattr.yaml": "R:\n  schema: [A, A]\n  rows: []\n",
        "arity.yaml": "R:\n  schema: [A]\n  rows: [[1, 2]]\n",
        "range.yaml": "R:\n  schema: [A]\n  rows: [[9223372036854775808]]\n",
        "syntax.json": "{not json",
    }
    for name, text in cases.items():
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        with pytest.raises(DatabaseFormatError):
            load_database(path)
    with pytest.raises(DatabaseFormatError):
        load_database(tmp_path / "missing.yaml")


def test_undecodable_files_are_format_errors(tmp_path):
    yaml_path = tmp_path / "db.yaml"
    yaml_path.write_bytes(NOT_UTF8_YAML)
    with pytest.raises(DatabaseFormatError):
        load_database(yaml_path)
    with pytest.raises(DatabaseFormatError):
        load_schemas(yaml_path)
    csv_path = tmp_path / "R.csv"
    csv_path.write_bytes(b"A\n\xff\n")
    with pytest.raises(DatabaseFormatError):
        load_csv_table(csv_path)


def test_csv_table_and_folder(tmp_path):
    (tmp_path / "R.csv").write_text('A,B\n1,NULL\n"NULL",x\n', encoding="utf-8")
    schema, rel = load_csv_table(tmp_path / "R.csv")
    assert schema == ("A", "B")
    assert rel == from_rows(2, [[1, None], ["NULL", "x"]])
    (tmp_path / "S.csv").write_text("C\n3\n", encoding="utf-8")
    db = load_database(tmp_path)
    assert sorted(db) == ["R", "S"]
    assert load_database(tmp_path / "S.csv").schema("S") == ("C",)


def test_csv_row_width_mismatch(tmp_path):
    (tmp_path / "R.csv").write_text("A,B\n1\n", encoding="utf-8")
    with pytest.raises(DatabaseFormatError):
        load_csv_table(tmp_path / "R.csv")


def test_schema_files(tmp_path):
    assert load_schemas(QUERIES / "motivating_db.yaml") == {"R": ("A",), "S": ("A",), "T": ("A", "B")}
    plain = tmp_path / "schemas.yaml"
    plain.write_text("R: [A, B]\nS: [C]\n", encoding="utf-8")
    assert load_schemas(plain) == {"R": ("A", "B"), "S": ("C",)}


def main() -> int:
    from tests.script_runner import run_module_tests

    return run_module_tests(globals(), "Database documents")


if __name__ == "__main__":
    try:
        rc = main()
        sys.exit(rc)
    except Exception as e:
        print("Unexpected error during test run:", repr(e))
        sys.exit(4)
