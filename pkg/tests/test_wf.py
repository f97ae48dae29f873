"""Well-formedness judgments and their error kinds."""
import sys
import pathlib

PROJECT_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from harness.generators import (
    DEFAULT_SCHEMAS,
    GenConfig,
    gen_context,
    gen_database,
    gen_query,
    gen_query_with_schema,
    rng_for,
)
from store.database import Database
from syntax.ast import register_predicate, unregister_predicate
from syntax.parser import parse_cond, parse_query
from syntax.wf import WfError, WfErrorKind, check_query, query_schema, wf_cond, wf_inquery, wf_query, wf_var

DB = Database.from_rows({"R": (("A", "B"), [[1, 2]]), "S": (("A",), [])})


def _kind(text, gamma=()):
    with pytest.raises(WfError) as info:
        wf_query(gamma, DB, parse_query(text))
    return info.value.kind


def test_wf_var():
    wf_var(("A", "B"), "A")
    with pytest.raises(WfError) as info:
        wf_var(("A", "A"), "A")
    assert info.value.kind is WfErrorKind.AMBIGUOUS_ATTR
    with pytest.raises(WfError) as info:
        wf_var(("A",), "B")
    assert info.value.kind is WfErrorKind.UNKNOWN_ATTR


def test_schema_of_select_and_star():
    assert wf_query((), DB, parse_query("SELECT 0.B AS X, 0.A AS Y FROM table R AS (A, B) WHERE TRUE")) == ("X", "Y")
    star = parse_query("SELECT * FROM table R AS (C, D), table S AS (E) WHERE 0.C = 1.E")
    assert query_schema((), DB, star) == ("C", "D", "E")


def test_duplicate_output_names_accepted():
    q = parse_query("SELECT 0.A AS X, 0.B AS X FROM table R AS (A, B) WHERE TRUE")
    assert wf_query((), DB, q) == ("X", "X")


def test_star_over_ambiguous_subquery_rejected():
    text = (
        "SELECT * FROM query (SELECT 0.A AS A, 0.B AS A FROM table R AS (A, B) WHERE TRUE) AS (A, A) WHERE TRUE"
    )
    assert _kind(text) is WfErrorKind.DUP_ALIAS
    text = "SELECT * FROM table R AS (A, B), table S AS (A) WHERE TRUE"
    assert _kind(text) is WfErrorKind.AMBIGUOUS_STAR


def test_star_under_exists_is_relaxed():
    c = parse_cond("EXISTS (SELECT * FROM table R AS (A, B), table S AS (A) WHERE TRUE)")
    wf_cond((), DB, c)


def test_star_under_in_is_not_relaxed():
    c = parse_cond("0.A IN (SELECT * FROM table R AS (A, B), table S AS (A) WHERE TRUE)")
    with pytest.raises(WfError) as info:
        wf_cond((("A",),), DB, c)
    assert info.value.kind is WfErrorKind.AMBIGUOUS_STAR


def test_unbound_index():
    assert _kind("SELECT 1.A AS A FROM table S AS (A) WHERE TRUE") is WfErrorKind.UNBOUND_INDEX


def test_correlated_index_resolves_to_outer_scope():
    q = parse_query("SELECT 1.Z AS Z FROM table S AS (A) WHERE TRUE")
    assert wf_query((("Z",),), DB, q) == ("Z",)


def test_unknown_attr_and_table():
    assert _kind("SELECT 0.C AS C FROM table S AS (A) WHERE TRUE") is WfErrorKind.UNKNOWN_ATTR
    assert _kind("SELECT * FROM table T AS (A) WHERE TRUE") is WfErrorKind.UNKNOWN_TABLE


def test_alias_length_mismatch():
    assert _kind("SELECT * FROM table R AS (A) WHERE TRUE") is WfErrorKind.SCHEMA_LEN_MISMATCH


def test_set_op_schema_mismatch():
    text = "SELECT * FROM table S AS (A) WHERE TRUE UNION SELECT * FROM table S AS (B) WHERE TRUE"
    assert _kind(text) is WfErrorKind.SET_OP_SCHEMA_MISMATCH


def test_in_arity_mismatch():
    text = "SELECT * FROM table S AS (A) WHERE (0.A, 1) IN (SELECT * FROM table S AS (A) WHERE TRUE)"
    assert _kind(text) is WfErrorKind.IN_ARITY_MISMATCH


def test_predicates():
    assert _kind("SELECT * FROM table S AS (A) WHERE between(0.A, 1, 2)") is WfErrorKind.UNKNOWN_PREDICATE
    register_predicate("between", 3, lambda x, lo, hi: lo <= x <= hi)
    try:
        wf_query((), DB, parse_query("SELECT * FROM table S AS (A) WHERE between(0.A, 1, 2)"))
        assert _kind("SELECT * FROM table S AS (A) WHERE between(0.A, 1)") is WfErrorKind.PRED_ARITY_MISMATCH
    finally:
        unregister_predicate("between")


def test_error_format_has_position():
    text = "SELECT * FROM table S AS (A)\nWHERE 0.B IS NULL"
    with pytest.raises(WfError) as info:
        wf_query((), DB, parse_query(text))
    assert info.value.format(text) == "UnknownAttr at 2:7: attribute B not in (A)"


def test_check_query_tuple_form():
    schema, err = check_query((), DB, parse_query("SELECT * FROM table S AS (A) WHERE TRUE"))
    assert schema == ("A",) and err is None
    schema, err = check_query((), DB, parse_query("SELECT * FROM table Nope AS (A) WHERE TRUE"))
    assert schema is None and err.kind is WfErrorKind.UNKNOWN_TABLE


def test_generated_queries_are_well_formed():
    cfg = GenConfig(seed=5)
    for trial in range(10000):
        rng = rng_for(cfg, "wf", trial)
        db = gen_database(cfg, DEFAULT_SCHEMAS, rng)
        schema, err = check_query((), db, gen_query(cfg, DEFAULT_SCHEMAS, rng))
        assert err is None, err


def test_queries_accepted_at_top_level_are_accepted_under_exists():
    cfg = GenConfig(seed=6)
    for trial in range(2000):
        rng = rng_for(cfg, "inquery", trial)
        db = gen_database(cfg, DEFAULT_SCHEMAS, rng)
        if trial % 2:
            gamma = gen_context(cfg, rng, max_scopes=2)
            q = gen_query_with_schema(cfg, DEFAULT_SCHEMAS, ("A", "B"), rng, gamma=gamma)
        else:
            gamma, q = (), gen_query(cfg, DEFAULT_SCHEMAS, rng)
        schema, err = check_query(gamma, db, q)
        if err is None:
            wf_inquery(gamma, db, q)
    narrow = parse_query("SELECT * FROM table R AS (A, B), table S AS (C) WHERE 0.A = 1.C")
    wf_query((), DB, narrow)
    wf_inquery((), DB, narrow)


def main() -> int:
    from tests.script_runner import run_module_tests

    return run_module_tests(globals(), "Well-formedness")


if __name__ == "__main__":
    try:
        rc = main()
        sys.exit(rc)
    except Exception as e:
        print("Unexpected error during test run:", repr(e))
        sys.exit(4)
