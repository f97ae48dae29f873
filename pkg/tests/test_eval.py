"""Staged evaluation: golden results, logic agreement and weakening."""
import sys
import pathlib

PROJECT_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from harness.equivalence import check_logic_agreement
from harness.generators import (
    DEFAULT_SCHEMAS,
    GenConfig,
    gen_context,
    gen_database,
    gen_env,
    gen_query,
    gen_query_with_schema,
    gen_term,
    rng_for,
)
from relations.kbag import RONE, Relation, from_rows
from semantics.evaluator import check_env, env_of_tuple, eval_query, eval_tables, eval_term, run_query, subenv
from semantics.logic import THREE_VALUED, TWO_VALUED
from store.database import load_database
from syntax.ast import (
    And,
    ExceptQuery,
    Exists,
    IntersectQuery,
    Memb,
    Not,
    Or,
    Select,
    SelectStar,
    SubQuery,
    UnionQuery,
    tm_lift,
)
from syntax.parser import parse_query
from syntax.wf import WfError, wf_term

QUERIES = PROJECT_ROOT / "queries"
DB = load_database(QUERIES / "motivating_db.yaml")


def _run(name, logic=THREE_VALUED):
    text = (QUERIES / name).read_text(encoding="utf-8")
    return run_query(DB, parse_query(text), logic)


def test_not_in_not_exists_except_disagree():
    assert _run("not_in.sql").card() == 0
    assert _run("not_exists.sql") == from_rows(1, [[None], [1]])
    assert _run("except.sql") == from_rows(1, [[1]])


def test_two_valued_not_in_keeps_both_rows():
    assert _run("not_in.sql", TWO_VALUED) == from_rows(1, [[None], [1]])


def test_tautologies_drop_rows_with_nulls():
    assert _run("taut_const.sql").card() == 5
    assert _run("taut_refl.sql") == from_rows(2, [[0, 2], [1, 1], [1, None]])
    assert _run("taut_cmp.sql") == from_rows(2, [[0, 2], [1, 1]])


def test_shuffled_from_gives_same_result():
    assert _run("shuffle_left.sql") == _run("shuffle_right.sql")
    assert _run("shuffle_left.sql").card() == 10


def test_correlated_exists():
    q = parse_query(
        "SELECT 0.A AS A FROM table R AS (A) WHERE EXISTS (SELECT * FROM table T AS (A, B) WHERE 0.A = 1.A)"
    )
    for logic in (TWO_VALUED, THREE_VALUED):
        assert run_query(DB, q, logic) == from_rows(1, [[1]])


def test_bag_semantics_and_distinct():
    q = parse_query("SELECT 0.A AS A FROM table T AS (A, B) WHERE TRUE")
    assert run_query(DB, q, THREE_VALUED).memb((1,)) == 2
    distinct = parse_query("SELECT DISTINCT 0.A AS A FROM table T AS (A, B) WHERE TRUE")
    assert run_query(DB, distinct, THREE_VALUED) == from_rows(1, [[None], [0], [1]])


def test_set_operations():
    u = parse_query("SELECT * FROM table R AS (A) WHERE TRUE UNION ALL SELECT * FROM table S AS (A) WHERE TRUE")
    assert run_query(DB, u, THREE_VALUED) == from_rows(1, [[None], [None], [1]])
    i = parse_query("SELECT * FROM table R AS (A) WHERE TRUE INTERSECT SELECT * FROM table S AS (A) WHERE TRUE")
    assert run_query(DB, i, THREE_VALUED) == from_rows(1, [[None]])


def test_plan_carries_schema():
    plan = eval_query((), DB, parse_query("SELECT 0.B AS X FROM table T AS (A, B) WHERE TRUE"), THREE_VALUED)
    assert plan.schema == ("X",)
    assert plan.kind == "query"


def test_empty_from_is_one_row():
    assert eval_tables((), DB, (), THREE_VALUED).run(()) == RONE


def test_ill_formed_query_is_rejected_before_running():
    with pytest.raises(WfError):
        run_query(DB, parse_query("SELECT 1.A AS A FROM table R AS (A) WHERE TRUE"), THREE_VALUED)


def test_environment_helpers():
    assert env_of_tuple((("A",), ("B", "C")), (1, 2, 3)) == ((1,), (2, 3))
    assert subenv(((1,), (2, 3)), 1) == ((2, 3),)
    with pytest.raises(ValueError):
        check_env((("A",),), [(1, 2)])


def test_deterministic():
    q = parse_query((QUERIES / "not_exists.sql").read_text(encoding="utf-8"))
    first = run_query(DB, q, THREE_VALUED)
    assert all(run_query(DB, q, THREE_VALUED) == first for _ in range(5))


def test_null_free_agreement():
    cfg = GenConfig(seed=3, value_domain=(0, 1, 2))
    assert check_logic_agreement(cfg, DEFAULT_SCHEMAS, 300) == []


def test_weakening_with_outer_scopes():
    cfg = GenConfig(seed=4, max_query_depth=2)
    for trial in range(1000):
        rng = rng_for(cfg, "weakening", trial)
        db = gen_database(cfg, DEFAULT_SCHEMAS, rng)
        gamma = gen_context(cfg, rng, max_scopes=2)
        extra = gen_context(cfg, rng, max_scopes=2)
        env = gen_env(cfg, gamma, rng)
        extra_env = gen_env(cfg, extra, rng)
        q = gen_query_with_schema(cfg, DEFAULT_SCHEMAS, ("A",), rng, gamma=gamma)
        logic = THREE_VALUED if trial % 2 else TWO_VALUED
        narrow = run_query(db, q, logic, gamma, env)
        wide = run_query(db, q, logic, tuple(gamma) + tuple(extra), tuple(env) + tuple(extra_env))
        assert narrow == wide


def test_weakening_lifts_terms():
    cfg = GenConfig(seed=8)
    for trial in range(1000):
        rng = rng_for(cfg, "lift", trial)
        gamma = gen_context(cfg, rng)
        inner = gen_context(cfg, rng, max_scopes=2)
        t = gen_term(cfg, DEFAULT_SCHEMAS, gamma, rng)
        k = len(inner)
        wide = tuple(inner) + tuple(gamma)
        env = gen_env(cfg, inner, rng) + gen_env(cfg, gamma, rng)

        lifted = tm_lift(t, k)
        wf_term(wide, lifted)
        assert eval_term(wide, lifted).run(env) == eval_term(gamma, t).run(subenv(env, k))

        a = rng.randint(0, 3)
        assert tm_lift(tm_lift(t, a), k) == tm_lift(t, a + k)


def _monotone_cond(c):
    if isinstance(c, Not) or (isinstance(c, Memb) and not c.is_in):
        return False
    if isinstance(c, (And, Or)):
        return _monotone_cond(c.left) and _monotone_cond(c.right)
    if isinstance(c, (Exists, Memb)):
        return _monotone(c.query)
    return True


def _monotone(q):
    """True when ``q`` has no negation: no NOT, NOT IN or EXCEPT anywhere."""
    if isinstance(q, ExceptQuery):
        return False
    if isinstance(q, (UnionQuery, IntersectQuery)):
        return _monotone(q.left) and _monotone(q.right)
    subqueries = [table.query for table, _ in q.from_ if isinstance(table, SubQuery)]
    return all(_monotone(sub) for sub in subqueries) and _monotone_cond(q.where)


def test_adding_rows_never_shrinks_negation_free_queries():
    cfg = GenConfig(seed=9)
    checked = 0
    for trial in range(600):
        rng = rng_for(cfg, "monotone", trial)
        q = gen_query(cfg, DEFAULT_SCHEMAS, rng)
        if not isinstance(q, (Select, SelectStar)) or not _monotone(q):
            continue
        db = gen_database(cfg, DEFAULT_SCHEMAS, rng)
        name = rng.choice(sorted(DEFAULT_SCHEMAS))
        schema = db.schema(name)
        row = tuple(rng.choice(cfg.value_domain) for _ in schema)
        bigger = db.with_table(name, schema, db.relation(name).plus(Relation(len(schema), [row])))
        for logic in (TWO_VALUED, THREE_VALUED):
            assert run_query(bigger, q, logic).card() >= run_query(db, q, logic).card()
        checked += 1
    assert checked > 20


def main() -> int:
    from tests.script_runner import run_module_tests

    return run_module_tests(globals(), "Evaluator")


if __name__ == "__main__":
    try:
        rc = main()
        sys.exit(rc)
    except Exception as e:
        print("Unexpected error during test run:", repr(e))
        sys.exit(4)
