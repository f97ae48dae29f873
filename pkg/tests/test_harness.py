"""Random generation, the brute-force oracle and the equivalence checker."""
import sys
import pathlib
from collections import Counter

PROJECT_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from harness.equivalence import (
    Counterexample,
    Equivalent,
    SchemaMismatchError,
    check_equiv,
    check_oracle,
    check_rewrites,
    oracle_eval,
    replay_trial,
    shrink_counterexample,
    shuffle_instance,
    unnest_instance,
)
from harness.generators import DEFAULT_SCHEMAS, GenConfig, gen_database, gen_query, rng_for
from harness.oracle import oracle_query
from semantics.evaluator import run_query
from semantics.logic import THREE_VALUED, TWO_VALUED
from semantics.translate import ttquery
from store.database import load_database
from syntax.ast import ExceptQuery, IntersectQuery, Select, SelectStar, UnionQuery
from syntax.parser import parse_query

QUERIES = PROJECT_ROOT / "queries"
DB = load_database(QUERIES / "motivating_db.yaml")
T_SCHEMAS = {"T": ("A", "B")}
RS_SCHEMAS = {"R": ("A",), "S": ("A",)}


def _load(name):
    return parse_query((QUERIES / name).read_text(encoding="utf-8"))


# ---- generators ----


def test_gen_config_validation():
    with pytest.raises(ValueError):
        GenConfig(max_rows=-1)
    assert GenConfig(value_domain=(None, 0, 1)).constants == (0, 1)


def test_gen_database_is_deterministic():
    cfg = GenConfig(seed=9)
    a = gen_database(cfg, DEFAULT_SCHEMAS, rng_for(cfg, "db", 0))
    b = gen_database(cfg, DEFAULT_SCHEMAS, rng_for(cfg, "db", 0))
    assert a == b
    assert sorted(a) == ["R", "S"]


def test_gen_database_bounds():
    empty = gen_database(GenConfig(max_rows=0), DEFAULT_SCHEMAS, rng_for(GenConfig(), "db", 1))
    assert all(rel.card() == 0 for _, _, rel in empty.items())
    cfg = GenConfig(seed=2, value_domain=(0, 1))
    for trial in range(50):
        db = gen_database(cfg, DEFAULT_SCHEMAS, rng_for(cfg, "db", trial))
        assert db.is_null_free()
        assert all(rel.card() <= cfg.max_rows for _, _, rel in db.items())


def test_generated_query_kinds_are_covered():
    cfg = GenConfig(seed=13)
    seen = Counter()
    for trial in range(1000):
        seen[type(gen_query(cfg, DEFAULT_SCHEMAS, rng_for(cfg, "kinds", trial)))] += 1
    for kind in (Select, SelectStar, UnionQuery, IntersectQuery, ExceptQuery):
        assert seen[kind] > 0, kind.__name__


def test_depth_zero_is_a_flat_select():
    cfg = GenConfig(seed=14)
    for trial in range(200):
        q = gen_query(cfg, DEFAULT_SCHEMAS, rng_for(cfg, "flat", trial), depth=0)
        assert isinstance(q, Select)
        assert len(q.from_) == 1


# ---- oracle ----


def test_oracle_golden_results():
    assert oracle_query(DB, _load("not_in.sql"), THREE_VALUED) == Counter()
    assert oracle_query(DB, _load("not_exists.sql"), THREE_VALUED) == Counter({(None,): 1, (1,): 1})
    assert oracle_eval(DB, _load("except.sql"), THREE_VALUED) == run_query(DB, _load("except.sql"), THREE_VALUED)


@pytest.mark.parametrize("logic", [TWO_VALUED, THREE_VALUED])
def test_oracle_agrees_with_evaluator(logic):
    assert check_oracle(GenConfig(seed=31), DEFAULT_SCHEMAS, logic, 500) == []


# ---- equivalence ----


def test_equiv_is_reflexive():
    q = _load("not_exists.sql")
    result = check_equiv(q, q, THREE_VALUED, THREE_VALUED, GenConfig(seed=1, trials=50), RS_SCHEMAS)
    assert result == Equivalent(50)


def test_translation_is_equivalent_across_logics():
    q = _load("not_in.sql")
    result = check_equiv(q, ttquery(q), THREE_VALUED, TWO_VALUED, GenConfig(seed=1, trials=100), RS_SCHEMAS)
    assert isinstance(result, Equivalent)


def test_shuffled_from_is_equivalent():
    schemas = {"R": ("A",), "T": ("B", "C")}
    result = check_equiv(
        _load("shuffle_left.sql"), _load("shuffle_right.sql"), THREE_VALUED, THREE_VALUED,
        GenConfig(seed=6, trials=100), schemas,
    )
    assert isinstance(result, Equivalent)


def test_tautology_counterexample_contains_null():
    plain = parse_query("SELECT * FROM table T AS (A, B) WHERE TRUE")
    cfg = GenConfig(seed=1, trials=200)
    result = check_equiv(_load("taut_refl.sql"), plain, THREE_VALUED, THREE_VALUED, cfg, T_SCHEMAS)
    assert isinstance(result, Counterexample)
    assert any(row[0] is None for row in result.db.rows("T"))
    assert result.r1 != result.r2
    assert replay_trial(cfg, T_SCHEMAS, result.trial) == result.db


def test_shrinking_reaches_single_null_row():
    plain = parse_query("SELECT * FROM table T AS (A, B) WHERE TRUE")
    taut = _load("taut_refl.sql")
    cfg = GenConfig(seed=1, trials=200)
    result = check_equiv(taut, plain, THREE_VALUED, THREE_VALUED, cfg, T_SCHEMAS, shrink=True)
    assert isinstance(result, Counterexample)
    assert result.db.rows("T") == [(None, None)]
    assert result.r1 != result.r2
    unshrunk = check_equiv(taut, plain, THREE_VALUED, THREE_VALUED, cfg, T_SCHEMAS)
    assert shrink_counterexample(taut, plain, THREE_VALUED, THREE_VALUED, unshrunk).db == result.db


def test_not_in_and_not_exists_differ():
    result = check_equiv(
        _load("not_in.sql"), _load("not_exists.sql"), THREE_VALUED, THREE_VALUED,
        GenConfig(seed=1, trials=200), RS_SCHEMAS,
    )
    assert isinstance(result, Counterexample)


def test_on_trial_callback():
    q = _load("except.sql")
    calls = []
    check_equiv(q, q, THREE_VALUED, THREE_VALUED, GenConfig(trials=7), RS_SCHEMAS, on_trial=lambda t, eq: calls.append((t, eq)))
    assert calls == [(t, True) for t in range(7)]


def test_schema_mismatch():
    other = parse_query("SELECT 0.A AS B FROM table R AS (A) WHERE TRUE")
    with pytest.raises(SchemaMismatchError) as info:
        check_equiv(_load("except.sql"), other, THREE_VALUED, THREE_VALUED, GenConfig(trials=1), RS_SCHEMAS)
    assert info.value.left == ("A",) and info.value.right == ("B",)


# ---- rewrite instances ----


def test_from_shuffle_instances():
    assert check_rewrites(GenConfig(seed=41), DEFAULT_SCHEMAS, shuffle_instance, trials=200) == []


def test_unnesting_instances():
    cfg = GenConfig(seed=42)
    assert check_rewrites(cfg, DEFAULT_SCHEMAS, unnest_instance, trials=200) == []
    assert check_rewrites(cfg, DEFAULT_SCHEMAS, unnest_instance, logic=TWO_VALUED, trials=200) == []


def main() -> int:
    from tests.script_runner import run_module_tests

    return run_module_tests(globals(), "Harness")


if __name__ == "__main__":
    try:
        rc = main()
        sys.exit(rc)
    except Exception as e:
        print("Unexpected error during test run:", repr(e))
        sys.exit(4)
