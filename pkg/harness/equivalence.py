"""Randomized equivalence checking, counterexample shrinking and rewrite instances.

``check_equiv`` runs two queries over ``cfg.trials`` random databases and
reports the first database where their results differ. Trial ``i`` always
draws its database from ``rng_for(cfg, "equiv", i)``, so a recorded
``(seed, trial)`` pair is enough to rebuild a witness (:func:`replay_trial`).

The module also builds random instances of two rewrite theorems:

- FROM shuffle: ``SELECT * FROM T1 AS s1, T2 AS s2`` equals the same
  product listed in the other order and re-projected to the original column
  order.
- unnesting: a Select over a single nested Select equals the outer select
  list substituted into the inner query.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace
from typing import Callable, List, Mapping, Optional, Sequence, Tuple, Union

from harness.generators import (
    ALIAS_POOL,
    OUTPUT_POOL,
    GenConfig,
    QueryGenerator,
    gen_cond,
    gen_context,
    gen_database,
    gen_env,
    gen_query,
    rng_for,
)
from harness.oracle import oracle_query
from relations.kbag import Relation
from semantics.evaluator import run_query
from semantics.logic import THREE_VALUED, TWO_VALUED, Logic
from semantics.translate import check_condition_translation, ttquery
from store.database import Database
from syntax.ast import (
    BaseTable,
    CondTrue,
    Name,
    Query,
    Schema,
    Select,
    SelectStar,
    SubQuery,
    TableRef,
    Var,
    subst_select_list,
)
from syntax.wf import query_schema

logger = logging.getLogger(__name__)

EQUIV_STREAM = "equiv"


class SchemaMismatchError(ValueError):
    """The two queries handed to :func:`check_equiv` have different output schemas."""

    def __init__(self, left: Schema, right: Schema) -> None:
        super().__init__(f"Query schemas differ: {tuple(left)} vs {tuple(right)}")
        self.left = tuple(left)
        self.right = tuple(right)


@dataclass(frozen=True)
class Equivalent:
    trials: int


@dataclass(frozen=True)
class Counterexample:
    db: Database
    r1: Relation
    r2: Relation
    seed: int
    trial: int
    shrunk: bool = False


EquivResult = Union[Equivalent, Counterexample]


def oracle_eval(db: Database, q: Query, logic: Logic) -> Relation:
    """Brute-force evaluation of a closed query, packaged as a relation."""
    schema = query_schema((), db, q)
    bag = oracle_query(db, q, logic)
    return Relation(len(schema), bag.elements())


def empty_database(schemas: Mapping[Name, Sequence[Name]]) -> Database:
    return Database({name: (tuple(s), Relation(len(s))) for name, s in schemas.items()})


def replay_trial(cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], trial: int) -> Database:
    """The database trial ``trial`` of :func:`check_equiv` ran on."""
    return gen_database(cfg, schemas, rng_for(cfg, EQUIV_STREAM, trial))


def _differs(db: Database, q1: Query, q2: Query, logic1: Logic, logic2: Logic) -> bool:
    return run_query(db, q1, logic1) != run_query(db, q2, logic2)


def check_equiv(
    q1: Query,
    q2: Query,
    logic1: Logic,
    logic2: Logic,
    cfg: GenConfig,
    schemas: Mapping[Name, Sequence[Name]],
    *,
    shrink: bool = False,
    on_trial: Optional[Callable[[int, bool], None]] = None,
) -> EquivResult:
    """Compare ``q1`` under ``logic1`` with ``q2`` under ``logic2`` on random databases.

    Raises WfError if either query is ill formed and SchemaMismatchError if
    their schemas differ. Trials run in index order and stop at the first
    difference.
    """
    schema_db = empty_database(schemas)
    s1 = query_schema((), schema_db, q1)
    s2 = query_schema((), schema_db, q2)
    if s1 != s2:
        raise SchemaMismatchError(s1, s2)
    for trial in range(cfg.trials):
        db = replay_trial(cfg, schemas, trial)
        r1 = run_query(db, q1, logic1)
        r2 = run_query(db, q2, logic2)
        equal = r1 == r2
        if on_trial is not None:
            on_trial(trial, equal)
        if not equal:
            logger.debug("Queries differ at seed=%s trial=%d", cfg.seed, trial)
            cex = Counterexample(db, r1, r2, cfg.seed, trial)
            return shrink_counterexample(q1, q2, logic1, logic2, cex) if shrink else cex
    return Equivalent(cfg.trials)


# ---- shrinking ----


def _row_removals(db: Database):
    for name, schema, rel in db.items():
        rows = list(rel.rows)
        for i in range(len(rows)):
            yield db.with_table(name, schema, Relation(len(schema), rows[:i] + rows[i + 1 :]))


def _value_simplifications(db: Database):
    for name, schema, rel in db.items():
        rows = [list(r) for r in rel.rows]
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v is None:
                    continue
                targets = (None,) if v == 0 and type(v) is int else (None, 0)
                for target in targets:
                    changed = [list(r) for r in rows]
                    changed[i][j] = target
                    yield db.with_table(name, schema, Relation(len(schema), changed))


def shrink_counterexample(
    q1: Query, q2: Query, logic1: Logic, logic2: Logic, cex: Counterexample
) -> Counterexample:
    """Greedily drop rows, then move values toward NULL and then 0, keeping the difference."""
    db = cex.db
    for candidates in (_row_removals, _value_simplifications):
        progress = True
        while progress:
            progress = False
            for smaller in candidates(db):
                if _differs(smaller, q1, q2, logic1, logic2):
                    db = smaller
                    progress = True
                    break
    if db == cex.db:
        return cex
    return replace(
        cex, db=db, r1=run_query(db, q1, logic1), r2=run_query(db, q2, logic2), shrunk=True
    )


# ---- rewrite theorem instances ----


def _table_source(gen: QueryGenerator, rng: random.Random, schemas: Mapping[Name, Sequence[Name]]) -> Tuple[TableRef, int]:
    """A base table or a random closed subquery, with its width."""
    if gen.cfg.max_query_depth > 0 and rng.random() < 0.3:
        width = rng.randint(1, max(1, gen.cfg.max_select_width))
        names = tuple(rng.choice(OUTPUT_POOL) for _ in range(width))
        q, _, _ = gen._query_with_schema((), gen.cfg.max_query_depth - 1, names)
        return SubQuery(q), width
    name = rng.choice(sorted(schemas))
    return BaseTable(name), len(schemas[name])


def shuffle_instance(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], rng: random.Random
) -> Tuple[Query, Query]:
    """``SELECT * FROM T1 AS s1, T2 AS s2 WHERE TRUE`` and its FROM-swapped form."""
    gen = QueryGenerator(cfg, schemas, rng)
    t1, w1 = _table_source(gen, rng, schemas)
    t2, w2 = _table_source(gen, rng, schemas)
    names = rng.sample(ALIAS_POOL, w1 + w2)
    s1, s2 = tuple(names[:w1]), tuple(names[w1:])
    q = SelectStar(False, ((t1, s1), (t2, s2)), CondTrue())
    sels = tuple((Var(1, a), a) for a in s1) + tuple((Var(0, b), b) for b in s2)
    return q, Select(False, sels, ((t2, s2), (t1, s1)), CondTrue())


def unnest_instance(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], rng: random.Random
) -> Tuple[Query, Query]:
    """A Select over one nested Select, and the same query with the nesting removed."""
    gen = QueryGenerator(cfg, schemas, rng)
    table, width = _table_source(gen, rng, schemas)
    s2 = tuple(rng.sample(ALIAS_POOL, width))
    depth = max(0, cfg.max_query_depth - 1)
    where = gen_cond(cfg, schemas, (s2,), rng, depth)
    inner_width = rng.randint(1, max(1, cfg.max_select_width))
    inner_sels = tuple((gen.term((s2,)), rng.choice(OUTPUT_POOL)) for _ in range(inner_width))
    inner = Select(False, inner_sels, ((table, s2),), where)
    s1 = tuple(rng.sample(ALIAS_POOL, inner_width))
    outer_width = rng.randint(1, max(1, cfg.max_select_width))
    outer_sels = tuple((gen.term((s1,)), rng.choice(OUTPUT_POOL)) for _ in range(outer_width))
    distinct = rng.random() < 0.3
    q = Select(distinct, outer_sels, ((SubQuery(inner), s1),), CondTrue())
    binding = [(u, x) for (u, _), x in zip(inner_sels, s1)]
    unnested = Select(distinct, subst_select_list(outer_sels, binding), ((table, s2),), where)
    return q, unnested


# ---- suites over many trials ----


@dataclass(frozen=True)
class TrialFailure:
    trial: int
    query: Query
    db: Database
    expected: object
    actual: object


def check_oracle(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], logic: Logic, trials: Optional[int] = None
) -> List[TrialFailure]:
    """Staged evaluator against the brute-force oracle on random queries and databases."""
    failures = []
    for trial in range(cfg.trials if trials is None else trials):
        rng = rng_for(cfg, f"oracle-{logic.name}", trial)
        db = gen_database(cfg, schemas, rng)
        q = gen_query(cfg, schemas, rng)
        expected = oracle_eval(db, q, logic)
        actual = run_query(db, q, logic)
        if expected != actual:
            failures.append(TrialFailure(trial, q, db, expected, actual))
    return failures


def check_translation(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], trials: Optional[int] = None
) -> List[TrialFailure]:
    """Three-valued results of random queries against two-valued results of their translation."""
    failures = []
    for trial in range(cfg.trials if trials is None else trials):
        rng = rng_for(cfg, "translate", trial)
        db = gen_database(cfg, schemas, rng)
        q = gen_query(cfg, schemas, rng)
        expected = run_query(db, q, THREE_VALUED)
        actual = run_query(db, ttquery(q), TWO_VALUED)
        if expected != actual:
            failures.append(TrialFailure(trial, q, db, expected, actual))
    return failures


def check_logic_agreement(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], trials: Optional[int] = None
) -> List[TrialFailure]:
    """Two-valued against three-valued results of the same random query.

    Only meaningful for a NULL-free value domain, where the two must agree.
    """
    failures = []
    for trial in range(cfg.trials if trials is None else trials):
        rng = rng_for(cfg, "agreement", trial)
        db = gen_database(cfg, schemas, rng)
        q = gen_query(cfg, schemas, rng)
        expected = run_query(db, q, THREE_VALUED)
        actual = run_query(db, q, TWO_VALUED)
        if expected != actual:
            failures.append(TrialFailure(trial, q, db, expected, actual))
    return failures


def check_condition_translations(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], trials: Optional[int] = None
) -> List[Tuple[int, dict]]:
    """Per-condition lockstep of is_btrue/ttcond and is_bfalse/ffcond in random contexts."""
    failures = []
    for trial in range(cfg.trials if trials is None else trials):
        rng = rng_for(cfg, "condition", trial)
        db = gen_database(cfg, schemas, rng)
        gamma = gen_context(cfg, rng)
        c = gen_cond(cfg, schemas, gamma, rng)
        facts = check_condition_translation(gamma, db, c, gen_env(cfg, gamma, rng))
        if facts["true_3vl"] != facts["tt_2vl"] or facts["false_3vl"] != facts["ff_2vl"]:
            failures.append((trial, facts))
    return failures


def check_rewrites(
    cfg: GenConfig,
    schemas: Mapping[Name, Sequence[Name]],
    build: Callable[[GenConfig, Mapping[Name, Sequence[Name]], random.Random], Tuple[Query, Query]],
    logic: Logic = THREE_VALUED,
    trials: Optional[int] = None,
) -> List[TrialFailure]:
    """Evaluate both sides of random rewrite instances on random databases."""
    failures = []
    stream = getattr(build, "__name__", "rewrite")
    for trial in range(cfg.trials if trials is None else trials):
        rng = rng_for(cfg, stream, trial)
        db = gen_database(cfg, schemas, rng)
        q, rewritten = build(cfg, schemas, rng)
        expected = run_query(db, q, logic)
        actual = run_query(db, rewritten, logic)
        if expected != actual:
            failures.append(TrialFailure(trial, rewritten, db, expected, actual))
    return failures


__all__ = [
    "SchemaMismatchError",
    "Equivalent",
    "Counterexample",
    "EquivResult",
    "TrialFailure",
    "oracle_eval",
    "empty_database",
    "replay_trial",
    "check_equiv",
    "shrink_counterexample",
    "shuffle_instance",
    "unnest_instance",
    "check_oracle",
    "check_translation",
    "check_logic_agreement",
    "check_condition_translations",
    "check_rewrites",
]
