"""Brute-force reference evaluator used to cross-check the staged evaluator.

Written independently of the relation type: tables are plain row lists,
FROM clauses are nested loops over them, and results are
:class:`collections.Counter` multisets. Only the truth-value structures of
:mod:`semantics.logic` are shared. Variables are looked up by name in an
environment of ``(schema, row)`` scopes, innermost first.

Inputs must be well formed; the oracle does not re-check.
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from typing import TYPE_CHECKING, List, Sequence, Tuple

from semantics.logic import Logic, TruthValue
from syntax.ast import (
    And,
    BaseTable,
    Cond,
    CondFalse,
    CondTrue,
    Const,
    ExceptQuery,
    Exists,
    FromItem,
    IntersectQuery,
    IsNull,
    Memb,
    Not,
    Null,
    Or,
    Pred,
    Query,
    Select,
    SelectStar,
    Term,
    UnionQuery,
    Var,
)

if TYPE_CHECKING:  # pragma: no cover
    from store.database import Database

logger = logging.getLogger(__name__)

Scope = Tuple[Tuple[str, ...], tuple]
OracleEnv = List[Scope]


def _lookup(env: OracleEnv, index: int, attr: str) -> object:
    schema, row = env[index]
    return row[list(schema).index(attr)]


def oracle_term(env: OracleEnv, t: Term) -> object:
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Null):
        return None
    if isinstance(t, Var):
        return _lookup(env, t.index, t.attr)
    raise TypeError(f"Not a term: {t!r}")


def _source_rows(db: "Database", table: object, env: OracleEnv, logic: Logic) -> List[tuple]:
    if isinstance(table, BaseTable):
        return [tuple(r) for r in db.rows(table.name)]
    return list(oracle_query(db, table.query, logic, env).elements())  # type: ignore[attr-defined]


def _matching_rows(
    db: "Database", from_: Sequence[FromItem], where: Cond, logic: Logic, env: OracleEnv
) -> List[Tuple[OracleEnv, tuple]]:
    """Every FROM combination whose condition is TRUE, with its extended environment."""
    sources = [_source_rows(db, table, env, logic) for table, _ in from_]
    aliases = [tuple(alias) for _, alias in from_]
    out = []
    for combo in itertools.product(*sources):
        inner = list(zip(aliases, combo)) + env
        if logic.is_btrue(oracle_cond(db, where, logic, inner)):
            out.append((inner, tuple(v for row in combo for v in row)))
    return out


def oracle_cond(db: "Database", c: Cond, logic: Logic, env: OracleEnv) -> TruthValue:
    if isinstance(c, CondTrue):
        return logic.btrue
    if isinstance(c, CondFalse):
        return logic.bfalse
    if isinstance(c, IsNull):
        return logic.of_bool((oracle_term(env, c.term) is None) == c.is_null)
    if isinstance(c, Pred):
        return logic.sem_bpred(c.op, [oracle_term(env, t) for t in c.args])
    if isinstance(c, Exists):
        return logic.of_bool(sum(oracle_query(db, c.query, logic, env).values()) > 0)
    if isinstance(c, Memb):
        needle = [oracle_term(env, t) for t in c.terms]
        rows = list(oracle_query(db, c.query, logic, env))
        if any(all(logic.is_btrue(logic.veq(a, b)) for a, b in zip(row, needle)) for row in rows):
            return logic.of_bool(c.is_in)
        if any(all(not logic.is_bfalse(logic.veq(a, b)) for a, b in zip(row, needle)) for row in rows):
            return logic.bmaybe
        return logic.of_bool(not c.is_in)
    if isinstance(c, And):
        return logic.band(oracle_cond(db, c.left, logic, env), oracle_cond(db, c.right, logic, env))
    if isinstance(c, Or):
        return logic.bor(oracle_cond(db, c.left, logic, env), oracle_cond(db, c.right, logic, env))
    if isinstance(c, Not):
        return logic.bneg(oracle_cond(db, c.cond, logic, env))
    raise TypeError(f"Not a condition: {c!r}")


def _distinct(bag: Counter) -> Counter:
    return Counter({row: 1 for row, n in bag.items() if n > 0})


def oracle_query(db: "Database", q: Query, logic: Logic, env: OracleEnv = None) -> Counter:  # type: ignore[assignment]
    """Multiset result of ``q`` as a Counter of value tuples."""
    env = list(env or [])
    if isinstance(q, (Select, SelectStar)):
        out: Counter = Counter()
        for inner, flat in _matching_rows(db, q.from_, q.where, logic, env):
            if isinstance(q, SelectStar):
                out[flat] += 1
            else:
                out[tuple(oracle_term(inner, t) for t, _ in q.selections)] += 1
        return _distinct(out) if q.distinct else out
    if isinstance(q, (UnionQuery, IntersectQuery, ExceptQuery)):
        left = oracle_query(db, q.left, logic, env)
        right = oracle_query(db, q.right, logic, env)
        if isinstance(q, UnionQuery):
            out = left + right
            return out if q.all else _distinct(out)
        if isinstance(q, IntersectQuery):
            out = left & right
            return out if q.all else _distinct(out)
        return (left - right) if q.all else (_distinct(left) - right)
    raise TypeError(f"Not a query: {q!r}")


__all__ = ["oracle_term", "oracle_cond", "oracle_query"]
