"""Compile three-valued queries into two-valued ones with the same results.

Two mutually recursive condition translations drive the rewrite:

- ``ttcond(c)`` holds in two-valued logic exactly when ``c`` is TRUE in
  three-valued logic,
- ``ffcond(c)`` holds exactly when ``c`` is FALSE.

A query is translated by rewriting every FROM subquery and replacing each
WHERE condition with its ``ttcond``. NOT IN is the only construct that needs
a new query shape. It becomes NOT EXISTS over the subquery, whose columns get
fresh aliases ``?a0 .. ?a(n-1)``, with a filter that keeps any row not
certainly different from the tested terms.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Dict, Sequence, Tuple

from semantics.evaluator import Environment, eval_cond
from semantics.logic import THREE_VALUED, TWO_VALUED
from syntax.ast import (
    FRESH_PREFIX,
    And,
    BaseTable,
    Cond,
    CondFalse,
    CondTrue,
    ExceptQuery,
    Exists,
    FromItem,
    IntersectQuery,
    IsNull,
    Memb,
    Name,
    Not,
    Or,
    Pred,
    PredOp,
    Query,
    Schema,
    Select,
    SelectStar,
    SubQuery,
    TableRef,
    Term,
    UnionQuery,
    Var,
    tm_lift,
)

if TYPE_CHECKING:  # pragma: no cover
    from store.database import Database

logger = logging.getLogger(__name__)


def fresh_schema(n: int) -> Schema:
    """``n`` pairwise distinct reserved names ``?a0 .. ?a(n-1)``."""
    return tuple(f"{FRESH_PREFIX}a{i}" for i in range(n))


def _and_chain(conds: Sequence[Cond]) -> Cond:
    # right-nested, terminated by TRUE
    out: Cond = CondTrue()
    for c in reversed(conds):
        out = And(c, out)
    return out


def _not_in_expansion(terms: Sequence[Term], query: Query) -> Cond:
    """NOT EXISTS a row of ``query`` that is not certainly different from ``terms``."""
    alias = fresh_schema(len(terms))
    matches = []
    for t, a in zip(terms, alias):
        lifted = tm_lift(t, 1)
        col = Var(0, a)
        matches.append(Or(IsNull(True, col), Or(IsNull(True, lifted), Pred(PredOp.EQ, (lifted, col)))))
    inner = SelectStar(False, ((SubQuery(ttquery(query)), alias),), _and_chain(matches))
    return Not(Exists(inner))


def tttable(table: TableRef) -> TableRef:
    """Translate a FROM source: base tables are unchanged, subqueries go through ``ttquery``."""
    if isinstance(table, BaseTable):
        return table
    return SubQuery(ttquery(table.query), span=table.span)


def _tt_from(from_: Sequence[FromItem]) -> Tuple[FromItem, ...]:
    return tuple((tttable(t), alias) for t, alias in from_)


def ttquery(q: Query) -> Query:
    """Translate a query: same shape, every WHERE replaced by its ``ttcond``."""
    if isinstance(q, Select):
        return Select(q.distinct, q.selections, _tt_from(q.from_), ttcond(q.where), span=q.span)
    if isinstance(q, SelectStar):
        return SelectStar(q.distinct, _tt_from(q.from_), ttcond(q.where), span=q.span)
    if isinstance(q, UnionQuery):
        return UnionQuery(q.all, ttquery(q.left), ttquery(q.right), span=q.span)
    if isinstance(q, IntersectQuery):
        return IntersectQuery(q.all, ttquery(q.left), ttquery(q.right), span=q.span)
    if isinstance(q, ExceptQuery):
        return ExceptQuery(q.all, ttquery(q.left), ttquery(q.right), span=q.span)
    raise TypeError(f"Not a query: {q!r}")


def ttcond(c: Cond) -> Cond:
    """Two-valued condition that holds exactly when ``c`` is three-valued TRUE."""
    if isinstance(c, (CondTrue, CondFalse, IsNull, Pred)):
        return c
    if isinstance(c, Exists):
        return Exists(ttquery(c.query), span=c.span)
    if isinstance(c, Not):
        return ffcond(c.cond)
    if isinstance(c, And):
        return And(ttcond(c.left), ttcond(c.right), span=c.span)
    if isinstance(c, Or):
        return Or(ttcond(c.left), ttcond(c.right), span=c.span)
    if isinstance(c, Memb):
        if c.is_in:
            return Memb(True, c.terms, ttquery(c.query), span=c.span)
        return _not_in_expansion(c.terms, c.query)
    raise TypeError(f"Not a condition: {c!r}")


def ffcond(c: Cond) -> Cond:
    """Two-valued condition that holds exactly when ``c`` is three-valued FALSE."""
    if isinstance(c, CondTrue):
        return CondFalse(span=c.span)
    if isinstance(c, CondFalse):
        return CondTrue(span=c.span)
    if isinstance(c, IsNull):
        return IsNull(not c.is_null, c.term, span=c.span)
    if isinstance(c, Pred):
        return And(Not(c), _and_chain([IsNull(False, t) for t in c.args]))
    if isinstance(c, Exists):
        return Not(Exists(ttquery(c.query)), span=c.span)
    if isinstance(c, Not):
        return ttcond(c.cond)
    if isinstance(c, And):
        return Or(ffcond(c.left), ffcond(c.right), span=c.span)
    if isinstance(c, Or):
        return And(ffcond(c.left), ffcond(c.right), span=c.span)
    if isinstance(c, Memb):
        if c.is_in:
            return _not_in_expansion(c.terms, c.query)
        return Memb(True, c.terms, ttquery(c.query), span=c.span)
    raise TypeError(f"Not a condition: {c!r}")


def check_condition_translation(
    gamma: Sequence[Sequence[Name]],
    db: "Database",
    c: Cond,
    env: Environment,
) -> Dict[str, bool]:
    """Evaluate the four facts the translation must keep in lockstep.

    Returns a dict with ``true_3vl``/``tt_2vl`` (must be equal) and
    ``false_3vl``/``ff_2vl`` (must be equal) for condition ``c`` in
    context ``gamma`` under environment ``env``.
    """
    v3 = eval_cond(gamma, db, c, THREE_VALUED).run(env)
    tt = eval_cond(gamma, db, ttcond(c), TWO_VALUED).run(env)
    ff = eval_cond(gamma, db, ffcond(c), TWO_VALUED).run(env)
    return {
        "true_3vl": THREE_VALUED.is_btrue(v3),
        "tt_2vl": TWO_VALUED.is_btrue(tt),
        "false_3vl": THREE_VALUED.is_bfalse(v3),
        "ff_2vl": TWO_VALUED.is_btrue(ff),
    }


__all__ = [
    "fresh_schema",
    "tttable",
    "ttquery",
    "ttcond",
    "ffcond",
    "check_condition_translation",
]
