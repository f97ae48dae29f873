"""Staged evaluator: elaborate syntax into plans, then run plans on environments.

Elaboration (``eval_*``) first checks well-formedness and then builds a
:class:`Plan`, a closure over an :class:`Environment`. An environment holds one
value row per schema of the governing context. A Select evaluates its
condition and select list under the environment extended by the current FROM
row; the FROM rows come first (index 0 = first FROM item), and the outer
environment follows.

Correlated subqueries are re-run for every outer row; nothing is cached.

Examples
--------
from semantics.evaluator import run_query
from semantics.logic import THREE_VALUED

rel = run_query(db, parse_query("SELECT 0.A AS A FROM table R AS (A) WHERE 0.A = 0.A"), THREE_VALUED)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import TYPE_CHECKING, Callable, Generic, Optional, Sequence, Tuple, TypeVar

from relations.kbag import RONE, Relation, Row, Value
from semantics.logic import Logic, TruthValue
from syntax.ast import (
    And,
    BaseTable,
    Cond,
    CondFalse,
    CondTrue,
    Const,
    Context,
    ExceptQuery,
    Exists,
    FromItem,
    IntersectQuery,
    IsNull,
    Memb,
    Name,
    Not,
    Null,
    Or,
    Pred,
    Query,
    Schema,
    Select,
    SelectStar,
    Term,
    UnionQuery,
    Var,
    tmlist_of_ctx,
)
from syntax.wf import wf_cond, wf_inquery, wf_query, wf_tables, wf_term, wf_terms

if TYPE_CHECKING:  # pragma: no cover
    from store.database import Database

logger = logging.getLogger(__name__)

T = TypeVar("T")

Environment = Tuple[Row, ...]
Gamma = Sequence[Sequence[Name]]


@dataclass(frozen=True)
class Plan(Generic[T]):
    """An elaborated judgment: call it with an environment to get its value.

    ``schema`` is set for queries, ``arity`` for term lists and FROM lists,
    and ``kind`` names the judgment ("term", "terms", "tables", "cond",
    "query" or "inquery").
    """

    run: Callable[[Environment], T]
    kind: str
    schema: Optional[Schema] = None
    arity: Optional[int] = None

    def __call__(self, env: Environment = ()) -> T:
        return self.run(env)


# ---- environments ----


def env_of_tuple(g0: Sequence[Sequence[Name]], row: Row) -> Environment:
    """Split one FROM product row into per-scope rows following ``g0``."""
    out = []
    pos = 0
    for schema in g0:
        out.append(tuple(row[pos : pos + len(schema)]))
        pos += len(schema)
    return tuple(out)


def subenv(env: Environment, k: int) -> Environment:
    """Drop the ``k`` innermost scopes."""
    return env[k:]


def check_env(gamma: Gamma, env: Sequence[Sequence[Value]]) -> Environment:
    """Validate that ``env`` matches ``gamma`` scope by scope and return it as tuples."""
    if len(env) != len(gamma):
        raise ValueError(f"Environment has {len(env)} rows, context has {len(gamma)} scopes")
    for i, (schema, row) in enumerate(zip(gamma, env)):
        if len(row) != len(schema):
            raise ValueError(f"Environment row {i} has {len(row)} values, schema {tuple(schema)} needs {len(schema)}")
    return tuple(tuple(row) for row in env)


# ---- elaboration (inputs already well formed) ----


def _term(gamma: Gamma, t: Term) -> Plan[Value]:
    if isinstance(t, Const):
        value = t.value
        return Plan(lambda env: value, "term")
    if isinstance(t, Null):
        return Plan(lambda env: None, "term")
    if isinstance(t, Var):
        n = t.index
        pos = list(gamma[n]).index(t.attr)
        return Plan(lambda env: env[n][pos], "term")
    raise TypeError(f"Not a term: {t!r}")


def _terms(gamma: Gamma, ts: Sequence[Term]) -> Plan[Row]:
    plans = [_term(gamma, t) for t in ts]
    return Plan(lambda env: tuple(p.run(env) for p in plans), "terms", arity=len(plans))


def _tables(gamma: Gamma, db: "Database", from_: Sequence[FromItem], logic: Logic) -> Plan[Relation]:
    sources = []
    for table, _ in from_:
        if isinstance(table, BaseTable):
            rel = db.relation(table.name)
            sources.append(Plan(lambda env, rel=rel: rel, "query"))
        else:
            sources.append(_query(gamma, db, table.query, logic))
    arity = sum(len(alias) for _, alias in from_)

    def run(env: Environment) -> Relation:
        return reduce(lambda acc, p: acc.times(p.run(env)), sources, RONE)

    return Plan(run, "tables", arity=arity)


def _cond(gamma: Gamma, db: "Database", c: Cond, logic: Logic) -> Plan[TruthValue]:
    if isinstance(c, CondTrue):
        return Plan(lambda env: logic.btrue, "cond")
    if isinstance(c, CondFalse):
        return Plan(lambda env: logic.bfalse, "cond")
    if isinstance(c, IsNull):
        tp = _term(gamma, c.term)
        b = c.is_null
        # IS [NOT] NULL is two-valued in every logic
        return Plan(lambda env: logic.of_bool(b if tp.run(env) is None else not b), "cond")
    if isinstance(c, Pred):
        args = _terms(gamma, c.args)
        op = c.op
        return Plan(lambda env: logic.sem_bpred(op, args.run(env)), "cond")
    if isinstance(c, And):
        lp, rp = _cond(gamma, db, c.left, logic), _cond(gamma, db, c.right, logic)
        return Plan(lambda env: logic.band(lp.run(env), rp.run(env)), "cond")
    if isinstance(c, Or):
        lp, rp = _cond(gamma, db, c.left, logic), _cond(gamma, db, c.right, logic)
        return Plan(lambda env: logic.bor(lp.run(env), rp.run(env)), "cond")
    if isinstance(c, Not):
        p = _cond(gamma, db, c.cond, logic)
        return Plan(lambda env: logic.bneg(p.run(env)), "cond")
    if isinstance(c, Exists):
        iq = _inquery(gamma, db, c.query, logic)
        return Plan(lambda env: logic.of_bool(iq.run(env)), "cond")
    if isinstance(c, Memb):
        return _membership(gamma, db, c, logic)
    raise TypeError(f"Not a condition: {c!r}")


def _membership(gamma: Gamma, db: "Database", c: Memb, logic: Logic) -> Plan[TruthValue]:
    terms = _terms(gamma, c.terms)
    sub = _query(gamma, db, c.query, logic)
    is_in = c.is_in

    def run(env: Environment) -> TruthValue:
        v = terms.run(env)
        s = sub.run(env)
        # rows certainly equal to v
        ntt = s.sel(lambda r: all(logic.is_btrue(logic.veq(a, b)) for a, b in zip(r, v))).card()
        if ntt > 0:
            return logic.of_bool(is_in)
        # rows not certainly different from v
        nuu = s.sel(lambda r: all(not logic.is_bfalse(logic.veq(a, b)) for a, b in zip(r, v))).card()
        if nuu > 0:
            return logic.bmaybe
        return logic.of_bool(not is_in)

    return Plan(run, "cond")


def _filtered_product(
    gamma: Gamma, db: "Database", from_: Sequence[FromItem], where: Cond, logic: Logic
) -> Tuple[Context, Plan[Relation], Callable[[Environment, Row], Environment]]:
    g0: Context = tuple(tuple(alias) for _, alias in from_)
    inner = g0 + tuple(tuple(s) for s in gamma)
    tables = _tables(gamma, db, from_, logic)
    cond = _cond(inner, db, where, logic)

    def extend(env: Environment, row: Row) -> Environment:
        return env_of_tuple(g0, row) + env

    def run(env: Environment) -> Relation:
        return tables.run(env).sel(lambda row: logic.is_btrue(cond.run(extend(env, row))))

    return inner, Plan(run, "tables", arity=tables.arity), extend


def _select_plan(
    gamma: Gamma,
    db: "Database",
    distinct: bool,
    terms: Sequence[Term],
    from_: Sequence[FromItem],
    where: Cond,
    logic: Logic,
    star: bool,
) -> Callable[[Environment], Relation]:
    inner, filtered, extend = _filtered_product(gamma, db, from_, where, logic)
    if star:
        terms = tmlist_of_ctx(inner[: len(from_)])
    projection = _terms(inner, terms)
    width = len(terms)

    def run(env: Environment) -> Relation:
        out = filtered.run(env).sum(lambda row: projection.run(extend(env, row)), width)
        return out.flat() if distinct else out

    return run


def _set_op(q: Query, left: Relation, right: Relation) -> Relation:
    if isinstance(q, UnionQuery):
        out = left.plus(right)
        return out if q.all else out.flat()
    if isinstance(q, IntersectQuery):
        out = left.inter(right)
        return out if q.all else out.flat()
    if isinstance(q, ExceptQuery):
        return left.minus(right) if q.all else left.flat().minus(right)
    raise TypeError(f"Not a set operation: {q!r}")


def _query(gamma: Gamma, db: "Database", q: Query, logic: Logic) -> Plan[Relation]:
    if isinstance(q, Select):
        run = _select_plan(gamma, db, q.distinct, [t for t, _ in q.selections], q.from_, q.where, logic, False)
        return Plan(run, "query", schema=tuple(x for _, x in q.selections))
    if isinstance(q, SelectStar):
        run = _select_plan(gamma, db, q.distinct, (), q.from_, q.where, logic, True)
        return Plan(run, "query", schema=tuple(a for _, alias in q.from_ for a in alias))
    if isinstance(q, (UnionQuery, IntersectQuery, ExceptQuery)):
        lp = _query(gamma, db, q.left, logic)
        rp = _query(gamma, db, q.right, logic)
        return Plan(lambda env: _set_op(q, lp.run(env), rp.run(env)), "query", schema=lp.schema)
    raise TypeError(f"Not a query: {q!r}")


def _inquery(gamma: Gamma, db: "Database", q: Query, logic: Logic) -> Plan[bool]:
    if isinstance(q, SelectStar):
        # only the filter matters: no projection, ambiguous expansions allowed
        _, filtered, _ = _filtered_product(gamma, db, q.from_, q.where, logic)
        distinct = q.distinct

        def run_star(env: Environment) -> bool:
            rel = filtered.run(env)
            return (rel.flat() if distinct else rel).card() > 0

        return Plan(run_star, "inquery")
    if isinstance(q, Select):
        run = _select_plan(gamma, db, q.distinct, [t for t, _ in q.selections], q.from_, q.where, logic, False)
        return Plan(lambda env: run(env).card() > 0, "inquery")
    if isinstance(q, (UnionQuery, IntersectQuery, ExceptQuery)):
        lp = _query(gamma, db, q.left, logic)
        rp = _query(gamma, db, q.right, logic)
        return Plan(lambda env: _set_op(q, lp.run(env), rp.run(env)).card() > 0, "inquery")
    raise TypeError(f"Not a query: {q!r}")


# ---- public entry points (check, then elaborate) ----


def eval_term(gamma: Gamma, t: Term) -> Plan[Value]:
    """Check ``t`` in ``gamma`` and return a plan reading its value from an environment.

    Parameters
    - gamma: scopes, innermost first.
    - t: the term.

    Returns
    - Plan of kind "term"; ``plan.run(env)`` needs ``env`` shaped like ``gamma``.
    """
    wf_term(gamma, t)
    return _term(gamma, t)


def eval_terms(gamma: Gamma, ts: Sequence[Term]) -> Plan[Row]:
    wf_terms(gamma, ts)
    return _terms(gamma, ts)


def eval_tables(gamma: Gamma, db: "Database", from_: Sequence[FromItem], logic: Logic) -> Plan[Relation]:
    """Product of the FROM sources; an empty FROM list gives the one-row 0-ary relation."""
    wf_tables(gamma, db, from_)
    return _tables(gamma, db, from_, logic)


def eval_cond(gamma: Gamma, db: "Database", c: Cond, logic: Logic) -> Plan[TruthValue]:
    """Check ``c`` and return a plan computing its truth value under ``logic``."""
    wf_cond(gamma, db, c)
    return _cond(gamma, db, c, logic)


def eval_query(gamma: Gamma, db: "Database", q: Query, logic: Logic) -> Plan[Relation]:
    """Check ``q`` and return a plan for its result.

    Raises WfError before anything runs. The plan carries the output schema.
    """
    schema = wf_query(gamma, db, q)
    logger.debug("Elaborating query with schema %s under %s", schema, logic.name)
    plan = _query(gamma, db, q, logic)
    return Plan(plan.run, "query", schema=schema)


def eval_inquery(gamma: Gamma, db: "Database", q: Query, logic: Logic) -> Plan[bool]:
    """Plan deciding whether a query nested under EXISTS returns at least one row."""
    wf_inquery(gamma, db, q)
    return _inquery(gamma, db, q, logic)


def run_query(
    db: "Database",
    q: Query,
    logic: Logic,
    gamma: Gamma = (),
    env: Sequence[Sequence[Value]] = (),
) -> Relation:
    """Elaborate and run ``q`` in one step (closed queries by default)."""
    plan = eval_query(gamma, db, q, logic)
    return plan.run(check_env(gamma, env))


__all__ = [
    "Environment",
    "Plan",
    "env_of_tuple",
    "subenv",
    "check_env",
    "eval_term",
    "eval_terms",
    "eval_tables",
    "eval_cond",
    "eval_query",
    "eval_inquery",
    "run_query",
]
