"""Well-formedness judgments for terms, tables, conditions and queries.

Each judgment either returns normally (with the computed schema or context
where one exists) or raises :class:`WfError`. The first failing premise wins;
the error carries the span of the innermost offending subexpression.

Contexts are sequences of schemas, index 0 being the innermost FROM scope.
A Select's own FROM scopes are prepended to the outer context before its
terms and condition are checked.
"""
from __future__ import annotations

import logging
from collections import Counter
from enum import Enum
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

from syntax.ast import (
    And,
    BaseTable,
    Cond,
    CondFalse,
    CondTrue,
    Context,
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
    Query,
    Schema,
    Select,
    SelectStar,
    SourceSpan,
    Term,
    UnionQuery,
    Var,
    predicate_arity,
    tmlist_of_ctx,
)

if TYPE_CHECKING:  # pragma: no cover
    from store.database import Database

logger = logging.getLogger(__name__)


class WfErrorKind(Enum):
    UNBOUND_INDEX = "UnboundIndex"
    UNKNOWN_ATTR = "UnknownAttr"
    AMBIGUOUS_ATTR = "AmbiguousAttr"
    DUP_ALIAS = "DupAlias"
    SCHEMA_LEN_MISMATCH = "SchemaLenMismatch"
    SET_OP_SCHEMA_MISMATCH = "SetOpSchemaMismatch"
    IN_ARITY_MISMATCH = "InArityMismatch"
    PRED_ARITY_MISMATCH = "PredArityMismatch"
    UNKNOWN_TABLE = "UnknownTable"
    AMBIGUOUS_STAR = "AmbiguousStar"
    UNKNOWN_PREDICATE = "UnknownPredicate"

    def __str__(self) -> str:
        return self.value


class WfError(ValueError):
    """A failed well-formedness premise."""

    def __init__(self, kind: WfErrorKind, message: str, span: Optional[SourceSpan] = None) -> None:
        super().__init__(f"{kind.value}: {message}")
        self.kind = kind
        self.message = message
        self.span = span

    def format(self, text: Optional[str] = None) -> str:
        """``Kind at line:col: message`` (position omitted when unknown)."""
        if text is not None and self.span is not None:
            line, col = self.span.line_col(text)
            return f"{self.kind.value} at {line}:{col}: {self.message}"
        return f"{self.kind.value}: {self.message}"


def _fmt_schema(schema: Sequence[Name]) -> str:
    return "(" + ", ".join(schema) + ")"


# ---- variables and terms ----


def wf_var(sigma: Sequence[Name], x: Name, span: Optional[SourceSpan] = None) -> None:
    """``x`` must occur exactly once in ``sigma``."""
    n = sum(1 for a in sigma if a == x)
    if n == 0:
        raise WfError(WfErrorKind.UNKNOWN_ATTR, f"attribute {x} not in {_fmt_schema(sigma)}", span)
    if n > 1:
        raise WfError(WfErrorKind.AMBIGUOUS_ATTR, f"attribute {x} is ambiguous in {_fmt_schema(sigma)}", span)


def wf_term(gamma: Sequence[Sequence[Name]], t: Term) -> None:
    """Check that a term is well formed in context ``gamma``.

    Constants and NULL always are. A variable ``i.A`` needs ``i < len(gamma)``
    and exactly one ``A`` in ``gamma[i]``.

    Parameters
    - gamma: scopes, innermost first.
    - t: the term to check.

    Raises WfError (UnboundIndex, UnknownAttr or AmbiguousAttr) carrying the
    term's span.
    """
    if not isinstance(t, Var):
        return
    if t.index >= len(gamma):
        raise WfError(
            WfErrorKind.UNBOUND_INDEX,
            f"table index {t.index} out of range for a context of {len(gamma)} scope(s)",
            t.span,
        )
    wf_var(gamma[t.index], t.attr, t.span)


def wf_terms(gamma: Sequence[Sequence[Name]], ts: Sequence[Term]) -> None:
    """Check every term of a list; the first failure is raised."""
    for t in ts:
        wf_term(gamma, t)


# ---- tables ----


def table_schema(gamma: Sequence[Sequence[Name]], db: "Database", table: object) -> Schema:
    """Natural schema of a FROM source: the stored schema or the subquery's schema."""
    if isinstance(table, BaseTable):
        schema = db.schema(table.name)
        if schema is None:
            raise WfError(WfErrorKind.UNKNOWN_TABLE, f"unknown table {table.name}", table.span)
        return schema
    return wf_query(gamma, db, table.query)  # type: ignore[attr-defined]


def wf_tables(gamma: Sequence[Sequence[Name]], db: "Database", from_: Sequence[FromItem]) -> Context:
    """Check a FROM list in context ``gamma``; return its alias schemas in order."""
    out = []
    for table, alias in from_:
        natural = table_schema(gamma, db, table)
        if len(natural) != len(alias):
            raise WfError(
                WfErrorKind.SCHEMA_LEN_MISMATCH,
                f"alias {_fmt_schema(alias)} has {len(alias)} names, source schema {_fmt_schema(natural)} has {len(natural)}",
                table.span,
            )
        dups = sorted(a for a, n in Counter(alias).items() if n > 1)
        if dups:
            raise WfError(
                WfErrorKind.DUP_ALIAS,
                f"alias {_fmt_schema(alias)} repeats {', '.join(dups)}",
                table.span,
            )
        out.append(tuple(alias))
    return tuple(out)


# ---- conditions ----


def wf_cond(gamma: Sequence[Sequence[Name]], db: "Database", c: Cond) -> None:
    """Check a condition; subqueries under EXISTS are checked with ``wf_inquery``."""
    if isinstance(c, (CondTrue, CondFalse)):
        return
    if isinstance(c, IsNull):
        wf_term(gamma, c.term)
        return
    if isinstance(c, Pred):
        arity = predicate_arity(c.op)
        if arity is None:
            raise WfError(WfErrorKind.UNKNOWN_PREDICATE, f"unknown predicate {c.op}", c.span)
        if arity != len(c.args):
            raise WfError(
                WfErrorKind.PRED_ARITY_MISMATCH,
                f"predicate {getattr(c.op, 'symbol', c.op)} takes {arity} argument(s), got {len(c.args)}",
                c.span,
            )
        wf_terms(gamma, c.args)
        return
    if isinstance(c, Memb):
        wf_terms(gamma, c.terms)
        schema = wf_query(gamma, db, c.query)
        if len(schema) != len(c.terms):
            raise WfError(
                WfErrorKind.IN_ARITY_MISMATCH,
                f"IN compares {len(c.terms)} term(s) with a query of schema {_fmt_schema(schema)}",
                c.span,
            )
        return
    if isinstance(c, Exists):
        wf_inquery(gamma, db, c.query)
        return
    if isinstance(c, (And, Or)):
        wf_cond(gamma, db, c.left)
        wf_cond(gamma, db, c.right)
        return
    if isinstance(c, Not):
        wf_cond(gamma, db, c.cond)
        return
    raise TypeError(f"Not a condition: {c!r}")


# ---- queries ----


def _select_scope(
    gamma: Sequence[Sequence[Name]], db: "Database", from_: Sequence[FromItem]
) -> Tuple[Context, Context]:
    g0 = wf_tables(gamma, db, from_)
    inner = g0 + tuple(tuple(s) for s in gamma)
    return g0, inner


def _set_op_schema(gamma: Sequence[Sequence[Name]], db: "Database", q: Query) -> Schema:
    left = wf_query(gamma, db, q.left)  # type: ignore[union-attr]
    right = wf_query(gamma, db, q.right)  # type: ignore[union-attr]
    if left != right:
        raise WfError(
            WfErrorKind.SET_OP_SCHEMA_MISMATCH,
            f"operands have schemas {_fmt_schema(left)} and {_fmt_schema(right)}",
            q.span,
        )
    return left


def wf_query(gamma: Sequence[Sequence[Name]], db: "Database", q: Query) -> Schema:
    """Check ``q`` in context ``gamma`` and return its output schema."""
    if isinstance(q, Select):
        _, inner = _select_scope(gamma, db, q.from_)
        wf_terms(inner, [t for t, _ in q.selections])
        wf_cond(inner, db, q.where)
        return tuple(name for _, name in q.selections)
    if isinstance(q, SelectStar):
        g0, inner = _select_scope(gamma, db, q.from_)
        wf_cond(inner, db, q.where)
        flat = tuple(a for schema in g0 for a in schema)
        dups = sorted(a for a, n in Counter(flat).items() if n > 1)
        if dups:
            raise WfError(
                WfErrorKind.AMBIGUOUS_STAR,
                f"SELECT * expands to ambiguous attribute(s) {', '.join(dups)}",
                q.span,
            )
        wf_terms(inner, tmlist_of_ctx(g0))
        return flat
    if isinstance(q, (UnionQuery, IntersectQuery, ExceptQuery)):
        return _set_op_schema(gamma, db, q)
    raise TypeError(f"Not a query: {q!r}")


def wf_inquery(gamma: Sequence[Sequence[Name]], db: "Database", q: Query) -> None:
    """Check a query nested under EXISTS, where SELECT * may expand ambiguously."""
    if isinstance(q, SelectStar):
        _, inner = _select_scope(gamma, db, q.from_)
        wf_cond(inner, db, q.where)
        return
    if isinstance(q, Select):
        wf_query(gamma, db, q)
        return
    if isinstance(q, (UnionQuery, IntersectQuery, ExceptQuery)):
        _set_op_schema(gamma, db, q)
        return
    raise TypeError(f"Not a query: {q!r}")


def query_schema(gamma: Sequence[Sequence[Name]], db: "Database", q: Query) -> Schema:
    """Output schema of a well-formed query (raises WfError otherwise)."""
    return wf_query(gamma, db, q)


def check_query(
    gamma: Sequence[Sequence[Name]], db: "Database", q: Query
) -> Tuple[Optional[Schema], Optional[WfError]]:
    """Return ``(schema, None)`` on success or ``(None, error)``."""
    try:
        return wf_query(gamma, db, q), None
    except WfError as ex:
        logger.debug("Query rejected: %s", ex)
        return None, ex


__all__ = [
    "WfErrorKind",
    "WfError",
    "wf_var",
    "wf_term",
    "wf_terms",
    "table_schema",
    "wf_tables",
    "wf_cond",
    "wf_query",
    "wf_inquery",
    "query_schema",
    "check_query",
]
