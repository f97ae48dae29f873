"""Abstract syntax for the SQL fragment.

Tables in scope are referenced by 0-based de Bruijn index: ``Var(0, "A")`` is
attribute ``A`` of the innermost FROM scope, ``Var(1, "A")`` reaches one scope
further out. Attribute names stay symbolic; positions are resolved by the
well-formedness checker and the evaluator.

Every node carries an optional :class:`SourceSpan` that is excluded from
equality, so a parsed query compares equal to a hand-built one.

Sequence fields are stored as tuples; lists passed by callers are converted.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

from relations.kbag import BaseConst, compare_consts

logger = logging.getLogger(__name__)

Name = str
Schema = Tuple[Name, ...]
Context = Tuple[Schema, ...]

# Names starting with this character are reserved for generated aliases.
FRESH_PREFIX = "?"


@dataclass(frozen=True)
class SourceSpan:
    """Character offsets ``[start, end)`` into the parsed text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"SourceSpan start {self.start} > end {self.end}")

    def line_col(self, text: str) -> Tuple[int, int]:
        """1-based (line, column) of ``start`` within ``text``."""
        before = text[: self.start]
        line = before.count("\n") + 1
        col = self.start - (before.rfind("\n") + 1) + 1
        return line, col

    def cover(self, other: Optional["SourceSpan"]) -> "SourceSpan":
        if other is None:
            return self
        return SourceSpan(min(self.start, other.start), max(self.end, other.end))


def _span() -> Optional[SourceSpan]:
    return field(default=None, compare=False, repr=False)  # type: ignore[return-value]


def _freeze(obj: object, name: str) -> None:
    value = getattr(obj, name)
    if not isinstance(value, tuple):
        object.__setattr__(obj, name, tuple(value))


# ---- terms ----


@dataclass(frozen=True)
class Const:
    value: BaseConst
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Null:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Var:
    index: int
    attr: Name
    span: Optional[SourceSpan] = _span()


Term = Union[Const, Null, Var]


# ---- predicates ----


class PredOp(Enum):
    """Built-in binary comparisons. Values are their concrete-syntax symbols."""

    EQ = "="
    NEQ = "<>"
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    @property
    def arity(self) -> int:
        return 2

    @property
    def symbol(self) -> str:
        return self.value

    def holds(self, args: Sequence[BaseConst]) -> bool:
        """Boolean semantics over constants; cross-kind pairs use the global order."""
        a, b = args
        c = compare_consts(a, b)
        if self is PredOp.EQ:
            return c == 0
        if self is PredOp.NEQ:
            return c != 0
        if self is PredOp.LT:
            return c < 0
        if self is PredOp.LE:
            return c <= 0
        if self is PredOp.GT:
            return c > 0
        return c >= 0


@dataclass(frozen=True)
class NamedPredicate:
    name: str
    arity: int
    fn: Callable[..., bool]


_PREDICATES: Dict[str, NamedPredicate] = {}


def register_predicate(name: str, arity: int, fn: Callable[..., bool]) -> NamedPredicate:
    """Register a total boolean function over constants usable as ``name(t1, ..., tn)``.

    ``fn`` receives the argument constants positionally. NULL never reaches it.
    Re-registering a name replaces the previous entry.
    """
    if not name or name.startswith(FRESH_PREFIX):
        raise ValueError(f"Invalid predicate name: {name!r}")
    if arity < 0:
        raise ValueError(f"Predicate arity must be non-negative, got {arity}")
    pred = NamedPredicate(name, arity, fn)
    _PREDICATES[name] = pred
    logger.debug("Registered predicate %s/%d", name, arity)
    return pred


def unregister_predicate(name: str) -> None:
    _PREDICATES.pop(name, None)


def lookup_predicate(name: str) -> Optional[NamedPredicate]:
    return _PREDICATES.get(name)


def predicate_arity(op: Union[PredOp, str]) -> Optional[int]:
    """Declared arity of ``op``, or None for an unregistered name."""
    if isinstance(op, PredOp):
        return op.arity
    pred = lookup_predicate(op)
    return pred.arity if pred is not None else None


def predicate_holds(op: Union[PredOp, str], args: Sequence[BaseConst]) -> bool:
    if isinstance(op, PredOp):
        return op.holds(args)
    pred = lookup_predicate(op)
    if pred is None:
        raise KeyError(f"Unknown predicate: {op}")
    return bool(pred.fn(*args))


# ---- conditions ----


@dataclass(frozen=True)
class CondTrue:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class CondFalse:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IsNull:
    """``t IS NULL`` when ``is_null`` is True, ``t IS NOT NULL`` otherwise."""

    is_null: bool
    term: Term
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Pred:
    op: Union[PredOp, str]
    args: Tuple[Term, ...]
    span: Optional[SourceSpan] = _span()

    def __post_init__(self) -> None:
        _freeze(self, "args")


@dataclass(frozen=True)
class Memb:
    """``(t1, ..., tn) IN (Q)`` when ``is_in`` is True, ``NOT IN`` otherwise."""

    is_in: bool
    terms: Tuple[Term, ...]
    query: "Query"
    span: Optional[SourceSpan] = _span()

    def __post_init__(self) -> None:
        _freeze(self, "terms")


@dataclass(frozen=True)
class Exists:
    query: "Query"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Not:
    cond: "Cond"
    span: Optional[SourceSpan] = _span()


Cond = Union[CondTrue, CondFalse, IsNull, Pred, Memb, Exists, And, Or, Not]


# ---- tables and queries ----


@dataclass(frozen=True)
class BaseTable:
    name: Name
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SubQuery:
    query: "Query"
    span: Optional[SourceSpan] = _span()


TableRef = Union[BaseTable, SubQuery]
FromItem = Tuple[TableRef, Schema]
Selection = Tuple[Term, Name]


def _freeze_pairs(obj: object, name: str) -> None:
    pairs = tuple((a, tuple(b) if isinstance(b, list) else b) for a, b in getattr(obj, name))
    object.__setattr__(obj, name, pairs)


@dataclass(frozen=True)
class Select:
    distinct: bool
    selections: Tuple[Selection, ...]
    from_: Tuple[FromItem, ...]
    where: Cond
    span: Optional[SourceSpan] = _span()

    def __post_init__(self) -> None:
        _freeze_pairs(self, "selections")
        _freeze_pairs(self, "from_")

    @property
    def schema(self) -> Schema:
        """The AS-name output schema (duplicates allowed)."""
        return tuple(name for _, name in self.selections)


@dataclass(frozen=True)
class SelectStar:
    distinct: bool
    from_: Tuple[FromItem, ...]
    where: Cond
    span: Optional[SourceSpan] = _span()

    def __post_init__(self) -> None:
        _freeze_pairs(self, "from_")


@dataclass(frozen=True)
class UnionQuery:
    all: bool
    left: "Query"
    right: "Query"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IntersectQuery:
    all: bool
    left: "Query"
    right: "Query"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ExceptQuery:
    all: bool
    left: "Query"
    right: "Query"
    span: Optional[SourceSpan] = _span()


SetOp = Union[UnionQuery, IntersectQuery, ExceptQuery]
Query = Union[Select, SelectStar, UnionQuery, IntersectQuery, ExceptQuery]

SET_OP_KEYWORDS = {UnionQuery: "UNION", IntersectQuery: "INTERSECT", ExceptQuery: "EXCEPT"}


# ---- operations ----


def tm_lift(t: Term, k: int) -> Term:
    """Shift a variable ``k`` scopes outward; constants and NULL are unchanged."""
    if isinstance(t, Var):
        return Var(t.index + k, t.attr, span=t.span)
    return t


def tmlist_of_ctx(ctx: Sequence[Schema]) -> Tuple[Var, ...]:
    """Star expansion of a FROM context: FROM order, then schema order."""
    return tuple(Var(i, a) for i, schema in enumerate(ctx) for a in schema)


class SubstitutionError(ValueError):
    """A ``Var(0, x)`` has no unique binding in a select-list substitution."""


def subst_select_list(
    selections: Sequence[Selection],
    binding: Sequence[Tuple[Term, Name]],
) -> Tuple[Selection, ...]:
    """Simultaneously replace ``Var(0, x_i)`` by ``u_i`` in a select list.

    Parameters
    - selections: outer select list whose context has exactly one FROM scope
      at index 0 (the nested query being unnested).
    - binding: pairs ``(u_i, x_i)`` naming that scope's attributes; for the
      unnesting rewrite these are the inner select terms zipped with the
      outer alias schema.

    Returns the rewritten list. The inner FROM scope replaces the outer one
    one-for-one, so variables with index >= 1 and the ``u_i`` need no shift.
    Raises SubstitutionError when some ``Var(0, x)`` is bound zero or several
    times.
    """
    names = [x for _, x in binding]

    def subst(t: Term) -> Term:
        if not isinstance(t, Var) or t.index != 0:
            return t
        hits = [u for u, x in binding if x == t.attr]
        if len(hits) != 1:
            raise SubstitutionError(
                f"Var(0, {t.attr}) must be bound exactly once among {names}, found {len(hits)}"
            )
        return hits[0]

    return tuple((subst(t), name) for t, name in selections)


__all__ = [
    "Name",
    "Schema",
    "Context",
    "FRESH_PREFIX",
    "SourceSpan",
    "Const",
    "Null",
    "Var",
    "Term",
    "PredOp",
    "NamedPredicate",
    "register_predicate",
    "unregister_predicate",
    "lookup_predicate",
    "predicate_arity",
    "predicate_holds",
    "CondTrue",
    "CondFalse",
    "IsNull",
    "Pred",
    "Memb",
    "Exists",
    "And",
    "Or",
    "Not",
    "Cond",
    "BaseTable",
    "SubQuery",
    "TableRef",
    "FromItem",
    "Selection",
    "Select",
    "SelectStar",
    "UnionQuery",
    "IntersectQuery",
    "ExceptQuery",
    "SetOp",
    "Query",
    "SET_OP_KEYWORDS",
    "tm_lift",
    "tmlist_of_ctx",
    "SubstitutionError",
    "subst_select_list",
]
