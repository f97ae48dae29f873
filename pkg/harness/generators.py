"""Seeded random generators for databases, contexts, terms, conditions and queries.

Everything is driven by one :class:`random.Random`; the same seed always
yields the same stream. Per-trial generators come from :func:`rng_for`, which
derives an independent stream from ``(seed, stream name, trial index)`` so a
trial can be replayed on its own.

Generated queries are always accepted by the well-formedness checker over
the empty context. Depth bounds nesting of FROM subqueries, set operations and
condition subqueries alike. At depth 0 the generator emits a flat SELECT over
one base table.
"""
from __future__ import annotations

import logging
import random
import string
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from relations.kbag import Relation, Value, check_value
from store.database import Database
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
    Name,
    Not,
    Null,
    Or,
    Pred,
    PredOp,
    Query,
    Schema,
    Select,
    SelectStar,
    SubQuery,
    Term,
    UnionQuery,
    Var,
)

logger = logging.getLogger(__name__)

ALIAS_POOL: Tuple[Name, ...] = tuple(string.ascii_uppercase)
OUTPUT_POOL: Tuple[Name, ...] = ("A", "B", "C", "D")
DEFAULT_SCHEMAS: Dict[Name, Schema] = {"R": ("A", "B"), "S": ("A",)}

QUERY_KINDS = ("select", "star", "union", "intersect", "except")


@dataclass(frozen=True)
class GenConfig:
    """Bounds for random instances. Identical configs generate identical streams."""

    seed: int = 0
    max_rows: int = 4
    value_domain: Tuple[Value, ...] = (None, 0, 1, 2)
    max_query_depth: int = 3
    max_tables_per_from: int = 2
    max_select_width: int = 3
    trials: int = 100
    # cap on the estimated row count of any FROM product
    max_product_rows: int = 16

    def __post_init__(self) -> None:
        object.__setattr__(self, "value_domain", tuple(self.value_domain))
        for v in self.value_domain:
            check_value(v)
        for name in ("max_rows", "max_query_depth", "max_tables_per_from", "max_select_width", "trials"):
            if getattr(self, name) < 0:
                raise ValueError(f"GenConfig.{name} must be >= 0")
        if self.max_product_rows < 1:
            raise ValueError("GenConfig.max_product_rows must be >= 1")

    @property
    def constants(self) -> Tuple[Value, ...]:
        return tuple(v for v in self.value_domain if v is not None)


def rng_for(cfg: GenConfig, stream: str, trial: int) -> random.Random:
    """Independent generator for one trial of one named stream."""
    return random.Random(f"{cfg.seed}/{stream}/{trial}")


# ---- databases and environments ----


def gen_rows(cfg: GenConfig, width: int, rng: random.Random) -> List[Tuple[Value, ...]]:
    """Draw the rows of one table.

    Parameters
    - cfg: supplies ``max_rows`` and the value domain.
    - width: number of columns.
    - rng: the trial's random source.

    Returns
    - 0..max_rows tuples of ``width`` values drawn uniformly from the domain.
      Duplicates are kept. An empty domain yields no rows unless ``width`` is 0.
    """
    if width > 0 and not cfg.value_domain:
        return []
    n = rng.randint(0, cfg.max_rows)
    return [tuple(rng.choice(cfg.value_domain) for _ in range(width)) for _ in range(n)]


def gen_database(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], rng: Optional[random.Random] = None
) -> Database:
    """Fill every table with 0..max_rows rows drawn uniformly from the value domain."""
    rng = rng or random.Random(cfg.seed)
    tables = {}
    for name in sorted(schemas):
        schema = tuple(schemas[name])
        if len(set(schema)) != len(schema):
            raise ValueError(f"Schema of {name} has duplicate attributes: {schema}")
        tables[name] = (schema, Relation(len(schema), gen_rows(cfg, len(schema), rng)))
    return Database(tables)


def gen_context(cfg: GenConfig, rng: random.Random, max_scopes: int = 3) -> Tuple[Schema, ...]:
    """Random context of 1..max_scopes duplicate-free schemas (names may recur across scopes)."""
    width = max(1, cfg.max_select_width)
    return tuple(
        tuple(rng.sample(OUTPUT_POOL, rng.randint(1, min(width, len(OUTPUT_POOL)))))
        for _ in range(rng.randint(1, max_scopes))
    )


def gen_env(cfg: GenConfig, gamma: Sequence[Sequence[Name]], rng: random.Random) -> Tuple[Tuple[Value, ...], ...]:
    domain = cfg.value_domain or (None,)
    return tuple(tuple(rng.choice(domain) for _ in schema) for schema in gamma)


# ---- syntax ----


class QueryGenerator:
    """Depth-bounded random syntax over a fixed set of base-table schemas."""

    def __init__(self, cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], rng: random.Random) -> None:
        if not schemas:
            raise ValueError("Query generation needs at least one base table schema")
        self.cfg = cfg
        self.schemas = {name: tuple(s) for name, s in sorted(schemas.items())}
        self.rng = rng

    # ---- terms ----

    def term(self, ctx: Sequence[Sequence[Name]]) -> Term:
        """Random term over ``ctx``. NULL literals appear only when the value domain has NULL."""
        rng = self.rng
        options = ["null"] if None in self.cfg.value_domain else []
        if self.cfg.constants:
            options += ["const"] * 2
        bound = [(i, a) for i, s in enumerate(ctx) for a in s if Counter(s)[a] == 1]
        if bound:
            options += ["var"] * 6
        if not options:
            return Null()
        kind = rng.choice(options)
        if kind == "var":
            i, a = rng.choice(bound)
            return Var(i, a)
        if kind == "const":
            return Const(rng.choice(self.cfg.constants))  # type: ignore[arg-type]
        return Null()

    # ---- conditions ----

    def cond(self, ctx: Sequence[Sequence[Name]], depth: int) -> Cond:
        rng = self.rng
        kinds = ["true", "false", "isnull", "pred", "pred"]
        if depth > 0:
            kinds += ["and", "or", "not", "exists", "memb"]
        kind = rng.choice(kinds)
        if kind == "true":
            return CondTrue()
        if kind == "false":
            return CondFalse()
        if kind == "isnull":
            return IsNull(rng.random() < 0.5, self.term(ctx))
        if kind == "pred":
            return Pred(rng.choice(list(PredOp)), (self.term(ctx), self.term(ctx)))
        if kind == "and":
            return And(self.cond(ctx, depth - 1), self.cond(ctx, depth - 1))
        if kind == "or":
            return Or(self.cond(ctx, depth - 1), self.cond(ctx, depth - 1))
        if kind == "not":
            return Not(self.cond(ctx, depth - 1))
        if kind == "exists":
            q, _, _ = self._query(ctx, depth - 1, inquery=True)
            return Exists(q)
        k = rng.randint(1, max(1, min(2, self.cfg.max_select_width)))
        names = tuple(rng.choice(OUTPUT_POOL) for _ in range(k))
        q, _, _ = self._query_with_schema(ctx, depth - 1, names)
        return Memb(rng.random() < 0.5, tuple(self.term(ctx) for _ in range(k)), q)

    # ---- queries ----

    def query(self, depth: Optional[int] = None) -> Query:
        d = self.cfg.max_query_depth if depth is None else depth
        q, _, _ = self._query((), d)
        return q

    def _alias(self, n: int, avoid: Sequence[Name] = ()) -> Schema:
        pool = [a for a in ALIAS_POOL if a not in avoid]
        k = 1
        while len(pool) < n:
            pool += [f"{a}{k}" for a in ALIAS_POOL if f"{a}{k}" not in avoid]
            k += 1
        return tuple(self.rng.sample(pool, n))

    def _base_table(self, width: Optional[int] = None) -> Optional[Tuple[Name, Schema]]:
        names = [n for n, s in self.schemas.items() if width is None or len(s) == width]
        if not names:
            return None
        name = self.rng.choice(names)
        return name, self.schemas[name]

    def _from(
        self, gamma: Sequence[Sequence[Name]], depth: int, distinct_names: bool, single_base: bool = False
    ) -> Tuple[Tuple[FromItem, ...], int]:
        rng = self.rng
        count = 1 if single_base else rng.randint(1, max(1, self.cfg.max_tables_per_from))
        items: List[FromItem] = []
        used: List[Name] = []
        bound = 1
        for _ in range(count):
            source = None
            if not single_base and depth >= 0 and rng.random() < 0.3:
                sub, schema, sub_bound = self._query(gamma, depth)
                if sub_bound <= self.cfg.max_product_rows:
                    source = (SubQuery(sub), schema, sub_bound)
            if source is None:
                name, schema = self._base_table()  # type: ignore[misc]
                source = (BaseTable(name), schema, self.cfg.max_rows)
            table, schema, src_bound = source
            if items and bound * max(1, src_bound) > self.cfg.max_product_rows:
                break
            alias = self._alias(len(schema), used if distinct_names else ())
            used.extend(alias)
            items.append((table, alias))
            bound *= max(1, src_bound)
        return tuple(items), bound

    def _query(
        self, gamma: Sequence[Sequence[Name]], depth: int, inquery: bool = False
    ) -> Tuple[Query, Schema, int]:
        """Return (query, schema, estimated row bound)."""
        rng = self.rng
        gamma = tuple(tuple(s) for s in gamma)
        if depth <= 0:
            from_, bound = self._from(gamma, -1, distinct_names=True, single_base=True)
            inner = tuple(a for _, a in from_) + gamma
            width = rng.randint(1, max(1, self.cfg.max_select_width))
            sels = tuple((self.term(inner), rng.choice(OUTPUT_POOL)) for _ in range(width))
            q = Select(rng.random() < 0.3, sels, from_, self.cond(inner, 0))
            return q, q.schema, bound
        kind = rng.choice(QUERY_KINDS)
        if kind == "select":
            from_, bound = self._from(gamma, depth - 1, distinct_names=False)
            inner = tuple(a for _, a in from_) + gamma
            width = rng.randint(1, max(1, self.cfg.max_select_width))
            sels = tuple((self.term(inner), rng.choice(OUTPUT_POOL)) for _ in range(width))
            q = Select(rng.random() < 0.3, sels, from_, self.cond(inner, depth - 1))
            return q, q.schema, bound
        if kind == "star":
            from_, bound = self._from(gamma, depth - 1, distinct_names=not inquery or rng.random() < 0.5)
            inner = tuple(a for _, a in from_) + gamma
            q = SelectStar(rng.random() < 0.3, from_, self.cond(inner, depth - 1))
            return q, tuple(a for _, alias in from_ for a in alias), bound
        left, schema, lb = self._query(gamma, depth - 1)
        right, _, rb = self._query_with_schema(gamma, depth - 1, schema)
        return self._set_op(kind, left, right), schema, (lb + rb if kind == "union" else lb)

    def _set_op(self, kind: str, left: Query, right: Query) -> Query:
        all_ = self.rng.random() < 0.5
        if kind == "union":
            return UnionQuery(all_, left, right)
        if kind == "intersect":
            return IntersectQuery(all_, left, right)
        return ExceptQuery(all_, left, right)

    def _query_with_schema(
        self, gamma: Sequence[Sequence[Name]], depth: int, names: Sequence[Name]
    ) -> Tuple[Query, Schema, int]:
        """A query whose output schema is exactly ``names``."""
        rng = self.rng
        gamma = tuple(tuple(s) for s in gamma)
        names = tuple(names)
        kinds = ["select", "select"]
        if len(set(names)) == len(names) and (depth > 0 or self._base_table(len(names))):
            kinds.append("star")
        if depth > 0:
            kinds += ["union", "intersect", "except"]
        kind = rng.choice(kinds)
        if kind == "select":
            from_, bound = self._from(gamma, depth - 1, distinct_names=False, single_base=depth <= 0)
            inner = tuple(a for _, a in from_) + gamma
            sels = tuple((self.term(inner), n) for n in names)
            return Select(rng.random() < 0.3, sels, from_, self.cond(inner, max(0, depth - 1))), names, bound
        if kind == "star":
            base = self._base_table(len(names))
            if base is not None and (depth <= 0 or rng.random() < 0.5):
                table, bound = BaseTable(base[0]), self.cfg.max_rows
            else:
                sub, _, bound = self._query_with_schema(gamma, depth - 1, self._alias(len(names)))
                table = SubQuery(sub)
            inner = (names,) + gamma
            q = SelectStar(rng.random() < 0.3, ((table, names),), self.cond(inner, max(0, depth - 1)))
            return q, names, bound
        left, _, lb = self._query_with_schema(gamma, depth - 1, names)
        right, _, rb = self._query_with_schema(gamma, depth - 1, names)
        return self._set_op(kind, left, right), names, (lb + rb if kind == "union" else lb)


def gen_query(
    cfg: GenConfig,
    schemas: Mapping[Name, Sequence[Name]],
    rng: Optional[random.Random] = None,
    depth: Optional[int] = None,
) -> Query:
    """Random query accepted by ``wf_query`` over the empty context."""
    return QueryGenerator(cfg, schemas, rng or random.Random(cfg.seed)).query(depth)


def gen_query_with_schema(
    cfg: GenConfig,
    schemas: Mapping[Name, Sequence[Name]],
    names: Sequence[Name],
    rng: random.Random,
    gamma: Sequence[Sequence[Name]] = (),
    depth: Optional[int] = None,
) -> Query:
    """Random query in context ``gamma`` whose output schema is exactly ``names``.

    Used for IN subqueries and the right side of set operations. ``names`` may
    repeat; SELECT * is then never chosen at the top.
    """
    d = cfg.max_query_depth if depth is None else depth
    q, _, _ = QueryGenerator(cfg, schemas, rng)._query_with_schema(gamma, d, names)
    return q


def gen_cond(
    cfg: GenConfig,
    schemas: Mapping[Name, Sequence[Name]],
    gamma: Sequence[Sequence[Name]],
    rng: random.Random,
    depth: Optional[int] = None,
) -> Cond:
    """Random condition well formed in context ``gamma``."""
    d = cfg.max_query_depth if depth is None else depth
    return QueryGenerator(cfg, schemas, rng).cond(gamma, d)


def gen_term(
    cfg: GenConfig, schemas: Mapping[Name, Sequence[Name]], gamma: Sequence[Sequence[Name]], rng: random.Random
) -> Term:
    """Random term well formed in ``gamma``: a bound variable or a literal."""
    return QueryGenerator(cfg, schemas, rng).term(gamma)


__all__ = [
    "GenConfig",
    "DEFAULT_SCHEMAS",
    "QUERY_KINDS",
    "rng_for",
    "gen_rows",
    "gen_database",
    "gen_context",
    "gen_env",
    "QueryGenerator",
    "gen_query",
    "gen_query_with_schema",
    "gen_cond",
    "gen_term",
]
