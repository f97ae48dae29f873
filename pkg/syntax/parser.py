"""Concrete syntax reader and printer for the SQL fragment.

Grammar (keywords are case-insensitive, names case-sensitive)::

    query     := primary ((UNION | INTERSECT | EXCEPT) [ALL] primary)*      -- left-assoc
    primary   := select | "(" query ")"
    select    := SELECT [DISTINCT] ("*" | term AS name ("," term AS name)*)
                 FROM fromitem ("," fromitem)* WHERE cond
    fromitem  := (TABLE name | QUERY "(" query ")") AS "(" [name ("," name)*] ")"
    term      := INT | 'string' | NULL | nat "." name
    cond      := cond OR cond | cond AND cond | NOT cond | "(" cond ")"
               | TRUE | FALSE | EXISTS "(" query ")"
               | term IS [NOT] NULL | term cmp term
               | term [NOT] IN "(" query ")"
               | "(" [term ("," term)*] ")" [NOT] IN "(" query ")"
               | name "(" [term ("," term)*] ")"            -- registered predicate

Names are plain identifiers or double-quoted (``"SELECT"``, ``""`` escapes a
quote). Generated names such as ``?a0`` lex as names; :func:`parse_query`
accepts them only with ``allow_fresh=True``. ``--`` starts a line comment.

Examples
--------
from syntax.parser import parse_query, render

q = parse_query("SELECT 0.A AS A FROM table R AS (A,B,C) WHERE TRUE")
assert parse_query(render(q)) == q
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum, auto
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

from relations.kbag import INT64_MAX, INT64_MIN
from syntax.ast import (
    FRESH_PREFIX,
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
    Select,
    SelectStar,
    Selection,
    SourceSpan,
    SubQuery,
    Term,
    UnionQuery,
    Var,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")


class TokenType(Enum):
    INT = auto()
    STRING = auto()
    NAME = auto()
    SYMBOL = auto()
    EOF = auto()
    # keywords
    SELECT = auto()
    DISTINCT = auto()
    FROM = auto()
    WHERE = auto()
    AS = auto()
    TABLE = auto()
    QUERY = auto()
    UNION = auto()
    INTERSECT = auto()
    EXCEPT = auto()
    ALL = auto()
    TRUE = auto()
    FALSE = auto()
    NULL = auto()
    IS = auto()
    NOT = auto()
    IN = auto()
    EXISTS = auto()
    AND = auto()
    OR = auto()


KEYWORDS = {
    t.name: t
    for t in TokenType
    if t not in (TokenType.INT, TokenType.STRING, TokenType.NAME, TokenType.SYMBOL, TokenType.EOF)
}

_COMPARATORS = {
    "=": PredOp.EQ,
    "<>": PredOp.NEQ,
    "!=": PredOp.NEQ,
    "<": PredOp.LT,
    "<=": PredOp.LE,
    ">": PredOp.GT,
    ">=": PredOp.GE,
}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_FRESH = re.compile(re.escape(FRESH_PREFIX) + r"[A-Za-z0-9_]+\Z")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>--[^\n]*)
  | (?P<int>-?\d+)
  | (?P<string>'(?:[^']|'')*')
  | (?P<qname>"(?:[^"]|"")*")
  | (?P<fresh>""" + re.escape(FRESH_PREFIX) + r"""[A-Za-z0-9_]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<symbol><>|!=|<=|>=|[(),.*=<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    type: TokenType
    text: str
    value: object
    span: SourceSpan
    fresh: bool = False


class ParseError(ValueError):
    """Lexical or syntactic error with the offending span."""

    def __init__(self, message: str, span: SourceSpan) -> None:
        super().__init__(message)
        self.message = message
        self.span = span

    def line_col(self, text: str) -> Tuple[int, int]:
        return self.span.line_col(text)

    def format(self, text: str) -> str:
        line, col = self.line_col(text)
        return f"{line}:{col}: {self.message}"


def tokenize(text: str) -> List[Token]:
    """Split ``text`` into tokens, ending with an EOF token."""
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == "'":
                raise ParseError("unterminated string literal", SourceSpan(pos, len(text)))
            if text[pos] == '"':
                raise ParseError("unterminated quoted name", SourceSpan(pos, len(text)))
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1))
        kind = m.lastgroup
        lexeme = m.group()
        span = SourceSpan(m.start(), m.end())
        pos = m.end()
        if kind in ("ws", "comment"):
            continue
        if kind == "int":
            value = int(lexeme)
            if not INT64_MIN <= value <= INT64_MAX:
                raise ParseError(f"integer literal out of signed 64-bit range: {lexeme}", span)
            tokens.append(Token(TokenType.INT, lexeme, value, span))
        elif kind == "string":
            tokens.append(Token(TokenType.STRING, lexeme, lexeme[1:-1].replace("''", "'"), span))
        elif kind == "qname":
            name = lexeme[1:-1].replace('""', '"')
            if not name:
                raise ParseError("empty quoted name", span)
            tokens.append(Token(TokenType.NAME, lexeme, name, span, fresh=name.startswith(FRESH_PREFIX)))
        elif kind == "fresh":
            tokens.append(Token(TokenType.NAME, lexeme, lexeme, span, fresh=True))
        elif kind == "ident":
            kw = KEYWORDS.get(lexeme.upper())
            if kw is not None:
                tokens.append(Token(kw, lexeme, lexeme.upper(), span))
            else:
                tokens.append(Token(TokenType.NAME, lexeme, lexeme, span))
        else:
            tokens.append(Token(TokenType.SYMBOL, lexeme, lexeme, span))
    tokens.append(Token(TokenType.EOF, "", None, SourceSpan(len(text), len(text))))
    return tokens


class Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, tokens: List[Token], *, allow_fresh: bool = False) -> None:
        self.tokens = tokens
        self.pos = 0
        self.allow_fresh = allow_fresh

    # ---- token helpers ----

    def _current(self) -> Token:
        return self.tokens[self.pos]

    def _peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def _check(self, *types: TokenType) -> bool:
        return self._current().type in types

    def _check_symbol(self, *symbols: str) -> bool:
        tok = self._current()
        return tok.type is TokenType.SYMBOL and tok.text in symbols

    def _advance(self) -> Token:
        tok = self._current()
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def _match(self, *types: TokenType) -> bool:
        if self._check(*types):
            self._advance()
            return True
        return False

    def _match_symbol(self, symbol: str) -> bool:
        if self._check_symbol(symbol):
            self._advance()
            return True
        return False

    def _expect(self, type_: TokenType, what: str | None = None) -> Token:
        if not self._check(type_):
            raise self._error(f"expected {what or type_.name}")
        return self._advance()

    def _expect_symbol(self, symbol: str) -> Token:
        if not self._check_symbol(symbol):
            raise self._error(f"expected '{symbol}'")
        return self._advance()

    def _error(self, message: str) -> ParseError:
        tok = self._current()
        found = "end of input" if tok.type is TokenType.EOF else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.span)

    def _span_from(self, start: Token) -> SourceSpan:
        end = self.tokens[self.pos - 1].span.end if self.pos > 0 else start.span.end
        return SourceSpan(start.span.start, max(end, start.span.start))

    def _comma_list(self, item: Callable[[], T], closer: str = ")") -> List[T]:
        items: List[T] = []
        if self._check_symbol(closer):
            return items
        items.append(item())
        while self._match_symbol(","):
            items.append(item())
        return items

    # ---- entry points ----

    def parse_query(self) -> Query:
        q = self._query()
        if not self._check(TokenType.EOF):
            raise self._error("expected end of query")
        return q

    def parse_cond(self) -> Cond:
        c = self._cond()
        if not self._check(TokenType.EOF):
            raise self._error("expected end of condition")
        return c

    # ---- queries ----

    def _query(self) -> Query:
        start = self._current()
        left = self._query_primary()
        while self._check(TokenType.UNION, TokenType.INTERSECT, TokenType.EXCEPT):
            op = self._advance().type
            all_ = self._match(TokenType.ALL)
            right = self._query_primary()
            span = self._span_from(start)
            if op is TokenType.UNION:
                left = UnionQuery(all_, left, right, span=span)
            elif op is TokenType.INTERSECT:
                left = IntersectQuery(all_, left, right, span=span)
            else:
                left = ExceptQuery(all_, left, right, span=span)
        return left

    def _query_primary(self) -> Query:
        if self._match_symbol("("):
            q = self._query()
            self._expect_symbol(")")
            return q
        if self._check(TokenType.SELECT):
            return self._select()
        raise self._error("expected SELECT or '('")

    def _select(self) -> Query:
        start = self._expect(TokenType.SELECT)
        distinct = self._match(TokenType.DISTINCT)
        star = self._match_symbol("*")
        selections: List[Selection] = []
        if not star:
            selections.append(self._selitem())
            while self._match_symbol(","):
                selections.append(self._selitem())
        self._expect(TokenType.FROM, "FROM")
        from_ = [self._fromitem()]
        while self._match_symbol(","):
            from_.append(self._fromitem())
        if not self._check(TokenType.WHERE):
            raise self._error("missing mandatory WHERE clause")
        self._advance()
        where = self._cond()
        span = self._span_from(start)
        if star:
            return SelectStar(distinct, tuple(from_), where, span=span)
        return Select(distinct, tuple(selections), tuple(from_), where, span=span)

    def _selitem(self) -> Selection:
        term = self._term()
        if not self._check(TokenType.AS):
            raise self._error("missing mandatory AS after select term")
        self._advance()
        return term, self._name()

    def _fromitem(self) -> FromItem:
        start = self._current()
        if self._match(TokenType.TABLE):
            table = BaseTable(self._name())
        elif self._match(TokenType.QUERY):
            self._expect_symbol("(")
            table = SubQuery(self._query())
            self._expect_symbol(")")
        else:
            raise self._error("expected 'table' or 'query' in FROM")
        if not self._check(TokenType.AS):
            raise self._error("missing mandatory AS alias for FROM item")
        self._advance()
        self._expect_symbol("(")
        alias = tuple(self._comma_list(self._name))
        self._expect_symbol(")")
        span = self._span_from(start)
        if isinstance(table, BaseTable):
            table = BaseTable(table.name, span=span)
        else:
            table = SubQuery(table.query, span=span)
        return table, alias

    def _name(self) -> Name:
        tok = self._current()
        if tok.type is not TokenType.NAME:
            raise self._error("expected a name")
        if tok.fresh and not self.allow_fresh:
            raise ParseError(f"names starting with {FRESH_PREFIX!r} are reserved: {tok.text}", tok.span)
        self._advance()
        return str(tok.value)

    # ---- terms ----

    def _term(self) -> Term:
        tok = self._current()
        if tok.type is TokenType.INT:
            self._advance()
            if self._check_symbol("."):
                if tok.text.startswith("-"):
                    raise ParseError("table index must be a natural number", tok.span)
                self._advance()
                attr = self._name()
                return Var(int(tok.value), attr, span=self._span_from(tok))  # type: ignore[arg-type]
            return Const(int(tok.value), span=tok.span)  # type: ignore[arg-type]
        if tok.type is TokenType.STRING:
            self._advance()
            return Const(str(tok.value), span=tok.span)
        if tok.type is TokenType.NULL:
            self._advance()
            return Null(span=tok.span)
        raise self._error("expected a term (integer, 'string', NULL or n.name)")

    # ---- conditions ----

    def _cond(self) -> Cond:
        start = self._current()
        left = self._and()
        while self._match(TokenType.OR):
            right = self._and()
            left = Or(left, right, span=self._span_from(start))
        return left

    def _and(self) -> Cond:
        start = self._current()
        left = self._not()
        while self._match(TokenType.AND):
            right = self._not()
            left = And(left, right, span=self._span_from(start))
        return left

    def _not(self) -> Cond:
        start = self._current()
        if self._match(TokenType.NOT):
            inner = self._not()
            return Not(inner, span=self._span_from(start))
        return self._atom()

    def _atom(self) -> Cond:
        tok = self._current()
        if self._match(TokenType.TRUE):
            return CondTrue(span=tok.span)
        if self._match(TokenType.FALSE):
            return CondFalse(span=tok.span)
        if self._match(TokenType.EXISTS):
            self._expect_symbol("(")
            q = self._query()
            self._expect_symbol(")")
            return Exists(q, span=self._span_from(tok))
        if self._check_symbol("("):
            # "(t1, ..., tn) [NOT] IN" or a parenthesized condition
            saved = self.pos
            terms = self._try_term_tuple()
            if terms is not None and self._check(TokenType.NOT, TokenType.IN):
                return self._membership(tok, terms)
            self.pos = saved
            self._advance()
            c = self._cond()
            self._expect_symbol(")")
            return c
        if tok.type is TokenType.NAME and self._peek().type is TokenType.SYMBOL and self._peek().text == "(":
            name = self._name()
            self._expect_symbol("(")
            args = self._comma_list(self._term)
            self._expect_symbol(")")
            return Pred(name, tuple(args), span=self._span_from(tok))
        term = self._term()
        if self._match(TokenType.IS):
            negated = self._match(TokenType.NOT)
            self._expect(TokenType.NULL, "NULL")
            return IsNull(not negated, term, span=self._span_from(tok))
        cmp_tok = self._current()
        if cmp_tok.type is TokenType.SYMBOL and cmp_tok.text in _COMPARATORS:
            self._advance()
            rhs = self._term()
            return Pred(_COMPARATORS[cmp_tok.text], (term, rhs), span=self._span_from(tok))
        if self._check(TokenType.NOT, TokenType.IN):
            return self._membership(tok, (term,))
        raise self._error("expected IS, a comparison or IN after term")

    def _try_term_tuple(self) -> Optional[Tuple[Term, ...]]:
        try:
            self._expect_symbol("(")
            terms = self._comma_list(self._term)
            self._expect_symbol(")")
        except ParseError:
            return None
        return tuple(terms)

    def _membership(self, start: Token, terms: Tuple[Term, ...]) -> Cond:
        is_in = not self._match(TokenType.NOT)
        self._expect(TokenType.IN, "IN")
        self._expect_symbol("(")
        q = self._query()
        self._expect_symbol(")")
        return Memb(is_in, terms, q, span=self._span_from(start))


def parse_query(text: str, *, allow_fresh: bool = False) -> Query:
    """Parse one query. Raises :class:`ParseError` with a span on failure."""
    query = Parser(tokenize(text), allow_fresh=allow_fresh).parse_query()
    logger.debug("Parsed query (%d chars)", len(text))
    return query


def parse_cond(text: str, *, allow_fresh: bool = False) -> Cond:
    """Parse a standalone condition."""
    return Parser(tokenize(text), allow_fresh=allow_fresh).parse_cond()


# ---- rendering ----

_PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4


def render_name(name: Name) -> str:
    if _FRESH.match(name):
        return name
    if _IDENT.match(name) and name.upper() not in KEYWORDS:
        return name
    return '"' + name.replace('"', '""') + '"'


def render_term(t: Term) -> str:
    if isinstance(t, Null):
        return "NULL"
    if isinstance(t, Var):
        return f"{t.index}.{render_name(t.attr)}"
    if isinstance(t.value, str):
        return "'" + t.value.replace("'", "''") + "'"
    return str(t.value)


def _render_terms(ts: Sequence[Term]) -> str:
    return ", ".join(render_term(t) for t in ts)


def _render_schema(schema: Sequence[Name]) -> str:
    return "(" + ", ".join(render_name(a) for a in schema) + ")"


def render_cond(c: Cond) -> str:
    return _render_cond(c, _PREC_OR)


def _cond_prec(c: Cond) -> int:
    if isinstance(c, Or):
        return _PREC_OR
    if isinstance(c, And):
        return _PREC_AND
    if isinstance(c, Not):
        return _PREC_NOT
    return _PREC_ATOM


def _render_cond(c: Cond, min_prec: int) -> str:
    if isinstance(c, Or):
        text = f"{_render_cond(c.left, _PREC_OR)} OR {_render_cond(c.right, _PREC_AND)}"
    elif isinstance(c, And):
        text = f"{_render_cond(c.left, _PREC_AND)} AND {_render_cond(c.right, _PREC_NOT)}"
    elif isinstance(c, Not):
        text = f"NOT {_render_cond(c.cond, _PREC_NOT)}"
    elif isinstance(c, CondTrue):
        text = "TRUE"
    elif isinstance(c, CondFalse):
        text = "FALSE"
    elif isinstance(c, IsNull):
        text = f"{render_term(c.term)} IS {'NULL' if c.is_null else 'NOT NULL'}"
    elif isinstance(c, Pred):
        if isinstance(c.op, PredOp):
            if len(c.args) != 2:
                raise TypeError(f"Comparison {c.op.symbol} needs 2 arguments, got {len(c.args)}")
            text = f"{render_term(c.args[0])} {c.op.symbol} {render_term(c.args[1])}"
        else:
            text = f"{render_name(c.op)}({_render_terms(c.args)})"
    elif isinstance(c, Memb):
        lhs = render_term(c.terms[0]) if len(c.terms) == 1 else f"({_render_terms(c.terms)})"
        text = f"{lhs} {'IN' if c.is_in else 'NOT IN'} ({render(c.query)})"
    elif isinstance(c, Exists):
        text = f"EXISTS ({render(c.query)})"
    else:
        raise TypeError(f"Not a condition: {c!r}")
    return f"({text})" if _cond_prec(c) < min_prec else text


def _render_from(from_: Sequence[FromItem]) -> str:
    items = []
    for table, alias in from_:
        if isinstance(table, BaseTable):
            src = f"table {render_name(table.name)}"
        else:
            src = f"query ({render(table.query)})"
        items.append(f"{src} AS {_render_schema(alias)}")
    return ", ".join(items)


def render(q: Query) -> str:
    """Print a query so that ``parse_query(render(q), allow_fresh=True) == q``."""
    if isinstance(q, Select):
        head = "SELECT DISTINCT " if q.distinct else "SELECT "
        items = ", ".join(f"{render_term(t)} AS {render_name(x)}" for t, x in q.selections)
        return f"{head}{items} FROM {_render_from(q.from_)} WHERE {render_cond(q.where)}"
    if isinstance(q, SelectStar):
        head = "SELECT DISTINCT *" if q.distinct else "SELECT *"
        return f"{head} FROM {_render_from(q.from_)} WHERE {render_cond(q.where)}"
    if isinstance(q, (UnionQuery, IntersectQuery, ExceptQuery)):
        kw = {UnionQuery: "UNION", IntersectQuery: "INTERSECT", ExceptQuery: "EXCEPT"}[type(q)]
        if q.all:
            kw += " ALL"
        right = render(q.right)
        if isinstance(q.right, (UnionQuery, IntersectQuery, ExceptQuery)):
            right = f"({right})"
        return f"{render(q.left)} {kw} {right}"
    raise TypeError(f"Not a query: {q!r}")


__all__ = [
    "TokenType",
    "Token",
    "ParseError",
    "tokenize",
    "Parser",
    "parse_query",
    "parse_cond",
    "render",
    "render_cond",
    "render_term",
    "render_name",
]
