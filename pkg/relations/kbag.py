"""Finitely supported multisets of fixed-arity tuples (N-valued K-relations).

A :class:`Relation` stores its rows as one canonically sorted tuple, with
duplicates adjacent. Two relations are equal as data exactly when they hold
the same multiset, so extensional equality is plain ``==``.

Values are Python scalars:

- ``None`` is NULL,
- ``int`` (signed 64-bit) and ``str`` are the base constants.

The global value order is NULL < every Int < every Str. Within a kind it is
numeric order or codepoint order.

Examples
--------
from relations.kbag import from_rows

r = from_rows(1, [(2,), (1,), (2,)])
r.rows            # ((1,), (2,), (2,))
r.memb((2,))      # 2
r.flat().card()   # 2
"""
from __future__ import annotations

import logging
from collections import Counter
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

BaseConst = Union[int, str]
Value = Optional[BaseConst]
Row = Tuple[Value, ...]

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1


class ArityError(ValueError):
    """A row, tuple or mapped tuple does not have the arity an operation expects."""

    def __init__(
        self,
        message: str,
        *,
        row_index: int | None = None,
        expected: int | None = None,
        actual: int | None = None,
    ) -> None:
        super().__init__(message)
        self.row_index = row_index
        self.expected = expected
        self.actual = actual


def is_value(v: object) -> bool:
    """Return True when ``v`` is NULL, a 64-bit int (bools excluded) or a str."""
    if v is None or isinstance(v, str):
        return True
    if isinstance(v, int) and not isinstance(v, bool):
        return INT64_MIN <= v <= INT64_MAX
    return False


def check_value(v: object) -> Value:
    """Return ``v`` unchanged when it is a valid value, else raise ValueError."""
    if not is_value(v):
        if isinstance(v, int) and not isinstance(v, bool):
            raise ValueError(f"Integer out of signed 64-bit range: {v}")
        raise ValueError(f"Not a value (expected NULL, int or str): {v!r}")
    return v  # type: ignore[return-value]


def value_key(v: Value) -> tuple:
    """Sort key realizing the total order NULL < Int < Str."""
    if v is None:
        return (0,)
    if isinstance(v, str):
        return (2, v)
    return (1, v)


def row_key(row: Row) -> tuple:
    """Lexicographic extension of :func:`value_key` to tuples."""
    return tuple(value_key(v) for v in row)


def compare_consts(a: BaseConst, b: BaseConst) -> int:
    """Three-way comparison of two constants under the global order."""
    ka, kb = value_key(a), value_key(b)
    return (ka > kb) - (ka < kb)


class Relation:
    """Immutable canonical multiset of tuples of one arity.

    Use :func:`from_rows` (or the constructor) to build one; every operation
    returns a new canonical relation. Operations that combine two relations
    require equal arities and raise :class:`ArityError` otherwise.
    """

    __slots__ = ("_arity", "_rows", "_counts")

    def __init__(self, arity: int, rows: Iterable[Sequence[Value]] = ()) -> None:
        if arity < 0:
            raise ArityError(f"Arity must be non-negative, got {arity}")
        counts: Counter = Counter()
        for i, raw in enumerate(rows):
            row = tuple(raw)
            if len(row) != arity:
                raise ArityError(
                    f"Row {i} has arity {len(row)}, expected {arity}: {row!r}",
                    row_index=i,
                    expected=arity,
                    actual=len(row),
                )
            for v in row:
                check_value(v)
            counts[row] += 1
        self._arity = arity
        self._counts: Dict[Row, int] = dict(counts)
        self._rows: Tuple[Row, ...] = _expand(counts)

    @classmethod
    def _from_counts(cls, arity: int, counts: Mapping[Row, int]) -> "Relation":
        # Trusted fast path: rows already validated by the operands.
        rel = cls.__new__(cls)
        rel._arity = arity
        rel._counts = {row: n for row, n in counts.items() if n > 0}
        rel._rows = _expand(rel._counts)
        if __debug__:
            rel._check_canonical()
        return rel

    # ---- data access ----

    @property
    def arity(self) -> int:
        return self._arity

    @property
    def rows(self) -> Tuple[Row, ...]:
        """All rows in canonical order, duplicates adjacent."""
        return self._rows

    def counts(self) -> Dict[Row, int]:
        """Copy of the multiplicity map (only tuples with memb > 0)."""
        return dict(self._counts)

    def __iter__(self) -> Iterator[Row]:
        return iter(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self._arity == other._arity and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._arity, self._rows))

    def __repr__(self) -> str:
        return f"Relation(arity={self._arity}, rows={list(self._rows)!r})"

    # ---- signature ----

    def memb(self, t: Sequence[Value]) -> int:
        """Multiplicity of ``t``. Membership is syntactic: NULL matches NULL."""
        t = tuple(t)
        if len(t) != self._arity:
            raise ArityError(
                f"memb: tuple arity {len(t)} does not match relation arity {self._arity}",
                expected=self._arity,
                actual=len(t),
            )
        return self._counts.get(t, 0)

    def plus(self, other: "Relation") -> "Relation":
        """Bag union: multiplicities add up.

        Parameters
        - other: relation of the same arity.

        Returns
        - A new relation with ``memb(t) = memb(self, t) + memb(other, t)``.

        Raises ArityError when the arities differ.
        """
        self._same_arity(other, "plus")
        counts = Counter(self._counts)
        counts.update(other._counts)
        return Relation._from_counts(self._arity, counts)

    def minus(self, other: "Relation") -> "Relation":
        """Truncated difference: ``max(0, memb(self, t) - memb(other, t))``."""
        self._same_arity(other, "minus")
        counts = {row: n - other._counts.get(row, 0) for row, n in self._counts.items()}
        return Relation._from_counts(self._arity, counts)

    def inter(self, other: "Relation") -> "Relation":
        """Bag intersection: each row keeps the smaller of its two multiplicities.

        Parameters
        - other: relation of the same arity.

        Returns
        - A new relation with ``memb(t) = min(memb(self, t), memb(other, t))``.
        """
        self._same_arity(other, "inter")
        counts = {
            row: min(n, other._counts[row])
            for row, n in self._counts.items()
            if row in other._counts
        }
        return Relation._from_counts(self._arity, counts)

    def times(self, other: "Relation") -> "Relation":
        """Cartesian product; this relation's columns come first."""
        counts = {
            r1 + r2: n1 * n2
            for r1, n1 in self._counts.items()
            for r2, n2 in other._counts.items()
        }
        return Relation._from_counts(self._arity + other._arity, counts)

    def sum(self, f: Callable[[Row], Sequence[Value]], arity: int) -> "Relation":
        """Map every row through ``f`` and add up multiplicities of equal images.

        Parameters
        - f: total function from rows of this relation to tuples of ``arity``.
          It is called once per distinct row.
        - arity: arity of the result (needed when this relation is empty).
        """
        counts: Counter = Counter()
        for row in sorted(self._counts, key=row_key):
            image = tuple(f(row))
            if len(image) != arity:
                raise ArityError(
                    f"sum: mapped tuple {image!r} has arity {len(image)}, expected {arity}",
                    expected=arity,
                    actual=len(image),
                )
            counts[image] += self._counts[row]
        return Relation._from_counts(arity, counts)

    def sel(self, p: Callable[[Row], bool]) -> "Relation":
        """Keep rows satisfying ``p`` with their full multiplicity."""
        counts = {row: n for row, n in self._counts.items() if p(row)}
        return Relation._from_counts(self._arity, counts)

    def flat(self) -> "Relation":
        """Duplicate elimination: every supported tuple gets multiplicity 1."""
        return Relation._from_counts(self._arity, {row: 1 for row in self._counts})

    def supp(self) -> Tuple[Row, ...]:
        """Duplicate-free support in canonical order."""
        return tuple(sorted(self._counts, key=row_key))

    def card(self) -> int:
        """Number of rows counted with multiplicity."""
        return len(self._rows)

    # ---- internals ----

    def _same_arity(self, other: "Relation", op: str) -> None:
        if self._arity != other._arity:
            raise ArityError(
                f"{op}: arity mismatch {self._arity} vs {other._arity}",
                expected=self._arity,
                actual=other._arity,
            )

    def _check_canonical(self) -> None:
        keys = [row_key(r) for r in self._rows]
        assert all(len(r) == self._arity for r in self._rows), "row arity invariant"
        assert all(a <= b for a, b in zip(keys, keys[1:])), "canonical order invariant"


def _expand(counts: Mapping[Row, int]) -> Tuple[Row, ...]:
    out = []
    for row in sorted(counts, key=row_key):
        out.extend([row] * counts[row])
    return tuple(out)


def from_rows(arity: int, rows: Iterable[Sequence[Value]]) -> Relation:
    """Build the canonical relation holding exactly the multiset ``rows``.

    Raises ArityError naming the offending row index on a length mismatch.
    """
    return Relation(arity, rows)


def empty(arity: int) -> Relation:
    """The empty relation of the given arity."""
    return Relation(arity, ())


RNIL = Relation(0, ())
RONE = Relation(0, [()])


__all__ = [
    "ArityError",
    "BaseConst",
    "Value",
    "Row",
    "Relation",
    "from_rows",
    "empty",
    "RNIL",
    "RONE",
    "is_value",
    "check_value",
    "value_key",
    "row_key",
    "compare_consts",
    "INT64_MIN",
    "INT64_MAX",
]
