"""Truth-value domains used to evaluate conditions.

Two instances share one interface (:class:`Logic`):

- ``TWO_VALUED``: carrier ``{True, False}``. "maybe" collapses to False.
- ``THREE_VALUED``: carrier :class:`Tribool` with Kleene's strong connectives
  (AND = min, OR = max, NOT swaps TRUE/FALSE and fixes UNKNOWN).

Value equality (:meth:`Logic.veq`) and predicate lifting
(:meth:`Logic.sem_bpred`) are shared: any NULL argument yields ``bmaybe``.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from enum import IntEnum
from typing import Dict, Sequence, Tuple, Union

from relations.kbag import Value
from syntax.ast import PredOp, predicate_arity, predicate_holds

logger = logging.getLogger(__name__)


class Tribool(IntEnum):
    """Kleene truth values ordered FALSE < UNKNOWN < TRUE."""

    FALSE = 0
    UNKNOWN = 1
    TRUE = 2

    def __str__(self) -> str:
        return self.name


TruthValue = Union[bool, Tribool]


class Logic(ABC):
    """Abstract truth-value structure: constants, connectives and tests."""

    name: str = ""

    @property
    @abstractmethod
    def btrue(self) -> TruthValue: ...

    @property
    @abstractmethod
    def bfalse(self) -> TruthValue: ...

    @property
    @abstractmethod
    def bmaybe(self) -> TruthValue: ...

    @property
    @abstractmethod
    def values(self) -> Tuple[TruthValue, ...]:
        """The carrier, in increasing truth order."""

    @abstractmethod
    def band(self, a: TruthValue, b: TruthValue) -> TruthValue: ...

    @abstractmethod
    def bor(self, a: TruthValue, b: TruthValue) -> TruthValue: ...

    @abstractmethod
    def bneg(self, a: TruthValue) -> TruthValue: ...

    def is_btrue(self, x: TruthValue) -> bool:
        return x == self.btrue

    def is_bfalse(self, x: TruthValue) -> bool:
        return x == self.bfalse

    def of_bool(self, b: bool) -> TruthValue:
        return self.btrue if b else self.bfalse

    def veq(self, v: Value, w: Value) -> TruthValue:
        """Condition-level equality: NULL is not equal to anything, itself included."""
        if v is None or w is None:
            return self.bmaybe
        return self.of_bool(v == w and type(v) is type(w))

    def sem_bpred(self, op: Union[PredOp, str], args: Sequence[Value]) -> TruthValue:
        """Lift a boolean predicate over constants to values."""
        arity = predicate_arity(op)
        if arity is None:
            raise KeyError(f"Unknown predicate: {op}")
        if len(args) != arity:
            raise ValueError(f"Predicate {op} expects {arity} arguments, got {len(args)}")
        if any(a is None for a in args):
            return self.bmaybe
        return self.of_bool(predicate_holds(op, args))  # type: ignore[arg-type]

    def __repr__(self) -> str:
        return f"<Logic {self.name}>"


class TwoValuedLogic(Logic):
    name = "2vl"

    @property
    def btrue(self) -> bool:
        return True

    @property
    def bfalse(self) -> bool:
        return False

    @property
    def bmaybe(self) -> bool:
        return False

    @property
    def values(self) -> Tuple[bool, ...]:
        return (False, True)

    def band(self, a: TruthValue, b: TruthValue) -> bool:
        return bool(a) and bool(b)

    def bor(self, a: TruthValue, b: TruthValue) -> bool:
        return bool(a) or bool(b)

    def bneg(self, a: TruthValue) -> bool:
        return not a


class ThreeValuedLogic(Logic):
    name = "3vl"

    @property
    def btrue(self) -> Tribool:
        return Tribool.TRUE

    @property
    def bfalse(self) -> Tribool:
        return Tribool.FALSE

    @property
    def bmaybe(self) -> Tribool:
        return Tribool.UNKNOWN

    @property
    def values(self) -> Tuple[Tribool, ...]:
        return (Tribool.FALSE, Tribool.UNKNOWN, Tribool.TRUE)

    def band(self, a: TruthValue, b: TruthValue) -> Tribool:
        return Tribool(min(a, b))

    def bor(self, a: TruthValue, b: TruthValue) -> Tribool:
        return Tribool(max(a, b))

    def bneg(self, a: TruthValue) -> Tribool:
        return Tribool(Tribool.TRUE - a)


TWO_VALUED = TwoValuedLogic()
THREE_VALUED = ThreeValuedLogic()

LOGICS: Dict[str, Logic] = {TWO_VALUED.name: TWO_VALUED, THREE_VALUED.name: THREE_VALUED}


def get_logic(flag: str) -> Logic:
    """Resolve a ``2vl`` / ``3vl`` flag (case-insensitive)."""
    try:
        return LOGICS[flag.strip().lower()]
    except KeyError:
        raise ValueError(f"Unknown logic {flag!r}; expected one of {sorted(LOGICS)}") from None


def connective_tables() -> Dict[str, Dict[str, dict]]:
    """Full band/bor/bneg tables for both instances, keyed by logic name."""
    tables: Dict[str, Dict[str, dict]] = {}
    for name, logic in LOGICS.items():
        vals = logic.values
        tables[name] = {
            "band": {(a, b): logic.band(a, b) for a in vals for b in vals},
            "bor": {(a, b): logic.bor(a, b) for a in vals for b in vals},
            "bneg": {a: logic.bneg(a) for a in vals},
        }
    return tables


__all__ = [
    "Tribool",
    "TruthValue",
    "Logic",
    "TwoValuedLogic",
    "ThreeValuedLogic",
    "TWO_VALUED",
    "THREE_VALUED",
    "LOGICS",
    "get_logic",
    "connective_tables",
]
