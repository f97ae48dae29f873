"""Relations package: the canonical multiset model every evaluator result lives in.

Exports:
- Relation, from_rows, empty, RNIL, RONE
- ArityError
"""
from .kbag import Relation, from_rows, empty, RNIL, RONE, ArityError  # noqa: F401
