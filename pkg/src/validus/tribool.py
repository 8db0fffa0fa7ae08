"""Three-valued truth values with strong Kleene connectives.

TRUE and FALSE behave classically; NA means "cannot be decided from the
data at hand" and propagates except where a definite operand already
decides the outcome (FALSE dominates conjunction, TRUE dominates
disjunction).
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable


class TriBool(Enum):
    TRUE = "true"
    FALSE = "false"
    NA = "na"

    def __repr__(self) -> str:
        return self.value.upper() if self is not TriBool.NA else "NA"

    def __str__(self) -> str:
        return {"true": "True", "false": "False", "na": "NA"}[self.value]

    @staticmethod
    def of(flag: bool) -> "TriBool":
        return TriBool.TRUE if flag else TriBool.FALSE


def not_(a: TriBool) -> TriBool:
    if a is TriBool.NA:
        return TriBool.NA
    return TriBool.of(a is TriBool.FALSE)


def and_(args: Iterable[TriBool]) -> TriBool:
    saw_na = False
    for a in args:
        if a is TriBool.FALSE:
            return TriBool.FALSE
        if a is TriBool.NA:
            saw_na = True
    return TriBool.NA if saw_na else TriBool.TRUE


def or_(args: Iterable[TriBool]) -> TriBool:
    saw_na = False
    for a in args:
        if a is TriBool.TRUE:
            return TriBool.TRUE
        if a is TriBool.NA:
            saw_na = True
    return TriBool.NA if saw_na else TriBool.FALSE


def implies(cond: TriBool, conseq: TriBool) -> TriBool:
    return or_([not_(cond), conseq])


def kleene_apply(op: str, args: list[TriBool]) -> TriBool:
    """Apply a logical connective; ``if`` reads its two args as
    (condition, consequent)."""
    if op == "not":
        (a,) = args
        return not_(a)
    if op == "and":
        return and_(args)
    if op == "or":
        return or_(args)
    if op == "if":
        cond, conseq = args
        return implies(cond, conseq)
    raise ValueError(f"unknown logical operator {op!r}")
