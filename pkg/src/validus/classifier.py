"""Assigns each rule a four-slot single/multiple signature and a level.

Each slot answers, for one key dimension, whether evaluating the rule
needs a single value (s) or multiple values (m) of that dimension:
the unit type (table), the measurement occasion, the unit, and the
variable, in that order.  Two combinations are impossible by
construction: a rule never needs multiple types with a single unit, and
never a single variable across multiple types.  That leaves ten
admissible signatures; the level is the number of m slots (0 to 4).
"""

from __future__ import annotations

from dataclasses import dataclass

from .rules import Rule, referenced_signature

SINGLE = "s"
MULTI = "m"

#: The ten admissible signatures, grouped by level.
ADMISSIBLE_SIGNATURES = (
    "ssss",
    "sssm", "ssms", "smss",
    "ssmm", "smsm", "smms",
    "smmm", "msmm",
    "mmmm",
)

EXCLUDED_SIGNATURES = ("msss", "mssm", "msms", "mmss", "mmsm", "mmms")


@dataclass(frozen=True)
class RuleSignature:
    """Span over (unit type, occasion, unit, variable); each slot s or m."""

    type_span: str
    time_span: str
    unit_span: str
    variable_span: str

    def __post_init__(self) -> None:
        for slot in (self.type_span, self.time_span, self.unit_span, self.variable_span):
            if slot not in (SINGLE, MULTI):
                raise ValueError(f"span slot must be 's' or 'm', not {slot!r}")
        if self.type_span == MULTI and self.unit_span == SINGLE:
            raise ValueError("multiple unit types require multiple units")
        if self.type_span == MULTI and self.variable_span == SINGLE:
            raise ValueError("multiple unit types require multiple variables")

    @property
    def level(self) -> int:
        return level_of(self)

    def __str__(self) -> str:
        return self.type_span + self.time_span + self.unit_span + self.variable_span


def level_of(sig: RuleSignature) -> int:
    """Number of dimensions on which the rule needs multiple values."""
    return [sig.type_span, sig.time_span, sig.unit_span, sig.variable_span].count(MULTI)


def classify_rule(rule: Rule) -> RuleSignature:
    """Read the signature off the rule's syntax.

    Multiple tables make the type span m (and force the unit and
    variable spans to m); any aggregate or a second table makes the
    unit span m; any lag makes the time span m; more than one distinct
    referenced variable makes the variable span m.
    """
    span = referenced_signature(rule)
    multi_table = len(span.tables) > 1
    return RuleSignature(
        type_span=MULTI if multi_table else SINGLE,
        time_span=MULTI if span.max_lag > 0 else SINGLE,
        unit_span=MULTI if (span.has_aggregate or multi_table) else SINGLE,
        variable_span=MULTI if len(span.variables) > 1 else SINGLE,
    )
