"""Declared tables, variables, and value domains.

The schema fixes the universe that validation and analysis work over:
which variables exist per table, whether each is numeric, integer, or
categorical, its bounds or level set, and whether NA is an admissible
value for it.

Schema file format (one declaration per line, ``#`` starts a comment)::

    person.age  : integer [0, 120]
    person.job  : categorical {employed, unemployed} nullable
    trade.value : numeric

Bounds are inclusive on both ends.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .errors import DuplicateVariableError, SchemaSyntaxError
from .model import Value, is_na
from .tribool import TriBool

NUMERIC = "numeric"
INTEGER = "integer"
CATEGORICAL = "categorical"

_KINDS = (NUMERIC, INTEGER, CATEGORICAL)


@dataclass(frozen=True)
class VariableDecl:
    """One declared variable: its kind, its domain, and NA admissibility.

    ``levels`` keeps declaration order; analysis code treats it as a set.
    """

    name: str
    kind: str
    bounds: Optional[tuple[Fraction, Fraction]] = None
    levels: Optional[tuple[str, ...]] = None
    nullable: bool = False

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.levels:
                raise ValueError(f"categorical variable {self.name!r} needs levels")
            if self.bounds is not None:
                raise ValueError(f"categorical variable {self.name!r} cannot have bounds")
        else:
            if self.levels is not None:
                raise ValueError(f"{self.kind} variable {self.name!r} cannot have levels")
        if self.bounds is not None and self.bounds[0] > self.bounds[1]:
            raise ValueError(f"variable {self.name!r}: lower bound above upper bound")


@dataclass(frozen=True)
class Schema:
    """All table declarations plus the names of the unit and time columns
    used when ingesting CSV data."""

    tables: dict[str, tuple[VariableDecl, ...]] = field(default_factory=dict)
    unit_column: str = "id"
    time_column: Optional[str] = "time"

    def lookup(self, table: Optional[str], variable: str) -> Optional[tuple[str, VariableDecl]]:
        """Resolve a possibly unqualified variable reference.

        Unqualified names resolve when exactly one table declares them.
        Returns (table, decl) or None.
        """
        if table is not None:
            for decl in self.tables.get(table, ()):
                if decl.name == variable:
                    return table, decl
            return None
        hits = [
            (tbl, decl)
            for tbl, decls in self.tables.items()
            for decl in decls
            if decl.name == variable
        ]
        if len(hits) == 1:
            return hits[0]
        return None

    def with_columns(self, unit_column: str, time_column: Optional[str]) -> "Schema":
        return replace(self, unit_column=unit_column, time_column=time_column)


_DECL_RE = re.compile(
    r"""^\s*
    (?P<table>[A-Za-z_]\w*)\s*\.\s*(?P<var>[A-Za-z_]\w*)
    \s*:\s*
    (?P<kind>numeric|integer|categorical)
    (?P<rest>.*)$""",
    re.VERBOSE,
)

_BOUNDS_RE = re.compile(r"^\s*\[\s*([^,\]]+)\s*,\s*([^,\]]+)\s*\]")
_LEVELS_RE = re.compile(r"^\s*\{([^}]*)\}")


def _parse_level(raw: str, lineno: int) -> str:
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if not raw:
        raise SchemaSyntaxError(lineno, "empty level name")
    return raw


def parse_schema(text: str) -> Schema:
    """Parse the line-oriented schema format documented in the module
    docstring."""
    tables: dict[str, list[VariableDecl]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _DECL_RE.match(line)
        if not m:
            raise SchemaSyntaxError(lineno, f"cannot parse declaration: {line!r}")
        table, var, kind = m.group("table"), m.group("var"), m.group("kind")
        rest = m.group("rest")

        bounds: Optional[tuple[Fraction, Fraction]] = None
        levels: Optional[tuple[str, ...]] = None
        if kind == CATEGORICAL:
            lm = _LEVELS_RE.match(rest)
            if not lm:
                raise SchemaSyntaxError(lineno, "categorical declaration needs {level, ...}")
            items = [s for s in lm.group(1).split(",")]
            if len(items) == 1 and not items[0].strip():
                raise SchemaSyntaxError(lineno, "categorical level set is empty")
            levels = tuple(_parse_level(item, lineno) for item in items)
            if len(set(levels)) != len(levels):
                raise SchemaSyntaxError(lineno, "duplicate level in level set")
            rest = rest[lm.end():]
        else:
            bm = _BOUNDS_RE.match(rest)
            if bm:
                try:
                    low, high = Fraction(bm.group(1).strip()), Fraction(bm.group(2).strip())
                except (ValueError, ZeroDivisionError):
                    raise SchemaSyntaxError(lineno, "bounds must be exact numbers") from None
                if low > high:
                    raise SchemaSyntaxError(lineno, "lower bound above upper bound")
                bounds = (low, high)
                rest = rest[bm.end():]

        nullable = False
        tail = rest.strip()
        if tail == "nullable":
            nullable = True
        elif tail:
            raise SchemaSyntaxError(lineno, f"unexpected trailing text: {tail!r}")

        decls = tables.setdefault(table, [])
        if any(d.name == var for d in decls):
            raise DuplicateVariableError(table, var)
        decls.append(VariableDecl(var, kind, bounds=bounds, levels=levels, nullable=nullable))
    return Schema(tables={t: tuple(ds) for t, ds in tables.items()})


def check_domain(value: Value, decl: VariableDecl) -> TriBool:
    """Decide domain membership of a single value.

    Always definite for present values; NA passes only a nullable
    variable.
    """
    if is_na(value):
        return TriBool.of(decl.nullable)
    if isinstance(value, Fraction):
        if decl.kind == CATEGORICAL:
            return TriBool.FALSE
        if decl.kind == INTEGER and value.denominator != 1:
            return TriBool.FALSE
        if decl.bounds is not None:
            low, high = decl.bounds
            return TriBool.of(low <= value <= high)
        return TriBool.TRUE
    # text value
    if decl.kind == CATEGORICAL:
        return TriBool.of(value in decl.levels)
    return TriBool.FALSE


def format_schema(schema: Schema) -> str:
    """Canonical schema text; parse_schema round-trips it."""
    lines = []
    for table in schema.tables:
        for decl in schema.tables[table]:
            parts = [f"{table}.{decl.name} : {decl.kind}"]
            if decl.bounds is not None:
                from .model import format_number

                parts.append(f"[{format_number(decl.bounds[0])}, {format_number(decl.bounds[1])}]")
            if decl.levels is not None:
                parts.append("{" + ", ".join(decl.levels) + "}")
            if decl.nullable:
                parts.append("nullable")
            lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")
