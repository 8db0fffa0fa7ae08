"""Exact feasibility of conjunctions of linear inequalities.

Constraints are rows "sum of coeff*var <= bound" (or strictly below).
Variable elimination keeps everything in exact rational arithmetic, so
strict inequalities and degenerate systems are decided exactly, and a
feasible system yields a rational witness by back substitution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

ZERO = Fraction(0)


@dataclass(frozen=True)
class Row:
    """sum(coeff * var) <= bound, strictly when ``strict``."""

    coeffs: tuple[tuple[str, Fraction], ...]
    strict: bool
    bound: Fraction

    def coeff(self, var: str) -> Fraction:
        for name, c in self.coeffs:
            if name == var:
                return c
        return ZERO

    def evaluate(self, assignment: dict[str, Fraction]) -> Fraction:
        return sum((c * assignment.get(v, ZERO) for v, c in self.coeffs), ZERO)

    def holds(self, assignment: dict[str, Fraction]) -> bool:
        lhs = self.evaluate(assignment)
        return lhs < self.bound if self.strict else lhs <= self.bound


def make_row(coeffs: dict[str, Fraction], strict: bool, bound) -> Row:
    items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0))
    return Row(items, strict, Fraction(bound))


def _scale_add(a: Row, fa: Fraction, b: Row, fb: Fraction) -> Row:
    # fa, fb > 0 so the inequality direction is preserved
    coeffs: dict[str, Fraction] = {}
    for v, c in a.coeffs:
        coeffs[v] = coeffs.get(v, ZERO) + fa * c
    for v, c in b.coeffs:
        coeffs[v] = coeffs.get(v, ZERO) + fb * c
    return make_row(coeffs, a.strict or b.strict, fa * a.bound + fb * b.bound)


def _constant_row_ok(row: Row) -> bool:
    return ZERO < row.bound if row.strict else ZERO <= row.bound


@dataclass
class _Elimination:
    var: str
    lowers: list[Row]  # rows with negative coefficient on var
    uppers: list[Row]  # rows with positive coefficient on var


def _split(rows: list[Row], var: str) -> tuple[list[Row], list[Row], list[Row]]:
    lowers, uppers, rest = [], [], []
    for row in rows:
        c = row.coeff(var)
        if c < 0:
            lowers.append(row)
        elif c > 0:
            uppers.append(row)
        else:
            rest.append(row)
    return lowers, uppers, rest


def _pick_var(rows: list[Row], keep: frozenset[str]) -> Optional[str]:
    counts: dict[str, list[int]] = {}
    for row in rows:
        for v, c in row.coeffs:
            if v in keep:
                continue
            lo_up = counts.setdefault(v, [0, 0])
            lo_up[0 if c < 0 else 1] += 1
    if not counts:
        return None
    return min(counts, key=lambda v: (counts[v][0] * counts[v][1], v))


def _eliminate(rows: list[Row], keep: frozenset[str]) -> Optional[tuple[list[Row], list[_Elimination]]]:
    """Project away all variables outside ``keep``.

    Returns the projected rows and the elimination trace, or None when a
    constant row already shows infeasibility.
    """
    rows = list(dict.fromkeys(rows))
    trace: list[_Elimination] = []
    while True:
        pending = []
        for row in rows:
            if row.coeffs:
                pending.append(row)
            elif not _constant_row_ok(row):
                return None
        rows = pending
        var = _pick_var(rows, keep)
        if var is None:
            return rows, trace
        lowers, uppers, rest = _split(rows, var)
        trace.append(_Elimination(var, lowers, uppers))
        combined = list(rest)
        for low in lowers:
            for up in uppers:
                combined.append(_scale_add(low, up.coeff(var), up, -low.coeff(var)))
        rows = list(dict.fromkeys(combined))


def _bounds_on(var: str, lowers: list[Row], uppers: list[Row],
               assignment: dict[str, Fraction]) -> tuple[Optional[tuple[Fraction, bool]], Optional[tuple[Fraction, bool]]]:
    """Numeric (value, open) bounds on var once later variables are fixed."""
    lo: Optional[tuple[Fraction, bool]] = None
    hi: Optional[tuple[Fraction, bool]] = None
    for row in lowers:
        c = row.coeff(var)
        rest = row.evaluate(assignment) - c * assignment.get(var, ZERO)
        value = (row.bound - rest) / c  # c < 0 flips into a lower bound
        if lo is None or value > lo[0] or (value == lo[0] and row.strict):
            lo = (value, row.strict)
    for row in uppers:
        c = row.coeff(var)
        rest = row.evaluate(assignment) - c * assignment.get(var, ZERO)
        value = (row.bound - rest) / c
        if hi is None or value < hi[0] or (value == hi[0] and row.strict):
            hi = (value, row.strict)
    return lo, hi


def _choose(lo: Optional[tuple[Fraction, bool]], hi: Optional[tuple[Fraction, bool]]) -> Fraction:
    if lo is None and hi is None:
        return ZERO
    if lo is None:
        return hi[0] - 1
    if hi is None:
        return lo[0] + 1
    if lo[0] == hi[0]:
        return lo[0]
    return (lo[0] + hi[0]) / 2


def feasible(rows: list[Row]) -> Optional[dict[str, Fraction]]:
    """Witness assignment for the conjunction, or None if infeasible."""
    result = _eliminate(rows, frozenset())
    if result is None:
        return None
    _, trace = result
    assignment: dict[str, Fraction] = {}
    for step in reversed(trace):
        lo, hi = _bounds_on(step.var, step.lowers, step.uppers, assignment)
        assignment[step.var] = _choose(lo, hi)
    for row in rows:
        assert row.holds(assignment), f"back substitution violated {row}"
    return assignment


@dataclass(frozen=True)
class Interval:
    """Set of attainable values of one variable; None ends are unbounded."""

    lo: Optional[Fraction]
    lo_open: bool
    hi: Optional[Fraction]
    hi_open: bool

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.lo == self.hi and not self.lo_open and not self.hi_open

    def hull(self, other: "Interval") -> "Interval":
        if self.lo is None or other.lo is None:
            lo, lo_open = None, False
        elif self.lo < other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif other.lo < self.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open and other.lo_open
        if self.hi is None or other.hi is None:
            hi, hi_open = None, False
        elif self.hi > other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif other.hi > self.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open and other.hi_open
        return Interval(lo, lo_open, hi, hi_open)


def project(rows: list[Row], var: str) -> Optional[Interval]:
    """Exact shadow of the solution set onto one variable; None if the
    conjunction is infeasible."""
    result = _eliminate(rows, frozenset({var}))
    if result is None:
        return None
    projected, _ = result
    lowers, uppers, _rest = _split(projected, var)
    lo, hi = _bounds_on(var, lowers, uppers, {})
    if lo is not None and hi is not None:
        if lo[0] > hi[0] or (lo[0] == hi[0] and (lo[1] or hi[1])):
            return None
    return Interval(
        lo=None if lo is None else lo[0],
        lo_open=False if lo is None else lo[1],
        hi=None if hi is None else hi[0],
        hi_open=False if hi is None else hi[1],
    )
