"""Evaluates rule sets against datasets under three-valued logic.

Each rule is scheduled over the scopes it needs: plain record rules get
one verdict per (unit, occasion) of their table, aggregate rules one
verdict per occasion (unit = ALL), and single-occasion data collapses
the occasion dimension as well.  Missing values, type confusion,
division by zero, and lags reaching before the first occasion all
evaluate to NA instead of aborting the run; each records a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import IncompatibleScopeError, UnknownVariableError
from .model import NA, Dataset, Key, Value, is_na, natural_order
from .rules import (
    Aggregate,
    Binary,
    Builtin,
    Expr,
    If,
    NALit,
    NumberLit,
    Rule,
    RuleSet,
    SetLit,
    TextLit,
    Unary,
    VarRef,
)
from .schema import Schema
from .tribool import TriBool, and_, implies, kleene_apply, not_, or_

NA_POLICIES = ("propagate", "ignore")


@dataclass(frozen=True)
class EvalOptions:
    na_policy: str = "propagate"
    diagnostics: bool = True

    def __post_init__(self) -> None:
        if self.na_policy not in NA_POLICIES:
            raise ValueError(f"na_policy must be one of {NA_POLICIES}, not {self.na_policy!r}")


@dataclass(frozen=True)
class Entry:
    """One verdict; unit or time of None means the whole dimension (ALL)."""

    rule: str
    table: str
    unit: Optional[str]
    time: Optional[str]
    result: TriBool


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    table: str
    unit: Optional[str]
    time: Optional[str]
    kind: str
    message: str


@dataclass
class ValidationReport:
    entries: list[Entry] = field(default_factory=list)
    summary: dict[str, dict[str, int]] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        total = {"true": 0, "false": 0, "na": 0}
        for entry in self.entries:
            total[entry.result.value] += 1
        return total


__all__ = [
    "EvalOptions", "Entry", "Diagnostic", "ValidationReport",
    "eval_expr", "evaluate_ruleset", "kleene_apply",
]


class _Evaluator:
    def __init__(self, dataset: Dataset, schema: Schema, options: EvalOptions):
        self.dataset = dataset
        self.schema = schema
        self.options = options
        self.diagnostics: list[Diagnostic] = []
        self._times: dict[str, list[Optional[str]]] = {}
        self._units: dict[str, list[str]] = {}
        self._records: dict[str, list[tuple[str, Optional[str]]]] = {}
        self._entry_scope: tuple[str, str, Optional[str], Optional[str]] = ("", "", None, None)

    # -- dataset access ----------------------------------------------

    def times(self, table: str) -> list[Optional[str]]:
        if table not in self._times:
            self._times[table] = self.dataset.times(table)
        return self._times[table]

    def units(self, table: str) -> list[str]:
        if table not in self._units:
            self._units[table] = self.dataset.units(table)
        return self._units[table]

    def records(self, table: str) -> list[tuple[str, Optional[str]]]:
        if table not in self._records:
            pairs = {(k.unit, k.time) for k in self.dataset.key_set if k.table == table}
            self._records[table] = sorted(
                pairs, key=lambda p: (natural_order(p[0]), natural_order(p[1]))
            )
        return self._records[table]

    def _diag(self, kind: str, message: str) -> None:
        if not self.options.diagnostics:
            return
        rule, table, unit, time = self._entry_scope
        self.diagnostics.append(Diagnostic(rule, table, unit, time, kind, message))

    def _resolve(self, rule_name: str, ref: VarRef) -> str:
        hit = self.schema.lookup(ref.table, ref.variable)
        if hit is None:
            shown = ref.variable if ref.table is None else f"{ref.table}.{ref.variable}"
            raise UnknownVariableError(rule_name, shown)
        return hit[0]

    def _cell(self, table: str, unit: str, time: Optional[str], variable: str, lag: int) -> Value:
        if lag > 0:
            occasions = self.times(table)
            try:
                idx = occasions.index(time) - lag
            except ValueError:
                idx = -1
            if idx < 0:
                self._diag("unresolved_reference", f"{variable}@{lag} reaches before the first occasion")
                return NA
            time = occasions[idx]
        key = Key(table, time, unit, variable)
        if key not in self.dataset:
            self._diag("missing_cell", f"no data point for {key!r}")
            return NA
        return self.dataset.get(key)

    # -- expression evaluation ---------------------------------------

    def eval_logical(self, rule_name: str, expr: Expr, table: Optional[str], unit: Optional[str], time: Optional[str]) -> TriBool:
        result = self.eval(rule_name, expr, table, unit, time)
        assert isinstance(result, TriBool)
        return result

    def eval(self, rule_name: str, expr: Expr, table: Optional[str], unit: Optional[str], time: Optional[str]) -> Union[Value, TriBool]:
        if isinstance(expr, NumberLit):
            return expr.value
        if isinstance(expr, TextLit):
            return expr.value
        if isinstance(expr, NALit):
            return NA
        if isinstance(expr, VarRef):
            ref_table = self._resolve(rule_name, expr)
            assert unit is not None, "bare variable reference outside record scope"
            return self._cell(ref_table, unit, time, expr.variable, expr.lag)
        if isinstance(expr, Aggregate):
            return self._aggregate(rule_name, expr, table, time)
        if isinstance(expr, Unary):
            return self._unary(rule_name, expr, table, unit, time)
        if isinstance(expr, Binary):
            return self._binary(rule_name, expr, table, unit, time)
        if isinstance(expr, If):
            cond = self.eval_logical(rule_name, expr.cond, table, unit, time)
            then = self.eval_logical(rule_name, expr.then, table, unit, time)
            return implies(cond, then)
        if isinstance(expr, Builtin):
            return self._builtin(rule_name, expr, table, unit, time)
        raise AssertionError(f"cannot evaluate {expr!r}")

    def _unary(self, rule_name: str, expr: Unary, table, unit, time) -> Union[Value, TriBool]:
        if expr.op == "not":
            return not_(self.eval_logical(rule_name, expr.operand, table, unit, time))
        value = self.eval(rule_name, expr.operand, table, unit, time)
        if is_na(value):
            return NA
        if not isinstance(value, Fraction):
            self._diag("type_mismatch", f"{expr.op} applied to text {value!r}")
            return NA
        return -value if expr.op == "neg" else abs(value)

    def _binary(self, rule_name: str, expr: Binary, table, unit, time) -> Union[Value, TriBool]:
        if expr.op in ("and", "or"):
            left = self.eval_logical(rule_name, expr.left, table, unit, time)
            right = self.eval_logical(rule_name, expr.right, table, unit, time)
            return and_([left, right]) if expr.op == "and" else or_([left, right])

        left = self.eval(rule_name, expr.left, table, unit, time)
        right = self.eval(rule_name, expr.right, table, unit, time)
        if expr.op in ("+", "-", "*", "/"):
            if is_na(left) or is_na(right):
                return NA
            if not isinstance(left, Fraction) or not isinstance(right, Fraction):
                self._diag("type_mismatch", f"arithmetic {expr.op} on text operand")
                return NA
            if expr.op == "/":
                if right == 0:
                    self._diag("division_by_zero", "division by zero")
                    return NA
                return left / right
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            return left * right

        # comparison
        if is_na(left) or is_na(right):
            return TriBool.NA
        if isinstance(left, Fraction) and isinstance(right, Fraction):
            return TriBool.of(_compare(expr.op, left, right))
        if isinstance(left, str) and isinstance(right, str):
            if expr.op == "==":
                return TriBool.of(left == right)
            if expr.op == "!=":
                return TriBool.of(left != right)
            self._diag("type_mismatch", f"ordering {expr.op} is undefined for text")
            return TriBool.NA
        self._diag("type_mismatch", f"comparison {expr.op} between number and text")
        return TriBool.NA

    def _builtin(self, rule_name: str, expr: Builtin, table, unit, time) -> TriBool:
        if expr.fn == "in_set":
            value = self.eval(rule_name, expr.args[0], table, unit, time)
            if is_na(value):
                return TriBool.NA
            items = expr.args[1]
            assert isinstance(items, SetLit)
            return TriBool.of(any(value == item for item in items.items))
        value = self.eval(rule_name, expr.args[0], table, unit, time)
        if expr.fn == "is_na":
            return TriBool.of(is_na(value))
        if is_na(value):
            return TriBool.FALSE
        if expr.fn == "is_number":
            return TriBool.of(isinstance(value, Fraction))
        if expr.fn == "is_integer":
            return TriBool.of(isinstance(value, Fraction) and value.denominator == 1)
        return TriBool.of(isinstance(value, str))  # is_text

    def _aggregate(self, rule_name: str, expr: Aggregate, table: Optional[str], time: Optional[str]) -> Value:
        group_table = self._group_table(rule_name, expr.arg, table)
        numeric = expr.fn != "count"
        values: list[Value] = []
        for unit in self.units(group_table):
            element = self.eval(rule_name, expr.arg, group_table, unit, time)
            assert not isinstance(element, TriBool)
            if numeric and isinstance(element, str):
                self._diag("type_mismatch", f"{expr.fn} over text value {element!r}")
                element = NA
            values.append(element)

        if self.options.na_policy == "propagate":
            if any(is_na(v) for v in values):
                return NA
            kept = values
        else:
            kept = [v for v in values if not is_na(v)]
        if not kept:
            self._diag("empty_group", f"{expr.fn} over an empty group in table {group_table!r}")
            return NA
        if expr.fn == "count":
            return Fraction(len(kept))
        numbers = [v for v in kept if isinstance(v, Fraction)]
        if expr.fn == "sum":
            return sum(numbers, Fraction(0))
        if expr.fn == "mean":
            return sum(numbers, Fraction(0)) / len(numbers)
        if expr.fn == "min":
            return min(numbers)
        return max(numbers)

    def _group_table(self, rule_name: str, arg: Expr, enclosing: Optional[str]) -> str:
        tables: set[str] = set()

        def walk(e: Expr) -> None:
            if isinstance(e, VarRef):
                tables.add(self._resolve(rule_name, e))
            elif isinstance(e, Aggregate):
                pass  # deeper aggregates pick their own group
            elif isinstance(e, Unary):
                walk(e.operand)
            elif isinstance(e, Binary):
                walk(e.left)
                walk(e.right)
            elif isinstance(e, If):
                walk(e.cond)
                walk(e.then)
            elif isinstance(e, Builtin):
                for a in e.args:
                    walk(a)

        walk(arg)
        if len(tables) == 1:
            return tables.pop()
        if len(tables) > 1:
            raise IncompatibleScopeError(rule_name, "one aggregate spans several tables")
        if enclosing is not None:
            return enclosing
        raise IncompatibleScopeError(rule_name, "aggregate group cannot be determined")


def _compare(op: str, left: Fraction, right: Fraction) -> bool:
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    if op == ">=":
        return left >= right
    return left > right


def _rule_scoping(evaluator: _Evaluator, rule: Rule) -> tuple[str, Optional[str], set[str]]:
    """Classify a rule's scheduling: ('record', table, agg tables) or
    ('aggregate', None, agg tables)."""
    bare_tables: set[str] = set()
    agg_tables: set[str] = set()

    def walk(e: Expr, in_agg: bool) -> None:
        if isinstance(e, VarRef):
            resolved = evaluator._resolve(rule.name, e)
            (agg_tables if in_agg else bare_tables).add(resolved)
        elif isinstance(e, Aggregate):
            walk(e.arg, True)
        elif isinstance(e, Unary):
            walk(e.operand, in_agg)
        elif isinstance(e, Binary):
            walk(e.left, in_agg)
            walk(e.right, in_agg)
        elif isinstance(e, If):
            walk(e.cond, in_agg)
            walk(e.then, in_agg)
        elif isinstance(e, Builtin):
            for a in e.args:
                walk(a, in_agg)

    walk(rule.body, False)
    if len(bare_tables) > 1:
        raise IncompatibleScopeError(rule.name, "references records of several tables")
    if bare_tables:
        return "record", bare_tables.pop(), agg_tables
    return "aggregate", None, agg_tables


def eval_expr(expr: Expr, dataset: Dataset, schema: Schema, options: EvalOptions,
              table: Optional[str] = None, unit: Optional[str] = None,
              time: Optional[str] = None, rule_name: str = "<expr>") -> Union[Value, TriBool]:
    """Evaluate one expression against a concrete scope (API entry point;
    evaluate_ruleset drives this per scheduled scope)."""
    return _Evaluator(dataset, schema, options).eval(rule_name, expr, table, unit, time)


def evaluate_ruleset(rules: RuleSet, dataset: Dataset, schema: Schema,
                     options: EvalOptions = EvalOptions()) -> ValidationReport:
    """Evaluate every rule over every scope it applies to.

    The report is deterministic: entries are ordered by rule (file
    order), then table, unit, and time in natural order.
    """
    evaluator = _Evaluator(dataset, schema, options)
    entries: list[Entry] = []
    summary: dict[str, dict[str, int]] = {}

    for rule in rules:
        tally = {"true": 0, "false": 0, "na": 0}
        summary[rule.name] = tally
        mode, record_table, agg_tables = _rule_scoping(evaluator, rule)

        if mode == "record":
            for unit, time in evaluator.records(record_table):
                evaluator._entry_scope = (rule.name, record_table, unit, time)
                verdict = evaluator.eval_logical(rule.name, rule.body, record_table, unit, time)
                entries.append(Entry(rule.name, record_table, unit, time, verdict))
                tally[verdict.value] += 1
        else:
            tables = sorted(agg_tables)
            label = tables[0] if len(tables) == 1 else ",".join(tables) if tables else "-"
            times: set[Optional[str]] = set()
            for t in tables:
                times.update(evaluator.times(t))
            ordered = sorted(times, key=natural_order) if times else [None]
            for time in ordered:
                evaluator._entry_scope = (rule.name, label, None, time)
                verdict = evaluator.eval_logical(rule.name, rule.body, None, None, time)
                entries.append(Entry(rule.name, label, None, time, verdict))
                tally[verdict.value] += 1

    return ValidationReport(entries=entries, summary=summary, diagnostics=evaluator.diagnostics)
