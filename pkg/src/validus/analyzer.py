"""Static analysis of rule sets over the schema-declared universes.

Record-scoped rules built from linear numeric comparisons and
categorical membership compile to conjunctions of disjunctive clauses.
Satisfiability is decided exactly: clause disjuncts and categorical
levels are case-split, and each conjunction of linear atoms goes to the
rational elimination core.  Integer-declared variables are analyzed
over their rational relaxation, so a set that only fails over the
integers is reported feasible.

On top of the solver sit the rule-set diagnostics: tautology and
contradiction lint for single rules, infeasibility, levels a rule set
silently excludes, values and ranges it implicitly fixes, redundant
rules, and conditional rules whose condition or consequent the rest of
the set already decides.  The simplifier applies those last three
transformations to a fixpoint, preserving the solution set.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Optional, Union

from .errors import UnsupportedForAnalysisError
from .linear import Interval, Row, feasible, make_row, project
from .model import format_number
from .rules import (
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
    format_expr,
    format_rule,
    negate_expr,
    referenced_signature,
)
from .schema import CATEGORICAL, Schema, VariableDecl

# finding kinds
INFEASIBLE = "infeasible"
PARTIAL_INFEASIBILITY = "partial_infeasibility"
FIXED_VALUE = "fixed_value"
RANGE_RESTRICTION = "range_restriction"
REDUNDANT = "redundant"
TAUTOLOGY = "tautology"
CONTRADICTION = "contradiction"
NONRELAXING = "nonrelaxing_clause"
NONCONSTRAINING = "nonconstraining_clause"


@dataclass(frozen=True)
class LinearAtom:
    """sum(coeff * var) relation constant, over numeric variables."""

    coeffs: tuple[tuple[str, Fraction], ...]
    relation: str  # < <= == != >= >
    constant: Fraction


@dataclass(frozen=True)
class CategoricalAtom:
    """variable takes one of the allowed levels."""

    variable: str
    allowed: frozenset[str]


Atom = Union[LinearAtom, CategoricalAtom]

#: A clause is a disjunction of atoms; () is the unsatisfiable clause.
ClauseAtoms = tuple[Atom, ...]


@dataclass(frozen=True)
class Clause:
    disjuncts: ClauseAtoms
    origin: str


@dataclass
class ConstraintSystem:
    clauses: list[Clause]
    numeric_vars: dict[str, Optional[tuple[Fraction, Fraction]]]
    categorical_vars: dict[str, tuple[str, ...]]
    display: dict[str, str]

    def label(self, var: str) -> str:
        return self.display.get(var, var)


@dataclass(frozen=True)
class Finding:
    kind: str
    rule: Optional[str] = None
    variable: Optional[str] = None
    value: Optional[str] = None
    low: Optional[str] = None
    high: Optional[str] = None
    evidence: str = ""


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    witness: Optional[dict[str, Union[Fraction, str]]] = None

    def __bool__(self) -> bool:
        return self.satisfiable


# --- compilation ---------------------------------------------------------

_TRUE = "true"
_FALSE = "false"
_CNF = list  # list of disjunct tuples


class _Compiler:
    """Compiles one rule body to clause form over resolved variables."""

    def __init__(self, rule_name: str, schema: Schema):
        self.rule = rule_name
        self.schema = schema
        self.numeric: dict[str, Optional[tuple[Fraction, Fraction]]] = {}
        self.categorical: dict[str, tuple[str, ...]] = {}
        self.display: dict[str, str] = {}

    def fail(self, reason: str):
        raise UnsupportedForAnalysisError(self.rule, reason)

    def resolve(self, ref: VarRef) -> tuple[str, VariableDecl]:
        hit = self.schema.lookup(ref.table, ref.variable)
        if hit is None:
            shown = ref.variable if ref.table is None else f"{ref.table}.{ref.variable}"
            self.fail(f"unknown variable {shown!r}")
        table, decl = hit
        var_id = f"{table}.{decl.name}"
        if var_id not in self.display:
            bare_ok = self.schema.lookup(None, decl.name) is not None
            self.display[var_id] = decl.name if bare_ok else var_id
        if decl.kind == CATEGORICAL:
            self.categorical.setdefault(var_id, decl.levels)
        else:
            self.numeric.setdefault(var_id, decl.bounds)
        return var_id, decl

    # CNF of expr (or of its negation)
    def cnf(self, expr: Expr, negated: bool) -> _CNF:
        if isinstance(expr, Unary) and expr.op == "not":
            return self.cnf(expr.operand, not negated)
        if isinstance(expr, If):
            rewritten = Binary("or", Unary("not", expr.cond), expr.then)
            return self.cnf(rewritten, negated)
        if isinstance(expr, Binary) and expr.op in ("and", "or"):
            conjunctive = (expr.op == "and") != negated
            left = self.cnf(expr.left, negated)
            right = self.cnf(expr.right, negated)
            if conjunctive:
                return left + right
            return [l + r for l in left for r in right]
        return self.leaf(expr, negated)

    def leaf(self, expr: Expr, negated: bool) -> _CNF:
        if isinstance(expr, Builtin):
            if expr.fn == "in_set":
                return self.membership(expr.args[0], expr.args[1], negated)
            self.fail(f"{expr.fn} is a three-valued test, not a linear or categorical atom")
        if isinstance(expr, Binary) and expr.op in ("<", "<=", "==", "!=", ">=", ">"):
            op = _FLIP[expr.op] if negated else expr.op
            return self.comparison(op, expr.left, expr.right)
        self.fail(f"cannot analyze {format_expr(expr)!r}")

    def membership(self, target: Expr, items: Expr, negated: bool) -> _CNF:
        assert isinstance(items, SetLit)
        if not isinstance(target, VarRef):
            self.fail("in_set needs a plain variable on the left")
        var_id, decl = self.resolve(target)
        if target.lag:
            self.fail("lagged reference")
        if decl.kind == CATEGORICAL:
            wanted = frozenset(i for i in items.items if isinstance(i, str))
            allowed = frozenset(decl.levels) & wanted
            if negated:
                allowed = frozenset(decl.levels) - allowed
            return self._categorical_cnf(var_id, decl, allowed)
        numbers = [i for i in items.items if isinstance(i, Fraction)]
        unit = ((var_id, Fraction(1)),)
        if not negated:
            clause = tuple(LinearAtom(unit, "==", n) for n in numbers)
            return [clause] if clause else [()]
        return [(LinearAtom(unit, "<", n), LinearAtom(unit, ">", n)) for n in numbers]

    def _categorical_cnf(self, var_id: str, decl: VariableDecl, allowed: frozenset[str]) -> _CNF:
        if not allowed:
            return [()]
        if allowed == frozenset(decl.levels):
            return []
        return [(CategoricalAtom(var_id, allowed),)]

    def comparison(self, op: str, left: Expr, right: Expr) -> _CNF:
        if isinstance(left, TextLit) and isinstance(right, TextLit):
            if op not in ("==", "!="):
                self.fail("ordering is undefined for text")
            holds = (left.value == right.value) == (op == "==")
            return [] if holds else [()]
        cat = self._categorical_comparison(op, left, right)
        if cat is not None:
            return cat
        lc, lk = self.linear(left)
        rc, rk = self.linear(right)
        coeffs = dict(lc)
        for v, c in rc.items():
            coeffs[v] = coeffs.get(v, Fraction(0)) - c
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        constant = rk - lk
        if not coeffs:
            holds = _const_compare(op, Fraction(0), constant)
            return [] if holds else [()]
        items = tuple(sorted(coeffs.items()))
        if op == "!=":
            return [(LinearAtom(items, "<", constant), LinearAtom(items, ">", constant))]
        return [(LinearAtom(items, op, constant),)]

    def _categorical_comparison(self, op: str, left: Expr, right: Expr) -> Optional[_CNF]:
        sides = [(left, right), (right, left)]
        for var_side, lit_side in sides:
            if not isinstance(var_side, VarRef):
                continue
            var_id, decl = self.resolve(var_side)
            if decl.kind != CATEGORICAL:
                if isinstance(lit_side, TextLit):
                    # numeric variable against text is decided by the domain
                    if op == "==":
                        return [()]
                    if op == "!=":
                        return []
                    self.fail("ordering between a number and text")
                return None
            if var_side.lag:
                self.fail("lagged reference")
            if isinstance(lit_side, TextLit):
                if op not in ("==", "!="):
                    self.fail(f"ordering {op} on a categorical variable")
                wanted = frozenset({lit_side.value}) & frozenset(decl.levels)
                allowed = wanted if op == "==" else frozenset(decl.levels) - wanted
                return self._categorical_cnf(var_id, decl, allowed)
            if isinstance(lit_side, NumberLit):
                if op == "==":
                    return [()]
                if op == "!=":
                    return []
                self.fail("ordering between a categorical variable and a number")
            if isinstance(lit_side, VarRef):
                other_id, other_decl = self.resolve(lit_side)
                if other_decl.kind == CATEGORICAL:
                    self.fail("comparison between two categorical variables")
                self.fail("comparison between a categorical and a numeric variable")
            self.fail("categorical variables compare only against literal text")
        return None

    def linear(self, expr: Expr) -> tuple[dict[str, Fraction], Fraction]:
        """Linear form (coefficients, constant) of a numeric expression."""
        if isinstance(expr, NumberLit):
            return {}, expr.value
        if isinstance(expr, TextLit):
            self.fail("text in numeric context")
        if isinstance(expr, NALit):
            self.fail("NA literal is outside the two-valued fragment")
        if isinstance(expr, VarRef):
            if expr.lag:
                self.fail("lagged reference")
            var_id, decl = self.resolve(expr)
            if decl.kind == CATEGORICAL:
                self.fail(f"categorical variable {decl.name!r} in numeric context")
            return {var_id: Fraction(1)}, Fraction(0)
        if isinstance(expr, Unary):
            if expr.op == "neg":
                coeffs, const = self.linear(expr.operand)
                return {v: -c for v, c in coeffs.items()}, -const
            self.fail(f"{expr.op} is not linear")
        if isinstance(expr, Binary):
            if expr.op in ("+", "-"):
                lc, lk = self.linear(expr.left)
                rc, rk = self.linear(expr.right)
                sign = Fraction(1) if expr.op == "+" else Fraction(-1)
                out = dict(lc)
                for v, c in rc.items():
                    out[v] = out.get(v, Fraction(0)) + sign * c
                return out, lk + sign * rk
            if expr.op == "*":
                lc, lk = self.linear(expr.left)
                rc, rk = self.linear(expr.right)
                if lc and rc:
                    self.fail("product of two variable expressions is not linear")
                if lc:
                    return {v: c * rk for v, c in lc.items()}, lk * rk
                return {v: c * lk for v, c in rc.items()}, lk * rk
            if expr.op == "/":
                rc, rk = self.linear(expr.right)
                if rc:
                    self.fail("variable in a divisor is not linear")
                if rk == 0:
                    self.fail("division by the constant zero")
                lc, lk = self.linear(expr.left)
                return {v: c / rk for v, c in lc.items()}, lk / rk
        if isinstance(expr, Builtin) or isinstance(expr, If):
            self.fail(f"{format_expr(expr)!r} in numeric context")
        self.fail(f"cannot linearize {format_expr(expr)!r}")


_FLIP = {"<": ">=", "<=": ">", "==": "!=", "!=": "==", ">=": "<", ">": "<="}


def _const_compare(op: str, left: Fraction, right: Fraction) -> bool:
    return {
        "<": left < right,
        "<=": left <= right,
        "==": left == right,
        "!=": left != right,
        ">=": left >= right,
        ">": left > right,
    }[op]


def _check_analyzable(rule: Rule) -> None:
    span = referenced_signature(rule)
    if span.has_aggregate:
        raise UnsupportedForAnalysisError(rule.name, "aggregates are not record-scoped")
    if span.max_lag > 0:
        raise UnsupportedForAnalysisError(rule.name, "lagged references span occasions")
    if len(span.tables) > 1:
        raise UnsupportedForAnalysisError(rule.name, "cross-table references")


def compile_rule_clauses(rule: Rule, schema: Schema, negated: bool = False) -> tuple[_Compiler, _CNF]:
    _check_analyzable(rule)
    compiler = _Compiler(rule.name, schema)
    body = negate_expr(rule.body) if negated else rule.body
    return compiler, compiler.cnf(body, False)


def _build_system(schema: Schema, parts: list[tuple[str, _Compiler, _CNF]]) -> ConstraintSystem:
    clauses: list[Clause] = []
    numeric: dict[str, Optional[tuple[Fraction, Fraction]]] = {}
    categorical: dict[str, tuple[str, ...]] = {}
    display: dict[str, str] = {}
    for origin, compiler, cnf in parts:
        for disjuncts in cnf:
            clauses.append(Clause(tuple(disjuncts), origin))
        numeric.update(compiler.numeric)
        categorical.update(compiler.categorical)
        display.update(compiler.display)
    for var_id in sorted(numeric):
        bounds = numeric[var_id]
        if bounds is None:
            continue
        low, high = bounds
        clauses.append(Clause((LinearAtom(((var_id, Fraction(1)),), ">=", low),), f"domain:{display.get(var_id, var_id)}"))
        clauses.append(Clause((LinearAtom(((var_id, Fraction(1)),), "<=", high),), f"domain:{display.get(var_id, var_id)}"))
    return ConstraintSystem(clauses, numeric, categorical, display)


def compile_rules(rules: RuleSet, schema: Schema) -> ConstraintSystem:
    """Conjoin every rule into one clause system over the schema domains."""
    parts = []
    for rule in rules:
        compiler, cnf = compile_rule_clauses(rule, schema)
        parts.append((rule.name, compiler, cnf))
    return _build_system(schema, parts)


def _extend(system: ConstraintSystem, schema: Schema, rule: Rule, negated: bool, origin: str) -> ConstraintSystem:
    compiler, cnf = compile_rule_clauses(rule, schema, negated=negated)
    extended = replace(
        system,
        clauses=system.clauses + [Clause(tuple(d), origin) for d in cnf],
        numeric_vars={**compiler.numeric, **system.numeric_vars},
        categorical_vars={**compiler.categorical, **system.categorical_vars},
        display={**compiler.display, **system.display},
    )
    # bounds of newly referenced variables must still constrain the probe
    for var_id, bounds in compiler.numeric.items():
        if var_id in system.numeric_vars or bounds is None:
            continue
        low, high = bounds
        extended.clauses.append(Clause((LinearAtom(((var_id, Fraction(1)),), ">=", low),), f"domain:{extended.label(var_id)}"))
        extended.clauses.append(Clause((LinearAtom(((var_id, Fraction(1)),), "<=", high),), f"domain:{extended.label(var_id)}"))
    return extended


# --- satisfiability -------------------------------------------------------

def _atom_rows(atom: LinearAtom) -> list[Row]:
    coeffs = dict(atom.coeffs)
    negated = {v: -c for v, c in coeffs.items()}
    if atom.relation == "<=":
        return [make_row(coeffs, False, atom.constant)]
    if atom.relation == "<":
        return [make_row(coeffs, True, atom.constant)]
    if atom.relation == ">=":
        return [make_row(negated, False, -atom.constant)]
    if atom.relation == ">":
        return [make_row(negated, True, -atom.constant)]
    if atom.relation == "==":
        return [make_row(coeffs, False, atom.constant), make_row(negated, False, -atom.constant)]
    raise ValueError(f"no direct rows for relation {atom.relation!r}")


def _leaves(system: ConstraintSystem) -> Iterator[tuple[dict[str, frozenset[str]], list[Row]]]:
    """Every feasible conjunction covering the system's solution set."""
    domains = {v: frozenset(levels) for v, levels in system.categorical_vars.items()}
    clauses = system.clauses

    def descend(index: int, cats: dict[str, frozenset[str]], rows: list[Row]) -> Iterator[tuple[dict[str, frozenset[str]], list[Row]]]:
        if index == len(clauses):
            if feasible(rows) is not None:
                yield cats, rows
            return
        clause = clauses[index]
        for atom in clause.disjuncts:
            # clause already entailed by the categorical state: no branching
            if isinstance(atom, CategoricalAtom) and cats[atom.variable] <= atom.allowed:
                yield from descend(index + 1, cats, rows)
                return
        for atom in clause.disjuncts:
            if isinstance(atom, CategoricalAtom):
                narrowed = cats[atom.variable] & atom.allowed
                if not narrowed:
                    continue
                yield from descend(index + 1, {**cats, atom.variable: narrowed}, rows)
            else:
                variants = (
                    [LinearAtom(atom.coeffs, "<", atom.constant), LinearAtom(atom.coeffs, ">", atom.constant)]
                    if atom.relation == "!="
                    else [atom]
                )
                for variant in variants:
                    extended = rows + _atom_rows(variant)
                    if feasible(extended) is None:
                        continue
                    yield from descend(index + 1, cats, extended)

    yield from descend(0, domains, [])


def _atom_holds(atom: Atom, numeric: dict[str, Fraction], cats: dict[str, str]) -> bool:
    if isinstance(atom, CategoricalAtom):
        return cats.get(atom.variable) in atom.allowed
    total = sum((c * numeric.get(v, Fraction(0)) for v, c in atom.coeffs), Fraction(0))
    return _const_compare(atom.relation, total, atom.constant)


def check_witness(system: ConstraintSystem, witness: dict[str, Union[Fraction, str]]) -> bool:
    """Re-check a witness against every clause by direct evaluation."""
    numeric = {v: val for v, val in witness.items() if isinstance(val, Fraction)}
    cats = {v: val for v, val in witness.items() if isinstance(val, str)}
    return all(
        any(_atom_holds(atom, numeric, cats) for atom in clause.disjuncts)
        for clause in system.clauses
    )


def is_satisfiable(system: ConstraintSystem) -> SatResult:
    """Exact satisfiability over the rational relaxation plus declared
    categorical levels; a positive verdict carries a re-checked witness."""
    for cats, rows in _leaves(system):
        numeric_witness = feasible(rows)
        assert numeric_witness is not None
        witness: dict[str, Union[Fraction, str]] = {}
        for var in system.numeric_vars:
            witness[var] = numeric_witness.get(var, Fraction(0))
        for var, levels in cats.items():
            witness[var] = sorted(levels)[0]
        assert check_witness(system, witness), "leaf witness failed a clause"
        return SatResult(True, witness)
    return SatResult(False, None)


# --- findings -------------------------------------------------------------

def lint_rule(rule: Rule, schema: Schema) -> Optional[Finding]:
    """Tautology or contradiction verdict for one rule over the schema
    domains, None for a genuine validation rule."""
    alone = RuleSet((rule,))
    if not is_satisfiable(compile_rules(alone, schema)):
        return Finding(
            kind=CONTRADICTION,
            rule=rule.name,
            evidence=f"{format_expr(rule.body)} admits no assignment over the declared domains",
        )
    compiler, negated_cnf = compile_rule_clauses(rule, schema, negated=True)
    negated_system = _build_system(schema, [(rule.name, compiler, negated_cnf)])
    if not is_satisfiable(negated_system):
        return Finding(
            kind=TAUTOLOGY,
            rule=rule.name,
            evidence=f"the negation of {format_expr(rule.body)} admits no assignment over the declared domains",
        )
    return None


def implied_bounds(system: ConstraintSystem, variable: str) -> Interval:
    """Tightest interval enclosing the attainable values of a numeric
    variable over all solutions of a satisfiable system."""
    var_id = _resolve_variable(system, variable)
    hull: Optional[Interval] = None
    for _cats, rows in _leaves(system):
        interval = project(rows, var_id)
        if interval is None:
            continue
        hull = interval if hull is None else hull.hull(interval)
    if hull is None:
        raise ValueError("implied_bounds needs a satisfiable system")
    return hull


def _resolve_variable(system: ConstraintSystem, variable: str) -> str:
    if variable in system.numeric_vars:
        return variable
    for var_id, label in system.display.items():
        if label == variable and var_id in system.numeric_vars:
            return var_id
    raise KeyError(f"not a numeric variable of this system: {variable!r}")


def _interval_text(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else format_number(value)


def implied_bound_findings(system: ConstraintSystem) -> list[Finding]:
    """Fixed values and range restrictions implied by the whole set."""
    findings = []
    for var_id in sorted(system.numeric_vars, key=lambda v: system.label(v)):
        interval = implied_bounds(system, var_id)
        label = system.label(var_id)
        declared = system.numeric_vars[var_id]
        if interval.is_point:
            findings.append(Finding(
                kind=FIXED_VALUE,
                variable=label,
                value=format_number(interval.lo),
                evidence=f"every solution has {label} = {format_number(interval.lo)}",
            ))
            continue
        if _strictly_tighter(interval, declared):
            findings.append(Finding(
                kind=RANGE_RESTRICTION,
                variable=label,
                low=_interval_text(interval.lo),
                high=_interval_text(interval.hi),
                evidence=f"solutions confine {label} to "
                         f"{_format_interval(interval)} inside its declared domain",
            ))
    return findings


def _format_interval(interval: Interval) -> str:
    left = "(" if interval.lo_open or interval.lo is None else "["
    right = ")" if interval.hi_open or interval.hi is None else "]"
    lo = "-inf" if interval.lo is None else format_number(interval.lo)
    hi = "inf" if interval.hi is None else format_number(interval.hi)
    return f"{left}{lo}, {hi}{right}"


def _strictly_tighter(interval: Interval, declared: Optional[tuple[Fraction, Fraction]]) -> bool:
    if declared is None:
        return interval.lo is not None or interval.hi is not None
    low, high = declared
    tighter_low = interval.lo is not None and (interval.lo > low or (interval.lo == low and interval.lo_open))
    tighter_high = interval.hi is not None and (interval.hi < high or (interval.hi == high and interval.hi_open))
    return tighter_low or tighter_high


def detect_partial_infeasibility(system: ConstraintSystem) -> list[Finding]:
    """Levels of categorical variables that no solution can take."""
    findings = []
    for var_id in sorted(system.categorical_vars, key=lambda v: system.label(v)):
        for level in system.categorical_vars[var_id]:
            probe = replace(
                system,
                clauses=system.clauses + [Clause((CategoricalAtom(var_id, frozenset({level})),), "probe")],
            )
            if not is_satisfiable(probe):
                label = system.label(var_id)
                findings.append(Finding(
                    kind=PARTIAL_INFEASIBILITY,
                    variable=label,
                    value=level,
                    evidence=f"the rule set plus {label} == \"{level}\" is unsatisfiable",
                ))
    return findings


def detect_redundant(rules: RuleSet, schema: Schema) -> list[Finding]:
    """Rules already implied by the rest of the set."""
    findings = []
    for rule in rules:
        remainder = rules.without(rule.name)
        system = compile_rules(remainder, schema)
        probe = _extend(system, schema, rule, negated=True, origin=f"not:{rule.name}")
        if not is_satisfiable(probe):
            findings.append(Finding(
                kind=REDUNDANT,
                rule=rule.name,
                evidence=f"the other rules plus the negation of {format_rule(rule)!r} are unsatisfiable",
            ))
    return findings


def _conditional_probe(rules: RuleSet, schema: Schema, rule: Rule, part: Expr) -> bool:
    """True when the rule set plus the negation of ``part`` is unsatisfiable."""
    system = compile_rules(rules, schema)
    probe_rule = Rule(rule.name, part, rule.source_span)
    probe = _extend(system, schema, probe_rule, negated=True, origin=f"probe:{rule.name}")
    return not is_satisfiable(probe)


def detect_nonrelaxing(rules: RuleSet, schema: Schema) -> list[Finding]:
    """Conditional rules whose condition the set forces to be true."""
    findings = []
    for rule in rules:
        if isinstance(rule.body, If) and _conditional_probe(rules, schema, rule, rule.body.cond):
            findings.append(Finding(
                kind=NONRELAXING,
                rule=rule.name,
                evidence=f"the rule set plus the negation of the condition "
                         f"{format_expr(rule.body.cond)!r} is unsatisfiable",
            ))
    return findings


def detect_nonconstraining(rules: RuleSet, schema: Schema) -> list[Finding]:
    """Conditional rules whose consequent already holds on every solution."""
    findings = []
    for rule in rules:
        if isinstance(rule.body, If) and _conditional_probe(rules, schema, rule, rule.body.then):
            findings.append(Finding(
                kind=NONCONSTRAINING,
                rule=rule.name,
                evidence=f"the rule set plus the negation of the consequent "
                         f"{format_expr(rule.body.then)!r} is unsatisfiable",
            ))
    return findings


def analyze_ruleset(rules: RuleSet, schema: Schema) -> tuple[list[Finding], list[tuple[str, str]]]:
    """Run every detection; returns (findings, unsupported rules).

    Rules outside the analyzable fragment are reported, not analyzed;
    set-level findings cover the analyzable remainder.
    """
    findings: list[Finding] = []
    supported: list[Rule] = []
    unsupported: list[tuple[str, str]] = []
    for rule in rules:
        try:
            finding = lint_rule(rule, schema)
        except UnsupportedForAnalysisError as exc:
            unsupported.append((rule.name, exc.reason))
            continue
        supported.append(rule)
        if finding is not None:
            findings.append(finding)

    subset = RuleSet(tuple(supported))
    system = compile_rules(subset, schema)
    if not is_satisfiable(system):
        findings.append(Finding(
            kind=INFEASIBLE,
            evidence="the conjunction of all rules admits no assignment over the declared domains",
        ))
        return findings, unsupported
    findings.extend(detect_partial_infeasibility(system))
    findings.extend(implied_bound_findings(system))
    findings.extend(detect_redundant(subset, schema))
    findings.extend(detect_nonrelaxing(subset, schema))
    findings.extend(detect_nonconstraining(subset, schema))
    return findings, unsupported


def ruleset_implies(stronger: RuleSet, weaker: RuleSet, schema: Schema) -> bool:
    """True when every solution of ``stronger`` satisfies every rule of
    ``weaker`` (checked rule by rule via unsatisfiability probes)."""
    system = compile_rules(stronger, schema)
    for rule in weaker:
        probe = _extend(system, schema, rule, negated=True, origin=f"not:{rule.name}")
        if is_satisfiable(probe):
            return False
    return True


# --- simplification --------------------------------------------------------

@dataclass(frozen=True)
class SimplifyStep:
    action: str  # nonrelaxing, nonconstraining, drop_redundant, infeasible
    rule: str
    before: str
    after: Optional[str]
    probe: str


def simplify_ruleset(rules: RuleSet, schema: Schema) -> tuple[RuleSet, list[SimplifyStep]]:
    """Rewrite the rule set without changing its solution set.

    Scans rules in file order and applies the first transformation that
    fires: a conditional whose condition always holds collapses to its
    consequent; a conditional whose consequent always holds collapses to
    its consequent; a rule implied by the others is dropped.  Repeats to
    a fixpoint.  Rules outside the analyzable fragment are kept as they
    are.  An unsatisfiable input is returned unchanged with an
    ``infeasible`` log entry.
    """
    supported: list[Rule] = []
    for rule in rules:
        try:
            _check_analyzable(rule)
            compile_rule_clauses(rule, schema)
            supported.append(rule)
        except UnsupportedForAnalysisError:
            continue
    supported_names = {r.name for r in supported}

    analyzable = RuleSet(tuple(supported))
    if not is_satisfiable(compile_rules(analyzable, schema)):
        step = SimplifyStep(
            action="infeasible", rule="", before="", after=None,
            probe="the conjunction of all rules is unsatisfiable",
        )
        return rules, [step]

    current = rules
    log: list[SimplifyStep] = []
    while True:
        applied = False
        for rule in current:
            if rule.name not in supported_names:
                continue
            subset = RuleSet(tuple(r for r in current if r.name in supported_names))
            if isinstance(rule.body, If):
                if _conditional_probe(subset, schema, rule, rule.body.cond):
                    new_rule = Rule(rule.name, rule.body.then, rule.source_span)
                    log.append(SimplifyStep(
                        action="nonrelaxing", rule=rule.name,
                        before=format_rule(rule), after=format_rule(new_rule),
                        probe="rule set plus negated condition is unsatisfiable",
                    ))
                    current = current.replacing(rule.name, new_rule)
                    applied = True
                    break
                if _conditional_probe(subset, schema, rule, rule.body.then):
                    new_rule = Rule(rule.name, rule.body.then, rule.source_span)
                    log.append(SimplifyStep(
                        action="nonconstraining", rule=rule.name,
                        before=format_rule(rule), after=format_rule(new_rule),
                        probe="rule set plus negated consequent is unsatisfiable",
                    ))
                    current = current.replacing(rule.name, new_rule)
                    applied = True
                    break
            remainder = RuleSet(tuple(r for r in current if r.name in supported_names and r.name != rule.name))
            system = compile_rules(remainder, schema)
            probe = _extend(system, schema, rule, negated=True, origin=f"not:{rule.name}")
            if not is_satisfiable(probe):
                log.append(SimplifyStep(
                    action="drop_redundant", rule=rule.name,
                    before=format_rule(rule), after=None,
                    probe="remaining rules plus the negated rule are unsatisfiable",
                ))
                current = current.without(rule.name)
                applied = True
                break
        if not applied:
            return current, log
