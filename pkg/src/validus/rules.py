"""The rule DSL: abstract syntax, parser, formatter, and rule algebra.

Grammar (comments start with ``#``, strings are double-quoted, numbers
are exact decimal literals)::

    ruleset    = { rule } ;
    rule       = name ":" expr ;
    expr       = "if" "(" expr ")" expr | or_expr ;
    or_expr    = and_expr { "or" and_expr } ;
    and_expr   = not_expr { "and" not_expr } ;
    not_expr   = "not" not_expr | cmp ;
    cmp        = sum [ ("<"|"<="|"=="|"!="|">="|">") sum ] ;
    sum        = term { ("+"|"-") term } ;
    term       = factor { ("*"|"/") factor } ;
    factor     = number | string | "NA" | set | varref | call
               | "(" expr ")" | "-" factor ;
    set        = "{" literal { "," literal } "}" ;
    call       = fn "(" expr { "," expr } ")" ;
    varref     = [ ident "." ] ident [ "@" integer ] ;

``fn`` is one of mean, sum, min, max, count, abs, is_number,
is_integer, is_text, is_na, in_set.  ``var@n`` reads the variable n
occasions back for the same unit; ``table.variable`` references another
table and is only meaningful under an aggregate.  ``if (C) Q`` is
logical implication.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from .errors import DuplicateRuleNameError, RuleParseError, RuleTypeError
from .model import format_number

AGGREGATE_FNS = ("mean", "sum", "min", "max", "count")
BUILTIN_FNS = ("is_number", "is_integer", "is_text", "is_na", "in_set")
_CALL_FNS = AGGREGATE_FNS + ("abs",) + BUILTIN_FNS

_CMP_OPS = ("<", "<=", "==", "!=", ">=", ">")
_KEYWORDS = ("if", "and", "or", "not", "NA")


# --- abstract syntax ----------------------------------------------------

@dataclass(frozen=True)
class NumberLit:
    value: Fraction


@dataclass(frozen=True)
class TextLit:
    value: str


@dataclass(frozen=True)
class NALit:
    pass


@dataclass(frozen=True)
class SetLit:
    """Literal value set; only valid as the second argument of in_set."""

    items: tuple[Union[Fraction, str], ...]


@dataclass(frozen=True)
class VarRef:
    variable: str
    table: Optional[str] = None
    lag: int = 0


@dataclass(frozen=True)
class Aggregate:
    fn: str
    arg: "Expr"


@dataclass(frozen=True)
class Unary:
    op: str  # neg, not, abs
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / < <= == != >= > and or
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class If:
    """Logical implication: if (cond) then."""

    cond: "Expr"
    then: "Expr"


@dataclass(frozen=True)
class Builtin:
    fn: str
    args: tuple["Expr", ...]


Expr = Union[NumberLit, TextLit, NALit, SetLit, VarRef, Aggregate, Unary, Binary, If, Builtin]


@dataclass(frozen=True)
class Rule:
    name: str
    body: Expr
    source_span: Optional[tuple[int, int]] = None

    def __repr__(self) -> str:
        return f"Rule({format_rule(self)!r})"


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...] = ()

    def __post_init__(self) -> None:
        names = [r.name for r in self.rules]
        for name in names:
            if names.count(name) > 1:
                raise DuplicateRuleNameError(name)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __getitem__(self, name: str) -> Rule:
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(name)

    def names(self) -> list[str]:
        return [r.name for r in self.rules]

    def without(self, name: str) -> "RuleSet":
        return RuleSet(tuple(r for r in self.rules if r.name != name))

    def replacing(self, name: str, new_rule: Rule) -> "RuleSet":
        return RuleSet(tuple(new_rule if r.name == name else r for r in self.rules))


# --- lexer --------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # NUMBER STRING IDENT OP EOF
    text: str
    line: int
    col: int
    value: object = None


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r]+)
    | (?P<comment>\#[^\n]*)
    | (?P<nl>\n)
    | (?P<number>\d+(?:\.\d+)?)
    | (?P<ident>[A-Za-z_]\w*)
    | (?P<string>"(?:\\.|[^"\\\n])*")
    | (?P<op><=|==|!=|>=|[-+*/<>(){},.@:])
    """,
    re.VERBOSE,
)

_STRING_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


def _unescape(raw: str, line: int, col: int) -> str:
    out = []
    i = 1
    while i < len(raw) - 1:
        ch = raw[i]
        if ch == "\\":
            esc = raw[i + 1]
            if esc not in _STRING_ESCAPES:
                raise RuleParseError(line, col, f"valid escape, not \\{esc}")
            out.append(_STRING_ESCAPES[esc])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise RuleParseError(line, col, f"a token, not {text[pos]!r}")
        pos = m.end()
        if m.lastgroup in ("ws", "comment"):
            continue
        if m.lastgroup == "nl":
            line += 1
            line_start = pos
            continue
        raw = m.group()
        if m.lastgroup == "number":
            tokens.append(_Token("NUMBER", raw, line, col, Fraction(raw)))
        elif m.lastgroup == "ident":
            tokens.append(_Token("IDENT", raw, line, col))
        elif m.lastgroup == "string":
            tokens.append(_Token("STRING", raw, line, col, _unescape(raw, line, col)))
        else:
            tokens.append(_Token("OP", raw, line, col))
    tokens.append(_Token("EOF", "", line, pos - line_start + 1))
    return tokens


# --- parser -------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def _fail(self, expected: str):
        tok = self.cur
        raise RuleParseError(tok.line, tok.col, expected)

    def _advance(self) -> _Token:
        tok = self.cur
        self.pos += 1
        return tok

    def _accept_op(self, *ops: str) -> Optional[_Token]:
        if self.cur.kind == "OP" and self.cur.text in ops:
            return self._advance()
        return None

    def _expect_op(self, op: str) -> _Token:
        tok = self._accept_op(op)
        if tok is None:
            self._fail(f"{op!r}")
        return tok

    def _accept_word(self, word: str) -> Optional[_Token]:
        if self.cur.kind == "IDENT" and self.cur.text == word:
            return self._advance()
        return None

    def ruleset(self) -> list[Rule]:
        rules = []
        while self.cur.kind != "EOF":
            rules.append(self.rule())
        return rules

    def rule(self) -> Rule:
        if self.cur.kind != "IDENT" or self.cur.text in _KEYWORDS:
            self._fail("a rule name")
        name_tok = self._advance()
        self._expect_op(":")
        body = self.expr()
        return Rule(name_tok.text, body, (name_tok.line, name_tok.col))

    def expr(self) -> Expr:
        if self._accept_word("if"):
            self._expect_op("(")
            cond = self.expr()
            self._expect_op(")")
            then = self.expr()
            return If(cond, then)
        return self.or_expr()

    def or_expr(self) -> Expr:
        node = self.and_expr()
        while self._accept_word("or"):
            node = Binary("or", node, self.and_expr())
        return node

    def and_expr(self) -> Expr:
        node = self.not_expr()
        while self._accept_word("and"):
            node = Binary("and", node, self.not_expr())
        return node

    def not_expr(self) -> Expr:
        if self._accept_word("not"):
            return Unary("not", self.not_expr())
        return self.cmp()

    def cmp(self) -> Expr:
        node = self.sum()
        if self.cur.kind == "OP" and self.cur.text in _CMP_OPS:
            op = self._advance().text
            node = Binary(op, node, self.sum())
        return node

    def sum(self) -> Expr:
        node = self.term()
        while True:
            tok = self._accept_op("+", "-")
            if tok is None:
                return node
            node = Binary(tok.text, node, self.term())

    def term(self) -> Expr:
        node = self.factor()
        while True:
            tok = self._accept_op("*", "/")
            if tok is None:
                return node
            node = Binary(tok.text, node, self.factor())

    def factor(self) -> Expr:
        tok = self.cur
        if tok.kind == "NUMBER":
            self._advance()
            return NumberLit(tok.value)
        if tok.kind == "STRING":
            self._advance()
            return TextLit(tok.value)
        if self._accept_op("-"):
            inner = self.factor()
            if isinstance(inner, NumberLit):  # fold negative literals
                return NumberLit(-inner.value)
            return Unary("neg", inner)
        if self._accept_op("("):
            node = self.expr()
            self._expect_op(")")
            return node
        if self._accept_op("{"):
            return self.set_tail()
        if tok.kind == "IDENT":
            if tok.text == "NA":
                self._advance()
                return NALit()
            if tok.text in _KEYWORDS:
                self._fail("an expression")
            if tok.text in _CALL_FNS and self._peek_is_call():
                return self.call()
            return self.varref()
        self._fail("an expression")

    def _peek_is_call(self) -> bool:
        nxt = self.tokens[self.pos + 1]
        return nxt.kind == "OP" and nxt.text == "("

    def set_tail(self) -> SetLit:
        items: list[Union[Fraction, str]] = []
        while True:
            tok = self.cur
            if tok.kind == "NUMBER":
                self._advance()
                items.append(tok.value)
            elif tok.kind == "STRING":
                self._advance()
                items.append(tok.value)
            else:
                self._fail("a number or string inside { }")
            if self._accept_op("}"):
                return SetLit(tuple(items))
            self._expect_op(",")

    def call(self) -> Expr:
        fn = self._advance().text
        self._expect_op("(")
        args = [self.expr()]
        while self._accept_op(","):
            args.append(self.expr())
        self._expect_op(")")
        if fn == "abs":
            if len(args) != 1:
                self._fail("one argument to abs")
            return Unary("abs", args[0])
        if fn in AGGREGATE_FNS:
            if len(args) != 1:
                self._fail(f"one argument to {fn}")
            return Aggregate(fn, args[0])
        if fn == "in_set":
            if len(args) != 2:
                self._fail("two arguments to in_set")
        elif len(args) != 1:
            self._fail(f"one argument to {fn}")
        return Builtin(fn, tuple(args))

    def varref(self) -> VarRef:
        first = self._advance().text
        table: Optional[str] = None
        name = first
        if self._accept_op("."):
            if self.cur.kind != "IDENT":
                self._fail("a variable name after '.'")
            table = first
            name = self._advance().text
        lag = 0
        if self._accept_op("@"):
            tok = self.cur
            if tok.kind != "NUMBER" or not isinstance(tok.value, Fraction) or tok.value.denominator != 1:
                self._fail("an integer lag after '@'")
            self._advance()
            lag = int(tok.value)
        return VarRef(name, table=table, lag=lag)


# --- static typing ------------------------------------------------------

T_NUM, T_TEXT, T_VAL, T_LOG, T_SET = "number", "text", "value", "logical", "set"
_SCALARS = (T_NUM, T_TEXT, T_VAL)
_NUMERICISH = (T_NUM, T_VAL)


def _typeof(expr: Expr, rule_name: str) -> str:
    def err(node: Expr, message: str):
        raise RuleTypeError(rule_name, format_expr(node), message)

    if isinstance(expr, NumberLit):
        return T_NUM
    if isinstance(expr, TextLit):
        return T_TEXT
    if isinstance(expr, (NALit, VarRef)):
        return T_VAL
    if isinstance(expr, SetLit):
        return T_SET
    if isinstance(expr, Aggregate):
        t = _typeof(expr.arg, rule_name)
        if expr.fn == "count":
            if t not in _SCALARS:
                err(expr, f"count needs a data argument, not {t}")
        elif t not in _NUMERICISH:
            err(expr, f"{expr.fn} needs a numeric argument, not {t}")
        return T_NUM
    if isinstance(expr, Unary):
        t = _typeof(expr.operand, rule_name)
        if expr.op == "not":
            if t != T_LOG:
                err(expr, f"not needs a logical operand, not {t}")
            return T_LOG
        if t not in _NUMERICISH:
            err(expr, f"{expr.op} needs a numeric operand, not {t}")
        return T_NUM
    if isinstance(expr, Binary):
        lt = _typeof(expr.left, rule_name)
        rt = _typeof(expr.right, rule_name)
        if expr.op in ("+", "-", "*", "/"):
            for t in (lt, rt):
                if t not in _NUMERICISH:
                    err(expr, f"{expr.op!r} needs numeric operands, got {t}")
            return T_NUM
        if expr.op in _CMP_OPS:
            for t in (lt, rt):
                if t not in _SCALARS:
                    err(expr, f"{expr.op!r} compares data values, got {t}")
            return T_LOG
        # and / or
        for t in (lt, rt):
            if t != T_LOG:
                err(expr, f"{expr.op!r} needs logical operands, got {t}")
        return T_LOG
    if isinstance(expr, If):
        for part in (expr.cond, expr.then):
            if _typeof(part, rule_name) != T_LOG:
                err(expr, "if needs logical condition and consequent")
        return T_LOG
    if isinstance(expr, Builtin):
        if expr.fn == "in_set":
            t0 = _typeof(expr.args[0], rule_name)
            if t0 not in _SCALARS:
                err(expr, f"in_set tests a data value, got {t0}")
            if not isinstance(expr.args[1], SetLit):
                err(expr, "the second argument of in_set must be a literal set")
            return T_LOG
        t = _typeof(expr.args[0], rule_name)
        if t not in _SCALARS:
            err(expr, f"{expr.fn} tests a data value, got {t}")
        return T_LOG
    raise AssertionError(f"unhandled node {expr!r}")


def type_check(rule: Rule) -> None:
    """Reject rules whose body is not a logical expression."""
    t = _typeof(rule.body, rule.name)
    if t != T_LOG:
        raise RuleTypeError(rule.name, format_expr(rule.body), f"rule body must be logical, not {t}")


# --- public operations --------------------------------------------------

def parse_rules(text: str) -> RuleSet:
    """Parse and type-check a rule file."""
    rules = _Parser(_tokenize(text)).ruleset()
    for rule in rules:
        type_check(rule)
    return RuleSet(tuple(rules))


def parse_rule(text: str) -> Rule:
    """Parse a single ``name: expr`` rule (convenience for tests and API use)."""
    ruleset = parse_rules(text)
    if len(ruleset) != 1:
        raise ValueError("expected exactly one rule")
    return ruleset.rules[0]


def negate_expr(expr: Expr) -> Expr:
    """An expression equivalent to not(expr) under three-valued logic,
    with the negation pushed inward (comparisons flip, De Morgan on
    and/or, implications become cond-and-not-consequent)."""
    flipped = {"<": ">=", "<=": ">", "==": "!=", "!=": "==", ">=": "<", ">": "<="}
    if isinstance(expr, Binary):
        if expr.op in flipped:
            return Binary(flipped[expr.op], expr.left, expr.right)
        if expr.op == "and":
            return Binary("or", negate_expr(expr.left), negate_expr(expr.right))
        if expr.op == "or":
            return Binary("and", negate_expr(expr.left), negate_expr(expr.right))
    if isinstance(expr, Unary) and expr.op == "not":
        return expr.operand
    if isinstance(expr, If):
        return Binary("and", expr.cond, negate_expr(expr.then))
    return Unary("not", expr)


def negate_rule(rule: Rule) -> Rule:
    return Rule(rule.name, negate_expr(rule.body), rule.source_span)


@dataclass(frozen=True)
class SpanReport:
    """What a rule touches along the four key dimensions.

    ``tables`` uses None for the default (unqualified) table.
    ``variables`` holds (table, name) pairs; an unqualified name is
    attributed to the single explicitly named table when there is
    exactly one, else to the default table.  ``bare_tables`` restricts
    ``tables`` to references outside any aggregate (the record scope).
    """

    tables: frozenset[Optional[str]]
    variables: frozenset[tuple[Optional[str], str]]
    has_aggregate: bool
    max_lag: int
    bare_tables: frozenset[Optional[str]] = field(default_factory=frozenset)


def referenced_signature(rule: Rule) -> SpanReport:
    refs: list[tuple[Optional[str], str, int, bool]] = []
    saw_aggregate = False

    def walk(e: Expr, in_agg: bool) -> None:
        nonlocal saw_aggregate
        if isinstance(e, VarRef):
            refs.append((e.table, e.variable, e.lag, in_agg))
        elif isinstance(e, Aggregate):
            saw_aggregate = True
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
            for arg in e.args:
                walk(arg, in_agg)

    walk(rule.body, False)
    explicit = {t for t, _, _, _ in refs if t is not None}
    fold = next(iter(explicit)) if len(explicit) == 1 else None

    def folded(t: Optional[str]) -> Optional[str]:
        return t if t is not None else fold

    tables = frozenset(folded(t) for t, _, _, _ in refs) or frozenset({None})
    variables = frozenset((folded(t), name) for t, name, _, _ in refs)
    max_lag = max((lag for _, _, lag, _ in refs), default=0)
    bare = frozenset(folded(t) for t, _, _, in_agg in refs if not in_agg)
    return SpanReport(
        tables=tables,
        variables=variables,
        has_aggregate=saw_aggregate,
        max_lag=max_lag,
        bare_tables=bare,
    )


# --- formatting ---------------------------------------------------------

_PREC_IF, _PREC_OR, _PREC_AND, _PREC_NOT, _PREC_CMP, _PREC_SUM, _PREC_TERM, _PREC_NEG, _PREC_ATOM = range(9)


def _prec(expr: Expr) -> int:
    if isinstance(expr, If):
        return _PREC_IF
    if isinstance(expr, Binary):
        return {
            "or": _PREC_OR,
            "and": _PREC_AND,
            "+": _PREC_SUM,
            "-": _PREC_SUM,
            "*": _PREC_TERM,
            "/": _PREC_TERM,
        }.get(expr.op, _PREC_CMP)
    if isinstance(expr, Unary):
        return {"not": _PREC_NOT, "neg": _PREC_NEG}.get(expr.op, _PREC_ATOM)
    return _PREC_ATOM


def _fmt_literal(item: Union[Fraction, str]) -> str:
    if isinstance(item, Fraction):
        return format_number(item)
    escaped = item.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def format_expr(expr: Expr, minprec: int = 0) -> str:
    text = _format_bare(expr)
    if _prec(expr) < minprec:
        return f"({text})"
    return text


def _format_bare(expr: Expr) -> str:
    if isinstance(expr, NumberLit):
        return format_number(expr.value)
    if isinstance(expr, TextLit):
        return _fmt_literal(expr.value)
    if isinstance(expr, NALit):
        return "NA"
    if isinstance(expr, SetLit):
        return "{" + ", ".join(_fmt_literal(i) for i in expr.items) + "}"
    if isinstance(expr, VarRef):
        text = expr.variable if expr.table is None else f"{expr.table}.{expr.variable}"
        return text if expr.lag == 0 else f"{text}@{expr.lag}"
    if isinstance(expr, Aggregate):
        return f"{expr.fn}({format_expr(expr.arg)})"
    if isinstance(expr, Builtin):
        return f"{expr.fn}(" + ", ".join(format_expr(a) for a in expr.args) + ")"
    if isinstance(expr, Unary):
        if expr.op == "not":
            return "not " + format_expr(expr.operand, _PREC_NOT)
        if expr.op == "abs":
            return f"abs({format_expr(expr.operand)})"
        return "-" + format_expr(expr.operand, _PREC_NEG)
    if isinstance(expr, If):
        return f"if ({format_expr(expr.cond)}) {format_expr(expr.then)}"
    if isinstance(expr, Binary):
        prec = _prec(expr)
        left = format_expr(expr.left, prec)
        right = format_expr(expr.right, prec + 1)
        return f"{left} {expr.op} {right}"
    raise AssertionError(f"unhandled node {expr!r}")


def format_rule(rule: Rule) -> str:
    """Canonical one-line text; reparsing reproduces the same AST."""
    return f"{rule.name}: {format_expr(rule.body)}"


def format_ruleset(rules: RuleSet) -> str:
    return "".join(format_rule(r) + "\n" for r in rules)
