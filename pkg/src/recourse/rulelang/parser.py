"""Tokenizer and recursive-descent parser for the rule language.

Accepts facts, normal rules, integrity constraints (headless or
``false``-headed), ``not``-headed dual clauses, quoted symbols,
backtick-quoted numerals, and both plain (``=<``) and hash-prefixed
(``#=<``) comparison spellings. Even-loop pairs are recognized after
parsing and normalized into Abducible declarations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import AdmissibilityError, RuleSyntaxError
from .ast import (
    Abducible,
    Atom,
    BodyLiteral,
    Cmp,
    Lit,
    Num,
    Op,
    Program,
    Rule,
    Sym,
    Term,
    Var,
    body_vars,
    term_vars,
)
from .printer import print_rule

_TOKEN_SPEC = [
    ("COMMENT", r"%[^\n]*"),
    ("WS", r"[ \t\r\n]+"),
    ("ARROW", r":-"),
    ("QUERY", r"\?-"),
    ("NUM", r"-?\d+\.\d+|-?\d+"),
    ("BQNUM", r"`-?\d+(?:\.\d+)?`"),
    ("QSYM", r"'[^']*'"),
    ("OP", r"#>=|#=<|#<|#>|>=|=<|\\=|<|>|="),
    ("NAME", r"[a-z][a-zA-Z0-9_]*"),
    ("VAR", r"_[a-zA-Z0-9_]*|[A-Z][a-zA-Z0-9_]*"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("DOT", r"\."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))

_OP_ALIASES = {
    "=": Op.EQ,
    "\\=": Op.NEQ,
    "#<": Op.LT,
    "<": Op.LT,
    "#=<": Op.LE,
    "=<": Op.LE,
    "#>": Op.GT,
    ">": Op.GT,
    "#>=": Op.GE,
    ">=": Op.GE,
}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = match.lastgroup or ""
        value = match.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = match.end()
    tokens.append(_Token("EOF", "", line, col))
    return tokens


def _normalize_symbol(text: str) -> str:
    return text.lower().replace("-", "_").replace(" ", "_")


class _Parser:
    def __init__(self, tokens: list[_Token], scale: int):
        self.tokens = tokens
        self.pos = 0
        self.scale = scale
        self.anon_count = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise RuleSyntaxError(f"expected {kind}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def fail(self, message: str) -> RuleSyntaxError:
        tok = self.peek()
        return RuleSyntaxError(message + f" (found {tok.text!r})", tok.line, tok.col)

    def parse_num(self, text: str, tok: _Token) -> Num:
        if "." in text:
            whole, frac = text.split(".")
            frac = frac.rstrip("0")
            if len(frac) > self.scale:
                raise RuleSyntaxError(
                    f"numeral {text} not representable at scale {self.scale}",
                    tok.line,
                    tok.col,
                )
            mantissa = int(whole + frac.ljust(self.scale, "0")) if whole.lstrip("-") else 0
            if whole.startswith("-"):
                mantissa = -abs(mantissa)
            return Num(mantissa)
        return Num(int(text) * 10**self.scale)

    def parse_term(self) -> Term:
        tok = self.next()
        if tok.kind == "VAR":
            if tok.text == "_":
                self.anon_count += 1
                return Var(f"_A{self.anon_count}", anonymous=True)
            return Var(tok.text)
        if tok.kind == "NAME":
            return Sym(tok.text)
        if tok.kind == "QSYM":
            return Sym(_normalize_symbol(tok.text[1:-1]))
        if tok.kind == "NUM":
            return self.parse_num(tok.text, tok)
        if tok.kind == "BQNUM":
            return self.parse_num(tok.text[1:-1], tok)
        raise RuleSyntaxError(f"expected a term, found {tok.text!r}", tok.line, tok.col)

    def parse_atom(self) -> Atom:
        tok = self.expect("NAME")
        args: tuple[Term, ...] = ()
        if self.peek().kind == "LPAREN":
            self.next()
            arglist = [self.parse_term()]
            while self.peek().kind == "COMMA":
                self.next()
                arglist.append(self.parse_term())
            self.expect("RPAREN")
            args = tuple(arglist)
        return Atom(tok.text, args)

    def parse_literal(self) -> BodyLiteral:
        tok = self.peek()
        if tok.kind == "NAME" and tok.text == "not":
            self.next()
            return Lit(self.parse_atom(), negated=True)
        if tok.kind == "NAME":
            # an atom, unless the bare name is the lhs of a comparison
            if self.peek(1).kind == "LPAREN":
                return Lit(self.parse_atom())
            if self.peek(1).kind == "OP":
                lhs = self.parse_term()
                op = _OP_ALIASES[self.next().text]
                return Cmp(lhs, op, self.parse_term())
            return Lit(self.parse_atom())
        if tok.kind in ("VAR", "NUM", "BQNUM", "QSYM"):
            lhs = self.parse_term()
            op_tok = self.next()
            if op_tok.kind != "OP":
                raise RuleSyntaxError(
                    f"expected comparison operator, found {op_tok.text!r}",
                    op_tok.line,
                    op_tok.col,
                )
            return Cmp(lhs, _OP_ALIASES[op_tok.text], self.parse_term())
        raise self.fail("expected a body literal")

    def parse_body(self) -> tuple[BodyLiteral, ...]:
        body = [self.parse_literal()]
        while self.peek().kind == "COMMA":
            self.next()
            body.append(self.parse_literal())
        return tuple(body)

    def parse_rule(self) -> Rule:
        self.anon_count = 0
        head: Atom | None = None
        head_negated = False
        tok = self.peek()
        if tok.kind == "ARROW":
            self.next()
            body = self.parse_body()
            self.expect("DOT")
            return Rule(head=None, body=body)
        if tok.kind == "NAME" and tok.text == "not":
            self.next()
            head = self.parse_atom()
            head_negated = True
        else:
            head = self.parse_atom()
            if head.pred == "false" and not head.args:
                head = None
        if self.peek().kind == "ARROW":
            self.next()
            body = self.parse_body()
        else:
            body = ()
        self.expect("DOT")
        if head is None and not body:
            raise self.fail("constraint with empty body")
        return Rule(head=head, body=body, head_negated=head_negated)

    def parse_program_rules(self) -> list[Rule]:
        rules = []
        while self.peek().kind != "EOF":
            rules.append(self.parse_rule())
        return rules

    def parse_query_goal(self) -> list[BodyLiteral]:
        if self.peek().kind == "QUERY":
            self.next()
        if self.peek().kind == "EOF":
            raise self.fail("empty query")
        goal = [self.parse_literal()]
        while self.peek().kind == "COMMA":
            self.next()
            goal.append(self.parse_literal())
        if self.peek().kind == "DOT":
            self.next()
        if self.peek().kind != "EOF":
            raise self.fail("trailing input after query")
        return goal


def _match_feature_loop(pos_rule: Rule, neg_rule: Rule) -> Abducible | None:
    """Recognize   p(X) :- not np(X).   np(X) :- f_domain(f, Y), p(Y), Y \\= X."""
    if pos_rule.head is None or neg_rule.head is None:
        return None
    if pos_rule.head_negated or neg_rule.head_negated:
        return None
    if pos_rule.head.arity != 1 or neg_rule.head.arity != 1:
        return None
    if len(pos_rule.body) != 1 or len(neg_rule.body) != 3:
        return None
    (lit,) = pos_rule.body
    if not isinstance(lit, Lit) or not lit.negated:
        return None
    if lit.atom.pred != neg_rule.head.pred or lit.atom.arity != 1:
        return None
    head_var = pos_rule.head.args[0]
    if not isinstance(head_var, Var) or lit.atom.args[0] != head_var:
        return None
    np_var = neg_rule.head.args[0]
    if not isinstance(np_var, Var):
        return None
    feature: str | None = None
    loop_var: Var | None = None
    saw_call = False
    saw_diseq = False
    for body_lit in neg_rule.body:
        if isinstance(body_lit, Lit) and not body_lit.negated:
            atom = body_lit.atom
            if atom.pred == "f_domain" and atom.arity == 2:
                if not isinstance(atom.args[0], Sym) or not isinstance(atom.args[1], Var):
                    return None
                feature = atom.args[0].name
                loop_var = atom.args[1]
            elif atom.pred == pos_rule.head.pred and atom.arity == 1:
                if not isinstance(atom.args[0], Var):
                    return None
                saw_call = True
                call_var = atom.args[0]
        elif isinstance(body_lit, Cmp) and body_lit.op is Op.NEQ:
            operands = {body_lit.lhs, body_lit.rhs}
            if np_var in operands:
                saw_diseq = True
                diseq_other = (operands - {np_var}).pop() if len(operands) == 2 else None
        else:
            return None
    if feature is None or loop_var is None or not saw_call or not saw_diseq:
        return None
    if call_var != loop_var or diseq_other != loop_var:
        return None
    return Abducible(
        pred=pos_rule.head.pred, feature=feature, complement=neg_rule.head.pred
    )


def _match_ground_loop(a: Rule, b: Rule) -> Abducible | None:
    """Recognize   p(c1) :- not p(c2).   p(c2) :- not p(c1)."""
    for rule in (a, b):
        if rule.head is None or rule.head_negated or len(rule.body) != 1:
            return None
        (lit,) = rule.body
        if not isinstance(lit, Lit) or not lit.negated:
            return None
    ha, hb = a.head, b.head
    la, lb = a.body[0].atom, b.body[0].atom
    if not (ha.pred == hb.pred == la.pred == lb.pred):
        return None
    if ha.arity != 1 or hb.arity != 1:
        return None
    va, vb = ha.args[0], hb.args[0]
    if not isinstance(va, Sym) or not isinstance(vb, Sym) or va == vb:
        return None
    if la.args != (vb,) or lb.args != (va,):
        return None
    return Abducible(pred=ha.pred, feature=None, values=(va, vb))


def _extract_abducibles(rules: list[Rule]) -> tuple[list[Rule], list[Abducible]]:
    matched: set[int] = set()
    abducibles: list[Abducible] = []
    n = len(rules)
    for i in range(n):
        if i in matched:
            continue
        for j in range(n):
            if j == i or j in matched:
                continue
            abd = _match_feature_loop(rules[i], rules[j]) or _match_ground_loop(
                rules[i], rules[j]
            )
            if abd is not None:
                if any(existing.pred == abd.pred for existing in abducibles):
                    raise AdmissibilityError(
                        f"duplicate even loop for predicate {abd.pred!r}",
                        print_rule(rules[i]),
                    )
                matched.update((i, j))
                abducibles.append(abd)
                break
    remaining = [r for k, r in enumerate(rules) if k not in matched]
    return remaining, abducibles


def _check_safety(rule: Rule) -> None:
    """Every body variable must occur in the head or in a positive body atom."""
    bound: set[Var] = set()
    if rule.head is not None:
        for arg in rule.head.args:
            bound |= term_vars(arg)
    for lit in rule.body:
        if isinstance(lit, Lit) and not lit.negated:
            for arg in lit.atom.args:
                bound |= term_vars(arg)
    unsafe = body_vars(rule.body) - bound
    if unsafe:
        name = sorted(v.name for v in unsafe)[0]
        raise AdmissibilityError(
            f"variable {name} is not range-restricted", print_rule(rule)
        )


def _check_acyclic(rules: list[Rule], abducibles: list[Abducible]) -> None:
    """Dependency graph through user-defined predicates must be acyclic."""
    abducible_preds = {a.pred for a in abducibles}
    edges: dict[str, set[str]] = {}
    clause_of: dict[str, Rule] = {}
    for rule in rules:
        if rule.head is None:
            continue
        src = ("~" if rule.head_negated else "") + rule.head.pred
        clause_of.setdefault(src, rule)
        for lit in rule.body:
            if isinstance(lit, Lit) and lit.atom.pred not in abducible_preds:
                edges.setdefault(src, set()).add(lit.atom.pred)

    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}

    def visit(node: str, stack: list[str]) -> None:
        color[node] = GRAY
        for succ in sorted(edges.get(node, ())):
            if color.get(succ, WHITE) == GRAY:
                cycle = " -> ".join(stack + [node, succ])
                offender = clause_of.get(node) or clause_of.get(succ)
                raise AdmissibilityError(
                    f"recursion outside the even-loop pattern: {cycle}",
                    print_rule(offender) if offender else None,
                )
            if color.get(succ, WHITE) == WHITE and (succ in edges or succ in clause_of):
                visit(succ, stack + [node])
        color[node] = BLACK

    for node in list(edges):
        if color.get(node, WHITE) == WHITE:
            visit(node, [])


def parse_program(text: str, scale: int = 0) -> Program:
    """Parse source text into an admissible Program.

    Raises RuleSyntaxError on malformed input and AdmissibilityError when the
    program falls outside the supported fragment.
    """
    parser = _Parser(_tokenize(text), scale)
    raw_rules = parser.parse_program_rules()
    rules, abducibles = _extract_abducibles(raw_rules)
    for rule in rules:
        _check_safety(rule)
    _check_acyclic(rules, abducibles)
    return Program(rules=tuple(rules), abducibles=tuple(abducibles), scale=scale)


def parse_query(text: str, scale: int = 0) -> list[BodyLiteral]:
    """Parse ``?- goal1, goal2.`` into a list of body literals."""
    parser = _Parser(_tokenize(text), scale)
    return parser.parse_query_goal()
