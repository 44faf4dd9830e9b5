"""Canonical printing: one rule per line, single space after commas.

parse(print(p)) is structurally equal to p for every admissible program.
Numeric constants render at the program scale (scale 0 prints bare integers).
"""

from __future__ import annotations

import re

from .ast import Abducible, Atom, BodyLiteral, Cmp, Lit, Num, Program, Rule, Sym, Term, Var

_BARE_SYMBOL = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


def print_num(value: int, scale: int = 0) -> str:
    if scale == 0:
        return str(value)
    sign = "-" if value < 0 else ""
    digits = str(abs(value)).rjust(scale + 1, "0")
    return f"{sign}{digits[:-scale]}.{digits[-scale:]}"


def print_term(term: Term, scale: int = 0) -> str:
    if isinstance(term, Var):
        return "_" if term.anonymous else term.name
    if isinstance(term, Sym):
        if _BARE_SYMBOL.match(term.name):
            return term.name
        return f"'{term.name}'"
    if isinstance(term, Num):
        return print_num(term.value, scale)
    raise TypeError(f"not a term: {term!r}")


def print_atom(atom: Atom, scale: int = 0) -> str:
    if not atom.args:
        return atom.pred
    args = ", ".join(print_term(a, scale) for a in atom.args)
    return f"{atom.pred}({args})"


def print_literal(lit: BodyLiteral, scale: int = 0) -> str:
    if isinstance(lit, Cmp):
        return f"{print_term(lit.lhs, scale)} {lit.op.value} {print_term(lit.rhs, scale)}"
    if isinstance(lit, Lit):
        text = print_atom(lit.atom, scale)
        return f"not {text}" if lit.negated else text
    raise TypeError(f"not a body literal: {lit!r}")


def print_rule(rule: Rule, scale: int = 0) -> str:
    body = ", ".join(print_literal(l, scale) for l in rule.body)
    if rule.head is None:
        return f":- {body}."
    head = print_atom(rule.head, scale)
    if rule.head_negated:
        head = f"not {head}"
    if not rule.body:
        return f"{head}."
    return f"{head} :- {body}."


def print_abducible(abd: Abducible) -> list[str]:
    """Reprint an abducible as the even-loop clause pair it came from."""
    if abd.feature is not None:
        comp = abd.complement or f"not_{abd.pred}"
        return [
            f"{abd.pred}(X) :- not {comp}(X).",
            f"{comp}(X) :- f_domain({abd.feature}, Y), {abd.pred}(Y), Y \\= X.",
        ]
    lines = []
    values = list(abd.values)
    for i, value in enumerate(values):
        other = values[(i + 1) % len(values)]
        lines.append(
            f"{abd.pred}({print_term(value)}) :- not {abd.pred}({print_term(other)})."
        )
    return lines


def print_program(program: Program) -> str:
    lines = [print_rule(rule, program.scale) for rule in program.rules]
    for abd in program.abducibles:
        lines.extend(print_abducible(abd))
    return "\n".join(lines) + ("\n" if lines else "")
