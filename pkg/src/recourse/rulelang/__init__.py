"""Rule language: AST, parser, canonical printer, and program analysis."""

from .ast import (
    Abducible,
    Atom,
    Cmp,
    Lit,
    Num,
    Op,
    Program,
    Rule,
    Sym,
    Var,
    alpha_equal,
    body_vars,
    term_vars,
)
from .parser import parse_program, parse_query
from .printer import print_literal, print_program, print_rule, print_term
from .analysis import check_program, ProgramReport

__all__ = [
    "Abducible",
    "Atom",
    "Cmp",
    "Lit",
    "Num",
    "Op",
    "Program",
    "ProgramReport",
    "Rule",
    "Sym",
    "Var",
    "alpha_equal",
    "body_vars",
    "check_program",
    "parse_program",
    "parse_query",
    "print_literal",
    "print_program",
    "print_rule",
    "print_term",
    "term_vars",
]
