"""AST for the rule language.

Terms are variables, symbols, or scaled-integer numerals; there are no
function symbols. A Program is an ordered clause list plus the abducible
declarations recovered from even-loop pairs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Var:
    name: str
    anonymous: bool = False

    def __str__(self) -> str:
        return "_" if self.anonymous else self.name


@dataclass(frozen=True)
class Sym:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Num:
    value: int  # scaled integer

    def __str__(self) -> str:
        return str(self.value)


Term = Var | Sym | Num


class Op(enum.Enum):
    EQ = "="
    NEQ = "\\="
    LT = "#<"
    LE = "#=<"
    GT = "#>"
    GE = "#>="

    def complement(self) -> "Op":
        return _COMPLEMENT[self]


_COMPLEMENT = {
    Op.EQ: Op.NEQ,
    Op.NEQ: Op.EQ,
    Op.LT: Op.GE,
    Op.GE: Op.LT,
    Op.LE: Op.GT,
    Op.GT: Op.LE,
}


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> tuple[str, int]:
        return (self.pred, self.arity)


@dataclass(frozen=True)
class Lit:
    """Positive or negation-as-failure body literal."""

    atom: Atom
    negated: bool = False


@dataclass(frozen=True)
class Cmp:
    lhs: Term
    op: Op
    rhs: Term


BodyLiteral = Lit | Cmp


@dataclass(frozen=True)
class Rule:
    """head :- body.  head=None is an integrity constraint; head_negated marks duals."""

    head: Atom | None
    body: tuple[BodyLiteral, ...] = ()
    head_negated: bool = False

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    @property
    def is_constraint(self) -> bool:
        return self.head is None


@dataclass(frozen=True)
class Abducible:
    """A feature- or ground-valued exclusive choice recovered from an even loop.

    Feature loops (before_int_x / after_int_x pairs) carry the f_domain
    feature name and the complement predicate for reprinting; ground loops
    (teaches_db style) carry the explicit value list.
    """

    pred: str
    feature: str | None = None
    values: tuple[Sym, ...] = ()
    complement: str | None = None

    @property
    def phase(self) -> str | None:
        if self.pred.startswith("before_int_"):
            return "pre"
        if self.pred.startswith("after_int_"):
            return "post"
        return None


@dataclass(eq=False)
class Program:
    """Ordered rule list + abducibles. Treated as immutable after construction."""

    rules: tuple[Rule, ...] = ()
    abducibles: tuple[Abducible, ...] = ()
    scale: int = 0
    _by_pred: dict = field(default_factory=dict, repr=False)
    _neg_by_pred: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for rule in self.rules:
            if rule.head is None:
                continue
            index = self._neg_by_pred if rule.head_negated else self._by_pred
            index.setdefault(rule.head.key, []).append(rule)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return (
            self.rules == other.rules
            and self.abducibles == other.abducibles
            and self.scale == other.scale
        )

    def clauses(self, pred: str, arity: int) -> list[Rule]:
        return self._by_pred.get((pred, arity), [])

    def neg_clauses(self, pred: str, arity: int) -> list[Rule]:
        return self._neg_by_pred.get((pred, arity), [])

    def defined_preds(self) -> list[tuple[str, int]]:
        return list(self._by_pred.keys())

    @property
    def constraints(self) -> list[Rule]:
        return [r for r in self.rules if r.is_constraint]

    def abducible_for(self, pred: str) -> Abducible | None:
        for abd in self.abducibles:
            if abd.pred == pred:
                return abd
        return None

    def f_domain_values(self, feature: str) -> list[str]:
        """Symbols declared by f_domain(feature, ·) facts, in clause order."""
        out = []
        for rule in self.clauses("f_domain", 2):
            if rule.is_fact and rule.head.args[0] == Sym(feature):
                arg = rule.head.args[1]
                if isinstance(arg, Sym):
                    out.append(arg.name)
        return out

    def extend(self, other: "Program") -> "Program":
        if self.scale != other.scale:
            raise ValueError("cannot merge programs with different scales")
        return Program(
            rules=self.rules + other.rules,
            abducibles=self.abducibles + other.abducibles,
            scale=self.scale,
        )


def term_vars(term: Term) -> set[Var]:
    return {term} if isinstance(term, Var) else set()


def literal_vars(lit: BodyLiteral) -> set[Var]:
    if isinstance(lit, Cmp):
        return term_vars(lit.lhs) | term_vars(lit.rhs)
    out: set[Var] = set()
    for arg in lit.atom.args:
        out |= term_vars(arg)
    return out


def body_vars(body: tuple[BodyLiteral, ...]) -> set[Var]:
    out: set[Var] = set()
    for lit in body:
        out |= literal_vars(lit)
    return out


def _alpha_terms(a: Term, b: Term, env: dict) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        if a in env:
            return env[a] == b
        if b in env.values():
            return False
        env[a] = b
        return True
    return a == b


def _alpha_literals(a: BodyLiteral, b: BodyLiteral, env: dict) -> bool:
    if isinstance(a, Cmp) and isinstance(b, Cmp):
        return (
            a.op == b.op
            and _alpha_terms(a.lhs, b.lhs, env)
            and _alpha_terms(a.rhs, b.rhs, env)
        )
    if isinstance(a, Lit) and isinstance(b, Lit):
        if a.negated != b.negated or a.atom.key != b.atom.key:
            return False
        return all(_alpha_terms(x, y, env) for x, y in zip(a.atom.args, b.atom.args))
    return False


def alpha_equal(a: Rule, b: Rule) -> bool:
    """Structural equality of two rules modulo a consistent variable renaming."""
    if a.head_negated != b.head_negated or (a.head is None) != (b.head is None):
        return False
    if len(a.body) != len(b.body):
        return False
    env: dict = {}
    if a.head is not None:
        if a.head.key != b.head.key:
            return False
        if not all(_alpha_terms(x, y, env) for x, y in zip(a.head.args, b.head.args)):
            return False
    return all(_alpha_literals(x, y, env) for x, y in zip(a.body, b.body))
