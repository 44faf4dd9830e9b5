"""Mechanical dual-rule synthesis.

From the k clauses defining predicate p, generate clauses proving ``not p``
constructively: one umbrella clause

    not p(Var0..Varn-1) :- not o_p_1(Var0..), ..., not o_p_k(Var0..).

and, for clause i with (head-normalized) body literals L1..Lm, the m clauses

    not o_p_i(Var0..) :- L1, .., L(j-1), negate(Lj).      (j = 1..m)

Head normalization rewrites constant and repeated head arguments into leading
equality literals so facts dualize as disequalities. Clauses with body-only
variables are rejected: their duals would need universal quantification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DualizationError
from .rulelang.ast import Atom, BodyLiteral, Cmp, Lit, Op, Program, Rule, Term, Var
from .rulelang.printer import print_rule

_EQ = Op.EQ


def negate_literal(lit: BodyLiteral) -> BodyLiteral:
    """Complement one body literal; an involution."""
    if isinstance(lit, Cmp):
        return Cmp(lit.lhs, lit.op.complement(), lit.rhs)
    return Lit(lit.atom, negated=not lit.negated)


def _head_vars(arity: int) -> tuple[Var, ...]:
    return tuple(Var(f"Var{i}") for i in range(arity))


def _normalize_clause(rule: Rule, pred: str) -> tuple[tuple[BodyLiteral, ...], tuple[Var, ...]]:
    """Rename head args to Var0..Varn-1, folding constants/repeats into equalities."""
    assert rule.head is not None
    fresh = _head_vars(rule.head.arity)
    mapping: dict[Var, Var] = {}
    prefix: list[BodyLiteral] = []
    for i, arg in enumerate(rule.head.args):
        if isinstance(arg, Var):
            if arg in mapping:
                prefix.append(Cmp(fresh[i], _EQ, mapping[arg]))
            else:
                mapping[arg] = fresh[i]
        else:
            prefix.append(Cmp(fresh[i], _EQ, arg))

    def sub_term(term: Term) -> Term:
        if isinstance(term, Var):
            if term not in mapping:
                raise DualizationError(
                    f"clause for {pred!r} has body-only variable {term.name}: "
                    f"{print_rule(rule)}"
                )
            return mapping[term]
        return term

    def sub_literal(lit: BodyLiteral) -> BodyLiteral:
        if isinstance(lit, Cmp):
            return Cmp(sub_term(lit.lhs), lit.op, sub_term(lit.rhs))
        return Lit(Atom(lit.atom.pred, tuple(sub_term(a) for a in lit.atom.args)), lit.negated)

    body = tuple(prefix) + tuple(sub_literal(l) for l in rule.body)
    return body, fresh


def dualize_predicate(program: Program, pred: str, arity: int) -> list[Rule]:
    """Umbrella plus per-clause duals for one predicate.

    A predicate with zero clauses yields the single fact ``not p(Var0..)``;
    a clause whose normalized body is empty (an all-variable-head fact) makes
    the negation unprovable, so the dual clause set is empty.
    """
    clauses = program.clauses(pred, arity)
    fresh = _head_vars(arity)
    head = Atom(pred, fresh)
    if not clauses:
        return [Rule(head=head, body=(), head_negated=True)]

    out: list[Rule] = []
    umbrella_body: list[BodyLiteral] = []
    per_clause: list[list[Rule]] = []
    for i, clause in enumerate(clauses, start=1):
        body, _ = _normalize_clause(clause, pred)
        if not body:
            return []
        helper = Atom(f"o_{pred}_{i}", fresh)
        umbrella_body.append(Lit(helper, negated=True))
        rules_i = []
        for j in range(1, len(body) + 1):
            dual_body = body[: j - 1] + (negate_literal(body[j - 1]),)
            rules_i.append(Rule(head=helper, body=dual_body, head_negated=True))
        per_clause.append(rules_i)
    out.append(Rule(head=head, body=tuple(umbrella_body), head_negated=True))
    for rules_i in per_clause:
        out.extend(rules_i)
    return out


@dataclass(eq=False)
class DualProgram:
    """Source program paired with generated duals; immutable once built."""

    source: Program
    duals: Program
    _dualized: frozenset = field(default_factory=frozenset, repr=False)

    @property
    def scale(self) -> int:
        return self.source.scale

    def has_dual(self, pred: str, arity: int) -> bool:
        return (pred, arity) in self._dualized

    def neg_clauses(self, pred: str, arity: int) -> list[Rule]:
        return self.duals.neg_clauses(pred, arity)

    def ensure(self, pred: str, arity: int) -> "DualProgram":
        """Return a DualProgram that also carries duals for pred/arity."""
        if self.has_dual(pred, arity) or self.source.abducible_for(pred):
            return self
        extra, keys = _duals_closure(self.source, {(pred, arity)}, self._dualized)
        if not keys:
            return self
        rules = self.duals.rules + tuple(extra)
        return DualProgram(
            source=self.source,
            duals=Program(rules=rules, scale=self.source.scale),
            _dualized=self._dualized | keys,
        )


def _negated_preds_in(rules: tuple[Rule, ...]) -> set[tuple[str, int]]:
    out = set()
    for rule in rules:
        for lit in rule.body:
            if isinstance(lit, Lit) and lit.negated:
                out.add(lit.atom.key)
    return out


def _duals_closure(
    source: Program,
    want: set[tuple[str, int]],
    have: frozenset | set,
) -> tuple[list[Rule], frozenset]:
    """Generate duals for ``want`` and everything they transitively negate.

    Returns the rules plus the set of predicate keys now covered, which can
    exceed the rule heads when a dual is empty (tautological source clause).
    """
    abducible_preds = {a.pred for a in source.abducibles}
    generated: list[Rule] = []
    done = set(have)
    covered: set[tuple[str, int]] = set()
    queue = [k for k in sorted(want) if k not in done]
    while queue:
        pred, arity = queue.pop(0)
        if (pred, arity) in done or pred in abducible_preds:
            done.add((pred, arity))
            continue
        done.add((pred, arity))
        if pred.startswith("o_") and not source.clauses(pred, arity):
            continue
        rules = dualize_predicate(source, pred, arity)
        generated.extend(rules)
        covered.add((pred, arity))
        covered.update(r.head.key for r in rules)
        for key in sorted(_negated_preds_in(tuple(rules))):
            name = key[0]
            if key not in done and not name.startswith("o_"):
                queue.append(key)
    return generated, frozenset(covered)


def dualize_program(program: Program, roots: tuple[tuple[str, int], ...] = ()) -> DualProgram:
    """Duals for every predicate negated in a body (or listed in roots).

    The closure follows negations introduced by the generated duals
    themselves, so every ``not q`` reachable at evaluation time is defined.
    """
    want = {
        key
        for key in _negated_preds_in(program.rules)
        if not program.abducible_for(key[0])
    }
    want.update(k for k in roots if not program.abducible_for(k[0]))
    rules, keys = _duals_closure(program, want, frozenset())
    duals = Program(rules=tuple(rules), scale=program.scale)
    return DualProgram(source=program, duals=duals, _dualized=keys)
