"""Static analysis: dependency graph, strata, feature usage, schema checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import AdmissibilityError
from ..schema import FeatureSchema
from .ast import Cmp, Lit, Program, Sym


@dataclass
class ProgramReport:
    """What check_program learned about an admissible program."""

    predicates: list[tuple[str, int]] = field(default_factory=list)
    edges: dict[str, set[str]] = field(default_factory=dict)
    strata: list[list[str]] = field(default_factory=list)
    abducibles: list[tuple[str, str | None, str | None]] = field(default_factory=list)
    feature_use: dict[str, set[str]] = field(default_factory=dict)

    def stratum_of(self, pred: str) -> int | None:
        for level, names in enumerate(self.strata):
            if pred in names:
                return level
        return None


def _range_pred_names(program: Program) -> set[str]:
    """Unary predicates defined by a single pure-bounds clause."""
    out = set()
    for pred, arity in program.defined_preds():
        if arity != 1:
            continue
        clauses = program.clauses(pred, arity)
        if len(clauses) == 1 and clauses[0].body and all(
            isinstance(lit, Cmp) for lit in clauses[0].body
        ):
            out.add(pred)
    return out


def check_program(program: Program, schema: FeatureSchema | None = None) -> ProgramReport:
    """Analyze an already-parsed program; raise on undeclared schema features.

    Admissibility proper (safety, acyclicity) is enforced by parse_program;
    this reports the dependency structure and feature usage on top of it.
    """
    report = ProgramReport()
    report.predicates = sorted(program.defined_preds())
    report.abducibles = [(a.pred, a.feature, a.phase) for a in program.abducibles]

    abducible_feature = {a.pred: a.feature for a in program.abducibles}
    range_preds = _range_pred_names(program)

    for rule in program.rules:
        if rule.head is None:
            continue
        src = ("~" if rule.head_negated else "") + rule.head.pred
        report.edges.setdefault(src, set())
        for lit in rule.body:
            if isinstance(lit, Lit):
                report.edges[src].add(lit.atom.pred)

    # direct feature constraints per predicate
    direct: dict[str, set[str]] = {}
    for rule in program.rules:
        if rule.head is None or rule.head_negated:
            continue
        use = direct.setdefault(rule.head.pred, set())
        for lit in rule.body:
            if not isinstance(lit, Lit):
                continue
            pred = lit.atom.pred
            if pred == "f_domain" and lit.atom.args and isinstance(lit.atom.args[0], Sym):
                use.add(lit.atom.args[0].name)
            elif pred in range_preds:
                use.add(pred)
            elif pred in abducible_feature and abducible_feature[pred]:
                use.add(abducible_feature[pred])

    # propagate through calls (graph is acyclic, simple fixpoint converges)
    changed = True
    while changed:
        changed = False
        for src, succs in report.edges.items():
            name = src.lstrip("~")
            use = direct.setdefault(name, set())
            for succ in succs:
                extra = direct.get(succ, set())
                if not extra <= use:
                    use |= extra
                    changed = True
    report.feature_use = {k: v for k, v in direct.items() if v}

    # strata: topological layers over defined predicates
    defined = {p for p, _ in program.defined_preds()} | set(abducible_feature)
    level: dict[str, int] = {}

    def depth(pred: str, seen: frozenset) -> int:
        if pred in level:
            return level[pred]
        if pred not in defined or pred in abducible_feature:
            return 0
        best = 0
        for name, arity in program.defined_preds():
            if name != pred:
                continue
            for rule in program.clauses(pred, arity):
                for lit in rule.body:
                    if isinstance(lit, Lit) and lit.atom.pred in defined:
                        if lit.atom.pred in seen:
                            raise AdmissibilityError(f"cycle through {lit.atom.pred}")
                        best = max(best, 1 + depth(lit.atom.pred, seen | {pred}))
        level[pred] = best
        return best

    for pred in sorted(defined):
        depth(pred, frozenset())
    if level:
        strata: list[list[str]] = [[] for _ in range(max(level.values()) + 1)]
        for pred, lvl in sorted(level.items()):
            strata[lvl].append(pred)
        report.strata = strata

    if schema is not None:
        declared = set(schema.names)
        for rule in program.rules:
            for lit in rule.body:
                if (
                    isinstance(lit, Lit)
                    and lit.atom.pred == "f_domain"
                    and lit.atom.args
                    and isinstance(lit.atom.args[0], Sym)
                    and lit.atom.args[0].name not in declared
                ):
                    raise AdmissibilityError(
                        f"f_domain references undeclared feature {lit.atom.args[0].name!r}"
                    )
        for rule in program.clauses("f_domain", 2):
            if rule.is_fact and isinstance(rule.head.args[0], Sym):
                if rule.head.args[0].name not in declared:
                    raise AdmissibilityError(
                        f"f_domain fact for undeclared feature {rule.head.args[0].name!r}"
                    )
        for abd in program.abducibles:
            if abd.feature is not None and abd.feature not in declared:
                raise AdmissibilityError(
                    f"even loop over undeclared feature {abd.feature!r}"
                )
    return report
