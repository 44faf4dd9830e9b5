"""Causal constraint rule sets: ordinary program fragments relating features.

Every admissible world, factual or counterfactual, must satisfy each causal
predicate. check_totality guards against the silent-deletion failure mode:
a feature value no clause can ever cover would vanish from every world.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .engine.solver import SolveOptions, solve
from .errors import CausalSpecError
from .rulelang.ast import Atom, BodyLiteral, Cmp, Lit, Num, Program, Sym, Var
from .schema import FeatureDef, FeatureSchema


@dataclass(frozen=True)
class CausalRuleSet:
    """Rules plus the feature each predicate argument position ranges over."""

    rules: Program
    arg_features: tuple[tuple[str, tuple[str, ...]], ...]  # (pred, features-by-position)

    @classmethod
    def empty(cls) -> "CausalRuleSet":
        return cls(rules=Program(), arg_features=())

    @property
    def predicates(self) -> list[str]:
        return [pred for pred, _ in self.arg_features]

    def features_of(self, pred: str) -> tuple[str, ...]:
        for name, features in self.arg_features:
            if name == pred:
                return features
        raise CausalSpecError(f"no argument map for causal predicate {pred!r}")

    def validate(self, schema: FeatureSchema) -> None:
        for pred, features in self.arg_features:
            clauses = [r for r in self.rules.rules if r.head and r.head.pred == pred]
            if not clauses:
                raise CausalSpecError(f"causal predicate {pred!r} has no clauses")
            arity = clauses[0].head.arity
            if arity != len(features):
                raise CausalSpecError(
                    f"{pred!r}: {arity} arguments but {len(features)} mapped features"
                )
            for feature in features:
                if feature not in schema:
                    raise CausalSpecError(f"{pred!r} maps unknown feature {feature!r}")


def numeric_probe_points(feature: FeatureDef, constants: set[int]) -> list[int]:
    """Boundary constants plus their neighbors, clamped into the feature range."""
    points = {feature.min, feature.max}
    for c in constants:
        for candidate in (c - 1, c, c + 1):
            if feature.min <= candidate <= feature.max:
                points.add(candidate)
    return sorted(points)


def _clause_constants(rules: Program, pred: str) -> set[int]:
    out: set[int] = set()
    for rule in rules.rules:
        if rule.head is None or rule.head.pred != pred:
            continue
        for lit in rule.body:
            if isinstance(lit, Cmp):
                for side in (lit.lhs, lit.rhs):
                    if isinstance(side, Num):
                        out.add(side.value)
    return out


@dataclass
class TotalityReport:
    """Verdict plus diagnostics from the cross-product scan of one rule set."""

    total: bool = True
    dead_values: list[tuple[str, str, object]] = field(default_factory=list)
    uncovered: dict[str, list[tuple]] = field(default_factory=dict)
    checked: dict[str, int] = field(default_factory=dict)


def check_totality(
    causal: CausalRuleSet, schema: FeatureSchema, max_examples: int = 10
) -> TotalityReport:
    """Scan each causal predicate over its discretized feature cross-product.

    A predicate may deliberately forbid tuples (that is its purpose); the hard
    verdict therefore keys on dead values: a single feature value that no
    completion of the other arguments can ever satisfy. Unsatisfiable full
    tuples are reported as informational counterexamples.
    """
    causal.validate(schema)
    report = TotalityReport()
    for pred, features in causal.arg_features:
        constants = _clause_constants(causal.rules, pred)
        domains: list[list] = []
        for fname in features:
            feat = schema.feature(fname)
            if feat.is_categorical:
                domains.append(list(feat.values))
            else:
                domains.append(numeric_probe_points(feat, constants))
        satisfiable_value: dict[tuple[int, object], bool] = {}
        uncovered: list[tuple] = []
        count = 0
        for combo in itertools.product(*domains):
            count += 1
            goal = [Lit(Atom(pred, tuple(_const(v) for v in combo)))]
            hit = (
                next(
                    iter(solve(causal.rules, goal, SolveOptions(max_solutions=1))), None
                )
                is not None
            )
            if not hit and len(uncovered) < max_examples:
                uncovered.append(combo)
            for position, value in enumerate(combo):
                key = (position, value)
                satisfiable_value[key] = satisfiable_value.get(key, False) or hit
        report.checked[pred] = count
        if uncovered:
            report.uncovered[pred] = uncovered
        for (position, value), ok in sorted(satisfiable_value.items(), key=str):
            if not ok:
                report.dead_values.append((pred, features[position], value))
    report.total = not report.dead_values
    return report


def _const(value) -> Sym | Num:
    return Num(value) if isinstance(value, int) else Sym(value)


def apply_causal(
    goal: list[BodyLiteral],
    causal: CausalRuleSet,
    phase_vars: dict[str, Var],
) -> list[BodyLiteral]:
    """Append one constraint atom per causal predicate for one world's variables."""
    out = list(goal)
    for pred, features in causal.arg_features:
        args = []
        for feature in features:
            if feature not in phase_vars:
                raise CausalSpecError(
                    f"{pred!r} needs feature {feature!r} but the query does not bind it"
                )
            args.append(phase_vars[feature])
        out.append(Lit(Atom(pred, tuple(args))))
    return out
