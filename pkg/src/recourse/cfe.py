"""Counterfactual layer: controls, intervention cost, the paired-world query,
and the minimal-cost search.

Both worlds of the paired query range over the same feature domains and
causal constraints; the factual world must satisfy the decision predicate,
the counterfactual world its dual, and per-feature control values link the
two (0 equal, 1 categorical change, +1/-1 numeric direction). Cost levels
are searched by re-querying with an exact-cost control enumeration, lowest
first; the nonzero controls at the first non-empty level are the cheapest
resolution of the inconsistency between the factual world and the rules for
the desired outcome.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .causal import CausalRuleSet, apply_causal
from .dual import DualProgram, dualize_program
from .engine.justify import Justification, tree_to_dict
from .engine.solver import Solution, SolveOptions, solve
from .errors import (
    AlreadyDesiredError,
    ControlError,
    EngineError,
    InstanceError,
    PartialInstanceError,
)
from .rulelang.ast import Atom, BodyLiteral, Cmp, Lit, Num, Op, Program, Sym, Var
from .schema import (
    FeatureDef,
    FeatureSchema,
    Instance,
    unscale_value,
    validate_instance,
)

ANY = "any"
IMMUTABLE = "immutable"
MUST_CHANGE = "change"
MUST_INCREASE = "increase"
MUST_DECREASE = "decrease"

_POLICIES = (ANY, IMMUTABLE, MUST_CHANGE, MUST_INCREASE, MUST_DECREASE)

UNDESIRED = "undesired"
DESIRED = "desired"


@dataclass(frozen=True)
class DecisionSpec:
    """Decision predicate, its argument features in order, and the two labels."""

    pred: str
    features: tuple[str, ...]
    undesired_label: str = "undesired"
    desired_label: str = "desired"

    def validate(self, schema: FeatureSchema) -> None:
        for feature in self.features:
            if feature not in schema:
                raise InstanceError(f"decision predicate maps unknown feature {feature!r}")


@dataclass(frozen=True)
class ControlSpec:
    """Per-feature mutability policy; features not listed are freely actionable."""

    policies: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, mapping: dict[str, str] | None = None) -> "ControlSpec":
        return cls(policies=tuple((mapping or {}).items()))

    def policy(self, feature: str) -> str:
        for name, value in self.policies:
            if name == feature:
                return value
        return ANY

    def validate(self, schema: FeatureSchema, factual: Instance | None = None) -> None:
        for name, value in self.policies:
            if value not in _POLICIES:
                raise ControlError(f"unknown policy {value!r} for {name!r}")
            feat = schema.feature(name)
            if value in (MUST_INCREASE, MUST_DECREASE) and not feat.is_numeric:
                raise ControlError(f"{value} only applies to numeric features ({name})")
            if value == MUST_CHANGE and not feat.is_categorical:
                raise ControlError(f"{value} only applies to categorical features ({name})")
        if factual is not None:
            for feat in schema:
                policy = self.policy(feat.name)
                bound = factual.get(feat.name)
                if bound is None:
                    continue
                if policy == MUST_INCREASE and bound >= feat.max:
                    raise ControlError(f"{feat.name} must increase but is at its maximum")
                if policy == MUST_DECREASE and bound <= feat.min:
                    raise ControlError(f"{feat.name} must decrease but is at its minimum")
                if policy == MUST_CHANGE and len(feat.values) == 1:
                    raise ControlError(f"{feat.name} must change but its domain is a singleton")

    def allowed_z(self, feat: FeatureDef) -> tuple[int, ...]:
        """Control values this policy admits, in canonical enumeration order."""
        policy = self.policy(feat.name)
        if policy == IMMUTABLE:
            return (0,)
        if policy == MUST_CHANGE:
            return (1,)
        if policy == MUST_INCREASE:
            return (1,)
        if policy == MUST_DECREASE:
            return (-1,)
        if feat.is_categorical:
            return (0, 1)
        return (0, 1, -1)


@dataclass(frozen=True)
class ControlVector:
    """Per-feature Z in schema order: 0 unchanged, 1 categorical change,
    +1/-1 numeric increase/decrease."""

    values: tuple[int, ...]

    @property
    def cost(self) -> int:
        return intervention_cost(self)

    def as_dict(self, schema: FeatureSchema) -> dict[str, int]:
        return dict(zip(schema.names, self.values))


def compare_categorical(feature: FeatureDef, pre: str, post: str) -> int:
    """0 iff equal, else 1; both symbols must belong to the feature's domain."""
    for value in (pre, post):
        if value not in feature.values:
            raise InstanceError(f"{value!r} not in domain of {feature.name}")
    return 0 if pre == post else 1


def compare_numeric(pre: int, post: int) -> int:
    """0 if equal, 1 if the value increased, -1 if it decreased."""
    if pre == post:
        return 0
    return 1 if post > pre else -1


def intervention_cost(controls: "ControlVector | Sequence[int]") -> int:
    """Sum of categorical controls plus squares of numeric controls: the
    number of changed features."""
    values = controls.values if isinstance(controls, ControlVector) else controls
    return sum(z * z for z in values)


def controls_between(schema: FeatureSchema, pre: Instance, post: Instance) -> ControlVector:
    out = []
    for feat in schema:
        a, b = pre.get(feat.name), post.get(feat.name)
        if a is None or b is None:
            raise PartialInstanceError(f"{feat.name} unbound in compared worlds")
        if feat.is_categorical:
            out.append(compare_categorical(feat, a, b))
        else:
            out.append(compare_numeric(a, b))
    return ControlVector(values=tuple(out))


def _ensure_dual(program: DualProgram | Program, decision: DecisionSpec) -> DualProgram:
    dp = program if isinstance(program, DualProgram) else dualize_program(program)
    return dp.ensure(decision.pred, len(decision.features))


def classify(
    schema: FeatureSchema,
    program: DualProgram | Program,
    decision: DecisionSpec,
    instance: Instance,
) -> tuple[str, Justification]:
    """Label a total instance; proves the decision predicate one way and its
    dual the other as a self-test, returning the successful side's proof."""
    validate_instance(schema, instance)
    missing = [f.name for f in schema if instance.get(f.name) is None]
    if missing:
        raise PartialInstanceError(f"classification needs a total instance; missing {missing}")
    dp = _ensure_dual(program, decision)
    args = tuple(_const(instance.get(f)) for f in decision.features)
    atom = Atom(decision.pred, args)
    pos = next(iter(solve(dp, [Lit(atom)], SolveOptions(max_solutions=1))), None)
    neg = next(iter(solve(dp, [Lit(atom, negated=True)], SolveOptions(max_solutions=1))), None)
    if (pos is None) == (neg is None):
        raise EngineError(
            f"duality violation classifying {instance.as_dict()}: "
            f"positive={pos is not None}, dual={neg is not None}"
        )
    if pos is not None:
        return decision.undesired_label, pos.justification
    return decision.desired_label, neg.justification


def _const(value) -> Sym | Num:
    return Num(value) if isinstance(value, int) else Sym(str(value))


@dataclass
class CfeResult:
    """A factual/counterfactual world pair with controls, cost, and proofs."""

    factual: Instance
    counterfactual: Instance
    intervals: dict[str, tuple[int, int]]
    controls: ControlVector
    cost: int
    factual_justification: Justification
    counterfactual_justification: Justification

    def to_payload(self, schema: FeatureSchema) -> dict:
        raw_intervals = {}
        for name, (lo, hi) in self.intervals.items():
            scale = schema.feature(name).scale
            raw_intervals[name] = [unscale_value(lo, scale), unscale_value(hi, scale)]
        return {
            "factual": self.factual.to_raw(schema),
            "counterfactual": {
                "values": self.counterfactual.to_raw(schema),
                "intervals": raw_intervals,
            },
            "controls": self.controls.as_dict(schema),
            "cost": self.cost,
            "justifications": {
                "factual": tree_to_dict(self.factual_justification),
                "counterfactual": tree_to_dict(self.counterfactual_justification),
            },
        }


@dataclass
class InterpolantOutcome:
    """Result of the minimal-cost search: the level and its explanations,
    or the distinguished no-recourse outcome when mutability forbids all."""

    cost: int | None
    results: list[CfeResult]

    @property
    def no_recourse(self) -> bool:
        return self.cost is None

    def to_payload(self, schema: FeatureSchema) -> dict:
        if self.no_recourse:
            return {"no_recourse": True}
        return {
            "cost": self.cost,
            "results": [r.to_payload(schema) for r in self.results],
        }


def _pre_var(feature: str) -> Var:
    return Var(f"Pre_{feature}")


def _post_var(feature: str) -> Var:
    return Var(f"Post_{feature}")


def _world_goal(
    schema: FeatureSchema,
    program: Program,
    feature_var,
    phase: str,
) -> list[BodyLiteral]:
    """Domain and abducible atoms establishing one world's feature variables."""
    prefix = "before_int_" if phase == "pre" else "after_int_"
    out: list[BodyLiteral] = []
    for feat in schema:
        var = feature_var(feat.name)
        if feat.is_categorical:
            out.append(Lit(Atom("f_domain", (Sym(feat.name), var))))
            loop_pred = prefix + feat.name
            if program.abducible_for(loop_pred) is not None:
                out.append(Lit(Atom(loop_pred, (var,))))
        else:
            out.append(Lit(Atom(feat.name, (var,))))
    return out


def _control_vectors(
    schema: FeatureSchema, spec: ControlSpec, exact_cost: int | None
) -> Iterator[ControlVector]:
    """Enumerate admissible control vectors in lexicographic schema order."""
    per_feature = [spec.allowed_z(feat) for feat in schema]
    for combo in itertools.product(*per_feature):
        cost = intervention_cost(combo)
        if cost == 0:
            continue
        if exact_cost is not None and cost != exact_cost:
            continue
        yield ControlVector(values=combo)


def _result_sort_key(schema: FeatureSchema, result: CfeResult) -> tuple:
    key: list = []
    for inst in (result.factual, result.counterfactual):
        for feat in schema:
            value = inst.get(feat.name)
            if feat.is_categorical:
                key.append(feat.values.index(value))
            else:
                key.append(value)
    return tuple(key)


def _solution_to_result(
    schema: FeatureSchema,
    dp: DualProgram,
    decision: DecisionSpec,
    controls: ControlVector,
    cost: int,
    solution: Solution,
) -> CfeResult:
    witnesses = solution.witnesses()
    pre_values: dict = {}
    post_values: dict = {}
    intervals: dict[str, tuple[int, int]] = {}
    for feat in schema:
        pre = witnesses[_pre_var(feat.name).name]
        post = witnesses[_post_var(feat.name).name]
        if pre is None or post is None:
            raise EngineError(f"no witness for feature {feat.name}")
        pre_values[feat.name] = pre
        post_values[feat.name] = post
        if feat.is_numeric:
            lo, hi = solution.store.interval(solution.refs[_post_var(feat.name).name])
            intervals[feat.name] = (
                lo if lo is not None else feat.min,
                hi if hi is not None else feat.max,
            )
    factual = Instance.of(pre_values)
    counterfactual = Instance.of(post_values)

    recomputed = controls_between(schema, factual, counterfactual)
    if recomputed != controls:
        raise EngineError(
            f"control vector mismatch: searched {controls.values}, "
            f"worlds give {recomputed.values}"
        )
    factual_label, factual_proof = classify(schema, dp, decision, factual)
    cf_label, cf_proof = classify(schema, dp, decision, counterfactual)
    if factual_label != decision.undesired_label or cf_label != decision.desired_label:
        raise EngineError("flip violation: paired worlds do not flip the decision")
    return CfeResult(
        factual=factual,
        counterfactual=counterfactual,
        intervals=intervals,
        controls=controls,
        cost=cost,
        factual_justification=factual_proof,
        counterfactual_justification=cf_proof,
    )


def counterfactuals(
    schema: FeatureSchema,
    program: DualProgram | Program,
    causal: CausalRuleSet,
    decision: DecisionSpec,
    factual: Instance,
    spec: ControlSpec | None = None,
    cost_bound: int | None = None,
) -> Iterator[CfeResult]:
    """Lazily yield counterfactual explanations, cheapest cost level first.

    With cost_bound set, only vectors of exactly that cost are queried,
    mirroring the per-X queries of the minimal-cost search.
    """
    spec = spec or ControlSpec.of()
    decision.validate(schema)
    validate_instance(schema, factual)
    spec.validate(schema, factual)
    if not any(spec.policy(f.name) != IMMUTABLE for f in schema):
        raise ControlError("no feature left mutable")

    dp = _ensure_dual(program, decision)
    if factual.is_total(schema):
        label, _ = classify(schema, dp, decision, factual)
        if label == decision.desired_label:
            raise AlreadyDesiredError(
                f"instance already classifies as {decision.desired_label!r}"
            )

    pre_vars = {f.name: _pre_var(f.name) for f in schema}
    post_vars = {f.name: _post_var(f.name) for f in schema}

    base: list[BodyLiteral] = []
    for name, value in factual.assignments:
        base.append(Cmp(pre_vars[name], Op.EQ, _const(value)))
    base += _world_goal(schema, dp.source, lambda n: pre_vars[n], "pre")
    base = apply_causal(base, causal, pre_vars)
    base.append(
        Lit(Atom(decision.pred, tuple(pre_vars[f] for f in decision.features)))
    )

    levels = [cost_bound] if cost_bound is not None else list(range(1, len(schema) + 1))
    for level in levels:
        for controls in _control_vectors(schema, spec, level):
            goal = list(base)
            post_world = _world_goal(schema, dp.source, lambda n: post_vars[n], "post")
            links: list[BodyLiteral] = []
            for feat, z in zip(schema, controls.values):
                pre_v, post_v = pre_vars[feat.name], post_vars[feat.name]
                if z == 0:
                    links.append(Cmp(pre_v, Op.EQ, post_v))
                elif feat.is_categorical:
                    links.append(Cmp(pre_v, Op.NEQ, post_v))
                elif z > 0:
                    links.append(Cmp(pre_v, Op.LT, post_v))
                else:
                    links.append(Cmp(pre_v, Op.GT, post_v))
            goal += [l for l, z in zip(links, controls.values) if z == 0]
            goal += post_world
            goal += [l for l, z in zip(links, controls.values) if z != 0]
            goal = apply_causal(goal, causal, post_vars)
            goal.append(
                Lit(
                    Atom(decision.pred, tuple(post_vars[f] for f in decision.features)),
                    negated=True,
                )
            )
            vector_results = []
            for solution in solve(dp, goal, SolveOptions(max_solutions=None)):
                vector_results.append(
                    _solution_to_result(schema, dp, decision, controls, level, solution)
                )
            vector_results.sort(key=lambda r: _result_sort_key(schema, r))
            seen: set[tuple] = set()
            for result in vector_results:
                key = (
                    tuple(sorted(result.factual.assignments)),
                    tuple(sorted(result.counterfactual.assignments)),
                    tuple(sorted(result.intervals.items())),
                )
                if key not in seen:
                    seen.add(key)
                    yield result


def craig_interpolant(
    schema: FeatureSchema,
    program: DualProgram | Program,
    causal: CausalRuleSet,
    decision: DecisionSpec,
    factual: Instance,
    spec: ControlSpec | None = None,
) -> InterpolantOutcome:
    """Search cost levels 1..n for the first admitting a counterfactual.

    Returns the distinguished no-recourse outcome (rather than failing) when
    the control spec makes every counterfactual world unreachable.
    """
    spec = spec or ControlSpec.of()
    spec.validate(schema, factual)
    if not any(spec.policy(f.name) != IMMUTABLE for f in schema):
        return InterpolantOutcome(cost=None, results=[])
    for level in range(1, len(schema) + 1):
        results = list(
            counterfactuals(
                schema, program, causal, decision, factual, spec, cost_bound=level
            )
        )
        if results:
            return InterpolantOutcome(cost=level, results=results)
    return InterpolantOutcome(cost=None, results=[])


def enumerate_transitions(
    schema: FeatureSchema,
    program: DualProgram | Program,
    causal: CausalRuleSet,
    decision: DecisionSpec,
    limit: int | None = 64,
) -> list[CfeResult]:
    """All factual-to-counterfactual transitions with both worlds unbound,
    cheapest first, truncated at limit (limit=None means unlimited)."""
    out: list[CfeResult] = []
    if limit is not None and limit <= 0:
        return out
    stream = counterfactuals(
        schema, program, causal, decision, Instance.of({}), ControlSpec.of()
    )
    for result in stream:
        out.append(result)
        if limit is not None and len(out) >= limit:
            break
    return out
