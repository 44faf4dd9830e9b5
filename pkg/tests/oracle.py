"""Brute-force ground oracles, independent of the goal-directed engine.

stratified_model enumerates the unique model of a loop-free program over a
finite ground universe by bottom-up evaluation. min_cfe_cost enumerates every
candidate world pair directly against the rule text. Both deliberately avoid
the engine, the dual transformation, and the constraint store.
"""

from __future__ import annotations

import itertools

from recourse.rulelang.ast import Atom, Cmp, Num, Op, Program, Rule, Sym, Term, Var


def eval_cmp(lhs, op: Op, rhs) -> bool:
    if op is Op.EQ:
        return lhs == rhs
    if op is Op.NEQ:
        return lhs != rhs
    if op is Op.LT:
        return lhs < rhs
    if op is Op.LE:
        return lhs <= rhs
    if op is Op.GT:
        return lhs > rhs
    return lhs >= rhs


def _ground(term: Term, env: dict):
    if isinstance(term, Var):
        return env[term]
    if isinstance(term, Sym):
        return term.name
    return term.value


def _match_head(head: Atom, values: tuple, env: dict) -> bool:
    for arg, value in zip(head.args, values):
        if isinstance(arg, Var):
            if arg in env and env[arg] != value:
                return False
            env[arg] = value
        elif _ground(arg, env) != value:
            return False
    return True


def clause_fires(rule: Rule, values: tuple, model: set) -> bool:
    """Ground check of one clause for head tuple `values` against a model."""
    env: dict = {}
    if not _match_head(rule.head, values, env):
        return False
    for lit in rule.body:
        if isinstance(lit, Cmp):
            if not eval_cmp(_ground(lit.lhs, env), lit.op, _ground(lit.rhs, env)):
                return False
        else:
            atom = (lit.atom.pred, tuple(_ground(a, env) for a in lit.atom.args))
            if lit.negated == (atom in model):
                return False
    return True


def pred_fires(program: Program, pred: str, values: tuple, model: set = frozenset()) -> bool:
    """True when some clause of pred covers the ground tuple."""
    arity = len(values)
    return any(
        clause_fires(rule, values, set(model)) for rule in program.clauses(pred, arity)
    )


def stratified_model(
    program: Program,
    pred_tuples: dict[str, list[tuple]],
    order: list[str],
) -> set:
    """Bottom-up model over candidate ground tuples, predicates in
    dependency order (callees before callers)."""
    model: set = set()
    for pred in order:
        for values in pred_tuples[pred]:
            if pred_fires(program, pred, values, model):
                model.add((pred, values))
    return model


def numeric_points(feature_min: int, feature_max: int, constants: set[int],
                   extra: set[int] = frozenset()) -> list[int]:
    """Boundary constants and neighbors clamped to the range, plus extras."""
    points = {feature_min, feature_max} | set(extra)
    for c in constants:
        for candidate in (c - 1, c, c + 1):
            if feature_min <= candidate <= feature_max:
                points.add(candidate)
    return sorted(p for p in points if feature_min <= p <= feature_max)


def program_constants(program: Program) -> set[int]:
    out: set[int] = set()
    for rule in program.rules:
        for lit in rule.body:
            if isinstance(lit, Cmp):
                for side in (lit.lhs, lit.rhs):
                    if isinstance(side, Num):
                        out.add(side.value)
    return out


def world_space(schema, program: Program, factual: dict | None = None):
    """All candidate worlds: categorical cross-product x numeric boundaries."""
    factual = factual or {}
    axes = []
    constants = program_constants(program)
    for feat in schema:
        if feat.is_categorical:
            axes.append(list(feat.values))
        else:
            extra = {factual[feat.name]} if feat.name in factual else set()
            axes.append(numeric_points(feat.min, feat.max, constants, extra))
    names = [f.name for f in schema]
    return [dict(zip(names, combo)) for combo in itertools.product(*axes)]


def causal_ok(program: Program, causal_maps, world: dict) -> bool:
    for pred, features in causal_maps:
        values = tuple(world[f] for f in features)
        if not pred_fires(program, pred, values):
            return False
    return True


def changes(schema, pre: dict, post: dict) -> int:
    return sum(1 for f in schema if pre[f.name] != post[f.name])


def respects_spec(schema, spec, pre: dict, post: dict) -> bool:
    for feat in schema:
        policy = spec.policy(feat.name)
        a, b = pre[feat.name], post[feat.name]
        if policy == "immutable" and a != b:
            return False
        if policy == "change" and a == b:
            return False
        if policy == "increase" and not b > a:
            return False
        if policy == "decrease" and not b < a:
            return False
    return True


def min_cfe_cost(
    schema,
    program: Program,
    decision_pred: str,
    decision_features: tuple[str, ...],
    causal_maps,
    factual: dict,
    spec,
) -> tuple[int | None, list[tuple[dict, dict]]]:
    """Exhaustive minimum over causally-valid flipping world pairs.

    Returns (None, []) when no pair exists. Decision and causal clauses are
    evaluated directly on ground tuples.
    """
    worlds = world_space(schema, program, factual)
    pre_worlds = [
        w
        for w in worlds
        if all(w[k] == v for k, v in factual.items())
        and pred_fires(program, decision_pred, tuple(w[f] for f in decision_features))
        and causal_ok(program, causal_maps, w)
    ]
    post_worlds = [
        w
        for w in worlds
        if not pred_fires(program, decision_pred, tuple(w[f] for f in decision_features))
        and causal_ok(program, causal_maps, w)
    ]
    best: int | None = None
    argmin: list[tuple[dict, dict]] = []
    for pre in pre_worlds:
        for post in post_worlds:
            if not respects_spec(schema, spec, pre, post):
                continue
            cost = changes(schema, pre, post)
            if cost == 0:
                continue
            if best is None or cost < best:
                best, argmin = cost, [(pre, post)]
            elif cost == best:
                argmin.append((pre, post))
    return best, argmin
