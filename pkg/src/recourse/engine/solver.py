"""Goal-directed, grounding-free query evaluation with backtracking.

Resolution walks clause lists in program order; negated goals resolve
against generated dual clauses; abducible predicates (normalized even
loops) enumerate their domain as choice points, at most one value per
predicate per derivation. Solutions are deduplicated on the canonical
state of the query variables and emitted in deterministic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from ..dual import DualProgram, dualize_program
from ..errors import EngineError
from ..rulelang.ast import BodyLiteral, Cmp, Lit, Num, Op, Program, Rule, Sym, Term, Var
from ..rulelang.parser import parse_query
from ..rulelang.printer import print_num
from ..schema import FeatureDef
from .justify import CONSTRAINT, PROVED, PROVED_DUAL, Justification
from .store import ConstraintStore, RTerm, VRef


@dataclass(frozen=True)
class SolveOptions:
    """max_solutions=None means unlimited; abducible_order overrides the
    per-feature (or per-predicate) domain enumeration order."""

    max_solutions: int | None = 64
    abducible_order: dict[str, Sequence[str]] | None = None


@dataclass
class _JNode:
    goal: tuple  # ("atom", negated, pred, args) | ("cmp", lhs, op, rhs) | ("query",)
    outcome: str
    children: list = field(default_factory=list)


@dataclass(frozen=True)
class _State:
    store: ConstraintStore
    chosen: dict  # abducible pred -> chosen symbol

    def choose(self, pred: str, value: str) -> "_State":
        nxt = dict(self.chosen)
        nxt[pred] = value
        return _State(self.store, nxt)

    def with_store(self, store: ConstraintStore) -> "_State":
        return _State(store, self.chosen)


class Solution:
    """One answer: query-variable states, the final store, and the proof."""

    def __init__(
        self,
        bindings: dict[str, tuple],
        store: ConstraintStore,
        refs: dict[str, VRef],
        justification: Justification,
        chosen: dict[str, str],
    ):
        self.bindings = bindings
        self.store = store
        self.refs = refs
        self.justification = justification
        self.chosen = chosen
        self._witnesses: dict[str, int | str | None] | None = None

    def witnesses(self) -> dict[str, int | str | None]:
        """Concrete value per query variable (smallest-feasible policy)."""
        if self._witnesses is None:
            table = self.store.witness_all()
            self._witnesses = {
                name: table.get(self.store.root(ref)) for name, ref in self.refs.items()
            }
        return self._witnesses

    def value(self, name: str):
        return self.witnesses().get(name)


class _Engine:
    def __init__(self, dp: DualProgram, opts: SolveOptions):
        self.dp = dp
        self.source = dp.source
        self.opts = opts
        self.scale = dp.scale
        self._members: dict[str, list[str]] = {}
        self._abducible = {a.pred: a for a in dp.source.abducibles}

    # -- term plumbing -----------------------------------------------------

    def _rt(self, term: Term, env: dict) -> RTerm:
        if isinstance(term, Var):
            return env[term]
        if isinstance(term, Sym):
            return term.name
        if isinstance(term, Num):
            return term.value
        raise EngineError(f"bad term {term!r}")

    def _instantiate(self, rule: Rule, state: _State) -> tuple[_State, dict]:
        names: list[Var] = []
        seen = set()

        def collect(term: Term):
            if isinstance(term, Var) and term not in seen:
                seen.add(term)
                names.append(term)

        if rule.head is not None:
            for arg in rule.head.args:
                collect(arg)
        for lit in rule.body:
            if isinstance(lit, Cmp):
                collect(lit.lhs)
                collect(lit.rhs)
            else:
                for arg in lit.atom.args:
                    collect(arg)
        store, refs = state.store.fresh_many([v.name for v in names])
        return state.with_store(store), dict(zip(names, refs))

    def members(self, pred: str) -> list[str]:
        if pred in self._members:
            return self._members[pred]
        abd = self._abducible[pred]
        if abd.feature is not None:
            values = self.source.f_domain_values(abd.feature)
            if not values:
                raise EngineError(
                    f"abducible {pred!r}: no f_domain facts for feature {abd.feature!r}"
                )
        else:
            values = [v.name for v in abd.values]
        override = (self.opts.abducible_order or {}).get(abd.feature or pred)
        if override:
            values = [v for v in override if v in values]
        self._members[pred] = values
        return values

    # -- resolution ----------------------------------------------------------

    def solve_goals(
        self, goals: list[tuple[BodyLiteral, dict]], state: _State, depth: int
    ) -> Iterator[tuple[_State, list[_JNode]]]:
        if depth > 10000:
            raise EngineError("derivation too deep")
        if not goals:
            yield state, []
            return
        (lit, env), rest = goals[0], goals[1:]
        for state1, node in self.solve_one(lit, env, state, depth):
            for state2, nodes in self.solve_goals(rest, state1, depth + 1):
                yield state2, [node] + nodes

    def solve_one(
        self, lit: BodyLiteral, env: dict, state: _State, depth: int
    ) -> Iterator[tuple[_State, _JNode]]:
        if isinstance(lit, Cmp):
            lhs, rhs = self._rt(lit.lhs, env), self._rt(lit.rhs, env)
            store = state.store.add_cmp(lhs, lit.op, rhs)
            if store is not None:
                yield state.with_store(store), _JNode(("cmp", lhs, lit.op, rhs), CONSTRAINT)
            return

        atom, negated = lit.atom, lit.negated
        args = tuple(self._rt(a, env) for a in atom.args)
        goal_key = ("atom", negated, atom.pred, args)

        if atom.pred in self._abducible:
            yield from self._solve_abducible(atom.pred, args, negated, state, goal_key)
            return

        if negated:
            if not self.dp.has_dual(atom.pred, atom.arity):
                raise EngineError(
                    f"no dual for {atom.pred}/{atom.arity}; predicate undefined or not dualized"
                )
            # dualized with zero clauses: the source clause is a tautology
            # over its head pattern, so the negation simply fails
            clauses = self.dp.neg_clauses(atom.pred, atom.arity)
            outcome = PROVED_DUAL
        else:
            clauses = self.source.clauses(atom.pred, atom.arity)
            if not clauses:
                raise EngineError(f"undefined predicate {atom.pred}/{atom.arity}")
            outcome = PROVED

        for clause in clauses:
            state1, cenv = self._instantiate(clause, state)
            store = state1.store
            ok = True
            for goal_arg, head_arg in zip(args, clause.head.args):
                store = store.unify(goal_arg, self._rt(head_arg, cenv))
                if store is None:
                    ok = False
                    break
            if not ok:
                continue
            state1 = state1.with_store(store)
            subgoals = [(b, cenv) for b in clause.body]
            for state2, nodes in self.solve_goals(subgoals, state1, depth + 1):
                yield state2, _JNode(goal_key, outcome, nodes)

    def _solve_abducible(
        self, pred: str, args: tuple, negated: bool, state: _State, goal_key: tuple
    ) -> Iterator[tuple[_State, _JNode]]:
        abd = self._abducible[pred]
        if len(args) != 1:
            raise EngineError(f"abducible {pred!r} expects exactly one argument")
        (arg,) = args
        feature = abd.feature or pred

        def outcome(value: str) -> str:
            return Justification.abduced(feature, value)

        chosen = state.chosen.get(pred)
        if chosen is not None:
            if negated:
                store = state.store.add_cmp(arg, Op.NEQ, chosen)
            else:
                store = state.store.unify(arg, chosen)
            if store is not None:
                yield state.with_store(store), _JNode(goal_key, outcome(chosen))
            return
        for value in self.members(pred):
            state1 = state.choose(pred, value)
            if negated:
                store = state1.store.add_cmp(arg, Op.NEQ, value)
            else:
                store = state1.store.unify(arg, value)
            if store is not None:
                yield state1.with_store(store), _JNode(goal_key, outcome(value))

    # -- integrity constraints ----------------------------------------------

    def violates_constraint(self, state: _State) -> bool:
        for rule in self.source.constraints:
            state1, cenv = self._instantiate(rule, state)
            subgoals = [(b, cenv) for b in rule.body]
            for _ in self.solve_goals(subgoals, state1, 0):
                return True
        return False

    # -- rendering -------------------------------------------------------------

    def _fmt_rt(self, term: RTerm, store: ConstraintStore) -> str:
        term = store.resolve(term)
        if isinstance(term, VRef):
            return store.name_of(term)
        if isinstance(term, int):
            return print_num(term, self.scale)
        return term

    def to_justification(self, node: _JNode, store: ConstraintStore) -> Justification:
        kind = node.goal[0]
        if kind == "cmp":
            _, lhs, op, rhs = node.goal
            text = f"{self._fmt_rt(lhs, store)} {op.value} {self._fmt_rt(rhs, store)}"
        elif kind == "atom":
            _, negated, pred, args = node.goal
            rendered = ", ".join(self._fmt_rt(a, store) for a in args)
            text = f"{pred}({rendered})" if args else pred
            if negated:
                text = f"not {text}"
        else:
            text = "query"
        return Justification(
            goal=text,
            outcome=node.outcome,
            children=tuple(self.to_justification(c, store) for c in node.children),
        )


def solve(
    program: DualProgram | Program,
    goal: list[BodyLiteral] | str,
    opts: SolveOptions | None = None,
) -> Iterator[Solution]:
    """Evaluate a goal; yields deduplicated solutions lazily in deterministic order."""
    opts = opts or SolveOptions()
    dp = program if isinstance(program, DualProgram) else dualize_program(program)
    if isinstance(goal, str):
        goal = parse_query(goal, scale=dp.scale)
    for lit in goal:
        if isinstance(lit, Lit) and lit.negated:
            dp = dp.ensure(lit.atom.pred, lit.atom.arity)

    engine = _Engine(dp, opts)

    # allocate query variables in first-occurrence order
    qvars: list[Var] = []
    seen: set[Var] = set()
    for lit in goal:
        terms = (lit.lhs, lit.rhs) if isinstance(lit, Cmp) else lit.atom.args
        for term in terms:
            if isinstance(term, Var) and term not in seen:
                seen.add(term)
                qvars.append(term)
    store, refs = ConstraintStore().fresh_many([v.name for v in qvars])
    env = dict(zip(qvars, refs))
    ref_by_name = {v.name: r for v, r in env.items()}

    state = _State(store, {})
    goals = [(lit, env) for lit in goal]
    emitted: set[tuple] = set()
    count = 0
    if opts.max_solutions is not None and opts.max_solutions <= 0:
        return
    for final_state, nodes in engine.solve_goals(goals, state, 0):
        if engine.violates_constraint(final_state):
            continue
        fstore = final_state.store
        bindings = {v.name: fstore.describe(env[v]) for v in qvars}
        # one solution per world: same variable states under the same
        # abduced choices collapse, distinct worlds never do
        key = (
            tuple(sorted((n, b) for n, b in bindings.items())),
            tuple(sorted(final_state.chosen.items())),
        )
        if key in emitted:
            continue
        emitted.add(key)
        root = _JNode(("query",), PROVED, nodes)
        yield Solution(
            bindings=bindings,
            store=fstore,
            refs=ref_by_name,
            justification=engine.to_justification(root, fstore),
            chosen=dict(final_state.chosen),
        )
        count += 1
        if opts.max_solutions is not None and count >= opts.max_solutions:
            return


def abduce(feature: FeatureDef, phase: str = "pre") -> list[tuple[str, Justification]]:
    """Domain enumeration for one categorical feature, as choice points.

    Mirrors what the engine does when it meets a (before|after)_int_<feature>
    goal with no value chosen yet for the current derivation.
    """
    if not feature.is_categorical:
        raise EngineError(f"abducible over non-categorical feature {feature.name!r}")
    pred = f"{'before' if phase == 'pre' else 'after'}_int_{feature.name}"
    return [
        (
            value,
            Justification(
                goal=f"{pred}({value})",
                outcome=Justification.abduced(feature.name, value),
            ),
        )
        for value in feature.values
    ]
