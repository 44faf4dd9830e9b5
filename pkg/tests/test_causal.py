import pytest

from recourse.causal import CausalRuleSet, apply_causal, check_totality
from recourse.engine import SolveOptions, solve
from recourse.errors import CausalSpecError
from recourse.rulelang import parse_program
from recourse.rulelang.ast import Atom, Lit, Num, Sym, Var
from recourse.schema import FeatureDef, FeatureSchema

CAUSAL_RULES = """
constraint_ms_reln_age(married_civ_spouse, Y, Z) :- Y = husband.
constraint_ms_reln_age(married_civ_spouse, Y, Z) :- Y = wife.
constraint_ms_reln_age(never_married, Y, Z) :- Y \\= husband, Y \\= wife, Z #=< 29.
constraint_ms_reln_age(X, Y, Z) :- X \\= married_civ_spouse, X \\= never_married, Y \\= husband, Y \\= wife.

constraint_reln_sex_age(husband, Y, Z) :- Y \\= female, Z #> 27.
constraint_reln_sex_age(wife, Y, Z) :- Y = female.
constraint_reln_sex_age(X, Y, Z) :- X \\= husband, X \\= wife.
"""


@pytest.fixture()
def causal_schema():
    return FeatureSchema(
        features=(
            FeatureDef(
                "marital_status",
                "categorical",
                values=("married_civ_spouse", "divorced", "never_married"),
            ),
            FeatureDef(
                "relationship", "categorical", values=("husband", "wife", "unmarried")
            ),
            FeatureDef("sex", "categorical", values=("male", "female")),
            FeatureDef("age", "numeric", min=17, max=90),
        )
    )


@pytest.fixture()
def causal_set(causal_schema):
    return CausalRuleSet(
        rules=parse_program(CAUSAL_RULES),
        arg_features=(
            ("constraint_ms_reln_age", ("marital_status", "relationship", "age")),
            ("constraint_reln_sex_age", ("relationship", "sex", "age")),
        ),
    )


def test_marital_rule_has_uncovered_tuple_but_no_dead_value(causal_set, causal_schema):
    report = check_totality(causal_set, causal_schema, max_examples=10_000)
    # (never_married, unmarried, age > 29): the age bound blocks clause 3 and
    # the catch-all excludes never_married -- uncovered tuples by design
    uncovered = report.uncovered["constraint_ms_reln_age"]
    assert ("never_married", "unmarried", 30) in uncovered
    # the probe grid uses rule boundaries; confirm the gap at age 35 directly
    from oracle import pred_fires

    assert not pred_fires(
        causal_set.rules, "constraint_ms_reln_age", ("never_married", "unmarried", 35)
    )
    # but no single feature value is silently deleted from every world
    assert report.total
    assert report.dead_values == []


def test_reln_sex_rule_intended_filtering_is_not_a_gap(causal_set, causal_schema):
    report = check_totality(causal_set, causal_schema)
    # (husband, female, ...) is deliberately forbidden; not a dead value
    assert any(
        combo[0] == "husband" and combo[1] == "female"
        for combo in report.uncovered.get("constraint_reln_sex_age", [])
    )
    assert not [d for d in report.dead_values if d[0] == "constraint_reln_sex_age"]


def test_empty_rule_set_vacuously_total(causal_schema):
    report = check_totality(CausalRuleSet.empty(), causal_schema)
    assert report.total and not report.uncovered


def test_dead_value_detected():
    schema = FeatureSchema(
        features=(FeatureDef("color", "categorical", values=("red", "blue", "green")),)
    )
    rules = parse_program("constraint_c(X) :- X \\= green.")
    causal = CausalRuleSet(rules=rules, arg_features=(("constraint_c", ("color",)),))
    report = check_totality(causal, schema)
    assert not report.total
    assert ("constraint_c", "color", "green") in report.dead_values


def test_causal_tuple_membership(causal_set):
    opts = SolveOptions(max_solutions=1)
    ok = list(
        solve(
            causal_set.rules,
            [Lit(Atom("constraint_ms_reln_age", (Sym("married_civ_spouse"), Sym("husband"), Num(50))))],
            opts,
        )
    )
    assert ok
    bad = list(
        solve(
            causal_set.rules,
            [Lit(Atom("constraint_reln_sex_age", (Sym("husband"), Sym("female"), Num(30))))],
            opts,
        )
    )
    assert not bad


def test_apply_causal_appends_one_atom_per_pred_per_phase(causal_set):
    pre = {f: Var(f"Pre_{f}") for f in ("marital_status", "relationship", "sex", "age")}
    post = {f: Var(f"Post_{f}") for f in ("marital_status", "relationship", "sex", "age")}
    goal = apply_causal([], causal_set, pre)
    goal = apply_causal(goal, causal_set, post)
    assert len(goal) == 4  # 2 predicates x 2 phases
    assert goal[0].atom.pred == "constraint_ms_reln_age"
    assert goal[0].atom.args[0] == Var("Pre_marital_status")
    assert goal[2].atom.args[0] == Var("Post_marital_status")


def test_apply_causal_empty_set_is_identity():
    goal = [Lit(Atom("p", ()))]
    assert apply_causal(goal, CausalRuleSet.empty(), {}) == goal


def test_apply_causal_single_pred_two_phases(causal_schema):
    causal = CausalRuleSet(
        rules=parse_program("constraint_reln_sex_age(X, Y, Z) :- X \\= husband."),
        arg_features=(("constraint_reln_sex_age", ("relationship", "sex", "age")),),
    )
    phase = {f.name: Var(f"V_{f.name}") for f in causal_schema}
    assert len(apply_causal(apply_causal([], causal, phase), causal, phase)) == 2


def test_apply_causal_missing_feature_errors(causal_set):
    with pytest.raises(CausalSpecError):
        apply_causal([], causal_set, {"marital_status": Var("A")})


def test_causal_filtering_only_removes_worlds():
    """On a ground (all-categorical) fixture, causal solutions are a strict
    subset of the unconstrained ones."""
    from recourse.cfe import DecisionSpec, enumerate_transitions
    from recourse.dual import dualize_program
    from recourse.schema import schema_to_facts

    schema = FeatureSchema(
        features=(
            FeatureDef("color", "categorical", values=("red", "green", "blue")),
            FeatureDef("size", "categorical", values=("small", "big")),
        )
    )
    rules = parse_program(schema_to_facts(schema)).extend(
        parse_program(
            "lite_bad(C, _) :- C = red.\n"
            "constraint_cs(green, Y) :- Y = big.\n"
            "constraint_cs(X, Y) :- X \\= green.\n"
        )
    )
    decision = DecisionSpec("lite_bad", ("color", "size"))
    dp = dualize_program(rules, roots=(("lite_bad", 2),))
    causal = CausalRuleSet(
        rules=rules, arg_features=(("constraint_cs", ("color", "size")),)
    )

    def keys(causal_set):
        results = enumerate_transitions(schema, dp, causal_set, decision, limit=None)
        return {
            (
                tuple(sorted(r.factual.assignments)),
                tuple(sorted(r.counterfactual.assignments)),
            )
            for r in results
        }

    with_causal = keys(causal)
    without = keys(CausalRuleSet.empty())
    assert with_causal < without
    # the removed pairs are exactly those with a small green world
    removed = without - with_causal
    assert removed
    for factual, counterfactual in removed:
        worlds = (dict(factual), dict(counterfactual))
        assert any(w["color"] == "green" and w["size"] == "small" for w in worlds)
