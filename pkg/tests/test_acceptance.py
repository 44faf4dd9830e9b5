"""Acceptance gate: every exit criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass line per
criterion with its measured runtime.
"""

import time

from recourse.cfe import (
    ControlSpec,
    ControlVector,
    classify,
    counterfactuals,
    craig_interpolant,
)
from recourse.dual import dualize_predicate, dualize_program
from recourse.engine import SolveOptions, render_tree, solve
from recourse.rulelang import alpha_equal, parse_program, print_program
from recourse.schema import Instance
from recourse.workspace import fixture_path, load_bench_config

from oracle import min_cfe_cost


def _report(name: str, started: float, bound: float):
    elapsed = time.perf_counter() - started
    print(f"ACCEPTANCE {name}: PASS ({elapsed:.2f}s < {bound:.0f}s)")
    assert elapsed < bound, f"{name} exceeded its runtime bound: {elapsed:.2f}s"


def test_acceptance_adult_golden_classification(adult, census_instance):
    started = time.perf_counter()
    label, proof = classify(adult.schema, adult.program, adult.decision, census_instance)
    assert label == "<=50K"
    rendered = render_tree(proof)
    leaves = [line.strip() for line in rendered.splitlines()]
    assert any(
        line.startswith("6000 #=< 6849") and "constraint-satisfied" in line
        for line in leaves
    )
    # clause 1 fired: the marital-status guard appears in the same proof
    assert any("never_married \\= married_civ_spouse" in line for line in leaves)
    _report("adult-golden-classification", started, 1.0)


def test_acceptance_interpolant_reproduction(adult, census_instance):
    started = time.perf_counter()
    locked = ControlSpec.of({"capital_gain": "immutable", "education_num": "immutable"})

    at_cost_1 = list(
        counterfactuals(
            adult.schema, adult.program, adult.causal, adult.decision,
            census_instance, locked, cost_bound=1,
        )
    )
    assert at_cost_1 == []

    outcome = craig_interpolant(
        adult.schema, adult.program, adult.causal, adult.decision, census_instance, locked
    )
    assert outcome.cost == 2
    assert len(outcome.results) == 1
    result = outcome.results[0]
    assert result.controls == ControlVector((1, 0, 0, 1, 0, 0))
    cf = result.counterfactual.as_dict()
    assert cf["marital_status"] == "married_civ_spouse"
    assert cf["relationship"] == "husband"

    # brute-force oracle over all causally-valid worlds, gain/edu fixed
    expected_cost, argmin = min_cfe_cost(
        adult.schema,
        adult.program.source,
        adult.decision.pred,
        adult.decision.features,
        adult.causal.arg_features,
        census_instance.as_dict(),
        locked,
    )
    assert expected_cost == 2
    changed_sets = {
        frozenset(k for k in pre if pre[k] != post[k]) for pre, post in argmin
    }
    assert changed_sets == {frozenset({"marital_status", "relationship"})}
    assert all(
        post["marital_status"] == "married_civ_spouse" and post["relationship"] == "husband"
        for _pre, post in argmin
    )
    _report("interpolant-reproduction", started, 5.0)


DUAL_LISTING = """
not lite_le_50K(Var0,Var1,Var2) :-
   not o_lite_le_50K_1(Var0,Var1,Var2), not o_lite_le_50K_2(Var0,Var1,Var2).
not o_lite_le_50K_1(Var0,Var1,Var2) :- Var0 = married_civ_spouse.
not o_lite_le_50K_1(Var0,Var1,Var2) :- Var0 \\= married_civ_spouse, Var1 #> `6849.0`.
not o_lite_le_50K_2(Var0,Var1,Var2) :- Var0 \\= married_civ_spouse.
not o_lite_le_50K_2(Var0,Var1,Var2) :- Var0 = married_civ_spouse, Var1 #> `5013.0`.
not o_lite_le_50K_2(Var0,Var1,Var2) :- Var0 = married_civ_spouse, Var1 #=< `5013.0`, Var2 #> `12.0`.
"""


def test_acceptance_dual_golden_file(adult):
    started = time.perf_counter()
    duals = dualize_predicate(adult.program.source, "lite_le_50K", 3)
    expected = parse_program(DUAL_LISTING).rules
    per_clause = [r for r in duals if r.head.pred.startswith("o_")]
    assert len(per_clause) == 5  # two duals for clause 1, three for clause 2
    assert len(duals) == len(expected)  # plus the one umbrella clause
    for got, want in zip(duals, expected):
        assert alpha_equal(got, want), f"{got}\n!=\n{want}"
    # the complement thresholds appear exactly
    printed = print_program(type(adult.program.source)(rules=tuple(duals)))
    assert "Var1 #> 6849" in printed and "Var2 #> 12" in printed
    _report("dual-golden-file", started, 5.0)


def test_acceptance_duality_property_suite():
    started = time.perf_counter()
    from test_duality import test_duality_against_ground_oracle

    test_duality_against_ground_oracle()  # hypothesis: 100 programs, zero violations
    _report("duality-property-suite", started, 120.0)


def test_acceptance_minimality_property_suite():
    started = time.perf_counter()
    from test_minimality import CASES, test_interpolant_matches_bruteforce_minimum

    for case in CASES:
        test_interpolant_matches_bruteforce_minimum(case)
    _report("minimality-property-suite", started, 120.0)


def test_acceptance_multi_world_fixtures():
    started = time.perf_counter()
    teaches = parse_program((fixture_path("teaches") / "rules.lp").read_text())
    sols = list(solve(teaches, "?- teaches_db(X).", SolveOptions(max_solutions=None)))
    assert [s.value("X") for s in sols] == ["mary", "john"]

    birds = parse_program((fixture_path("birds") / "rules.lp").read_text())
    dp = dualize_program(birds, roots=(("fly", 1),))
    assert list(solve(dp, "?- fly(tweety).", SolveOptions(1)))
    assert not list(solve(dp, "?- fly(pingu).", SolveOptions(1)))
    assert list(solve(dp, "?- not fly(pingu).", SolveOptions(1)))
    _report("multi-world-fixtures", started, 5.0)


def test_acceptance_benchmark_trends(adult, adult3):
    started = time.perf_counter()
    from recourse.bench import run_causal_comparison, run_domain_scaling

    config = load_bench_config("adult")
    instance = Instance.from_raw(adult.schema, config["instance"])
    controls = ControlSpec.of(config["controls"])
    scaling = run_domain_scaling(
        adult, "marital_status", [2, 3, 4, 5], reps=5, instance=instance, controls=controls
    )
    means = [row.mean_ms for row in scaling.rows]
    assert all(means[i] <= means[i + 1] for i in range(len(means) - 1)), means

    comparison = run_causal_comparison(
        adult, adult3, reps=5,
        causal_config=config, plain_config=load_bench_config("adult3"),
    )
    plain, causal = comparison.rows[0].mean_ms, comparison.rows[1].mean_ms
    assert causal / plain > 1.0, (plain, causal)
    _report("benchmark-trends", started, 300.0)


def test_acceptance_parser_round_trip():
    started = time.perf_counter()
    for name in ("adult", "adult3", "fungi", "birds", "teaches"):
        text = (fixture_path(name) / "rules.lp").read_text()
        program = parse_program(text)
        assert parse_program(print_program(program)) == program

    from test_rulelang import test_round_trip_generated_programs

    test_round_trip_generated_programs()  # hypothesis: 1000 programs
    _report("parser-round-trip", started, 120.0)
