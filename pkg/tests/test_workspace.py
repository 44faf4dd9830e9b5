import pytest

from recourse.errors import FixtureError
from recourse.workspace import (
    build_workspace,
    list_fixtures,
    load_workspace,
    parse_directives,
    split_causal_section,
)
from recourse.schema import FeatureDef, FeatureSchema


def test_parse_directives():
    text = (
        "%! decision lite_le_50K(marital_status, capital_gain, education_num).\n"
        "%! labels '<=50K' '>50K'.\n"
        "%! causal constraint_ms_reln_age(marital_status, relationship, age).\n"
        "p(a).\n"
    )
    out = parse_directives(text)
    assert out["decision"] == (
        "lite_le_50K",
        ("marital_status", "capital_gain", "education_num"),
    )
    assert out["labels"] == ("<=50K", ">50K")
    assert out["causal"] == [
        ("constraint_ms_reln_age", ("marital_status", "relationship", "age"))
    ]


def test_unknown_directive_rejected():
    with pytest.raises(FixtureError):
        parse_directives("%! frobnicate x.\n")


def test_split_causal_section():
    main, causal = split_causal_section("a(x).\n% causal\nc(y).\n")
    assert "a(x)." in main and "c(y)." not in main
    assert "c(y)." in causal


def test_split_without_marker():
    main, causal = split_causal_section("a(x).\n")
    assert causal == ""


def test_adult_workspace_loads(adult):
    assert adult.decision.pred == "lite_le_50K"
    assert adult.decision.undesired_label == "<=50K"
    assert len(adult.schema) == 6
    assert adult.program.has_dual("lite_le_50K", 3)
    assert [p for p, _ in adult.causal.arg_features] == [
        "constraint_ms_reln_age",
        "constraint_reln_sex_age",
    ]


def test_missing_decision_directive():
    schema = FeatureSchema(
        features=(FeatureDef("x", "categorical", values=("a", "b")),)
    )
    with pytest.raises(FixtureError, match="decision"):
        build_workspace("nameless", schema, "p(X) :- f_domain(x, X).\n")


def test_shipped_fixtures_listed():
    names = list_fixtures()
    for expected in ("adult", "adult3", "birds", "fungi", "teaches"):
        assert expected in names


def test_fixture_dir_env_override(tmp_path, monkeypatch):
    fixture = tmp_path / "mini"
    fixture.mkdir()
    (fixture / "schema.json").write_text(
        '{"features": [{"name": "x", "kind": "categorical", "values": ["a", "b"]}]}'
    )
    (fixture / "rules.lp").write_text(
        "%! decision lite_m(x).\n%! labels 'bad' 'good'.\nlite_m(X) :- X = a.\n"
    )
    monkeypatch.setenv("RECOURSE_FIXTURE_DIR", str(tmp_path))
    ws = load_workspace("mini")
    assert ws.decision.pred == "lite_m"
    assert "mini" in list_fixtures()


def test_unknown_fixture():
    with pytest.raises(FixtureError):
        load_workspace("no_such_fixture")


def test_csv_derived_schema_drives_a_workspace():
    """End to end: derive domains from tabular data, attach rules, classify."""
    from recourse.cfe import classify
    from recourse.schema import Instance, derive_schema

    csv_text = (
        "marital_status,capital_gain,education_num\n"
        "Never-married,6000,4\n"
        "Married-civ-spouse,0,13\n"
        "Divorced,99999,1\n"
        "Married-civ-spouse,7000,16\n"
    )
    schema = derive_schema(
        csv_text,
        {
            "marital_status": "categorical",
            "capital_gain": "numeric",
            "education_num": "numeric",
        },
    )
    assert schema.feature("capital_gain").max == 99999
    assert schema.feature("marital_status").values[0] == "never_married"

    rules = (
        "%! decision lite_le_50K(marital_status, capital_gain, education_num).\n"
        "%! labels '<=50K' '>50K'.\n"
        "lite_le_50K(X, Y, _) :- X \\= married_civ_spouse, Y #=< 6849.0.\n"
        "lite_le_50K(X, Y, Z) :- X = married_civ_spouse, Y #=< 5013.0, Z #=< 12.0.\n"
    )
    ws = build_workspace("derived", schema, rules)
    instance = Instance.from_raw(
        ws.schema,
        {"marital_status": "Never-married", "capital_gain": 6000, "education_num": 4},
    )
    label, _ = classify(ws.schema, ws.program, ws.decision, instance)
    assert label == "<=50K"
