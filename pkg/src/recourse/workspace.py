"""Workspace loading: schema + rule file + directives -> ready-to-query state.

Rule files carry their own wiring as ``%!`` directive comments:

    %! decision lite_le_50K(marital_status, capital_gain, education_num).
    %! labels '<=50K' '>50K'.
    %! causal constraint_ms_reln_age(marital_status, relationship, age).

Causal rules live in the same file under a ``% causal`` section comment.
The schema's domain facts and range rules are generated and merged in, the
program is dualized and admissibility-checked, and the causal rule set is
checked for dead values at load.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .causal import CausalRuleSet, check_totality
from .cfe import DecisionSpec
from .dual import DualProgram, dualize_program
from .errors import FixtureError
from .rulelang import check_program, parse_program
from .schema import FeatureSchema, Instance, schema_to_facts

_DIRECTIVE = re.compile(r"^%!\s*(\w+)\s+(.*?)\s*\.?\s*$")
_PRED_MAP = re.compile(r"^(\w+)\(([^)]*)\)$")
_CAUSAL_MARK = re.compile(r"^%\s*causal\s*$")


@dataclass
class Workspace:
    """Everything one fixture needs to answer queries."""

    name: str
    schema: FeatureSchema
    program: DualProgram
    decision: DecisionSpec
    causal: CausalRuleSet
    rules_text: str = ""

    def with_schema(self, schema: FeatureSchema) -> "Workspace":
        """Rebuild against a modified schema (used by the timing harness)."""
        return build_workspace(self.name, schema, self.rules_text)


def _parse_pred_map(text: str, kind: str) -> tuple[str, tuple[str, ...]]:
    match = _PRED_MAP.match(text.strip())
    if not match:
        raise FixtureError(f"malformed {kind} directive: {text!r}")
    features = tuple(p.strip() for p in match.group(2).split(",") if p.strip())
    return match.group(1), features


def _parse_label(token: str) -> str:
    token = token.strip()
    if token.startswith("'") and token.endswith("'") and len(token) >= 2:
        return token[1:-1]
    return token


def parse_directives(text: str) -> dict:
    """Collect %! directives: decision map, labels, causal argument maps."""
    out: dict = {"causal": []}
    for line in text.splitlines():
        match = _DIRECTIVE.match(line.strip())
        if not match:
            continue
        kind, rest = match.group(1), match.group(2)
        if kind == "decision":
            out["decision"] = _parse_pred_map(rest, "decision")
        elif kind == "labels":
            parts = re.findall(r"'[^']*'|\S+", rest)
            if len(parts) != 2:
                raise FixtureError(f"labels directive needs two labels: {rest!r}")
            out["labels"] = (_parse_label(parts[0]), _parse_label(parts[1]))
        elif kind == "causal":
            out["causal"].append(_parse_pred_map(rest, "causal"))
        else:
            raise FixtureError(f"unknown directive %! {kind}")
    return out


def split_causal_section(text: str) -> tuple[str, str]:
    """Split a rule file at the ``% causal`` marker (empty tail if absent)."""
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if _CAUSAL_MARK.match(line.strip()):
            return "\n".join(lines[:i]), "\n".join(lines[i + 1 :])
    return text, ""


def build_workspace(name: str, schema: FeatureSchema, rules_text: str) -> Workspace:
    directives = parse_directives(rules_text)
    main_text, causal_text = split_causal_section(rules_text)

    facts = parse_program(schema_to_facts(schema))
    program = facts.extend(parse_program(main_text))
    causal_rules = facts.extend(parse_program(causal_text)) if causal_text.strip() else None
    if causal_rules is not None:
        program = program.extend(parse_program(causal_text))
    check_program(program, schema)

    if "decision" not in directives:
        raise FixtureError(f"fixture {name!r}: missing %! decision directive")
    pred, features = directives["decision"]
    labels = directives.get("labels", ("undesired", "desired"))
    decision = DecisionSpec(
        pred=pred,
        features=features,
        undesired_label=labels[0],
        desired_label=labels[1],
    )
    decision.validate(schema)

    if directives["causal"]:
        if causal_rules is None:
            raise FixtureError(
                f"fixture {name!r}: causal directives but no % causal section"
            )
        causal = CausalRuleSet(
            rules=causal_rules, arg_features=tuple(directives["causal"])
        )
        report = check_totality(causal, schema)
        if not report.total:
            raise FixtureError(
                f"fixture {name!r}: causal rules silently delete values: "
                f"{report.dead_values}"
            )
    else:
        causal = CausalRuleSet.empty()

    dp = dualize_program(program, roots=((pred, len(features)),))
    return Workspace(
        name=name,
        schema=schema,
        program=dp,
        decision=decision,
        causal=causal,
        rules_text=rules_text,
    )


def _fixture_dirs() -> list[Path]:
    paths: list[Path] = []
    env = os.environ.get("RECOURSE_FIXTURE_DIR")
    if env:
        paths.extend(Path(p) for p in env.split(os.pathsep) if p)
    paths.append(Path(str(resources.files("recourse") / "fixtures")))
    return paths


def fixture_path(name: str) -> Path:
    for base in _fixture_dirs():
        candidate = base / name
        if candidate.is_dir():
            return candidate
    raise FixtureError(f"fixture {name!r} not found (searched {_fixture_dirs()})")


def list_fixtures() -> list[str]:
    seen = []
    for base in _fixture_dirs():
        if not base.is_dir():
            continue
        for child in sorted(base.iterdir()):
            if child.is_dir() and (child / "rules.lp").exists() and child.name not in seen:
                seen.append(child.name)
    return seen


def load_workspace_from_files(schema_file: str | Path, rules_file: str | Path) -> Workspace:
    schema = FeatureSchema.from_json(Path(schema_file).read_text())
    rules_text = Path(rules_file).read_text()
    return build_workspace(Path(rules_file).stem, schema, rules_text)


def load_workspace(name: str) -> Workspace:
    path = fixture_path(name)
    schema_file = path / "schema.json"
    rules_file = path / "rules.lp"
    if not schema_file.exists():
        raise FixtureError(f"fixture {name!r}: no schema.json")
    ws = load_workspace_from_files(schema_file, rules_file)
    ws.name = name
    return ws


def load_fixture_instance(name: str) -> Instance:
    path = fixture_path(name) / "instance.json"
    if not path.exists():
        raise FixtureError(f"fixture {name!r}: no instance.json")
    ws = load_workspace(name)
    return Instance.from_raw(ws.schema, json.loads(path.read_text()))


def load_bench_config(name: str) -> dict:
    path = fixture_path(name) / "bench.json"
    if not path.exists():
        raise FixtureError(f"fixture {name!r}: no bench.json")
    return json.loads(path.read_text())
