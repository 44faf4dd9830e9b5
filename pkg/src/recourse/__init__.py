"""Counterfactual explanations for rule-based classifiers.

Evaluates stratified decision rules over tabular feature worlds, derives
dual rules to reason constructively about the negated decision, and searches
for minimal-cost feature interventions that flip an undesired classification
subject to causal constraints and per-feature mutability controls.
"""

__version__ = "0.1.0"

from .cfe import (
    CfeResult,
    ControlSpec,
    ControlVector,
    DecisionSpec,
    InterpolantOutcome,
    classify,
    compare_categorical,
    compare_numeric,
    counterfactuals,
    craig_interpolant,
    enumerate_transitions,
    intervention_cost,
)
from .causal import CausalRuleSet, apply_causal, check_totality
from .dual import DualProgram, dualize_predicate, dualize_program, negate_literal
from .engine import ConstraintStore, Justification, SolveOptions, abduce, render_tree, solve
from .errors import RecourseError
from .rulelang import Program, check_program, parse_program, parse_query, print_program
from .schema import FeatureDef, FeatureSchema, Instance, derive_schema, schema_to_facts, validate_instance
from .workspace import Workspace, build_workspace, load_workspace

__all__ = [
    "CausalRuleSet",
    "CfeResult",
    "ConstraintStore",
    "ControlSpec",
    "ControlVector",
    "DecisionSpec",
    "DualProgram",
    "FeatureDef",
    "FeatureSchema",
    "Instance",
    "InterpolantOutcome",
    "Justification",
    "Program",
    "RecourseError",
    "SolveOptions",
    "Workspace",
    "abduce",
    "apply_causal",
    "build_workspace",
    "check_program",
    "check_totality",
    "classify",
    "compare_categorical",
    "compare_numeric",
    "counterfactuals",
    "craig_interpolant",
    "derive_schema",
    "dualize_predicate",
    "dualize_program",
    "enumerate_transitions",
    "intervention_cost",
    "load_workspace",
    "negate_literal",
    "parse_program",
    "parse_query",
    "print_program",
    "render_tree",
    "schema_to_facts",
    "solve",
    "validate_instance",
]
