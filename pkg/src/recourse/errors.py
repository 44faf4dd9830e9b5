"""Exception taxonomy shared across the package.

Every domain-level failure derives from RecourseError and carries a short
machine-readable ``code`` used by the CLI (exit status 1) and the HTTP
service (400 responses).
"""

from __future__ import annotations


class RecourseError(Exception):
    """Base class for all domain errors."""

    code = "error"


class SchemaError(RecourseError):
    """Invalid feature schema or dataset ingestion failure."""

    code = "schema"


class InstanceError(RecourseError):
    """Instance inconsistent with its schema (unknown feature, out of domain)."""

    code = "instance"


class PartialInstanceError(InstanceError):
    """A total instance was required but some feature is unassigned."""

    code = "partial_instance"


class RuleSyntaxError(RecourseError):
    """Rule or query text failed to parse."""

    code = "syntax"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = f" at line {line}" if line is not None else ""
        loc += f", column {column}" if column is not None else ""
        super().__init__(f"{message}{loc}")


class AdmissibilityError(RecourseError):
    """Program falls outside the supported fragment (recursion, unsafe variable)."""

    code = "admissibility"

    def __init__(self, message: str, clause: str | None = None):
        self.clause = clause
        if clause is not None:
            message = f"{message} (in clause: {clause})"
        super().__init__(message)


class DualizationError(RecourseError):
    """A clause cannot be dualized (body-only variable would need a forall)."""

    code = "dualization"


class EngineError(RecourseError):
    """Evaluation aborted: undefined predicate, kind mismatch, or store overflow."""

    code = "engine"


class ControlError(RecourseError):
    """Intervention controls are inconsistent with the schema or the factual instance."""

    code = "controls"


class AlreadyDesiredError(RecourseError):
    """The factual instance already classifies as the desired label."""

    code = "already_desired"


class CausalSpecError(RecourseError):
    """Causal rule set inconsistent with the schema (unmapped argument, arity)."""

    code = "causal"


class FixtureError(RecourseError):
    """Workspace/fixture files missing or malformed."""

    code = "fixture"
