"""Justification trees: the recorded proof structure behind every solution."""

from __future__ import annotations

from dataclasses import dataclass

PROVED = "proved"
PROVED_DUAL = "proved-via-dual"
CONSTRAINT = "constraint-satisfied"


@dataclass(frozen=True)
class Justification:
    """One proof node: the goal as proved, its outcome, and its sub-proofs.

    ``outcome`` is one of proved / proved-via-dual / constraint-satisfied /
    ``abduced(<feature>, <value>)``.
    """

    goal: str
    outcome: str
    children: tuple["Justification", ...] = ()

    @staticmethod
    def abduced(feature: str, value: str) -> str:
        return f"abduced({feature}, {value})"


def render_tree(node: Justification, depth: int = 0) -> str:
    """Indented text form: two spaces per level, one ``goal <- outcome`` per line."""
    lines = [f"{'  ' * depth}{node.goal} ← {node.outcome}"]
    for child in node.children:
        lines.append(render_tree(child, depth + 1))
    return "\n".join(lines)


def tree_to_dict(node: Justification) -> dict:
    return {
        "goal": node.goal,
        "outcome": node.outcome,
        "children": [tree_to_dict(c) for c in node.children],
    }
