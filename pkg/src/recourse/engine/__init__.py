"""Goal-directed evaluator: constraint store, solver, justification trees."""

from .store import ConstraintStore, VRef
from .justify import Justification, render_tree, tree_to_dict
from .solver import Solution, SolveOptions, abduce, solve

__all__ = [
    "ConstraintStore",
    "Justification",
    "Solution",
    "SolveOptions",
    "VRef",
    "abduce",
    "render_tree",
    "solve",
    "tree_to_dict",
]
