from .core import (
    AbstractState,
    Action,
    GroundAtom,
    GroundOperator,
    LiftedAtom,
    Object,
    ObjType,
    Operator,
    Predicate,
    PreconditionViolation,
    State,
    Variable,
    abstract,
    apply,
    enumerate_groundings,
    iter_groundings,
    sorted_atoms,
    successor,
)
from .render import render_operator, render_operators

__all__ = [
    "AbstractState", "Action", "GroundAtom", "GroundOperator", "LiftedAtom",
    "Object", "ObjType", "Operator", "Predicate", "PreconditionViolation",
    "State", "Variable", "abstract", "apply", "enumerate_groundings",
    "iter_groundings", "sorted_atoms", "successor", "render_operator", "render_operators",
]
