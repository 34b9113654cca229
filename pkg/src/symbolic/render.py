"""PDDL-like text rendering of operators."""

from typing import Iterable, List

from .core import LiftedAtom, Operator, sorted_atoms


def _atom(atom: LiftedAtom) -> str:
    args = ' '.join(v.name for v in atom.variables)
    return f"({atom.predicate.name} {args})" if args else f"({atom.predicate.name})"


def _conjunction(atoms: List[str]) -> str:
    if not atoms:
        return "()"
    if len(atoms) == 1:
        return atoms[0]
    return "(and " + ' '.join(atoms) + ")"


def _quantified(op: Operator) -> List[str]:
    clauses = []
    for pred in sorted(op.quantified_deletes, key=lambda p: p.name):
        qvars = [f"?q{i}" for i in range(pred.arity)]
        typed = ' '.join(f"{v}:{t.name}" for v, t in zip(qvars, pred.types))
        body = f"({pred.name} {' '.join(qvars)})" if qvars else f"({pred.name})"
        clauses.append(f"(forall ({typed}) {body})" if qvars else body)
    return clauses


def render_operator(op: Operator) -> str:
    """Render a single operator in the `Args:` / `Preconditions:` listing format."""
    args = ' '.join(f"{v.name}:{v.type.name}" for v in op.parameters)
    controller = ' '.join([op.controller_id] + [v.name for v in op.controller_args])
    deletes = [_atom(a) for a in sorted_atoms(op.delete_effects)] + _quantified(op)
    lines = [
        f"{op.name}:",
        f"  Args: {args}",
        f"  Preconditions: {_conjunction([_atom(a) for a in sorted_atoms(op.preconditions)])}",
        f"  Add Effects: {_conjunction([_atom(a) for a in sorted_atoms(op.add_effects)])}",
        f"  Delete Effects: {_conjunction(deletes)}",
        f"  Controller: ({controller})",
    ]
    return '\n'.join(lines)


def render_operators(ops: Iterable[Operator]) -> str:
    return '\n\n'.join(render_operator(op) for op in sorted(ops, key=lambda o: o.name)) + '\n'
