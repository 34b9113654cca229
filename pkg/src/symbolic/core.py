"""Typed symbolic vocabulary: objects, predicates, atoms and operators."""

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np


class PreconditionViolation(ValueError):
    """Raised when a ground operator is applied where its preconditions do not hold."""


@dataclass(frozen=True)
class ObjType:
    """An object type with an ordered list of real-valued features."""
    name: str
    feature_names: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError(f"Duplicate feature names in type {self.name}: {self.feature_names}")

    def __hash__(self):
        return hash(self.name)

    @property
    def dim(self) -> int:
        return len(self.feature_names)

    def feature_index(self, feature: str) -> int:
        return self.feature_names.index(feature)


@dataclass(frozen=True)
class Object:
    """A concrete object in a task."""
    name: str
    type: ObjType

    def __post_init__(self):
        if self.name.startswith('?'):
            raise ValueError(f"Object names cannot start with '?': {self.name}")

    def __hash__(self):
        return hash(('obj', self.name))

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"{self.name}:{self.type.name}"


@dataclass(frozen=True)
class Variable:
    """A typed placeholder inside a lifted operator."""
    name: str
    type: ObjType

    def __post_init__(self):
        if not self.name.startswith('?'):
            raise ValueError(f"Variable names must start with '?': {self.name}")

    def __hash__(self):
        return hash(('var', self.name))

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"{self.name}:{self.type.name}"


class State:
    """Low-level state: one feature vector per object."""

    def __init__(self, data: Mapping[Object, np.ndarray]):
        self.data: Dict[Object, np.ndarray] = {}
        for obj, vec in data.items():
            arr = np.asarray(vec, dtype=float).copy()
            if arr.shape != (obj.type.dim,):
                raise ValueError(
                    f"Feature vector for {obj.name} has shape {arr.shape}, "
                    f"expected ({obj.type.dim},)"
                )
            self.data[obj] = arr

    def __getitem__(self, obj: Object) -> np.ndarray:
        return self.data[obj]

    def __contains__(self, obj: Object) -> bool:
        return obj in self.data

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        if set(self.data) != set(other.data):
            return False
        return all(np.array_equal(self.data[o], other.data[o]) for o in self.data)

    def __repr__(self):
        body = ', '.join(f"{o.name}={self.data[o].tolist()}" for o in self.objects)
        return f"State({body})"

    @property
    def objects(self) -> List[Object]:
        return sorted(self.data, key=lambda o: o.name)

    def objects_of_type(self, obj_type: ObjType) -> List[Object]:
        return [o for o in self.objects if o.type == obj_type]

    def get(self, obj: Object, feature: str) -> float:
        return float(self.data[obj][obj.type.feature_index(feature)])

    def set(self, obj: Object, feature: str, value: float) -> None:
        self.data[obj][obj.type.feature_index(feature)] = value

    def copy(self) -> 'State':
        return State(self.data)

    def vec(self, objects: Sequence[Object]) -> np.ndarray:
        """Concatenate the feature vectors of the given objects."""
        if not objects:
            return np.zeros(0, dtype=float)
        return np.concatenate([self.data[o] for o in objects])


Classifier = Callable[[State, Sequence[Object]], bool]


@dataclass(frozen=True)
class Predicate:
    """A named, typed relation with a classifier over low-level states."""
    name: str
    types: Tuple[ObjType, ...]
    classifier: Optional[Classifier] = field(default=None, compare=False, repr=False)

    def __hash__(self):
        return hash(self.name)

    def __str__(self):
        return self.name

    @property
    def arity(self) -> int:
        return len(self.types)

    def holds(self, state: State, objects: Sequence[Object]) -> bool:
        if self.classifier is None:
            raise ValueError(f"Predicate {self.name} has no classifier")
        return bool(self.classifier(state, objects))


class _Atom:
    """Shared behaviour of ground and lifted atoms."""

    __slots__ = ('predicate', 'entities', '_hash')

    def __init__(self, predicate: Predicate, entities: Sequence):
        entities = tuple(entities)
        if len(entities) != predicate.arity:
            raise ValueError(
                f"{predicate.name} expects {predicate.arity} arguments, got {len(entities)}"
            )
        for ent, expected in zip(entities, predicate.types):
            if ent.type != expected:
                raise ValueError(
                    f"{predicate.name}: argument {ent.name} has type {ent.type.name}, "
                    f"expected {expected.name}"
                )
        object.__setattr__(self, 'predicate', predicate)
        object.__setattr__(self, 'entities', entities)
        object.__setattr__(self, '_hash', hash((type(self).__name__, predicate.name, entities)))

    def __setattr__(self, key, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self):
            return NotImplemented
        return (self._hash == other._hash
                and self.predicate.name == other.predicate.name
                and self.entities == other.entities)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    @property
    def sort_key(self) -> Tuple[str, Tuple[str, ...]]:
        return (self.predicate.name, tuple(e.name for e in self.entities))

    def __str__(self):
        return f"{self.predicate.name}({', '.join(e.name for e in self.entities)})"

    __repr__ = __str__


class GroundAtom(_Atom):
    """A predicate applied to objects."""

    __slots__ = ()

    @property
    def objects(self) -> Tuple[Object, ...]:
        return self.entities

    def lift(self, sub: Mapping[Object, Variable]) -> 'LiftedAtom':
        return LiftedAtom(self.predicate, [sub[o] for o in self.entities])

    def holds(self, state: State) -> bool:
        return self.predicate.holds(state, self.entities)


class LiftedAtom(_Atom):
    """A predicate applied to variables."""

    __slots__ = ()

    @property
    def variables(self) -> Tuple[Variable, ...]:
        return self.entities

    def ground(self, sub: Mapping[Variable, Object]) -> GroundAtom:
        return GroundAtom(self.predicate, [sub[v] for v in self.entities])


AbstractState = FrozenSet[GroundAtom]


def sorted_atoms(atoms: Iterable[_Atom]) -> List:
    """Atoms in the canonical (predicate name, argument names) order."""
    return sorted(atoms, key=lambda a: a.sort_key)


@dataclass(frozen=True)
class Action:
    """A controller call with discrete object arguments and continuous parameters."""
    controller_id: str
    objects: Tuple[Object, ...]
    theta: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'objects', tuple(self.objects))
        object.__setattr__(self, 'theta', tuple(float(t) for t in self.theta))

    @property
    def theta_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=float)

    def __str__(self):
        args = ', '.join(o.name for o in self.objects)
        theta = ', '.join(f"{t:.3f}" for t in self.theta)
        return f"{self.controller_id}({args})[{theta}]"


@dataclass(frozen=True)
class Operator:
    """A lifted STRIPS operator with atomic and quantified delete effects.

    `controller_args` are the operator parameters passed to the controller as
    its discrete arguments, in the controller's argument order.
    """
    name: str
    parameters: Tuple[Variable, ...]
    preconditions: FrozenSet[LiftedAtom]
    add_effects: FrozenSet[LiftedAtom]
    delete_effects: FrozenSet[LiftedAtom]
    quantified_deletes: FrozenSet[Predicate]
    controller_id: str
    controller_args: Tuple[Variable, ...]

    def __post_init__(self):
        object.__setattr__(self, 'parameters', tuple(self.parameters))
        object.__setattr__(self, 'preconditions', frozenset(self.preconditions))
        object.__setattr__(self, 'add_effects', frozenset(self.add_effects))
        object.__setattr__(self, 'delete_effects', frozenset(self.delete_effects))
        object.__setattr__(self, 'quantified_deletes', frozenset(self.quantified_deletes))
        object.__setattr__(self, 'controller_args', tuple(self.controller_args))
        params = set(self.parameters)
        if len(params) != len(self.parameters):
            raise ValueError(f"Operator {self.name} has duplicate parameters")
        used = set(self.controller_args)
        for atom in self.preconditions | self.add_effects | self.delete_effects:
            used.update(atom.variables)
        missing = used - params
        if missing:
            names = ', '.join(sorted(v.name for v in missing))
            raise ValueError(f"Operator {self.name} uses undeclared variables: {names}")
        if self.add_effects & self.delete_effects:
            raise ValueError(f"Operator {self.name} adds and deletes the same atom")

    def __hash__(self):
        return hash((self.name, self.parameters, self.controller_id))

    @property
    def signature(self) -> tuple:
        """Content key ignoring the operator's name."""
        return (
            self.parameters,
            self.preconditions,
            self.add_effects,
            self.delete_effects,
            self.quantified_deletes,
            self.controller_id,
            self.controller_args,
        )

    def with_changes(self, **changes) -> 'Operator':
        return replace(self, **changes)

    def ground(self, objects: Sequence[Object]) -> 'GroundOperator':
        return GroundOperator(self, tuple(objects))


@dataclass(frozen=True, eq=False)
class GroundOperator:
    """An operator with its parameters substituted by objects."""
    parent: Operator
    objects: Tuple[Object, ...]
    preconditions: FrozenSet[GroundAtom] = field(init=False)
    add_effects: FrozenSet[GroundAtom] = field(init=False)
    delete_effects: FrozenSet[GroundAtom] = field(init=False)

    def __post_init__(self):
        if len(self.objects) != len(self.parent.parameters):
            raise ValueError(
                f"{self.parent.name} takes {len(self.parent.parameters)} objects, "
                f"got {len(self.objects)}"
            )
        for var, obj in zip(self.parent.parameters, self.objects):
            if var.type != obj.type:
                raise ValueError(f"{self.parent.name}: cannot bind {var!r} to {obj!r}")
        sub = self.substitution
        object.__setattr__(self, 'preconditions',
                           frozenset(a.ground(sub) for a in self.parent.preconditions))
        object.__setattr__(self, 'add_effects',
                           frozenset(a.ground(sub) for a in self.parent.add_effects))
        object.__setattr__(self, 'delete_effects',
                           frozenset(a.ground(sub) for a in self.parent.delete_effects))

    def __eq__(self, other):
        if not isinstance(other, GroundOperator):
            return NotImplemented
        return self.parent == other.parent and self.objects == other.objects

    def __hash__(self):
        return hash((self.parent.name, self.objects))

    def __str__(self):
        return f"{self.parent.name}({', '.join(o.name for o in self.objects)})"

    __repr__ = __str__

    @property
    def name(self) -> str:
        return self.parent.name

    @property
    def substitution(self) -> Dict[Variable, Object]:
        return dict(zip(self.parent.parameters, self.objects))

    @property
    def quantified_deletes(self) -> FrozenSet[Predicate]:
        return self.parent.quantified_deletes

    @property
    def controller_objects(self) -> Tuple[Object, ...]:
        sub = self.substitution
        return tuple(sub[v] for v in self.parent.controller_args)


def abstract(state: State, predicates: Iterable[Predicate]) -> AbstractState:
    """Return every ground atom whose classifier holds in `state`."""
    atoms = set()
    for pred in predicates:
        choices = [state.objects_of_type(t) for t in pred.types]
        for combo in itertools.product(*choices):
            if pred.holds(state, combo):
                atoms.add(GroundAtom(pred, combo))
    return frozenset(atoms)


def _objects_by_type(objects: Iterable[Object]) -> Dict[ObjType, List[Object]]:
    by_type: Dict[ObjType, List[Object]] = {}
    for obj in sorted(objects, key=lambda o: o.name):
        by_type.setdefault(obj.type, []).append(obj)
    return by_type


def iter_groundings(
    op: Operator,
    objects: Iterable[Object],
    fixed: Optional[Mapping[Variable, Object]] = None,
) -> Iterator[GroundOperator]:
    """Lazy form of `enumerate_groundings`."""
    by_type = _objects_by_type(objects)
    fixed = fixed or {}
    choices = []
    for var in op.parameters:
        if var in fixed:
            choices.append([fixed[var]])
        else:
            choices.append(by_type.get(var.type, []))
    for combo in itertools.product(*choices):
        yield GroundOperator(op, combo)


def enumerate_groundings(
    op: Operator,
    objects: Iterable[Object],
    fixed: Optional[Mapping[Variable, Object]] = None,
) -> List[GroundOperator]:
    """All type-respecting substitutions of `op`'s parameters.

    Ordered lexicographically by object name per parameter slot. `fixed` pins
    some parameters to given objects; the result is then the matching
    subsequence of the full enumeration.
    """
    return list(iter_groundings(op, objects, fixed))


def successor(state: AbstractState, ground_op: GroundOperator) -> AbstractState:
    """Delete-then-add transition without the precondition check."""
    quantified = ground_op.quantified_deletes
    deletes = ground_op.delete_effects
    kept = {a for a in state if a not in deletes and a.predicate not in quantified}
    return frozenset(kept | ground_op.add_effects)


def apply(state: AbstractState, ground_op: GroundOperator) -> AbstractState:
    """Apply `ground_op` to an abstract state."""
    if not ground_op.preconditions <= state:
        missing = sorted_atoms(ground_op.preconditions - state)
        raise PreconditionViolation(
            f"{ground_op} is not applicable; missing {', '.join(map(str, missing))}"
        )
    return successor(state, ground_op)
