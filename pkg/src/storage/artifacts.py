"""JSON artifact store for demonstrations, operators, samplers and reports."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ..envs import BaseEnvironment, Demonstration, Task
from ..reporting import ExperimentReport, render_csv, render_text
from ..samplers import BaseSampler, sampler_from_dict
from ..symbolic import (
    Action,
    GroundAtom,
    LiftedAtom,
    Object,
    Operator,
    State,
    Variable,
    render_operators,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class SchemaVersionError(ValueError):
    """An artifact was written with an unsupported schema version."""


class AtomRecord(BaseModel):
    predicate: str
    args: List[str]


class ObjectRecord(BaseModel):
    name: str
    type: str


class ActionRecord(BaseModel):
    controller: str
    objects: List[str]
    theta: List[float] = Field(default_factory=list)


class TaskRecord(BaseModel):
    task_id: str
    objects: List[ObjectRecord]
    init: Dict[str, List[float]]
    goal: List[AtomRecord]


class DemoRecord(BaseModel):
    task: TaskRecord
    states: List[Dict[str, List[float]]]
    actions: List[ActionRecord]


class OperatorRecord(BaseModel):
    name: str
    parameters: List[ObjectRecord]
    preconditions: List[AtomRecord]
    add_effects: List[AtomRecord]
    delete_effects: List[AtomRecord]
    quantified_deletes: List[str]
    controller: str
    controller_args: List[str]


class Envelope(BaseModel):
    """Common wrapper of every artifact file."""
    schema_version: int
    env: str
    kind: str
    payload: Any


def _state_record(state: State) -> Dict[str, List[float]]:
    return {obj.name: [float(v) for v in state[obj]] for obj in state.objects}


def _atom_record(atom) -> AtomRecord:
    return AtomRecord(predicate=atom.predicate.name, args=[e.name for e in atom.entities])


def _sorted_atom_records(atoms) -> List[AtomRecord]:
    return sorted((_atom_record(a) for a in atoms), key=lambda r: (r.predicate, r.args))


def demo_to_record(demo: Demonstration) -> DemoRecord:
    task = demo.task
    return DemoRecord(
        task=TaskRecord(
            task_id=task.task_id,
            objects=[ObjectRecord(name=o.name, type=o.type.name) for o in task.objects],
            init=_state_record(task.init),
            goal=_sorted_atom_records(task.goal),
        ),
        states=[_state_record(s) for s in demo.states],
        actions=[ActionRecord(controller=a.controller_id, objects=[o.name for o in a.objects],
                              theta=list(a.theta)) for a in demo.actions],
    )


def demo_from_record(record: DemoRecord, env: BaseEnvironment) -> Demonstration:
    objects = {r.name: Object(r.name, env.types[r.type]) for r in record.task.objects}

    def state(data: Dict[str, List[float]]) -> State:
        return State({objects[name]: np.asarray(values, dtype=float) for name, values in data.items()})

    goal = {GroundAtom(env.predicates[a.predicate], [objects[n] for n in a.args])
            for a in record.task.goal}
    task = Task(objects=tuple(objects.values()), init=state(record.task.init), goal=goal,
                task_id=record.task.task_id)
    actions = [Action(a.controller, tuple(objects[n] for n in a.objects), tuple(a.theta))
               for a in record.actions]
    return Demonstration(task=task, states=[state(s) for s in record.states], actions=actions)


def operator_to_record(op: Operator) -> OperatorRecord:
    return OperatorRecord(
        name=op.name,
        parameters=[ObjectRecord(name=v.name, type=v.type.name) for v in op.parameters],
        preconditions=_sorted_atom_records(op.preconditions),
        add_effects=_sorted_atom_records(op.add_effects),
        delete_effects=_sorted_atom_records(op.delete_effects),
        quantified_deletes=sorted(p.name for p in op.quantified_deletes),
        controller=op.controller_id,
        controller_args=[v.name for v in op.controller_args],
    )


def operator_from_record(record: OperatorRecord, env: BaseEnvironment) -> Operator:
    variables = {r.name: Variable(r.name, env.types[r.type]) for r in record.parameters}

    def atoms(records: List[AtomRecord]):
        return frozenset(LiftedAtom(env.predicates[a.predicate], [variables[n] for n in a.args])
                         for a in records)

    return Operator(
        name=record.name,
        parameters=tuple(variables[r.name] for r in record.parameters),
        preconditions=atoms(record.preconditions),
        add_effects=atoms(record.add_effects),
        delete_effects=atoms(record.delete_effects),
        quantified_deletes=frozenset(env.predicates[n] for n in record.quantified_deletes),
        controller_id=record.controller,
        controller_args=tuple(variables[n] for n in record.controller_args),
    )


class ArtifactStore:
    """Directory of JSON artifacts for one run."""

    DEMOS = 'demos.json'
    OPERATORS = 'operators.json'
    SAMPLERS = 'samplers.json'
    REPORT = 'report.json'

    def __init__(self, root: str = None, create: bool = True):
        if root is None:
            root = Path.home() / '.opcraft' / 'runs'
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.root / name

    def exists(self, name: str) -> bool:
        return self.path(name).exists()

    def _write(self, name: str, env: str, kind: str, payload: Any) -> Path:
        envelope = Envelope(schema_version=SCHEMA_VERSION, env=env, kind=kind, payload=payload)
        path = self.path(name)
        path.write_text(json.dumps(envelope.model_dump(mode='json'), sort_keys=True, indent=2) + '\n')
        logger.debug("Wrote %s", path)
        return path

    def _read(self, name: str, kind: str, env: Optional[str] = None) -> Envelope:
        path = self.path(name)
        if not path.exists():
            raise FileNotFoundError(f"No {kind} artifact at {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ValueError(f"{path} is not valid JSON: {e}") from e
        version = raw.get('schema_version') if isinstance(raw, dict) else None
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(
                f"{path} has schema version {version!r}; this version reads {SCHEMA_VERSION}"
            )
        try:
            envelope = Envelope.model_validate(raw)
        except ValidationError as e:
            raise ValueError(f"{path} is malformed: {e}") from e
        if envelope.kind != kind:
            raise ValueError(f"{path} holds {envelope.kind}, expected {kind}")
        if env is not None and envelope.env != env:
            raise ValueError(f"{path} was written for {envelope.env}, not {env}")
        return envelope

    def save_demos(self, env: BaseEnvironment, demos: Sequence[Demonstration]) -> Path:
        return self._write(self.DEMOS, env.name, 'demos',
                           [demo_to_record(d).model_dump() for d in demos])

    def load_demos(self, env: BaseEnvironment) -> List[Demonstration]:
        envelope = self._read(self.DEMOS, 'demos', env.name)
        return [demo_from_record(DemoRecord.model_validate(r), env) for r in envelope.payload]

    def save_operators(self, env: BaseEnvironment, ops: Sequence[Operator]) -> Path:
        ops = sorted(ops, key=lambda o: o.name)
        self.path('operators.txt').write_text(render_operators(ops))
        return self._write(self.OPERATORS, env.name, 'operators',
                           [operator_to_record(op).model_dump() for op in ops])

    def load_operators(self, env: BaseEnvironment) -> List[Operator]:
        envelope = self._read(self.OPERATORS, 'operators', env.name)
        return [operator_from_record(OperatorRecord.model_validate(r), env) for r in envelope.payload]

    def save_samplers(self, env: BaseEnvironment, samplers: Dict[str, BaseSampler]) -> Path:
        return self._write(self.SAMPLERS, env.name, 'samplers',
                           {name: s.to_dict() for name, s in samplers.items()})

    def load_samplers(self, env: BaseEnvironment) -> Dict[str, BaseSampler]:
        envelope = self._read(self.SAMPLERS, 'samplers', env.name)
        return {name: sampler_from_dict(data, env) for name, data in envelope.payload.items()}

    def save_report(self, report: ExperimentReport) -> Path:
        self.path('report.csv').write_text(render_csv(report))
        self.path('report.txt').write_text(render_text(report))
        return self._write(self.REPORT, report.env, 'report', report.model_dump())

    def load_report(self) -> ExperimentReport:
        envelope = self._read(self.REPORT, 'report')
        return ExperimentReport.model_validate(envelope.payload)
