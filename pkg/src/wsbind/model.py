"""Business-process domain model.

A :class:`ProcessDocument` is a macro, elementary or micro process carrying a
goal, roles, a local type table, composite activities and a behavior tree.
Abstract activities carry the semantic annotations (business domain,
functionality, parameter concepts, policy) that drive service discovery.

All values are immutable; documents are built once by the parser (or by hand
in tests) and shared freely afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple

from .policy import Policy

PRIMITIVE_KINDS = ("string", "decimal", "integer", "boolean", "date")
RECORD = "record"

INPUT = "input"
OUTPUT = "output"

TASK = "task"
SUBPROCESS = "subprocess"
ACTIVITY_KINDS = (TASK, SUBPROCESS)

INTERNAL = "internal"
EXTERNAL = "external"
ABSTRACT = "abstract"
BINDINGS = (INTERNAL, EXTERNAL, ABSTRACT)

TRIGGER_KINDS = ("start", "interrupt", "terminate")

MACRO = "macro"
ELEMENTARY = "elementary"
MICRO = "micro"
PROCESS_KINDS = (MACRO, ELEMENTARY, MICRO)

INVOKE = "invoke"
SEQUENCE = "sequence"
PARALLEL = "parallel"
EXCLUSIVE = "exclusive"
BEHAVIOR_KINDS = (INVOKE, SEQUENCE, PARALLEL, EXCLUSIVE)


@dataclass(frozen=True)
class Field:
    name: str
    type_name: str


@dataclass(frozen=True)
class DataType:
    name: str
    kind: str
    fields: Tuple[Field, ...] = ()

    @property
    def is_record(self) -> bool:
        return self.kind == RECORD


TypeTable = Dict[str, DataType]


def resolve_type(name: str, table: TypeTable) -> Optional[DataType]:
    """Look ``name`` up in ``table``; bare primitive kind names resolve implicitly."""
    if name in table:
        return table[name]
    if name in PRIMITIVE_KINDS:
        return DataType(name, name)
    return None


@dataclass(frozen=True)
class Parameter:
    name: str
    direction: str
    type_name: str
    concept: Optional[str] = None


@dataclass(frozen=True)
class Event:
    name: str
    trigger: str


@dataclass(frozen=True)
class Resource:
    name: str
    description: str = ""


@dataclass(frozen=True)
class Branch:
    condition: str
    body: "BehaviorNode"


@dataclass(frozen=True)
class BehaviorNode:
    kind: str
    activity_id: Optional[str] = None
    children: Tuple["BehaviorNode", ...] = ()
    branches: Tuple[Branch, ...] = ()
    else_body: Optional["BehaviorNode"] = None


def invoke(activity_id: str) -> BehaviorNode:
    return BehaviorNode(INVOKE, activity_id=activity_id)


def sequence(*children: BehaviorNode) -> BehaviorNode:
    return BehaviorNode(SEQUENCE, children=tuple(children))


def parallel(*children: BehaviorNode) -> BehaviorNode:
    return BehaviorNode(PARALLEL, children=tuple(children))


def exclusive(*branches: Tuple[str, BehaviorNode], otherwise: Optional[BehaviorNode] = None) -> BehaviorNode:
    return BehaviorNode(
        EXCLUSIVE,
        branches=tuple(Branch(c, b) for c, b in branches),
        else_body=otherwise,
    )


@dataclass(frozen=True)
class Activity:
    id: str
    kind: str = TASK
    binding: str = INTERNAL
    role: Optional[str] = None
    domain: Optional[str] = None
    functionality: Optional[str] = None
    inputs: Tuple[Parameter, ...] = ()
    outputs: Tuple[Parameter, ...] = ()
    resources: Tuple[Resource, ...] = ()
    events: Tuple[Event, ...] = ()
    policy: Optional[Policy] = None
    children: Tuple["Activity", ...] = ()
    child_behavior: Optional[BehaviorNode] = None

    @property
    def is_abstract(self) -> bool:
        return self.binding == ABSTRACT

    def iter_tree(self) -> Iterator["Activity"]:
        yield self
        for child in self.children:
            yield from child.iter_tree()


@dataclass(frozen=True)
class ProcessDocument:
    id: str
    name: str
    kind: str
    goal: str
    roles: Tuple[str, ...] = ()
    types: Tuple[DataType, ...] = ()
    activities: Tuple[Activity, ...] = ()
    behavior: Optional[BehaviorNode] = None
    child_processes: Tuple["ProcessDocument", ...] = ()
    # parse-time notes (e.g. ignored attributes); not part of the value
    warnings: Tuple[str, ...] = field(default=(), compare=False, repr=False)

    def iter_processes(self) -> Iterator["ProcessDocument"]:
        yield self
        for child in self.child_processes:
            yield from child.iter_processes()

    def iter_activities(self) -> Iterator[Activity]:
        """All activities depth-first in document order, child processes last."""
        for activity in self.activities:
            yield from activity.iter_tree()
        for child in self.child_processes:
            yield from child.iter_activities()

    def type_table(self) -> TypeTable:
        """Document-wide type table (type names are unique across nested processes)."""
        table: TypeTable = {}
        for proc in self.iter_processes():
            for t in proc.types:
                table.setdefault(t.name, t)
        return table

    def activity(self, activity_id: str) -> Activity:
        for a in self.iter_activities():
            if a.id == activity_id:
                return a
        raise KeyError(activity_id)

    def process(self, process_id: str) -> "ProcessDocument":
        for p in self.iter_processes():
            if p.id == process_id:
                return p
        raise KeyError(process_id)


def abstract_activities(doc: ProcessDocument) -> list:
    """Activities bound ``abstract`` anywhere in ``doc``, in document order."""
    return [a for a in doc.iter_activities() if a.is_abstract]
