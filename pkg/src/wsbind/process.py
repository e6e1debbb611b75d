"""Reading, writing and validating process documents."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from typing import Dict, Iterator, List, Optional, Tuple

from . import model as m
from ._xml import (
    check_children,
    local,
    parse_policy,
    parse_root,
    parse_types,
    require,
    sub,
    text_of,
    to_bytes,
    write_policy,
    write_types,
)
from .errors import InvariantViolation, MalformedDocument, UnresolvedReference
from .model import Activity, BehaviorNode, Parameter, ProcessDocument
from .ontology import is_valid_iri
from .policy import Policy

UNRESOLVED = "unresolved"
INVARIANT = "invariant"


@dataclass(frozen=True, order=True)
class Violation:
    path: str
    message: str
    code: str = INVARIANT

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


# ---------------------------------------------------------------- parsing


def parse_process(data, strict: bool = True) -> ProcessDocument:
    """Parse and fully validate a process document.

    With ``strict=False`` only syntax is checked; call :func:`validate_process`
    to list invariant violations. Otherwise raises :class:`MalformedDocument` for syntax problems,
    :class:`UnresolvedReference` for dangling type/activity references and
    :class:`InvariantViolation` for any other broken rule.
    """
    root = parse_root(data, "process")
    warnings: List[str] = []
    doc = _parse_process_elem(root, "", warnings)
    doc = replace(doc, warnings=tuple(warnings))
    if not strict:
        return doc
    violations = validate_process(doc)
    unresolved = [v for v in violations if v.code == UNRESOLVED]
    if unresolved:
        raise UnresolvedReference(unresolved[0].message, unresolved[0].path)
    if violations:
        raise InvariantViolation(violations[0].message, violations[0].path)
    return doc


_PROCESS_CHILDREN = {"goal", "role", "types", "activity", "behavior", "process"}
_ACTIVITY_CHILDREN = {
    "domain", "functionality", "input", "output", "resource", "event",
    "policy", "activity", "behavior",
}


def _parse_process_elem(el: ET.Element, parent_path: str, warnings) -> ProcessDocument:
    pid = require(el, "id", parent_path or "/")
    path = f"{parent_path}/process[{pid}]"
    check_children(el, _PROCESS_CHILDREN, path)
    goal = ""
    roles, types, activities, children = [], [], [], []
    behavior = None
    for child in el:
        tag = local(child.tag)
        if tag == "goal":
            goal = text_of(child)
        elif tag == "role":
            roles.append(require(child, "name", path))
        elif tag == "types":
            types.extend(parse_types(child, f"{path}/types"))
        elif tag == "activity":
            activities.append(_parse_activity(child, path, warnings))
        elif tag == "behavior":
            if behavior is not None:
                raise MalformedDocument("more than one <behavior>", path)
            behavior = _parse_behavior_container(child, f"{path}/behavior")
        elif tag == "process":
            children.append(_parse_process_elem(child, path, warnings))
    return ProcessDocument(
        id=pid,
        name=el.get("name", pid),
        kind=require(el, "kind", path),
        goal=goal,
        roles=tuple(roles),
        types=tuple(types),
        activities=tuple(activities),
        behavior=behavior,
        child_processes=tuple(children),
    )


def _parse_param(el: ET.Element, direction: str, path: str) -> Parameter:
    return Parameter(
        name=require(el, "name", path),
        direction=direction,
        type_name=require(el, "type", path),
        concept=el.get("concept"),
    )


def _parse_activity(el: ET.Element, parent_path: str, warnings) -> Activity:
    aid = require(el, "id", parent_path)
    path = f"{parent_path}/activity[{aid}]"
    check_children(el, _ACTIVITY_CHILDREN, path)
    fields = dict(domain=None, functionality=None, policy=None, child_behavior=None)
    inputs, outputs, resources, events, children = [], [], [], [], []
    for child in el:
        tag = local(child.tag)
        if tag in ("domain", "functionality"):
            if fields[tag] is not None:
                raise MalformedDocument(f"more than one <{tag}>", path)
            fields[tag] = require(child, "concept", path)
        elif tag == "input":
            inputs.append(_parse_param(child, m.INPUT, path))
        elif tag == "output":
            outputs.append(_parse_param(child, m.OUTPUT, path))
        elif tag == "resource":
            resources.append(m.Resource(require(child, "name", path), text_of(child)))
        elif tag == "event":
            events.append(m.Event(require(child, "name", path), require(child, "trigger", path)))
        elif tag == "policy":
            if fields["policy"] is not None:
                raise MalformedDocument("more than one <policy>", path)
            fields["policy"] = parse_policy(child, f"{path}/policy", warnings)
        elif tag == "activity":
            children.append(_parse_activity(child, path, warnings))
        elif tag == "behavior":
            if fields["child_behavior"] is not None:
                raise MalformedDocument("more than one <behavior>", path)
            fields["child_behavior"] = _parse_behavior_container(child, f"{path}/behavior")
    return Activity(
        id=aid,
        kind=require(el, "kind", path),
        binding=el.get("binding", m.INTERNAL),
        role=el.get("role"),
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        resources=tuple(resources),
        events=tuple(events),
        children=tuple(children),
        **fields,
    )


def _parse_behavior_container(el: ET.Element, path: str) -> BehaviorNode:
    nodes = list(el)
    if len(nodes) != 1:
        raise MalformedDocument("<behavior> must contain exactly one node", path)
    return _parse_node(nodes[0], path)


def _parse_node(el: ET.Element, path: str) -> BehaviorNode:
    tag = local(el.tag)
    if tag == "invoke":
        check_children(el, (), path)
        return m.invoke(require(el, "activity", path))
    if tag in ("sequence", "parallel"):
        check_children(el, m.BEHAVIOR_KINDS, path)
        kids = tuple(_parse_node(c, f"{path}/{tag}") for c in el)
        return BehaviorNode(tag, children=kids)
    if tag == "exclusive":
        check_children(el, ("branch", "else"), f"{path}/exclusive")
        branches, else_body = [], None
        for c in el:
            if local(c.tag) == "branch":
                cond = require(c, "condition", path)
                branches.append(m.Branch(cond, _parse_behavior_container(c, f"{path}/exclusive/branch")))
            else:
                if else_body is not None:
                    raise MalformedDocument("more than one <else>", path)
                else_body = _parse_behavior_container(c, f"{path}/exclusive/else")
        return BehaviorNode(m.EXCLUSIVE, branches=tuple(branches), else_body=else_body)
    raise MalformedDocument(f"unknown behavior node <{tag}>", path)


# ---------------------------------------------------------------- serialization


def serialize_process(doc: ProcessDocument) -> bytes:
    root = ET.Element("process")
    _write_process(root, doc)
    return to_bytes(root)


def _write_process(el: ET.Element, doc: ProcessDocument) -> None:
    el.set("id", doc.id)
    el.set("name", doc.name)
    el.set("kind", doc.kind)
    sub(el, "goal").text = doc.goal
    for role in doc.roles:
        sub(el, "role", [("name", role)])
    write_types(el, doc.types)
    for a in doc.activities:
        _write_activity(el, a)
    if doc.behavior is not None:
        _write_node(sub(el, "behavior"), doc.behavior)
    for child in doc.child_processes:
        _write_process(sub(el, "process"), child)


def _write_activity(parent: ET.Element, a: Activity) -> None:
    el = sub(parent, "activity", [("id", a.id), ("kind", a.kind), ("binding", a.binding), ("role", a.role)])
    if a.domain is not None:
        sub(el, "domain", [("concept", a.domain)])
    if a.functionality is not None:
        sub(el, "functionality", [("concept", a.functionality)])
    for p in a.inputs + a.outputs:
        sub(el, p.direction, [("name", p.name), ("type", p.type_name), ("concept", p.concept)])
    for r in a.resources:
        sub(el, "resource", [("name", r.name)]).text = r.description or None
    for e in a.events:
        sub(el, "event", [("name", e.name), ("trigger", e.trigger)])
    write_policy(el, a.policy)
    for c in a.children:
        _write_activity(el, c)
    if a.child_behavior is not None:
        _write_node(sub(el, "behavior"), a.child_behavior)


def _write_node(parent: ET.Element, node: BehaviorNode) -> None:
    if node.kind == m.INVOKE:
        sub(parent, "invoke", [("activity", node.activity_id)])
    elif node.kind == m.EXCLUSIVE:
        el = sub(parent, "exclusive")
        for b in node.branches:
            _write_node(sub(el, "branch", [("condition", b.condition)]), b.body)
        if node.else_body is not None:
            _write_node(sub(el, "else"), node.else_body)
    else:
        el = sub(parent, node.kind)
        for c in node.children:
            _write_node(el, c)


# ---------------------------------------------------------------- validation


def validate_process(doc: ProcessDocument) -> List[Violation]:
    """Every broken invariant in ``doc``, sorted by location path."""
    v = _Validator(doc)
    v.run()
    return sorted(set(v.violations))


class _Validator:
    def __init__(self, doc: ProcessDocument) -> None:
        self.doc = doc
        self.violations: List[Violation] = []
        self.table = doc.type_table()
        self.ids: Dict[str, str] = {}  # id -> path of first definition
        self.activity_by_id: Dict[str, Activity] = {}
        self.process_by_id: Dict[str, ProcessDocument] = {}

    def add(self, path: str, message: str, code: str = INVARIANT) -> None:
        self.violations.append(Violation(path, message, code))

    def run(self) -> None:
        self._collect_ids(self.doc, "")
        self._check_types()
        self._check_process(self.doc, "", parent=None, inherited_role=None)
        self._check_behavior_graph()

    def _collect_ids(self, proc: ProcessDocument, parent_path: str) -> None:
        path = f"{parent_path}/process[{proc.id}]"
        self._claim(proc.id, path)
        self.process_by_id.setdefault(proc.id, proc)
        for a in proc.activities:
            self._collect_activity_ids(a, path)
        for c in proc.child_processes:
            self._collect_ids(c, path)

    def _collect_activity_ids(self, a: Activity, parent_path: str) -> None:
        path = f"{parent_path}/activity[{a.id}]"
        self._claim(a.id, path)
        self.activity_by_id.setdefault(a.id, a)
        for c in a.children:
            self._collect_activity_ids(c, path)

    def _claim(self, ident: str, path: str) -> None:
        if not ident or any(ch.isspace() for ch in ident):
            self.add(path, f"invalid identifier {ident!r}")
        if ident in self.ids:
            self.add(path, f"duplicate id {ident!r} (first defined at {self.ids[ident]})")
        else:
            self.ids[ident] = path

    # -- types

    def _check_types(self) -> None:
        types = [t for proc in self.doc.iter_processes() for t in proc.types]
        self.violations.extend(type_violations(types))

    # -- processes and activities

    def _check_process(self, proc: ProcessDocument, parent_path: str, parent, inherited_role) -> None:
        path = f"{parent_path}/process[{proc.id}]"
        if proc.kind not in m.PROCESS_KINDS:
            self.add(path, f"unknown process kind {proc.kind!r}")
        if not proc.goal.strip():
            self.add(path, "goal is empty")
        if proc.kind == m.MICRO and len(proc.roles) != 1:
            self.add(path, f"micro-process must have exactly one role, has {len(proc.roles)}")
        if len(set(proc.roles)) != len(proc.roles):
            self.add(path, "duplicate role name")
        expected_child = {m.MACRO: m.ELEMENTARY, m.ELEMENTARY: m.MICRO}.get(proc.kind)
        for c in proc.child_processes:
            if c.kind != expected_child:
                allowed = expected_child or "no child processes"
                self.add(f"{path}/process[{c.id}]", f"{proc.kind} process cannot contain a {c.kind} process (expected {allowed})")
        if parent is None and proc.behavior is None:
            self.add(path, "root process has no behavior")
        role = proc.roles[0] if len(proc.roles) == 1 else inherited_role
        scope_roles = set(proc.roles)
        for a in proc.activities:
            self._check_activity(a, path, role, scope_roles)
        for c in proc.child_processes:
            self._check_process(c, path, proc, role)

    def _check_activity(self, a: Activity, parent_path: str, role: Optional[str], scope_roles: set) -> None:
        path = f"{parent_path}/activity[{a.id}]"
        if a.kind not in m.ACTIVITY_KINDS:
            self.add(path, f"unknown activity kind {a.kind!r}")
        if a.binding not in m.BINDINGS:
            self.add(path, f"unknown binding {a.binding!r}")
        if a.kind == m.TASK and a.children:
            self.add(path, "a task cannot have child activities")
        if a.kind == m.TASK and a.child_behavior is not None:
            self.add(path, "a task cannot have a behavior")
        if a.kind == m.SUBPROCESS and not a.children:
            self.add(path, "a subprocess needs at least one child activity")
        if a.is_abstract:
            if a.kind == m.SUBPROCESS:
                self.add(path, "only tasks can be abstract")
            if a.domain is None:
                self.add(path, "abstract activity lacks a domain concept")
            if a.functionality is None:
                self.add(path, "abstract activity lacks a functionality concept")
        for label, concept in (("domain", a.domain), ("functionality", a.functionality)):
            if concept is not None and not is_valid_iri(concept):
                self.add(f"{path}/{label}", f"invalid concept {concept!r}")
        for direction, params in ((m.INPUT, a.inputs), (m.OUTPUT, a.outputs)):
            names = [p.name for p in params]
            for name in sorted({n for n in names if names.count(n) > 1}):
                self.add(f"{path}/{direction}[{name}]", "duplicate parameter name")
            for p in params:
                ppath = f"{path}/{direction}[{p.name}]"
                if p.direction != direction:
                    self.add(ppath, f"parameter direction {p.direction!r} in {direction} list")
                if m.resolve_type(p.type_name, self.table) is None:
                    self.add(ppath, f"unknown type {p.type_name!r}", UNRESOLVED)
                if p.concept is None:
                    if a.is_abstract:
                        self.add(ppath, "parameter of an abstract activity lacks a concept")
                elif not is_valid_iri(p.concept):
                    self.add(ppath, f"invalid concept {p.concept!r}")
        rnames = [r.name for r in a.resources]
        for name in sorted({n for n in rnames if rnames.count(n) > 1}):
            self.add(f"{path}/resource[{name}]", "duplicate resource name")
        for e in a.events:
            if e.trigger not in m.TRIGGER_KINDS:
                self.add(f"{path}/event[{e.name}]", f"unknown trigger {e.trigger!r}")
        if a.policy is not None:
            self._check_policy(a.policy, f"{path}/policy")
        if a.role is not None:
            if a.role not in self._all_roles():
                self.add(path, f"unknown role {a.role!r}", UNRESOLVED)
            role = a.role
        if a.kind == m.TASK and a.binding in (m.INTERNAL, m.EXTERNAL) and role is None:
            self.add(path, "cannot determine the role performing this activity")
        for c in a.children:
            self._check_activity(c, path, role, scope_roles)

    def _all_roles(self) -> set:
        return {r for p in self.doc.iter_processes() for r in p.roles}

    def _check_policy(self, policy: Policy, path: str) -> None:
        if not policy.alternatives:
            self.add(path, "policy has no alternatives")
        for i, alt in enumerate(policy.alternatives):
            if not alt.assertions:
                self.add(f"{path}/alternative[{i}]", "alternative has no assertions")
            for a in alt.assertions:
                if not a.name:
                    self.add(f"{path}/alternative[{i}]", "assertion without a name")
                if not is_valid_iri(a.concept):
                    self.add(f"{path}/alternative[{i}]/assertion[{a.name}]", f"invalid concept {a.concept!r}")

    # -- behavior

    def _check_behavior_graph(self) -> None:
        refs: Dict[str, str] = {}
        for path, node in self._behavior_roots():
            self._check_node(node, path, refs)
        # each task must be reached exactly once from the root behavior
        if self.doc.behavior is None or any(v.code == UNRESOLVED for v in self.violations):
            return
        reached: Dict[str, int] = {}
        try:
            for node in expand_behavior(self.doc, self.doc.behavior):
                if node.kind == m.INVOKE:
                    reached[node.activity_id] = reached.get(node.activity_id, 0) + 1
        except ExpansionError as exc:
            self.add(exc.path, exc.message)
            return
        for proc_path, proc in self._process_paths(self.doc, ""):
            for a in proc.activities:
                for sub_path, act in _activity_paths(a, proc_path):
                    if act.kind == m.TASK and act.id not in reached:
                        self.add(sub_path, "activity is never invoked from the process behavior")

    def _behavior_roots(self) -> Iterator[Tuple[str, BehaviorNode]]:
        for proc_path, proc in self._process_paths(self.doc, ""):
            if proc.behavior is not None:
                yield f"{proc_path}/behavior", proc.behavior
            for a in proc.activities:
                for act_path, act in _activity_paths(a, proc_path):
                    if act.child_behavior is not None:
                        yield f"{act_path}/behavior", act.child_behavior

    def _process_paths(self, proc: ProcessDocument, parent_path: str):
        path = f"{parent_path}/process[{proc.id}]"
        yield path, proc
        for c in proc.child_processes:
            yield from self._process_paths(c, path)

    def _check_node(self, node: BehaviorNode, path: str, refs: Dict[str, str]) -> None:
        if node.kind == m.INVOKE:
            npath = f"{path}/invoke[{node.activity_id}]"
            target = node.activity_id
            if target not in self.activity_by_id and target not in self.process_by_id:
                self.add(npath, f"invoke references unknown activity {target!r}", UNRESOLVED)
            elif target == self.doc.id:
                self.add(npath, "the root process cannot be invoked")
            elif target in refs:
                self.add(npath, f"{target!r} is already invoked at {refs[target]}")
            else:
                refs[target] = npath
            if node.children or node.branches or node.else_body is not None:
                self.add(npath, "invoke cannot have children")
        elif node.kind in (m.SEQUENCE, m.PARALLEL):
            npath = f"{path}/{node.kind}"
            if not node.children:
                self.add(npath, f"empty {node.kind}")
            for i, c in enumerate(node.children):
                self._check_node(c, f"{npath}[{i}]", refs)
        elif node.kind == m.EXCLUSIVE:
            npath = f"{path}/exclusive"
            if not node.branches:
                self.add(npath, "exclusive gateway without branches")
            for i, b in enumerate(node.branches):
                if not b.condition.strip():
                    self.add(f"{npath}/branch[{i}]", "empty branch condition")
                self._check_node(b.body, f"{npath}/branch[{i}]", refs)
            if node.else_body is not None:
                self._check_node(node.else_body, f"{npath}/else", refs)
        else:
            self.add(path, f"unknown behavior node kind {node.kind!r}")


def type_violations(types) -> List[Violation]:
    """Duplicate names, bad kinds, dangling field types and recursive records."""
    out: List[Violation] = []
    table: Dict[str, m.DataType] = {}
    for t in types:
        path = f"/types/type[{t.name}]"
        if t.name in table:
            out.append(Violation(path, f"duplicate type name {t.name!r}"))
        table.setdefault(t.name, t)
    for t in types:
        path = f"/types/type[{t.name}]"
        if t.kind == m.RECORD:
            names = [f.name for f in t.fields]
            for name in sorted({n for n in names if names.count(n) > 1}):
                out.append(Violation(path, f"duplicate field {name!r}"))
            for f in t.fields:
                if m.resolve_type(f.type_name, table) is None:
                    out.append(Violation(f"{path}/field[{f.name}]", f"unknown type {f.type_name!r}", UNRESOLVED))
        elif t.kind in m.PRIMITIVE_KINDS:
            if t.fields:
                out.append(Violation(path, "primitive type cannot declare fields"))
        else:
            out.append(Violation(path, f"unknown type kind {t.kind!r}"))
    for name in sorted(_cyclic_types(table)):
        out.append(Violation(f"/types/type[{name}]", "recursive type definition"))
    return out


def _cyclic_types(table) -> set:
    state: Dict[str, int] = {}
    cyclic = set()

    def visit(name: str, stack: list) -> None:
        t = table.get(name)
        if t is None or not t.is_record:
            return
        if state.get(name) == 1:
            cyclic.update(stack[stack.index(name):])
            return
        if state.get(name) == 2:
            return
        state[name] = 1
        stack.append(name)
        for f in t.fields:
            visit(f.type_name, stack)
        stack.pop()
        state[name] = 2

    for name in table:
        visit(name, [])
    return cyclic


def _activity_paths(a: Activity, parent_path: str):
    path = f"{parent_path}/activity[{a.id}]"
    yield path, a
    for c in a.children:
        yield from _activity_paths(c, path)


# ---------------------------------------------------------------- behavior expansion


class ExpansionError(Exception):
    def __init__(self, path: str, message: str) -> None:
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Expanded:
    """A behavior node after inlining subprocesses and child processes.

    ``name`` is set on sequences that stand for an inlined subprocess or child
    process; ``node`` is the original node for invokes and gateways.
    """

    kind: str
    name: Optional[str] = None
    activity_id: Optional[str] = None
    children: Tuple["Expanded", ...] = ()
    branches: Tuple[Tuple[str, "Expanded"], ...] = ()
    else_body: Optional["Expanded"] = None

    def walk(self) -> Iterator["Expanded"]:
        yield self
        for c in self.children:
            yield from c.walk()
        for _, b in self.branches:
            yield from b.walk()
        if self.else_body is not None:
            yield from self.else_body.walk()


def expand(doc: ProcessDocument, node: BehaviorNode, _stack: Tuple[str, ...] = ()) -> Expanded:
    """Inline invoked subprocesses and child processes into one control tree."""
    if node.kind == m.INVOKE:
        target = node.activity_id
        if target in _stack:
            raise ExpansionError(f"/behavior/invoke[{target}]", f"cyclic invocation of {target!r}")
        proc = _find_process(doc, target)
        if proc is not None:
            body = proc.behavior or m.sequence(*(m.invoke(a.id) for a in proc.activities))
            return _named(target, expand(doc, body, _stack + (target,)))
        act = _find_activity(doc, target)
        if act is None:
            raise ExpansionError(f"/behavior/invoke[{target}]", f"unknown activity {target!r}")
        if act.kind == m.SUBPROCESS:
            body = act.child_behavior or m.sequence(*(m.invoke(c.id) for c in act.children))
            return _named(target, expand(doc, body, _stack + (target,)))
        return Expanded(m.INVOKE, activity_id=target)
    if node.kind in (m.SEQUENCE, m.PARALLEL):
        return Expanded(node.kind, children=tuple(expand(doc, c, _stack) for c in node.children))
    if node.kind == m.EXCLUSIVE:
        return Expanded(
            m.EXCLUSIVE,
            branches=tuple((b.condition, expand(doc, b.body, _stack)) for b in node.branches),
            else_body=None if node.else_body is None else expand(doc, node.else_body, _stack),
        )
    raise ExpansionError("/behavior", f"unknown behavior node kind {node.kind!r}")


def _named(name: str, inner: Expanded) -> Expanded:
    if inner.kind == m.SEQUENCE and inner.name is None:
        return Expanded(m.SEQUENCE, name=name, children=inner.children)
    return Expanded(m.SEQUENCE, name=name, children=(inner,))


def expand_behavior(doc: ProcessDocument, node: BehaviorNode) -> Iterator[Expanded]:
    yield from expand(doc, node).walk()


def _find_process(doc: ProcessDocument, pid: str) -> Optional[ProcessDocument]:
    for p in doc.iter_processes():
        if p.id == pid:
            return p
    return None


def _find_activity(doc: ProcessDocument, aid: str) -> Optional[Activity]:
    for a in doc.iter_activities():
        if a.id == aid:
            return a
    return None


def activity_roles(doc: ProcessDocument) -> Dict[str, Optional[str]]:
    """Role performing each activity: explicit, else inherited from the nearest single-role scope."""
    roles: Dict[str, Optional[str]] = {}

    def visit_activity(a: Activity, role: Optional[str]) -> None:
        role = a.role or role
        roles[a.id] = role
        for c in a.children:
            visit_activity(c, role)

    def visit_process(p: ProcessDocument, role: Optional[str]) -> None:
        role = p.roles[0] if len(p.roles) == 1 else role
        for a in p.activities:
            visit_activity(a, role)
        for c in p.child_processes:
            visit_process(c, role)

    visit_process(doc, None)
    return roles
