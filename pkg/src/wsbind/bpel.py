"""BPEL-shaped control-flow documents and the binding rewrite.

:func:`emit_abstract_bpel` maps a process behavior onto
``sequence``/``flow``/``if``/``invoke``; abstract activities become invokes on
the ``##abstract`` partner link. :func:`bind` later swaps those for concrete
invocations of selected services, leaving every other node untouched.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from typing import Dict, Iterator, List, Optional, Tuple, Union

from . import model as m
from ._xml import check_children, local, parse_root, require, sub, text_of, to_bytes
from .errors import (
    AlreadyBound,
    MalformedDocument,
    NoCandidate,
    UnboundActivity,
    UnknownActivity,
    UnsupportedBehavior,
)
from .matcher import DiscoveryReport
from .model import ProcessDocument
from .process import ExpansionError, Expanded, activity_roles, expand

ABSTRACT_LINK = "##abstract"
NS_ABSTRACT = "http://docs.oasis-open.org/wsbpel/2.0/process/abstract"
NS_EXECUTABLE = "http://docs.oasis-open.org/wsbpel/2.0/process/executable"


@dataclass(frozen=True)
class Import:
    namespace: str
    location: str


@dataclass(frozen=True)
class PartnerLink:
    name: str
    service_id: Optional[str] = None
    endpoint: Optional[str] = None
    role: Optional[str] = None


@dataclass(frozen=True)
class Variable:
    name: str
    type_name: str


@dataclass(frozen=True)
class Invoke:
    name: str
    partner_link: str
    input_variable: str
    output_variable: str
    operation: Optional[str] = None
    interface: Optional[str] = None
    abstract: bool = False

    kind = "invoke"


@dataclass(frozen=True)
class Block:
    """``sequence`` or ``flow``."""

    kind: str
    children: Tuple["Node", ...] = ()
    name: Optional[str] = None


@dataclass(frozen=True)
class If:
    branches: Tuple[Tuple[str, "Node"], ...]
    else_body: Optional["Node"] = None

    kind = "if"


Node = Union[Invoke, Block, If]


def walk(node: Node) -> Iterator[Node]:
    yield node
    if isinstance(node, Block):
        for c in node.children:
            yield from walk(c)
    elif isinstance(node, If):
        for _, b in node.branches:
            yield from walk(b)
        if node.else_body is not None:
            yield from walk(node.else_body)


@dataclass(frozen=True)
class BpelDocument:
    process_name: str
    imports: Tuple[Import, ...] = ()
    partner_links: Tuple[PartnerLink, ...] = ()
    variables: Tuple[Variable, ...] = ()
    body: Node = Block("sequence")

    def invokes(self) -> List[Invoke]:
        return [n for n in walk(self.body) if isinstance(n, Invoke)]

    def abstract_invokes(self) -> List[Invoke]:
        return [i for i in self.invokes() if i.abstract]

    @property
    def is_abstract(self) -> bool:
        return bool(self.abstract_invokes())

    def shape(self) -> List[str]:
        """Node kinds in pre-order; binding must leave this unchanged."""
        return [n.kind for n in walk(self.body)]


# ---------------------------------------------------------------- emission


def role_link(role: str) -> str:
    return f"pl_{role}"


def service_link(service_id: str) -> str:
    return f"pl_{service_id}"


def emit_abstract_bpel(doc: ProcessDocument) -> BpelDocument:
    if doc.behavior is None:
        raise UnsupportedBehavior(f"process {doc.id!r} has no behavior")
    try:
        tree = expand(doc, doc.behavior)
    except ExpansionError as exc:
        raise UnsupportedBehavior(f"{exc.path}: {exc.message}") from None
    if tree.kind != m.SEQUENCE:
        tree = Expanded(m.SEQUENCE, children=(tree,))
    roles = activity_roles(doc)
    links: Dict[str, PartnerLink] = {}
    variables: List[Variable] = []

    def convert(x: Expanded) -> Node:
        if x.kind == m.SEQUENCE:
            return Block("sequence", tuple(convert(c) for c in x.children), x.name)
        if x.kind == m.PARALLEL:
            return Block("flow", tuple(convert(c) for c in x.children), x.name)
        if x.kind == m.EXCLUSIVE:
            return If(
                tuple((cond, convert(b)) for cond, b in x.branches),
                None if x.else_body is None else convert(x.else_body),
            )
        if x.kind == m.INVOKE:
            return invoke_for(x.activity_id)
        raise UnsupportedBehavior(f"cannot map behavior node {x.kind!r}")

    def invoke_for(aid: str) -> Invoke:
        a = doc.activity(aid)
        for suffix, params in (("In", a.inputs), ("Out", a.outputs)):
            variables.append(Variable(f"{aid}{suffix}", ",".join(p.type_name for p in params)))
        in_var, out_var = f"{aid}In", f"{aid}Out"
        if a.is_abstract:
            return Invoke(aid, ABSTRACT_LINK, in_var, out_var, abstract=True)
        role = roles.get(aid)
        if role is None:
            raise UnsupportedBehavior(f"no role performs activity {aid!r}")
        link = role_link(role)
        links.setdefault(link, PartnerLink(link, role=role))
        return Invoke(aid, link, in_var, out_var, operation=aid)

    body = convert(tree)
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise UnsupportedBehavior("an activity is invoked more than once")
    return BpelDocument(
        process_name=doc.name,
        partner_links=tuple(links.values()),
        variables=tuple(variables),
        body=body,
    )


# ---------------------------------------------------------------- selection and binding


@dataclass(frozen=True)
class Binding:
    service_id: str
    operation: str
    endpoint: str
    wsdl_location: str
    interface: Optional[str] = None


BindingSelection = Dict[str, Binding]


def select_top(report: DiscoveryReport, rank: int = 1) -> BindingSelection:
    """Pick the ``rank``-th ranked candidate (1 = best) for every activity."""
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    selection: BindingSelection = {}
    for a in report.activities:
        if len(a.candidates) < rank:
            raise NoCandidate(a.activity_id, rank, len(a.candidates))
        c = sorted(a.candidates, key=lambda c: c.rank or 0)[rank - 1]
        selection[a.activity_id] = Binding(c.service_id, c.operation, c.endpoint, c.wsdl_location, c.interface or None)
    return selection


def service_namespace(service_id: str) -> str:
    return f"urn:wsbind:service:{service_id}"


def bind(b: BpelDocument, selection: BindingSelection) -> BpelDocument:
    """Replace every abstract invoke with a concrete invocation of its selected service."""
    pending = b.abstract_invokes()
    if not pending:
        raise AlreadyBound(f"process {b.process_name!r} has no abstract invokes")
    for inv in pending:
        if inv.name not in selection:
            raise UnboundActivity(f"no service selected for abstract activity {inv.name!r}")
    known = {inv.name for inv in pending}
    for key in sorted(selection):
        if key not in known:
            raise UnknownActivity(f"selection names {key!r}, which is not an abstract invoke")

    links = list(b.partner_links)
    imports = list(b.imports)
    link_names = {pl.name for pl in links}
    import_keys = {(i.namespace, i.location) for i in imports}
    for inv in pending:
        sel = selection[inv.name]
        name = service_link(sel.service_id)
        if name not in link_names:
            links.append(PartnerLink(name, service_id=sel.service_id, endpoint=sel.endpoint))
            link_names.add(name)
        imp = Import(service_namespace(sel.service_id), sel.wsdl_location)
        if (imp.namespace, imp.location) not in import_keys:
            imports.append(imp)
            import_keys.add((imp.namespace, imp.location))

    def rewrite(node: Node) -> Node:
        if isinstance(node, Invoke):
            if not node.abstract:
                return node
            sel = selection[node.name]
            return replace(
                node,
                partner_link=service_link(sel.service_id),
                operation=sel.operation,
                interface=sel.interface,
                abstract=False,
            )
        if isinstance(node, Block):
            return replace(node, children=tuple(rewrite(c) for c in node.children))
        return If(
            tuple((cond, rewrite(body)) for cond, body in node.branches),
            None if node.else_body is None else rewrite(node.else_body),
        )

    return replace(b, imports=tuple(imports), partner_links=tuple(links), body=rewrite(b.body))


# ---------------------------------------------------------------- BPEL markup


def serialize_bpel(b: BpelDocument) -> bytes:
    root = ET.Element("process")
    root.set("name", b.process_name)
    root.set("xmlns", NS_ABSTRACT if b.is_abstract else NS_EXECUTABLE)
    for i in b.imports:
        sub(root, "import", [("namespace", i.namespace), ("location", i.location)])
    if b.partner_links:
        pls = sub(root, "partnerLinks")
        for pl in b.partner_links:
            sub(pls, "partnerLink", [("name", pl.name), ("role", pl.role), ("service", pl.service_id), ("endpoint", pl.endpoint)])
    if b.variables:
        vs = sub(root, "variables")
        for v in b.variables:
            sub(vs, "variable", [("name", v.name), ("type", v.type_name)])
    _write_node(root, b.body)
    return to_bytes(root)


def _write_node(parent: ET.Element, node: Node) -> None:
    if isinstance(node, Invoke):
        sub(
            parent,
            "invoke",
            [
                ("name", node.name),
                ("partnerLink", node.partner_link),
                ("operation", node.operation),
                ("interface", node.interface),
                ("inputVariable", node.input_variable),
                ("outputVariable", node.output_variable),
                ("abstract", "true" if node.abstract else "false"),
            ],
        )
    elif isinstance(node, Block):
        el = sub(parent, node.kind, [("name", node.name)])
        for c in node.children:
            _write_node(el, c)
    else:
        el = sub(parent, "if")
        for i, (cond, body) in enumerate(node.branches):
            target = el if i == 0 else sub(el, "elseif")
            sub(target, "condition").text = cond
            _write_node(target, body)
        if node.else_body is not None:
            _write_node(sub(el, "else"), node.else_body)


def parse_bpel(data) -> BpelDocument:
    root = parse_root(data, "process")
    path = "/process"
    check_children(root, {"import", "partnerLinks", "variables", "sequence", "flow", "if", "invoke"}, path)
    imports, links, variables, bodies = [], [], [], []
    for c in root:
        tag = local(c.tag)
        if tag == "import":
            imports.append(Import(require(c, "namespace", path), require(c, "location", path)))
        elif tag == "partnerLinks":
            check_children(c, {"partnerLink"}, path)
            links.extend(
                PartnerLink(require(p, "name", path), p.get("service"), p.get("endpoint"), p.get("role")) for p in c
            )
        elif tag == "variables":
            check_children(c, {"variable"}, path)
            variables.extend(Variable(require(v, "name", path), require(v, "type", path)) for v in c)
        else:
            bodies.append(_read_node(c, path))
    if len(bodies) != 1:
        raise MalformedDocument("process must contain exactly one activity", path)
    doc = BpelDocument(require(root, "name", path), tuple(imports), tuple(links), tuple(variables), bodies[0])
    _check_bpel(doc)
    return doc


def _read_node(el: ET.Element, path: str) -> Node:
    tag = local(el.tag)
    if tag == "invoke":
        abstract = require(el, "abstract", path)
        if abstract not in ("true", "false"):
            raise MalformedDocument(f"bad abstract flag {abstract!r}", path)
        return Invoke(
            name=require(el, "name", path),
            partner_link=require(el, "partnerLink", path),
            input_variable=require(el, "inputVariable", path),
            output_variable=require(el, "outputVariable", path),
            operation=el.get("operation"),
            interface=el.get("interface"),
            abstract=abstract == "true",
        )
    if tag in ("sequence", "flow"):
        return Block(tag, tuple(_read_node(c, f"{path}/{tag}") for c in el), el.get("name"))
    if tag == "if":
        return _read_if(el, f"{path}/if")
    raise MalformedDocument(f"unsupported element <{tag}>", path)


def _read_if(el: ET.Element, path: str) -> If:
    branches: List[Tuple[str, Node]] = []
    else_body = None
    cond = None
    for c in el:
        tag = local(c.tag)
        if tag == "condition":
            cond = text_of(c)
        elif tag == "elseif":
            inner = list(c)
            if len(inner) != 2 or local(inner[0].tag) != "condition":
                raise MalformedDocument("<elseif> needs a condition and one activity", path)
            branches.append((text_of(inner[0]), _read_node(inner[1], path)))
        elif tag == "else":
            inner = list(c)
            if len(inner) != 1:
                raise MalformedDocument("<else> needs exactly one activity", path)
            else_body = _read_node(inner[0], path)
        else:
            if cond is None:
                raise MalformedDocument("<if> activity before its condition", path)
            branches.insert(0, (cond, _read_node(c, path)))
    if not branches:
        raise MalformedDocument("<if> without a branch", path)
    return If(tuple(branches), else_body)


def _check_bpel(doc: BpelDocument) -> None:
    names = [v.name for v in doc.variables]
    if len(set(names)) != len(names):
        raise MalformedDocument("duplicate variable name", "/process/variables")
    links = {pl.name for pl in doc.partner_links}
    for inv in doc.invokes():
        if inv.abstract != (inv.partner_link == ABSTRACT_LINK):
            raise MalformedDocument(f"invoke {inv.name!r}: abstract flag and partner link disagree", "/process")
        if not inv.abstract and inv.partner_link not in links:
            raise MalformedDocument(f"invoke {inv.name!r} uses undeclared partner link {inv.partner_link!r}", "/process")


# ---------------------------------------------------------------- binding selection files


def serialize_binding(selection: BindingSelection) -> bytes:
    root = ET.Element("binding")
    for aid in sorted(selection):
        s = selection[aid]
        sub(
            root,
            "bind",
            [
                ("activity", aid),
                ("service", s.service_id),
                ("operation", s.operation),
                ("endpoint", s.endpoint),
                ("wsdl", s.wsdl_location),
                ("interface", s.interface),
            ],
        )
    return to_bytes(root)


def parse_binding(data) -> BindingSelection:
    root = parse_root(data, "binding")
    path = "/binding"
    check_children(root, {"bind"}, path)
    selection: BindingSelection = {}
    for b in root:
        aid = require(b, "activity", path)
        if aid in selection:
            raise MalformedDocument(f"activity {aid!r} bound twice", path)
        selection[aid] = Binding(
            require(b, "service", path),
            require(b, "operation", path),
            require(b, "endpoint", path),
            require(b, "wsdl", path),
            b.get("interface"),
        )
    return selection
