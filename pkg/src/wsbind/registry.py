"""Semantically annotated service descriptions and registry loading.

A service document exposes one interface whose operations, inputs and outputs
each carry a ``concept`` attribute (the counterpart of a SAWSDL
``modelReference``). Those annotations, plus the optional service policy, are
everything the matcher looks at.
"""
from __future__ import annotations

import os
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

from . import model as m
from ._xml import (
    check_children,
    local,
    parse_policy,
    parse_root,
    parse_types,
    require,
    sub,
    to_bytes,
    write_policy,
    write_types,
)
from .errors import (
    DuplicateServiceId,
    InvariantViolation,
    MissingAnnotation,
    UnresolvedReference,
    WsbindError,
)
from .model import DataType, Parameter, TypeTable
from .ontology import is_valid_iri
from .policy import Policy
from .process import UNRESOLVED, type_violations

SERVICE_SUFFIX = ".service.xml"


@dataclass(frozen=True)
class OperationDescription:
    name: str
    functionality: str
    inputs: Tuple[Parameter, ...] = ()
    outputs: Tuple[Parameter, ...] = ()


@dataclass(frozen=True)
class ServiceDescription:
    id: str
    endpoint: str
    wsdl_location: str
    interface_name: str
    interface_concept: str
    operations: Tuple[OperationDescription, ...] = ()
    types: Tuple[DataType, ...] = ()
    policy: Optional[Policy] = None
    warnings: Tuple[str, ...] = field(default=(), compare=False, repr=False)

    def type_table(self) -> TypeTable:
        return {t.name: t for t in self.types}

    def operation(self, name: str) -> OperationDescription:
        for op in self.operations:
            if op.name == name:
                return op
        raise KeyError(name)


def _annotation(el: ET.Element, path: str) -> str:
    concept = el.get("concept")
    if concept is None:
        raise MissingAnnotation(f"<{local(el.tag)}> lacks a concept annotation", path)
    if not is_valid_iri(concept):
        raise InvariantViolation(f"invalid concept {concept!r}", path)
    return concept


def parse_service(data) -> ServiceDescription:
    root = parse_root(data, "service")
    sid = require(root, "id", "/service")
    path = f"/service[{sid}]"
    check_children(root, {"interface", "types", "policy"}, path)
    interfaces = [c for c in root if local(c.tag) == "interface"]
    if len(interfaces) != 1:
        raise InvariantViolation(f"expected exactly one <interface>, found {len(interfaces)}", path)
    iface = interfaces[0]
    iname = require(iface, "name", path)
    ipath = f"{path}/interface[{iname}]"
    iconcept = _annotation(iface, ipath)
    check_children(iface, {"operation"}, ipath)

    types: List[DataType] = []
    policy = None
    warnings: List[str] = []
    for c in root:
        if local(c.tag) == "types":
            types.extend(parse_types(c, f"{path}/types"))
        elif local(c.tag) == "policy":
            if policy is not None:
                raise InvariantViolation("more than one <policy>", path)
            policy = parse_policy(c, f"{path}/policy", warnings)

    for v in type_violations(types):
        cls = UnresolvedReference if v.code == UNRESOLVED else InvariantViolation
        raise cls(v.message, path + v.path)
    table = {t.name: t for t in types}

    operations = []
    for op_el in iface:
        oname = require(op_el, "name", ipath)
        opath = f"{ipath}/operation[{oname}]"
        if any(op.name == oname for op in operations):
            raise InvariantViolation(f"duplicate operation {oname!r}", opath)
        check_children(op_el, {"input", "output"}, opath)
        params = {m.INPUT: [], m.OUTPUT: []}
        for p_el in op_el:
            direction = local(p_el.tag)
            pname = require(p_el, "name", opath)
            ppath = f"{opath}/{direction}[{pname}]"
            if any(p.name == pname for p in params[direction]):
                raise InvariantViolation("duplicate parameter name", ppath)
            type_name = require(p_el, "type", ppath)
            if m.resolve_type(type_name, table) is None:
                raise UnresolvedReference(f"unknown type {type_name!r}", ppath)
            params[direction].append(Parameter(pname, direction, type_name, _annotation(p_el, ppath)))
        operations.append(
            OperationDescription(
                name=oname,
                functionality=_annotation(op_el, opath),
                inputs=tuple(params[m.INPUT]),
                outputs=tuple(params[m.OUTPUT]),
            )
        )

    if policy is not None:
        if not policy.alternatives or not all(a.assertions for a in policy.alternatives):
            raise InvariantViolation("policy alternatives must be non-empty", f"{path}/policy")
        for alt in policy.alternatives:
            for a in alt.assertions:
                if not is_valid_iri(a.concept):
                    raise InvariantViolation(f"invalid concept {a.concept!r}", f"{path}/policy")

    return ServiceDescription(
        id=sid,
        endpoint=require(root, "endpoint", path),
        wsdl_location=require(root, "wsdl", path),
        interface_name=iname,
        interface_concept=iconcept,
        operations=tuple(operations),
        types=tuple(types),
        policy=policy,
        warnings=tuple(warnings),
    )


def serialize_service(s: ServiceDescription) -> bytes:
    root = ET.Element("service")
    root.set("id", s.id)
    root.set("endpoint", s.endpoint)
    root.set("wsdl", s.wsdl_location)
    write_types(root, s.types)
    iface = sub(root, "interface", [("name", s.interface_name), ("concept", s.interface_concept)])
    for op in s.operations:
        oel = sub(iface, "operation", [("name", op.name), ("concept", op.functionality)])
        for p in op.inputs + op.outputs:
            sub(oel, p.direction, [("name", p.name), ("type", p.type_name), ("concept", p.concept)])
    write_policy(root, s.policy)
    return to_bytes(root)


class RegistryError(WsbindError):
    """A service file failed to parse; wraps the original error with the file name."""

    def __init__(self, filename: str, cause: Exception) -> None:
        self.filename = filename
        self.cause = cause
        super().__init__(f"{filename}: {cause}")


def load_registry(directory: Union[str, os.PathLike], jobs: int = 1) -> List[ServiceDescription]:
    """Parse every ``*.service.xml`` file in ``directory``, sorted by service id."""
    if not Path(directory).is_dir():
        raise FileNotFoundError(f"registry directory not found: {directory}")
    files = sorted(Path(directory).glob("*" + SERVICE_SUFFIX), key=lambda p: p.name)

    def load(path: Path):
        try:
            return parse_service(path.read_bytes())
        except WsbindError as exc:
            return RegistryError(path.name, exc)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(load, files))
    else:
        results = [load(f) for f in files]
    for r in results:
        if isinstance(r, RegistryError):
            raise r
    by_id = {}
    for path, svc in zip(files, results):
        if svc.id in by_id:
            raise DuplicateServiceId(
                f"service id {svc.id!r} defined in both {by_id[svc.id][0]} and {path.name}"
            )
        by_id[svc.id] = (path.name, svc)
    return [by_id[k][1] for k in sorted(by_id)]
