"""Markup helpers shared by the process, service, report and BPEL formats."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Iterable, List, Optional, Sequence

from .errors import MalformedDocument
from .model import DataType, Field
from .policy import AlternativePolicy, Assertion, Policy

XML_DECL = '<?xml version="1.0" encoding="UTF-8"?>\n'


def local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_root(data, expected: str) -> ET.Element:
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedDocument(str(exc), "/") from None
    if local(root.tag) != expected:
        raise MalformedDocument(f"expected root <{expected}>, found <{local(root.tag)}>", "/")
    return root


def require(elem: ET.Element, attr: str, path: str) -> str:
    value = elem.get(attr)
    if value is None:
        raise MalformedDocument(f"<{local(elem.tag)}> lacks attribute {attr!r}", path)
    return value


def check_children(elem: ET.Element, allowed: Iterable[str], path: str) -> None:
    allowed = set(allowed)
    for child in elem:
        if local(child.tag) not in allowed:
            raise MalformedDocument(f"unexpected element <{local(child.tag)}>", path)


def text_of(elem: ET.Element) -> str:
    return (elem.text or "").strip()


def sub(parent: ET.Element, tag: str, attrs: Sequence = ()) -> ET.Element:
    """Append a child with attributes in the given order; ``None`` values are skipped."""
    elem = ET.SubElement(parent, tag)
    for key, value in attrs:
        if value is not None:
            elem.set(key, value)
    return elem


def to_bytes(root: ET.Element) -> bytes:
    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode", short_empty_elements=True)
    return (XML_DECL + body + "\n").encode("utf-8")


def parse_types(elem: ET.Element, path: str) -> List[DataType]:
    check_children(elem, {"type"}, path)
    types = []
    for t in elem:
        name = require(t, "name", path)
        tpath = f"{path}/type[{name}]"
        check_children(t, {"field"}, tpath)
        fields = tuple(
            Field(require(f, "name", tpath), require(f, "type", tpath)) for f in t
        )
        types.append(DataType(name, require(t, "kind", tpath), fields))
    return types


def write_types(parent: ET.Element, types: Sequence[DataType]) -> None:
    if not types:
        return
    el = sub(parent, "types")
    for t in types:
        tel = sub(el, "type", [("name", t.name), ("kind", t.kind)])
        for f in t.fields:
            sub(tel, "field", [("name", f.name), ("type", f.type_name)])


def parse_policy(elem: ET.Element, path: str, warnings: Optional[list] = None) -> Policy:
    check_children(elem, {"alternative"}, path)
    alts = []
    for i, alt in enumerate(elem):
        apath = f"{path}/alternative[{i}]"
        check_children(alt, {"assertion"}, apath)
        assertions = []
        for a in alt:
            name = require(a, "name", apath)
            if a.get("optional") is not None and warnings is not None:
                warnings.append(f"{apath}/assertion[{name}]: 'optional' attribute ignored")
            assertions.append(Assertion(name, require(a, "concept", apath)))
        alts.append(AlternativePolicy(tuple(assertions)))
    return Policy(tuple(alts))


def write_policy(parent: ET.Element, policy: Optional[Policy]) -> None:
    if policy is None:
        return
    el = sub(parent, "policy")
    for alt in policy.alternatives:
        ael = sub(el, "alternative")
        for a in alt.assertions:
            sub(ael, "assertion", [("name", a.name), ("concept", a.concept)])
