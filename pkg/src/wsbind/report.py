"""Discovery report markup and human-readable match traces."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import List, Optional

from ._xml import check_children, local, parse_root, require, sub, to_bytes
from .errors import MalformedDocument
from .matcher import (
    STAGES,
    ActivityReport,
    CandidateMatch,
    DiscoveryReport,
    MatchTrace,
    Pair,
    ParameterAssignment,
    StageRecord,
    ServiceMatch,
    Weights,
    format_score,
)
from .ontology import UNREACHABLE
from .policy import FAILED, NOT_EVALUATED, PolicyScore


def _fmt_policy(p: PolicyScore) -> str:
    return p.value if p in (FAILED, NOT_EVALUATED) else format_score(p)


def _parse_policy_score(text: str, path: str) -> PolicyScore:
    for outcome in (FAILED, NOT_EVALUATED):
        if text == outcome.value:
            return outcome
    return _float(text, path)


def _fmt_distance(d) -> Optional[str]:
    if d is None:
        return None
    return "unreachable" if d == UNREACHABLE else str(int(d))


def _parse_distance(text: Optional[str], path: str):
    if text is None:
        return None
    if text == "unreachable":
        return UNREACHABLE
    try:
        return int(text)
    except ValueError:
        raise MalformedDocument(f"bad distance {text!r}", path) from None


def _float(text: str, path: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise MalformedDocument(f"bad number {text!r}", path) from None


def _int(text: str, path: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise MalformedDocument(f"bad integer {text!r}", path) from None


def _bool(text: str, path: str) -> bool:
    if text not in ("true", "false"):
        raise MalformedDocument(f"bad boolean {text!r}", path)
    return text == "true"


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


# ---------------------------------------------------------------- writing


def serialize_report(report: DiscoveryReport) -> bytes:
    root = ET.Element("matches")
    root.set("process", report.process_id)
    root.set("tau", str(report.tau))
    root.set("weights", str(report.weights))
    root.set("policyWeight", repr(report.policy_weight))
    root.set("assertionTau", str(report.assertion_tau))
    root.set("ignorePolicy", _fmt_bool(report.ignore_policy))
    for a in report.activities:
        ael = sub(root, "activity", [("id", a.activity_id)])
        for c in a.candidates:
            _write_candidate(ael, c)
        rel = sub(ael, "rejected")
        for c in a.rejected:
            _write_candidate(rel, c)
    return to_bytes(root)


def _write_candidate(parent: ET.Element, c: CandidateMatch) -> None:
    el = sub(
        parent,
        "candidate",
        [
            ("service", c.service_id),
            ("operation", c.operation),
            ("functionalScore", format_score(c.functional_score)),
            ("policyScore", _fmt_policy(c.policy_score)),
            ("totalScore", None if c.total_score is None else format_score(c.total_score)),
            ("rank", None if c.rank is None else str(c.rank)),
            ("reason", c.reason),
            ("interface", c.interface),
            ("endpoint", c.endpoint),
            ("wsdl", c.wsdl_location),
        ],
    )
    for s in c.trace.stages:
        sub(
            el,
            "stage",
            [
                ("name", s.stage),
                ("evaluated", _fmt_bool(s.evaluated)),
                ("verdict", s.verdict),
                ("distance", _fmt_distance(s.distance)),
                ("similarity", None if s.similarity is None else format_score(s.similarity)),
            ],
        )
    for direction, assignment in (("input", c.input_assignment), ("output", c.output_assignment)):
        pm = sub(el, "paramMap", [("direction", direction), ("meanSimilarity", format_score(assignment.mean_similarity))])
        for p in assignment.pairs:
            sub(pm, "pair", [("required", p.required), ("provided", p.provided), ("similarity", format_score(p.similarity))])


# ---------------------------------------------------------------- reading


def parse_report(data) -> DiscoveryReport:
    root = parse_root(data, "matches")
    path = "/matches"
    check_children(root, {"activity"}, path)
    try:
        weights = Weights.parse(require(root, "weights", path))
    except ValueError as exc:
        raise MalformedDocument(str(exc), path) from None
    activities = []
    for ael in root:
        aid = require(ael, "id", path)
        apath = f"{path}/activity[{aid}]"
        check_children(ael, {"candidate", "rejected"}, apath)
        candidates, rejected = [], []
        for c in ael:
            if local(c.tag) == "candidate":
                candidates.append(_read_candidate(c, aid, apath))
            else:
                check_children(c, {"candidate"}, f"{apath}/rejected")
                rejected.extend(_read_candidate(r, aid, f"{apath}/rejected") for r in c)
        activities.append(ActivityReport(aid, tuple(candidates), tuple(rejected)))
    return DiscoveryReport(
        process_id=require(root, "process", path),
        tau=_int(require(root, "tau", path), path),
        weights=weights,
        policy_weight=_float(root.get("policyWeight", "0.3"), path),
        assertion_tau=_int(root.get("assertionTau", "1"), path),
        ignore_policy=_bool(root.get("ignorePolicy", "false"), path),
        activities=tuple(activities),
    )


def _read_candidate(el: ET.Element, activity_id: str, parent_path: str) -> CandidateMatch:
    service = require(el, "service", parent_path)
    operation = require(el, "operation", parent_path)
    path = f"{parent_path}/candidate[{service}/{operation}]"
    check_children(el, {"stage", "paramMap"}, path)
    stages = []
    maps = {}
    for child in el:
        if local(child.tag) == "stage":
            stages.append(
                StageRecord(
                    stage=require(child, "name", path),
                    evaluated=_bool(require(child, "evaluated", path), path),
                    verdict=child.get("verdict"),
                    distance=_parse_distance(child.get("distance"), path),
                    similarity=None if child.get("similarity") is None else _float(child.get("similarity"), path),
                )
            )
        else:
            direction = require(child, "direction", path)
            check_children(child, {"pair"}, path)
            pairs = tuple(
                Pair(require(p, "required", path), require(p, "provided", path), _float(require(p, "similarity", path), path))
                for p in child
            )
            maps[direction] = ParameterAssignment(pairs, _float(require(child, "meanSimilarity", path), path))
    if tuple(s.stage for s in stages) != STAGES:
        raise MalformedDocument("candidate must list the four stages in order", path)
    total = el.get("totalScore")
    rank = el.get("rank")
    return CandidateMatch(
        activity_id=activity_id,
        service_id=service,
        operation=operation,
        interface=el.get("interface", ""),
        endpoint=el.get("endpoint", ""),
        wsdl_location=el.get("wsdl", ""),
        domain_similarity=stages[0].similarity if stages[0].similarity is not None else 0.0,
        functionality_similarity=stages[1].similarity if stages[1].similarity is not None else 0.0,
        input_assignment=maps.get("input", ParameterAssignment()),
        output_assignment=maps.get("output", ParameterAssignment()),
        functional_score=_float(require(el, "functionalScore", path), path),
        trace=MatchTrace(service, operation, tuple(stages)),
        policy_score=_parse_policy_score(require(el, "policyScore", path), path),
        total_score=None if total is None else _float(total, path),
        rank=None if rank is None else _int(rank, path),
        reason=el.get("reason"),
    )


# ---------------------------------------------------------------- explain


def explain_lines(activity_id: str, service_id: str, tau: int, result: ServiceMatch) -> List[str]:
    """Line-oriented, stable rendering of every trace in ``result``."""
    lines = [f"activity {activity_id} vs service {service_id} (tau={tau})"]
    traces = [c.trace for c in result.candidates] + list(result.failures)
    traces.sort(key=lambda t: (t.operation is not None, t.operation or ""))
    pairs = {
        c.operation: (c.input_assignment, c.output_assignment) for c in result.candidates
    }
    for t in traces:
        lines.append(f"operation {t.operation if t.operation is not None else '-'}")
        for s in t.stages:
            lines.append("  " + _stage_line(s))
            if t.operation in pairs and s.stage in ("inputs", "outputs"):
                assignment = pairs[t.operation][0 if s.stage == "inputs" else 1]
                for p in assignment.pairs:
                    lines.append(f"    {p.required} -> {p.provided} similarity={format_score(p.similarity)}")
        lines.append(f"  result: {'match' if t.passed else 'no match'}")
    if not traces:
        lines.append("service exposes no operations")
    return lines


def _stage_line(s: StageRecord) -> str:
    if not s.evaluated:
        return f"{s.stage}: skipped"
    parts = [f"{s.stage}: {s.verdict}"]
    if s.distance is not None:
        parts.append(f"distance={_fmt_distance(s.distance)}")
    if s.similarity is not None:
        parts.append(f"similarity={format_score(s.similarity)}")
    return " ".join(parts)
