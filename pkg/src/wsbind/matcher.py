"""Hierarchical functional matching of abstract activities against services.

Stages run in a fixed order and each failure prunes everything after it:

1. business domain vs. the service interface concept;
2. functionality vs. each operation concept;
3. inputs  (every required and every provided input must be paired);
4. outputs (every required output must be paired; extras are fine).

Concepts match when their edge-counting distance is at most ``tau``; parameters
pair up only if their concepts match and the provided data type covers the
required one. Surviving operations are scored by a weighted mean of the stage
similarities and, in :func:`discover`, blended with a policy score.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional, Sequence, Tuple

from . import model as m
from ._injection import best_injection
from .errors import ArityTooLarge, NoFeasibleAssignment
from .model import Activity, DataType, Parameter, ProcessDocument, TypeTable
from .ontology import Distance, Ontology, concept_match_detail
from .policy import (
    DEFAULT_ASSERTION_TAU,
    FAILED,
    NOT_EVALUATED,
    PolicyScore,
    policy_satisfaction,
)
from .registry import OperationDescription, ServiceDescription

DEFAULT_TAU = 3
DEFAULT_POLICY_WEIGHT = 0.3
MAX_ARITY = 8

DOMAIN = "domain"
FUNCTIONALITY = "functionality"
INPUTS = "inputs"
OUTPUTS = "outputs"
STAGES = (DOMAIN, FUNCTIONALITY, INPUTS, OUTPUTS)

PASS = "pass"
FAIL = "fail"

REASON_POLICY = "policy"


def round6(x: float) -> Decimal:
    """Round to six decimals, half-even, on the exact binary value."""
    return Decimal(x).quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN)


def format_score(x: float) -> str:
    return str(round6(x))


@dataclass(frozen=True)
class Weights:
    domain: float = 0.2
    functionality: float = 0.4
    inputs: float = 0.2
    outputs: float = 0.2

    def __post_init__(self) -> None:
        values = self.as_tuple()
        if any(w < 0 or math.isnan(w) for w in values):
            raise ValueError(f"stage weights must be non-negative, got {values}")
        if abs(math.fsum(values) - 1.0) > 1e-9:
            raise ValueError(f"stage weights must sum to 1, got {math.fsum(values)!r}")

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.domain, self.functionality, self.inputs, self.outputs)

    @classmethod
    def parse(cls, text: str) -> "Weights":
        parts = text.split(",")
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated weights, got {text!r}")
        return cls(*(float(p) for p in parts))

    def __str__(self) -> str:
        return ",".join(repr(w) for w in self.as_tuple())


# ---------------------------------------------------------------- data types


def type_covers(required: DataType, provided: DataType, required_table: TypeTable, provided_table: TypeTable) -> bool:
    """True when ``provided`` is equivalent to ``required`` or structurally extends it."""
    if not required.is_record and not provided.is_record:
        return required.kind == provided.kind
    if required.is_record != provided.is_record:
        return False
    offered = {f.name: f.type_name for f in provided.fields}
    for f in required.fields:
        if f.name not in offered:
            return False
        rt = m.resolve_type(f.type_name, required_table)
        pt = m.resolve_type(offered[f.name], provided_table)
        if rt is None or pt is None or not type_covers(rt, pt, required_table, provided_table):
            return False
    return True


def _param_covers(r: Parameter, p: Parameter, rtable: TypeTable, ptable: TypeTable) -> bool:
    rt = m.resolve_type(r.type_name, rtable)
    pt = m.resolve_type(p.type_name, ptable)
    return rt is not None and pt is not None and type_covers(rt, pt, rtable, ptable)


# ---------------------------------------------------------------- parameter assignment


@dataclass(frozen=True)
class Pair:
    required: str
    provided: str
    similarity: float


@dataclass(frozen=True)
class ParameterAssignment:
    pairs: Tuple[Pair, ...] = ()
    mean_similarity: float = 1.0


def assign_parameters(
    required: Sequence[Parameter],
    provided: Sequence[Parameter],
    o: Ontology,
    tau: int,
    direction: str,
    required_types: Optional[TypeTable] = None,
    provided_types: Optional[TypeTable] = None,
) -> ParameterAssignment:
    """Best injective pairing of required into provided parameters.

    For inputs the pairing must also use every provided parameter, since the
    process has to supply all of a service's inputs. Raises
    :class:`NoFeasibleAssignment` when no admissible pairing exists.
    """
    if len(required) > MAX_ARITY or len(provided) > MAX_ARITY:
        raise ArityTooLarge(f"at most {MAX_ARITY} parameters per side, got {len(required)} vs {len(provided)}")
    rtable = required_types or {}
    ptable = provided_types or {}
    if direction == m.INPUT and len(required) != len(provided):
        raise NoFeasibleAssignment(f"{len(required)} required vs {len(provided)} provided inputs")
    if len(required) > len(provided):
        raise NoFeasibleAssignment(f"{len(required)} required outputs, only {len(provided)} provided")
    if not required:
        return ParameterAssignment((), 1.0)
    sims = []
    for r in required:
        row = []
        for p in provided:
            cell = None
            if r.concept is not None and p.concept is not None:
                ok, _, s = concept_match_detail(o, r.concept, p.concept, tau)
                if ok and _param_covers(r, p, rtable, ptable):
                    cell = s
            row.append(cell)
        sims.append(row)
    best = best_injection(sims)
    if best is None:
        raise NoFeasibleAssignment("no admissible pairing of parameters")
    pairs = tuple(Pair(r.name, provided[j].name, s) for r, (j, s) in zip(required, best))
    return ParameterAssignment(pairs, math.fsum(s for _, s in best) / len(required))


# ---------------------------------------------------------------- traces and candidates


@dataclass(frozen=True)
class StageRecord:
    stage: str
    evaluated: bool = False
    verdict: Optional[str] = None
    distance: Optional[Distance] = None
    similarity: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


@dataclass(frozen=True)
class MatchTrace:
    service_id: str
    operation: Optional[str]
    stages: Tuple[StageRecord, ...]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    @property
    def failed_stage(self) -> Optional[str]:
        for s in self.stages:
            if s.verdict == FAIL:
                return s.stage
        return None


@dataclass(frozen=True)
class CandidateMatch:
    activity_id: str
    service_id: str
    operation: str
    interface: str
    endpoint: str
    wsdl_location: str
    domain_similarity: float
    functionality_similarity: float
    input_assignment: ParameterAssignment
    output_assignment: ParameterAssignment
    functional_score: float
    trace: MatchTrace
    policy_score: PolicyScore = NOT_EVALUATED
    total_score: Optional[float] = None
    rank: Optional[int] = None
    reason: Optional[str] = None


@dataclass(frozen=True)
class ServiceMatch:
    """Result of matching one activity against one service."""

    candidates: Tuple[CandidateMatch, ...] = ()
    failures: Tuple[MatchTrace, ...] = ()


def functional_score(weights: Weights, dom: float, fun: float, ins: float, outs: float) -> float:
    w = weights
    return math.fsum((w.domain * dom, w.functionality * fun, w.inputs * ins, w.outputs * outs))


def _concept_stage(stage, o, required, provided, tau) -> StageRecord:
    if required is None or provided is None:
        return StageRecord(stage, True, FAIL)
    ok, d, s = concept_match_detail(o, required, provided, tau)
    return StageRecord(stage, True, PASS if ok else FAIL, d, s)


def _assignment_stage(stage, required, provided, o, tau, direction, rtable, ptable):
    try:
        a = assign_parameters(required, provided, o, tau, direction, rtable, ptable)
    except NoFeasibleAssignment:
        return StageRecord(stage, True, FAIL), None
    return StageRecord(stage, True, PASS, similarity=a.mean_similarity), a


def _skipped(stages: Sequence[str]) -> Tuple[StageRecord, ...]:
    return tuple(StageRecord(s) for s in stages)


def match_activity(
    activity: Activity,
    service: ServiceDescription,
    o: Ontology,
    tau: int = DEFAULT_TAU,
    weights: Weights = Weights(),
    types: Optional[TypeTable] = None,
    full_evaluation: bool = False,
) -> ServiceMatch:
    """Run the staged comparison of ``activity`` against every operation of ``service``.

    With ``full_evaluation`` every stage is computed regardless of earlier
    failures; the candidate set is the same, only the traces differ.
    """
    if activity.kind != m.TASK or not activity.is_abstract:
        raise ValueError(f"activity {activity.id!r} is not an abstract task")
    rtable = types or {}
    ptable = service.type_table()
    domain = _concept_stage(DOMAIN, o, activity.domain, service.interface_concept, tau)
    if not domain.passed and not full_evaluation:
        trace = MatchTrace(service.id, None, (domain,) + _skipped(STAGES[1:]))
        return ServiceMatch((), (trace,))

    candidates, failures = [], []
    for op in service.operations:
        records, ins, outs = _match_operation(activity, op, o, tau, rtable, ptable, domain, full_evaluation)
        trace = MatchTrace(service.id, op.name, records)
        if not trace.passed:
            failures.append(trace)
            continue
        candidates.append(
            CandidateMatch(
                activity_id=activity.id,
                service_id=service.id,
                operation=op.name,
                interface=service.interface_name,
                endpoint=service.endpoint,
                wsdl_location=service.wsdl_location,
                domain_similarity=records[0].similarity,
                functionality_similarity=records[1].similarity,
                input_assignment=ins,
                output_assignment=outs,
                functional_score=functional_score(
                    weights, records[0].similarity, records[1].similarity,
                    ins.mean_similarity, outs.mean_similarity,
                ),
                trace=trace,
            )
        )
    if not domain.passed and not service.operations:
        failures.append(MatchTrace(service.id, None, (domain,) + _skipped(STAGES[1:])))
    return ServiceMatch(tuple(candidates), tuple(failures))


def _match_operation(activity, op: OperationDescription, o, tau, rtable, ptable, domain, full):
    records = [domain]
    fun = _concept_stage(FUNCTIONALITY, o, activity.functionality, op.functionality, tau)
    records.append(fun)
    ins = outs = None
    if fun.passed or full:
        rec, ins = _assignment_stage(INPUTS, activity.inputs, op.inputs, o, tau, m.INPUT, rtable, ptable)
        records.append(rec)
        if rec.passed or full:
            rec, outs = _assignment_stage(OUTPUTS, activity.outputs, op.outputs, o, tau, m.OUTPUT, rtable, ptable)
            records.append(rec)
    records.extend(_skipped(STAGES[len(records):]))
    return tuple(records), ins, outs


# ---------------------------------------------------------------- discovery


@dataclass(frozen=True)
class ActivityReport:
    activity_id: str
    candidates: Tuple[CandidateMatch, ...] = ()
    rejected: Tuple[CandidateMatch, ...] = ()


@dataclass(frozen=True)
class DiscoveryReport:
    process_id: str
    tau: int
    weights: Weights
    policy_weight: float
    assertion_tau: int
    ignore_policy: bool
    activities: Tuple[ActivityReport, ...] = field(default=())

    def activity(self, activity_id: str) -> ActivityReport:
        for a in self.activities:
            if a.activity_id == activity_id:
                return a
        raise KeyError(activity_id)

    @property
    def complete(self) -> bool:
        """True when every abstract activity has at least one ranked candidate."""
        return all(a.candidates for a in self.activities)


def _with_policy(c: CandidateMatch, activity: Activity, service: ServiceDescription, o, policy_weight, assertion_tau, ignore_policy):
    if ignore_policy:
        return replace(c, policy_score=NOT_EVALUATED, total_score=c.functional_score)
    ps = policy_satisfaction(activity.policy, service.policy, o, assertion_tau)
    if ps is FAILED:
        return replace(c, policy_score=FAILED, reason=REASON_POLICY)
    effective = 1.0 if ps is NOT_EVALUATED else ps
    total = math.fsum(((1 - policy_weight) * c.functional_score, policy_weight * effective))
    return replace(c, policy_score=ps, total_score=total)


def rank_candidates(candidates: Sequence[CandidateMatch]) -> Tuple[CandidateMatch, ...]:
    """Descending printed total score, ties broken by (service id, operation)."""
    ordered = sorted(candidates, key=lambda c: (-round6(c.total_score), c.service_id, c.operation))
    return tuple(replace(c, rank=i) for i, c in enumerate(ordered, start=1))


def discover(
    doc: ProcessDocument,
    registry: Sequence[ServiceDescription],
    o: Ontology,
    tau: int = DEFAULT_TAU,
    weights: Weights = Weights(),
    policy_weight: float = DEFAULT_POLICY_WEIGHT,
    ignore_policy: bool = False,
    assertion_tau: int = DEFAULT_ASSERTION_TAU,
    jobs: int = 1,
    full_evaluation: bool = False,
) -> DiscoveryReport:
    """Match every abstract activity of ``doc`` against every registered service."""
    if tau < 0 or assertion_tau < 0:
        raise ValueError("tau and assertion_tau must be non-negative")
    if not 0.0 <= policy_weight <= 1.0:
        raise ValueError("policy_weight must lie in [0, 1]")
    activities = m.abstract_activities(doc)
    table = doc.type_table()
    services = sorted(registry, key=lambda s: s.id)
    work = [(a, s) for a in activities for s in services]

    def run(pair):
        a, s = pair
        return match_activity(a, s, o, tau, weights, table, full_evaluation)

    if jobs > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, work))
    else:
        results = [run(p) for p in work]

    reports = []
    for i, a in enumerate(activities):
        accepted, rejected = [], []
        for k, s in enumerate(services):
            for c in results[i * len(services) + k].candidates:
                c = _with_policy(c, a, s, o, policy_weight, assertion_tau, ignore_policy)
                (rejected if c.reason else accepted).append(c)
        rejected.sort(key=lambda c: (c.service_id, c.operation))
        reports.append(ActivityReport(a.id, rank_candidates(accepted), tuple(rejected)))
    return DiscoveryReport(
        process_id=doc.id,
        tau=tau,
        weights=weights,
        policy_weight=policy_weight,
        assertion_tau=assertion_tau,
        ignore_policy=ignore_policy,
        activities=tuple(reports),
    )
