"""Semantic discovery and binding of services for abstract business processes."""
from .bpel import (
    BpelDocument,
    bind,
    emit_abstract_bpel,
    parse_binding,
    parse_bpel,
    select_top,
    serialize_binding,
    serialize_bpel,
)
from .estimators import ServiceBinder, ServiceMatcher
from .matcher import (
    DiscoveryReport,
    Weights,
    assign_parameters,
    discover,
    match_activity,
    type_covers,
)
from .model import ProcessDocument, abstract_activities
from .ontology import UNREACHABLE, Ontology, concept_match, edge_distance, load_ontology, similarity
from .policy import (
    FAILED,
    NOT_EVALUATED,
    alternative_satisfies,
    assertion_matches,
    normalize,
    policy_satisfaction,
)
from .process import parse_process, serialize_process, validate_process
from .registry import ServiceDescription, load_registry, parse_service, serialize_service
from .report import parse_report, serialize_report

__version__ = "0.1.0"

__all__ = [
    "abstract_activities",
    "alternative_satisfies",
    "assertion_matches",
    "assign_parameters",
    "bind",
    "BpelDocument",
    "concept_match",
    "discover",
    "DiscoveryReport",
    "edge_distance",
    "emit_abstract_bpel",
    "FAILED",
    "load_ontology",
    "load_registry",
    "match_activity",
    "normalize",
    "NOT_EVALUATED",
    "Ontology",
    "parse_binding",
    "parse_bpel",
    "parse_process",
    "parse_report",
    "parse_service",
    "policy_satisfaction",
    "ProcessDocument",
    "select_top",
    "serialize_binding",
    "serialize_bpel",
    "serialize_process",
    "serialize_report",
    "serialize_service",
    "ServiceBinder",
    "ServiceDescription",
    "ServiceMatcher",
    "similarity",
    "type_covers",
    "UNREACHABLE",
    "validate_process",
    "Weights",
]
