"""Estimator-style front ends for discovery and binding.

``ServiceMatcher`` learns a registry and an ontology in ``fit`` and ranks
services for each abstract activity of a process in ``predict``.
``ServiceBinder`` learns a binding selection from a discovery report and
rewrites abstract BPEL documents in ``transform``. Both expose their
configuration through ``get_params``/``set_params``.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, List, Union

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bpel import BpelDocument, bind, emit_abstract_bpel, select_top
from .matcher import (
    DEFAULT_POLICY_WEIGHT,
    DEFAULT_TAU,
    DiscoveryReport,
    ServiceMatch,
    Weights,
    discover,
    match_activity,
)
from .model import ProcessDocument
from .ontology import Ontology, load_ontology
from .policy import DEFAULT_ASSERTION_TAU
from .process import parse_process
from .registry import ServiceDescription, load_registry, parse_service

PathLike = Union[str, os.PathLike]


def check_process(X) -> ProcessDocument:
    """Accept a parsed document, raw markup bytes, or a path to a process file."""
    if isinstance(X, ProcessDocument):
        return X
    if isinstance(X, bytes):
        return parse_process(X)
    if isinstance(X, (str, os.PathLike)):
        return parse_process(Path(X).read_bytes())
    raise TypeError(f"expected a ProcessDocument, bytes or a path, got {type(X).__name__}")


def check_registry(services) -> List[ServiceDescription]:
    """Accept a registry directory or an iterable of descriptions / raw documents."""
    if isinstance(services, (str, os.PathLike)):
        return load_registry(services)
    out = []
    for s in services:
        if isinstance(s, bytes):
            s = parse_service(s)
        if not isinstance(s, ServiceDescription):
            raise TypeError(f"expected ServiceDescription, got {type(s).__name__}")
        out.append(s)
    ids = [s.id for s in out]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate service ids in registry")
    return sorted(out, key=lambda s: s.id)


def check_ontology(o) -> Ontology:
    if isinstance(o, Ontology):
        return o
    if isinstance(o, bytes):
        return load_ontology(o)
    if isinstance(o, (str, os.PathLike)):
        return load_ontology(Path(o).read_bytes())
    raise TypeError(f"expected an Ontology, bytes or a path, got {type(o).__name__}")


def _check_non_negative_int(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


class ServiceMatcher(BaseEstimator):
    """Rank registered services against the abstract activities of a process.

    Parameters
    ----------
    tau : int
        Largest edge-counting distance at which two concepts still match.
    weights : tuple of 4 floats
        Domain, functionality, inputs and outputs weights; must sum to 1.
    policy_weight : float
        Share of the total score given to policy satisfaction.
    assertion_tau : int
        Matching threshold for policy assertions.
    ignore_policy : bool
        Rank on functional score alone.
    n_jobs : int
        Worker threads used for matching; results do not depend on it.
    full_evaluation : bool
        Evaluate every stage even after a failure (debugging aid).
    """

    def __init__(
        self,
        tau: int = DEFAULT_TAU,
        weights=(0.2, 0.4, 0.2, 0.2),
        policy_weight: float = DEFAULT_POLICY_WEIGHT,
        assertion_tau: int = DEFAULT_ASSERTION_TAU,
        ignore_policy: bool = False,
        n_jobs: int = 1,
        full_evaluation: bool = False,
    ):
        self.tau = tau
        self.weights = weights
        self.policy_weight = policy_weight
        self.assertion_tau = assertion_tau
        self.ignore_policy = ignore_policy
        self.n_jobs = n_jobs
        self.full_evaluation = full_evaluation

    def _validate_params(self) -> Weights:
        _check_non_negative_int("tau", self.tau)
        _check_non_negative_int("assertion_tau", self.assertion_tau)
        if not 0.0 <= float(self.policy_weight) <= 1.0:
            raise ValueError(f"policy_weight must lie in [0, 1], got {self.policy_weight!r}")
        if isinstance(self.n_jobs, bool) or not isinstance(self.n_jobs, int) or self.n_jobs < 1:
            raise ValueError(f"n_jobs must be a positive integer, got {self.n_jobs!r}")
        w = self.weights
        if isinstance(w, Weights):
            return w
        if isinstance(w, str):
            return Weights.parse(w)
        return Weights(*w)

    def fit(self, services: Union[PathLike, Iterable[ServiceDescription]], ontology) -> "ServiceMatcher":
        self.weights_ = self._validate_params()
        self.services_ = tuple(check_registry(services))
        self.ontology_ = check_ontology(ontology)
        self.n_services_ = len(self.services_)
        return self

    def predict(self, X) -> DiscoveryReport:
        check_is_fitted(self, "services_")
        doc = check_process(X)
        return discover(
            doc,
            self.services_,
            self.ontology_,
            tau=self.tau,
            weights=self.weights_,
            policy_weight=float(self.policy_weight),
            ignore_policy=self.ignore_policy,
            assertion_tau=self.assertion_tau,
            jobs=self.n_jobs,
            full_evaluation=self.full_evaluation,
        )

    def explain(self, X, activity_id: str, service_id: str) -> ServiceMatch:
        check_is_fitted(self, "services_")
        doc = check_process(X)
        service = next((s for s in self.services_ if s.id == service_id), None)
        if service is None:
            raise KeyError(service_id)
        return match_activity(
            doc.activity(activity_id), service, self.ontology_, self.tau,
            self.weights_, doc.type_table(), self.full_evaluation,
        )


class ServiceBinder(BaseEstimator):
    """Bind abstract BPEL documents to the ``rank``-th best discovered services."""

    def __init__(self, rank: int = 1):
        self.rank = rank

    def fit(self, report: DiscoveryReport, y=None) -> "ServiceBinder":
        if isinstance(self.rank, bool) or not isinstance(self.rank, int) or self.rank < 1:
            raise ValueError(f"rank must be a positive integer, got {self.rank!r}")
        if not isinstance(report, DiscoveryReport):
            raise TypeError(f"expected a DiscoveryReport, got {type(report).__name__}")
        self.selection_ = select_top(report, self.rank)
        return self

    def transform(self, X) -> BpelDocument:
        check_is_fitted(self, "selection_")
        if not isinstance(X, BpelDocument):
            X = emit_abstract_bpel(check_process(X))
        return bind(X, self.selection_)
