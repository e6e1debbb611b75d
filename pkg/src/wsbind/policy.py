"""Non-functional policies as flat choices among alternatives of assertions.

A required policy is satisfied by a provider when some required alternative is
covered by some provided alternative: every required assertion is matched to a
distinct provided assertion whose concept lies within ``assertion_tau`` edges.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from ._injection import best_injection
from .ontology import Ontology, edge_distance, similarity


class PolicyOutcome(enum.Enum):
    FAILED = "failed"
    NOT_EVALUATED = "not-evaluated"

    def __str__(self) -> str:
        return self.value


FAILED = PolicyOutcome.FAILED
NOT_EVALUATED = PolicyOutcome.NOT_EVALUATED

PolicyScore = Union[float, PolicyOutcome]

DEFAULT_ASSERTION_TAU = 1


@dataclass(frozen=True, order=True)
class Assertion:
    name: str
    concept: str


@dataclass(frozen=True)
class AlternativePolicy:
    assertions: Tuple[Assertion, ...]


@dataclass(frozen=True)
class Policy:
    alternatives: Tuple[AlternativePolicy, ...]


def _sorted_assertions(alt: AlternativePolicy) -> Tuple[Assertion, ...]:
    return tuple(sorted(set(alt.assertions)))


def normalize(p: Policy) -> Policy:
    """Return the canonical form: sorted, duplicate-free assertions and alternatives."""
    alts = {_sorted_assertions(a) for a in p.alternatives}
    return Policy(tuple(AlternativePolicy(a) for a in sorted(alts)))


def assertion_matches(
    required: Assertion, provided: Assertion, o: Ontology, tau: int = DEFAULT_ASSERTION_TAU
) -> Tuple[bool, float]:
    d = edge_distance(o, required.concept, provided.concept)
    return d <= tau, similarity(d)


def alternative_satisfies(
    required: AlternativePolicy,
    provided: AlternativePolicy,
    o: Ontology,
    tau: int = DEFAULT_ASSERTION_TAU,
) -> PolicyScore:
    """Score how well ``provided`` covers ``required``, or ``FAILED``.

    The score is the mean similarity of the best injection of required into
    provided assertions, scaled by ``|required| / |provided|`` so that
    providers asserting more than was asked for rank lower.
    """
    req = _sorted_assertions(required)
    prov = _sorted_assertions(provided)
    if not req or not prov:
        raise ValueError("policy alternatives must contain at least one assertion")
    if len(req) > len(prov):
        return FAILED
    sims = []
    for r in req:
        row = []
        for p in prov:
            ok, s = assertion_matches(r, p, o, tau)
            row.append(s if ok else None)
        sims.append(row)
    best = best_injection(sims)
    if best is None:
        return FAILED
    return (math.fsum(s for _, s in best) / len(req)) * (len(req) / len(prov))


def policy_satisfaction(
    required: Optional[Policy],
    provided: Optional[Policy],
    o: Ontology,
    tau: int = DEFAULT_ASSERTION_TAU,
) -> PolicyScore:
    """Best score over all (required, provided) alternative pairs.

    ``NOT_EVALUATED`` when nothing is required; ``FAILED`` when a policy is
    required but the provider has none or no pair is satisfiable.
    """
    if required is None:
        return NOT_EVALUATED
    if provided is None:
        return FAILED
    best: PolicyScore = FAILED
    for r in normalize(required).alternatives:
        for p in normalize(provided).alternatives:
            score = alternative_satisfies(r, p, o, tau)
            if score is FAILED:
                continue
            if best is FAILED or score > best:
                best = score
    return best
