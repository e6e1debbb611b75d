"""Concept graphs and edge-counting semantic distance.

An :class:`Ontology` is an undirected, unlabeled graph over absolute concept
identifiers. The distance between two concepts is the number of arcs on the
shortest path joining them; :data:`UNREACHABLE` (``math.inf``) stands for
"no path", so that threshold comparisons and ``1 / (1 + d)`` work unchanged.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Tuple, Union

from .errors import InvalidIri, MalformedLine

UNREACHABLE = math.inf

Distance = Union[int, float]

_WS = re.compile(r"\s")


def is_valid_iri(iri: str) -> bool:
    if not iri or _WS.search(iri):
        return False
    scheme, sep, rest = iri.partition("://")
    return bool(sep and scheme and rest)


def check_iri(iri: str) -> str:
    if not is_valid_iri(iri):
        raise InvalidIri(f"not an absolute identifier: {iri!r}")
    return iri


@dataclass(frozen=True)
class Ontology:
    concepts: FrozenSet[str] = frozenset()
    edges: FrozenSet[FrozenSet[str]] = frozenset()
    _adjacency: Mapping[str, Tuple[str, ...]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        adj: Dict[str, list] = {c: [] for c in self.concepts}
        for edge in self.edges:
            if len(edge) != 2:
                raise ValueError(f"self-edge or malformed edge: {sorted(edge)}")
            a, b = sorted(edge)
            if a not in adj or b not in adj:
                raise ValueError(f"edge {a} -- {b} references an unknown concept")
            adj[a].append(b)
            adj[b].append(a)
        frozen = {c: tuple(sorted(ns)) for c, ns in adj.items()}
        object.__setattr__(self, "_adjacency", frozen)

    @classmethod
    def from_edges(cls, pairs: Iterable[Tuple[str, str]], concepts: Iterable[str] = ()) -> "Ontology":
        nodes = set(concepts)
        edges = set()
        for a, b in pairs:
            nodes.update((a, b))
            if a != b:
                edges.add(frozenset((a, b)))
        return cls(frozenset(nodes), frozenset(edges))

    def neighbors(self, concept: str) -> Tuple[str, ...]:
        return self._adjacency.get(concept, ())

    def __contains__(self, concept: object) -> bool:
        return concept in self._adjacency

    def __len__(self) -> int:
        return len(self.concepts)

    def distance(self, a: str, b: str) -> Distance:
        return edge_distance(self, a, b)


def load_ontology(data: Union[bytes, str]) -> Ontology:
    """Parse a line-oriented edge list (``<iri> -- <iri>`` per line)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    pairs = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(" -- ")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise MalformedLine(lineno, raw)
        a, b = (check_iri(p.strip()) for p in parts)
        if a == b:
            raise MalformedLine(lineno, raw)
        pairs.append((a, b))
    return Ontology.from_edges(pairs)


def edge_distance(o: Ontology, a: str, b: str) -> Distance:
    """Number of arcs on the shortest path between ``a`` and ``b`` in ``o``."""
    if a == b:
        return 0
    if a not in o or b not in o:
        return UNREACHABLE
    # bidirectional BFS: expand the smaller frontier one full layer at a time
    dist_a = {a: 0}
    dist_b = {b: 0}
    front_a = deque([a])
    front_b = deque([b])
    while front_a and front_b:
        if len(front_a) <= len(front_b):
            found = _expand_layer(o, front_a, dist_a, dist_b)
        else:
            found = _expand_layer(o, front_b, dist_b, dist_a)
        if found is not None:
            return found
    return UNREACHABLE


def _expand_layer(o, frontier, seen, other):
    best = None
    for _ in range(len(frontier)):
        node = frontier.popleft()
        for nxt in o.neighbors(node):
            if nxt in other:
                total = seen[node] + 1 + other[nxt]
                if best is None or total < best:
                    best = total
            if nxt not in seen:
                seen[nxt] = seen[node] + 1
                frontier.append(nxt)
    return best


def similarity(d: Distance) -> float:
    """Map a distance to a score: 1 for identical concepts, 0 for unreachable."""
    if d == UNREACHABLE:
        return 0.0
    if d < 0:
        raise ValueError("distance must be non-negative")
    return 1.0 / (1 + d)


def concept_match(o: Ontology, required: str, provided: str, tau: int) -> Tuple[bool, float]:
    d = edge_distance(o, required, provided)
    return d <= tau, similarity(d)


def concept_match_detail(o: Ontology, required: str, provided: str, tau: int):
    """Like :func:`concept_match` but also returns the raw distance."""
    d = edge_distance(o, required, provided)
    return d <= tau, d, similarity(d)
