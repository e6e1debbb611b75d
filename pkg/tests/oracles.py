"""Independent brute-force oracles and random instance generators.

Nothing here calls the search code under test: distances come from a naive
layer-by-layer scan of the raw edge list, and optima from full enumeration
with ``itertools.permutations``.
"""
import itertools
import math

from wsbind.model import Parameter
from wsbind.ontology import Ontology
from wsbind.policy import AlternativePolicy, Assertion, Policy

NS = "http://example.org/t#"


def concept(i):
    return f"{NS}c{i}"


def bfs_oracle(nodes, edges, source):
    """Distances from ``source`` by repeatedly scanning every edge (no adjacency lists)."""
    dist = {source: 0}
    layer = 0
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if dist.get(x) == layer and y not in dist:
                    dist[y] = layer + 1
                    changed = True
        layer += 1
    return dist


def oracle_distance(nodes, edges, a, b):
    if a == b:
        return 0
    if a not in nodes or b not in nodes:
        return math.inf
    return bfs_oracle(nodes, edges, a).get(b, math.inf)


def random_graph(rng, max_nodes=50, max_edges=150):
    n = rng.randint(1, max_nodes)
    nodes = [concept(i) for i in range(n)]
    possible = n * (n - 1) // 2
    m = rng.randint(0, min(max_edges, possible))
    edges = set()
    while len(edges) < m:
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    edge_list = [(nodes[a], nodes[b]) for a, b in sorted(edges)]
    return nodes, edge_list


def ontology_of(nodes, edges):
    return Ontology.from_edges(edges, concepts=nodes)


def random_params(rng, n, direction, n_concepts, types=("decimal", "string")):
    return [
        Parameter(f"{direction[0]}{i}", direction, rng.choice(types), concept(rng.randrange(n_concepts)))
        for i in range(n)
    ]


def assignment_oracle(required, provided, nodes, edges, tau, direction):
    """Best mean similarity over every injection, or None when infeasible."""
    if direction == "input" and len(required) != len(provided):
        return None
    if len(required) > len(provided):
        return None
    if not required:
        return 1.0
    best = None
    for perm in itertools.permutations(range(len(provided)), len(required)):
        sims = []
        for r, j in zip(required, perm):
            p = provided[j]
            d = oracle_distance(nodes, edges, r.concept, p.concept)
            if d > tau or r.type_name != p.type_name:
                break
            sims.append(1.0 / (1 + d))
        else:
            mean = math.fsum(sims) / len(required)
            if best is None or mean > best:
                best = mean
    return best


def random_policy(rng, n_concepts, max_alts=4, max_assertions=4, names=("A", "B", "C")):
    alts = []
    for _ in range(rng.randint(1, max_alts)):
        alts.append(
            AlternativePolicy(
                tuple(
                    Assertion(rng.choice(names), concept(rng.randrange(n_concepts)))
                    for _ in range(rng.randint(1, max_assertions))
                )
            )
        )
    return Policy(tuple(alts))


def policy_oracle(required, provided, nodes, edges, tau=1):
    """'not-evaluated' / 'failed' / best score by enumerating alternatives and injections."""
    if required is None:
        return "not-evaluated"
    if provided is None:
        return "failed"
    best = None
    for ralt in {frozenset(a.assertions) for a in required.alternatives}:
        for palt in {frozenset(a.assertions) for a in provided.alternatives}:
            req, prov = sorted(ralt), sorted(palt)
            for perm in itertools.permutations(range(len(prov)), len(req)):
                sims = []
                for r, j in zip(req, perm):
                    d = oracle_distance(nodes, edges, r.concept, prov[j].concept)
                    if d > tau:
                        break
                    sims.append(1.0 / (1 + d))
                else:
                    score = (math.fsum(sims) / len(req)) * (len(req) / len(prov))
                    if best is None or score > best:
                        best = score
    return "failed" if best is None else best


def random_activity(rng, n_concepts, aid="a"):
    from wsbind import model as m
    from wsbind.model import Activity

    return Activity(
        aid,
        binding=m.ABSTRACT,
        domain=concept(rng.randrange(n_concepts)),
        functionality=concept(rng.randrange(n_concepts)),
        inputs=tuple(random_params(rng, rng.randint(0, 3), m.INPUT, n_concepts)),
        outputs=tuple(random_params(rng, rng.randint(0, 3), m.OUTPUT, n_concepts)),
        policy=random_policy(rng, n_concepts, 2, 2) if rng.random() < 0.5 else None,
    )


def random_service(rng, n_concepts, sid="s"):
    from wsbind import model as m
    from wsbind.registry import OperationDescription, ServiceDescription

    ops = tuple(
        OperationDescription(
            f"op{k}",
            concept(rng.randrange(n_concepts)),
            tuple(random_params(rng, rng.randint(0, 3), m.INPUT, n_concepts)),
            tuple(random_params(rng, rng.randint(0, 4), m.OUTPUT, n_concepts)),
        )
        for k in range(rng.randint(0, 3))
    )
    return ServiceDescription(
        sid, f"http://{sid}.example/", f"http://{sid}.example/wsdl", f"I{sid}",
        concept(rng.randrange(n_concepts)), ops,
        policy=random_policy(rng, n_concepts, 2, 2) if rng.random() < 0.7 else None,
    )
