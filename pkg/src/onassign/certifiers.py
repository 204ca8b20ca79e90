"""Certifiers: a blocking relation on certificates (payload, element).

Node sets and blocking relations are represented intensionally: a
certifier validates a certificate and decides whether one certificate
blocks another, using only the two payloads.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np

from .errors import InvalidCertificate
from .matroids import GraphicMatroid, Matchoid, Matroid, PartitionMatroid, TransversalMatroid
from .model import Hypergraph, IndependenceSystem, independent_sets


@dataclass(frozen=True)
class Certificate:
    payload: Any
    element: Any

    @property
    def is_null(self) -> bool:
        return self.element is None

    def to_json(self):
        p = self.payload
        if isinstance(p, tuple):
            p = [list(x) if isinstance(x, tuple) else x for x in p]
        return {"payload": p, "element": self.element}


NULL = Certificate(None, None)


class Certifier:
    """Base class; subclasses implement ``_check`` and ``_blocks``."""

    system: IndependenceSystem
    k: int | None = None

    def is_certificate(self, c: Certificate) -> bool:
        if c.is_null:
            return False
        try:
            self._check(c)
        except InvalidCertificate:
            return False
        return True

    def validate(self, c: Certificate) -> Certificate:
        if not c.is_null:
            self._check(c)
        return c

    def blocks(self, c1: Certificate, c2: Certificate) -> bool:
        if c1.is_null or c2.is_null:
            return False
        return self._blocks(c1, c2)

    def _check(self, c):
        raise NotImplementedError

    def _blocks(self, c1, c2):
        raise NotImplementedError


class HypergraphCertifier(Certifier):
    """Certificates (e, e), one per edge; blocking means the edges intersect."""

    def __init__(self, hg: Hypergraph):
        self.system = hg
        self.k = hg.k

    def certificate(self, e: int) -> Certificate:
        return Certificate(e, e)

    def _check(self, c):
        if c.payload != c.element or not 0 <= c.element < self.system.ground_size:
            raise InvalidCertificate(f"not a hypergraph certificate: {c}")

    def _blocks(self, c1, c2):
        return bool(self.system.edge_mask(c1.element) & self.system.edge_mask(c2.element))


def hypergraph_certifier(hg: Hypergraph) -> HypergraphCertifier:
    return HypergraphCertifier(hg)


class DirectedCertifier(Certifier):
    """Certifier whose payloads are independent sets containing the element."""

    def certificate(self, independent, e: int) -> Certificate:
        c = Certificate(tuple(sorted(independent)), e)
        self._check(c)
        return c

    def _check(self, c):
        payload = c.payload
        if not isinstance(payload, tuple) or c.element not in payload:
            raise InvalidCertificate(f"element {c.element} not in payload {payload}")
        if not self.system.is_independent(payload):
            raise InvalidCertificate(f"payload {payload} is not independent")


class PartitionCertifier(DirectedCertifier):
    k = 1

    def __init__(self, pm: PartitionMatroid):
        self.system = pm

    def _blocks(self, c1, c2):
        return self.system.part_of[c1.element] == self.system.part_of[c2.element]


def partition_certifier(pm: PartitionMatroid) -> PartitionCertifier:
    return PartitionCertifier(pm)


def orient_forest(gm: GraphicMatroid, forest) -> dict[int, tuple[int, int]]:
    """Orient each tree of the forest away from its smallest vertex.

    Returns ``edge -> (tail, head)``.
    """
    forest = tuple(sorted(forest))
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in forest:
        u, v = gm.edges[e]
        adj.setdefault(u, []).append((v, e))
        adj.setdefault(v, []).append((u, e))
    out: dict[int, tuple[int, int]] = {}
    visited = set()
    for root in sorted(adj):
        if root in visited:
            continue
        visited.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, e in adj[u]:
                if e in out:
                    continue
                if v in visited:
                    raise InvalidCertificate(f"edge set {list(forest)} contains a cycle")
                visited.add(v)
                out[e] = (u, v)
                queue.append(v)
    return out


class GraphicCertifier(DirectedCertifier):
    """(F, e) blocks (F', e') iff the head of e in or(F) is an endpoint of e'."""

    k = 2

    def __init__(self, gm: GraphicMatroid):
        self.system = gm
        self._orient = lru_cache(maxsize=8192)(lambda f: orient_forest(gm, f))

    def orientation(self, forest) -> dict[int, tuple[int, int]]:
        return self._orient(tuple(sorted(forest)))

    def head(self, c: Certificate) -> int:
        return self._orient(c.payload)[c.element][1]

    def _check(self, c):
        payload = c.payload
        if not isinstance(payload, tuple) or c.element not in payload:
            raise InvalidCertificate(f"element {c.element} not in payload {payload}")
        self._orient(payload)

    def _blocks(self, c1, c2):
        return self.head(c1) in self.system.edges[c2.element]


def graphic_certifier(gm: GraphicMatroid) -> GraphicCertifier:
    return GraphicCertifier(gm)


class TransversalCertifier(DirectedCertifier):
    """(X, v) blocks (X', v') iff the canonical matching edges at v and v' meet."""

    k = 2

    def __init__(self, tm: TransversalMatroid):
        self.system = tm

    def matched_edge(self, c: Certificate) -> tuple[int, int]:
        m = self.system.canonical_matching(c.payload)
        if m is None:
            raise InvalidCertificate(f"payload {c.payload} is not independent")
        return c.element, m[c.element]

    def _blocks(self, c1, c2):
        l1, r1 = self.matched_edge(c1)
        l2, r2 = self.matched_edge(c2)
        return l1 == l2 or r1 == r2


def transversal_certifier(tm: TransversalMatroid) -> TransversalCertifier:
    return TransversalCertifier(tm)


def matroid_certifier(matroid: Matroid) -> DirectedCertifier:
    if isinstance(matroid, PartitionMatroid):
        return PartitionCertifier(matroid)
    if isinstance(matroid, GraphicMatroid):
        return GraphicCertifier(matroid)
    if isinstance(matroid, TransversalMatroid):
        return TransversalCertifier(matroid)
    raise TypeError(f"no directed certifier for {type(matroid).__name__}")


class MatchoidCertifier(Certifier):
    """Bundles (I_1, ..., I_l; e) combining one directed certifier per component.

    Payload entries hold global element ids; ``I_i`` is empty exactly when e
    is inactive in component ``i``.
    """

    def __init__(self, mc: Matchoid, component_certifiers=None):
        self.system = mc
        if component_certifiers is None:
            component_certifiers = [matroid_certifier(m) for m, _ in mc.components]
        if len(component_certifiers) != len(mc.components):
            raise ValueError("one certifier per component is required")
        self.parts = list(component_certifiers)
        self.k = max((sum(self.parts[i].k for i in mem) for mem in mc.membership), default=0)

    def local_certificate(self, i: int, c: Certificate) -> Certificate:
        mc = self.system
        return Certificate(tuple(sorted(mc.restrict(i, c.payload[i]))), mc.local(i, c.element))

    def bundle(self, sets, e: int) -> Certificate:
        c = Certificate(tuple(tuple(sorted(s)) for s in sets), e)
        self._check(c)
        return c

    def _check(self, c):
        mc = self.system
        payload, e = c.payload, c.element
        if not isinstance(payload, tuple) or len(payload) != len(mc.components):
            raise InvalidCertificate(f"bundle must have {len(mc.components)} entries")
        if not 0 <= e < mc.ground_size:
            raise InvalidCertificate(f"element {e} outside the ground set")
        for i, (mat, active) in enumerate(mc.components):
            part = payload[i]
            if mc.local(i, e) is None:
                if part:
                    raise InvalidCertificate(f"component {i}: element inactive but set nonempty")
                continue
            if e not in part:
                raise InvalidCertificate(f"component {i}: element {e} missing from its set")
            if any(mc.local(i, f) is None for f in part):
                raise InvalidCertificate(f"component {i}: set uses inactive elements")
            self.parts[i].validate(self.local_certificate(i, c))

    def _blocks(self, c1, c2):
        mc = self.system
        for i in mc.membership[c1.element]:
            if mc.local(i, c2.element) is None:
                continue
            if self.parts[i].blocks(self.local_certificate(i, c1), self.local_certificate(i, c2)):
                return True
        return False


def matchoid_certifier(mc: Matchoid, component_certifiers=None) -> MatchoidCertifier:
    return MatchoidCertifier(mc, component_certifiers)


def verify_certification(cert: Certifier, system: IndependenceSystem, seq) -> bool:
    """True iff no earlier certificate blocks a later one.

    A blocking-free sequence must have distinct elements forming an
    independent set; a violation raises AssertionError since it means the
    certifier itself is broken.
    """
    seq = list(seq)
    for i, j in itertools.combinations(range(len(seq)), 2):
        if cert.blocks(seq[i], seq[j]):
            return False
    elems = [c.element for c in seq]
    if len(set(elems)) != len(elems):
        raise AssertionError(f"certification repeats an element: {elems}")
    if not system.is_independent(elems):
        raise AssertionError(f"certification elements {elems} are not independent")
    return True


def blocking_count(cert: Certifier, independent, probe: Certificate) -> int:
    """Number of e in I such that (I, e) blocks the probe."""
    payload = tuple(sorted(independent))
    return sum(cert.blocks(Certificate(payload, e), probe) for e in payload)


def check_directedness(cert: DirectedCertifier, matroid: Matroid, k: int,
                       trials: int = 2000, rng: np.random.Generator | None = None,
                       exhaustive_limit: int = 6) -> dict:
    """Largest |{e in I: (I, e) blocks (J, f)}| over probed I, J, f."""
    if matroid.ground_size <= exhaustive_limit:
        sets = [s for s in independent_sets(matroid) if s]
        triples = ((i, j, f) for i in sets for j in sets for f in j)
        mode = "exhaustive"
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        triples = (_random_triple(matroid, rng) for _ in range(trials))
        mode = "random"
    worst, witness = 0, None
    for ind, j, f in triples:
        count = blocking_count(cert, ind, Certificate(tuple(j), f))
        if count > worst:
            worst, witness = count, (ind, j, f)
    return {"max_count": worst, "k": k, "holds": worst <= k, "mode": mode, "witness": witness}


def _random_independent(matroid: Matroid, rng) -> tuple[int, ...]:
    order = rng.permutation(matroid.ground_size)
    keep = rng.random(matroid.ground_size) < 0.7
    cur = frozenset()
    for e, ok in zip(order, keep):
        e = int(e)
        if ok and matroid.can_add(cur, e):
            cur = cur | {e}
    return tuple(sorted(cur))


def _random_triple(matroid, rng):
    while True:
        ind = _random_independent(matroid, rng)
        j = _random_independent(matroid, rng)
        if ind and j:
            return ind, j, j[int(rng.integers(len(j)))]
