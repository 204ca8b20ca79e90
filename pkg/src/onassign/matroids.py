"""Matroid independence oracles and matchoids built from them."""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import lru_cache

from .errors import InvalidInstance
from .model import Hypergraph, IndependenceSystem


class Matroid(IndependenceSystem):

    def rank(self, elements: Iterable[int] = None) -> int:
        """Size of a maximum independent subset, found greedily."""
        if elements is None:
            elements = range(self.ground_size)
        basis = frozenset()
        for e in sorted(set(elements)):
            if self.can_add(basis, e):
                basis = basis | {e}
        return len(basis)


def rank(matroid: Matroid, elements: Iterable[int] = None) -> int:
    return matroid.rank(elements)


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx > ry:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


class PartitionMatroid(Matroid):
    """Unitary partition matroid: at most one element per part."""

    def __init__(self, parts: Sequence[Iterable[int]]):
        self.parts = [tuple(sorted(int(e) for e in p)) for p in parts]
        if any(not p for p in self.parts):
            raise InvalidInstance("partition matroid parts must be nonempty")
        flat = [e for p in self.parts for e in p]
        if sorted(flat) != list(range(len(flat))):
            raise InvalidInstance("parts must be disjoint and cover 0..n-1")
        self.ground_size = len(flat)
        self.part_of = [0] * self.ground_size
        for i, p in enumerate(self.parts):
            for e in p:
                self.part_of[e] = i

    def is_independent(self, elements) -> bool:
        seen = set()
        for e in elements:
            p = self.part_of[e]
            if p in seen:
                return False
            seen.add(p)
        return True

    def can_add(self, independent, e) -> bool:
        p = self.part_of[e]
        return all(self.part_of[f] != p for f in independent)

    def __repr__(self):
        return f"PartitionMatroid({[list(p) for p in self.parts]})"


class GraphicMatroid(Matroid):
    """Edges of a loopless multigraph; independent means acyclic."""

    def __init__(self, n_vertices: int, edges: Sequence[tuple[int, int]]):
        self.n_vertices = int(n_vertices)
        self.edges = [(int(u), int(v)) for u, v in edges]
        for i, (u, v) in enumerate(self.edges):
            if u == v:
                raise InvalidInstance(f"edge {i} is a loop")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise InvalidInstance(f"edge {i} has an endpoint outside the vertex set")
        self.ground_size = len(self.edges)

    def is_independent(self, elements) -> bool:
        uf = UnionFind(self.n_vertices)
        for e in elements:
            u, v = self.edges[e]
            if not uf.union(u, v):
                return False
        return True

    def __repr__(self):
        return f"GraphicMatroid({self.n_vertices}, {self.edges})"


def _augment(adj, left, match_r, match_l, seen) -> bool:
    for r in adj[left]:
        if r in seen:
            continue
        seen.add(r)
        if r not in match_r or _augment(adj, match_r[r], match_r, match_l, seen):
            match_r[r] = left
            match_l[left] = r
            return True
    return False


def bipartite_matching(adj: Sequence[Sequence[int]], lefts: Iterable[int]) -> dict[int, int] | None:
    """Matching covering every left vertex in ``lefts``, or None.

    Left vertices are processed in increasing id and neighbours are tried in
    increasing id, so the result is a deterministic function of the input.
    """
    match_r: dict[int, int] = {}
    match_l: dict[int, int] = {}
    for left in sorted(set(lefts)):
        if not _augment(adj, left, match_r, match_l, set()):
            return None
    return match_l


class TransversalMatroid(Matroid):
    """Ground set is the left side L; X is independent iff a matching covers X."""

    def __init__(self, n_right: int, adjacency: Sequence[Iterable[int]]):
        self.n_right = int(n_right)
        self.adj = [tuple(sorted(set(int(r) for r in nb))) for nb in adjacency]
        for i, nb in enumerate(self.adj):
            if any(not 0 <= r < self.n_right for r in nb):
                raise InvalidInstance(f"left vertex {i} has a neighbour outside R")
        self.ground_size = len(self.adj)
        self._canon = lru_cache(maxsize=4096)(self._canonical)

    def _canonical(self, x: frozenset):
        return bipartite_matching(self.adj, x)

    def canonical_matching(self, elements) -> dict[int, int] | None:
        """The reproducible covering matching M_X (left -> right), or None."""
        return self._canon(frozenset(elements))

    def is_independent(self, elements) -> bool:
        return self.canonical_matching(elements) is not None

    def __repr__(self):
        return f"TransversalMatroid({self.n_right}, {[list(a) for a in self.adj]})"


class Matchoid(IndependenceSystem):
    """Matroids on overlapping subsets of a common ground set.

    ``components`` is a list of ``(matroid, active)`` where ``active`` lists
    the global ids of the component's ground elements; local element ``j``
    of the matroid is global element ``active[j]``.
    """

    def __init__(self, ground_size: int, components: Sequence[tuple[Matroid, Sequence[int]]]):
        self.ground_size = int(ground_size)
        self.components = []
        self._local = []
        for i, (mat, active) in enumerate(components):
            active = tuple(int(e) for e in active)
            if len(active) != mat.ground_size:
                raise InvalidInstance(f"component {i}: active list does not match matroid size")
            if len(set(active)) != len(active):
                raise InvalidInstance(f"component {i}: repeated active element")
            if any(not 0 <= e < self.ground_size for e in active):
                raise InvalidInstance(f"component {i}: element outside the ground set")
            self.components.append((mat, active))
            self._local.append({e: j for j, e in enumerate(active)})
        self.membership = [[] for _ in range(self.ground_size)]
        for i, (_, active) in enumerate(self.components):
            for e in active:
                self.membership[e].append(i)

    @property
    def ell(self) -> int:
        """Largest number of components any element is active in."""
        return max((len(m) for m in self.membership), default=0)

    def local(self, i: int, e: int) -> int | None:
        return self._local[i].get(e)

    def restrict(self, i: int, elements) -> list[int]:
        """Local ids of ``elements`` that are active in component ``i``."""
        loc = self._local[i]
        return [loc[e] for e in elements if e in loc]

    def is_independent(self, elements) -> bool:
        elements = list(elements)
        return all(mat.is_independent(self.restrict(i, elements))
                   for i, (mat, _) in enumerate(self.components))

    def can_add(self, independent, e) -> bool:
        if e in independent:
            return False
        for i in self.membership[e]:
            mat, _ = self.components[i]
            if not mat.can_add(frozenset(self.restrict(i, independent)), self._local[i][e]):
                return False
        return True

    def __repr__(self):
        return f"Matchoid({self.ground_size}, {self.components})"


def matchoid_is_independent(mc: Matchoid, elements) -> bool:
    return mc.is_independent(elements)


def hypergraph_as_matchoid(hg: Hypergraph) -> Matchoid:
    """One single-part partition matroid per node over its incident edges.

    Nodes of degree zero produce no component.
    """
    comps = []
    for v in range(hg.n_nodes):
        inc = hg.incident(v)
        if inc:
            comps.append((PartitionMatroid([range(len(inc))]), inc))
    return Matchoid(hg.ground_size, comps)
