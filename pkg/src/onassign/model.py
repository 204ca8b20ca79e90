"""Ground sets, weight functions, distributions, assignments and feasibility.

Agents are dense integers ``0..m-1``.  The bottom symbol is ``None``: an
agent mapped to ``None`` is unassigned and always has weight zero.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from .errors import InvalidDistribution, InvalidInstance, ResourceLimit

BOTTOM = None

Assignment = dict  # agent -> element id or BOTTOM


class WeightFunction(Mapping):
    """Sparse nonnegative weights over ground elements; absent keys weigh 0."""

    __slots__ = ("_w", "_hash")

    def __init__(self, entries: Mapping[int, Real] | Iterable[tuple[int, Real]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        w = {}
        for e, v in items:
            if e is BOTTOM:
                raise InvalidInstance("bottom cannot carry a weight")
            if int(e) != e or e < 0:
                raise InvalidInstance(f"bad element id {e!r}")
            if v < 0:
                raise InvalidInstance(f"negative weight {v!r} on element {e}")
            if v != 0:
                w[int(e)] = v
        self._w = w
        self._hash = None

    def __call__(self, e) -> Real:
        if e is BOTTOM:
            return 0
        return self._w.get(e, 0)

    def __getitem__(self, e):
        return self._w[e]

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)

    def support(self) -> list[int]:
        return sorted(self._w)

    def __eq__(self, other):
        if isinstance(other, WeightFunction):
            return self._w == other._w
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._w.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{e}: {self._w[e]}" for e in sorted(self._w))
        return f"WeightFunction({{{body}}})"

    def to_float(self) -> WeightFunction:
        return WeightFunction({e: float(v) for e, v in self._w.items()})


ZERO = WeightFunction()


@dataclass(frozen=True)
class WeightDistribution:
    """Finite-support distribution over weight functions.

    Probabilities are exact rationals summing to one.
    """

    atoms: tuple[tuple[Fraction, WeightFunction], ...]

    def __post_init__(self):
        if not self.atoms:
            raise InvalidDistribution("distribution has no atoms")
        atoms = []
        for p, wf in self.atoms:
            p = Fraction(p)
            if p < 0:
                raise InvalidDistribution(f"negative probability {p}")
            if not isinstance(wf, WeightFunction):
                wf = WeightFunction(wf)
            atoms.append((p, wf))
        if sum(p for p, _ in atoms) != 1:
            raise InvalidDistribution("probabilities do not sum to 1")
        object.__setattr__(self, "atoms", tuple(atoms))
        cdf = np.cumsum([float(p) for p, _ in atoms])
        cdf[-1] = 1.0
        object.__setattr__(self, "_cdf", cdf)

    @classmethod
    def uniform(cls, wfs) -> WeightDistribution:
        wfs = list(wfs)
        if not wfs:
            raise InvalidDistribution("distribution has no atoms")
        p = Fraction(1, len(wfs))
        return cls(tuple((p, wf) for wf in wfs))

    @classmethod
    def point(cls, wf) -> WeightDistribution:
        return cls(((Fraction(1), wf),))

    def sample(self, rng: np.random.Generator) -> WeightFunction:
        if len(self.atoms) == 1:
            return self.atoms[0][1]
        i = int(np.searchsorted(self._cdf, rng.random(), side="right"))
        return self.atoms[min(i, len(self.atoms) - 1)][1]

    def sample_indices(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(self._cdf, rng.random(size), side="right")
        return np.minimum(idx, len(self.atoms) - 1)

    def support_elements(self) -> set[int]:
        out = set()
        for _, wf in self.atoms:
            out.update(wf)
        return out


class IndependenceSystem:
    """Downward-closed family of subsets of ``range(ground_size)``."""

    ground_size: int

    def is_independent(self, elements: Iterable[int]) -> bool:
        raise NotImplementedError

    def can_add(self, independent: frozenset, e: int) -> bool:
        """Whether ``independent | {e}`` is independent, for independent input."""
        return e not in independent and self.is_independent(independent | {e})

    def check_elements(self, elements: Iterable[int]) -> None:
        for e in elements:
            if not 0 <= e < self.ground_size:
                raise InvalidInstance(f"element {e} outside ground set of size {self.ground_size}")


class Hypergraph(IndependenceSystem):
    """Independent sets are matchings: pairwise-disjoint edge sets."""

    def __init__(self, n_nodes: int, edges: Iterable[Iterable[int]]):
        self.n_nodes = int(n_nodes)
        self.edges = [frozenset(int(v) for v in e) for e in edges]
        for i, e in enumerate(self.edges):
            if not e:
                raise InvalidInstance(f"edge {i} is empty")
            if min(e) < 0 or max(e) >= self.n_nodes:
                raise InvalidInstance(f"edge {i} has a node outside 0..{self.n_nodes - 1}")
        self.ground_size = len(self.edges)
        self.k = max((len(e) for e in self.edges), default=0)
        self._masks = [sum(1 << v for v in e) for e in self.edges]

    def edge_nodes(self, e: int) -> frozenset:
        return self.edges[e]

    def edge_mask(self, e: int) -> int:
        return self._masks[e]

    def incident(self, v: int) -> list[int]:
        """Edges containing node ``v`` (the set delta(v))."""
        return [i for i, e in enumerate(self.edges) if v in e]

    def is_independent(self, elements) -> bool:
        seen = 0
        for e in elements:
            m = self.edge_mask(e)
            if seen & m:
                return False
            seen |= m
        return True

    def can_add(self, independent, e) -> bool:
        if e in independent:
            return False
        m = self.edge_mask(e)
        return all(not (self.edge_mask(f) & m) for f in independent)

    def __repr__(self):
        return f"Hypergraph(n_nodes={self.n_nodes}, edges={[sorted(e) for e in self.edges]})"


def _assigned(asg: Mapping) -> list[int]:
    return [e for e in asg.values() if e is not BOTTOM]


def is_feasible(system: IndependenceSystem, asg: Mapping, n_agents: int | None = None) -> bool:
    """Conditions (I) injectivity on non-bottom values and (II) independence."""
    if n_agents is not None:
        bad = [a for a in asg if not 0 <= a < n_agents]
        if bad:
            raise InvalidInstance(f"unknown agents {bad}")
    elems = _assigned(asg)
    system.check_elements(elems)
    if len(set(elems)) != len(elems):
        return False
    return system.is_independent(elems)


def assignment_value(profile: Mapping, asg: Mapping):
    missing = [a for a in asg if a not in profile]
    if missing:
        raise InvalidInstance(f"assignment mentions agents {missing} absent from the profile")
    return sum((profile[a](e) for a, e in sorted(asg.items())), 0)


def sample_profile(dists: Mapping[int, WeightDistribution], rng: np.random.Generator) -> dict:
    """Draw one weight function per agent, independently, in agent-id order."""
    return {a: dists[a].sample(rng) for a in sorted(dists)}


def profile_to_float(profile: Mapping) -> dict:
    return {a: wf.to_float() for a, wf in profile.items()}


def independent_sets(system: IndependenceSystem, universe: Iterable[int] | None = None,
                     limit: int | None = None) -> list[tuple[int, ...]]:
    """All independent subsets of ``universe`` as sorted tuples, smallest first.

    Enumerates by extending independent sets with larger ids only, which is
    complete because the family is downward closed.
    """
    elems = sorted(set(range(system.ground_size) if universe is None else universe))
    out = [()]
    frontier = [((), frozenset(), -1)]
    while frontier:
        nxt = []
        for tup, fs, last in frontier:
            for e in elems:
                if e <= last or not system.can_add(fs, e):
                    continue
                t = tup + (e,)
                out.append(t)
                nxt.append((t, fs | {e}, e))
                if limit is not None and len(out) > limit:
                    raise ResourceLimit(f"more than {limit} independent sets")
        frontier = nxt
    return out
