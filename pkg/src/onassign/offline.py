"""Exact offline oracles for the assignment problem and its LP relaxations."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import lp
from .errors import InternalConsistencyError, InvalidInput, ResourceLimit
from .matroids import Matchoid, Matroid
from .model import BOTTOM, Hypergraph, IndependenceSystem

DEFAULT_BRUTEFORCE_BUDGET = 4000
DEFAULT_COMPONENT_LIMIT = 12


def offline_opt_bruteforce(system: IndependenceSystem, profile, budget: int = DEFAULT_BRUTEFORCE_BUDGET):
    """Maximum weight feasible assignment by branch and bound.

    Agents are explored in id order, each trying bottom first and then its
    positive-weight elements in id order; a candidate replaces the incumbent
    only when strictly better, so the returned assignment is the
    lexicographically smallest maximiser (bottom before any element).
    """
    agents = sorted(profile)
    options = [[e for e in profile[a].support() if profile[a][e] > 0] for a in agents]
    widest = max((len(o) for o in options), default=0)
    if len(agents) * widest > budget:
        raise ResourceLimit(f"{len(agents)} agents x support {widest} exceeds budget {budget}")
    for opts in options:
        system.check_elements(opts)
    top = [max((profile[a][e] for e in opts), default=0) for a, opts in zip(agents, options)]
    suffix = [0] * (len(agents) + 1)
    for i in range(len(agents) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + top[i]

    lower = _greedy_value(system, profile, agents, options)
    best_val = None
    best_choice = None
    choice = [BOTTOM] * len(agents)

    def dfs(i, used: frozenset, val):
        nonlocal best_val, best_choice
        bound = val + suffix[i]
        if bound < lower or (best_val is not None and bound <= best_val):
            return
        if i == len(agents):
            best_val, best_choice = val, list(choice)
            return
        choice[i] = BOTTOM
        dfs(i + 1, used, val)
        w = profile[agents[i]]
        for e in options[i]:
            if system.can_add(used, e):
                choice[i] = e
                dfs(i + 1, used | {e}, val + w[e])
        choice[i] = BOTTOM

    dfs(0, frozenset(), 0)
    if best_choice is None:
        raise InternalConsistencyError("branch and bound lost the greedy solution")
    asg = dict(zip(agents, best_choice))
    return asg, best_val


def _greedy_value(system, profile, agents, options):
    pairs = sorted(((profile[a][e], a, e) for a, opts in zip(agents, options) for e in opts),
                   key=lambda t: (-t[0], t[1], t[2]))
    used, taken, val = frozenset(), set(), 0
    for w, a, e in pairs:
        if a not in taken and system.can_add(used, e):
            used = used | {e}
            taken.add(a)
            val += w
    return val


def offline_opt_matroid(matroid: Matroid, profile, budget: int = DEFAULT_BRUTEFORCE_BUDGET):
    """Matroid assignment optimum (the oracle behind the directed sampler)."""
    return offline_opt_bruteforce(matroid, profile, budget)


@dataclass
class LPSolution:
    x: dict            # (agent, element or BOTTOM) -> value
    objective: object
    y: dict = field(default_factory=dict)

    def marginal(self, a) -> list[tuple[object, object]]:
        """Agent ``a``'s distribution as ``[(element or BOTTOM, prob), ...]``."""
        return [(e, v) for (b, e), v in self.x.items() if b == a and v != 0]


def _assignment_columns(profile):
    """Columns ordered agent-major, bottom first; zero-weight pairs omitted."""
    cols = []
    for a in sorted(profile):
        cols.append((a, BOTTOM))
        cols.extend((a, e) for e in profile[a].support())
    return cols


def _solve_packing(profile, rows, exact: bool) -> tuple[dict, object]:
    """Shared LP skeleton: per-agent simplex rows plus packing rows.

    ``rows`` is a list of ``(elements, capacity)``; each yields the
    constraint sum_a sum_{e in elements} x_a(e) <= capacity.
    """
    cols = _assignment_columns(profile)
    agents = sorted(profile)
    n_struct = len(cols)
    n_rows = len(agents) + len(rows)
    n = n_struct + len(rows)
    T = lp.zeros((n_rows, n), exact)
    rhs = lp.zeros(n_rows, exact)
    c = lp.zeros(n, exact)
    one = Fraction(1) if exact else 1.0
    agent_row = {a: i for i, a in enumerate(agents)}
    by_elem: dict[int, list[int]] = {}
    for j, (a, e) in enumerate(cols):
        T[agent_row[a], j] = one
        if e is not BOTTOM:
            w = profile[a][e]
            c[j] = Fraction(w) if exact else float(w)
            by_elem.setdefault(e, []).append(j)
    for i, a in enumerate(agents):
        rhs[i] = one
    for r, (elems, cap) in enumerate(rows):
        i = len(agents) + r
        for e in elems:
            for j in by_elem.get(e, ()):
                T[i, j] = one
        T[i, n_struct + r] = one
        rhs[i] = Fraction(cap) if exact else float(cap)
    basis = [cols.index((a, BOTTOM)) for a in agents] + [n_struct + r for r in range(len(rows))]
    # bottom columns and slacks are unit columns, so this basis is canonical
    rank = list(range(n_struct)) + [-1] * len(rows)
    x, obj, _ = lp.lex_simplex(T, rhs, c, basis, rank, tol=0 if exact else lp.FLOAT_TOL)
    sol = {col: x[j] for j, col in enumerate(cols)}
    return sol, obj


def solve_hm_lp(hg: Hypergraph, profile, exact: bool = True) -> LPSolution:
    """The hypergraph matching relaxation with node capacities one."""
    used = sorted({e for wf in profile.values() for e in wf})
    hg.check_elements(used)
    nodes: dict[int, list[int]] = {}
    for e in used:
        for v in hg.edge_nodes(e):
            nodes.setdefault(v, []).append(e)
    rows = [(nodes[v], 1) for v in sorted(nodes)]
    x, obj = _solve_packing(profile, rows, exact)
    y = {}
    for (a, e), v in x.items():
        if e is not BOTTOM:
            y[e] = y.get(e, 0) + v
    return LPSolution(x=x, objective=obj, y=y)


class SubsetRanks:
    """Rank of every subset of a small element list, indexed by bitmask."""

    def __init__(self, matroid: Matroid, elements, limit: int = DEFAULT_COMPONENT_LIMIT):
        self.elements = list(elements)
        size = len(self.elements)
        if size > limit:
            raise ResourceLimit(f"{size} elements exceed the explicit enumeration limit {limit}")
        full = 1 << size
        indep = [False] * full
        rank = [0] * full
        indep[0] = True
        for mask in range(1, full):
            top = mask.bit_length() - 1
            rest = mask ^ (1 << top)
            if indep[rest]:
                members = [self.elements[b] for b in range(size) if mask >> b & 1]
                indep[mask] = matroid.is_independent(members)
            if indep[mask]:
                rank[mask] = bin(mask).count("1")
            else:
                r = 0
                m = mask
                while m:
                    low = m & -m
                    r = max(r, rank[mask ^ low])
                    m ^= low
                rank[mask] = r
        self.indep = indep
        self.rank = rank
        self.full = full

    def members(self, mask):
        return [self.elements[b] for b in range(len(self.elements)) if mask >> b & 1]

    def is_flat(self, mask) -> bool:
        r = self.rank[mask]
        for b in range(len(self.elements)):
            bit = 1 << b
            if not mask & bit and self.rank[mask | bit] == r:
                return False
        return True

    def packing_rows(self):
        """Flats whose rank constraint is not implied by singleton bounds."""
        rows = []
        for mask in range(1, self.full):
            size = bin(mask).count("1")
            r = self.rank[mask]
            if (size == 1 or r < size) and self.is_flat(mask):
                rows.append((self.members(mask), r))
        return rows


def solve_matchoid_lp(mc: Matchoid, profile, exact: bool = True,
                      component_limit: int = DEFAULT_COMPONENT_LIMIT) -> LPSolution:
    """Matchoid relaxation with every component's rank constraints written out.

    Only flats of each component restricted to the elements some agent
    values are needed; the other rank constraints are implied.
    """
    used = sorted({e for wf in profile.values() for e in wf})
    mc.check_elements(used)
    rows = []
    for i, (mat, active) in enumerate(mc.components):
        local = mc.restrict(i, used)
        if not local:
            continue
        ranks = SubsetRanks(mat, local, component_limit)
        for members, r in ranks.packing_rows():
            rows.append(([active[j] for j in members], r))
    x, obj = _solve_packing(profile, rows, exact)
    y = {e: 0 for e in range(mc.ground_size)}
    for (a, e), v in x.items():
        if e is not BOTTOM:
            y[e] = y[e] + v
    return LPSolution(x=x, objective=obj, y=y)


@dataclass
class ConvexDecomposition:
    atoms: list  # [(weight, sorted tuple of elements)]

    def reconstruct(self) -> dict:
        z: dict = {}
        for lam, ind in self.atoms:
            for e in ind:
                z[e] = z.get(e, 0) + lam
        return z


def decompose_polytope_point(matroid: Matroid, z) -> ConvexDecomposition:
    """Write ``z`` in the independence polytope as a convex combination.

    Each round picks an independent set on the minimal face containing the
    scaled residual and removes the largest multiple that keeps the
    residual inside the scaled polytope.  Exact rational arithmetic only.
    """
    z = {int(e): Fraction(v) for e, v in dict(z).items() if v != 0}
    if any(v < 0 for v in z.values()):
        raise InvalidInput("point has a negative coordinate")
    matroid.check_elements(z)
    support = sorted(z)
    ranks = SubsetRanks(matroid, support)
    nbits = len(support)
    for mask in range(1, ranks.full):
        if sum(z[e] for e in ranks.members(mask)) > ranks.rank[mask]:
            raise InvalidInput(f"point violates the rank constraint on {ranks.members(mask)}")

    resid = [z[e] for e in support]
    lam = Fraction(1)
    atoms = []

    def total(mask):
        return sum((resid[b] for b in range(nbits) if mask >> b & 1), Fraction(0))

    while lam > 0:
        tight = [m for m in range(1, ranks.full)
                 if ranks.rank[m] > 0 and total(m) == lam * ranks.rank[m]]
        live = sum(1 << b for b in range(nbits) if resid[b] > 0)

        def on_face(mask):
            return all(bin(mask & t).count("1") == ranks.rank[t] for t in tight)

        pick = _greedy_mask(ranks, resid, live)
        if not on_face(pick):
            pick = next((m for m in range(ranks.full - 1, -1, -1)
                         if m & ~live == 0 and ranks.indep[m] and on_face(m)), None)
            if pick is None:
                raise InternalConsistencyError("no vertex of the minimal face found")
        theta = lam
        for b in range(nbits):
            if pick >> b & 1:
                theta = min(theta, resid[b])
        for m in range(1, ranks.full):
            slack_rank = ranks.rank[m] - bin(m & pick).count("1")
            if slack_rank > 0:
                theta = min(theta, (lam * ranks.rank[m] - total(m)) / slack_rank)
        if theta <= 0:
            raise InternalConsistencyError("decomposition step made no progress")
        atoms.append((theta, tuple(support[b] for b in range(nbits) if pick >> b & 1)))
        for b in range(nbits):
            if pick >> b & 1:
                resid[b] -= theta
        lam -= theta

    merged: dict = {}
    for w, ind in atoms:
        merged[ind] = merged.get(ind, 0) + w
    dec = ConvexDecomposition(atoms=[(w, ind) for ind, w in merged.items()])
    if sum(w for w, _ in dec.atoms) != 1 or dec.reconstruct() != z:
        raise InternalConsistencyError("decomposition does not reproduce the point")
    if len(dec.atoms) > matroid.ground_size + 1:
        raise InternalConsistencyError(f"{len(dec.atoms)} atoms exceed ground size + 1")
    return dec


def _greedy_mask(ranks: SubsetRanks, resid, live) -> int:
    order = sorted((b for b in range(len(resid)) if live >> b & 1), key=lambda b: (-resid[b], b))
    mask = 0
    for b in order:
        if ranks.indep[mask | 1 << b]:
            mask |= 1 << b
    return mask
