"""The table hypergraph on which every online algorithm stays logarithmic.

Nodes: two copies of every off-diagonal cell T(i, j) of an m x m table,
plus one node x_i per label.  The only edges that ever carry weight are
``f + {x_l}`` where f picks one copy from every off-diagonal cell of row l
and of column l.  Such an edge is encoded by the integer
``(l << 2(m-1)) | (col_bits << (m-1)) | row_bits``; bit r of ``col_bits``
is the copy chosen in the r-th column cell (rows other than l in
increasing order), and likewise for ``row_bits``.  The full edge set is
never materialised.

Labels are 0-based here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInput, InvalidParameter, ResourceLimit
from .model import Hypergraph, WeightFunction


class HardnessInstance(Hypergraph):

    def __init__(self, m: int):
        if int(m) != m or m < 2:
            raise InvalidParameter("the construction needs m >= 2")
        self.m = m = int(m)
        self.n_cells = m * (m - 1)
        self.n_nodes = 2 * self.n_cells + m
        self.k = 2 * m - 1
        self.bits = m - 1
        self.ground_size = m << (2 * self.bits)
        # per label: (column cell pairs, row cell pairs), each [copy0, copy1]
        self._cells = [
            ([(self.node(r, lab, 0), self.node(r, lab, 1)) for r in self.others(lab)],
             [(self.node(lab, r, 0), self.node(lab, r, 1)) for r in self.others(lab)])
            for lab in range(m)]
        self.edge_nodes = lru_cache(maxsize=1 << 18)(self._edge_nodes)
        self.edge_mask = lru_cache(maxsize=1 << 18)(self._edge_mask)
        assert self.n_nodes == 2 * m * m - m

    # node indexing ---------------------------------------------------
    def cell(self, i: int, j: int) -> int:
        if i == j:
            raise InvalidInput("diagonal cells carry no nodes")
        return i * (self.m - 1) + (j if j < i else j - 1)

    def node(self, i: int, j: int, copy: int) -> int:
        return 2 * self.cell(i, j) + copy

    def x(self, label: int) -> int:
        return 2 * self.n_cells + label

    def decode(self, v: int) -> tuple:
        """``('T', i, j, copy)`` or ``('X', label)``."""
        if not 0 <= v < self.n_nodes:
            raise InvalidInput(f"node {v} out of range")
        if v >= 2 * self.n_cells:
            return ("X", v - 2 * self.n_cells)
        cell, copy = divmod(v, 2)
        i, r = divmod(cell, self.m - 1)
        j = r if r < i else r + 1
        return ("T", i, j, copy)

    def others(self, label: int) -> list[int]:
        return [r for r in range(self.m) if r != label]

    # edges -------------------------------------------------------------
    def edge_id(self, label: int, col_bits: int, row_bits: int) -> int:
        return (label << (2 * self.bits)) | (col_bits << self.bits) | row_bits

    def split(self, e: int) -> tuple[int, int, int]:
        mask = (1 << self.bits) - 1
        return e >> (2 * self.bits), (e >> self.bits) & mask, e & mask

    def _edge_nodes(self, e: int) -> frozenset:
        label, col_bits, row_bits = self.split(e)
        cols, rows = self._cells[label]
        nodes = [c[col_bits >> pos & 1] for pos, c in enumerate(cols)]
        nodes += [c[row_bits >> pos & 1] for pos, c in enumerate(rows)]
        nodes.append(self.x(label))
        return frozenset(nodes)

    def _edge_mask(self, e: int) -> int:
        return sum(1 << v for v in self.edge_nodes(e))

    def incident(self, v):
        raise ResourceLimit("the hardness hypergraph is never materialised")

    def check_elements(self, elements):
        for e in elements:
            if not 0 <= e < self.ground_size:
                raise InvalidInput(f"edge id {e} out of range")

    def is_positive_nodes(self, nodes, label: int, col_bits: int) -> bool:
        """Weight predicate on a raw node set, straight from the definition."""
        nodes = set(nodes)
        xs = [v for v in nodes if v >= 2 * self.n_cells]
        if xs != [self.x(label)]:
            return False
        f = nodes - {self.x(label)}
        allowed = set()
        for pos, r in enumerate(self.others(label)):
            allowed.add(self.node(r, label, col_bits >> pos & 1))
            allowed.update((self.node(label, r, 0), self.node(label, r, 1)))
        if not f <= allowed:
            return False
        for r in self.others(label):
            row_cell = {self.node(label, r, 0), self.node(label, r, 1)}
            col_cell = {self.node(r, label, 0), self.node(r, label, 1)}
            if len(f & row_cell) != 1 or len(f & col_cell) != 1:
                return False
        return True


def build_hardness(m: int) -> HardnessInstance:
    return HardnessInstance(m)


@dataclass(frozen=True)
class HardnessDraw:
    label: int
    col_bits: int

    def column_set(self, inst: HardnessInstance) -> frozenset:
        return frozenset(inst.node(r, self.label, self.col_bits >> pos & 1)
                         for pos, r in enumerate(inst.others(self.label)))

    def weight(self, inst: HardnessInstance, e: int) -> int:
        label, col_bits, _ = inst.split(e)
        return int(label == self.label and col_bits == self.col_bits)

    def positive_edges(self, inst: HardnessInstance) -> list[int]:
        return [inst.edge_id(self.label, self.col_bits, rb) for rb in range(1 << inst.bits)]

    def weight_function(self, inst: HardnessInstance) -> WeightFunction:
        return _weight_function(inst, self)


@lru_cache(maxsize=8192)
def _weight_function(inst, draw) -> WeightFunction:
    return WeightFunction({e: 1 for e in draw.positive_edges(inst)})


def draw_agent(inst: HardnessInstance, rng) -> HardnessDraw:
    label = int(rng.integers(inst.m))
    col_bits = int(rng.integers(1 << inst.bits))
    return HardnessDraw(label, col_bits)


class HardnessDistribution:
    """The common agent distribution, sampled lazily."""

    def __init__(self, inst: HardnessInstance):
        self.inst = inst

    def sample(self, rng) -> WeightFunction:
        return draw_agent(self.inst, rng).weight_function(self.inst)

    def sample_draw(self, rng) -> HardnessDraw:
        return draw_agent(self.inst, rng)


@dataclass
class WitnessMatching:
    edges: list          # one edge id per distinct label
    representatives: list  # index into the draws list

    @property
    def size(self) -> int:
        return len(self.edges)


def representatives(draws) -> list[int]:
    """Index of the first draw carrying each label, in order of appearance."""
    seen, reps = set(), []
    for idx, d in enumerate(draws):
        if d.label not in seen:
            seen.add(d.label)
            reps.append(idx)
    return reps


def witness_matching(inst: HardnessInstance, draws, reps=None) -> WitnessMatching:
    """Pairwise-disjoint weight-one edges, one per representative draw."""
    if reps is None:
        reps = representatives(draws)
    chosen = [draws[i] for i in reps]
    labels = [d.label for d in chosen]
    if len(set(labels)) != len(labels):
        raise InvalidInput("representatives must carry distinct labels")
    by_label = {d.label: d for d in chosen}
    edges = []
    for d in chosen:
        row_bits = 0
        for pos, t in enumerate(inst.others(d.label)):
            other = by_label.get(t)
            if other is None:
                copy = 0
            else:
                # the copy of T(d.label, t) that the other agent's column set avoids
                opos = inst.others(t).index(d.label)
                copy = 1 - (other.col_bits >> opos & 1)
            row_bits |= copy << pos
        edges.append(inst.edge_id(d.label, d.col_bits, row_bits))
    used = 0
    for e, d in zip(edges, chosen):
        mask = inst.edge_mask(e)
        if used & mask:
            raise AssertionError("witness edges intersect")
        if d.weight(inst, e) != 1:
            raise AssertionError("witness edge has weight zero")
        used |= mask
    return WitnessMatching(edges, list(reps))


def exact_expected_labels(m: int) -> float:
    return m * (1 - (1 - 1 / m) ** m)


def expected_opt_lower_bound(m: int, trials: int, rng) -> float:
    """Mean size of the witness matching over independent label draws."""
    return float(np.mean(label_counts(m, trials, rng)))


def label_counts(m: int, trials: int, rng) -> list[int]:
    inst = HardnessInstance(m)
    out = []
    for _ in range(trials):
        draws = [draw_agent(inst, rng) for _ in range(m)]
        out.append(witness_matching(inst, draws).size)
    return out


def run_gap_experiment(m: int, trials: int, rng, model: str = "iid", max_m: int = 12) -> dict:
    """Online LP-sampler value versus the optimum on the table instance.

    The optimum of every trial equals its number of distinct labels.
    """
    from .online import run_prophet_iid, run_prophet_secretary_single_sample
    from .samplers import HMSampler

    if m > max_m:
        raise ResourceLimit(f"m={m} needs 2^{m - 1} positive edges per agent; limit is m <= {max_m}")
    inst = HardnessInstance(m)
    dist = HardnessDistribution(inst)
    sampler = HMSampler(inst, exact=False)
    algs, opts = [], []
    for _ in range(trials):
        if model == "iid":
            alg, revealed = run_prophet_iid(sampler, dist, m, rng)
        elif model == "pss":
            alg, revealed = run_prophet_secretary_single_sample(sampler, {a: dist for a in range(m)}, rng)
        else:
            raise InvalidParameter(f"unknown model {model!r}")
        algs.append(sum(revealed[a](e) for a, e in alg.items()))
        labels = {inst.split(next(iter(wf)))[0] for wf in revealed.values()}
        opts.append(len(labels))
    algs = np.asarray(algs, dtype=float)
    opts = np.asarray(opts, dtype=float)
    se = lambda v: float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0  # noqa: E731
    return {
        "m": m,
        "trials": trials,
        "mean_alg": float(algs.mean()),
        "se_alg": se(algs),
        "mean_opt": float(opts.mean()),
        "se_opt": se(opts),
        "log2_bound": math.log2(m + 1),
        "opt_bound": m * (1 - 1 / math.e),
    }
