"""Random instances, experiment orchestration and summary statistics.

Every trial gets its own seed, derived from the master seed and the trial
index, so any single trial can be replayed without running the others.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import InvalidParameter, TrialFailed
from .io import jsonable
from .matroids import GraphicMatroid, Matchoid, Matroid, PartitionMatroid, TransversalMatroid
from .model import (BOTTOM, Hypergraph, WeightDistribution, WeightFunction, assignment_value,
                    is_feasible, sample_profile)
from .offline import offline_opt_bruteforce
from .online import (SecretarySchedule, run_prophet_iid, run_prophet_secretary_single_sample,
                     run_secretary)
from .samplers import DirectedSampler, HMSampler, MatchoidSampler

WEIGHT_GRID = 1000  # weights are multiples of 1/WEIGHT_GRID, so sums stay exact


# -- generators ---------------------------------------------------------------

def gen_random_hypergraph(n: int, edge_count: int, k: int, rng) -> Hypergraph:
    """``edge_count`` distinct edges, each a uniform node subset of uniform size in 1..k."""
    if k < 1 or n < k:
        raise InvalidParameter("need 1 <= k <= n")
    available = sum(math.comb(n, s) for s in range(1, k + 1))
    if edge_count > available:
        raise InvalidParameter(f"only {available} distinct edges of size <= {k} on {n} nodes")
    if edge_count * 2 > available:
        pool = [c for s in range(1, k + 1) for c in combinations(range(n), s)]
        idx = rng.choice(len(pool), size=edge_count, replace=False)
        return Hypergraph(n, [pool[int(i)] for i in idx])
    edges, seen = [], set()
    while len(edges) < edge_count:
        size = int(rng.integers(1, k + 1))
        e = tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
        if e not in seen:
            seen.add(e)
            edges.append(e)
    return Hypergraph(n, edges)


def gen_random_graphic(n_vertices: int, n_edges: int, rng) -> GraphicMatroid:
    """Uniform loopless multigraph."""
    if n_vertices < 2:
        raise InvalidParameter("a graph with edges needs two vertices")
    edges = []
    for _ in range(n_edges):
        u, v = rng.choice(n_vertices, size=2, replace=False)
        edges.append((int(min(u, v)), int(max(u, v))))
    return GraphicMatroid(n_vertices, edges)


def gen_random_partition(n_elements: int, n_parts: int, rng) -> PartitionMatroid:
    if not 1 <= n_parts <= n_elements:
        raise InvalidParameter("need 1 <= n_parts <= n_elements")
    labels = np.concatenate([np.arange(n_parts), rng.integers(n_parts, size=n_elements - n_parts)])
    rng.shuffle(labels)
    return PartitionMatroid([[e for e in range(n_elements) if labels[e] == p] for p in range(n_parts)])


def gen_random_transversal(n_left: int, n_right: int, rng, density: float = 0.4) -> TransversalMatroid:
    adj = []
    for _ in range(n_left):
        nb = [r for r in range(n_right) if rng.random() < density]
        adj.append(nb or [int(rng.integers(n_right))])
    return TransversalMatroid(n_right, adj)


def gen_random_matroid(kind: str, n: int, rng) -> Matroid:
    if kind == "partition":
        return gen_random_partition(n, max(1, n // 2), rng)
    if kind == "graphic":
        return gen_random_graphic(max(2, (n + 3) // 2), n, rng)
    if kind == "transversal":
        return gen_random_transversal(n, max(1, n // 2), rng)
    raise InvalidParameter(f"unknown matroid kind {kind!r}")


def gen_random_matchoid(ground_size: int, n_components: int, component_size: int, rng,
                        kinds=("partition", "graphic", "transversal")) -> Matchoid:
    """Random matroids on random element subsets; every element is in some component."""
    if component_size > ground_size:
        raise InvalidParameter("component larger than the ground set")
    actives = [sorted(int(e) for e in rng.choice(ground_size, size=component_size, replace=False))
               for _ in range(n_components)]
    missing = sorted(set(range(ground_size)) - {e for a in actives for e in a})
    if missing:
        actives.append(missing)
    comps = []
    for active in actives:
        kind = kinds[int(rng.integers(len(kinds)))]
        comps.append((gen_random_matroid(kind, len(active), rng), active))
    return Matchoid(ground_size, comps)


def _random_weight(rng, law: str):
    if law == "grid":
        return Fraction(int(rng.integers(1, WEIGHT_GRID + 1)), WEIGHT_GRID)
    if law == "uniform":
        return float(rng.random()) or 1e-12
    if law == "unit":
        return 1
    raise InvalidParameter(f"unknown weight law {law!r}")


def gen_random_distributions(system, m: int, atoms_per_agent: int, rng, single_minded: bool = False,
                             support_size: int = 3, law: str = "grid") -> dict:
    """Per-agent distributions with uniform probabilities over random sparse atoms.

    ``law='grid'`` draws weights uniformly from {1/1000, ..., 1} so every
    sum is an exact rational; ``'uniform'`` uses floats in (0, 1).
    """
    if atoms_per_agent < 1:
        raise InvalidParameter("atoms_per_agent must be at least 1")
    n = system.ground_size
    size = 1 if single_minded else min(support_size, n)
    out = {}
    for a in range(m):
        wfs = []
        for _ in range(atoms_per_agent):
            elems = rng.choice(n, size=int(rng.integers(1, size + 1)), replace=False)
            wfs.append(WeightFunction({int(e): _random_weight(rng, law) for e in elems}))
        out[a] = WeightDistribution.uniform(wfs)
    return out


def gen_fixed_profile(system, m: int, rng, single_minded: bool = False, support_size: int = 3,
                      law: str = "grid") -> dict:
    dists = gen_random_distributions(system, m, 1, rng, single_minded, support_size, law)
    return {a: d.atoms[0][1] for a, d in dists.items()}


# -- experiments ----------------------------------------------------------------

SAMPLERS = {"hm": HMSampler, "directed": DirectedSampler, "matchoid": MatchoidSampler}


def make_sampler(name: str, system, exact: bool = False):
    if name == "hm":
        if not isinstance(system, Hypergraph):
            raise InvalidParameter("the hm sampler needs a hypergraph")
        return HMSampler(system, exact=exact)
    if name == "directed":
        if not isinstance(system, Matroid):
            raise InvalidParameter("the directed sampler needs a partition, graphic or transversal matroid")
        return DirectedSampler(system)
    if name == "matchoid":
        if not isinstance(system, Matchoid):
            raise InvalidParameter("the matchoid sampler needs a matchoid")
        return MatchoidSampler(system)
    raise InvalidParameter(f"unknown sampler {name!r}")


@dataclass
class ExperimentConfig:
    model: str                      # iid | pss | secretary
    system: object
    dists: dict                     # agent -> WeightDistribution
    sampler: str = "hm"
    trials: int = 1000
    seed: int = 0
    out: str | None = None
    exact: bool = False             # rational LP arithmetic inside the sampler
    exact_dump: bool = False
    shuffle_order: bool = False     # iid only
    schedule: SecretarySchedule | None = None
    debug: bool = False
    dump_certificates: bool = False

    def __post_init__(self):
        if self.model not in ("iid", "pss", "secretary"):
            raise InvalidParameter(f"unknown model {self.model!r}")
        if self.trials < 1:
            raise InvalidParameter("trials must be at least 1")
        if self.model == "iid" and len(set(self.dists.values())) != 1:
            raise InvalidParameter("the iid model needs one distribution shared by all agents")
        self._sampler = make_sampler(self.sampler, self.system, self.exact)
        if self.model == "secretary" and self.schedule is None:
            self.schedule = SecretarySchedule.for_k(self._sampler.certifier.k)

    @property
    def sampler_obj(self):
        return self._sampler


@dataclass
class RunRecord:
    trial: int
    seed: int
    alg_value: object
    opt_value: object
    assignment: dict = field(default_factory=dict, repr=False)
    certificates: list = field(default_factory=list, repr=False)


def trial_seed(master: int, trial: int) -> int:
    return int(np.random.SeedSequence([int(master), int(trial)]).generate_state(1, dtype=np.uint64)[0])


def run_trial(config: ExperimentConfig, trial: int, seed: int | None = None) -> RunRecord:
    """One realisation; pass ``seed`` to replay a recorded trial."""
    seed = trial_seed(config.seed, trial) if seed is None else int(seed)
    rng = np.random.default_rng(seed)
    sampler = config.sampler_obj
    log = [] if config.dump_certificates else None
    try:
        if config.model == "iid":
            agents = sorted(config.dists)
            dist = config.dists[agents[0]]
            order = [agents[i] for i in rng.permutation(len(agents))] if config.shuffle_order else None
            alg, profile = run_prophet_iid(sampler, dist, len(agents), rng, order=order,
                                           debug=config.debug, log=log)
        elif config.model == "pss":
            alg, profile = run_prophet_secretary_single_sample(sampler, config.dists, rng,
                                                               debug=config.debug, log=log)
        else:
            profile = sample_profile(config.dists, rng)
            alg = run_secretary(sampler, profile, config.schedule, rng, debug=config.debug, log=log)
        _, opt = offline_opt_bruteforce(config.system, profile)
        alg_value = assignment_value(profile, alg)
        if not is_feasible(config.system, alg, len(profile)):
            raise AssertionError(f"infeasible online assignment {alg}")
        if alg_value > opt:
            raise AssertionError(f"online value {alg_value} exceeds the optimum {opt}")
    except Exception as exc:  # noqa: BLE001 - rewrapped with replay info
        raise TrialFailed(trial, seed, exc) from exc
    return RunRecord(trial, seed, alg_value, opt, alg, log or [])


@dataclass
class SummaryStats:
    trials: int
    mean_alg: float
    mean_opt: float
    se_alg: float
    se_opt: float
    ratio_of_means: float | None
    se_ratio: float | None

    def lower(self, z: float = 3.0) -> float | None:
        return None if self.ratio_of_means is None else self.ratio_of_means - z * self.se_ratio

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("trials", "mean_alg", "mean_opt", "se_alg", "se_opt",
                                              "ratio_of_means", "se_ratio")}


def summarize(alg, opt) -> SummaryStats:
    """Means with standard errors; the ratio's error comes from the delta method."""
    a = np.asarray([float(v) for v in alg])
    o = np.asarray([float(v) for v in opt])
    n = len(a)
    if n == 0:
        raise InvalidParameter("no trials to summarise")
    se = (lambda v: float(v.std(ddof=1) / math.sqrt(n))) if n > 1 else (lambda v: 0.0)
    ma, mo = float(a.mean()), float(o.mean())
    if mo <= 0:
        ratio = se_ratio = None
    else:
        ratio = ma / mo
        se_ratio = se(a - ratio * o) / mo
    return SummaryStats(n, ma, mo, se(a), se(o), ratio, se_ratio)


_WORKER_CONFIG = None


def _worker(trial):
    return run_trial(_WORKER_CONFIG, trial)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ONASSIGN_THREADS", "1")))
    except ValueError:
        raise InvalidParameter("ONASSIGN_THREADS must be an integer") from None


def run_experiment(config: ExperimentConfig) -> tuple[SummaryStats, list[RunRecord]]:
    """Run all trials, write the CSV if requested, and summarise.

    With ``ONASSIGN_THREADS`` > 1 trials run in forked worker processes;
    records are still collected and written in trial order.
    """
    global _WORKER_CONFIG
    threads = _threads()
    if threads > 1:
        import multiprocessing as mp
        _WORKER_CONFIG = config
        with ProcessPoolExecutor(threads, mp_context=mp.get_context("fork")) as pool:
            records = list(pool.map(_worker, range(config.trials), chunksize=16))
        _WORKER_CONFIG = None
    else:
        records = [run_trial(config, t) for t in range(config.trials)]
    if config.out:
        write_csv(records, config.out, config.exact_dump)
    return summarize([r.alg_value for r in records], [r.opt_value for r in records]), records


def _cell(v, exact: bool):
    if exact:
        v = Fraction(v)
        return f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def write_csv(records, path, exact_dump: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "seed", "alg_value", "opt_value"])
        for r in records:
            w.writerow([r.trial, r.seed, _cell(r.alg_value, exact_dump), _cell(r.opt_value, exact_dump)])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def certificates_json(record: RunRecord) -> dict:
    return {"trial": record.trial, "seed": record.seed,
            "accepted": [{"agent": a, **jsonable(c)} for a, c in record.certificates],
            "assignment": {str(a): (None if e is BOTTOM else e) for a, e in record.assignment.items()}}
