"""Command line entry point: ``onassign <verb> ...``.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
or input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bounds, hardness
from .errors import InvalidInstance, InvalidParameter, OnAssignError, ResourceLimit, TrialFailed
from .harness import (ExperimentConfig, certificates_json, gen_random_distributions, gen_random_hypergraph,
                      gen_random_matchoid, gen_random_matroid, make_sampler, run_experiment)
from .io import Instance, instance_to_json, jsonable, load_instance
from .model import BOTTOM, Hypergraph, sample_profile
from .matroids import Matchoid
from .offline import offline_opt_bruteforce, solve_hm_lp, solve_matchoid_lp
from .online import SecretarySchedule
from .samplers import verify_sampler

OK, FAIL, USAGE = 0, 1, 2


def _emit(obj):
    print(json.dumps(jsonable(obj), indent=1))


def _profile(inst: Instance, seed: int):
    return sample_profile(inst.dists(), np.random.default_rng(seed))


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    profile = _profile(inst, args.seed)
    if args.method == "bruteforce":
        asg, val = offline_opt_bruteforce(inst.system, profile)
        _emit({"method": "bruteforce", "objective": val,
               "assignment": {a: (None if e is BOTTOM else e) for a, e in asg.items()}})
        return OK
    if args.method == "hm-lp":
        if not isinstance(inst.system, Hypergraph):
            raise InvalidParameter("hm-lp needs a hypergraph instance")
        sol = solve_hm_lp(inst.system, profile, exact=args.exact)
    else:
        if not isinstance(inst.system, Matchoid):
            raise InvalidParameter("matchoid-lp needs a matchoid instance")
        sol = solve_matchoid_lp(inst.system, profile, exact=args.exact)
    x = [{"agent": a, "element": e, "value": v} for (a, e), v in sol.x.items() if v != 0]
    _emit({"method": args.method, "objective": sol.objective, "x": x})
    return OK


def cmd_simulate(args) -> int:
    inst = load_instance(args.instance)
    dists = inst.dists()
    if args.agents is not None:
        if len(inst.distributions) != 1:
            raise InvalidParameter("--agents needs an instance with a single shared distribution")
        dists = {a: inst.distributions[0] for a in range(args.agents)}
    schedule = None
    if args.model == "secretary" and args.p is not None:
        k = make_sampler(args.sampler, inst.system).certifier.k
        schedule = SecretarySchedule(k, args.p, bounds.p_alpha(k)[1])
    cfg = ExperimentConfig(args.model, inst.system, dists, args.sampler, trials=args.trials, seed=args.seed,
                           out=args.out, exact=args.exact, exact_dump=args.exact_dump,
                           shuffle_order=args.shuffle_order, schedule=schedule,
                           dump_certificates=bool(args.dump_certificates))
    stats, records = run_experiment(cfg)
    if args.dump_certificates:
        with open(args.dump_certificates, "w") as fh:
            for r in records:
                fh.write(json.dumps(certificates_json(r)) + "\n")
    _emit({"model": args.model, "sampler": args.sampler, **stats.to_json(),
           "ratio_lower_3se": stats.lower()})
    return OK


def cmd_verify_sampler(args) -> int:
    inst = load_instance(args.instance)
    sampler = make_sampler(args.sampler, inst.system, exact=args.mode == "exact")
    profile = _profile(inst, args.seed)
    rng = np.random.default_rng(args.seed)
    report = verify_sampler(sampler, profile, mode=args.mode, trials=args.trials, rng=rng)
    if args.dump_certificates:
        draws = sampler.sample(profile, rng)
        with open(args.dump_certificates, "w") as fh:
            json.dump(jsonable({str(a): c for a, c in draws.items()}), fh, indent=1)
    _emit(report)
    if args.mode == "exact":
        return OK if report["approx_holds"] and report["blocking_holds"] else FAIL
    return OK


def cmd_constants(args) -> int:
    rows = bounds.run_grid(args.check, args.m_max, args.k_max)
    for r in rows:
        if args.verbose or not r.holds:
            print(r.row())
    failed = sum(not r.holds for r in rows)
    print(f"{args.check}: {len(rows) - failed}/{len(rows)} pass")
    return OK if failed == 0 else FAIL


def cmd_hardness(args) -> int:
    rng = np.random.default_rng(args.seed)
    labels = np.asarray(hardness.label_counts(args.m, args.trials, rng), dtype=float)
    se = float(labels.std(ddof=1) / math.sqrt(len(labels))) if len(labels) > 1 else 0.0
    exact = hardness.exact_expected_labels(args.m)
    out = {"m": args.m, "trials": args.trials, "mean_L": float(labels.mean()), "se_L": se,
           "bound": exact, "opt_lower": args.m * (1 - 1 / math.e),
           "mean_alg": None, "log2_bound": math.log2(args.m + 1)}
    ok = abs(out["mean_L"] - exact) <= 3 * se + 1e-12 and out["mean_L"] >= out["opt_lower"] - 3 * se
    if args.gap:
        gap = hardness.run_gap_experiment(args.m, args.gap_trials or args.trials, rng)
        out.update(mean_alg=gap["mean_alg"], se_alg=gap["se_alg"], mean_opt=gap["mean_opt"])
        ok = ok and gap["mean_alg"] <= out["log2_bound"] + 3 * gap["se_alg"]
    out["holds"] = ok
    _emit(out)
    return OK if ok else FAIL


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.kind == "hypergraph":
        system = gen_random_hypergraph(args.n, args.edges, args.k, rng)
    elif args.kind == "matchoid":
        system = gen_random_matchoid(args.n, args.components, min(args.n, args.component_size), rng)
    else:
        system = gen_random_matroid(args.kind, args.n, rng)
    dists = gen_random_distributions(system, 1 if args.shared else args.agents, args.atoms, rng,
                                     single_minded=args.single_minded, law="grid")
    inst = Instance(system, [dists[a] for a in sorted(dists)], args.agents)
    text = json.dumps(instance_to_json(inst), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onassign", description="Online combinatorial assignment simulator")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("solve", help="offline optimum or LP relaxation of one realised profile")
    s.add_argument("--instance", required=True)
    s.add_argument("--method", choices=["bruteforce", "hm-lp", "matchoid-lp"], default="bruteforce")
    s.add_argument("--exact", action="store_true", help="rational LP arithmetic")
    s.add_argument("--seed", type=int, default=0, help="seed used to realise the profile")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("simulate", help="run an online model for many trials")
    s.add_argument("--model", choices=["iid", "pss", "secretary"], required=True)
    s.add_argument("--instance", required=True)
    s.add_argument("--sampler", choices=["hm", "directed", "matchoid"], default="hm")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="CSV of trial, seed, alg_value, opt_value")
    s.add_argument("--agents", type=int, help="iid: number of agents sharing the distribution")
    s.add_argument("--p", type=float, help="secretary: sampling probability (default p_k)")
    s.add_argument("--exact", action="store_true", help="rational LP arithmetic in the sampler")
    s.add_argument("--exact-dump", action="store_true", help="write CSV values as p/q strings")
    s.add_argument("--shuffle-order", action="store_true", help="iid: random arrival order per trial")
    s.add_argument("--dump-certificates", metavar="PATH", help="JSON lines of accepted certificates")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify-sampler", help="check gamma and k of a sampler on one profile")
    s.add_argument("--instance", required=True)
    s.add_argument("--sampler", choices=["hm", "directed", "matchoid"], required=True)
    s.add_argument("--mode", choices=["exact", "mc"], default="exact")
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dump-certificates", metavar="PATH", help="JSON of one sampled certificate profile")
    s.set_defaults(func=cmd_verify_sampler)

    s = sub.add_parser("constants", help="exact checks of the ratio inequalities")
    s.add_argument("--check", choices=["falling", "iid", "secretary", "hockey"], required=True)
    s.add_argument("--m-max", type=int, required=True)
    s.add_argument("--k-max", type=int, required=True)
    s.add_argument("-v", "--verbose", action="store_true", help="print every row, not only failures")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("hardness", help="the table instance: OPT size and online gap")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--gap", action="store_true", help="also run the online LP-sampler algorithm")
    s.add_argument("--gap-trials", type=int, help="trials for the gap run (default --trials)")
    s.set_defaults(func=cmd_hardness)

    s = sub.add_parser("gen", help="write a random instance as JSON")
    s.add_argument("--kind", choices=["hypergraph", "partition", "graphic", "transversal", "matchoid"],
                   required=True)
    s.add_argument("--n", type=int, required=True, help="nodes (hypergraph) or ground elements")
    s.add_argument("--edges", type=int, default=8, help="hypergraph edge count")
    s.add_argument("--k", type=int, default=2, help="hypergraph maximum edge size")
    s.add_argument("--components", type=int, default=2, help="matchoid component count")
    s.add_argument("--component-size", type=int, default=5)
    s.add_argument("--agents", type=int, default=6)
    s.add_argument("--atoms", type=int, default=3)
    s.add_argument("--shared", action="store_true", help="one distribution for all agents (iid)")
    s.add_argument("--single-minded", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInstance, InvalidParameter, ResourceLimit, OSError) as exc:
        print(f"onassign: error: {exc}", file=sys.stderr)
        return USAGE
    except TrialFailed as exc:
        print(f"onassign: {exc}", file=sys.stderr)
        return FAIL
    except (OnAssignError, AssertionError) as exc:
        print(f"onassign: check failed: {exc}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
