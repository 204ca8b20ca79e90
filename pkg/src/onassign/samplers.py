"""Certificate samplers and their exact or Monte Carlo verification.

A sampler turns a weight profile into a *plan*: the closed-form per-agent
distribution over certificates.  Plans can be drawn from, and they also
answer exact questions (expected value, blocking probability), which is
what the verifier uses.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .certifiers import (NULL, Certificate, DirectedCertifier, HypergraphCertifier,
                         MatchoidCertifier, matroid_certifier)
from .errors import InternalConsistencyError
from .matroids import Matchoid
from .model import BOTTOM, IndependenceSystem, independent_sets
from .offline import (decompose_polytope_point, offline_opt_bruteforce, solve_hm_lp,
                      solve_matchoid_lp)


def _pick(options, rng):
    """Draw from ``[(outcome, prob), ...]`` with one uniform variate."""
    u = rng.random()
    acc = 0.0
    for outcome, p in options:
        acc += float(p)
        if u < acc:
            return outcome
    return options[-1][0]


class HMPlan:
    def __init__(self, certifier: HypergraphCertifier, lp):
        self.certifier = certifier
        self.lp = lp
        self.marginals = {}
        for (a, e), v in lp.x.items():
            if v != 0:
                self.marginals.setdefault(a, []).append((e, v))

    def draw_agent(self, a, rng) -> Certificate:
        e = _pick(self.marginals[a], rng)
        return NULL if e is BOTTOM else Certificate(e, e)

    def expected_value(self, profile):
        return sum((profile[a](e) * p for a, opts in self.marginals.items() for e, p in opts), 0)

    def block_prob(self, a, probe: Certificate):
        return sum((p for e, p in self.marginals.get(a, ())
                    if e is not BOTTOM and self.certifier.blocks(Certificate(e, e), probe)), 0)


class DirectedPlan:
    def __init__(self, certifier, certs: dict):
        self.certifier = certifier
        self.certs = certs

    def draw_agent(self, a, rng) -> Certificate:
        return self.certs[a]

    def expected_value(self, profile):
        return sum((profile[a](c.element) for a, c in self.certs.items()), 0)

    def block_prob(self, a, probe):
        return 1 if self.certifier.blocks(self.certs[a], probe) else 0


class MatchoidPlan:
    def __init__(self, certifier: MatchoidCertifier, lp, decompositions):
        self.certifier = certifier
        self.mc: Matchoid = certifier.system
        self.lp = lp
        self.decompositions = decompositions  # per component: [(lambda, global tuple)]
        self.marginals = {}
        for (a, e), v in lp.x.items():
            if v != 0:
                self.marginals.setdefault(a, []).append((e, v))
        self._cond = {}

    def conditional(self, i, e):
        """The renormalised atoms of component ``i`` that contain ``e``."""
        key = (i, e)
        if key not in self._cond:
            atoms = [(lam, ind) for lam, ind in self.decompositions[i] if e in ind]
            mass = sum(lam for lam, _ in atoms)
            if mass == 0:
                raise InternalConsistencyError(f"no decomposition atom of component {i} contains {e}")
            self._cond[key] = [(ind, lam / mass) for lam, ind in atoms]
        return self._cond[key]

    def draw_agent(self, a, rng) -> Certificate:
        e = _pick(self.marginals[a], rng)
        if e is BOTTOM:
            return NULL
        sets = []
        for i in range(len(self.mc.components)):
            if self.mc.local(i, e) is None:
                sets.append(())
            else:
                sets.append(_pick(self.conditional(i, e), rng))
        return Certificate(tuple(sets), e)

    def expected_value(self, profile):
        return sum((profile[a](e) * p for a, opts in self.marginals.items() for e, p in opts), 0)

    def block_prob(self, a, probe: Certificate):
        """P[agent a's bundle blocks the probe], exact.

        Given the sampled element, the per-component sets are independent,
        so the union over components is one minus a product.
        """
        total = 0
        cert = self.certifier
        for e, p in self.marginals.get(a, ()):
            if e is BOTTOM:
                continue
            miss = 1
            for i in self.mc.membership[e]:
                if self.mc.local(i, probe.element) is None:
                    continue
                probe_i = cert.local_certificate(i, probe)
                q = 0
                for ind, w in self.conditional(i, e):
                    local = Certificate(tuple(sorted(self.mc.restrict(i, ind))), self.mc.local(i, e))
                    if cert.parts[i].blocks(local, probe_i):
                        q += w
                miss *= 1 - q
            total += p * (1 - miss)
        return total


class CertificateSampler:
    certifier = None
    system: IndependenceSystem = None

    def plan(self, profile):
        raise NotImplementedError

    def sample(self, profile, rng) -> dict:
        plan = self.plan(profile)
        return {a: plan.draw_agent(a, rng) for a in sorted(profile)}

    def propose(self, profile, agent, rng) -> Certificate:
        """Certificate for one agent; other agents' draws are never used."""
        return self.plan(profile).draw_agent(agent, rng)


class HMSampler(CertificateSampler):
    """LP sampler for hypergraphs: each agent draws an edge from its LP marginal."""

    name = "hm"

    def __init__(self, hg, exact: bool = False):
        self.system = hg
        self.certifier = HypergraphCertifier(hg)
        self.exact = exact

    def plan(self, profile) -> HMPlan:
        return HMPlan(self.certifier, solve_hm_lp(self.system, profile, exact=self.exact))


class DirectedSampler(CertificateSampler):
    """Optimum-based sampler: every assigned agent gets (I(w), its OPT element)."""

    name = "directed"

    def __init__(self, matroid, certifier: DirectedCertifier | None = None, budget=None):
        self.system = matroid
        self.certifier = certifier or matroid_certifier(matroid)
        self.budget = budget

    def plan(self, profile) -> DirectedPlan:
        kwargs = {} if self.budget is None else {"budget": self.budget}
        asg, _ = offline_opt_bruteforce(self.system, profile, **kwargs)
        chosen = tuple(sorted(e for e in asg.values() if e is not BOTTOM))
        certs = {a: NULL if e is BOTTOM else Certificate(chosen, e) for a, e in asg.items()}
        return DirectedPlan(self.certifier, certs)


class MatchoidSampler(CertificateSampler):
    """Matchoid sampler: LP element draw, then per-component conditional set draws.

    Always exact: the decomposition needs rational coordinates.
    """

    name = "matchoid"

    def __init__(self, mc: Matchoid, certifier: MatchoidCertifier | None = None):
        self.system = mc
        self.certifier = certifier or MatchoidCertifier(mc)

    def plan(self, profile) -> MatchoidPlan:
        mc = self.system
        sol = solve_matchoid_lp(mc, profile, exact=True)
        decs = []
        for i, (mat, active) in enumerate(mc.components):
            z = {j: sol.y[e] for j, e in enumerate(active) if sol.y[e] != 0}
            dec = decompose_polytope_point(mat, z)
            decs.append([(lam, tuple(sorted(active[j] for j in ind))) for lam, ind in dec.atoms])
        return MatchoidPlan(self.certifier, sol, decs)


def sample_hm(hg, profile, rng, exact: bool = False) -> dict:
    return HMSampler(hg, exact).sample(profile, rng)


def sample_directed(matroid, certifier, profile) -> dict:
    return DirectedSampler(matroid, certifier).sample(profile, None)


def sample_matchoid(mc, profile, rng, certifier=None) -> dict:
    return MatchoidSampler(mc, certifier).sample(profile, rng)


def default_probes(certifier, profile=None, rng=None, exhaustive_limit: int = 6,
                   random_probes: int = 300, per_element_cap: int = 64) -> list[Certificate]:
    """Certificates against which blocking is measured.

    Exhaustive on small ground sets, sampled otherwise; the full node set
    is exponential so this is an under-approximation by design.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    system = certifier.system
    if isinstance(certifier, HypergraphCertifier):
        return [Certificate(e, e) for e in range(system.ground_size)]
    if isinstance(certifier, DirectedCertifier):
        if system.ground_size <= exhaustive_limit:
            return [Certificate(s, f) for s in independent_sets(system) if s for f in s]
        out = []
        for _ in range(random_probes):
            s = _random_independent(system, rng)
            if s:
                out.append(Certificate(s, s[int(rng.integers(len(s)))]))
        return out
    if isinstance(certifier, MatchoidCertifier):
        return _matchoid_probes(certifier, rng, exhaustive_limit, per_element_cap)
    raise TypeError(f"no probe strategy for {type(certifier).__name__}")


def _random_independent(system, rng):
    cur = frozenset()
    for e in rng.permutation(system.ground_size):
        e = int(e)
        if rng.random() < 0.7 and system.can_add(cur, e):
            cur = cur | {e}
    return tuple(sorted(cur))


def _matchoid_probes(cert: MatchoidCertifier, rng, exhaustive_limit, cap):
    mc = cert.system
    probes = []
    for f in range(mc.ground_size):
        choices = []
        for i, (mat, active) in enumerate(mc.components):
            lf = mc.local(i, f)
            if lf is None:
                choices.append([()])
                continue
            if mat.ground_size <= exhaustive_limit:
                sets = [s for s in independent_sets(mat) if lf in s]
            else:
                sets = [_random_independent_containing(mat, lf, rng) for _ in range(8)]
            choices.append(sorted({tuple(sorted(active[j] for j in s)) for s in sets}))
        combos = 1
        for ch in choices:
            combos *= len(ch)
        if combos <= cap:
            for sets in itertools.product(*choices):
                probes.append(Certificate(tuple(sets), f))
        else:
            for _ in range(cap):
                probes.append(Certificate(tuple(ch[int(rng.integers(len(ch)))] for ch in choices), f))
    return probes


def _random_independent_containing(mat, e, rng):
    cur = frozenset([e])
    for f in rng.permutation(mat.ground_size):
        f = int(f)
        if rng.random() < 0.7 and mat.can_add(cur, f):
            cur = cur | {f}
    return tuple(sorted(cur))


def verify_sampler(sampler: CertificateSampler, profile, mode: str = "exact", probes=None,
                   trials: int = 2000, rng=None, opt_value=None) -> dict:
    """Measure the approximation ratio and worst blocking sum of a sampler."""
    rng = rng if rng is not None else np.random.default_rng(0)
    certifier = sampler.certifier
    if opt_value is None:
        _, opt_value = offline_opt_bruteforce(sampler.system, profile)
    if probes is None:
        probes = default_probes(certifier, profile, rng)
    agents = sorted(profile)
    plan = sampler.plan(profile)
    if mode == "exact":
        expected = plan.expected_value(profile)
        sums = [sum((plan.block_prob(a, pr) for a in agents), 0) for pr in probes]
    elif mode == "mc":
        draws = [{a: plan.draw_agent(a, rng) for a in agents} for _ in range(trials)]
        expected = sum(float(profile[a](d[a].element)) for d in draws for a in agents) / trials
        sums = [sum(certifier.blocks(d[a], pr) for d in draws for a in agents) / trials
                for pr in probes]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    k_obs = max(sums, default=0)
    worst = probes[sums.index(k_obs)] if probes and sums else None
    gamma = (Fraction(expected) / Fraction(opt_value) if mode == "exact" else expected / float(opt_value)) \
        if opt_value else None
    return {
        "method": mode,
        "expected_value": expected,
        "opt": opt_value,
        "gamma_observed": gamma,
        "approx_holds": expected >= opt_value if mode == "exact" else None,
        "k_observed": k_obs,
        "k_bound": certifier.k,
        "blocking_holds": (k_obs <= certifier.k) if mode == "exact" else None,
        "n_probes": len(probes),
        "worst_probe": worst,
    }
