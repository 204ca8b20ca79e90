"""Online assignment templates driven by a certificate sampler.

All three templates share one acceptance rule: an agent receives the
element of its proposed certificate iff the proposal is not the null
certificate and no previously accepted certificate blocks it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certifiers import Certificate, Certifier, verify_certification
from .errors import InvalidParameter
from .model import BOTTOM, WeightDistribution


@dataclass
class OnlineState:
    certifier: Certifier
    accepted: list = field(default_factory=list)   # the running certification
    alg: dict = field(default_factory=dict)        # agent -> element or BOTTOM
    debug: bool = False
    log: list | None = None                        # optional (agent, certificate) trace

    def value(self, profile):
        return sum((profile[a](e) for a, e in self.alg.items()), 0)


def accept_step(state: OnlineState, agent, proposal: Certificate) -> bool:
    state.alg.setdefault(agent, BOTTOM)
    if proposal.is_null:
        return False
    blocks = state.certifier.blocks
    if any(blocks(c, proposal) for c in state.accepted):
        return False
    state.accepted.append(proposal)
    state.alg[agent] = proposal.element
    if state.log is not None:
        state.log.append((agent, proposal))
    if state.debug and not verify_certification(state.certifier, state.certifier.system, state.accepted):
        raise AssertionError("accepted sequence stopped being a certification")
    return True


def p_alpha(k: int) -> tuple[float, float]:
    """Sampling probability and guaranteed ratio for the secretary template."""
    if k < 1 or int(k) != k:
        raise InvalidParameter(f"k must be a positive integer, got {k!r}")
    if k == 1:
        return 1 / math.e, 1 / math.e
    return k ** (-1 / (k - 1)), k ** (-k / (k - 1))


@dataclass(frozen=True)
class SecretarySchedule:
    k: int
    p: float
    alpha: float

    @classmethod
    def for_k(cls, k: int) -> SecretarySchedule:
        p, alpha = p_alpha(k)
        return cls(k, p, alpha)

    def draw_cutoff(self, m: int, rng) -> int:
        return int(rng.binomial(m, self.p))


def run_prophet_iid(sampler, dist: WeightDistribution, m: int, rng, order=None, debug=False, log=None):
    """Identical distributions; agents arrive in ``order`` (default 0..m-1).

    At step t a fresh profile is drawn for every slot except a uniformly
    random one, which holds the arriving agent's revealed weights; the
    arriving agent gets that slot's proposal.  Returns ``(alg, revealed)``.
    """
    if m < 1:
        raise InvalidParameter("need at least one agent")
    order = list(range(m)) if order is None else list(order)
    state = OnlineState(sampler.certifier, debug=debug, log=log)
    revealed = {}
    for a in order:
        r = dist.sample(rng)
        revealed[a] = r
        slot = int(rng.integers(m))
        fresh = {j: (r if j == slot else dist.sample(rng)) for j in range(m)}
        accept_step(state, a, sampler.propose(fresh, slot, rng))
    return state.alg, revealed


def run_prophet_secretary_single_sample(sampler, dists: dict, rng, debug=False, log=None):
    """One sample per agent up front, then random arrival order.

    At step t the sampler sees real weights for arrived agents and samples
    for the rest.  Returns ``(alg, revealed)``.
    """
    agents = sorted(dists)
    samples = {a: dists[a].sample(rng) for a in agents}
    order = [agents[i] for i in rng.permutation(len(agents))]
    state = OnlineState(sampler.certifier, debug=debug, log=log)
    current = dict(samples)
    revealed = {}
    for a in order:
        revealed[a] = dists[a].sample(rng)
        current[a] = revealed[a]
        accept_step(state, a, sampler.propose(dict(current), a, rng))
    return state.alg, revealed


def run_secretary(sampler, profile: dict, schedule: SecretarySchedule, rng, tau=None, debug=False,
                  log=None):
    """Adversarial weights in random order; skip the first tau ~ Bin(m, p)."""
    agents = sorted(profile)
    m = len(agents)
    order = [agents[i] for i in rng.permutation(m)]
    if tau is None:
        tau = schedule.draw_cutoff(m, rng)
    state = OnlineState(sampler.certifier, debug=debug, log=log)
    for a in agents:
        state.alg[a] = BOTTOM
    seen = {a: profile[a] for a in order[:tau]}
    for a in order[tau:]:
        seen[a] = profile[a]
        accept_step(state, a, sampler.propose(dict(seen), a, rng))
    return state.alg
