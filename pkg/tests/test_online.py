import math

import numpy as np
import pytest

from onassign.certifiers import NULL, Certificate, hypergraph_certifier
from onassign.errors import InvalidParameter
from onassign.harness import (gen_fixed_profile, gen_random_distributions, gen_random_graphic, gen_random_hypergraph,
                              gen_random_matchoid, gen_random_transversal)
from onassign.model import BOTTOM, Hypergraph, WeightDistribution, WeightFunction, is_feasible
from onassign.online import (OnlineState, SecretarySchedule, accept_step, p_alpha, run_prophet_iid,
                             run_prophet_secretary_single_sample, run_secretary)
from onassign.samplers import DirectedSampler, HMSampler, MatchoidSampler


def test_p_alpha():
    assert p_alpha(1) == pytest.approx((1 / math.e, 1 / math.e))
    assert p_alpha(2) == (0.5, 0.25)
    p, a = p_alpha(3)
    assert p == pytest.approx(0.5773502691896258) and a == pytest.approx(0.19245008972987526)
    with pytest.raises(InvalidParameter):
        p_alpha(0)


def test_accept_step(path_hg):
    st = OnlineState(hypergraph_certifier(path_hg))
    assert not accept_step(st, 0, NULL) and st.accepted == [] and st.alg == {0: BOTTOM}
    assert accept_step(st, 1, Certificate(0, 0))
    assert not accept_step(st, 2, Certificate(1, 1))
    assert accept_step(st, 3, Certificate(2, 2))


def test_iid_single_agent(rng):
    hg = Hypergraph(2, [(0, 1)])
    d = WeightDistribution.point(WeightFunction({0: 1}))
    alg, rev = run_prophet_iid(HMSampler(hg, exact=True), d, 1, rng)
    assert alg == {0: 0}


def test_iid_degenerate_equals_opt(rng):
    hg = Hypergraph(4, [(0,), (1,), (2,), (3,)])
    d = WeightDistribution.point(WeightFunction({0: 1}))
    for _ in range(20):
        alg, rev = run_prophet_iid(HMSampler(hg, exact=True), d, 1, rng)
        assert rev[0](alg[0]) == 1


def test_pss_single_agent(rng):
    hg = Hypergraph(2, [(0, 1)])
    d = {0: WeightDistribution.point(WeightFunction({0: 2}))}
    alg, rev = run_prophet_secretary_single_sample(HMSampler(hg, exact=True), d, rng)
    assert alg == {0: 0}


def test_pss_degenerate_first_gets_opt(rng):
    gm = gen_random_graphic(5, 7, rng)
    prof = gen_fixed_profile(gm, 4, rng)
    dists = {a: WeightDistribution.point(w) for a, w in prof.items()}
    sampler = DirectedSampler(gm)
    opt = sampler.plan(prof).certs
    for seed in range(20):
        # point masses consume no randomness, so the arrival order is the first permutation
        first = int(np.random.default_rng(seed).permutation(4)[0])
        alg, _ = run_prophet_secretary_single_sample(sampler, dists, np.random.default_rng(seed))
        assert alg[first] == opt[first].element


def test_secretary_all_skipped(path_hg, path_profile, rng):
    sched = SecretarySchedule.for_k(2)
    alg = run_secretary(HMSampler(path_hg), path_profile, sched, rng, tau=2)
    assert all(e is BOTTOM for e in alg.values())


def test_secretary_single(rng):
    hg = Hypergraph(1, [(0,)])
    alg = run_secretary(HMSampler(hg), {0: WeightFunction({0: 1})}, SecretarySchedule.for_k(1), rng, tau=0)
    assert alg == {0: 0}


def _systems(rng):
    hg = gen_random_hypergraph(8, 8, 3, rng)
    yield hg, HMSampler(hg)
    for mat in (gen_random_graphic(5, 7, rng), gen_random_transversal(6, 4, rng)):
        yield mat, DirectedSampler(mat)
    mc = gen_random_matchoid(6, 2, 4, rng)
    yield mc, MatchoidSampler(mc)


def test_feasibility_randomised(rng):
    runs = 0
    for _ in range(3):
        for system, sampler in _systems(rng):
            dists = gen_random_distributions(system, 4, 2, rng)
            shared = {a: dists[0] for a in range(4)}
            for _ in range(40):
                alg, _ = run_prophet_iid(sampler, dists[0], 4, rng, debug=True)
                assert is_feasible(system, alg)
                alg, _ = run_prophet_secretary_single_sample(sampler, dists, rng, debug=True)
                assert is_feasible(system, alg)
                prof = {a: d.sample(rng) for a, d in dists.items()}
                alg = run_secretary(sampler, prof, SecretarySchedule.for_k(sampler.certifier.k), rng, debug=True)
                assert is_feasible(system, alg)
                runs += 3
            assert shared
    assert runs >= 1000
