from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from onassign.errors import InvalidInput, ResourceLimit
from onassign.harness import (gen_fixed_profile, gen_random_hypergraph, gen_random_matchoid,
                              gen_random_partition)
from onassign.matroids import GraphicMatroid, Matchoid, PartitionMatroid, hypergraph_as_matchoid
from onassign.model import BOTTOM, Hypergraph, WeightFunction, independent_sets, is_feasible
from onassign.offline import (SubsetRanks, decompose_polytope_point, offline_opt_bruteforce,
                              offline_opt_matroid, solve_hm_lp, solve_matchoid_lp)


def test_bruteforce_zero():
    hg = Hypergraph(3, [(0, 1), (1, 2)])
    asg, val = offline_opt_bruteforce(hg, {0: WeightFunction(), 1: WeightFunction()})
    assert val == 0 and asg == {0: BOTTOM, 1: BOTTOM}


def test_bruteforce_fixture(path_hg, path_profile):
    asg, val = offline_opt_bruteforce(path_hg, path_profile)
    assert val == 3 and asg[1] == 1


def test_triangle_single_minded():
    tri = GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])
    prof = {0: WeightFunction({0: 3}), 1: WeightFunction({1: 2}), 2: WeightFunction({2: 1})}
    assert offline_opt_bruteforce(tri, prof)[1] == 5
    assert offline_opt_matroid(tri, prof)[1] == 5


def test_partition_contention():
    pm = PartitionMatroid([[0], [1]])
    prof = {0: WeightFunction({0: 4}), 1: WeightFunction({0: 3})}
    assert offline_opt_matroid(pm, prof)[1] == 4
    assert offline_opt_matroid(pm, {0: WeightFunction(), 1: WeightFunction()})[1] == 0


def test_budget_guard():
    hg = Hypergraph(50, [(v,) for v in range(50)])
    prof = {a: WeightFunction({e: 1 for e in range(50)}) for a in range(100)}
    with pytest.raises(ResourceLimit):
        offline_opt_bruteforce(hg, prof)


def _exhaustive_opt(system, profile):
    agents = sorted(profile)
    best = 0

    def rec(i, used, val):
        nonlocal best
        if i == len(agents):
            best = max(best, val)
            return
        rec(i + 1, used, val)
        for e in profile[agents[i]]:
            if system.can_add(used, e):
                rec(i + 1, used | {e}, val + profile[agents[i]][e])
    rec(0, frozenset(), 0)
    return best


def test_bruteforce_vs_exhaustive(rng):
    for _ in range(60):
        hg = gen_random_hypergraph(6, 7, 3, rng)
        prof = gen_fixed_profile(hg, 4, rng)
        asg, val = offline_opt_bruteforce(hg, prof)
        assert val == _exhaustive_opt(hg, prof)
        assert is_feasible(hg, asg)


def test_hm_examples(path_hg, path_profile):
    hg = Hypergraph(2, [(0, 1)])
    sol = solve_hm_lp(hg, {0: WeightFunction({0: 1})})
    assert sol.objective == 1 and sol.x[(0, 0)] == 1
    assert solve_hm_lp(path_hg, path_profile).objective == 3
    two = solve_hm_lp(hg, {0: WeightFunction({0: 2}), 1: WeightFunction({0: 1})})
    assert two.objective == 2 and two.x[(0, 0)] == 1 and two.x[(1, 0)] == 0


def test_matchoid_examples(path_hg, path_profile):
    mc = Matchoid(1, [(PartitionMatroid([[0]]), [0])])
    sol = solve_matchoid_lp(mc, {0: WeightFunction({0: 5})})
    assert sol.objective == 5 and sol.y[0] == 1
    assert solve_matchoid_lp(hypergraph_as_matchoid(path_hg), path_profile).objective == 3
    assert solve_matchoid_lp(mc, {0: WeightFunction()}).objective == 0


def _scipy_hm(hg, profile):
    cols = [(a, e) for a in sorted(profile) for e in profile[a].support()]
    c = -np.array([float(profile[a][e]) for a, e in cols])
    rows, b = [], []
    for a in sorted(profile):
        rows.append([1.0 if col[0] == a else 0.0 for col in cols])
        b.append(1.0)
    for v in range(hg.n_nodes):
        row = [1.0 if v in hg.edge_nodes(e) else 0.0 for _, e in cols]
        if any(row):
            rows.append(row)
            b.append(1.0)
    if not cols:
        return 0.0
    return -linprog(c, A_ub=rows, b_ub=b, bounds=(0, None), method="highs").fun


def _scipy_matchoid(mc, profile):
    cols = [(a, e) for a in sorted(profile) for e in profile[a].support()]
    if not cols:
        return 0.0
    c = -np.array([float(profile[a][e]) for a, e in cols])
    rows, b = [], []
    for a in sorted(profile):
        rows.append([1.0 if col[0] == a else 0.0 for col in cols])
        b.append(1.0)
    for mat, active in mc.components:            # every subset, not only flats
        n = mat.ground_size
        for mask in range(1, 1 << n):
            sub = [j for j in range(n) if mask >> j & 1]
            glob = {active[j] for j in sub}
            rows.append([1.0 if e in glob else 0.0 for _, e in cols])
            b.append(mat.rank(sub))
    return -linprog(c, A_ub=rows, b_ub=b, bounds=(0, None), method="highs").fun


def test_lp_objectives_match_scipy(rng):
    for _ in range(40):
        hg = gen_random_hypergraph(7, 8, 3, rng)
        prof = gen_fixed_profile(hg, 5, rng)
        exact = solve_hm_lp(hg, prof, exact=True)
        flt = solve_hm_lp(hg, prof, exact=False)
        ref = _scipy_hm(hg, prof)
        assert float(exact.objective) == pytest.approx(ref, abs=1e-7)
        assert float(flt.objective) == pytest.approx(ref, abs=1e-7)
    for _ in range(25):
        mc = gen_random_matchoid(6, 2, 4, rng)
        prof = gen_fixed_profile(mc, 4, rng)
        assert float(solve_matchoid_lp(mc, prof).objective) == pytest.approx(_scipy_matchoid(mc, prof), abs=1e-7)


def test_lp_dominance_and_mass(rng):
    for _ in range(200):
        hg = gen_random_hypergraph(6, 6, 2, rng)
        prof = gen_fixed_profile(hg, 4, rng)
        sol = solve_hm_lp(hg, prof)
        assert sol.objective >= offline_opt_bruteforce(hg, prof)[1]
        for a in prof:
            assert sum(v for (b, _), v in sol.x.items() if b == a) == 1
            assert all(isinstance(v, Fraction) and v >= 0 for v in sol.x.values())
    for _ in range(60):
        mc = gen_random_matchoid(6, 2, 4, rng)
        prof = gen_fixed_profile(mc, 3, rng)
        sol = solve_matchoid_lp(mc, prof)
        assert sol.objective >= offline_opt_bruteforce(mc, prof)[1]
        for a in prof:
            assert sum(v for (b, _), v in sol.x.items() if b == a) == 1


def test_lp_unique_and_deterministic(rng):
    hg = gen_random_hypergraph(6, 6, 2, rng)
    prof = {a: WeightFunction({e: 1 for e in range(hg.ground_size)}) for a in range(3)}  # heavy ties
    s1, s2 = solve_hm_lp(hg, prof), solve_hm_lp(hg, prof)
    assert s1.x == s2.x


def test_lex_tiebreak_order():
    # among optimal points the lexicographically largest in column order wins;
    # columns run agent-major with bottom first, so agent 0 keeps bottom
    hg = Hypergraph(1, [(0,)])
    prof = {0: WeightFunction({0: 1}), 1: WeightFunction({0: 1})}
    for exact in (True, False):
        sol = solve_hm_lp(hg, prof, exact=exact)
        assert sol.x[(0, BOTTOM)] == 1 and sol.x[(1, 0)] == 1


def test_decompose_examples():
    pm = PartitionMatroid([[0, 1], [2]])
    dec = decompose_polytope_point(pm, {0: 1, 2: 1})
    assert dec.atoms == [(1, (0, 2))]
    assert decompose_polytope_point(pm, {}).atoms == [(1, ())]
    half = decompose_polytope_point(PartitionMatroid([[0, 1]]), {0: Fraction(1, 2), 1: Fraction(1, 2)})
    assert sorted(half.atoms) == [(Fraction(1, 2), (0,)), (Fraction(1, 2), (1,))]


def test_decompose_rejects_outside():
    with pytest.raises(InvalidInput):
        decompose_polytope_point(PartitionMatroid([[0, 1]]), {0: Fraction(2, 3), 1: Fraction(2, 3)})
    with pytest.raises(InvalidInput):
        decompose_polytope_point(PartitionMatroid([[0, 1]]), {0: Fraction(-1, 3)})


def test_decompose_random_points(rng):
    from onassign.harness import gen_random_matroid
    for _ in range(80):
        mat = gen_random_matroid(["partition", "graphic", "transversal"][int(rng.integers(3))], 6, rng)
        sets = independent_sets(mat)
        lam = rng.dirichlet(np.ones(4))
        weights = [Fraction(int(x * 60), 60) for x in lam]
        weights[-1] = 1 - sum(weights[:-1])
        z = {}
        for w, i in zip(weights, rng.choice(len(sets), 4)):
            for e in sets[int(i)]:
                z[e] = z.get(e, 0) + w
        dec = decompose_polytope_point(mat, z)
        assert sum(w for w, _ in dec.atoms) == 1
        assert dec.reconstruct() == {e: v for e, v in z.items() if v}
        assert all(mat.is_independent(s) for _, s in dec.atoms)
        assert len(dec.atoms) <= mat.ground_size + 1


def test_subset_ranks_match_rank(rng):
    gm = GraphicMatroid(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    sr = SubsetRanks(gm, range(4))
    for mask in range(16):
        assert sr.rank[mask] == gm.rank(sr.members(mask))
    with pytest.raises(ResourceLimit):
        SubsetRanks(PartitionMatroid([range(13)]), range(13))
