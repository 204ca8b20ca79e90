import itertools

import numpy as np
import pytest

from onassign.certifiers import (NULL, Certificate, GraphicCertifier, HypergraphCertifier, MatchoidCertifier,
                                 PartitionCertifier, TransversalCertifier, blocking_count, check_directedness,
                                 graphic_certifier, hypergraph_certifier, matroid_certifier, orient_forest,
                                 partition_certifier, transversal_certifier, verify_certification)
from onassign.errors import InvalidCertificate
from onassign.harness import (gen_random_graphic, gen_random_hypergraph, gen_random_matchoid,
                              gen_random_partition, gen_random_transversal)
from onassign.matroids import GraphicMatroid, Matchoid, PartitionMatroid, TransversalMatroid, hypergraph_as_matchoid
from onassign.model import Hypergraph, independent_sets


def test_hypergraph_examples():
    hg = Hypergraph(5, [(1, 2), (2, 3), (3, 4)])
    c = hypergraph_certifier(hg)
    e, f, g = (c.certificate(i) for i in range(3))
    assert c.blocks(e, e)
    assert c.blocks(e, f)
    assert not c.blocks(e, g)
    assert c.k == 2


def test_partition_examples():
    pm = PartitionMatroid([[0, 1], [2]])
    c = partition_certifier(pm)
    assert c.blocks(c.certificate([0], 0), c.certificate([1, 2], 1))
    assert not c.blocks(c.certificate([0], 0), c.certificate([2], 2))
    rep = check_directedness(c, pm, 1)
    assert rep["max_count"] == 1 and rep["holds"]


def test_orient_path():
    gm = GraphicMatroid(4, [(1, 2), (2, 3)])
    assert orient_forest(gm, [0, 1]) == {0: (1, 2), 1: (2, 3)}
    c = graphic_certifier(gm)
    cert = c.certificate([0, 1], 0)
    assert c.head(cert) == 2
    other = GraphicMatroid(4, [(1, 2), (2, 3), (0, 2)])
    c2 = graphic_certifier(other)
    assert c2.blocks(c2.certificate([0, 1], 0), c2.certificate([2], 2))


def test_orient_rejects_cycle():
    tri = GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(InvalidCertificate):
        graphic_certifier(tri).certificate([0, 1, 2], 0)


def test_graphic_directedness(rng):
    tri = GraphicMatroid(4, [(0, 1), (1, 2), (0, 2), (2, 3), (1, 3)])
    rep = check_directedness(graphic_certifier(tri), tri, 2)
    assert rep["mode"] == "exhaustive" and rep["max_count"] == 2
    for _ in range(5):
        gm = gen_random_graphic(6, 9, rng)
        assert check_directedness(graphic_certifier(gm), gm, 2, trials=300, rng=rng)["holds"]


def test_transversal_examples():
    tm = TransversalMatroid(3, [[0], [1], [2]])
    c = transversal_certifier(tm)
    x = c.certificate([0, 1], 0)
    assert c.blocks(x, x)
    assert not c.blocks(c.certificate([0, 1], 0), c.certificate([0, 1], 1))


def test_transversal_directedness(rng):
    for _ in range(15):
        tm = gen_random_transversal(int(rng.integers(2, 7)), int(rng.integers(2, 5)), rng)
        rep = check_directedness(transversal_certifier(tm), tm, 2)
        assert rep["mode"] == "exhaustive" and rep["holds"], rep


def test_identity_count():
    pm = PartitionMatroid([[0], [1]])
    c = partition_certifier(pm)
    assert blocking_count(c, [0], Certificate((0,), 0)) == 1


def test_invalid_certificates():
    pm = PartitionMatroid([[0, 1], [2]])
    c = partition_certifier(pm)
    with pytest.raises(InvalidCertificate):
        c.certificate([0, 1], 0)
    with pytest.raises(InvalidCertificate):
        c.certificate([2], 0)
    with pytest.raises(InvalidCertificate):
        hypergraph_certifier(Hypergraph(2, [(0, 1)])).validate(Certificate(0, 1))


def _systems(rng):
    """(system, certifier, list of certificates) for exhaustive axiom checks."""
    out = []
    hg = gen_random_hypergraph(6, 8, 3, rng)
    hc = hypergraph_certifier(hg)
    out.append((hg, hc, [hc.certificate(e) for e in range(hg.ground_size)]))
    for mat in (gen_random_partition(6, 3, rng), gen_random_graphic(4, 6, rng), gen_random_transversal(6, 3, rng)):
        cert = matroid_certifier(mat)
        nodes = [Certificate(s, e) for s in independent_sets(mat) if s for e in s]
        out.append((mat, cert, nodes))
    mc = gen_random_matchoid(6, 2, 4, rng)
    cert = MatchoidCertifier(mc)
    out.append((mc, cert, _all_bundles(mc, cert)))
    return out


def _all_bundles(mc, cert):
    out = []
    for e in range(mc.ground_size):
        choices = []
        for i, (mat, active) in enumerate(mc.components):
            if mc.local(i, e) is None:
                choices.append([()])
            else:
                le = mc.local(i, e)
                choices.append([tuple(sorted(active[j] for j in s)) for s in independent_sets(mat) if le in s])
        for sets in itertools.product(*choices):
            out.append(cert.bundle(sets, e))
    return out


def test_axioms_exhaustive(rng):
    for _ in range(3):
        for system, cert, nodes in _systems(rng):
            for c in nodes:
                cert.validate(c)                                        # (a)
                assert not cert.blocks(NULL, c) and not cert.blocks(c, NULL)
            by_elem = {}
            for c in nodes:
                by_elem.setdefault(c.element, []).append(c)
            for group in by_elem.values():                              # (b)
                for c1 in group:
                    for c2 in group:
                        assert cert.blocks(c1, c2)
            for c1, c2 in itertools.product(nodes, repeat=2):           # (c) for pairs
                if not cert.blocks(c1, c2) and not cert.blocks(c2, c1):
                    assert system.is_independent([c1.element, c2.element])


def test_certification_examples():
    hg = Hypergraph(5, [(1, 2), (2, 3), (3, 4)])
    c = hypergraph_certifier(hg)
    assert verify_certification(c, hg, [])
    assert verify_certification(c, hg, [c.certificate(0), c.certificate(2)])
    assert not verify_certification(c, hg, [c.certificate(0), c.certificate(0)])


def test_random_certifications_are_independent(rng):
    """A certification of length t yields an independent set of size t."""
    for system, cert, nodes in _systems(rng):
        for _ in range(10_000):
            seq = []
            for i in rng.permutation(len(nodes))[:8]:
                cand = nodes[int(i)]
                if not any(cert.blocks(prev, cand) for prev in seq):
                    seq.append(cand)
            assert verify_certification(cert, system, seq)
            elems = [c.element for c in seq]
            assert len(set(elems)) == len(seq) and system.is_independent(elems)


def test_matchoid_single_component_matches():
    pm = PartitionMatroid([[0, 1], [2]])
    mc = Matchoid(3, [(pm, [0, 1, 2])])
    mcert = MatchoidCertifier(mc)
    pc = partition_certifier(pm)
    sets = [s for s in independent_sets(pm) if s]
    for s1, s2 in itertools.product(sets, repeat=2):
        for e1, e2 in itertools.product(s1, s2):
            assert mcert.blocks(mcert.bundle([s1], e1), mcert.bundle([s2], e2)) == \
                pc.blocks(pc.certificate(s1, e1), pc.certificate(s2, e2))


def test_matchoid_hypergraph_equivalence(rng):
    for _ in range(5):
        hg = gen_random_hypergraph(6, 8, 2, rng)
        mc = hypergraph_as_matchoid(hg)
        mcert, hc = MatchoidCertifier(mc), hypergraph_certifier(hg)
        assert mcert.k == hg.k
        bundles = _all_bundles(mc, mcert)
        for b1, b2 in itertools.product(bundles, repeat=2):
            assert mcert.blocks(b1, b2) == hc.blocks(hc.certificate(b1.element), hc.certificate(b2.element))


def test_matchoid_directedness(rng):
    """Bundles cut from one independent set I block any probe at most k times."""
    for _ in range(4):
        mc = gen_random_matchoid(5, 2, 4, rng)
        cert = MatchoidCertifier(mc)
        probes = _all_bundles(mc, cert)
        for ind in independent_sets(mc):
            bundles = [cert.bundle([tuple(f for f in ind if mc.local(i, f) is not None)
                                    if mc.local(i, e) is not None else ()
                                    for i in range(len(mc.components))], e) for e in ind]
            for probe in probes:
                assert sum(cert.blocks(b, probe) for b in bundles) <= cert.k


def test_matchoid_bundle_validation():
    pm = PartitionMatroid([[0, 1]])
    mc = Matchoid(3, [(pm, [0, 1]), (PartitionMatroid([[0], [1]]), [1, 2])])
    cert = MatchoidCertifier(mc)
    with pytest.raises(InvalidCertificate):
        cert.bundle([(0,), (1,)], 0)      # 0 inactive in component 1
    with pytest.raises(InvalidCertificate):
        cert.bundle([(0, 1), (1,)], 1)    # dependent in component 0
    cert.bundle([(1,), (1, 2)], 1)


def test_canonical_fixture(canonical_certifier):
    pm = PartitionMatroid([[0, 1], [2]])
    cc = canonical_certifier(pm)
    nodes = cc.nodes()
    for c in nodes:
        assert cc.blocks(c, c)
    assert verify_certification(cc, pm, nodes[:1])
    assert not verify_certification(cc, pm, nodes[:2])
