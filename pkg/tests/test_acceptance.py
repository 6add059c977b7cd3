"""End-to-end acceptance checks; each test prints one PASS/FAIL summary line."""

import random
import time

import pytest

from structramsey import ordering, trees
from structramsey.arrow import check_arrow, check_arrow_hypergraph, is_refutation, smallest_witness, verify_arrow
from structramsey.classes import (
    ORDERED_GRAPH_SIG,
    convex_ctrees,
    equivalence_orders,
    forests,
    linear_orders,
    ordered_ctrees,
    ordered_graphs,
)
from structramsey.constructions import check_amalgamation_property, full_product, product_witness
from structramsey.core import FiniteStructure, Signature, complete_graph, embedding_maps, homomorphism_maps, in_forb, is_embedding, is_isomorphic, linear_order, substructure
from structramsey.hales_jewett import enumerate_lines, hj_number, hj_sweep, points
from structramsey.partite import alpha_embedding, is_template, line_embedding, nr_power, partite_construction, partite_construction_forb, partite_embeddings, partite_lemma_witness

import oracles
from instances import K3, find_triangle_creating, partite_graphs, pgraph, templated_instances, transversal_patterns

JOBS = (1, 4, 8)


def og(n, edges):
    """Graph on ``0 < 1 < ... < n-1``."""
    return FiniteStructure(ORDERED_GRAPH_SIG, n, {
        "E": [e for a, b in edges for e in ((a, b), (b, a))],
        "<": [(i, j) for i in range(n) for j in range(i + 1, n)],
    })


def random_instances(count, seed=20240611, max_emb=14):
    """Seeded random triples ``(C, B, A, r)`` of graphs and ordered graphs
    with at most ``max_emb`` embeddings of ``A`` into ``C``."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, 6)
        p = rng.random()
        es = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        C = og(n, es)
        if rng.random() < 0.5:
            C = C.reduct(["E"])
        b = rng.randint(1, min(4, n))
        B = substructure(C, sorted(rng.sample(range(n), b)))[0]
        A = substructure(B, sorted(rng.sample(range(b), rng.randint(1, min(2, b)))))[0]
        if rng.random() < 0.2:
            # a target not taken from C, so some instances have no copy at all
            B = og(b, [(i, j) for i in range(b) for j in range(i + 1, b) if rng.random() < 0.5])
            B = B if "<" in C.signature.names else B.reduct(["E"])
            A = substructure(B, sorted(rng.sample(range(b), rng.randint(1, min(2, b)))))[0]
        if len(embedding_maps(A, C)) > max_emb:
            continue
        out.append((C, B, A, rng.choice((1, 2, 2, 3))))
    return out


RANDOM = random_instances(500)


@pytest.mark.criterion(1, "Ramsey base case [6] -> ([3])^[2]_2 holds, [5] fails")
def test_criterion_01_ramsey_base_case():
    t = time.perf_counter()
    yes = check_arrow(linear_order(6), linear_order(3), linear_order(2), 2)
    assert yes.holds and time.perf_counter() - t < 60
    t = time.perf_counter()
    no = check_arrow(linear_order(5), linear_order(3), linear_order(2), 2)
    assert not no.holds and time.perf_counter() - t < 60
    assert is_refutation(linear_order(5), linear_order(3), linear_order(2), no.coloring.as_map())
    assert oracles.arrow(linear_order(6), linear_order(3), linear_order(2), 2)
    assert not oracles.arrow(linear_order(5), linear_order(3), linear_order(2), 2)


@pytest.mark.criterion(2, "HJ(2,2) = 2 by exhaustive sweep")
def test_criterion_02_hj_two_two():
    t = time.perf_counter()
    assert hj_number(2, 2, 3) == 2
    res = hj_sweep(2, 2, 3)
    assert [v for _, v, *_ in res.trace] == ["fails", "holds"]
    assert time.perf_counter() - t < 10
    assert not oracles.hj_holds(2, 2, 1) and oracles.hj_holds(2, 2, 2)


@pytest.mark.criterion(3, "sweep and hypergraph backends agree on 500 random instances")
def test_criterion_03_backend_equivalence():
    assert len(RANDOM) >= 500
    holds = 0
    for C, B, A, r in RANDOM:
        assert len(embedding_maps(A, C)) <= 14
        s, h = check_arrow(C, B, A, r), check_arrow_hypergraph(C, B, A, r)
        assert s.holds == h.holds
        holds += s.holds
    # the sample exercises both verdicts
    assert 0 < holds < len(RANDOM)


@pytest.mark.criterion(4, "partite lemma on point in two points, with both claims")
def test_criterion_04_partite_lemma():
    A, B = pgraph([0], [], 1), pgraph([0, 0], [], 1)
    w = partite_lemma_witness(A, B, 2)
    C = w.structure
    assert check_arrow(C.to_structure(), B.to_structure(), A.to_structure(), 2).holds
    m = len(partite_embeddings(A, B))
    assert (w.m, w.d) == (m, 2)
    P = nr_power(B, A, w.d)
    assert P == C
    embs = partite_embeddings(A, B)
    checked = 0
    for alpha in points(m, w.d):
        assert is_embedding(A.to_structure(), P.to_structure(), alpha_embedding(B, A, w.d, alpha))
        checked += 1
    for L in enumerate_lines(m, w.d):
        g = line_embedding(B, A, w.d, L.word)
        assert is_embedding(B.to_structure(), P.to_structure(), g)
        for k in range(1, m + 1):
            assert tuple(g[x] for x in embs[k - 1]) == alpha_embedding(B, A, w.d, L.point(k))
        checked += 1
    assert checked == m ** w.d + len(enumerate_lines(m, w.d))


@pytest.mark.criterion(5, "NR-power: d=1 isomorphism, triangle-creating instance, template property")
def test_criterion_05_nr_power():
    seen = 0
    for B in partite_graphs(5, 3):
        for A in transversal_patterns(B):
            C = nr_power(B, A, 1)
            assert is_isomorphic(C.to_structure(), B.to_structure())
            seen += 1
    assert seen > 1000
    found = find_triangle_creating()
    assert found is not None
    A, B, C = found
    assert in_forb([K3], B.base) and not in_forb([K3], C.base) and not is_template(A, B)
    templated = 0
    for A, B in templated_instances(6):
        if not partite_embeddings(A, B):
            continue
        for d in (1, 2):
            P = nr_power(B, A, d)
            assert is_template(A, P)
            for F in (complete_graph(2), K3):
                if homomorphism_maps(F, P.base, limit=1):
                    assert homomorphism_maps(F, A.base, limit=1)
            templated += 1
    assert templated > 100


@pytest.mark.criterion(6, "partite construction for ordered point and ordered edge")
def test_criterion_06_partite_construction():
    t = time.perf_counter()
    A, B = og(1, []), og(2, [(0, 1)])
    res = partite_construction(A, B, 2)
    assert res.structure in ordered_graphs()
    assert check_arrow(res.structure, B, A, 2).holds
    assert time.perf_counter() - t < 600


@pytest.mark.criterion(7, "triangle-free construction for ordered edge and ordered 2-path")
def test_criterion_07_forbidden_pipeline():
    A, B = og(2, [(0, 1)]), og(3, [(0, 1), (0, 2)])
    ambient = smallest_witness(ordered_graphs(3).members(5), B, A, 2)
    assert ambient is not None
    for amb in (ambient, None):
        res = partite_construction_forb(A, B, 2, [K3], ambient=amb)
        S = res.structure
        assert in_forb([K3], S.reduct(["E"]))
        assert verify_arrow(S, B, A, 2).holds


@pytest.mark.criterion(8, "tree Ramsey: point into cherry minimal at 3 leaves, cherry into cherry")
def test_criterion_08_tree_ramsey():
    res = trees.construct_ramsey_tree(0, (0, 1), 2)
    assert res.size == 3
    SA, SB = trees.tree_to_structure(0), trees.tree_to_structure((0, 1))
    assert check_arrow(trees.tree_to_structure(res.tree), SB, SA, 2).holds
    for C in convex_ctrees().members(2) + ordered_ctrees().members(2):
        assert not check_arrow(C, SB, SA, 2).holds
    t = time.perf_counter()
    res = trees.construct_ramsey_tree((0, 1), (0, 1), 2)
    C = trees.tree_to_structure(res.tree)
    assert check_arrow(C, SB, SB, 2).holds
    assert time.perf_counter() - t < 600


@pytest.mark.criterion(9, "convex-order colorings defeat every small equivalence order and C-structure")
def test_criterion_09_counterexamples():
    for C in equivalence_orders().members(8):
        col = ordering.convex_defeat_equivalence(C)
        assert is_refutation(C, ordering.EQ_TARGET, ordering.EQ_PATTERN, col.as_map())
    for C in ordered_ctrees().members(6):
        if C.size == 0:
            continue
        col = ordering.convex_defeat_ctree(C)
        assert is_refutation(C, ordering.CTREE_TARGET, ordering.CTREE_PATTERN, col.as_map())


@pytest.mark.criterion(10, "amalgamation: LO and ordered graphs pass, forests fail")
def test_criterion_10_amalgamation():
    assert check_amalgamation_property(linear_orders(), 3).holds
    assert check_amalgamation_property(ordered_graphs(), 3).holds
    rep = check_amalgamation_property(forests(), 4)
    assert not rep.holds
    A, B1, B2, e1, e2 = rep.counterexample
    members = forests().members(B1.size + B2.size - A.size)
    assert not oracles.amalgamates(members, A, B1, B2, e1, e2)


@pytest.mark.criterion(11, "two orders lack the ordering property, blocked by the <2 = <1 expansion")
def test_criterion_11_ordering_property():
    from test_ordering import X_PERM

    F = ordering.family("two-orders")
    for bound in range(7):
        res = ordering.check_ordering_property(F, X_PERM, bound)
        assert res.witness is None
        assert res.blocking
        for Y, Xx, Yx in res.blocking:
            assert Yx["<2"] == Yx["<1"] and not embedding_maps(Xx, Yx)


@pytest.mark.criterion(12, "product witness 9x3 grid arrows the 2x2 grid for points")
def test_criterion_12_product_witness():
    sigs = [Signature([("<1", 2)]), Signature([("<2", 2)])]

    def grid(a, b):
        return full_product([linear_order(a, "<1"), linear_order(b, "<2")])

    def pigeonhole(B, A, r):
        return linear_order(r * (B.size - 1) + 1, B.signature.names[0])

    t = time.perf_counter()
    w = product_witness(grid(1, 1), grid(2, 2), 2, sigs, pigeonhole, pigeonhole)
    assert w.structure == grid(9, 3)
    assert check_arrow(w.structure, grid(2, 2), grid(1, 1), 2).holds
    assert time.perf_counter() - t < 300


@pytest.mark.criterion(13, "certificates byte-identical across 1, 4 and 8 workers")
def test_criterion_13_determinism():
    triples = [(linear_order(6), linear_order(3), linear_order(2), 2), (linear_order(5), linear_order(3), linear_order(2), 2)]
    for C, B, A, r in triples + RANDOM:
        certs = {check_arrow(C, B, A, r, jobs=j).dumps() for j in JOBS}
        assert len(certs) == 1
    assert len({hj_sweep(2, 2, 3, jobs=j).dumps() for j in JOBS}) == 1
