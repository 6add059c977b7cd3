import json

import pytest
from hypothesis import given, settings, strategies as st

from structramsey.core import (
    Embedding,
    FiniteStructure,
    Signature,
    automorphisms,
    canonical_form,
    complete_graph,
    cycle_graph,
    disjoint_union,
    embedding_maps,
    enumerate_embeddings,
    graph,
    homomorphism_maps,
    in_forb,
    is_embedding,
    is_irreducible,
    is_isomorphic,
    is_linear_order,
    is_rigid,
    linear_order,
    path_graph,
    substructure,
)
from structramsey.errors import DomainError, SignatureError, StructureError

import oracles

SIG = Signature([("E", 2), ("U", 1)])


@st.composite
def structures(draw, max_size=4, sig=SIG):
    n = draw(st.integers(0, max_size))
    rels = {}
    for name, k in sig:
        from itertools import product

        all_t = list(product(range(n), repeat=k))
        rels[name] = draw(st.lists(st.sampled_from(all_t), unique=True)) if all_t else []
    return FiniteStructure(sig, n, rels)


@st.composite
def graphs_st(draw, max_size=5):
    n = draw(st.integers(1, max_size))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    es = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return graph(n, es)


def test_signature_rejects_bad_input():
    with pytest.raises(SignatureError):
        Signature([("E", 2), ("E", 1)])
    with pytest.raises(SignatureError):
        Signature([("E", -1)])


def test_structure_validates_tuples():
    with pytest.raises(StructureError):
        FiniteStructure(SIG, 2, {"E": [(0, 2)]})
    with pytest.raises(StructureError):
        FiniteStructure(SIG, 2, {"E": [(0,)]})
    with pytest.raises(StructureError):
        FiniteStructure(SIG, 2, {"F": [(0, 1)]})


@settings(max_examples=100, deadline=None)
@given(structures())
def test_json_round_trip(S):
    assert FiniteStructure.from_json(json.loads(json.dumps(S.to_json()))) == S
    assert FiniteStructure.loads(S.dumps()) == S


@settings(max_examples=80, deadline=None)
@given(structures(3), structures(4))
def test_embeddings_match_oracle(A, B):
    assert embedding_maps(A, B) == oracles.embeddings(A, B)


@settings(max_examples=60, deadline=None)
@given(structures(3), structures(3))
def test_homomorphisms_match_oracle(A, B):
    assert sorted(homomorphism_maps(A, B)) == sorted(oracles.homomorphisms(A, B))


@settings(max_examples=40, deadline=None)
@given(structures(2), structures(3), structures(4))
def test_embeddings_compose(A, B, C):
    ab = enumerate_embeddings(A, B)
    bc = enumerate_embeddings(B, C)
    ac = set(enumerate_embeddings(A, C))
    for f in ab:
        for g in bc:
            h = g.compose(f)
            assert h in ac
            assert is_embedding(A, C, h.map)


def test_embedding_order_is_lexicographic():
    maps = embedding_maps(linear_order(2), linear_order(4))
    assert maps == sorted(maps)
    assert len(maps) == 6


def test_embedding_compose_checks_endpoints():
    f = Embedding(linear_order(1), linear_order(2), (0,))
    with pytest.raises(DomainError):
        f.compose(f)


def test_automorphisms():
    assert len(automorphisms(cycle_graph(5))) == 10
    assert len(automorphisms(complete_graph(4))) == 24
    assert is_rigid(linear_order(5))
    assert not is_rigid(path_graph(3))


@settings(max_examples=60, deadline=None)
@given(graphs_st(5), st.permutations(range(5)))
def test_canonical_form_invariant_under_relabelling(G, perm):
    perm = [p for p in perm if p < G.size]
    H = G.relabel(perm)
    assert canonical_form(G) == canonical_form(H)
    assert is_isomorphic(G, H)


@settings(max_examples=60, deadline=None)
@given(graphs_st(4), graphs_st(4))
def test_canonical_form_separates(G, H):
    iso = G.size == H.size and bool(oracles.embeddings(G, H))
    assert (canonical_form(G) == canonical_form(H)) == iso


def test_substructure_and_union():
    P = path_graph(4)
    S, incl = substructure(P, [0, 1, 3])
    assert incl == (0, 1, 3)
    assert S["E"] == {(0, 1), (1, 0)}
    U = disjoint_union(P, P)
    assert U.size == 8 and len(U["E"]) == 12


def test_forb_and_irreducible():
    K3 = complete_graph(3)
    assert in_forb([K3], cycle_graph(5))
    assert not in_forb([K3], complete_graph(4))
    assert is_irreducible(K3)
    assert not is_irreducible(path_graph(3))


def test_linear_order_check():
    assert is_linear_order(linear_order(4), "<")
    assert not is_linear_order(FiniteStructure(Signature([("<", 2)]), 3, {"<": [(0, 1)]}), "<")
