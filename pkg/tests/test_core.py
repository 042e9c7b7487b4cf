import itertools
import random

import pytest
from hypothesis import given, strategies as st

from algentropy.core import (AmbientMismatch, BudgetExceeded, StructuralError, closure, commutator_subgroup,
                             generalized_index, intersection, is_normal, is_subgroup, product_set, quotient,
                             subgroup_of, trivial_subgroup, whole_group)
from algentropy.groups import CyclicGroup, DirectProduct, Q8Group, build, symmetric3

from support import iwasawa, rsum

FINITE = {
    "q8": lambda: Q8Group(),
    "s3": symmetric3,
    "z9z3": lambda: iwasawa(3, 2, 1, 1),
    "q8xz2": lambda: DirectProduct([Q8Group(), CyclicGroup(2)]),
    "z6xz4": lambda: DirectProduct([CyclicGroup(6), CyclicGroup(4)]),
}


def _cyclics(G):
    return [subgroup_of(G, [g]) for g in G.elements()]


def test_closure_orders():
    Q = Q8Group()
    assert len(subgroup_of(Q, [1])) == 4
    assert len(subgroup_of(Q, [1, 2])) == 8
    assert len(subgroup_of(Q, [])) == 1
    G = rsum(2)
    assert len(subgroup_of(G, [G.unit(i, 1) for i in range(5)])) == 32


def test_closure_code_api_matches_values():
    G = iwasawa(3, 2, 1, 1)
    F = closure([G.encode((1, 0)), G.encode((0, 1))], G)
    assert len(F) == 27 and F.generators == (G.encode((1, 0)), G.encode((0, 1)))


def test_closure_budget():
    with pytest.raises(BudgetExceeded):
        subgroup_of(CyclicGroup(1000), [1], budget=100)


def test_s3_transposition_product_is_not_a_subgroup():
    G = symmetric3()
    X = subgroup_of(G, [(0, 1)])
    Y = subgroup_of(G, [(1, 1)])
    P = product_set(X, Y)
    assert len(P) == 4
    assert not is_subgroup(P)
    assert not is_subgroup(product_set(Y, X))


def test_product_set_order_q8():
    Q = Q8Group()
    X, Y = subgroup_of(Q, [1]), subgroup_of(Q, [2])
    P = product_set(X, Y)
    assert len(P) == 8 and is_subgroup(P)


@pytest.mark.parametrize("name", sorted(FINITE))
def test_order_formula_and_symmetry(name):
    G = FINITE[name]()
    subs = _cyclics(G)
    for X, Y in itertools.product(subs, repeat=2):
        P = product_set(X, Y)
        if is_subgroup(P):
            assert len(P) * len(intersection(X, Y)) == len(X) * len(Y)
        # XY is a subgroup iff YX is
        assert is_subgroup(P) == is_subgroup(product_set(Y, X))


def test_generalized_index():
    Q = Q8Group()
    U = subgroup_of(Q, [4])
    assert generalized_index(whole_group(Q), U) == 4
    G = rsum(3)
    U = subgroup_of(G, [G.unit(0, 1)])
    T = subgroup_of(G, [G.unit(0, 1), G.unit(1, 1)])
    assert generalized_index(T, U) == 3
    assert generalized_index(product_set(U, subgroup_of(G, [G.unit(2, 1)])), U) == 3


def test_generalized_index_errors():
    G = symmetric3()
    X, Y = subgroup_of(G, [(0, 1)]), subgroup_of(G, [(1, 1)])
    with pytest.raises(StructuralError):
        generalized_index(product_set(X, Y), subgroup_of(G, [(1, 0)]))
    with pytest.raises(AmbientMismatch):
        generalized_index(whole_group(Q8Group()), trivial_subgroup(symmetric3()))


def test_normality_and_commutators():
    G = symmetric3()
    A = subgroup_of(G, [(1, 0)])
    assert is_normal(A, whole_group(G))
    assert not is_normal(subgroup_of(G, [(0, 1)]), whole_group(G))
    assert commutator_subgroup(whole_group(G)).elements == A.elements
    Q = Q8Group()
    assert len(commutator_subgroup(whole_group(Q))) == 2
    assert len(commutator_subgroup(whole_group(iwasawa(3, 2, 1, 1)))) == 3


def test_finite_quotient():
    G = iwasawa(3, 2, 1, 1)
    W = whole_group(G)
    D = commutator_subgroup(W)
    Q = quotient(W, D)
    assert Q.size() == 9
    g, h = (1, 1), (2, 0)
    assert Q.canon(G.mul(g, h)) == Q.mul(Q.canon(g), Q.canon(h))
    S = symmetric3()
    with pytest.raises(StructuralError):
        quotient(whole_group(S), subgroup_of(S, [(0, 1)]))


@given(st.integers(0, 10_000))
def test_random_pair_products_commute_in_quasihamiltonian_groups(seed):
    rng = random.Random(seed)
    G = iwasawa(3, 2, 1, 1)
    x, y = G.sample(rng), G.sample(rng)
    X, Y = subgroup_of(G, [x]), subgroup_of(G, [y])
    assert product_set(X, Y).elements == product_set(Y, X).elements


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 3)), min_size=1, max_size=3))
def test_closure_is_closed_and_minimal(gens):
    G = DirectProduct([CyclicGroup(6), CyclicGroup(4)])
    F = subgroup_of(G, gens)
    vals = F.values
    assert all(G.mul(a, b) in vals for a in vals for b in vals)
    assert all(g in vals for g in gens)
    # order divides |G|
    assert 24 % len(F) == 0
