import random

import pytest
from hypothesis import given, strategies as st

from algentropy.core import StructuralError, whole_group
from algentropy.groups import CyclicGroup, DirectProduct, Q8Group, build, factorize, symmetric3
from algentropy.structure import (FiniteTable, NotASubgroup, abelian_invariants, classify, dedekind_baer_decompose,
                                  egcd, enumerate_subgroups, fc_by_commutator, hamiltonian_oracle,
                                  iwasawa_derived, iwasawa_parameter_grid, p_component, p_decompose_element)

from support import iwasawa_sum_z9, iwasawa, rsum


def _ham(B=None, D=None):
    desc = {"kind": "hamiltonian"}
    if B:
        desc["B"] = {"kind": "cyclic", "n": B}
    if D:
        desc["D"] = {"kind": "cyclic", "n": D}
    return build(desc)


DB_FIXTURES = {
    "q8": (Q8Group, True),
    "q8_z2": (lambda: _ham(B=2), True),
    "q8_z3": (lambda: _ham(D=3), True),
    "q8_z2_z3": (lambda: _ham(B=2, D=3), True),
    "q8_z4": (lambda: DirectProduct([Q8Group(), CyclicGroup(4)]), False),
    "s3": (symmetric3, False),
    "z9_z3": (lambda: iwasawa(3, 2, 1, 1), False),
}


@pytest.mark.parametrize("name", sorted(DB_FIXTURES))
def test_dedekind_baer_agrees_with_subgroup_oracle(name):
    make, expected = DB_FIXTURES[name]
    G = make()
    res = dedekind_baer_decompose(G)
    assert res.hamiltonian == expected == hamiltonian_oracle(G)


def test_dedekind_baer_factors():
    G = _ham(B=2, D=3)
    res = dedekind_baer_decompose(G)
    assert res.B_rank == 1 and res.D_invariants == [3]
    assert len(res.B) * len(res.D) * 8 == G.size()
    doc = res.to_json(G)
    assert doc["verdict"] == "hamiltonian" and doc["B"]["order"] == 2


def test_dedekind_baer_abelian_and_reason():
    assert dedekind_baer_decompose(CyclicGroup(6)).verdict == "abelian"
    res = dedekind_baer_decompose(DirectProduct([Q8Group(), CyclicGroup(4)]))
    assert res.verdict == "not_hamiltonian" and res.reason


def test_classify_finite():
    rep = classify(Q8Group())
    assert rep.quasihamiltonian is True and rep.hamiltonian is True and not rep.abelian
    rep = classify(symmetric3())
    assert rep.quasihamiltonian is False and "nonpermuting_cyclic_pair" in rep.witnesses
    rep = classify(iwasawa(3, 2, 1, 1))
    assert rep.quasihamiltonian is True and rep.hamiltonian is False


def test_classify_infinite_marks_sampled():
    rep = classify(iwasawa_sum_z9())
    assert rep.mode == "truncation+sample"
    assert rep.quasihamiltonian == "sampled-true"
    assert rep.fc is False
    assert classify(rsum(4)).abelian is True


def test_subgroup_enumeration_counts():
    # Q8 has 6 subgroups, S3 has 6, Z(12) has 6
    for G in (Q8Group(), symmetric3(), CyclicGroup(12)):
        assert len(enumerate_subgroups(FiniteTable(G))) == 6


def test_abelian_invariants():
    G = DirectProduct([CyclicGroup(6), CyclicGroup(4)])
    tab = FiniteTable(G)
    assert abelian_invariants(tab, (1 << tab.n) - 1) == [2, 3, 4]
    G = DirectProduct([CyclicGroup(9), CyclicGroup(3), CyclicGroup(3)])
    tab = FiniteTable(G)
    assert abelian_invariants(tab, (1 << tab.n) - 1) == [3, 3, 9]


def test_iwasawa_grid_all_equal():
    grid = iwasawa_parameter_grid(3 ** 5)
    assert grid
    for params in grid:
        rep = iwasawa_derived(*params)
        assert rep.equal, rep.to_json()


def test_iwasawa_grid_respects_constraints():
    for p, n, m, s, k in iwasawa_parameter_grid(2 ** 7, primes=(2,)):
        assert s >= 2 and s < n and p ** (n * k + m) <= 2 ** 7


def test_fc_by_commutator():
    assert fc_by_commutator(iwasawa(3, 2, 1, 1)) is True
    assert fc_by_commutator(iwasawa_sum_z9()) is False
    with pytest.raises(StructuralError):
        fc_by_commutator(Q8Group())


def test_egcd():
    for a, b in [(12, 18), (7, 5), (1, 0), (0, 9)]:
        g, x, y = egcd(a, b)
        assert a * x + b * y == g


@pytest.mark.parametrize("G", [CyclicGroup(60), rsum(30), DirectProduct([Q8Group(), CyclicGroup(15)])],
                         ids=["z60", "sum_z30", "q8_z15"])
def test_primary_decomposition(G):
    rng = random.Random(5)
    for _ in range(200):
        g = G.sample(rng)
        dec = p_decompose_element(G.encode(g), G)
        parts = [G.decode(c) for c in dec.parts.values()]
        prod = G.identity
        for x in parts:
            prod = G.mul(prod, x)
        assert prod == g
        for p, c in dec.parts.items():
            o = G.element_order(G.decode(c))
            assert set(factorize(o)) <= {p}
        assert sum(dec.s[p] * dec.m[p] for p in dec.parts) == (1 if dec.parts else 0)


def test_p_component():
    G = CyclicGroup(12)
    W = whole_group(G)
    assert len(p_component(W, 2)) == 4 and len(p_component(W, 3)) == 3
    with pytest.raises(NotASubgroup) as ei:
        p_component(whole_group(symmetric3()), 2)
    assert len(ei.value.elements) == 4


@given(st.integers(1, 10 ** 6))
def test_decomposition_of_cyclic_generators(n):
    G = CyclicGroup(n)
    dec = p_decompose_element(G.encode(1 % n), G)
    assert dec.order == (n if n > 1 else 1)
    assert set(dec.parts) == set(factorize(n)) if n > 1 else not dec.parts
