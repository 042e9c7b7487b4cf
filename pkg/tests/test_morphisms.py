import random

import pytest
from hypothesis import given, strategies as st

from algentropy.core import QuotientAmbient, subgroup_of, whole_group
from algentropy.groups import CyclicGroup, DirectProduct, Q8Group, symmetric3
from algentropy.morphisms import (ComponentMap, Compose, Conjugation, CoordinatePermutation, Identity,
                                  MorphismError, Power, QuotientInduced, Restriction, SemidirectLift, Shift,
                                  TableMap, image_subgroup, induced_quotient_map, invariance_report,
                                  is_automorphism, kernel_in, parse_endomorphism, restrict,
                                  verify_homomorphism)
from algentropy.subgroups import (ComponentwisePower, FiniteWitness, IndexRange, PrimaryComponent, WholeGroup,
                                  derived_witness)

from support import block, iwasawa_sum_z9, iwasawa, rsum


def test_shift_moves_coordinates():
    G = rsum(2)
    phi = Shift(G, 1)
    x = G.element_from_json({"0": 1, "4": 1})
    assert G.element_to_json(phi(x)) == {"1": 1, "5": 1}
    assert phi.injective() and not phi.surjective() and phi.inverse() is None
    assert phi.power(3).descriptor() == {"kind": "shift", "offset": 3}


def test_two_sided_shift_is_invertible():
    G = rsum(3, "Z")
    phi = Shift(G, 1)
    inv = phi.inverse()
    x = G.element_from_json({"-2": 1, "3": 2})
    assert inv(phi(x)) == x and is_automorphism(phi)


def test_negative_shift_on_n_is_rejected():
    with pytest.raises(MorphismError) as ei:
        Shift(rsum(2), -1)
    assert ei.value.path == "/offset"


def test_power_map():
    G = CyclicGroup(12)
    phi = Power(G, 5)
    assert phi(3) == 3 and phi.injective() and phi.inverse()(phi(7)) == 7
    assert not Power(G, 4).injective()


def test_power_on_q8_is_a_homomorphism_only_for_odd_exponent_1_mod_4():
    Q = Q8Group()
    assert verify_homomorphism(Power(Q, 5)).ok
    assert verify_homomorphism(Power(Q, 2)).ok is False


def test_component_map_automorphism_of_q8():
    Q = Q8Group()
    i, j, k = (Q.element_from_json(s) for s in "ijk")
    phi = ComponentMap(Q, [(i, j), (j, k)])
    assert phi(k) == i
    chk = verify_homomorphism(phi)
    assert chk.ok and chk.exhaustive and chk.pairs == 64
    inv = phi.inverse()
    assert all(inv(phi(x)) == x for x in Q.elements())


def test_component_map_conflicts():
    G = CyclicGroup(6)
    with pytest.raises(MorphismError, match="do not define"):
        ComponentMap(G, [(1, 1), (2, 3)])
    with pytest.raises(MorphismError, match="generate"):
        ComponentMap(G, [(2, 2)])
    with pytest.raises(MorphismError):
        ComponentMap(rsum(2), [])


def test_verifier_finds_a_non_homomorphism():
    G = CyclicGroup(5)
    bad = TableMap(G, {x: (x * x) % 5 for x in range(5)})
    chk = verify_homomorphism(bad)
    assert not chk.ok and chk.exhaustive
    a, b = chk.witness
    assert bad(G.mul(a, b)) != G.mul(bad(a), bad(b))


def test_verifier_samples_on_infinite_domains():
    G = rsum(3)
    chk = verify_homomorphism(Shift(G, 2), samples=50)
    assert chk.ok and not chk.exhaustive and chk.pairs == 50


def test_conjugation_inverse_and_image():
    G = symmetric3()
    phi = Conjugation(G, (0, 1))
    assert all(phi.inverse()(phi(x)) == x for x in G.elements())
    R = subgroup_of(G, [(1, 0)])
    assert image_subgroup(phi, R).elements == R.elements


def test_kernel_and_image_of_power():
    G = DirectProduct([CyclicGroup(6), CyclicGroup(4)])
    phi = Power(G, 2)
    W = whole_group(G)
    assert len(image_subgroup(phi, W)) == 6
    assert len(kernel_in(phi, W)) == 4


def test_coordinate_permutation():
    G = rsum(2)
    phi = CoordinatePermutation(G, {"0": 1, "1": 0})
    x = G.element_from_json({"0": 1, "3": 1})
    assert G.element_to_json(phi(x)) == {"1": 1, "3": 1}
    assert phi.power(2)(x) == x


def test_lift_on_iwasawa():
    G = iwasawa_sum_z9()
    phi = SemidirectLift(G, Shift(G.A, 1))
    assert verify_homomorphism(phi, samples=300).ok


# -- invariance --------------------------------------------------------------

def test_shift_tail_is_invariant_not_stable():
    G = rsum(2)
    rep = invariance_report(Shift(G, 1), IndexRange(G, 1))
    assert rep.invariant is True and rep.stable is False and rep.kernel_contained is True


def test_identity_everything_true():
    G = rsum(2)
    rep = invariance_report(Identity(G), IndexRange(G, 3))
    assert (rep.invariant, rep.stable, rep.kernel_contained) == (True, True, True)


def test_negative_two_sided_shift_leaves_the_tail():
    G = rsum(2, "Z")
    rep = invariance_report(Shift(G, -1), IndexRange(G, 0))
    assert rep.invariant is False and rep.witnesses


def test_two_sided_shift_whole_group_is_stable():
    G = rsum(2, "Z")
    rep = invariance_report(Shift(G, 1), WholeGroup(G))
    assert rep.invariant and rep.stable


def test_primary_component_is_fully_invariant():
    G = rsum(6)
    rep = invariance_report(Shift(G, 1), PrimaryComponent(G, 2))
    assert rep.invariant is True and rep.kernel_contained is True


def test_iwasawa_derived_subgroup_invariant_under_lift():
    G = iwasawa_sum_z9()
    phi = SemidirectLift(G, Shift(G.A, 1))
    rep = invariance_report(phi, derived_witness(G))
    assert rep.invariant is True
    assert rep.rule == "verbal subgroup"


def test_finite_report_on_q8_center():
    Q = Q8Group()
    i, j = Q.element_from_json("i"), Q.element_from_json("j")
    phi = ComponentMap(Q, [(i, j), (j, i)])
    Z = subgroup_of(Q, [Q.element_from_json("-1")])
    rep = invariance_report(phi, Z)
    assert (rep.invariant, rep.stable, rep.kernel_contained) == (True, True, True)
    # ⟨i⟩ is moved to ⟨j⟩
    rep = invariance_report(phi, subgroup_of(Q, [i]))
    assert rep.invariant is False and rep.witnesses


def test_finite_report_kernel_not_contained():
    G = CyclicGroup(6)
    rep = invariance_report(Power(G, 3), subgroup_of(G, [3]))
    # ker(x -> 3x) = ⟨2⟩ is not inside ⟨3⟩
    assert rep.invariant is True and rep.kernel_contained is False


def test_unknown_is_reported_as_unknown():
    G = rsum(2)
    phi = CoordinatePermutation(G, {"0": 1, "1": 0})
    rep = invariance_report(phi, ComponentwisePower(G, 2))
    assert rep.to_json()["invariant"] in (True, "unknown")


# -- restriction and quotient ------------------------------------------------

def test_restriction_refuses_non_invariant_and_outside_elements():
    G = rsum(2, "Z")
    with pytest.raises(MorphismError, match="not invariant"):
        Restriction(Shift(G, -1), IndexRange(G, 0))
    r = Restriction(Shift(G, 1), IndexRange(G, 0))
    with pytest.raises(MorphismError, match="outside"):
        r(G.element_from_json({"-1": 1}))


@pytest.mark.parametrize("case", ["q8_center", "z9z3_derived", "s3_rotations"])
def test_induced_map_commutes_with_projection(case):
    if case == "q8_center":
        G = Q8Group()
        i, j, k = (G.element_from_json(s) for s in "ijk")
        phi = ComponentMap(G, [(i, j), (j, k)])
        H = subgroup_of(G, [G.element_from_json("-1")])
    elif case == "z9z3_derived":
        G = iwasawa(3, 2, 1, 1)
        phi = Power(G, 4)
        H = subgroup_of(G, [(3, 0)])
    else:
        G = symmetric3()
        phi = Conjugation(G, (1, 1))
        H = subgroup_of(G, [(1, 0)])
    assert verify_homomorphism(phi).ok
    bar = induced_quotient_map(phi, H)
    Q = bar.domain
    for g in G.elements():
        assert Q.canon(phi(g)) == bar(Q.canon(g))


def test_induced_map_rejects_non_invariant_kernel():
    G = symmetric3()
    phi = Conjugation(G, (1, 0))
    H = subgroup_of(G, [(0, 1)])
    with pytest.raises(MorphismError):
        QuotientInduced(phi, QuotientAmbient(G, FiniteWitness(H)))


def test_restrict_helper_on_finite_subgroup():
    G = rsum(2)
    F = block(G, 2)
    r = restrict(Identity(G), F)
    assert all(r(v) == v for v in F.values)


# -- JSON ----------------------------------------------------------------------

def test_parse_round_trip():
    G = rsum(6)
    desc = {"kind": "compose", "outer": {"kind": "shift", "offset": 2}, "inner": {"kind": "power", "exponent": 5}}
    phi = parse_endomorphism(G, desc)
    assert isinstance(phi, Compose)
    assert phi.descriptor() == desc


@pytest.mark.parametrize("desc, path", [
    ({"kind": "shift", "offset": "x"}, "/offset"),
    ({"kind": "nope"}, "/kind"),
    ({"kind": "power"}, "/exponent"),
    ({"kind": "compose", "outer": {"kind": "identity"}, "inner": {"kind": "bogus"}}, "/inner/kind"),
    ({"kind": "permute", "mapping": [1, 0]}, "/mapping"),
])
def test_parse_errors_have_paths(desc, path):
    with pytest.raises(MorphismError) as ei:
        parse_endomorphism(rsum(2), desc)
    assert ei.value.path == path


def test_parse_rejects_non_homomorphic_component_map():
    G = Q8Group()
    with pytest.raises(MorphismError):
        parse_endomorphism(G, {"kind": "component_map", "images": [["i", "i"], ["j", "i"]]})


def test_parse_rejects_negative_shift():
    with pytest.raises(MorphismError) as ei:
        parse_endomorphism(rsum(2), {"kind": "shift", "offset": -2})
    assert ei.value.path == "/offset"


@given(st.integers(-3, 3), st.integers(0, 10_000))
def test_two_sided_shift_is_a_homomorphism(k, seed):
    G = rsum(4, "Z")
    rng = random.Random(seed)
    a, b = G.sample(rng), G.sample(rng)
    phi = Shift(G, k)
    assert phi(G.mul(a, b)) == G.mul(phi(a), phi(b))
    assert phi.power(2)(a) == phi(phi(a))


@given(st.integers(1, 30), st.integers(0, 29))
def test_power_composes_multiplicatively(u, x):
    G = CyclicGroup(30)
    assert Power(G, u).power(2)(x) == Power(G, u)(Power(G, u)(x))
