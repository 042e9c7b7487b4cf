"""Subgroup witnesses: finite subgroups and structured (possibly infinite) ones.

A witness answers membership, supplies canonical coset representatives when
the subgroup is normal, and intersects with finite subgroups.  Structured
witnesses cover the componentwise subgroups needed by the Addition-Theorem
fixtures: primary components, tails of a restricted sum, and powers.

JSON forms::

    {"kind": "finite", "generators": [<element>, ...]}
    {"kind": "whole"} | {"kind": "trivial"}
    {"kind": "primary", "p": 2}
    {"kind": "index_range", "from": 1}
    {"kind": "power", "exponent": 3}
    {"kind": "derived"}
"""
from __future__ import annotations

import math

from .core import (AmbientGroup, FiniteCosetWitness, FiniteSubgroup, StructuralError,
                   closure_values, commutator_subgroup, subgroup_from_set, subgroup_of, whole_group)
from .groups import (CyclicGroup, DescriptorError, DirectProduct, Q8Group, RestrictedSum,
                     SemidirectProduct, StructuralQuotientGroup, factorize)


def infinite_exponent(G: AmbientGroup) -> int:
    """lcm of the exponents of all restricted-sum components (1 if G is finite)."""
    if G.is_finite:
        return 1
    if isinstance(G, RestrictedSum):
        return G.component.exponent()
    if isinstance(G, DirectProduct):
        return math.lcm(*[infinite_exponent(f) for f in G.factors])
    if isinstance(G, SemidirectProduct):
        return infinite_exponent(G.A)
    if isinstance(G, StructuralQuotientGroup):
        return infinite_exponent(G.reduced)
    raise StructuralError(f"cannot analyse {G.descriptor().get('kind')}")


def _p_split(o: int, p: int) -> tuple[int, int]:
    pr = 1
    while o % p == 0:
        o //= p
        pr *= p
    return pr, o


def p_prime_part(G: AmbientGroup, g, p: int):
    """The factor of g whose order is coprime to p."""
    o = G.element_order(g)
    pr, q = _p_split(o, p)
    if q == 1:
        return G.identity
    if pr == 1:
        return g
    return G.power(g, pr * pow(pr, -1, q))


class Witness:
    """Base class; ``G`` is the ambient group."""

    G: AmbientGroup
    normal = True

    def contains(self, g) -> bool:
        raise NotImplementedError

    def canonical(self, g):
        raise NotImplementedError

    def is_finite(self) -> bool:
        raise NotImplementedError

    def finite_index(self, base: AmbientGroup | None = None) -> bool:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def meet(self, F: FiniteSubgroup) -> FiniteSubgroup:
        """U ∩ H for a finite subgroup U."""
        return subgroup_from_set(F.ambient, (v for v in F.values if self.contains(v)))

    def finite_subgroup(self) -> FiniteSubgroup:
        """H itself, when H is finite."""
        if self.G.is_finite:
            return subgroup_from_set(self.G, (g for g in self.G.elements() if self.contains(g)))
        raise StructuralError(f"{self.describe()} is not enumerable")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.describe()}>"


class FiniteWitness(Witness):
    def __init__(self, H: FiniteSubgroup, normal: bool | None = None):
        from .core import is_normal
        self.H = H
        self.G = H.ambient
        if normal is None:
            if self.G.is_finite:
                normal = is_normal(H, list(self.G.elements()))
            else:
                win = frozenset().union(*(self.G.support(v) for v in H.values))
                normal = is_normal(H, self.G.normality_generators(win))
        self.normal = normal
        self._coset = FiniteCosetWitness(H)

    def contains(self, g):
        return g in self.H.values

    def canonical(self, g):
        if not self.normal:
            raise StructuralError("cosets of a non-normal subgroup")
        return self._coset.canonical(g)

    def is_finite(self):
        return True

    def finite_index(self, base=None):
        return self.G.is_finite

    def describe(self):
        return {"kind": "finite", "generators": [self.G.element_to_json(g) for g in self.H.generator_values]}

    def finite_subgroup(self):
        return self.H

    def meet(self, F):
        return subgroup_from_set(F.ambient, F.values & self.H.values)


class WholeGroup(Witness):
    def __init__(self, G):
        self.G = G

    def contains(self, g):
        return True

    def canonical(self, g):
        return self.G.identity

    def is_finite(self):
        return self.G.is_finite

    def finite_index(self, base=None):
        return True

    def describe(self):
        return {"kind": "whole"}

    def meet(self, F):
        return F

    def finite_subgroup(self):
        return whole_group(self.G)


class TrivialWitness(Witness):
    def __init__(self, G):
        self.G = G

    def contains(self, g):
        return g == self.G.identity

    def canonical(self, g):
        return g

    def is_finite(self):
        return True

    def finite_index(self, base=None):
        return self.G.is_finite

    def describe(self):
        return {"kind": "trivial"}

    def finite_subgroup(self):
        return subgroup_of(self.G, [])


class PrimaryComponent(Witness):
    """G_p, the elements of p-power order.  Cosets are represented by the
    p'-part, which presumes G_p is a direct factor (torsion quasihamiltonian G)."""

    def __init__(self, G, p: int):
        from .groups import is_prime
        if not is_prime(p):
            raise DescriptorError(f"p = {p} is not prime", "/p")
        self.G, self.p = G, p

    def contains(self, g):
        o = self.G.element_order(g)
        return _p_split(o, self.p)[1] == 1

    def canonical(self, g):
        return p_prime_part(self.G, g, self.p)

    def is_finite(self):
        return self.G.is_finite or infinite_exponent(self.G) % self.p != 0

    def finite_index(self, base=None):
        e = infinite_exponent(self.G)
        return self.G.is_finite or set(factorize(e)) <= {self.p}

    def describe(self):
        return {"kind": "primary", "p": self.p}


class IndexRange(Witness):
    """Elements of a restricted sum supported on indices >= ``lo``."""

    def __init__(self, G, lo: int):
        if not hasattr(G, "index_set"):
            raise StructuralError("index ranges need a restricted-sum ambient")
        self.G, self.lo = G, lo

    @property
    def is_whole(self) -> bool:
        return self.G.index_set == "N" and self.lo <= 0

    def contains(self, g):
        return all(i >= self.lo for i, _ in g)

    def canonical(self, g):
        return tuple((i, c) for i, c in g if i < self.lo)

    def is_finite(self):
        return False

    def finite_index(self, base=None):
        return self.G.index_set == "N"

    def describe(self):
        return {"kind": "index_range", "from": self.lo}


def _map_coords(G, g, f):
    """Apply ``f(n, residue)`` to every cyclic coordinate (A-part only for
    semidirect products)."""
    if isinstance(G, CyclicGroup):
        return f(G.n, g)
    if isinstance(G, StructuralQuotientGroup):
        return _map_coords(G.reduced, g, f)
    if isinstance(G, DirectProduct):
        return tuple(_map_coords(h, x, f) for h, x in zip(G.factors, g))
    if isinstance(G, RestrictedSum):
        e = G.component.identity
        return tuple((i, y) for i, c in g if (y := _map_coords(G.component, c, f)) != e)
    if isinstance(G, SemidirectProduct):
        return (_map_coords(G.A, g[0], f), g[1])
    raise StructuralError(f"no componentwise structure on {G.descriptor().get('kind')}")


def _all_coords(G, g, pred) -> bool:
    ok = True

    def check(n, a):
        nonlocal ok
        ok = ok and pred(n, a)
        return a

    _map_coords(G, g, check)
    return ok


def _coord_moduli(G) -> list[tuple[int, bool]]:
    """(modulus, lies in an infinite restricted sum) for each cyclic coordinate kind."""
    if isinstance(G, CyclicGroup):
        return [(G.n, False)]
    if isinstance(G, StructuralQuotientGroup):
        return _coord_moduli(G.reduced)
    if isinstance(G, DirectProduct):
        return [x for f in G.factors for x in _coord_moduli(f)]
    if isinstance(G, RestrictedSum):
        return [(n, True) for n, _ in _coord_moduli(G.component)]
    if isinstance(G, SemidirectProduct):
        return _coord_moduli(G.A)
    if isinstance(G, Q8Group):
        raise StructuralError("Q8 has no componentwise structure")
    raise StructuralError(f"no componentwise structure on {G.descriptor().get('kind')}")


class ComponentwisePower(Witness):
    """G^e for abelian G, or A^e inside a semidirect product A ⋊ Z(m).

    In each cyclic coordinate Z(n) this is the subgroup gcd(e, n)·Z(n); the
    coset representative reduces the residue modulo gcd(e, n).
    """

    def __init__(self, G, e: int):
        if e < 1:
            raise DescriptorError("exponent must be positive", "/exponent")
        self.G, self.e = G, e
        self._mods = _coord_moduli(G)
        if not (G.is_abelian or isinstance(G, SemidirectProduct)):
            raise StructuralError("componentwise powers need an abelian or semidirect ambient")

    def contains(self, g):
        if isinstance(self.G, SemidirectProduct) and g[1] != 0:
            return False
        return _all_coords(self.G, g, lambda n, a: a % math.gcd(self.e, n) == 0)

    def canonical(self, g):
        return _map_coords(self.G, g, lambda n, a: a % math.gcd(self.e, n))

    def is_finite(self):
        return all(self.e % n == 0 for n, inf in self._mods if inf)

    def finite_index(self, base=None):
        return all(math.gcd(self.e, n) == 1 for n, inf in self._mods if inf)

    def describe(self):
        return {"kind": "power", "exponent": self.e}


def derived_witness(G) -> Witness:
    """G′ as a witness: exact for finite G, A^{p^s} for Iwasawa builds."""
    if G.is_abelian:
        return TrivialWitness(G)
    if G.is_finite:
        return FiniteWitness(commutator_subgroup(whole_group(G)), normal=True)
    iw = getattr(G, "iwasawa", None)
    if iw is not None:
        p, _, _, s = iw
        return ComponentwisePower(G, p ** s)
    raise StructuralError("derived subgroup not computable for this group")


def parse_witness(G, desc: dict, path: str = "") -> Witness:
    if not isinstance(desc, dict):
        raise DescriptorError("subgroup must be an object", path)
    kind = desc.get("kind")
    if kind == "whole":
        return WholeGroup(G)
    if kind == "trivial":
        return TrivialWitness(G)
    if kind == "finite":
        gens = desc.get("generators")
        if not isinstance(gens, list):
            raise DescriptorError("'generators' must be a list", f"{path}/generators")
        vals = [G.element_from_json(g) for g in gens]
        return FiniteWitness(subgroup_of(G, vals))
    if kind == "primary":
        return PrimaryComponent(G, desc.get("p", 0))
    if kind == "index_range":
        return IndexRange(G, desc.get("from", 0))
    if kind == "power":
        return ComponentwisePower(G, desc.get("exponent", 0))
    if kind == "derived":
        return derived_witness(G)
    raise DescriptorError(f"unknown subgroup kind {kind!r}", f"{path}/kind")


def span(G, values) -> FiniteSubgroup:
    return subgroup_of(G, list(values))


def generated_values(G, values) -> set:
    return closure_values(list(values), G)
