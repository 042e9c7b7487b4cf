"""Group substrate: element codes, ambient groups, finite subgroups and quotients.

Elements travel through the public API as ``ElementCode`` byte strings.  Each
ambient group also has an internal *value* representation (plain hashable
Python objects) used by the arithmetic; ``encode``/``decode`` convert between
the two.  Byte-lexicographic order on codes is the total order used for every
deterministic listing and for minimal coset representatives.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Iterator, Sequence

ElementCode = bytes

DEFAULT_BUDGET = 1 << 20
ORDER_CAP = 1 << 24


class DecodeError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """A finite computation grew past its element budget."""

    def __init__(self, what: str, budget: int):
        super().__init__(f"{what}: element budget {budget} exceeded")
        self.budget = budget


class StructuralError(ValueError):
    """An input violates a structural precondition (normality, coset union, ...)."""


class AmbientMismatch(ValueError):
    pass


class AmbientGroup(ABC):
    """A group with computable arithmetic, possibly infinite but locally finite."""

    #: structural flags, refined by subclasses
    is_finite: bool = True

    # ---- value-level arithmetic -------------------------------------------------
    @property
    @abstractmethod
    def identity(self) -> Hashable: ...

    @abstractmethod
    def mul(self, a, b): ...

    @abstractmethod
    def inv(self, a): ...

    @abstractmethod
    def _encode_into(self, a, out: bytearray) -> None: ...

    @abstractmethod
    def _decode_from(self, buf: bytes, pos: int) -> tuple[Any, int]: ...

    @abstractmethod
    def descriptor(self) -> dict: ...

    @property
    @abstractmethod
    def is_abelian(self) -> bool: ...

    def size(self) -> int | None:
        return None

    def elements(self) -> Iterator:
        raise StructuralError(f"{self} is infinite; no element enumeration")

    def sample(self, rng) -> Any:
        raise NotImplementedError

    def support(self, a) -> frozenset:
        """Coordinate indices used by ``a`` (restricted sums only)."""
        return frozenset()

    def exponent(self) -> int:
        """Least common multiple of all element orders."""
        if not self.is_finite:
            raise NotImplementedError
        e = 1
        for x in self.elements():
            e = math.lcm(e, self.element_order(x))
        return e

    def normality_generators(self, window: frozenset) -> list:
        """Elements whose conjugation action decides normality of any subgroup
        supported inside ``window``."""
        if self.is_finite:
            return list(self.elements())
        raise NotImplementedError

    def lowerable(self) -> bool:
        return False

    # element JSON (friendly structured form)
    def element_to_json(self, a) -> Any:
        return self.encode(a).hex()

    def element_from_json(self, obj) -> Any:
        raise DecodeError(f"no structured element syntax for {self}")

    # ---- derived value-level helpers -------------------------------------------
    def eq(self, a, b) -> bool:
        return a == b

    def power(self, a, k: int):
        if k < 0:
            a, k = self.inv(a), -k
        result = self.identity
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def element_order(self, a, cap: int = ORDER_CAP) -> int:
        e = self.identity
        x = a
        n = 1
        while x != e:
            x = self.mul(x, a)
            n += 1
            if n > cap:
                raise BudgetExceeded("order_of", cap)
        return n

    def commutator(self, a, b):
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def conjugate(self, g, h):
        """g h g^-1"""
        return self.mul(self.mul(g, h), self.inv(g))

    def contains(self, a) -> bool:
        try:
            return self.decode(self.encode(a)) == a
        except Exception:
            return False

    # ---- encoding ----------------------------------------------------------------
    def encode(self, a) -> ElementCode:
        out = bytearray()
        self._encode_into(a, out)
        return bytes(out)

    def decode(self, code: ElementCode):
        if not isinstance(code, (bytes, bytearray)):
            raise DecodeError(f"element code must be bytes, got {type(code).__name__}")
        try:
            value, pos = self._decode_from(bytes(code), 0)
        except (IndexError, ValueError) as exc:
            raise DecodeError(f"malformed code {bytes(code).hex()} for {self}: {exc}") from None
        if pos != len(code):
            raise DecodeError(f"trailing bytes in code {bytes(code).hex()} for {self}")
        return value

    # ---- code-level API ------------------------------------------------------------
    @property
    def identity_code(self) -> ElementCode:
        return self.encode(self.identity)

    def multiply(self, g: ElementCode, h: ElementCode) -> ElementCode:
        return self.encode(self.mul(self.decode(g), self.decode(h)))

    def inverse(self, g: ElementCode) -> ElementCode:
        return self.encode(self.inv(self.decode(g)))

    def order_of(self, g: ElementCode) -> int:
        return self.element_order(self.decode(g))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor()}>"


# ---------------------------------------------------------------------------
# finite subgroups and product sets
# ---------------------------------------------------------------------------

def _sorted_codes(G: AmbientGroup, values: Iterable) -> tuple[ElementCode, ...]:
    return tuple(sorted(G.encode(v) for v in values))


@dataclass(frozen=True, eq=False)
class FiniteSubgroup:
    """A finite subgroup of ``ambient``; ``elements`` sorted by code."""

    ambient: AmbientGroup
    elements: tuple[ElementCode, ...]
    generators: tuple[ElementCode, ...] = ()

    @classmethod
    def from_values(cls, G: AmbientGroup, values: Iterable, generators: Iterable = ()) -> "FiniteSubgroup":
        return cls(G, _sorted_codes(G, set(values)), tuple(G.encode(g) for g in generators))

    @cached_property
    def values(self) -> frozenset:
        return frozenset(self.ambient.decode(c) for c in self.elements)

    @cached_property
    def generator_values(self) -> tuple:
        return tuple(self.ambient.decode(c) for c in self.generators)

    @cached_property
    def codeset(self) -> frozenset:
        return frozenset(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, code: ElementCode) -> bool:
        return code in self.codeset

    def has_value(self, v) -> bool:
        return v in self.values

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteSubgroup) and other.ambient is self.ambient
                and other.elements == self.elements)

    def __hash__(self) -> int:
        return hash((id(self.ambient), self.elements))

    def __repr__(self) -> str:
        return f"FiniteSubgroup(order={len(self)}, gens={[g.hex() for g in self.generators]})"


@dataclass(frozen=True, eq=False)
class ProductSet:
    """Exact set product of ``factors`` (in order); need not be a subgroup."""

    elements: tuple[ElementCode, ...]
    factors: tuple[FiniteSubgroup, ...]

    @property
    def ambient(self) -> AmbientGroup:
        return self.factors[0].ambient

    @cached_property
    def codeset(self) -> frozenset:
        return frozenset(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, code) -> bool:
        return code in self.codeset


def multiply(g: ElementCode, h: ElementCode, G: AmbientGroup) -> ElementCode:
    return G.multiply(g, h)


def order_of(g: ElementCode, G: AmbientGroup) -> int:
    return G.order_of(g)


def closure_values(gens: Sequence, G: AmbientGroup, budget: int = DEFAULT_BUDGET) -> set:
    """Worklist saturation of ``{e}`` under right multiplication by ``gens``.

    Every element in scope has finite order, so the generated monoid is the
    generated subgroup.
    """
    e = G.identity
    seen = {e}
    gens = [g for g in dict.fromkeys(gens) if g != e]
    frontier = [e]
    mul = G.mul
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > budget:
            raise BudgetExceeded("closure", budget)
        frontier = nxt
    return seen


def closure(gens: Sequence[ElementCode], G: AmbientGroup, budget: int = DEFAULT_BUDGET) -> FiniteSubgroup:
    if budget < 1:
        raise ValueError("budget must be >= 1")
    vals = [G.decode(g) for g in gens]
    return FiniteSubgroup.from_values(G, closure_values(vals, G, budget), vals)


def subgroup_of(G: AmbientGroup, gen_values: Sequence, budget: int = DEFAULT_BUDGET) -> FiniteSubgroup:
    """Value-level convenience for :func:`closure`."""
    return FiniteSubgroup.from_values(G, closure_values(list(gen_values), G, budget), gen_values)


def greedy_generators(G: AmbientGroup, values: Iterable) -> list:
    """A small generating list for a finite subgroup given as a value set."""
    vals = sorted(set(values), key=G.encode)
    current = {G.identity}
    gens: list = []
    for x in vals:
        if x not in current:
            gens.append(x)
            current = closure_values(gens, G)
    return gens


def subgroup_from_set(G: AmbientGroup, values: Iterable) -> FiniteSubgroup:
    vals = set(values)
    return FiniteSubgroup.from_values(G, vals, greedy_generators(G, vals))


def _same_ambient(*subs) -> AmbientGroup:
    G = subs[0].ambient
    for s in subs[1:]:
        if s.ambient is not G:
            raise AmbientMismatch("operands live in different ambient groups")
    return G


def product_set(X: FiniteSubgroup, Y: FiniteSubgroup) -> ProductSet:
    G = _same_ambient(X, Y)
    vals = {G.mul(x, y) for x in X.values for y in Y.values}
    return ProductSet(_sorted_codes(G, vals), (X, Y))


def is_subgroup(S: ProductSet | FiniteSubgroup) -> bool:
    if isinstance(S, FiniteSubgroup):
        return True
    G = S.ambient
    vals = {G.decode(c) for c in S.elements}
    if G.identity not in vals:
        return False
    gens = [g for F in S.factors for g in F.generator_values]
    # a set containing e and closed under right multiplication by generators
    # of the group it generates is that group
    return all(G.mul(x, g) in vals for x in vals for g in gens)


def generalized_index(T: ProductSet | FiniteSubgroup, U: FiniteSubgroup) -> int:
    """Number of right cosets ``Ut`` making up ``T``; the partition is validated."""
    G = U.ambient
    if T.ambient is not G:
        raise AmbientMismatch("operands live in different ambient groups")
    remaining = {G.decode(c) for c in T.elements}
    if not U.values <= remaining:
        raise StructuralError("U is not contained in T")
    count = 0
    for c in T.elements:
        t = G.decode(c)
        if t not in remaining:
            continue
        coset = {G.mul(u, t) for u in U.values}
        if not coset <= remaining:
            raise StructuralError(f"T is not a union of right cosets of U (at {c.hex()})")
        remaining -= coset
        count += 1
    return count


def is_normal(H: FiniteSubgroup, within: FiniteSubgroup | Sequence) -> bool:
    G = H.ambient
    if isinstance(within, FiniteSubgroup):
        conj = within.generator_values or tuple(within.values)
    else:
        conj = [G.decode(w) if isinstance(w, (bytes, bytearray)) else w for w in within]
    hs = H.generator_values or tuple(H.values)
    return all(G.conjugate(g, h) in H.values for g in conj for h in hs)


def commutator_subgroup(F: FiniteSubgroup) -> FiniteSubgroup:
    G = F.ambient
    comms = {G.commutator(a, b) for a in F.values for b in F.values}
    return subgroup_from_set(G, closure_values(sorted(comms, key=G.encode), G))


def intersection(H: FiniteSubgroup, K: FiniteSubgroup) -> FiniteSubgroup:
    G = _same_ambient(H, K)
    return subgroup_from_set(G, H.values & K.values)


# ---------------------------------------------------------------------------
# quotients
# ---------------------------------------------------------------------------

class QuotientAmbient(AmbientGroup):
    """G/H where ``witness`` supplies canonical coset representatives.

    Values are representatives (values of ``base``); the product is the
    base product followed by canonicalization.
    """

    def __init__(self, base: AmbientGroup, witness):
        self.base = base
        self.witness = witness
        self.is_finite = base.is_finite or witness.finite_index(base)

    def canon(self, g):
        return self.witness.canonical(g)

    def project(self, g):
        return self.canon(g)

    @property
    def identity(self):
        return self.canon(self.base.identity)

    def mul(self, a, b):
        return self.canon(self.base.mul(a, b))

    def inv(self, a):
        return self.canon(self.base.inv(a))

    def _encode_into(self, a, out):
        self.base._encode_into(a, out)

    def _decode_from(self, buf, pos):
        v, pos = self.base._decode_from(buf, pos)
        if self.canon(v) != v:
            raise ValueError("not a canonical coset representative")
        return v, pos

    @property
    def is_abelian(self) -> bool:
        return self.base.is_abelian

    def descriptor(self) -> dict:
        return {"kind": "coset_quotient", "base": self.base.descriptor(), "kernel": self.witness.describe()}

    def sample(self, rng):
        return self.canon(self.base.sample(rng))

    def support(self, a):
        return self.base.support(a)

    def element_to_json(self, a):
        return self.base.element_to_json(a)

    def element_from_json(self, obj):
        return self.canon(self.base.element_from_json(obj))

    def elements(self):
        if not self.base.is_finite:
            raise StructuralError("quotient enumeration needs a finite base")
        seen = set()
        for g in self.base.elements():
            r = self.canon(g)
            if r not in seen:
                seen.add(r)
                yield r

    def size(self):
        if not self.is_finite:
            return None
        return sum(1 for _ in self.elements())


class FiniteCosetWitness:
    """Canonical representatives for cosets of a finite normal subgroup:
    the byte-lexicographically minimal element of ``gH``."""

    def __init__(self, H: FiniteSubgroup):
        self.H = H
        self._cache: dict = {}

    def canonical(self, g):
        r = self._cache.get(g)
        if r is None:
            G = self.H.ambient
            r = min((G.mul(g, h) for h in self.H.values), key=G.encode)
            self._cache[g] = r
        return r

    def finite_index(self, base) -> bool:
        return base.is_finite

    def describe(self) -> dict:
        return {"kind": "finite", "generators": [c.hex() for c in self.H.generators]}


class FiniteQuotientGroup(QuotientAmbient):
    """Quotient of a finite subgroup by a normal subgroup, cosets listed with
    minimal-code representatives."""

    def __init__(self, base_subgroup: FiniteSubgroup, kernel: FiniteSubgroup):
        G = _same_ambient(base_subgroup, kernel)
        if not kernel.values <= base_subgroup.values:
            raise StructuralError("kernel is not contained in the base subgroup")
        if not is_normal(kernel, base_subgroup):
            raise StructuralError("kernel is not normal in the base subgroup")
        super().__init__(G, FiniteCosetWitness(kernel))
        self.base_subgroup = base_subgroup
        self.kernel = kernel
        rep_of = {}
        cosets = []
        for c in base_subgroup.elements:
            g = G.decode(c)
            if g in rep_of:
                continue
            cosets.append(c)
            for h in kernel.values:
                rep_of[G.mul(g, h)] = g
        self._rep_of = rep_of
        self.cosets: tuple[ElementCode, ...] = tuple(cosets)
        self.is_finite = True

    def canon(self, g):
        return self._rep_of[g]

    def elements(self):
        return (self.base.decode(c) for c in self.cosets)

    def size(self) -> int:
        return len(self.cosets)

    def projection(self, code: ElementCode) -> ElementCode:
        return self.base.encode(self._rep_of[self.base.decode(code)])

    def descriptor(self) -> dict:
        return {"kind": "finite_quotient", "order": len(self.cosets),
                "kernel_generators": [c.hex() for c in self.kernel.generators]}


def quotient(G_fin: FiniteSubgroup, H: FiniteSubgroup) -> FiniteQuotientGroup:
    return FiniteQuotientGroup(G_fin, H)


def whole_group(G: AmbientGroup) -> FiniteSubgroup:
    """All of a finite ambient as a FiniteSubgroup."""
    if not G.is_finite:
        raise StructuralError(f"{G} is infinite")
    vals = list(G.elements())
    return FiniteSubgroup.from_values(G, vals, greedy_generators(G, vals))


def trivial_subgroup(G: AmbientGroup) -> FiniteSubgroup:
    return FiniteSubgroup.from_values(G, [G.identity], [])
