"""Endomorphisms as a small combinator algebra.

JSON forms::

    {"kind": "identity"} | {"kind": "trivial"}
    {"kind": "shift", "offset": 1}
    {"kind": "power", "exponent": 4}
    {"kind": "component_map", "images": [[<gen>, <image>], ...]}
    {"kind": "diagonal", "maps": [<endo>, ...]}
    {"kind": "compose", "outer": <endo>, "inner": <endo>}
    {"kind": "automorphism", "forward": <endo>, "inverse": <endo>}
    {"kind": "conjugation", "by": <element>}
    {"kind": "permute", "mapping": {"0": 1, "1": 0}}
    {"kind": "lift", "on_A": <endo of A>}
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .core import (AmbientGroup, DecodeError, FiniteSubgroup, QuotientAmbient, StructuralError,
                   closure_values, subgroup_from_set)
from .groups import DescriptorError, DirectProduct, RestrictedSum, SemidirectProduct
from .subgroups import (ComponentwisePower, FiniteWitness, IndexRange, PrimaryComponent,
                        TrivialWitness, Witness, WholeGroup)

VERIFY_SAMPLES = 1000
EXHAUSTIVE_PAIRS = 1 << 18


class MorphismError(ValueError):
    """Invalid endomorphism; ``witness`` holds offending elements if any."""

    def __init__(self, message: str, witness=None, path: str = ""):
        super().__init__(f"{path or '/'}: {message}")
        self.message = message
        self.witness = witness
        self.path = path or "/"


class Endomorphism:
    domain: AmbientGroup

    def __call__(self, g):
        return self.apply_value(g)

    def apply_value(self, g):
        raise NotImplementedError

    def apply(self, code: bytes) -> bytes:
        G = self.domain
        return G.encode(self.apply_value(G.decode(code)))

    def descriptor(self) -> dict:
        raise NotImplementedError

    # structural knowledge; None means unknown
    def injective(self) -> bool | None:
        return None

    def surjective(self) -> bool | None:
        return None

    def inverse(self) -> "Endomorphism | None":
        return None

    def power(self, m: int) -> "Endomorphism":
        if m < 0:
            raise ValueError("negative powers need an automorphism")
        if m == 0:
            return Identity(self.domain)
        out: Endomorphism = self
        for _ in range(m - 1):
            out = Compose(self, out)
        return out

    def support_shift(self) -> int:
        """Max growth of support indices under one application."""
        return 0

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor()}>"


class Identity(Endomorphism):
    def __init__(self, G):
        self.domain = G

    def apply_value(self, g):
        return g

    def descriptor(self):
        return {"kind": "identity"}

    def injective(self):
        return True

    def surjective(self):
        return True

    def inverse(self):
        return self

    def power(self, m):
        return self


class Trivial(Endomorphism):
    def __init__(self, G):
        self.domain = G

    def apply_value(self, g):
        return self.domain.identity

    def descriptor(self):
        return {"kind": "trivial"}

    def _degenerate(self) -> bool:
        return self.domain.is_finite and self.domain.size() == 1

    def injective(self):
        return self._degenerate()

    def surjective(self):
        return self._degenerate()


def _rsum(G):
    if isinstance(G, RestrictedSum) or hasattr(G, "index_set"):
        return G
    raise MorphismError("shift needs a restricted-sum domain")


class Shift(Endomorphism):
    """Coordinate i goes to i + k."""

    def __init__(self, G, k: int):
        _rsum(G)
        if G.index_set == "N" and k < 0:
            raise MorphismError(f"shift by {k} is not an endomorphism of a sum over N "
                                "(coordinates would leave the index set)", path="/offset")
        self.domain, self.k = G, k

    def apply_value(self, g):
        k = self.k
        return tuple((i + k, c) for i, c in g) if k else g

    def descriptor(self):
        return {"kind": "shift", "offset": self.k}

    def injective(self):
        return True

    def surjective(self):
        return self.k == 0 or self.domain.index_set == "Z"

    def inverse(self):
        return Shift(self.domain, -self.k) if self.surjective() else None

    def power(self, m):
        if m < 0:
            return super().power(m)
        return Shift(self.domain, self.k * m)

    def support_shift(self):
        return abs(self.k)


class Power(Endomorphism):
    """g -> g^u; on non-abelian groups accepted only after verification."""

    def __init__(self, G, u: int):
        self.domain, self.u = G, u

    def apply_value(self, g):
        return self.domain.power(g, self.u)

    def descriptor(self):
        return {"kind": "power", "exponent": self.u}

    def _unit(self) -> bool | None:
        try:
            return math.gcd(self.u, self.domain.exponent()) == 1
        except NotImplementedError:
            return None

    def injective(self):
        return self._unit()

    def surjective(self):
        return self._unit()

    def inverse(self):
        if self.domain.is_abelian and self._unit():
            return Power(self.domain, pow(self.u, -1, self.domain.exponent()))
        return None

    def power(self, m):
        if m < 0:
            return super().power(m)
        return Power(self.domain, self.u ** m)


class ComponentMap(Endomorphism):
    """Finite domain; the map is determined by generator images."""

    def __init__(self, G, images: list[tuple]):
        if not G.is_finite:
            raise MorphismError("component maps need a finite domain")
        self.domain = G
        self.images = list(images)
        table = {G.identity: G.identity}
        frontier = [G.identity]
        while frontier:
            nxt = []
            for x in frontier:
                fx = table[x]
                for g, h in self.images:
                    y = G.mul(x, g)
                    fy = G.mul(fx, h)
                    old = table.get(y)
                    if old is None:
                        table[y] = fy
                        nxt.append(y)
                    elif old != fy:
                        raise MorphismError("generator images do not define a homomorphism",
                                            witness=(G.element_to_json(y),))
            frontier = nxt
        if len(table) != G.size():
            raise MorphismError("generators do not generate the domain")
        self.table = table

    def apply_value(self, g):
        return self.table[g]

    def descriptor(self):
        G = self.domain
        return {"kind": "component_map",
                "images": [[G.element_to_json(g), G.element_to_json(h)] for g, h in self.images]}

    def injective(self):
        return len(set(self.table.values())) == len(self.table)

    def surjective(self):
        return self.injective()

    def inverse(self):
        if not self.injective():
            return None
        back = {v: k for k, v in self.table.items()}
        return ComponentMap(self.domain, [(h, back[h]) for _, h in self.images])


class TableMap(Endomorphism):
    """Arbitrary value map on a finite domain given as a full table.

    Used to hand non-homomorphisms to the verifier; not exposed in JSON.
    """

    def __init__(self, G, table: dict, name: str = "table"):
        self.domain, self.table, self.name = G, dict(table), name

    def apply_value(self, g):
        return self.table[g]

    def descriptor(self):
        return {"kind": "table", "name": self.name}


class Diagonal(Endomorphism):
    def __init__(self, G, maps: list[Endomorphism]):
        if not isinstance(G, DirectProduct) or len(maps) != len(G.factors):
            raise MorphismError("diagonal needs one map per product factor")
        for f, m in zip(G.factors, maps):
            if m.domain is not f:
                raise MorphismError("diagonal component has the wrong domain")
        self.domain, self.maps = G, list(maps)

    def apply_value(self, g):
        return tuple(m.apply_value(x) for m, x in zip(self.maps, g))

    def descriptor(self):
        return {"kind": "diagonal", "maps": [m.descriptor() for m in self.maps]}

    def _all(self, name):
        vals = [getattr(m, name)() for m in self.maps]
        if all(v is True for v in vals):
            return True
        if any(v is False for v in vals):
            return False
        return None

    def injective(self):
        return self._all("injective")

    def surjective(self):
        return self._all("surjective")

    def inverse(self):
        inv = [m.inverse() for m in self.maps]
        return Diagonal(self.domain, inv) if all(i is not None for i in inv) else None

    def power(self, m):
        if m < 0:
            return super().power(m)
        return Diagonal(self.domain, [f.power(m) for f in self.maps])

    def support_shift(self):
        return max(m.support_shift() for m in self.maps)


class Compose(Endomorphism):
    """outer ∘ inner"""

    def __init__(self, outer: Endomorphism, inner: Endomorphism):
        if outer.domain is not inner.domain:
            raise MorphismError("composed maps have different domains")
        self.domain, self.outer, self.inner = inner.domain, outer, inner

    def apply_value(self, g):
        return self.outer.apply_value(self.inner.apply_value(g))

    def descriptor(self):
        return {"kind": "compose", "outer": self.outer.descriptor(), "inner": self.inner.descriptor()}

    def injective(self):
        a, b = self.outer.injective(), self.inner.injective()
        return True if a and b else None

    def surjective(self):
        a, b = self.outer.surjective(), self.inner.surjective()
        return True if a and b else None

    def inverse(self):
        a, b = self.outer.inverse(), self.inner.inverse()
        return Compose(b, a) if a is not None and b is not None else None

    def support_shift(self):
        return self.outer.support_shift() + self.inner.support_shift()


class DeclaredAutomorphism(Endomorphism):
    def __init__(self, forward: Endomorphism, inverse: Endomorphism, samples: int = VERIFY_SAMPLES, seed: int = 0):
        if forward.domain is not inverse.domain:
            raise MorphismError("forward and inverse have different domains")
        self.domain, self.forward, self._inverse = forward.domain, forward, inverse
        for x in _sample_elements(self.domain, samples, seed):
            if inverse.apply_value(forward.apply_value(x)) != x or forward.apply_value(inverse.apply_value(x)) != x:
                raise MorphismError("declared inverse does not invert the forward map",
                                    witness=(self.domain.element_to_json(x),))

    def apply_value(self, g):
        return self.forward.apply_value(g)

    def descriptor(self):
        return {"kind": "automorphism", "forward": self.forward.descriptor(), "inverse": self._inverse.descriptor()}

    def injective(self):
        return True

    def surjective(self):
        return True

    def inverse(self):
        return DeclaredAutomorphism(self._inverse, self.forward, samples=0)

    def support_shift(self):
        return max(self.forward.support_shift(), self._inverse.support_shift())


class Conjugation(Endomorphism):
    """x -> g x g^-1"""

    def __init__(self, G, g):
        self.domain, self.g = G, g
        self._gi = G.inv(g)

    def apply_value(self, x):
        G = self.domain
        return G.mul(G.mul(self.g, x), self._gi)

    def descriptor(self):
        return {"kind": "conjugation", "by": self.domain.element_to_json(self.g)}

    def injective(self):
        return True

    def surjective(self):
        return True

    def inverse(self):
        return Conjugation(self.domain, self._gi)


class CoordinatePermutation(Endomorphism):
    """Finitary permutation of restricted-sum indices; i -> mapping[i]."""

    def __init__(self, G, mapping: dict[int, int]):
        _rsum(G)
        mapping = {int(i): int(j) for i, j in mapping.items() if int(i) != int(j)}
        if set(mapping) != set(mapping.values()):
            raise MorphismError("mapping is not a permutation of its support")
        if G.index_set == "N" and any(i < 0 for i in mapping):
            raise MorphismError("negative index in a sum over N")
        self.domain, self.mapping = G, mapping

    def apply_value(self, g):
        m = self.mapping
        if not m:
            return g
        return tuple(sorted((m.get(i, i), c) for i, c in g))

    def descriptor(self):
        return {"kind": "permute", "mapping": {str(i): j for i, j in sorted(self.mapping.items())}}

    def injective(self):
        return True

    def surjective(self):
        return True

    def inverse(self):
        return CoordinatePermutation(self.domain, {j: i for i, j in self.mapping.items()})

    def support_shift(self):
        return max((abs(i - j) for i, j in self.mapping.items()), default=0)


class SemidirectLift(Endomorphism):
    """(a, x) -> (psi(a), x) for an endomorphism psi of A commuting with the action."""

    def __init__(self, G, psi: Endomorphism):
        if not isinstance(G, SemidirectProduct) or psi.domain is not G.A:
            raise MorphismError("lift needs a semidirect domain and an endomorphism of its A")
        self.domain, self.psi = G, psi

    def apply_value(self, g):
        return (self.psi.apply_value(g[0]), g[1])

    def descriptor(self):
        return {"kind": "lift", "on_A": self.psi.descriptor()}

    def injective(self):
        return self.psi.injective()

    def surjective(self):
        return self.psi.surjective()

    def inverse(self):
        inv = self.psi.inverse()
        return SemidirectLift(self.domain, inv) if inv is not None else None

    def power(self, m):
        if m < 0:
            return super().power(m)
        return SemidirectLift(self.domain, self.psi.power(m))

    def support_shift(self):
        return self.psi.support_shift()


class Restriction(Endomorphism):
    """φ restricted to an invariant subgroup H, computed with the ambient arithmetic."""

    def __init__(self, base: Endomorphism, witness: Witness):
        rep = invariance_report(base, witness)
        if rep.invariant is not True:
            raise MorphismError("subgroup is not invariant; cannot restrict", witness=rep.witnesses)
        self.base, self.witness = base, witness
        self.domain = base.domain

    def apply_value(self, g):
        if not self.witness.contains(g):
            raise MorphismError("element outside the restricted domain",
                                witness=(self.domain.element_to_json(g),))
        return self.base.apply_value(g)

    def descriptor(self):
        return {"kind": "restriction", "base": self.base.descriptor(), "to": self.witness.describe()}

    def injective(self):
        return True if self.base.injective() else None

    def power(self, m):
        return Restriction(self.base.power(m), self.witness)

    def support_shift(self):
        return self.base.support_shift()


class QuotientInduced(Endomorphism):
    """φ̄(gH) = φ(g)H on the quotient ambient ``quotient``."""

    def __init__(self, base: Endomorphism, quotient: QuotientAmbient, verify: bool = True):
        if quotient.base is not base.domain:
            raise MorphismError("quotient is not over the domain of the map")
        self.base, self.domain = base, quotient
        if verify:
            rep = invariance_report(base, quotient.witness)
            if rep.invariant is not True:
                raise MorphismError("kernel is not invariant; induced map undefined", witness=rep.witnesses)
            if getattr(quotient.witness, "normal", True) is not True:
                raise MorphismError("kernel is not normal")
            if base.domain.is_finite:
                self._check_well_defined()

    def _check_well_defined(self):
        G, Q = self.base.domain, self.domain
        W = Q.witness
        seen: dict = {}
        for g in G.elements():
            r = Q.canon(g)
            img = Q.canon(self.base.apply_value(g))
            if seen.setdefault(r, img) != img:
                raise MorphismError("induced map not well defined", witness=(G.element_to_json(g),))

    def apply_value(self, r):
        return self.domain.canon(self.base.apply_value(r))

    def descriptor(self):
        return {"kind": "quotient_induced", "base": self.base.descriptor(),
                "kernel": self.domain.witness.describe()}

    def power(self, m):
        return QuotientInduced(self.base.power(m), self.domain, verify=False)

    def support_shift(self):
        return self.base.support_shift()


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def _sample_elements(G, n: int, seed: int) -> list:
    if G.is_finite and G.size() <= max(n, 1):
        return list(G.elements())
    rng = random.Random(seed)
    return [G.sample(rng) for _ in range(n)]


@dataclass
class HomomorphismCheck:
    ok: bool
    exhaustive: bool
    pairs: int
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_homomorphism(phi: Endomorphism, budget: int = EXHAUSTIVE_PAIRS,
                        samples: int = VERIFY_SAMPLES, seed: int = 0) -> HomomorphismCheck:
    """Exhaustive over finite domains within ``budget`` pairs, else seeded samples."""
    G = phi.domain
    f = phi.apply_value
    if G.is_finite and G.size() ** 2 <= budget:
        elems = list(G.elements())
        pairs = itertools.product(elems, elems)
        exhaustive = True
    else:
        rng = random.Random(seed)
        pairs = ((G.sample(rng), G.sample(rng)) for _ in range(samples))
        exhaustive = False
    count = 0
    for a, b in pairs:
        count += 1
        if f(G.mul(a, b)) != G.mul(f(a), f(b)):
            return HomomorphismCheck(False, exhaustive, count, (a, b))
    return HomomorphismCheck(True, exhaustive, count)


def image_subgroup(phi: Endomorphism, F: FiniteSubgroup) -> FiniteSubgroup:
    G = F.ambient
    imgs = [phi.apply_value(g) for g in F.generator_values] if F.generators else [phi.apply_value(v) for v in F.values]
    return subgroup_from_set(G, closure_values(imgs, G))


def kernel_in(phi: Endomorphism, F: FiniteSubgroup) -> FiniteSubgroup:
    G = F.ambient
    e = G.identity
    return subgroup_from_set(G, (v for v in F.values if phi.apply_value(v) == e))


# ---------------------------------------------------------------------------
# invariance
# ---------------------------------------------------------------------------

@dataclass
class InvarianceReport:
    invariant: bool | None
    stable: bool | None
    kernel_contained: bool | None
    witnesses: list = field(default_factory=list)
    rule: str = "exact"

    def to_json(self) -> dict:
        return {"invariant": _tri(self.invariant), "stable": _tri(self.stable),
                "kernel_contained": _tri(self.kernel_contained), "rule": self.rule,
                "witnesses": self.witnesses}


def _tri(v):
    return "unknown" if v is None else v


def _base_map(phi: Endomorphism) -> Endomorphism:
    while isinstance(phi, (DeclaredAutomorphism, Restriction)):
        phi = phi.forward if isinstance(phi, DeclaredAutomorphism) else phi.base
    return phi


def _finite_report(phi, H: FiniteSubgroup, G) -> InvarianceReport:
    Gj = G.element_to_json
    bad = [Gj(h) for h in H.generator_values if not H.has_value(phi.apply_value(h))]
    if not H.generators:
        bad = [Gj(h) for h in H.values if not H.has_value(phi.apply_value(h))]
    invariant = not bad
    stable = invariant and len({phi.apply_value(h) for h in H.values}) == len(H) if invariant else False
    if G.is_finite:
        e = G.identity
        ker_out = [g for g in G.elements() if phi.apply_value(g) == e and not H.has_value(g)]
        kernel = not ker_out
        bad += [Gj(g) for g in ker_out[:1]]
    else:
        kernel = True if phi.injective() else None
    return InvarianceReport(invariant, stable, kernel, bad[:4], "exact")


def invariance_report(phi: Endomorphism, H) -> InvarianceReport:
    """Decide φ(H) ⊆ H, φ(H) = H and ker φ ⊆ H as far as possible."""
    G = phi.domain
    if isinstance(H, FiniteSubgroup):
        H = FiniteWitness(H, normal=True)
    if isinstance(H, FiniteWitness):
        return _finite_report(phi, H.H, G)
    if G.is_finite:
        return _finite_report(phi, H.finite_subgroup(), G)
    inj = phi.injective()
    sur = phi.surjective()
    if isinstance(H, WholeGroup):
        return InvarianceReport(True, sur, True, [], "whole group")
    if isinstance(H, TrivialWitness):
        return InvarianceReport(True, True, inj, [], "trivial subgroup")
    core = _base_map(phi)
    if isinstance(core, Identity):
        return InvarianceReport(True, True, True, [], "identity")
    if isinstance(H, PrimaryComponent):
        # p-components are fully invariant; surjective maps permute them onto themselves
        return InvarianceReport(True, True if sur else None, True if inj else None, [], "fully invariant")
    if isinstance(H, ComponentwisePower):
        fully = G.is_abelian
        iw = getattr(G, "iwasawa", None)
        if iw is not None:
            # A^{p^s} is the derived subgroup, hence fully invariant
            p, _, _, s = iw
            fully = H.e == p ** s
        if fully or isinstance(core, (Power, SemidirectLift, Conjugation)):
            return InvarianceReport(True, True if sur else None, True if inj else None, [],
                                    "verbal subgroup" if fully else "componentwise")
        return InvarianceReport(None, None, True if inj else None, [], "unknown")
    if isinstance(H, IndexRange):
        if H.is_whole:
            return InvarianceReport(True, sur, True, [], "whole group")
        if isinstance(core, Shift):
            k = core.k
            if k < 0:
                wit = [G.element_to_json(G.unit(H.lo, G.component.normality_generators(())[0]))]
                return InvarianceReport(False, False, True, wit, "shift")
            return InvarianceReport(True, k == 0, True, [], "shift")
        if isinstance(core, CoordinatePermutation):
            bad = [i for i, j in core.mapping.items() if (i >= H.lo) != (j >= H.lo)]
            inv = not bad
            return InvarianceReport(inv, inv, True, [str(i) for i in bad[:4]], "permutation")
        if isinstance(core, Power):
            return InvarianceReport(True, True if core._unit() else None, True if core._unit() else None, [],
                                    "componentwise")
        if isinstance(core, Trivial):
            return InvarianceReport(True, False, False, [], "trivial map")
    return InvarianceReport(None, None, True if inj else None, [], "unknown")


def restrict(phi: Endomorphism, H) -> Restriction:
    if isinstance(H, FiniteSubgroup):
        H = FiniteWitness(H, normal=True)
    return Restriction(phi, H)


def induced_quotient_map(phi: Endomorphism, H) -> QuotientInduced:
    if isinstance(H, FiniteSubgroup):
        H = FiniteWitness(H)
    if getattr(H, "normal", True) is not True:
        raise MorphismError("subgroup is not normal")
    return QuotientInduced(phi, QuotientAmbient(phi.domain, H))


def is_automorphism(phi: Endomorphism) -> bool:
    return phi.inverse() is not None


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def parse_endomorphism(G, desc: dict, path: str = "", verify: bool = True) -> Endomorphism:
    """Build and (by default) verify an endomorphism of G from its JSON form."""
    phi = _parse(G, desc, path)
    if verify:
        chk = verify_homomorphism(phi)
        if not chk.ok:
            a, b = chk.witness
            raise MorphismError("not a homomorphism", witness=(G.element_to_json(a), G.element_to_json(b)),
                                path=path)
    return phi


def _parse(G, desc, path):
    if not isinstance(desc, dict):
        raise MorphismError("endomorphism must be an object", path=path)
    kind = desc.get("kind")
    try:
        if kind == "identity":
            return Identity(G)
        if kind == "trivial":
            return Trivial(G)
        if kind == "shift":
            return Shift(G, _int(desc, "offset", path, 1))
        if kind == "power":
            return Power(G, _int(desc, "exponent", path))
        if kind == "component_map":
            pairs = desc.get("images")
            if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
                raise MorphismError("'images' must be a list of [generator, image] pairs", path=f"{path}/images")
            return ComponentMap(G, [(G.element_from_json(a), G.element_from_json(b)) for a, b in pairs])
        if kind == "diagonal":
            maps = desc.get("maps")
            if not isinstance(G, DirectProduct) or not isinstance(maps, list):
                raise MorphismError("diagonal needs a product domain and a 'maps' list", path=path)
            return Diagonal(G, [_parse(f, m, f"{path}/maps/{i}") for i, (f, m) in enumerate(zip(G.factors, maps))]
                            if len(maps) == len(G.factors) else [])
        if kind == "compose":
            return Compose(_parse(G, desc.get("outer"), f"{path}/outer"), _parse(G, desc.get("inner"), f"{path}/inner"))
        if kind == "automorphism":
            return DeclaredAutomorphism(_parse(G, desc.get("forward"), f"{path}/forward"),
                                        _parse(G, desc.get("inverse"), f"{path}/inverse"))
        if kind == "conjugation":
            return Conjugation(G, G.element_from_json(desc.get("by")))
        if kind == "permute":
            mapping = desc.get("mapping")
            if not isinstance(mapping, dict):
                raise MorphismError("'mapping' must be an object", path=f"{path}/mapping")
            return CoordinatePermutation(G, mapping)
        if kind == "lift":
            if not isinstance(G, SemidirectProduct):
                raise MorphismError("lift needs a semidirect domain", path=path)
            return SemidirectLift(G, _parse(G.A, desc.get("on_A"), f"{path}/on_A"))
    except MorphismError as exc:
        if exc.path == "/" and path:
            raise MorphismError(exc.message, exc.witness, path) from None
        raise
    except (DecodeError, DescriptorError, StructuralError) as exc:
        raise MorphismError(str(exc), path=path) from None
    raise MorphismError(f"unknown endomorphism kind {kind!r}", path=f"{path}/kind")


def _int(d, key, path, default=None):
    v = d.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool):
        raise MorphismError(f"'{key}' must be an integer", path=f"{path}/{key}")
    return v
