"""Structural predicates and decompositions for finite and Iwasawa-type groups."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .core import (AmbientGroup, BudgetExceeded, FiniteSubgroup, StructuralError, closure_values,
                   commutator_subgroup, subgroup_from_set, subgroup_of, whole_group)
from .groups import (CyclicGroup, DirectProduct, Q8Group, RestrictedSum, build_iwasawa,
                     check_iwasawa_params, factorize)
from .subgroups import ComponentwisePower

ORDER_CAP = 512
SUBGROUP_CAP = 128
SUBGROUP_COUNT_CAP = 50_000


# ---------------------------------------------------------------------------
# finite Cayley tables
# ---------------------------------------------------------------------------

class FiniteTable:
    """Elements of a finite group (or finite subgroup) indexed in code order,
    with multiplication and inverse tables."""

    def __init__(self, source: AmbientGroup | FiniteSubgroup, cap: int = ORDER_CAP):
        if isinstance(source, FiniteSubgroup):
            G = source.ambient
            vals = [G.decode(c) for c in source.elements]
        else:
            G = source
            if not G.is_finite:
                raise StructuralError("finite table of an infinite group")
            if G.size() > cap:
                raise BudgetExceeded("finite table", cap)
            vals = sorted(G.elements(), key=G.encode)
        if len(vals) > cap:
            raise BudgetExceeded("finite table", cap)
        self.G = G
        self.values = vals
        self.index = {v: i for i, v in enumerate(vals)}
        n = len(vals)
        self.n = n
        self.e = self.index[G.identity]
        self.mul = [[self.index[G.mul(a, b)] for b in vals] for a in vals]
        self.inv = [row.index(self.e) for row in self.mul]
        self.order = [G.element_order(v) for v in vals]

    def closure(self, gens) -> int:
        """Subgroup generated by element indices, as a bitmask."""
        seen = 1 << self.e
        frontier = [self.e]
        gens = [g for g in set(gens) if g != self.e]
        mul = self.mul
        while frontier:
            nxt = []
            for x in frontier:
                row = mul[x]
                for g in gens:
                    y = row[g]
                    if not seen >> y & 1:
                        seen |= 1 << y
                        nxt.append(y)
            frontier = nxt
        return seen

    def members(self, mask: int) -> list[int]:
        return [i for i in range(self.n) if mask >> i & 1]

    def cyclic(self, x: int) -> int:
        mask = 1 << self.e
        y = x
        while y != self.e:
            mask |= 1 << y
            y = self.mul[y][x]
        return mask

    def cyclic_subgroups(self) -> list[tuple[int, int]]:
        """Distinct cyclic subgroups as (generator, mask), in code order of generators."""
        seen: dict[int, int] = {}
        for x in range(self.n):
            m = self.cyclic(x)
            seen.setdefault(m, x)
        return [(x, m) for m, x in seen.items()]

    def product_mask(self, X: int, Y: int) -> int:
        out = 0
        ys = self.members(Y)
        for x in self.members(X):
            row = self.mul[x]
            for y in ys:
                out |= 1 << row[y]
        return out

    def is_normal_mask(self, S: int, conj=None) -> bool:
        mul, inv = self.mul, self.inv
        elems = self.members(S)
        for g in (conj if conj is not None else range(self.n)):
            gi = inv[g]
            for h in elems:
                if not S >> mul[mul[g][h]][gi] & 1:
                    return False
        return True

    def generators(self) -> list[int]:
        gens: list[int] = []
        cur = 1 << self.e
        for x in range(self.n):
            if not cur >> x & 1:
                gens.append(x)
                cur = self.closure(gens)
        return gens

    def json(self, i: int):
        return self.G.element_to_json(self.values[i])


def enumerate_subgroups(tab: FiniteTable, cap: int = SUBGROUP_COUNT_CAP) -> list[int]:
    """All subgroups as bitmasks: cyclic subgroups, then closure under joins."""
    cyc = tab.cyclic_subgroups()
    found = {m: None for _, m in cyc}
    frontier = list(found)
    gens_of = {m: [x] for x, m in cyc}
    while frontier:
        nxt = []
        for S in frontier:
            for x, C in cyc:
                if C & ~S == 0:
                    continue
                gens = gens_of[S] + [x]
                J = tab.closure(gens)
                if J not in found:
                    found[J] = None
                    gens_of[J] = gens
                    nxt.append(J)
                    if len(found) > cap:
                        raise BudgetExceeded("subgroup enumeration", cap)
        frontier = nxt
    return sorted(found, key=lambda m: (bin(m).count("1"), m))


def all_subgroups_normal(tab: FiniteTable) -> tuple[bool, int | None]:
    """Exhaustive oracle: enumerate every subgroup and test normality."""
    gens = tab.generators()
    for S in enumerate_subgroups(tab):
        if not tab.is_normal_mask(S, gens):
            return False, S
    return True, None


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass
class ClassificationReport:
    order: int | None
    abelian: bool
    quasihamiltonian: bool | str
    hamiltonian: bool | str
    fc: bool | str
    mode: str = "exhaustive"
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"order": self.order, "abelian": self.abelian, "quasihamiltonian": self.quasihamiltonian,
                "hamiltonian": self.hamiltonian, "fc": self.fc, "mode": self.mode, "witnesses": self.witnesses}


def _noncommuting(tab: FiniteTable):
    for a in range(tab.n):
        for b in range(a + 1, tab.n):
            if tab.mul[a][b] != tab.mul[b][a]:
                return a, b
    return None


def _qh_witness(tab: FiniteTable):
    cyc = tab.cyclic_subgroups()
    for (x, X), (y, Y) in itertools.combinations(cyc, 2):
        if tab.product_mask(X, Y) != tab.product_mask(Y, X):
            return x, y
    return None


def classify_table(tab: FiniteTable, subgroup_cap: int = SUBGROUP_CAP) -> ClassificationReport:
    w: dict = {}
    nc = _noncommuting(tab)
    abelian = nc is None
    if nc:
        w["noncommuting"] = [tab.json(nc[0]), tab.json(nc[1])]
    if abelian:
        qh: bool | str = True
    else:
        q = _qh_witness(tab)
        qh = q is None
        if q:
            w["nonpermuting_cyclic_pair"] = [tab.json(q[0]), tab.json(q[1])]
    if abelian:
        ham: bool | str = False
    elif tab.n > subgroup_cap:
        ham = "n/a"
    else:
        ok, S = all_subgroups_normal(tab)
        ham = ok
        if S is not None:
            w["nonnormal_subgroup"] = [tab.json(i) for i in tab.members(S)]
    return ClassificationReport(tab.n, abelian, qh, ham, True, "exhaustive", w)


def classify(G: AmbientGroup | FiniteSubgroup, order_cap: int = ORDER_CAP, subgroup_cap: int = SUBGROUP_CAP,
             truncation: int = 2, samples: int = 200, seed: int = 0) -> ClassificationReport:
    if isinstance(G, FiniteSubgroup) or G.is_finite:
        return classify_table(FiniteTable(G, order_cap), subgroup_cap)
    return classify_infinite(G, truncation, samples, seed, order_cap)


def classify_infinite(G: AmbientGroup, truncation: int = 2, samples: int = 200, seed: int = 0,
                      order_cap: int = ORDER_CAP) -> ClassificationReport:
    """Exhaustive checks on a finite truncation plus seeded cyclic pairs from G."""
    from .laws import coordinate_block
    T = coordinate_block(G, truncation)
    rep = classify_table(FiniteTable(T, order_cap), subgroup_cap=0)
    w = dict(rep.witnesses)
    rng = random.Random(seed)
    qh = rep.quasihamiltonian
    abelian = rep.abelian
    for _ in range(samples):
        if qh is not True and abelian is False:
            break
        x, y = G.sample(rng), G.sample(rng)
        if abelian and G.mul(x, y) != G.mul(y, x):
            abelian = False
            w.setdefault("noncommuting", [G.element_to_json(x), G.element_to_json(y)])
        if qh is True:
            X, Y = closure_values([x], G), closure_values([y], G)
            if {G.mul(a, b) for a in X for b in Y} != {G.mul(b, a) for a in X for b in Y}:
                qh = False
                w["nonpermuting_cyclic_pair"] = [G.element_to_json(x), G.element_to_json(y)]
    if abelian and not G.is_abelian:
        abelian = False
    fc: bool | str = True if G.is_abelian else "unknown"
    if getattr(G, "iwasawa", None) is not None:
        fc = fc_by_commutator(G)
    qh_out: bool | str = "sampled-true" if qh is True and not G.is_abelian else qh
    ham: bool | str = False if abelian else "n/a"
    return ClassificationReport(None, abelian, qh_out, ham, fc, "truncation+sample", w)


# ---------------------------------------------------------------------------
# Dedekind-Baer
# ---------------------------------------------------------------------------

@dataclass
class DedekindBaerResult:
    verdict: str  # hamiltonian | abelian | not_hamiltonian
    reason: str = ""
    q8: tuple | None = None           # images of i, j
    B: FiniteSubgroup | None = None
    D: FiniteSubgroup | None = None
    B_rank: int = 0
    D_invariants: list[int] = field(default_factory=list)

    @property
    def hamiltonian(self) -> bool:
        return self.verdict == "hamiltonian"

    def to_json(self, G) -> dict:
        out = {"verdict": self.verdict, "reason": self.reason}
        if self.hamiltonian:
            out.update({"i": G.element_to_json(self.q8[0]), "j": G.element_to_json(self.q8[1]),
                        "B": {"order": len(self.B), "rank": self.B_rank,
                              "generators": [G.element_to_json(g) for g in self.B.generator_values]},
                        "D": {"order": len(self.D), "invariants": self.D_invariants,
                              "generators": [G.element_to_json(g) for g in self.D.generator_values]}})
        return out


def abelian_invariants(tab: FiniteTable, mask: int) -> list[int]:
    """Cyclic factor orders (prime powers, sorted) of a finite abelian subgroup."""
    elems = tab.members(mask)
    out: list[int] = []
    primes = sorted({p for i in elems for p in factorize(tab.order[i])})
    for p in primes:
        # |H[p^k]| for k = 0, 1, ... determines the p-invariants
        counts = [1]
        k = 1
        while True:
            c = sum(1 for i in elems if _divides_power(tab.order[i], p, k))
            counts.append(c)
            if c == counts[-2] and k > 1:
                break
            k += 1
        ranks = []  # number of cyclic factors of order >= p^k
        for k in range(1, len(counts)):
            r = 0
            q = counts[k] // counts[k - 1]
            while q > 1:
                q //= p
                r += 1
            ranks.append(r)
        for k in range(len(ranks)):
            nxt = ranks[k + 1] if k + 1 < len(ranks) else 0
            out += [p ** (k + 1)] * (ranks[k] - nxt)
    return sorted(out)


def _divides_power(o: int, p: int, k: int) -> bool:
    return (p ** k) % o == 0


def dedekind_baer_decompose(G: AmbientGroup | FiniteSubgroup, cap: int = ORDER_CAP) -> DedekindBaerResult:
    """Locate Q8, an exponent-2 complement B and the odd part D, and verify
    that (q, b, d) -> q·b·d is an isomorphism Q8 × B × D -> G."""
    tab = FiniteTable(G, cap)
    if _noncommuting(tab) is None:
        return DedekindBaerResult("abelian", "group is abelian")
    n = tab.n
    mul = tab.mul
    e = tab.e
    four = [x for x in range(n) if tab.order[x] == 4]
    q8 = None
    for i in four:
        ii = mul[i][i]
        for j in four:
            if mul[j][j] == ii and mul[i][j] != mul[j][i] and bin(tab.closure([i, j])).count("1") == 8:
                q8 = (i, j)
                break
        if q8:
            break
    if q8 is None:
        return DedekindBaerResult("not_hamiltonian", "no quaternion subgroup")
    i, j = q8
    minus = mul[i][i]
    two = [x for x in range(n) if tab.order[x] & (tab.order[x] - 1) == 0]
    odd = [x for x in range(n) if tab.order[x] % 2 == 1]
    omega = [x for x in two if tab.order[x] <= 2]
    # complement of <-1> in Omega, greedily
    span = tab.closure([minus])
    bgens = []
    for x in omega:
        if not span >> x & 1:
            bgens.append(x)
            span = tab.closure([minus] + bgens)
    Bmask = tab.closure(bgens)
    Dmask = tab.closure(odd)
    if bin(Dmask).count("1") != len(odd):
        return DedekindBaerResult("not_hamiltonian", "odd-order elements do not form a subgroup")
    if _noncommuting_in(tab, Dmask):
        return DedekindBaerResult("not_hamiltonian", "odd part is not abelian")
    Q = _q8_map(tab, i, j)
    if Q is None:
        return DedekindBaerResult("not_hamiltonian", "i, j do not generate a quaternion group")
    Bs, Ds = tab.members(Bmask), tab.members(Dmask)
    if 8 * len(Bs) * len(Ds) != n:
        return DedekindBaerResult("not_hamiltonian",
                                  f"|Q8|·|B|·|D| = {8 * len(Bs) * len(Ds)} differs from |G| = {n}")
    # the product map must be a bijective homomorphism
    image = {}
    for q in range(8):
        for b in Bs:
            for d in Ds:
                image[(q, b, d)] = mul[mul[Q[q]][b]][d]
    if len(set(image.values())) != n:
        return DedekindBaerResult("not_hamiltonian", "product map is not bijective")
    Qt = Q8Group._MUL
    if not _factors_commute(tab, [Q[q] for q in range(8)], Bs, Ds):
        return DedekindBaerResult("not_hamiltonian", "factors do not commute")
    for a, b in itertools.product(range(8), repeat=2):
        if mul[Q[a]][Q[b]] != Q[Qt[a][b]]:
            return DedekindBaerResult("not_hamiltonian", "quaternion map is not a homomorphism")
    vals = tab.values
    Gamb = tab.G
    B = subgroup_from_set(Gamb, [vals[x] for x in Bs])
    D = subgroup_from_set(Gamb, [vals[x] for x in Ds])
    return DedekindBaerResult("hamiltonian", "", (vals[i], vals[j]), B, D, len(bgens),
                              abelian_invariants(tab, Dmask))


def _noncommuting_in(tab, mask):
    xs = tab.members(mask)
    return any(tab.mul[a][b] != tab.mul[b][a] for a in xs for b in xs)


def _factors_commute(tab, Qs, Bs, Ds) -> bool:
    m = tab.mul
    pairs = [(Qs, Bs), (Qs, Ds), (Bs, Ds)]
    return all(m[a][b] == m[b][a] for X, Y in pairs for a in X for b in Y)


def _q8_map(tab: FiniteTable, i: int, j: int) -> list[int] | None:
    """Images of the Q8 elements 0..7 under 1->e, i->i, j->j."""
    img = {0: tab.e}
    Qt = Q8Group._MUL
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g, h in ((1, i), (2, j)):
                y = Qt[x][g]
                v = tab.mul[img[x]][h]
                if y in img:
                    if img[y] != v:
                        return None
                else:
                    img[y] = v
                    nxt.append(y)
        frontier = nxt
    if len(set(img.values())) != 8:
        return None
    return [img[q] for q in range(8)]


def hamiltonian_oracle(G, cap: int = SUBGROUP_CAP) -> bool:
    """Non-abelian with every subgroup normal, by exhaustive enumeration."""
    tab = FiniteTable(G, max(cap, 1))
    if _noncommuting(tab) is None:
        return False
    return all_subgroups_normal(tab)[0]


# ---------------------------------------------------------------------------
# Iwasawa groups
# ---------------------------------------------------------------------------

@dataclass
class IwasawaDerivedReport:
    p: int
    n: int
    m: int
    s: int
    k: int
    order: int
    derived_order: int
    structural_order: int
    equal: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def iwasawa_truncation(p: int, n: int, m: int, s: int, k: int):
    A = DirectProduct([CyclicGroup(p ** n) for _ in range(k)]) if k > 1 else CyclicGroup(p ** n)
    return build_iwasawa(p, n, m, s, A)


def iwasawa_derived(p: int, n: int, m: int, s: int, k: int = 1) -> IwasawaDerivedReport:
    """Exhaustive G′ against the structural A^{p^s}."""
    G = iwasawa_truncation(p, n, m, s, k)
    derived = commutator_subgroup(whole_group(G))
    structural = ComponentwisePower(G, p ** s).finite_subgroup()
    return IwasawaDerivedReport(p, n, m, s, k, G.size(), len(derived), len(structural),
                                derived.elements == structural.elements)


def iwasawa_parameter_grid(max_order: int = 3 ** 5, primes=(2, 3, 5)):
    """Every valid (p, n, m, s, k) with |A ⋊ Z(p^m)| = p^{nk+m} <= max_order."""
    out = []
    for p in primes:
        for n in range(1, 10):
            for m in range(1, 10):
                for k in range(1, 10):
                    if p ** (n * k + m) > max_order:
                        continue
                    for s in range(1, n):
                        if not check_iwasawa_params(p, n, m, s):
                            out.append((p, n, m, s, k))
    return out


def fc_by_commutator(G) -> bool:
    """FC iff G′ = A^{p^s} is finite, read off the descriptor."""
    iw = getattr(G, "iwasawa", None)
    if iw is None:
        raise StructuralError("not an Iwasawa build")
    p, _, _, s = iw
    return ComponentwisePower(G, p ** s).is_finite()


# ---------------------------------------------------------------------------
# primary decomposition
# ---------------------------------------------------------------------------

def egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, x, y = egcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass
class PrimaryDecomposition:
    order: int
    parts: dict[int, bytes]
    m: dict[int, int]
    s: dict[int, int]

    def to_json(self) -> dict:
        return {"order": self.order,
                "parts": {str(p): c.hex() for p, c in sorted(self.parts.items())},
                "bezout": {str(p): {"s": self.s[p], "m": self.m[p]} for p in sorted(self.parts)}}


def p_decompose_element(x: bytes, G: AmbientGroup) -> PrimaryDecomposition:
    g = G.decode(x)
    o = G.element_order(g)
    fac = factorize(o)
    primes = sorted(fac)
    ms = [o // p ** fac[p] for p in primes]
    coeffs: list[int] = []
    if ms:
        acc, coeffs = ms[0], [1]
        for mi in ms[1:]:
            d, a, b = egcd(acc, mi)
            coeffs = [c * a for c in coeffs] + [b]
            acc = d
        if sum(c * mi for c, mi in zip(coeffs, ms)) != 1:
            raise AssertionError("Bezout certificate failed")
    parts = {p: G.encode(G.power(g, (c * mi) % o)) for p, c, mi in zip(primes, coeffs, ms)}
    return PrimaryDecomposition(o, parts, dict(zip(primes, ms)), dict(zip(primes, coeffs)))


class NotASubgroup(StructuralError):
    def __init__(self, message: str, elements: list):
        super().__init__(message)
        self.elements = elements


def p_component(F: FiniteSubgroup, p: int) -> FiniteSubgroup:
    """Elements of F of p-power order; must form a subgroup."""
    G = F.ambient
    vals = [v for v in F.values if _is_p_power(G.element_order(v), p)]
    S = set(vals)
    if any(G.mul(a, b) not in S for a in vals for b in vals):
        raise NotASubgroup(f"elements of {p}-power order do not form a subgroup",
                           sorted((G.encode(v) for v in vals)))
    return subgroup_from_set(G, vals)


def _is_p_power(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1
