"""Executable entropy laws over base families.

Every comparison is an exact integer identity or inequality between betas.
A law instance gets one of the verdicts below; ``VIOLATION`` is only issued
when every estimate involved is certified or window-stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (AmbientGroup, FiniteSubgroup, QuotientAmbient, StructuralError, subgroup_of)
from .entropy import (CERTIFIED_ZERO, EntropyConfig, EntropyEstimate, combine, entropy_along,
                      inverse_entropy_check, limit_free_entropy, trajectory)
from .groups import (CyclicGroup, DirectProduct, Q8Group, RestrictedSum, SemidirectProduct,
                     StructuralQuotientGroup, factorize)
from .morphisms import (Compose, Endomorphism, Identity, QuotientInduced, Restriction, image_subgroup,
                        invariance_report)
from .structure import classify, fc_by_commutator, p_component
from .subgroups import FiniteWitness, PrimaryComponent, Witness, derived_witness

HOLDS = "holds-exactly"
HOLDS_CERT = "holds-within-certification"
INEQ = "inequality-observed"
INCONCLUSIVE = "inconclusive"
VIOLATION = "VIOLATION"


# ---------------------------------------------------------------------------
# base families
# ---------------------------------------------------------------------------

def _block_gens(G, k: int) -> list:
    if isinstance(G, CyclicGroup):
        return [1 % G.n]
    if isinstance(G, Q8Group):
        return [1, 2]
    if isinstance(G, StructuralQuotientGroup):
        return _block_gens(G.reduced, k)
    if isinstance(G, DirectProduct):
        out = []
        for i, f in enumerate(G.factors):
            for g in _block_gens(f, k):
                v = list(G.identity)
                v[i] = g
                out.append(tuple(v))
        return out
    if isinstance(G, RestrictedSum):
        return [G.unit(i, g) for i in range(k) for g in _block_gens(G.component, k)]
    if isinstance(G, SemidirectProduct):
        return [(a, 0) for a in _block_gens(G.A, k)] + [G.t]
    if G.is_finite:
        from .core import greedy_generators
        return greedy_generators(G, G.elements())
    raise StructuralError(f"no coordinate blocks for {G.descriptor().get('kind')}")


def coordinate_block(G: AmbientGroup, k: int) -> FiniteSubgroup:
    """Finite factors in full plus restricted-sum coordinates 0..k-1."""
    return subgroup_of(G, _block_gens(G, k))


def coordinate_blocks(G, k: int) -> list[FiniteSubgroup]:
    if G.is_finite:
        return [coordinate_block(G, 1)]
    return [coordinate_block(G, i) for i in range(1, k + 1)]


def all_cyclic(G) -> list[FiniteSubgroup]:
    """Distinct cyclic subgroups of G (of the block-1 truncation if G is infinite)."""
    src = G.elements() if G.is_finite else coordinate_block(G, 1).values
    seen: dict = {}
    for x in sorted(src, key=G.encode):
        S = subgroup_of(G, [x])
        seen.setdefault(S.elements, S)
    return list(seen.values())


def parse_family(G, spec) -> list[FiniteSubgroup]:
    """``coordinate-blocks:k``, ``all-cyclic``, or a list of generator lists."""
    if isinstance(spec, str):
        if spec.startswith("coordinate-blocks:"):
            try:
                k = int(spec.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad base spec {spec!r}") from None
            if k < 1:
                raise ValueError("coordinate-blocks needs k >= 1")
            return coordinate_blocks(G, k)
        if spec == "all-cyclic":
            return all_cyclic(G)
        raise ValueError(f"unknown base spec {spec!r}")
    if isinstance(spec, list) and spec and all(isinstance(g, list) for g in spec):
        return [subgroup_of(G, [G.element_from_json(x) for x in gens]) for gens in spec]
    raise ValueError("bases must be a spec string or a non-empty list of generator lists")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class Finding:
    fixture: str
    verdict: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"fixture": self.fixture, "verdict": self.verdict, **self.data}


@dataclass
class LawReport:
    law: str
    findings: list[Finding] = field(default_factory=list)
    note: str = ""

    @property
    def violated(self) -> bool:
        return any(f.verdict == VIOLATION for f in self.findings)

    def verdicts(self) -> list[str]:
        return [f.verdict for f in self.findings]

    def to_json(self) -> dict:
        out = {"law": self.law, "findings": [f.to_json() for f in self.findings]}
        if self.note:
            out["note"] = self.note
        return out


def _settled(*ests: EntropyEstimate) -> bool:
    return all(e.settled for e in ests)


def _eq_verdict(ok: bool, ests) -> str:
    if not _settled(*ests):
        return INCONCLUSIVE
    if not ok:
        return VIOLATION
    return HOLDS if all(e.status == CERTIFIED_ZERO for e in ests) else HOLDS_CERT


def _ineq_verdict(ok: bool, ests) -> str:
    if not _settled(*ests):
        return INCONCLUSIVE
    return INEQ if ok else VIOLATION


def _est(e: EntropyEstimate) -> dict:
    return {"beta": e.beta, "status": e.status, "reached_at": e.reached_at}


# ---------------------------------------------------------------------------
# individual laws
# ---------------------------------------------------------------------------

def check_identity_zero(fixtures: list[tuple[str, AmbientGroup, list[FiniteSubgroup]]],
                        cfg: EntropyConfig | None = None) -> LawReport:
    rep = LawReport("identity_zero")
    for name, G, family in fixtures:
        ests = [entropy_along(Identity(G), F, cfg) for F in family]
        ok = all(e.beta == 1 and e.status == CERTIFIED_ZERO for e in ests)
        rep.findings.append(Finding(name, HOLDS if ok else VIOLATION,
                                    {"bases": len(family), "betas": [_est(e) for e in ests]}))
    return rep


def check_conjugation(name: str, alpha: Endomorphism, phi: Endomorphism, family: list[FiniteSubgroup],
                      cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    """beta(φ, K) = beta(αφα⁻¹, α(K)) per base."""
    rep = report or LawReport("conjugation")
    inv = alpha.inverse()
    if inv is None:
        raise StructuralError("conjugating map must be an automorphism")
    psi = Compose(alpha, Compose(phi, inv))
    rows = []
    verdicts = []
    for K in family:
        a = entropy_along(phi, K, cfg)
        b = entropy_along(psi, image_subgroup(alpha, K), cfg)
        verdicts.append(_eq_verdict(a.beta == b.beta, (a, b)))
        rows.append({"phi": _est(a), "conjugate": _est(b)})
    rep.findings.append(Finding(name, _worst(verdicts), {"per_base": rows}))
    return rep


def check_log_law(name: str, phi: Endomorphism, family: list[FiniteSubgroup], m_range,
                  cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    """beta(φ^m, T_m(φ, F)) = beta(φ, F)^m per base and for the family maxima."""
    rep = report or LawReport("log_law", note="φ^m is evaluated on the matched family {T_m(φ, F)}")
    for m in m_range:
        verdicts, rows, left, right = [], [], [], []
        for F in family:
            if m == 0:
                e = entropy_along(Identity(F.ambient), F, cfg)
                ok = e.beta == 1
                verdicts.append(_eq_verdict(ok, (e,)))
                rows.append({"phi^0": _est(e)})
                continue
            base = entropy_along(phi, F, cfg)
            V = _trajectory_subgroup(phi, F, m)
            pm = entropy_along(phi.power(m), V, cfg)
            left.append(pm)
            right.append(base)
            ok = pm.beta == base.beta ** m
            verdicts.append(_eq_verdict(ok, (base, pm)))
            rows.append({"phi": _est(base), "phi^m": _est(pm), "matched_base_order": len(V)})
        data = {"m": m, "per_base": rows}
        if m > 0:
            L, R = combine(left), combine(right)
            data["family"] = {"phi^m": L.beta, "phi": R.beta}
            verdicts.append(_eq_verdict(L.beta == R.beta ** m, left + right))
        rep.findings.append(Finding(f"{name}/m={m}", _worst(verdicts), data))
    return rep


def _trajectory_subgroup(phi, F, m: int) -> FiniteSubgroup:
    """T_m(φ, F) as a finite subgroup (it is one in quasihamiltonian groups)."""
    if m == 1:
        return F
    tr = trajectory(phi, F, n_max=m - 1)
    if not all(tr.subgroup_flags):
        raise StructuralError("trajectory is not a subgroup")
    G = F.ambient
    gens = list(F.generator_values)
    cur = list(gens)
    for _ in range(m - 1):
        cur = [phi.apply_value(g) for g in cur]
        gens += cur
    return FiniteSubgroup.from_values(G, tr.last, gens)


@dataclass
class ATProfile:
    normal: bool | None
    invariant: bool | None
    stable: bool | None
    kernel_in_H: bool | None
    quasihamiltonian: bool | None
    fc: bool | None
    finite_index: bool
    H_finite: bool

    def theorems(self) -> list[str]:
        out = []
        if self.quasihamiltonian is True and self.normal is True and self.invariant is True:
            if self.stable is True and self.kernel_in_H is True:
                out.append("stable-kernel")
            if self.fc is True:
                out.append("quasihamiltonian-fc")
            if self.finite_index:
                out.append("finite-index")
            if self.H_finite:
                out.append("finite-subgroup")
        return out

    def to_json(self) -> dict:
        tri = lambda v: "unknown" if v is None else v
        return {"normal": tri(self.normal), "invariant": tri(self.invariant), "stable": tri(self.stable),
                "kernel_in_H": tri(self.kernel_in_H), "quasihamiltonian": tri(self.quasihamiltonian),
                "fc": tri(self.fc), "finite_index": self.finite_index, "H_finite": self.H_finite,
                "theorems": self.theorems()}


def is_quasihamiltonian(G) -> bool | None:
    """Structural verdict; exhaustive for finite groups."""
    if G.is_abelian:
        return True
    d = G.descriptor().get("kind")
    if d in ("hamiltonian", "iwasawa"):
        return True
    if G.is_finite and G.size() <= 512:
        return classify(G, subgroup_cap=0).quasihamiltonian is True
    if isinstance(G, DirectProduct):
        parts = [is_quasihamiltonian(f) for f in G.factors]
        exps = [f.exponent() for f in G.factors]
        coprime = all(math.gcd(a, b) == 1 for a, b in _pairs(exps))
        if all(p is True for p in parts) and coprime:
            return True
    return None


def is_fc(G) -> bool | None:
    if G.is_finite or G.is_abelian:
        return True
    if getattr(G, "iwasawa", None) is not None:
        return fc_by_commutator(G)
    if isinstance(G, DirectProduct):
        parts = [is_fc(f) for f in G.factors]
        if all(p is True for p in parts):
            return True
        if any(p is False for p in parts):
            return False
    return None


def _pairs(xs):
    return [(xs[i], xs[j]) for i in range(len(xs)) for j in range(i + 1, len(xs))]


def at_profile(phi: Endomorphism, H: Witness) -> ATProfile:
    G = phi.domain
    inv = invariance_report(phi, H)
    return ATProfile(getattr(H, "normal", True), inv.invariant, inv.stable, inv.kernel_contained,
                     is_quasihamiltonian(G), is_fc(G), H.finite_index(G), H.is_finite())


@dataclass
class ATResult:
    profile: ATProfile
    per_base: list[dict]
    sup: dict
    verdict: str
    mode: str


def check_addition(name: str, phi: Endomorphism, H: Witness, family: list[FiniteSubgroup],
                   cfg: EntropyConfig | None = None, report: LawReport | None = None,
                   force_inequality: bool = False) -> LawReport:
    """Per-base inequality always; equality of the family maxima when a theorem applies."""
    rep = report or LawReport("addition", note="maxima are taken over the matched families U, πU, U∩H")
    G = phi.domain
    prof = at_profile(phi, H)
    if prof.normal is not True or prof.invariant is not True:
        rep.findings.append(Finding(name, INCONCLUSIVE, {"profile": prof.to_json(),
                                                         "reason": "H not known to be normal and invariant"}))
        return rep
    Q = QuotientAmbient(G, H)
    bar = QuotientInduced(phi, Q)
    res = Restriction(phi, H)
    rows, verdicts = [], []
    ests_g, ests_q, ests_h = [], [], []
    for U in family:
        piU = FiniteSubgroup.from_values(Q, {Q.canon(u) for u in U.values},
                                         [Q.canon(g) for g in U.generator_values])
        UH = H.meet(U)
        b = entropy_along(phi, U, cfg)
        q = entropy_along(bar, piU, cfg)
        r = entropy_along(res, UH, cfg)
        ests_g.append(b)
        ests_q.append(q)
        ests_h.append(r)
        verdicts.append(_ineq_verdict(b.beta >= q.beta * r.beta, (b, q, r)))
        rows.append({"U_order": len(U), "phi": _est(b), "quotient": _est(q), "restriction": _est(r)})
    B, Qs, R = combine(ests_g), combine(ests_q), combine(ests_h)
    thms = [] if force_inequality else prof.theorems()
    sup = {"phi": B.beta, "quotient": Qs.beta, "restriction": R.beta}
    if thms:
        mode = "equality"
        eq = _eq_verdict(B.beta == Qs.beta * R.beta, ests_g + ests_q + ests_h)
        # the per-base inequalities are implied once equality holds
        verdicts = [eq] if all(v == INEQ for v in verdicts) else verdicts + [eq]
    else:
        mode = "inequality-only"
        verdicts.append(_ineq_verdict(B.beta >= Qs.beta * R.beta, ests_g + ests_q + ests_h))
    data = {"profile": prof.to_json(), "mode": mode, "family_max": sup, "per_base": rows}
    rep.findings.append(Finding(name, _worst(verdicts), data))
    return rep


def check_monotonicity(name: str, phi: Endomorphism, H: Witness, family: list[FiniteSubgroup],
                       cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    rep = report or LawReport("monotonicity")
    sub = LawReport("tmp")
    check_addition(name, phi, H, family, cfg, sub, force_inequality=True)
    f = sub.findings[0]
    if "family_max" in f.data:
        fm = f.data["family_max"]
        restr_ok = fm["phi"] >= fm["restriction"] and fm["phi"] >= fm["quotient"]
        if not restr_ok and f.verdict != INCONCLUSIVE:
            f.verdict = VIOLATION
    rep.findings.append(f)
    return rep


def check_prime_sum(name: str, phi: Endomorphism, family: list[FiniteSubgroup],
                    cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    """beta(φ, F) = ∏_p beta(φ_p, F_p) with F_p the p-component of F."""
    rep = report or LawReport("prime_sum")
    G = phi.domain
    rows, verdicts, whole, parts = [], [], [], {}
    for F in family:
        e = entropy_along(phi, F, cfg)
        primes = sorted({p for v in F.values for p in factorize(G.element_order(v))})
        per = {}
        for p in primes:
            Fp = p_component(F, p)
            per[p] = entropy_along(Restriction(phi, PrimaryComponent(G, p)), Fp, cfg)
            parts.setdefault(p, []).append(per[p])
        whole.append(e)
        prod = math.prod(x.beta for x in per.values())
        verdicts.append(_eq_verdict(e.beta == prod, [e, *per.values()]))
        rows.append({"phi": _est(e), "components": {str(p): _est(x) for p, x in per.items()}})
    W = combine(whole)
    P = {p: combine(v) for p, v in parts.items()}
    all_ests = whole + [x for v in parts.values() for x in v]
    verdicts.append(_eq_verdict(W.beta == math.prod(x.beta for x in P.values()), all_ests))
    rep.findings.append(Finding(name, _worst(verdicts), {
        "family_max": {"phi": W.beta, **{str(p): x.beta for p, x in sorted(P.items())}}, "per_base": rows}))
    return rep


def check_inverse_modulus(name: str, phi: Endomorphism, family: list[FiniteSubgroup],
                          cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    rep = report or LawReport("inverse_modulus")
    rows, verdicts = [], []
    for U in family:
        r = inverse_entropy_check(phi, U, cfg)
        verdicts.append(r.verdict)
        rows.append({"forward": _est(r.beta_forward), "inverse": _est(r.beta_inverse), "delta": str(r.delta)})
    rep.findings.append(Finding(name, _worst(verdicts), {"per_base": rows}))
    return rep


def check_oracle_equivalence(name: str, phi: Endomorphism, family: list[FiniteSubgroup],
                             cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    """Trajectory β against the limit-free β, per base."""
    rep = report or LawReport("limit_free_agreement")
    rows, verdicts = [], []
    for U in family:
        a = entropy_along(phi, U, cfg)
        b = limit_free_entropy(phi, U, cfg)
        verdicts.append(_eq_verdict(a.beta == b.beta, (a, b)))
        rows.append({"trajectory": _est(a), "limit_free": _est(b)})
    rep.findings.append(Finding(name, _worst(verdicts), {"per_base": rows}))
    return rep


def check_derived_zero(name: str, phi: Endomorphism, cfg: EntropyConfig | None = None,
                       report: LawReport | None = None) -> LawReport:
    """Zero entropy of φ on a finite derived subgroup of a quasihamiltonian FC group."""
    rep = report or LawReport("derived_zero")
    G = phi.domain
    W = derived_witness(G)
    D = W.finite_subgroup() if G.is_finite else None
    if D is None:
        if not W.is_finite():
            rep.findings.append(Finding(name, INCONCLUSIVE, {"reason": "derived subgroup is infinite"}))
            return rep
        raise StructuralError("finite derived subgroup of an infinite group is not enumerated")
    e = entropy_along(Restriction(phi, W), D, cfg)
    ok = e.beta == 1 and e.status == CERTIFIED_ZERO
    rep.findings.append(Finding(name, HOLDS if ok else VIOLATION, {"derived_order": len(D), "estimate": _est(e)}))
    return rep


def check_shift_entropy(name: str, phi: Endomorphism, F: FiniteSubgroup, p: int, by: int = 4,
                        cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    """beta = p, window-stable by step ``by``."""
    rep = report or LawReport("shift_entropy")
    e = entropy_along(phi, F, cfg)
    ok = e.beta == p and e.settled and e.reached_at + e.window - 1 <= by
    rep.findings.append(Finding(name, _eq_verdict(ok, (e,)), {"p": p, "estimate": _est(e)}))
    return rep


def check_p_power(name: str, phi: Endomorphism, family: list[FiniteSubgroup], p: int,
                  cfg: EntropyConfig | None = None, report: LawReport | None = None) -> LawReport:
    """On a p-group, every nonzero settled beta is a positive power of p."""
    rep = report or LawReport("p_power")
    ests = [entropy_along(phi, F, cfg) for F in family]
    ok = all(e.beta == 1 or set(factorize(e.beta)) == {p} for e in ests if e.settled)
    rep.findings.append(Finding(name, _eq_verdict(ok, ests), {"p": p, "betas": [e.beta for e in ests]}))
    return rep


_RANK = {HOLDS: 0, HOLDS_CERT: 1, INEQ: 2, INCONCLUSIVE: 3, VIOLATION: 4}


def _worst(verdicts: list[str]) -> str:
    if not verdicts:
        return INCONCLUSIVE
    return max(verdicts, key=_RANK.__getitem__)
