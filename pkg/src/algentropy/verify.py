"""Run every law and structural check over the fixture bundle.

The report is deterministic: fixtures are processed in bundle order and no
timing or host data enters the result dictionary.
"""
from __future__ import annotations

from .core import StructuralError
from .entropy import EntropyConfig
from .fixtures import load_bundle
from .groups import build
from .laws import (VIOLATION, LawReport, check_addition, check_conjugation, check_derived_zero,
                   check_identity_zero, check_inverse_modulus, check_log_law, check_monotonicity,
                   check_oracle_equivalence, check_p_power, check_prime_sum, check_shift_entropy,
                   coordinate_block, parse_family)
from .morphisms import parse_endomorphism
from .structure import (classify, dedekind_baer_decompose, fc_by_commutator, hamiltonian_oracle,
                        iwasawa_derived, iwasawa_parameter_grid)
from .subgroups import parse_witness

LAW_ORDER = ["identity_zero", "shift_entropy", "p_power", "conjugation", "log_law", "monotonicity",
             "addition", "prime_sum", "inverse_modulus", "limit_free_agreement", "derived_zero"]


class _Fixtures:
    """Builds groups once and caches them by name."""

    def __init__(self, bundle: dict):
        self.spec = bundle["groups"]
        self._groups: dict = {}
        self._families: dict = {}

    def group(self, name):
        if name not in self._groups:
            self._groups[name] = build(self.spec[name]["group"], f"/groups/{name}/group")
        return self._groups[name]

    def family(self, name, override=None):
        key = (name, override)
        if key not in self._families:
            self._families[key] = parse_family(self.group(name), override or self.spec[name]["bases"])
        return self._families[key]


def run_laws(bundle: dict | None = None, cfg: EntropyConfig | None = None, only=None) -> list[LawReport]:
    bundle = bundle or load_bundle()
    cfg = cfg or EntropyConfig()
    fx = _Fixtures(bundle)
    spec = bundle["laws"]
    out = []
    for law in LAW_ORDER:
        if law not in spec or (only and law not in only):
            continue
        rep = LawReport(law)
        for item in spec[law]:
            if law == "identity_zero":
                rep.findings += check_identity_zero([(item, fx.group(item), fx.family(item))], cfg).findings
                continue
            G = fx.group(item["group"])
            fam = fx.family(item["group"], item.get("bases"))
            phi = parse_endomorphism(G, item["endo"], f"/laws/{law}/endo")
            name = item["name"]
            if law == "shift_entropy":
                check_shift_entropy(name, phi, coordinate_block(G, 1), item["p"], item.get("by", 4), cfg, rep)
            elif law == "p_power":
                check_p_power(name, phi, fam, item["p"], cfg, rep)
            elif law == "conjugation":
                alpha = parse_endomorphism(G, item["alpha"], f"/laws/{law}/alpha")
                check_conjugation(name, alpha, phi, fam, cfg, rep)
            elif law == "log_law":
                check_log_law(name, phi, fam, item["m"], cfg, rep)
            elif law == "monotonicity":
                check_monotonicity(name, phi, parse_witness(G, item["subgroup"]), fam, cfg, rep)
            elif law == "addition":
                check_addition(name, phi, parse_witness(G, item["subgroup"]), fam, cfg, rep)
                if item.get("exploratory"):
                    rep.findings[-1].data["exploratory"] = True
            elif law == "prime_sum":
                check_prime_sum(name, phi, fam, cfg, rep)
            elif law == "inverse_modulus":
                check_inverse_modulus(name, phi, fam, cfg, rep)
            elif law == "limit_free_agreement":
                check_oracle_equivalence(name, phi, fam, cfg, rep)
            elif law == "derived_zero":
                check_derived_zero(name, phi, cfg, rep)
        if law == "log_law":
            rep.note = "φ^m is evaluated on the matched family {T_m(φ, F)}"
        elif law == "addition":
            rep.note = "maxima are taken over the matched families U, πU, U∩H"
        out.append(rep)
    return out


def run_structure(bundle: dict | None = None) -> dict:
    bundle = bundle or load_bundle()
    fx = _Fixtures(bundle)
    spec = bundle["structure"]
    db = []
    for name in spec["dedekind_baer"]:
        G = fx.group(name)
        res = dedekind_baer_decompose(G)
        oracle = hamiltonian_oracle(G)
        db.append({"fixture": name, "order": G.size(), "decomposition": res.verdict, "exhaustive_hamiltonian": oracle,
                   "agree": res.hamiltonian == oracle})
    grid = spec["iwasawa_grid"]
    reports = [iwasawa_derived(*params) for params in iwasawa_parameter_grid(grid["max_order"], tuple(grid["primes"]))]
    bad = [r.to_json() for r in reports if not r.equal]
    fc = {name: fc_by_commutator(fx.group(name)) for name in spec["fc_descriptor"]}
    tr = spec["truncations"]
    G = fx.group(tr["group"])
    trunc = []
    for k in tr["blocks"]:
        rep = classify(coordinate_block(G, k), subgroup_cap=0)
        trunc.append({"blocks": k, "order": rep.order, "abelian": rep.abelian, "quasihamiltonian": rep.quasihamiltonian})
    return {
        "dedekind_baer": db,
        "iwasawa_derived": {"cases": len(reports), "all_equal": not bad, "failures": bad},
        "fc_by_commutator": fc,
        "truncations": {"group": tr["group"], "results": trunc},
    }


def structure_ok(s: dict) -> bool:
    return (all(r["agree"] for r in s["dedekind_baer"]) and s["iwasawa_derived"]["all_equal"]
            and all(r["quasihamiltonian"] is True for r in s["truncations"]["results"]))


def run_verify(bundle: dict | None = None, cfg: EntropyConfig | None = None) -> dict:
    bundle = bundle or load_bundle()
    laws = run_laws(bundle, cfg)
    structure = run_structure(bundle)
    violations = [f"{r.law}:{f.fixture}" for r in laws for f in r.findings if f.verdict == VIOLATION]
    counts: dict = {}
    for r in laws:
        for f in r.findings:
            counts[f.verdict] = counts.get(f.verdict, 0) + 1
    ok = not violations and structure_ok(structure)
    return {"bundle_version": bundle["version"], "laws": [r.to_json() for r in laws], "structure": structure,
            "summary": {"verdicts": counts, "violations": violations, "structure_ok": structure_ok(structure),
                        "ok": ok}}


__all__ = ["run_verify", "run_laws", "run_structure", "StructuralError"]
