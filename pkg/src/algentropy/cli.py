"""Command-line front end.

    algentropy entropy    --group G.json --endo E.json [--bases SPEC]
    algentropy limit-free --group G.json --endo E.json [--bases SPEC]
    algentropy structure  --group G.json
    algentropy decompose  --group G.json [--bases SPEC]
    algentropy verify     [--bundle FILE]
    algentropy validate   FILE

``--group`` also accepts a job document carrying ``group`` plus optional
``endomorphism``, ``subgroup`` and ``bases`` keys.  Structured reports keep
timing in a separate top-level ``timing`` section so that everything else is
byte-identical across runs.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from json import JSONDecodeError

from . import __version__
from .core import BudgetExceeded, DecodeError, StructuralError
from .entropy import EXHAUSTED, EntropyConfig, entropy_along, limit_free_entropy
from .groups import DescriptorError, build
from .kernels import BACKEND
from .laws import parse_family
from .morphisms import MorphismError, parse_endomorphism
from .schema import validate_job

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_BUDGET = 0, 1, 2, 3

_INPUT_ERRORS = (DescriptorError, MorphismError, DecodeError, StructuralError, JSONDecodeError, OSError, ValueError)


class InputError(Exception):
    pass


def _read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_job(args) -> dict:
    if not args.group:
        raise InputError("--group is required")
    doc = _read_json(args.group)
    job = dict(doc) if isinstance(doc, dict) and "group" in doc else {"group": doc}
    if args.endo:
        job["endomorphism"] = _read_json(args.endo)
    if args.bases:
        job["bases"] = args.bases
    problems = validate_job(job)
    if problems:
        raise InputError("; ".join(f"{p}: {m}" for p, m in problems))
    return job


def _config(args) -> EntropyConfig:
    return EntropyConfig(n_max=args.n_max, window=args.window, size_budget=args.size_budget)


def _display_log(beta: int) -> str:
    return f"{math.log(beta):.6f}"


def _entropy_table(args, limit_free: bool) -> tuple[dict, bool]:
    job = _load_job(args)
    if "endomorphism" not in job:
        raise InputError("an endomorphism is required (--endo or job key 'endomorphism')")
    G = build(job["group"])
    phi = parse_endomorphism(G, job["endomorphism"], "/endomorphism")
    family = parse_family(G, job.get("bases", "coordinate-blocks:1"))
    cfg = _config(args)
    rows = []
    for k, F in enumerate(family):
        est = limit_free_entropy(phi, F, cfg) if limit_free else entropy_along(phi, F, cfg)
        rows.append({"base": k, "base_order": len(F),
                     "generators": [G.element_to_json(g) for g in F.generator_values], **est.to_json()})
    best = max(rows, key=lambda r: (r["beta"], -r["base"]))
    exhausted = any(r["status"] == EXHAUSTED for r in rows)
    res = {"per_base": rows, "family_max": {"beta": best["beta"], "witness_base": best["base"],
                                            "lower_bound": True}}
    return {"job": job, "results": res}, exhausted


def cmd_entropy(args):
    return _entropy_table(args, limit_free=False)


def cmd_limit_free(args):
    return _entropy_table(args, limit_free=True)


def cmd_structure(args):
    from .structure import classify, dedekind_baer_decompose, fc_by_commutator
    job = _load_job(args)
    G = build(job["group"])
    rep = classify(G, seed=args.seed)
    res = {"classification": rep.to_json()}
    if G.is_finite and not G.is_abelian:
        res["dedekind_baer"] = dedekind_baer_decompose(G).to_json(G)
    if getattr(G, "iwasawa", None) is not None:
        p, n, m, s = G.iwasawa
        res["iwasawa"] = {"p": p, "n": n, "m": m, "s": s, "fc_by_commutator": fc_by_commutator(G)}
    return {"job": job, "results": res}, False


def cmd_decompose(args):
    from .structure import NotASubgroup, dedekind_baer_decompose, p_component, p_decompose_element
    from .groups import factorize
    job = _load_job(args)
    G = build(job["group"])
    res: dict = {}
    if G.is_finite and not G.is_abelian:
        res["dedekind_baer"] = dedekind_baer_decompose(G).to_json(G)
    bases = []
    for k, F in enumerate(parse_family(G, job.get("bases", "coordinate-blocks:1"))):
        primes = sorted({p for v in F.values for p in factorize(G.element_order(v))})
        comps = {}
        for p in primes:
            try:
                comps[str(p)] = {"order": len(p_component(F, p))}
            except NotASubgroup as exc:
                comps[str(p)] = {"error": str(exc), "elements": [c.hex() for c in exc.elements]}
        elems = []
        for g in F.generator_values:
            d = p_decompose_element(G.encode(g), G)
            elems.append({"element": G.element_to_json(g), "order": d.order,
                          "parts": {str(p): G.element_to_json(G.decode(c)) for p, c in sorted(d.parts.items())},
                          "bezout": d.to_json()["bezout"]})
        bases.append({"base": k, "base_order": len(F), "p_components": comps, "generators": elems})
    res["bases"] = bases
    return {"job": job, "results": res}, False


def cmd_verify(args):
    from .fixtures import load_bundle
    from .verify import run_verify
    bundle = load_bundle(args.bundle)
    report = run_verify(bundle, _config(args))
    job = {"bundle": args.bundle or "bundled", "bundle_version": bundle["version"]}
    return {"job": job, "results": report}, False


def cmd_validate(args):
    doc = _read_json(args.document)
    problems = validate_job(doc)
    return {"job": {"document": args.document},
            "results": {"valid": not problems, "violations": [{"path": p, "message": m} for p, m in problems]}}, False


COMMANDS = {"entropy": cmd_entropy, "limit-free": cmd_limit_free, "structure": cmd_structure,
            "decompose": cmd_decompose, "verify": cmd_verify, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="algentropy", description="Algebraic entropy of endomorphisms of torsion groups.")
    ap.add_argument("--version", action="version", version=f"algentropy {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "validate":
            p.add_argument("document")
        else:
            p.add_argument("--group")
            p.add_argument("--endo")
            p.add_argument("--bases")
            p.add_argument("--n-max", type=int, default=32)
            p.add_argument("--window", type=int, default=3)
            p.add_argument("--size-budget", type=int, default=2 ** 20)
            p.add_argument("--strict", action="store_true", help="exit 3 when a budget is exhausted")
        if name == "verify":
            p.add_argument("--bundle")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out")
        p.add_argument("--seed", type=int, default=0)
    return ap


def render_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_text(command: str, doc: dict) -> str:
    res = doc.get("results", {})
    lines = [f"algentropy {doc['tool']['version']}: {command}"]
    if "error" in doc:
        lines.append(f"error: {doc['error']}")
    elif command in ("entropy", "limit-free"):
        for r in res["per_base"]:
            lines.append(f"base {r['base']} (order {r['base_order']}): beta = {r['beta']}  "
                         f"[log beta = {_display_log(r['beta'])}, display only]  "
                         f"status = {r['status']}  reached_at = {r['reached_at']}")
        fm = res["family_max"]
        lines.append(f"family maximum: beta = {fm['beta']} (base {fm['witness_base']}; a lower bound for the entropy)")
    elif command == "structure":
        c = res["classification"]
        for key in ("order", "abelian", "quasihamiltonian", "hamiltonian", "fc", "mode"):
            lines.append(f"{key}: {c[key]}")
        for key, val in sorted(c["witnesses"].items()):
            lines.append(f"witness {key}: {json.dumps(val, sort_keys=True)}")
        if "dedekind_baer" in res:
            lines.append(f"dedekind-baer: {res['dedekind_baer']['verdict']}")
        if "iwasawa" in res:
            lines.append(f"fc_by_commutator: {res['iwasawa']['fc_by_commutator']}")
    elif command == "decompose":
        if "dedekind_baer" in res:
            db = res["dedekind_baer"]
            lines.append(f"dedekind-baer: {db['verdict']}" + (f" ({db['reason']})" if db.get("reason") else ""))
            if db["verdict"] == "hamiltonian":
                lines.append(f"  Q8 = <{db['i']}, {db['j']}>, |B| = {db['B']['order']}, |D| = {db['D']['order']}")
        for b in res["bases"]:
            comps = ", ".join(f"{p}: {c.get('order', 'not a subgroup')}" for p, c in b["p_components"].items())
            lines.append(f"base {b['base']} (order {b['base_order']}): p-components {{{comps}}}")
            for g in b["generators"]:
                parts = ", ".join(f"{p}: {json.dumps(v)}" for p, v in g["parts"].items())
                lines.append(f"  {json.dumps(g['element'])} (order {g['order']}) -> {parts}")
    elif command == "verify":
        for law in res["laws"]:
            lines.append(f"[{law['law']}]")
            for f in law["findings"]:
                lines.append(f"  {f['verdict']:<28} {f['fixture']}")
        s = res["structure"]
        agree = sum(r["agree"] for r in s["dedekind_baer"])
        lines.append(f"[structure] dedekind-baer oracle agreement {agree}/{len(s['dedekind_baer'])}; "
                     f"iwasawa derived {s['iwasawa_derived']['cases']} cases, all equal = {s['iwasawa_derived']['all_equal']}")
        for name, fc in sorted(s["fc_by_commutator"].items()):
            lines.append(f"[structure] fc_by_commutator({name}) = {fc}")
        summ = res["summary"]
        lines.append(f"violations: {len(summ['violations'])}  ok: {summ['ok']}")
    elif command == "validate":
        if res["valid"]:
            lines.append("valid")
        for v in res["violations"]:
            lines.append(f"{v['path']}: {v['message']}")
    if "timing" in doc:
        lines.append(f"elapsed: {doc['timing']['seconds']:.3f} s")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    doc: dict = {"tool": {"name": "algentropy", "version": __version__}, "command": args.command}
    code = EXIT_OK
    try:
        body, exhausted = COMMANDS[args.command](args)
        doc.update(body)
        if args.command == "verify" and not body["results"]["summary"]["ok"]:
            code = EXIT_VIOLATION
        elif args.command == "validate" and not body["results"]["valid"]:
            code = EXIT_INPUT
        elif exhausted and getattr(args, "strict", False):
            code = EXIT_BUDGET
    except BudgetExceeded as exc:
        doc["error"] = str(exc)
        code = EXIT_BUDGET
    except (InputError, *_INPUT_ERRORS) as exc:
        doc["error"] = str(exc)
        code = EXIT_INPUT
    doc["exit_code"] = code
    doc["timing"] = {"seconds": round(time.perf_counter() - start, 6), "backend": BACKEND}
    text = render_json(doc) if args.format == "json" else render_text(args.command, doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_INPUT and "error" in doc:
        print(f"algentropy: {doc['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
