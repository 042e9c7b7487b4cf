"""Whole-document validation that reports every violation, not just the first.

Violations are ``(pointer, message)`` pairs with JSON-pointer style paths.
Structural problems are collected by walking the tree; semantic checks (group
axioms, homomorphism property) only run once the structure is clean.
"""
from __future__ import annotations

from .core import StructuralError
from .groups import DecodeError, DescriptorError, build, check_iwasawa_params
from .morphisms import MorphismError, parse_endomorphism
from .subgroups import parse_witness

Violation = tuple[str, str]

_GROUP_FIELDS = {
    "cyclic": {"n": "int"},
    "q8": {},
    "product": {"factors": "groups"},
    "restricted_sum": {"component": "group"},
    "semidirect": {"A": "group", "m": "int", "action": "action"},
    "quotient": {"base": "group", "exponent": "int"},
    "hamiltonian": {},
    "iwasawa": {"p": "int", "n": "int", "m": "int", "s": "int", "A": "group"},
}
_GROUP_OPTIONAL = {"restricted_sum": {"index_set": "index"}, "hamiltonian": {"B": "group", "D": "group"}}

_ENDO_FIELDS = {
    "identity": {}, "trivial": {},
    "shift": {}, "power": {"exponent": "int"},
    "component_map": {"images": "list"},
    "diagonal": {"maps": "endos"},
    "compose": {"outer": "endo", "inner": "endo"},
    "automorphism": {"forward": "endo", "inverse": "endo"},
    "conjugation": {"by": "any"},
    "permute": {"mapping": "object"},
    "lift": {"on_A": "endo"},
}
_ENDO_OPTIONAL = {"shift": {"offset": "int"}}

_WITNESS_FIELDS = {
    "finite": {"generators": "list"}, "whole": {}, "trivial": {}, "primary": {"p": "int"},
    "index_range": {"from": "int"}, "power": {"exponent": "int"}, "derived": {},
}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _walk(desc, path: str, table: dict, optional: dict, what: str, out: list[Violation]) -> None:
    if not isinstance(desc, dict):
        out.append((path or "/", f"{what} must be an object"))
        return
    kind = desc.get("kind")
    if kind is None:
        out.append((f"{path}/kind", "missing required field"))
        return
    if kind not in table:
        out.append((f"{path}/kind", f"unknown {what} kind {kind!r}"))
        return
    fields = table[kind]
    extra = optional.get(kind, {})
    for key, typ in fields.items():
        if key not in desc:
            out.append((f"{path}/{key}", "missing required field"))
        else:
            _check_type(desc[key], typ, f"{path}/{key}", out)
    for key, typ in extra.items():
        if key in desc:
            _check_type(desc[key], typ, f"{path}/{key}", out)
    for key in sorted(set(desc) - set(fields) - set(extra) - {"kind"}):
        out.append((f"{path}/{key}", "unexpected field"))
    if what == "group" and kind == "iwasawa" and all(_is_int(desc.get(k)) for k in "pnms"):
        for p, msg in check_iwasawa_params(desc["p"], desc["n"], desc["m"], desc["s"]):
            out.append((f"{path}{p}", msg))


def _check_type(v, typ: str, path: str, out: list[Violation]) -> None:
    if typ == "int" and not _is_int(v):
        out.append((path, "must be an integer"))
    elif typ == "group":
        _walk(v, path, _GROUP_FIELDS, _GROUP_OPTIONAL, "group", out)
    elif typ == "groups":
        if not isinstance(v, list) or not v:
            out.append((path, "must be a non-empty list"))
        else:
            for i, f in enumerate(v):
                _walk(f, f"{path}/{i}", _GROUP_FIELDS, _GROUP_OPTIONAL, "group", out)
    elif typ == "endo":
        _walk(v, path, _ENDO_FIELDS, _ENDO_OPTIONAL, "endomorphism", out)
    elif typ == "endos":
        if not isinstance(v, list):
            out.append((path, "must be a list"))
        else:
            for i, f in enumerate(v):
                _walk(f, f"{path}/{i}", _ENDO_FIELDS, _ENDO_OPTIONAL, "endomorphism", out)
    elif typ == "action":
        if not isinstance(v, dict) or v.get("kind") not in ("power", "table"):
            out.append((f"{path}/kind", "action kind must be 'power' or 'table'"))
        elif v["kind"] == "power" and not _is_int(v.get("exponent")):
            out.append((f"{path}/exponent", "must be an integer"))
        elif v["kind"] == "table" and not isinstance(v.get("images"), list):
            out.append((f"{path}/images", "must be a list of integer lists"))
    elif typ == "index" and v not in ("N", "Z"):
        out.append((path, "must be 'N' or 'Z'"))
    elif typ == "list" and not isinstance(v, list):
        out.append((path, "must be a list"))
    elif typ == "object" and not isinstance(v, dict):
        out.append((path, "must be an object"))


def validate_group(desc, path: str = "") -> list[Violation]:
    out: list[Violation] = []
    _walk(desc, path, _GROUP_FIELDS, _GROUP_OPTIONAL, "group", out)
    if not out:
        try:
            build(desc, path)
        except (DescriptorError, DecodeError, StructuralError) as exc:
            out.append((getattr(exc, "path", path) or "/", getattr(exc, "message", str(exc))))
    return out


def validate_job(doc) -> list[Violation]:
    """A job document carries ``group`` and optionally ``endomorphism``, ``subgroup``, ``bases``.
    Anything without a ``group`` key is validated as a bare group descriptor."""
    if not isinstance(doc, dict) or "group" not in doc:
        return validate_group(doc)
    out = validate_group(doc["group"], "/group")
    for key in sorted(set(doc) - {"group", "endomorphism", "subgroup", "bases"}):
        out.append((f"/{key}", "unexpected field"))
    if "endomorphism" in doc:
        _walk(doc["endomorphism"], "/endomorphism", _ENDO_FIELDS, _ENDO_OPTIONAL, "endomorphism", out)
    if "subgroup" in doc:
        _walk(doc["subgroup"], "/subgroup", _WITNESS_FIELDS, {}, "subgroup", out)
    if "bases" in doc:
        b = doc["bases"]
        if not (isinstance(b, str) or (isinstance(b, list) and b and all(isinstance(x, list) for x in b))):
            out.append(("/bases", "must be a spec string or a non-empty list of generator lists"))
    if out:
        return out
    G = build(doc["group"], "/group")
    if "endomorphism" in doc:
        try:
            parse_endomorphism(G, doc["endomorphism"], "/endomorphism")
        except MorphismError as exc:
            out.append((exc.path or "/endomorphism", exc.message))
    if "subgroup" in doc:
        try:
            parse_witness(G, doc["subgroup"], "/subgroup")
        except (DescriptorError, DecodeError, StructuralError) as exc:
            out.append((getattr(exc, "path", "/subgroup") or "/subgroup", str(getattr(exc, "message", exc))))
    if "bases" in doc:
        from .laws import parse_family
        try:
            parse_family(G, doc["bases"])
        except (ValueError, StructuralError) as exc:
            out.append(("/bases", str(exc)))
    return out
