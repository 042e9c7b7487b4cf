"""Compiled vs pure-Python kernels.

Two measurements:

* the raw set-product kernel on random rows for three layouts (cyclic
  coordinates, a Cayley-table block, a semidirect block), checked for equal
  output across backends;
* end-to-end ``entropy_along`` on shift fixtures with each kernel swapped in,
  plus the plain-``set`` element backend for reference.

Run:  python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from algentropy import kernels
from algentropy.entropy import EntropyConfig, entropy_along
from algentropy.groups import build
from algentropy.laws import coordinate_block
from algentropy.lowering import Layout
from algentropy.morphisms import parse_endomorphism

LAYOUTS = {
    "sum_z30[0..7]": ({"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 30}}, (0, 7)),
    "q8 x sum_z3[0..9]": ({"kind": "product", "factors": [{"kind": "q8"},
                           {"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 3}}]}, (0, 9)),
    "iwasawa_sum_z9[0..5]": ({"kind": "iwasawa", "p": 3, "n": 2, "m": 1, "s": 1,
                            "A": {"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 9}}}, (0, 5)),
}

TRAJECTORIES = {
    "sum_z30 shift": ({"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 30}},
                      {"kind": "shift", "offset": 1}),
    "sum_z3 shift^3": ({"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 3}},
                       {"kind": "shift", "offset": 3}),
    "iwasawa_sum_z9 lift": ({"kind": "iwasawa", "p": 3, "n": 2, "m": 1, "s": 1,
                           "A": {"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 9}}},
                          {"kind": "lift", "on_A": {"kind": "shift", "offset": 1}}),
}


def _random_rows(layout: Layout, n: int, rng) -> np.ndarray:
    cols = [rng.integers(0, r, size=n) for r in layout.radices.tolist()]
    return np.stack(cols, axis=1).astype(np.int64)


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_kernels(repeat: int, nx: int = 20000, ny: int = 64) -> list[dict]:
    rng = np.random.default_rng(0)
    impls = kernels.backends()
    rows = []
    for name, (desc, window) in LAYOUTS.items():
        G = build(desc)
        L = Layout(G, window)
        X, Y = _random_rows(L, nx, rng), _random_rows(L, ny, rng)
        outs, times = {}, {}
        for bname, impl in impls.items():
            outs[bname] = impl.product_keys(X, Y, L.program, L.places)
            times[bname] = _best(lambda: impl.product_keys(X, Y, L.program, L.places), repeat)
        ref = outs["python"]
        agree = all(np.array_equal(ref, o) for o in outs.values())
        row = {"layout": name, "products": nx * ny, "agree": agree, **{f"{b}_s": t for b, t in times.items()}}
        if "cython" in times:
            row["speedup"] = times["python"] / times["cython"]
        rows.append(row)
    return rows


def bench_trajectories(repeat: int) -> list[dict]:
    impls = kernels.backends()
    saved = kernels._impl
    rows = []
    try:
        for name, (gdesc, edesc) in TRAJECTORIES.items():
            G = build(gdesc)
            phi = parse_endomorphism(G, edesc)
            F = coordinate_block(G, 1)
            row: dict = {"case": name}
            for bname, impl in impls.items():
                kernels._impl = impl
                cfg = EntropyConfig(backend="rows", debug=False)
                row["beta"] = entropy_along(phi, F, cfg).beta
                row[f"{bname}_s"] = _best(lambda: entropy_along(phi, F, cfg), repeat)
            kernels._impl = saved
            cfg = EntropyConfig(backend="values", debug=False)
            row["sets_s"] = _best(lambda: entropy_along(phi, F, cfg), 1)
            rows.append(row)
    finally:
        kernels._impl = saved
    return rows


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    print(f"active backend: {kernels.BACKEND}; available: {sorted(kernels.backends())}")
    kr = bench_kernels(args.repeat)
    print("\nset-product kernel (best of %d)" % args.repeat)
    for r in kr:
        extra = f"  cython {r['cython_s']*1e3:8.2f} ms  speedup {r['speedup']:5.1f}x" if "cython_s" in r else ""
        print(f"  {r['layout']:<22} {r['products']:>9} products  python {r['python_s']*1e3:8.2f} ms{extra}"
              f"  agree={r['agree']}")
    tr = bench_trajectories(args.repeat)
    print("\nentropy_along end to end")
    for r in tr:
        extra = f"  cython {r['cython_s']:6.3f} s" if "cython_s" in r else ""
        print(f"  {r['case']:<20} beta={r['beta']:<4} python {r['python_s']:6.3f} s{extra}  plain sets {r['sets_s']:6.3f} s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"kernels": kr, "trajectories": tr}, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
