import json
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from algentropy import kernels
from algentropy.groups import build
from algentropy.lowering import Layout

LAYOUTS = {
    "sum_z30": ({"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 30}}, (0, 5)),
    "sum_z2_two_sided": ({"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 2}, "index_set": "Z"},
                         (-3, 4)),
    "q8_x_sum_z3": ({"kind": "product", "factors": [{"kind": "q8"},
                     {"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 3}}]}, (0, 4)),
    "s3": ({"kind": "semidirect", "A": {"kind": "cyclic", "n": 3}, "m": 2,
            "action": {"kind": "table", "images": [[2]]}}, (0, 0)),
    "iwasawa_sum_z9": ({"kind": "iwasawa", "p": 3, "n": 2, "m": 1, "s": 1,
                      "A": {"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 9}}}, (0, 3)),
}


def _random_rows(L, n, rng):
    cols = [rng.integers(0, r, size=n) for r in L.radices.tolist()]
    return np.stack(cols, axis=1).astype(np.int64)


def _sample_in_window(G, L, rng, n):
    """Random group elements whose rows fit the layout window."""
    rows = _random_rows(L, n, np.random.default_rng(rng.randrange(1 << 30)))
    return L.from_rows(rows)


@pytest.mark.parametrize("name", sorted(LAYOUTS))
def test_backends_produce_identical_keys(name):
    desc, window = LAYOUTS[name]
    G = build(desc)
    L = Layout(G, window)
    rng = np.random.default_rng(1)
    X, Y = _random_rows(L, 500, rng), _random_rows(L, 7, rng)
    outs = {b: impl.product_keys(X, Y, L.program, L.places) for b, impl in kernels.backends().items()}
    ref = outs["python"]
    assert all(np.array_equal(ref, o) for o in outs.values())
    muls = {b: impl.mul_rows(X, X[::-1].copy(), L.program) for b, impl in kernels.backends().items()}
    assert all(np.array_equal(muls["python"], m) for m in muls.values())


@pytest.mark.parametrize("name", sorted(LAYOUTS))
def test_row_products_match_group_multiplication(name):
    desc, window = LAYOUTS[name]
    G = build(desc)
    L = Layout(G, window)
    rng = random.Random(2)
    xs = _sample_in_window(G, L, rng, 40)
    ys = _sample_in_window(G, L, rng, 5)
    keys = kernels.product_keys(L.to_rows(xs), L.to_rows(ys), L.program, L.places)
    expect = [L.pack(L.to_rows([G.mul(x, y)]))[0] for y in ys for x in xs]
    assert keys.tolist() == [int(k) for k in expect]


@pytest.mark.parametrize("name", sorted(LAYOUTS))
def test_rows_round_trip(name):
    desc, window = LAYOUTS[name]
    G = build(desc)
    L = Layout(G, window)
    xs = _sample_in_window(G, L, random.Random(3), 30)
    assert L.from_rows(L.to_rows(xs)) == xs
    keys = L.pack(L.to_rows(xs))
    assert L.from_rows(L.unpack(keys)) == xs


def test_compiled_backend_is_active():
    # the extension is part of the build; the fallback is exercised below
    if os.environ.get("ALGENTROPY_PURE_PYTHON") == "1":
        assert kernels.BACKEND == "python"
    else:
        assert kernels.BACKEND == "cython"


def test_pure_python_fallback_in_subprocess():
    code = (
        "import json\n"
        "from algentropy import kernels\n"
        "from algentropy.groups import build\n"
        "from algentropy.morphisms import Shift\n"
        "from algentropy.laws import coordinate_block\n"
        "from algentropy.entropy import entropy_along\n"
        "G = build({'kind': 'restricted_sum', 'component': {'kind': 'cyclic', 'n': 6}})\n"
        "e = entropy_along(Shift(G, 1), coordinate_block(G, 2))\n"
        "print(json.dumps({'backend': kernels.BACKEND, 'beta': e.beta, 'sizes': e.sizes}))\n"
    )
    env = dict(os.environ, ALGENTROPY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    doc = json.loads(out.stdout)
    assert doc["backend"] == "python" and doc["beta"] == 6
    assert doc["sizes"][:3] == [36, 216, 1296]
