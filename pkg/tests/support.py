"""Shared builders and brute-force oracles for the test suite."""
from __future__ import annotations

from algentropy.core import subgroup_of
from algentropy.groups import build


def rsum(n, index_set="N"):
    return build({"kind": "restricted_sum", "component": {"kind": "cyclic", "n": n}, "index_set": index_set})


def iwasawa(p, n, m, s, A=None):
    A = A or {"kind": "cyclic", "n": p ** n}
    return build({"kind": "iwasawa", "p": p, "n": n, "m": m, "s": s, "A": A})


def iwasawa_sum_z9():
    return iwasawa(3, 2, 1, 1, {"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 9}})


def block(G, k):
    """Coordinates 0..k-1 of a restricted sum of cyclic groups."""
    return subgroup_of(G, [G.unit(i, 1) for i in range(k)])


def naive_sizes(G, phi_value, base_values, steps):
    """|T_1|, ..., |T_{steps+1}| by plain set products, no lowering and no kernels."""
    T = set(base_values)
    cur = list(base_values)
    sizes = [len(T)]
    for _ in range(steps):
        cur = list({phi_value(v) for v in cur})
        T = {G.mul(t, y) for t in T for y in cur}
        sizes.append(len(T))
    return sizes


def hamilton(a, b):
    """Quaternion product on 4-tuples (1, i, j, k coefficients)."""
    a1, b1, c1, d1 = a
    a2, b2, c2, d2 = b
    return (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)


# Q8 JSON names mapped to unit quaternions
QUAT = {"1": (1, 0, 0, 0), "i": (0, 1, 0, 0), "j": (0, 0, 1, 0), "k": (0, 0, 0, 1),
        "-1": (-1, 0, 0, 0), "-i": (0, -1, 0, 0), "-j": (0, 0, -1, 0), "-k": (0, 0, 0, -1)}
