"""numpy implementation of the row kernels (fallback backend)."""
from __future__ import annotations

import numpy as np

KIND_CYC, KIND_TAB, KIND_SEMI = 0, 1, 2


def mul_rows(X: np.ndarray, Y: np.ndarray, prog) -> np.ndarray:
    n = X.shape[0]
    if Y.shape[0] == 1 and n != 1:
        Y = np.broadcast_to(Y, X.shape)
    Z = np.empty((n, prog.ncols), dtype=np.int64)
    for b in range(prog.kind.shape[0]):
        kind = prog.kind[b]
        c = prog.start[b]
        if kind == KIND_CYC:
            Z[:, c] = (X[:, c] + Y[:, c]) % prog.p0[b]
        elif kind == KIND_TAB:
            s = prog.p1[b]
            off = prog.p0[b]
            Z[:, c] = prog.tables[off + X[:, c] * s + Y[:, c]]
        else:
            k = prog.width[b]
            mo = prog.p0[b]
            m = prog.p2[b]
            mods = prog.mods[mo:mo + k]
            mats = prog.mats[prog.p1[b]:prog.p1[b] + m * k * k].reshape(m, k, k)
            a1 = X[:, c:c + k]
            x1 = X[:, c + k]
            a2 = Y[:, c:c + k]
            acted = np.einsum("nij,nj->ni", mats[x1], a2)
            Z[:, c:c + k] = (a1 + acted) % mods
            Z[:, c + k] = (x1 + Y[:, c + k]) % m
    return Z


def product_keys(X: np.ndarray, Y: np.ndarray, prog, places: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    out = np.empty(n * Y.shape[0], dtype=np.int64)
    for j in range(Y.shape[0]):
        out[j * n:(j + 1) * n] = mul_rows(X, Y[j:j + 1], prog) @ places
    return out
