"""Lowering of group elements to flat int64 rows for the set-product kernels.

A layout is a sequence of blocks over a coordinate window of the restricted
sums in the group tree.  Every block's identity is the all-zero sub-row, so
rows can be widened to a larger window by scattering columns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

KIND_CYC, KIND_TAB, KIND_SEMI = 0, 1, 2
_KEY_LIMIT = 1 << 62


@dataclass(frozen=True)
class CycBlock:
    n: int

    @property
    def width(self) -> int:
        return 1

    def radices(self) -> list[int]:
        return [self.n]


@dataclass(frozen=True, eq=False)
class TabBlock:
    """Finite group given by a Cayley table whose index 0 is the identity."""

    table: np.ndarray

    @property
    def width(self) -> int:
        return 1

    def radices(self) -> list[int]:
        return [self.table.shape[0]]


@dataclass(frozen=True, eq=False)
class SemiBlock:
    """A ⋊ Z(m) with A = ⊕ Z(mods[i]); ``mats[x]`` is the action of t^x."""

    mods: tuple[int, ...]
    m: int
    mats: np.ndarray

    @property
    def width(self) -> int:
        return len(self.mods) + 1

    def radices(self) -> list[int]:
        return list(self.mods) + [self.m]


class NotPackable(ValueError):
    pass


class Layout:
    """Row layout of ``group`` over the index window ``window = (lo, hi)``."""

    def __init__(self, group, window: tuple[int, int]):
        self.group = group
        self.window = window
        pairs = group._blocks(window, ())
        self.blocks = [b for b, _ in pairs]
        self.labels: list[tuple] = [lab for _, labs in pairs for lab in labs]
        self.ncols = len(self.labels)
        self.radices = np.array([r for b in self.blocks for r in b.radices()], dtype=np.int64)
        total = 1
        for r in self.radices.tolist():
            total *= int(r)
        self.key_space = total
        self.packable = total < _KEY_LIMIT
        # little-endian mixed radix place values
        places = np.ones(self.ncols, dtype=np.int64)
        if self.packable:
            acc = 1
            for i, r in enumerate(self.radices.tolist()):
                places[i] = acc
                acc *= int(r)
        self.places = places
        self.program = self._program()

    def _program(self) -> kernels.Program:
        kind, start, width, p0, p1, p2 = [], [], [], [], [], []
        mods: list[int] = []
        tables: list[np.ndarray] = []
        mats: list[np.ndarray] = []
        tab_off = mat_off = 0
        col = 0
        for b in self.blocks:
            start.append(col)
            if isinstance(b, CycBlock):
                kind.append(KIND_CYC); width.append(1); p0.append(b.n); p1.append(0); p2.append(0)
            elif isinstance(b, TabBlock):
                s = b.table.shape[0]
                kind.append(KIND_TAB); width.append(1); p0.append(tab_off); p1.append(s); p2.append(0)
                tables.append(b.table.reshape(-1))
                tab_off += s * s
            else:
                k = len(b.mods)
                kind.append(KIND_SEMI); width.append(k); p0.append(len(mods)); p1.append(mat_off); p2.append(b.m)
                mods.extend(b.mods)
                mods.append(b.m)
                mats.append(b.mats.reshape(-1))
                mat_off += b.m * k * k
            col += b.width
        arr = lambda xs: np.asarray(xs, dtype=np.int64) if len(xs) else np.zeros(0, dtype=np.int64)
        cat = lambda xs: np.concatenate(xs).astype(np.int64) if xs else np.zeros(1, dtype=np.int64)
        return kernels.Program(arr(kind), arr(start), arr(width), arr(p0), arr(p1), arr(p2),
                               np.asarray(mods + [0], dtype=np.int64), cat(tables), cat(mats), self.ncols)

    # ---- conversions ---------------------------------------------------------
    def to_rows(self, values) -> np.ndarray:
        values = list(values)
        rows = np.zeros((len(values), self.ncols), dtype=np.int64)
        for i, v in enumerate(values):
            out: list[int] = []
            self.group._row(v, self.window, out)
            rows[i, :] = out
        return rows

    def from_rows(self, rows: np.ndarray) -> list:
        out = []
        for r in rows.tolist():
            v, pos = self.group._unrow(r, 0, self.window)
            out.append(v)
        return out

    def pack(self, rows: np.ndarray) -> np.ndarray:
        if not self.packable:
            raise NotPackable(f"key space {self.key_space} too large")
        return rows @ self.places if rows.size else np.zeros(rows.shape[0], dtype=np.int64)

    def unpack(self, keys: np.ndarray) -> np.ndarray:
        rows = np.empty((keys.shape[0], self.ncols), dtype=np.int64)
        rem = keys.copy()
        for i, r in enumerate(self.radices.tolist()):
            rows[:, i] = rem % r
            rem //= r
        return rows

    def covers(self, window: tuple[int, int]) -> bool:
        return self.window[0] <= window[0] and window[1] <= self.window[1]

    def widen_rows(self, rows: np.ndarray, wider: "Layout") -> np.ndarray:
        index = {lab: i for i, lab in enumerate(wider.labels)}
        cols = [index[lab] for lab in self.labels]
        out = np.zeros((rows.shape[0], wider.ncols), dtype=np.int64)
        out[:, cols] = rows
        return out

    # ---- kernel entry points ----------------------------------------------
    def mul(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return kernels.mul_rows(X, Y, self.program)

    def product_keys(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Packed keys of all products x*y (unsorted, with repeats)."""
        if not self.packable:
            raise NotPackable(f"key space {self.key_space} too large")
        return kernels.product_keys(X, Y, self.program, self.places)


def window_of(group, values, base: tuple[int, int] | None = None) -> tuple[int, int]:
    idx: set[int] = set()
    for v in values:
        idx |= group.support(v)
    if base is not None:
        idx |= {base[0], base[1]}
    if not idx:
        return (0, 0)
    return (min(idx), max(idx))
