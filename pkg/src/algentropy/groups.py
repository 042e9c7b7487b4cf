"""Concrete group constructors and the JSON descriptor grammar.

Descriptor kinds::

    {"kind": "cyclic", "n": 6}
    {"kind": "q8"}
    {"kind": "product", "factors": [...]}
    {"kind": "restricted_sum", "component": {...}, "index_set": "N" | "Z"}
    {"kind": "semidirect", "A": {...}, "m": 3,
     "action": {"kind": "power", "exponent": 4} | {"kind": "table", "images": [[2]]}}
    {"kind": "quotient", "base": {...}, "exponent": 3}
    {"kind": "hamiltonian", "B": {...}, "D": {...}}
    {"kind": "iwasawa", "p": 3, "n": 2, "m": 1, "s": 1, "A": {...}}

``quotient`` kills, in every cyclic coordinate Z(k) of the base (of the A-part
for a semidirect base), the subgroup of order gcd(k, exponent).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import AmbientGroup, DecodeError, StructuralError
from .lowering import CycBlock, SemiBlock, TabBlock

_INDEX_OFFSET = 1 << 31


class DescriptorError(ValueError):
    """Invalid group parameters; ``path`` points at the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path or "/"
        self.message = message


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _width(n: int) -> int:
    return max(1, ((n - 1).bit_length() + 7) // 8)


# ---------------------------------------------------------------------------
# cyclic and Q8
# ---------------------------------------------------------------------------

class CyclicGroup(AmbientGroup):
    """Z(n), written additively on residues 0..n-1."""

    def __init__(self, n: int):
        if not isinstance(n, int) or n < 1:
            raise DescriptorError("cyclic order must be a positive integer", "/n")
        self.n = n
        self._w = _width(n)

    identity = 0

    def mul(self, a, b):
        return (a + b) % self.n

    def inv(self, a):
        return (-a) % self.n

    def power(self, a, k):
        return (a * k) % self.n

    def element_order(self, a, cap=None):
        return self.n // math.gcd(a, self.n)

    def _encode_into(self, a, out):
        out += a.to_bytes(self._w, "big")

    def _decode_from(self, buf, pos):
        end = pos + self._w
        if end > len(buf):
            raise IndexError("truncated residue")
        a = int.from_bytes(buf[pos:end], "big")
        if a >= self.n:
            raise ValueError(f"residue {a} out of range for Z({self.n})")
        return a, end

    is_abelian = True

    def descriptor(self):
        return {"kind": "cyclic", "n": self.n}

    def size(self):
        return self.n

    def elements(self):
        return iter(range(self.n))

    def exponent(self):
        return self.n

    def sample(self, rng):
        return rng.randrange(self.n)

    def normality_generators(self, window):
        return [1 % self.n]

    def element_to_json(self, a):
        return a

    def element_from_json(self, obj):
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise DecodeError(f"Z({self.n}) element must be an integer")
        return obj % self.n

    # abelian coordinates
    def moduli(self) -> list[int]:
        return [self.n]

    def coords(self, a) -> tuple:
        return (a,)

    def from_coords(self, cs) -> Any:
        return cs[0] % self.n

    def lowerable(self):
        return True

    def _blocks(self, window, prefix):
        return [(CycBlock(self.n), [prefix])]

    def _row(self, a, window, out):
        out.append(a)

    def _unrow(self, row, pos, window):
        return row[pos], pos + 1


_Q8_NAMES = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]
# unit products among 1, i, j, k as (sign, unit)
_UNIT = {
    (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
    (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
    (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
    (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
}


def _q8_table() -> np.ndarray:
    t = np.zeros((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            s, u = _UNIT[(a % 4, b % 4)]
            t[a, b] = 4 * ((a // 4 + b // 4 + s) % 2) + u
    return t


class Q8Group(AmbientGroup):
    """Quaternion group; element 4*s + u is (-1)^s times the unit 1, i, j, k."""

    TABLE = _q8_table()
    _MUL = TABLE.tolist()
    _INV = [row.index(0) for row in _MUL]

    identity = 0

    def mul(self, a, b):
        return self._MUL[a][b]

    def inv(self, a):
        return self._INV[a]

    def _encode_into(self, a, out):
        out.append(a)

    def _decode_from(self, buf, pos):
        a = buf[pos]
        if a > 7:
            raise ValueError("Q8 code out of range")
        return a, pos + 1

    is_abelian = False

    def descriptor(self):
        return {"kind": "q8"}

    def size(self):
        return 8

    def elements(self):
        return iter(range(8))

    def exponent(self):
        return 4

    def sample(self, rng):
        return rng.randrange(8)

    def normality_generators(self, window):
        return [1, 2]

    def element_to_json(self, a):
        return _Q8_NAMES[a]

    def element_from_json(self, obj):
        if obj not in _Q8_NAMES:
            raise DecodeError(f"Q8 element must be one of {_Q8_NAMES}")
        return _Q8_NAMES.index(obj)

    def lowerable(self):
        return True

    def _blocks(self, window, prefix):
        return [(TabBlock(self.TABLE), [prefix])]

    def _row(self, a, window, out):
        out.append(a)

    def _unrow(self, row, pos, window):
        return row[pos], pos + 1


# ---------------------------------------------------------------------------
# products and restricted sums
# ---------------------------------------------------------------------------

class DirectProduct(AmbientGroup):
    def __init__(self, factors: list[AmbientGroup], tag: dict | None = None):
        if not factors:
            raise DescriptorError("product needs at least one factor", "/factors")
        self.factors = list(factors)
        self.is_finite = all(f.is_finite for f in self.factors)
        self.tag = tag

    @property
    def identity(self):
        return tuple(f.identity for f in self.factors)

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(f.inv(x) for f, x in zip(self.factors, a))

    def power(self, a, k):
        return tuple(f.power(x, k) for f, x in zip(self.factors, a))

    def element_order(self, a, cap=None):
        o = 1
        for f, x in zip(self.factors, a):
            o = math.lcm(o, f.element_order(x))
        return o

    def _encode_into(self, a, out):
        for f, x in zip(self.factors, a):
            f._encode_into(x, out)

    def _decode_from(self, buf, pos):
        vals = []
        for f in self.factors:
            v, pos = f._decode_from(buf, pos)
            vals.append(v)
        return tuple(vals), pos

    @property
    def is_abelian(self):
        return all(f.is_abelian for f in self.factors)

    def descriptor(self):
        if self.tag is not None:
            return dict(self.tag)
        return {"kind": "product", "factors": [f.descriptor() for f in self.factors]}

    def size(self):
        if not self.is_finite:
            return None
        return math.prod(f.size() for f in self.factors)

    def elements(self):
        if not self.is_finite:
            return super().elements()
        return itertools.product(*[list(f.elements()) for f in self.factors])

    def exponent(self):
        return math.lcm(*[f.exponent() for f in self.factors])

    def sample(self, rng):
        return tuple(f.sample(rng) for f in self.factors)

    def support(self, a):
        out = frozenset()
        for f, x in zip(self.factors, a):
            out |= f.support(x)
        return out

    def normality_generators(self, window):
        gens = []
        for i, f in enumerate(self.factors):
            for g in f.normality_generators(window):
                v = list(self.identity)
                v[i] = g
                gens.append(tuple(v))
        return gens

    def element_to_json(self, a):
        return [f.element_to_json(x) for f, x in zip(self.factors, a)]

    def element_from_json(self, obj):
        if not isinstance(obj, list) or len(obj) != len(self.factors):
            raise DecodeError(f"product element must be a list of {len(self.factors)} components")
        return tuple(f.element_from_json(x) for f, x in zip(self.factors, obj))

    def moduli(self):
        return [n for f in self.factors for n in f.moduli()]

    def coords(self, a):
        return tuple(c for f, x in zip(self.factors, a) for c in f.coords(x))

    def from_coords(self, cs):
        out, pos = [], 0
        for f in self.factors:
            k = len(f.moduli())
            out.append(f.from_coords(cs[pos:pos + k]))
            pos += k
        return tuple(out)

    def lowerable(self):
        return all(f.lowerable() for f in self.factors)

    def _blocks(self, window, prefix):
        out = []
        for i, f in enumerate(self.factors):
            out.extend(f._blocks(window, prefix + (i,)))
        return out

    def _row(self, a, window, out):
        for f, x in zip(self.factors, a):
            f._row(x, window, out)

    def _unrow(self, row, pos, window):
        vals = []
        for f in self.factors:
            v, pos = f._unrow(row, pos, window)
            vals.append(v)
        return tuple(vals), pos


class RestrictedSum(AmbientGroup):
    """Finitely supported families indexed by N or Z.

    Values are sorted tuples of ``(index, component value)`` pairs with the
    identity components omitted.
    """

    is_finite = False

    def __init__(self, component: AmbientGroup, index_set: str = "N"):
        if index_set not in ("N", "Z"):
            raise DescriptorError("index_set must be 'N' or 'Z'", "/index_set")
        if not component.is_finite:
            raise DescriptorError("restricted sums need a finite component", "/component")
        self.component = component
        self.index_set = index_set
        self._e = component.identity

    identity = ()

    def _check_index(self, i):
        if self.index_set == "N" and i < 0:
            raise ValueError(f"negative index {i} in a sum over N")

    def unit(self, i: int, c) -> tuple:
        self._check_index(i)
        return () if c == self._e else ((i, c),)

    def get(self, a, i):
        for j, c in a:
            if j == i:
                return c
        return self._e

    def mul(self, a, b):
        if not a:
            return b
        if not b:
            return a
        C = self.component
        d = dict(a)
        for i, c in b:
            x = d.get(i)
            d[i] = c if x is None else C.mul(x, c)
        e = self._e
        return tuple(sorted((i, c) for i, c in d.items() if c != e))

    def inv(self, a):
        C = self.component
        return tuple((i, C.inv(c)) for i, c in a)

    def power(self, a, k):
        C, e = self.component, self._e
        return tuple((i, y) for i, c in a if (y := C.power(c, k)) != e)

    def element_order(self, a, cap=None):
        o = 1
        for _, c in a:
            o = math.lcm(o, self.component.element_order(c))
        return o

    def _encode_into(self, a, out):
        out += len(a).to_bytes(4, "big")
        for i, c in a:
            out += (i + _INDEX_OFFSET).to_bytes(4, "big")
            self.component._encode_into(c, out)

    def _decode_from(self, buf, pos):
        if pos + 4 > len(buf):
            raise IndexError("truncated length prefix")
        count = int.from_bytes(buf[pos:pos + 4], "big")
        pos += 4
        vals = []
        last = None
        for _ in range(count):
            if pos + 4 > len(buf):
                raise IndexError("truncated index")
            i = int.from_bytes(buf[pos:pos + 4], "big") - _INDEX_OFFSET
            pos += 4
            self._check_index(i)
            if last is not None and i <= last:
                raise ValueError("indices not strictly increasing")
            c, pos = self.component._decode_from(buf, pos)
            if c == self._e:
                raise ValueError("identity component listed")
            vals.append((i, c))
            last = i
        return tuple(vals), pos

    @property
    def is_abelian(self):
        return self.component.is_abelian

    def descriptor(self):
        return {"kind": "restricted_sum", "component": self.component.descriptor(),
                "index_set": self.index_set}

    def exponent(self):
        return self.component.exponent()

    def sample(self, rng, width: int = 6):
        lo = 0 if self.index_set == "N" else -width // 2
        idx = sorted(rng.sample(range(lo, lo + width), rng.randrange(0, 4)))
        return tuple((i, c) for i in idx if (c := self.component.sample(rng)) != self._e)

    def support(self, a):
        out = frozenset(i for i, _ in a)
        for _, c in a:
            out |= self.component.support(c)
        return out

    def normality_generators(self, window):
        idx = set(window)
        idx.add(max(window, default=-1) + 1)
        gens = []
        for i in sorted(idx):
            if self.index_set == "N" and i < 0:
                continue
            for g in self.component.normality_generators(window):
                gens.append(self.unit(i, g))
        return gens

    def element_to_json(self, a):
        return {str(i): self.component.element_to_json(c) for i, c in a}

    def element_from_json(self, obj):
        if not isinstance(obj, dict):
            raise DecodeError("restricted-sum element must be an object {index: component}")
        d = {}
        for k, v in obj.items():
            try:
                i = int(k)
            except ValueError:
                raise DecodeError(f"bad index {k!r}") from None
            if self.index_set == "N" and i < 0:
                raise DecodeError(f"negative index {i} in a sum over N")
            c = self.component.element_from_json(v)
            if c != self._e:
                d[i] = c
        return tuple(sorted(d.items()))

    def lowerable(self):
        return self.component.lowerable()

    def _indices(self, window):
        lo, hi = window
        if self.index_set == "N":
            lo = max(lo, 0)
            hi = max(hi, 0)
        return range(lo, hi + 1)

    def _blocks(self, window, prefix):
        out = []
        for i in self._indices(window):
            out.extend(self.component._blocks(window, prefix + ("@", i)))
        return out

    def _row(self, a, window, out):
        d = dict(a)
        rng = self._indices(window)
        for i in d:
            if i not in rng:
                raise ValueError(f"index {i} outside lowering window {window}")
        for i in rng:
            self.component._row(d.get(i, self._e), window, out)

    def _unrow(self, row, pos, window):
        vals = []
        for i in self._indices(window):
            c, pos = self.component._unrow(row, pos, window)
            if c != self._e:
                vals.append((i, c))
        return tuple(vals), pos


# ---------------------------------------------------------------------------
# semidirect products
# ---------------------------------------------------------------------------

def _abelian_exponent(A: AmbientGroup) -> int:
    return A.exponent()


class PowerAction:
    """Generator of Z(m) acts by a -> a^u on the abelian A."""

    def __init__(self, u: int):
        self.u = u

    def bind(self, A: AmbientGroup, m: int) -> None:
        if not A.is_abelian:
            raise DescriptorError("power action needs an abelian A", "/A")
        e = _abelian_exponent(A)
        if math.gcd(self.u, e) != 1:
            raise DescriptorError(f"exponent {self.u} is not a unit modulo exp(A) = {e}", "/action/exponent")
        if pow(self.u, m, e) != 1 % e:
            raise DescriptorError(f"action of the generator has order not dividing m = {m}", "/action/exponent")
        self.A, self.m, self.e = A, m, e
        self._factors = [pow(self.u, x, e) for x in range(m)]

    def act(self, a, x):
        f = self._factors[x]
        return a if f == 1 % self.e else self.A.power(a, f)

    @property
    def trivial(self) -> bool:
        return self._factors[1 % self.m] == 1 % self.e

    def matrices(self, mods: list[int]) -> np.ndarray:
        k = len(mods)
        mats = np.zeros((self.m, k, k), dtype=np.int64)
        for x, f in enumerate(self._factors):
            for i, n in enumerate(mods):
                mats[x, i, i] = f % n
        return mats

    def reduced(self) -> "PowerAction":
        return PowerAction(self.u)

    def descriptor(self):
        return {"kind": "power", "exponent": self.u}


class TableAction:
    """Explicit automorphism of a finite abelian A = ⊕ Z(n_i): ``images[j]`` is
    the coordinate vector of the image of the j-th unit vector."""

    def __init__(self, images: list[list[int]]):
        self.images = [list(v) for v in images]

    def bind(self, A: AmbientGroup, m: int) -> None:
        if not (A.is_finite and A.is_abelian and hasattr(A, "moduli")):
            raise DescriptorError("table action needs a finite abelian A built from cyclic groups", "/A")
        mods = A.moduli()
        k = len(mods)
        if len(self.images) != k or any(len(v) != k for v in self.images):
            raise DescriptorError(f"table action needs {k} images of length {k}", "/action/images")
        M = np.array(self.images, dtype=np.int64).T % np.array(mods)[:, None]
        for j, nj in enumerate(mods):
            for i, ni in enumerate(mods):
                if (nj * M[i, j]) % ni:
                    raise DescriptorError("images do not define a homomorphism", "/action/images")
        self.A, self.m, self.mods = A, m, mods
        mats = [np.eye(k, dtype=np.int64)]
        for _ in range(1, m):
            mats.append((M @ mats[-1]) % np.array(mods)[:, None])
        self._mats = np.array(mats, dtype=np.int64).reshape(m, k, k)
        if not np.array_equal((M @ mats[-1]) % np.array(mods)[:, None], np.eye(k, dtype=np.int64) % np.array(mods)[:, None]):
            raise DescriptorError("action of the generator has order not dividing m", "/action/images")
        images = {self.act(a, 1) for a in A.elements()}
        if len(images) != A.size():
            raise DescriptorError("images do not define an automorphism", "/action/images")

    def act(self, a, x):
        if x == 0:
            return a
        v = np.array(self.A.coords(a), dtype=np.int64)
        w = (self._mats[x] @ v) % np.array(self.mods)
        return self.A.from_coords(tuple(int(t) for t in w))

    @property
    def trivial(self) -> bool:
        return self.m == 1 or np.array_equal(self._mats[1], np.eye(len(self.mods), dtype=np.int64) % np.array(self.mods)[:, None])

    def matrices(self, mods: list[int]) -> np.ndarray:
        return self._mats.copy()

    def reduced(self) -> "TableAction":
        return TableAction(self.images)

    def descriptor(self):
        return {"kind": "table", "images": self.images}


class SemidirectProduct(AmbientGroup):
    """A ⋊ Z(m) with (a1, x1)(a2, x2) = (a1 · α^x1(a2), x1 + x2)."""

    def __init__(self, A: AmbientGroup, m: int, action, tag: dict | None = None):
        if not isinstance(m, int) or m < 1:
            raise DescriptorError("m must be a positive integer", "/m")
        action.bind(A, m)
        self.A, self.m, self.action = A, m, action
        self.C = CyclicGroup(m)
        self.is_finite = A.is_finite
        self.tag = tag
        self.iwasawa: tuple[int, int, int, int] | None = None

    @property
    def identity(self):
        return (self.A.identity, 0)

    def mul(self, a, b):
        a1, x1 = a
        a2, x2 = b
        return (self.A.mul(a1, self.action.act(a2, x1)), (x1 + x2) % self.m)

    def inv(self, a):
        a1, x1 = a
        y = (-x1) % self.m
        return (self.action.act(self.A.inv(a1), y), y)

    def _encode_into(self, a, out):
        self.A._encode_into(a[0], out)
        self.C._encode_into(a[1], out)

    def _decode_from(self, buf, pos):
        a, pos = self.A._decode_from(buf, pos)
        x, pos = self.C._decode_from(buf, pos)
        return (a, x), pos

    @property
    def is_abelian(self):
        return self.A.is_abelian and self.action.trivial

    def descriptor(self):
        if self.tag is not None:
            return dict(self.tag)
        return {"kind": "semidirect", "A": self.A.descriptor(), "m": self.m,
                "action": self.action.descriptor()}

    def size(self):
        return self.A.size() * self.m if self.is_finite else None

    def elements(self):
        if not self.is_finite:
            return super().elements()
        return ((a, x) for a in list(self.A.elements()) for x in range(self.m))

    def exponent(self):
        if self.is_finite:
            return super().exponent()
        if isinstance(self.A, RestrictedSum):
            # coordinates evolve independently under a power action
            return SemidirectProduct(self.A.component, self.m, self.action.reduced()).exponent()
        raise NotImplementedError

    def sample(self, rng):
        return (self.A.sample(rng), rng.randrange(self.m))

    def support(self, a):
        return self.A.support(a[0])

    def normality_generators(self, window):
        return [(g, 0) for g in self.A.normality_generators(window)] + [(self.A.identity, 1 % self.m)]

    def element_to_json(self, a):
        return {"a": self.A.element_to_json(a[0]), "t": a[1]}

    def element_from_json(self, obj):
        if not isinstance(obj, dict) or set(obj) - {"a", "t"}:
            raise DecodeError('semidirect element must be {"a": ..., "t": int}')
        a = self.A.element_from_json(obj.get("a", self.A.element_to_json(self.A.identity)))
        t = obj.get("t", 0)
        if not isinstance(t, int):
            raise DecodeError("t must be an integer")
        return (a, t % self.m)

    # A-part helpers
    def a_part(self, a) -> tuple:
        return (a, 0)

    @property
    def t(self):
        return (self.A.identity, 1 % self.m)

    def lowerable(self):
        return self.A.lowerable()

    def _blocks(self, window, prefix):
        inner = self.A._blocks(window, prefix + ("A",))
        if not all(isinstance(b, CycBlock) for b, _ in inner):
            raise StructuralError("semidirect A-part must lower to cyclic columns")
        mods = [b.n for b, _ in inner]
        labels = [lab for _, labs in inner for lab in labs] + [prefix + ("t",)]
        block = SemiBlock(tuple(mods), self.m, self.action.matrices(mods))
        return [(block, labels)]

    def _row(self, a, window, out):
        self.A._row(a[0], window, out)
        out.append(a[1])

    def _unrow(self, row, pos, window):
        a, pos = self.A._unrow(row, pos, window)
        return (a, row[pos]), pos + 1


# ---------------------------------------------------------------------------
# structural quotients
# ---------------------------------------------------------------------------

class StructuralQuotientGroup(AmbientGroup):
    """Quotient of ``base`` by the componentwise subgroup of the given exponent.

    Arithmetic is that of the reduced group (each cyclic coordinate Z(k)
    becomes Z(k / gcd(k, exponent))); ``project`` maps base values onto it.
    """

    def __init__(self, base: AmbientGroup, exponent: int):
        if not isinstance(exponent, int) or exponent < 1:
            raise DescriptorError("exponent must be a positive integer", "/exponent")
        self.base = base
        self.divisor = exponent
        self.reduced, self._proj = _reduce(base, exponent)
        self.is_finite = self.reduced.is_finite

    def project(self, g):
        return self._proj(g)

    @property
    def identity(self):
        return self.reduced.identity

    def mul(self, a, b):
        return self.reduced.mul(a, b)

    def inv(self, a):
        return self.reduced.inv(a)

    def power(self, a, k):
        return self.reduced.power(a, k)

    def element_order(self, a, cap=None):
        return self.reduced.element_order(a)

    def _encode_into(self, a, out):
        self.reduced._encode_into(a, out)

    def _decode_from(self, buf, pos):
        return self.reduced._decode_from(buf, pos)

    @property
    def is_abelian(self):
        return self.reduced.is_abelian

    def descriptor(self):
        return {"kind": "quotient", "base": self.base.descriptor(), "exponent": self.divisor}

    def size(self):
        return self.reduced.size()

    def elements(self):
        return self.reduced.elements()

    def exponent(self):
        return self.reduced.exponent()

    def sample(self, rng):
        return self.reduced.sample(rng)

    def support(self, a):
        return self.reduced.support(a)

    def normality_generators(self, window):
        return self.reduced.normality_generators(window)

    def element_to_json(self, a):
        return self.reduced.element_to_json(a)

    def element_from_json(self, obj):
        return self.reduced.element_from_json(obj)

    def lowerable(self):
        return self.reduced.lowerable()

    def _blocks(self, window, prefix):
        return self.reduced._blocks(window, prefix)

    def _row(self, a, window, out):
        self.reduced._row(a, window, out)

    def _unrow(self, row, pos, window):
        return self.reduced._unrow(row, pos, window)

    def __getattr__(self, name):
        # abelian-coordinate helpers of the reduced group
        if name in ("moduli", "coords", "from_coords", "component", "index_set", "unit", "factors"):
            return getattr(self.reduced, name)
        raise AttributeError(name)


def _reduce(G: AmbientGroup, d: int):
    if isinstance(G, StructuralQuotientGroup):
        inner, p_inner = _reduce(G.reduced, d)
        return inner, lambda g: p_inner(G.project(g))
    if isinstance(G, CyclicGroup):
        k = G.n // math.gcd(G.n, d)
        return CyclicGroup(k), lambda a: a % k
    if isinstance(G, DirectProduct):
        parts = [_reduce(f, d) for f in G.factors]
        return (DirectProduct([p[0] for p in parts]),
                lambda a: tuple(p[1](x) for p, x in zip(parts, a)))
    if isinstance(G, RestrictedSum):
        comp, pc = _reduce(G.component, d)
        R = RestrictedSum(comp, G.index_set)
        e = comp.identity
        return R, lambda a: tuple((i, y) for i, c in a if (y := pc(c)) != e)
    if isinstance(G, SemidirectProduct):
        A2, pa = _reduce(G.A, d)
        action = G.action.reduced()
        if isinstance(action, TableAction):
            action = TableAction([[c % n for c, n in zip(v, A2.moduli())] for v in G.action.images])
        try:
            S = SemidirectProduct(A2, G.m, action)
        except DescriptorError as exc:
            raise DescriptorError(f"divisor not componentwise: {exc.message}", "/exponent") from None
        if isinstance(action, TableAction):
            # the killed subgroup must be invariant under the action
            for a in G.A.elements():
                if pa(G.action.act(a, 1)) != S.action.act(pa(a), 1):
                    raise DescriptorError("divisor not componentwise: kernel not invariant", "/exponent")
        return S, lambda g: (pa(g[0]), g[1])
    raise DescriptorError(f"divisor not componentwise for {G.descriptor()['kind']}", "/exponent")


def structural_quotient(G: AmbientGroup, exponent: int) -> StructuralQuotientGroup:
    return StructuralQuotientGroup(G, exponent)


# ---------------------------------------------------------------------------
# Hamiltonian and Iwasawa builders
# ---------------------------------------------------------------------------

def _check_orders(G: AmbientGroup, pred, what: str, path: str, samples: int = 200) -> None:
    """Structural exponent check, cross-checked on sampled element orders."""
    import random

    e = G.exponent()
    if not pred(e):
        raise DescriptorError(f"{what} (exponent {e})", path)
    rng = random.Random(0)
    elems = list(G.elements()) if G.is_finite else [G.sample(rng) for _ in range(samples)]
    for x in elems:
        if not pred(G.element_order(x)):
            raise DescriptorError(f"{what} (element of order {G.element_order(x)})", path)


def build_hamiltonian(B: AmbientGroup, D: AmbientGroup) -> DirectProduct:
    """Q8 × B × D with B of exponent ≤ 2 and D abelian of odd order elements."""
    if not B.is_abelian:
        raise DescriptorError("B must be abelian", "/B")
    if not D.is_abelian:
        raise DescriptorError("D must be abelian", "/D")
    _check_orders(B, lambda e: e in (1, 2), "B must have exponent <= 2", "/B")
    _check_orders(D, lambda e: e % 2 == 1, "D must have only elements of odd order", "/D")
    tag = {"kind": "hamiltonian", "B": B.descriptor(), "D": D.descriptor()}
    return DirectProduct([Q8Group(), B, D], tag=tag)


@dataclass(frozen=True)
class IwasawaParams:
    p: int
    n: int
    m: int
    s: int


def check_iwasawa_params(p: int, n: int, m: int, s: int) -> list[tuple[str, str]]:
    """Violated constraints as (path, message) pairs."""
    bad = []
    for name, v in (("p", p), ("n", n), ("m", m), ("s", s)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            bad.append((f"/{name}", f"{name} must be a positive integer"))
    if bad:
        return bad
    if not is_prime(p):
        bad.append(("/p", f"p = {p} is not prime"))
    if p == 2 and s < 2:
        bad.append(("/s", "if p = 2 then s >= 2 (Iwasawa constraint) violated"))
    if not s < n:
        bad.append(("/s", f"s < n violated (s = {s}, n = {n})"))
    if not n <= s + m:
        bad.append(("/n", f"n <= s + m violated (n = {n}, s + m = {s + m})"))
    return bad


def build_iwasawa(p: int, n: int, m: int, s: int, A: AmbientGroup) -> SemidirectProduct:
    """A ⋊ Z(p^m) with the generator t acting by a -> a^(1 + p^s)."""
    bad = check_iwasawa_params(p, n, m, s)
    if bad:
        path, msg = bad[0]
        raise DescriptorError("; ".join(m for _, m in bad), path)
    if not A.is_abelian:
        raise DescriptorError("A must be abelian", "/A")
    if A.exponent() != p ** n:
        raise DescriptorError(f"A must have exponent p^n = {p ** n}, got {A.exponent()}", "/A")
    u = 1 + p ** s
    if pow(u, p ** m, p ** n) != 1:
        raise DescriptorError("action (1 + p^s)^(p^m) != 1 mod p^n", "/m")
    tag = {"kind": "iwasawa", "p": p, "n": n, "m": m, "s": s, "A": A.descriptor()}
    G = SemidirectProduct(A, p ** m, PowerAction(u), tag=tag)
    G.iwasawa = (p, n, m, s)
    return G


# ---------------------------------------------------------------------------
# descriptor parsing
# ---------------------------------------------------------------------------

def _need(d: dict, key: str, path: str):
    if key not in d:
        raise DescriptorError("missing required field", f"{path}/{key}")
    return d[key]


def _need_int(d: dict, key: str, path: str) -> int:
    v = _need(d, key, path)
    if not isinstance(v, int) or isinstance(v, bool):
        raise DescriptorError(f"'{key}' must be an integer", f"{path}/{key}")
    return v


def build(desc: dict, path: str = "") -> AmbientGroup:
    """Build the ambient group described by a JSON descriptor."""
    if not isinstance(desc, dict):
        raise DescriptorError("group descriptor must be an object", path)
    kind = _need(desc, "kind", path)
    try:
        if kind == "cyclic":
            return CyclicGroup(_need_int(desc, "n", path))
        if kind == "q8":
            return Q8Group()
        if kind == "product":
            factors = _need(desc, "factors", path)
            if not isinstance(factors, list):
                raise DescriptorError("'factors' must be a list", f"{path}/factors")
            return DirectProduct([build(f, f"{path}/factors/{i}") for i, f in enumerate(factors)])
        if kind == "restricted_sum":
            comp = build(_need(desc, "component", path), f"{path}/component")
            return RestrictedSum(comp, desc.get("index_set", "N"))
        if kind == "semidirect":
            A = build(_need(desc, "A", path), f"{path}/A")
            m = _need_int(desc, "m", path)
            return SemidirectProduct(A, m, parse_action(_need(desc, "action", path), f"{path}/action"))
        if kind == "quotient":
            base = build(_need(desc, "base", path), f"{path}/base")
            return structural_quotient(base, _need_int(desc, "exponent", path))
        if kind == "hamiltonian":
            B = build(desc.get("B", {"kind": "cyclic", "n": 1}), f"{path}/B")
            D = build(desc.get("D", {"kind": "cyclic", "n": 1}), f"{path}/D")
            return build_hamiltonian(B, D)
        if kind == "iwasawa":
            A = build(_need(desc, "A", path), f"{path}/A")
            return build_iwasawa(*(_need_int(desc, k, path) for k in ("p", "n", "m", "s")), A)
    except DescriptorError as exc:
        if path and not exc.path.startswith(path):
            raise DescriptorError(exc.message, path + exc.path) from None
        raise
    raise DescriptorError(f"unknown group kind {kind!r}", f"{path}/kind")


def parse_action(desc: dict, path: str = ""):
    if not isinstance(desc, dict):
        raise DescriptorError("action must be an object", path)
    kind = desc.get("kind")
    if kind == "power":
        return PowerAction(_need_int(desc, "exponent", path))
    if kind == "table":
        images = _need(desc, "images", path)
        if not isinstance(images, list) or not all(isinstance(v, list) for v in images):
            raise DescriptorError("'images' must be a list of integer lists", f"{path}/images")
        return TableAction(images)
    raise DescriptorError(f"unknown action kind {kind!r}", f"{path}/kind")


def symmetric3() -> SemidirectProduct:
    """Z(3) ⋊ Z(2) with inversion: the smallest non-quasihamiltonian group."""
    return SemidirectProduct(CyclicGroup(3), 2, TableAction([[2]]))
