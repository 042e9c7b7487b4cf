"""Entropy of an endomorphism along finite subgroups, in exact integers.

Two independent algorithms:

* trajectories ``T_n = F·φ(F)···φ^{n-1}(F)`` with the ratios
  ``β_n = t_{n+1}/t_n`` (weakly decreasing positive integers whenever every
  ``T_n`` is a subgroup), and
* the limit-free chain ``D_n = {u ∈ U : φ(u) ∈ U^{(n)}}`` with
  ``U^{(n+1)} = U·φ^{-1}U^{(n)}``, giving ``β = [U : D_n]`` once it settles.

Entropy is always reported as the integer β; the value is ``log β``.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .core import (DEFAULT_BUDGET, AmbientGroup, BudgetExceeded, FiniteSubgroup, ProductSet,
                   StructuralError, generalized_index, is_subgroup, product_set)
from .lowering import Layout, NotPackable, window_of
from .morphisms import Endomorphism, image_subgroup

CERTIFIED_ZERO = "certified_zero"
STABILIZED = "stabilized_window"
EXHAUSTED = "budget_exhausted"
NON_SUBGROUP = "non_subgroup_mode"
SETTLED = (CERTIFIED_ZERO, STABILIZED)

_PRODUCT_CHUNK = 1 << 22


@dataclass(frozen=True)
class EntropyConfig:
    n_max: int = 32
    window: int = 3
    size_budget: int = DEFAULT_BUDGET
    level_max: int = 32
    debug: bool = True
    backend: str = "auto"  # auto | rows | values


@dataclass
class EntropyEstimate:
    beta: int
    status: str
    reached_at: int
    window: int
    sizes: list[int] = field(default_factory=list)
    method: str = "trajectory"

    @property
    def settled(self) -> bool:
        return self.status in SETTLED

    @property
    def entropy(self) -> float:
        """Display only; β is the exact value."""
        return math.log(self.beta)

    def to_json(self) -> dict:
        return {"beta": self.beta, "status": self.status, "reached_at": self.reached_at,
                "window": self.window, "sizes": self.sizes, "method": self.method}


@dataclass
class Trajectory:
    base: FiniteSubgroup
    sizes: list[int]
    subgroup_flags: list[bool]
    betas: list[Fraction]
    steps: list[ProductSet] = field(default_factory=list)
    exhausted: bool = False
    _final: object = field(default=None, repr=False)
    _last: frozenset | None = field(default=None, repr=False)

    @property
    def last(self) -> frozenset:
        """Element values of the final computed T_n."""
        if self._last is None:
            self._last = frozenset(self._final.values()) if self._final is not None else frozenset()
        return self._last

    @property
    def subgroup_mode(self) -> bool:
        return all(self.subgroup_flags)


# ---------------------------------------------------------------------------
# observers (used by tests to audit every computed trajectory)
# ---------------------------------------------------------------------------

_observers: list[Callable[[Trajectory], None]] = []


@contextlib.contextmanager
def observe_trajectories(callback: Callable[[Trajectory], None]):
    _observers.append(callback)
    try:
        yield
    finally:
        _observers.remove(callback)


def _notify(tr: Trajectory) -> None:
    for cb in list(_observers):
        cb(tr)


# ---------------------------------------------------------------------------
# set backends
# ---------------------------------------------------------------------------

class _ValueSet:
    def __init__(self, G: AmbientGroup, values):
        self.G = G
        self.T = set(values)

    def extend(self, Y: list, budget: int) -> None:
        mul = self.G.mul
        new = set(self.T)
        base = list(self.T)
        for y in Y:
            new.update(mul(x, y) for x in base)
            if len(new) > budget:
                raise BudgetExceeded("trajectory", budget)
        self.T = new

    def closed_under(self, gens: list) -> bool:
        mul, T = self.G.mul, self.T
        return all(mul(x, g) in T for g in gens for x in T)

    def __len__(self):
        return len(self.T)

    def values(self):
        return set(self.T)


class _RowSet:
    """Sorted packed keys over a layout that grows with the support."""

    def __init__(self, G: AmbientGroup, values, pad: int = 2):
        self.G = G
        self.pad = pad
        values = list(values)
        self.layout = Layout(G, self._window(window_of(G, values)))
        if not self.layout.packable:
            raise NotPackable("initial layout too wide")
        self.keys = np.unique(self.layout.pack(self.layout.to_rows(values)))

    def _window(self, w):
        return (w[0] - self.pad, w[1] + self.pad)

    def _ensure(self, values) -> None:
        w = window_of(self.G, values, self.layout.window)
        if self.layout.covers(w):
            return
        wider = Layout(self.G, self._window(w))
        if not wider.packable:
            raise NotPackable("layout too wide")
        rows = self.layout.widen_rows(self.layout.unpack(self.keys), wider)
        self.layout = wider
        self.keys = np.unique(wider.pack(rows))

    def extend(self, Y: list, budget: int) -> None:
        self._ensure(Y)
        L = self.layout
        X = L.unpack(self.keys)
        Yr = L.to_rows(Y)
        per = max(1, _PRODUCT_CHUNK // max(1, X.shape[0]))
        acc = self.keys
        for s in range(0, Yr.shape[0], per):
            k = np.unique(L.product_keys(X, Yr[s:s + per]))
            acc = np.union1d(acc, k)
            if acc.shape[0] > budget:
                raise BudgetExceeded("trajectory", budget)
        self.keys = acc

    def closed_under(self, gens: list) -> bool:
        self._ensure(gens)
        L = self.layout
        X = L.unpack(self.keys)
        Gr = L.to_rows(gens)
        per = max(1, _PRODUCT_CHUNK // max(1, X.shape[0]))
        for s in range(0, Gr.shape[0], per):
            k = L.product_keys(X, Gr[s:s + per])
            pos = np.searchsorted(self.keys, k)
            pos[pos >= self.keys.shape[0]] = 0
            if not np.array_equal(self.keys[pos], k):
                return False
        return True

    def __len__(self):
        return int(self.keys.shape[0])

    def values(self):
        return set(self.layout.from_rows(self.layout.unpack(self.keys)))


def _make_set(G, values, backend: str):
    if backend != "values" and G.lowerable():
        try:
            return _RowSet(G, values)
        except (NotPackable, StructuralError):
            if backend == "rows":
                raise
    return _ValueSet(G, values)


class _Growing:
    """Wraps a backend and falls back to plain sets if rows stop packing."""

    def __init__(self, G, values, backend):
        self.G, self.backend = G, backend
        self.impl = _make_set(G, values, backend)

    def _fallback(self):
        self.impl = _ValueSet(self.G, self.impl.values())

    def extend(self, Y, budget):
        try:
            self.impl.extend(Y, budget)
        except NotPackable:
            self._fallback()
            self.impl.extend(Y, budget)

    def closed_under(self, gens):
        try:
            return self.impl.closed_under(gens)
        except NotPackable:
            self._fallback()
            return self.impl.closed_under(gens)

    def __len__(self):
        return len(self.impl)

    def values(self):
        return self.impl.values()


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def _dedupe(xs):
    return list(dict.fromkeys(xs))


def _run(phi: Endomorphism, F: FiniteSubgroup, cfg: EntropyConfig, keep_steps: bool = False,
         stop: bool = True) -> tuple[Trajectory, EntropyEstimate]:
    G = F.ambient
    f = phi.apply_value
    cur = sorted(F.values, key=G.encode)
    gens = list(F.generator_values) or list(cur)
    T = _Growing(G, cur, cfg.backend)
    tr = Trajectory(F, [len(T)], [True], [])
    if keep_steps:
        tr.steps.append(ProductSet(F.elements, (F,)))
    all_gens = list(gens)
    factors = [F]
    est = None
    for n in range(1, cfg.n_max + 1):
        cur = _dedupe(f(v) for v in cur)        # φ^n(F)
        gens = _dedupe(f(g) for g in gens)
        try:
            T.extend(cur, cfg.size_budget)
        except BudgetExceeded:
            tr.exhausted = True
            bound = int(math.ceil(tr.betas[-1])) if tr.betas else len(cur)
            est = EntropyEstimate(bound, EXHAUSTED, n, cfg.window, list(tr.sizes))
            break
        all_gens = _dedupe(all_gens + gens)
        t = len(T)
        flag = T.closed_under(all_gens)
        beta = Fraction(t, tr.sizes[-1])
        tr.sizes.append(t)
        tr.subgroup_flags.append(flag)
        tr.betas.append(beta)
        if keep_steps:
            factors.append(FiniteSubgroup.from_values(G, cur, gens))
            vals = T.values()
            tr.steps.append(ProductSet(tuple(sorted(G.encode(v) for v in vals)), tuple(factors)))
        if tr.subgroup_mode:
            if len(tr.betas) > 1 and tr.betas[-1] > tr.betas[-2]:
                raise AssertionError(f"β_n increased along a subgroup trajectory: {tr.betas}")
            if beta == 1:
                est = EntropyEstimate(1, CERTIFIED_ZERO, n, cfg.window, list(tr.sizes))
                if stop:
                    break
            run = _run_start(tr.betas)
            if est is None and len(tr.betas) - run + 1 >= cfg.window:
                est = EntropyEstimate(int(beta), STABILIZED, run, cfg.window, list(tr.sizes))
                if stop:
                    break
        else:
            run = _run_start(tr.betas)
            if len(tr.betas) - run + 1 >= cfg.window and stop:
                est = EntropyEstimate(int(math.ceil(beta)), NON_SUBGROUP, run, cfg.window, list(tr.sizes))
                break
    tr._final = T
    if est is None:
        if not tr.subgroup_mode:
            b = int(math.ceil(tr.betas[-1])) if tr.betas else 1
            est = EntropyEstimate(b, NON_SUBGROUP, _run_start(tr.betas), cfg.window, list(tr.sizes))
        elif tr.betas:
            est = EntropyEstimate(int(tr.betas[-1]), EXHAUSTED, len(tr.betas), cfg.window, list(tr.sizes))
        else:
            est = EntropyEstimate(1, EXHAUSTED, 0, cfg.window, list(tr.sizes))
    elif not tr.subgroup_mode and est.status != EXHAUSTED:
        est.status = NON_SUBGROUP
    _notify(tr)
    return tr, est


def _run_start(betas: list) -> int:
    """1-based index where the final constant run of ``betas`` begins."""
    if not betas:
        return 0
    i = len(betas) - 1
    while i > 0 and betas[i - 1] == betas[-1]:
        i -= 1
    return i + 1


def trajectory(phi: Endomorphism, F: FiniteSubgroup, n_max: int = 8,
               size_budget: int = DEFAULT_BUDGET) -> Trajectory:
    """Exact product sets T_1..T_{n_max+1} (or until the budget runs out)."""
    cfg = EntropyConfig(n_max=n_max, size_budget=size_budget)
    tr, _ = _run(phi, F, cfg, keep_steps=True, stop=False)
    return tr


def entropy_along(phi: Endomorphism, F: FiniteSubgroup, config: EntropyConfig | None = None) -> EntropyEstimate:
    cfg = config or EntropyConfig()
    tr, est = _run(phi, F, cfg)
    if est.status == CERTIFIED_ZERO and cfg.debug:
        _audit_certified(phi, F, tr, est, cfg)
    return est


class CertificationError(AssertionError):
    pass


def _audit_certified(phi, F, tr: Trajectory, est: EntropyEstimate, cfg: EntropyConfig) -> None:
    """Once T_{m+1} = T_m: T_m is φ-invariant and two further steps change nothing."""
    G = F.ambient
    T = tr.last
    if len(T) <= cfg.size_budget // 4:
        bad = [v for v in T if phi.apply_value(v) not in T]
        if bad:
            raise CertificationError(f"certified trajectory not invariant at {G.element_to_json(bad[0])}")
    ext = EntropyConfig(n_max=est.reached_at + 2, window=cfg.window, size_budget=cfg.size_budget,
                        debug=False, backend=cfg.backend)
    tr2, _ = _run(phi, F, ext, stop=False)
    if tr2.sizes[est.reached_at:] != [tr.sizes[est.reached_at]] * len(tr2.sizes[est.reached_at:]):
        raise CertificationError(f"trajectory grew after certification: {tr2.sizes}")


@dataclass
class SupEstimate:
    beta: int
    status: str
    witness: int
    per_base: list[EntropyEstimate]
    lower_bound: bool = True

    @property
    def settled(self) -> bool:
        return all(e.settled for e in self.per_base)

    def to_json(self) -> dict:
        return {"beta": self.beta, "status": self.status, "witness": self.witness,
                "lower_bound_for_h_alg": self.lower_bound, "per_base": [e.to_json() for e in self.per_base]}


_STATUS_RANK = {CERTIFIED_ZERO: 0, STABILIZED: 1, NON_SUBGROUP: 2, EXHAUSTED: 3}


def combine(ests: list[EntropyEstimate]) -> SupEstimate:
    if not ests:
        raise ValueError("family must be non-empty")
    w = max(range(len(ests)), key=lambda i: (ests[i].beta, -i))
    status = max((e.status for e in ests), key=_STATUS_RANK.__getitem__)
    return SupEstimate(ests[w].beta, status, w, list(ests))


def entropy_sup(phi: Endomorphism, family: list[FiniteSubgroup], config: EntropyConfig | None = None) -> SupEstimate:
    """Max β over the family: a lower bound for the entropy of φ."""
    if not family:
        raise ValueError("family must be non-empty")
    return combine([entropy_along(phi, F, config) for F in family])


# ---------------------------------------------------------------------------
# limit-free formula
# ---------------------------------------------------------------------------

class UminChain:
    """Membership in U^{(n)} by the recursion x ∈ U^{(n+1)} iff some u ∈ U
    has φ(u⁻¹x) ∈ U^{(n)}; memoized per (element, level)."""

    def __init__(self, phi: Endomorphism, U: FiniteSubgroup, budget: int = DEFAULT_BUDGET):
        self.phi, self.U = phi, U
        self.G = U.ambient
        self._Uinv = [self.G.inv(u) for u in sorted(U.values, key=self.G.encode)]
        self._memo: dict = {}
        self.budget = budget
        self.D: list[frozenset] = []

    def member(self, x, n: int) -> bool:
        if n == 0:
            return x in self.U.values
        key = (x, n)
        r = self._memo.get(key)
        if r is not None:
            return r
        if len(self._memo) > self.budget:
            raise BudgetExceeded("limit-free membership", self.budget)
        # the chain is increasing, so lower levels decide early
        r = self.member(x, n - 1)
        if not r:
            mul, f = self.G.mul, self.phi.apply_value
            r = any(self.member(f(mul(ui, x)), n - 1) for ui in self._Uinv)
        self._memo[key] = r
        return r

    def level(self, n: int) -> frozenset:
        while len(self.D) <= n:
            k = len(self.D)
            f = self.phi.apply_value
            self.D.append(frozenset(u for u in self.U.values if self.member(f(u), k)))
        return self.D[n]


def umin_membership(phi: Endomorphism, U: FiniteSubgroup, x: bytes, n: int, depth_cap: int = 64) -> bool:
    if n > depth_cap:
        raise BudgetExceeded("recursion depth", depth_cap)
    return UminChain(phi, U).member(U.ambient.decode(x), n)


def limit_free_entropy(phi: Endomorphism, U: FiniteSubgroup, config: EntropyConfig | None = None) -> EntropyEstimate:
    cfg = config or EntropyConfig()
    chain = UminChain(phi, U, cfg.size_budget)
    order = len(U)
    sizes: list[int] = []
    run = 0
    for n in range(cfg.level_max + 1):
        try:
            D = chain.level(n)
        except BudgetExceeded:
            beta = order // sizes[-1] if sizes else order
            return EntropyEstimate(beta, EXHAUSTED, n, cfg.window, sizes, "limit_free")
        sizes.append(len(D))
        if len(D) == order:
            return EntropyEstimate(1, CERTIFIED_ZERO, n, cfg.window, sizes, "limit_free")
        if n > 0 and D == chain.D[n - 1]:
            if n - run + 1 >= cfg.window:
                return EntropyEstimate(order // len(D), STABILIZED, run, cfg.window, sizes, "limit_free")
        else:
            run = n
    return EntropyEstimate(order // sizes[-1], EXHAUSTED, cfg.level_max, cfg.window, sizes, "limit_free")


# ---------------------------------------------------------------------------
# modulus and inverse relation
# ---------------------------------------------------------------------------

def modulus(phi: Endomorphism, U: FiniteSubgroup) -> Fraction:
    """[Uφ(U) : U] / [Uφ(U) : φ(U)]."""
    V = image_subgroup(phi, U)
    W = product_set(U, V)
    if not is_subgroup(W):
        raise StructuralError("U·φ(U) is not a subgroup")
    return Fraction(generalized_index(W, U), generalized_index(W, V))


@dataclass
class InverseReport:
    beta_forward: EntropyEstimate
    beta_inverse: EntropyEstimate
    delta: Fraction
    verdict: str

    def to_json(self) -> dict:
        return {"beta_forward": self.beta_forward.to_json(), "beta_inverse": self.beta_inverse.to_json(),
                "delta": str(self.delta), "verdict": self.verdict}


def inverse_entropy_check(phi: Endomorphism, U: FiniteSubgroup, config: EntropyConfig | None = None) -> InverseReport:
    """Check beta(φ, U) = beta(φ⁻¹, U)·Δ(φ, U)."""
    inv = phi.inverse()
    if inv is None:
        raise StructuralError("map has no known inverse")
    ef = entropy_along(phi, U, config)
    eb = entropy_along(inv, U, config)
    delta = modulus(phi, U)
    if not (ef.settled and eb.settled):
        verdict = "inconclusive"
    elif Fraction(ef.beta) == eb.beta * delta:
        verdict = "holds-exactly" if ef.status == eb.status == CERTIFIED_ZERO else "holds-within-certification"
    else:
        verdict = "VIOLATION"
    return InverseReport(ef, eb, delta, verdict)
