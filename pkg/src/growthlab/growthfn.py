"""Exact tables of the piecewise-defined increasing submultiplicative function.

Given parameters ``(d_k, n_k)`` the function is

* ``f(x) = 2**x`` for ``x <= n_1``,
* ``f(x) = f(x-1) + x + 1`` on ``(n_k, d_k n_k]``,
* ``f(x) = floor(2**(1/(2 d_1...d_k)) * f(x-1))`` on ``(d_k n_k, n_{k+1}]``,

the last geometric segment running on indefinitely.  The recurrence is
serial, so a table is built once, front to back, and is read-only after that.
"""

from __future__ import annotations

import bisect
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence

from .exact import (
    Ordering,
    RationalPow2,
    cmp_nat_mul_pow2,
    cmp_nat_pow2,
    floor_mul_pow2,
    floor_mul_pow2_oracle,
)
from .reports import CheckReport

__all__ = [
    "Segment",
    "GrowthTable",
    "ConstructionError",
    "OutOfRange",
    "build",
    "segments_for",
    "products",
    "arith_closed_form",
    "value_at",
    "lower_bound_exponent",
    "verify_lower_bound",
    "verify_condition_I",
    "verify_floor_bounds",
]

CHECKPOINT_EVERY = 4096
CROSSCHECK_EVERY = 64
ORACLE_LIMIT = 1 << 20
DEFAULT_MEM_BUDGET = 1 << 30


class ConstructionError(AssertionError):
    """A runtime invariant of the construction failed on a certified build."""


class OutOfRange(IndexError):
    pass


def products(entries) -> List[int]:
    """``[1, d_1, d_1 d_2, ...]``; index k holds d_1...d_k."""
    out = [1]
    for e in entries:
        out.append(out[-1] * e.d)
    return out


def arith_closed_form(f_start: int, start: int, x: int) -> int:
    """f(x) on an arithmetic segment that begins after ``start``."""
    return f_start + (x - start) * (x + start + 3) // 2


@dataclass(frozen=True)
class Segment:
    kind: str  # "seed" | "arith" | "geom"
    k: int
    lo: int
    hi: Optional[int]  # None: runs on indefinitely
    ratio: Optional[RationalPow2] = None

    @property
    def label(self) -> str:
        return "seed" if self.kind == "seed" else f"{self.kind}:{self.k}"

    def __contains__(self, x: int) -> bool:
        return self.lo <= x and (self.hi is None or x <= self.hi)


def segments_for(entries: Sequence) -> List[Segment]:
    entries = list(entries)
    if not entries:
        return [Segment("seed", 0, 1, None)]
    prods = products(entries)
    segs = [Segment("seed", 0, 1, entries[0].n)]
    for i, e in enumerate(entries):
        k = i + 1
        segs.append(Segment("arith", k, e.n + 1, e.d * e.n))
        hi = entries[i + 1].n if i + 1 < len(entries) else None
        segs.append(Segment("geom", k, e.d * e.n + 1, hi, RationalPow2(1, 2 * prods[k])))
    return segs


def _mem_budget() -> int:
    raw = os.environ.get("GROWTHLAB_MEM_BUDGET")
    return int(raw) if raw else DEFAULT_MEM_BUDGET


class GrowthTable:
    """Exact values f(1..horizon) with segment metadata and checkpoints.

    Values are held densely until their estimated footprint passes the memory
    budget; after that only checkpoints survive (segment ends and every
    ``checkpoint_every`` geometric steps) and geometric values are recomputed
    on demand.
    """

    first = 1

    def __init__(self, schedule, horizon: int = 0, *, mem_budget: Optional[int] = None,
                 checkpoint_every: int = CHECKPOINT_EVERY,
                 crosscheck_every: int = CROSSCHECK_EVERY,
                 strict: Optional[bool] = None):
        self.schedule = schedule
        self.entries = tuple(schedule.entries)
        self.segments = segments_for(self.entries)
        self._seg_lo = [s.lo for s in self.segments]
        self.checkpoint_every = checkpoint_every
        self.crosscheck_every = crosscheck_every
        self.mem_budget = _mem_budget() if mem_budget is None else mem_budget
        if strict is None:
            strict = getattr(schedule, "mode", "demo") == "certified"
        self.strict = strict
        self.checkpoints: dict = {}
        self.anomalies: List[str] = []
        self.stats: Counter = Counter()
        self._dense: Optional[List[int]] = [0]
        self._bytes = 0
        self.horizon = 0
        self._last = 0
        self.extend_to(horizon)

    # -- structure ---------------------------------------------------------

    @property
    def last(self) -> int:
        return self.horizon

    @property
    def dense(self) -> bool:
        return self._dense is not None

    @property
    def certified(self) -> bool:
        return getattr(self.schedule, "certified", False)

    def segment_of(self, x: int) -> Segment:
        if x < 1:
            raise OutOfRange(f"f is defined from x = 1, got {x}")
        return self.segments[bisect.bisect_right(self._seg_lo, x) - 1]

    def boundaries(self) -> List[int]:
        out = []
        for e in self.entries:
            out += [e.n, e.d * e.n]
        return out

    def alpha(self, k: int = 1) -> int:
        """f(d_k n_k) - f(n_k)."""
        e = self.entries[k - 1]
        return self.value_at(e.d * e.n) - self.value_at(e.n)

    def beta(self, k: int) -> int:
        """f(d_{k-1} n_{k-1})."""
        e = self.entries[k - 2]
        return self.value_at(e.d * e.n)

    # -- building ----------------------------------------------------------

    def _anomaly(self, msg: str):
        if self.strict:
            raise ConstructionError(msg)
        self.anomalies.append(msg)

    def _step(self, x: int, prev: int) -> int:
        seg = self.segment_of(x)
        if seg.kind == "seed":
            return 1 << x
        if seg.kind == "arith":
            v = prev + x + 1
            e = self.entries[seg.k - 1]
            if v != arith_closed_form(self.checkpoints[e.n], e.n, x):
                raise ConstructionError(f"arithmetic closed form disagrees at x={x}")
            return v
        v = floor_mul_pow2(prev, seg.ratio)
        j = x - seg.lo + 1
        if j % self.crosscheck_every == 0 or j % self.checkpoint_every == 0:
            self._crosscheck(x, prev, v, seg.ratio)
        return v

    def _crosscheck(self, x: int, prev: int, v: int, ratio: RationalPow2):
        self.stats["crosschecks"] += 1
        if ratio.denom * prev.bit_length() <= ORACLE_LIMIT:
            ok = floor_mul_pow2_oracle(prev, ratio) == v
        else:
            ok = (cmp_nat_mul_pow2(v, prev, ratio) != Ordering.GREATER
                  and cmp_nat_mul_pow2(v + 1, prev, ratio) == Ordering.GREATER)
        if not ok:
            raise ConstructionError(f"geometric step disagrees with oracle at x={x}")

    def _is_checkpoint(self, x: int, seg: Segment) -> bool:
        if seg.hi == x:
            return True
        return seg.kind == "geom" and (x - seg.lo + 1) % self.checkpoint_every == 0

    def extend_to(self, horizon: int) -> "GrowthTable":
        """Grow the table in place so that it covers f(1..horizon)."""
        for x, v in self._generate(self.horizon + 1, horizon, self._last):
            seg = self.segment_of(x)
            if x > 1 and v <= self._last:
                self._anomaly(f"not increasing at x={x}")
            if self._is_checkpoint(x, seg):
                self.checkpoints[x] = v
            if self._dense is not None:
                self._dense.append(v)
                self._bytes += v.bit_length() // 8 + 32
                if self._bytes > self.mem_budget:
                    self._dense = None
            self._last = v
            self.horizon = x
        return self

    def _generate(self, start: int, stop: int, prev: int) -> Iterator:
        x = start
        while x <= stop:
            prev = self._step(x, prev)
            yield x, prev
            x += 1

    # -- reading -----------------------------------------------------------

    def __len__(self) -> int:
        return self.horizon

    def __getitem__(self, x: int) -> int:
        return self.value_at(x)

    def value_at(self, x: int) -> int:
        if x < 1 or x > self.horizon:
            raise OutOfRange(f"x={x} outside built range [1, {self.horizon}]")
        if self._dense is not None:
            return self._dense[x]
        return self.recompute(x)

    def recompute(self, x: int) -> int:
        """f(x) from checkpoints alone, ignoring dense storage."""
        if x < 1 or x > self.horizon:
            raise OutOfRange(f"x={x} outside built range [1, {self.horizon}]")
        seg = self.segment_of(x)
        if seg.kind == "seed":
            return 1 << x
        if seg.kind == "arith":
            e = self.entries[seg.k - 1]
            return arith_closed_form(self.checkpoints[e.n], e.n, x)
        start = seg.lo - 1
        start += ((x - start) // self.checkpoint_every) * self.checkpoint_every
        v = self.checkpoints[start]
        for _ in range(x - start):
            v = floor_mul_pow2(v, seg.ratio)
        return v

    def iter_values(self, lo: int, hi: int) -> Iterator[int]:
        if lo < 1 or hi > self.horizon:
            raise OutOfRange(f"[{lo}, {hi}] outside built range [1, {self.horizon}]")
        if self._dense is not None:
            yield from self._dense[lo:hi + 1]
            return
        if lo > hi:
            return
        v = self.recompute(lo)
        yield v
        for _, v in self._generate(lo + 1, hi, v):
            yield v

    def values(self, lo: int, hi: int) -> List[int]:
        return list(self.iter_values(lo, hi))

    # -- embedded sanity checks --------------------------------------------

    def spot_check(self) -> List[str]:
        """Boundary submultiplicativity, alpha_1 bound and floor-lemma checks."""
        problems = []
        bs = sorted(set(self.boundaries()))
        for i, p in enumerate(bs):
            for q in bs[i:]:
                if p + q <= self.horizon and self.value_at(p + q) > self.value_at(p) * self.value_at(q):
                    problems.append(f"f({p}+{q}) > f({p}) f({q})")
        if self.entries:
            e = self.entries[0]
            alpha = arith_closed_form(0, e.n, e.d * e.n)
            if not alpha < e.d ** 2 * e.n ** 2:
                problems.append("alpha_1 >= d_1^2 n_1^2")
        for k in range(1, len(self.entries) + 1):
            rep = verify_floor_bounds(self, k)
            if not rep.details.get("upper_ok", True):
                problems.append(f"floor-lemma upper bound fails on segment {k}")
        for msg in problems:
            self._anomaly(msg)
        return problems


def build(schedule, horizon: int, **kwargs) -> GrowthTable:
    """Build f(1..horizon) for ``schedule`` and run the embedded spot checks."""
    table = GrowthTable(schedule, horizon, **kwargs)
    table.spot_check()
    return table


def value_at(table: GrowthTable, x: int) -> int:
    return table.value_at(x)


# -- verification of the construction's inequalities ------------------------


def lower_bound_exponent(entries, x: int) -> Optional[Fraction]:
    """Exponent of the power-of-two lower bound that applies at ``x``.

    Uses the smallest k with ``x <= d_k n_k``; beyond the last such point the
    bound propagated through Condition (I) on the final geometric segment.
    """
    entries = list(entries)
    if not entries:
        return None
    prods = products(entries)
    for i, e in enumerate(entries):
        k = i + 1
        if x <= e.d * e.n:
            return Fraction(x, 2 * prods[k]) + 1 + Fraction(1, 2 ** (k + 1))
    k = len(entries)
    return Fraction(x, 2 * prods[k]) + 1 + Fraction(1, 2 ** (k + 2))


def verify_lower_bound(table: GrowthTable, lo: int = 1, hi: Optional[int] = None) -> CheckReport:
    """Exact check of ``f(x) >= 2**(x/(2 d_1...d_k) + 1 + 2**-(k+1))``."""
    hi = table.horizon if hi is None else hi
    report = CheckReport("lowerbound", "exhaustive", (lo, hi))
    failures = []
    for x, v in zip(range(lo, hi + 1), table.iter_values(lo, hi)):
        ex = lower_bound_exponent(table.entries, x)
        if ex is None:
            continue
        if cmp_nat_pow2(v, ex) == Ordering.LESS:
            failures.append({"x": x, "exponent": str(ex)})
    report.details["failures"] = failures
    if failures:
        report.fail(**failures[0])
    return report


def verify_condition_I(table: GrowthTable, k: int) -> CheckReport:
    """Exact check of Condition (I) on every built point of geometric segment k.

    ``f(x) >= f(d_k n_k) * 2**((x - d_k n_k)/(2 d_1...d_k) - 2**-(k+2))``
    """
    e = table.entries[k - 1]
    start = e.d * e.n
    stop = table.horizon
    if k < len(table.entries):
        stop = min(stop, table.entries[k].n)
    report = CheckReport("conditionI", "exhaustive", (start, stop))
    report.details["k"] = k
    if start > stop:
        report.details["checked"] = 0
        return report
    prods = products(table.entries)
    a0 = table.value_at(start)
    eps = Fraction(1, 2 ** (k + 2))
    checked = 0
    for x, v in zip(range(start, stop + 1), table.iter_values(start, stop)):
        ex = Fraction(x - start, 2 * prods[k]) - eps
        checked += 1
        if cmp_nat_mul_pow2(v, a0, ex) == Ordering.LESS:
            report.details["checked"] = checked
            return report.fail(x=x, exponent=str(ex))
    report.details["checked"] = checked
    return report


def verify_floor_bounds(table: GrowthTable, k: int) -> CheckReport:
    """``c**(j - eps) a_0 <= a_j <= c**j a_0`` along geometric segment k."""
    e = table.entries[k - 1]
    start = e.d * e.n
    stop = table.horizon
    if k < len(table.entries):
        stop = min(stop, table.entries[k].n)
    report = CheckReport("floorbounds", "exhaustive", (start, stop))
    report.details.update(k=k, upper_ok=True, lower_ok=True)
    if start > stop:
        return report
    prods = products(table.entries)
    a0 = table.value_at(start)
    eps = Fraction(1, 2 ** (k + 2))
    for x, v in zip(range(start, stop + 1), table.iter_values(start, stop)):
        j = Fraction(x - start, 2 * prods[k])
        if cmp_nat_mul_pow2(v, a0, j) == Ordering.GREATER:
            report.details["upper_ok"] = False
            return report.fail(x=x, side="upper")
        if report.details["lower_ok"] and cmp_nat_mul_pow2(v, a0, j - eps) == Ordering.LESS:
            report.details["lower_ok"] = False
            report.fail(x=x, side="lower")
    return report
