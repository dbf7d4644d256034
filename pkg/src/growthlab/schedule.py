"""Parameter schedules ``{d_k, n_k}`` and the constraint ledger that certifies them.

Every "take n_k large enough" in the construction becomes a named constraint
(C1..C15) with a decidable, exact predicate.  :func:`build_schedule` searches
for the smallest parameters passing all of them, or records failures for
hand-picked demo parameters.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exact import (
    Ordering,
    RationalPow2,
    cmp_nat_mul_pow2,
    cmp_nat_pow2,
    cmp_nat_sum_pow2,
    cmp_pow2_sums,
)
from .growthfn import GrowthTable, arith_closed_form, products
from .reports import to_hex

__all__ = [
    "Omega",
    "parse_omega",
    "ScheduleEntry",
    "Schedule",
    "Verdict",
    "LedgerReport",
    "Constraint",
    "CONSTRAINTS",
    "MissingTable",
    "ScanCapExceeded",
    "ScheduleInvalid",
    "check_entry",
    "find_min_n",
    "find_min_d",
    "build_schedule",
    "validate_schedule",
    "condition_I_threshold",
]

DEFAULT_SCAN_CAP = 10 ** 7


class MissingTable(LookupError):
    """A constraint needs f-values that the supplied table does not cover."""


class ScanCapExceeded(RuntimeError):
    pass


class ScheduleInvalid(ValueError):
    pass


# -- omega presets -----------------------------------------------------------


class Omega:
    """A rate ``omega(m) -> 0`` with ``g(m) <= 2**(m * omega(m))``.

    ``kind`` is ``log`` (``1/floor(log2(m+1))``), ``const`` or ``table``.
    For tables, values past the last listed m are 0.
    """

    def __init__(self, kind: str, value: Optional[Fraction] = None,
                 table: Sequence[Fraction] = (), label: Optional[str] = None):
        self.kind = kind
        self.const = value
        self.table = tuple(Fraction(v) for v in table)
        self.label = label or kind

    def __call__(self, m: int) -> Fraction:
        if m < 1:
            raise ValueError("omega is defined for m >= 1")
        if self.kind == "log":
            return Fraction(1, (m + 1).bit_length() - 1)
        if self.kind == "const":
            return self.const
        return self.table[m - 1] if m <= len(self.table) else Fraction(0)

    def last_at_least(self, t: Fraction) -> Optional[int]:
        """``max{m : omega(m) >= t}``; 0 if empty, None if unbounded."""
        t = Fraction(t)
        if t <= 0:
            return None
        if self.kind == "log":
            # floor(log2(m+1)) <= floor(1/t)  <=>  m <= 2**(floor(1/t)+1) - 2
            return (1 << (math.floor(1 / t) + 1)) - 2
        if self.kind == "const":
            return None if self.const >= t else 0
        hits = [m for m, v in enumerate(self.table, 1) if v >= t]
        return max(hits, default=0)

    def __str__(self) -> str:
        return self.label


def parse_omega(text: Optional[str]) -> Optional[Omega]:
    """``log`` | ``const:<num>/<den>`` | ``file:<path>`` | ``none``."""
    if text is None or text in ("", "none"):
        return None
    if text == "log":
        return Omega("log")
    if text.startswith("const:"):
        return Omega("const", Fraction(text[6:]), label=text)
    if text.startswith("file:"):
        path = Path(text[5:])
        raw = path.read_text()
        if path.suffix == ".json":
            vals = json.loads(raw)
            vals = vals["values"] if isinstance(vals, dict) else vals
        else:
            vals = [ln.strip() for ln in raw.splitlines() if ln.strip() and not ln.startswith("#")]
        return Omega("table", table=[Fraction(str(v)) for v in vals], label=text)
    raise ValueError(f"unknown omega preset {text!r}")


# -- schedule types ----------------------------------------------------------


@dataclass(frozen=True)
class ScheduleEntry:
    k: int
    d: int
    n: int

    @property
    def m(self) -> int:
        return self.n // self.k


@dataclass
class Verdict:
    id: str
    k: int
    verdict: str  # pass | fail | not-applicable
    lhs: Optional[str] = None
    rhs: Optional[str] = None
    relation: str = ""
    note: str = ""

    def to_dict(self) -> dict:
        out = {"id": self.id, "verdict": self.verdict}
        for key in ("lhs", "rhs"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.relation:
            out["relation"] = self.relation
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_dict(cls, k: int, d: dict) -> "Verdict":
        return cls(d["id"], k, d["verdict"], d.get("lhs"), d.get("rhs"),
                   d.get("relation", ""), d.get("note", ""))


@dataclass
class LedgerReport:
    k: int
    verdicts: List[Verdict]

    @property
    def passed(self) -> bool:
        return all(v.verdict != "fail" for v in self.verdicts)

    @property
    def failures(self) -> List[str]:
        return [v.id for v in self.verdicts if v.verdict == "fail"]

    def __getitem__(self, cid: str) -> Verdict:
        for v in self.verdicts:
            if v.id == cid:
                return v
        raise KeyError(cid)


@dataclass
class Schedule:
    mode: str = "certified"
    omega: Optional[Omega] = None
    entries: List[ScheduleEntry] = field(default_factory=list)
    ledgers: List[LedgerReport] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.entries)

    @property
    def certified(self) -> bool:
        return self.mode == "certified" and all(l.passed for l in self.ledgers)

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "omega": str(self.omega) if self.omega else "none",
        }
        if self.mode != "certified":
            out["watermark"] = "uncertified"
        out["entries"] = []
        for e, led in zip(self.entries, self.ledgers):
            out["entries"].append({
                "k": e.k, "d": e.d, "n": e.n, "m": e.m,
                "ledger": [v.to_dict() for v in led.verdicts],
            })
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Schedule":
        entries, ledgers = [], []
        for row in d.get("entries", []):
            entries.append(ScheduleEntry(row["k"], row["d"], row["n"]))
            ledgers.append(LedgerReport(row["k"], [Verdict.from_dict(row["k"], v)
                                                   for v in row.get("ledger", [])]))
        return cls(d.get("mode", "demo"), parse_omega(d.get("omega")), entries, ledgers)


class _Prefix:
    """Schedule-shaped view of the first k-1 entries, for table building."""

    mode = "demo"

    def __init__(self, entries):
        self.entries = list(entries)


# -- constraints -------------------------------------------------------------


@dataclass
class EntryContext:
    prefix: List[ScheduleEntry]
    entry: ScheduleEntry
    fvalue: Callable[[int], int]
    omega: Optional[Omega]

    @property
    def k(self) -> int:
        return self.entry.k

    @functools.cached_property
    def prods(self) -> List[int]:
        return products(self.prefix + [self.entry])

    @property
    def P(self) -> int:
        return self.prods[self.k]

    @functools.cached_property
    def f_n(self) -> int:
        return self.fvalue(self.entry.n)

    @functools.cached_property
    def f_dn(self) -> int:
        e = self.entry
        return arith_closed_form(self.f_n, e.n, e.d * e.n)

    @property
    def prev(self) -> Optional[ScheduleEntry]:
        return self.prefix[-1] if self.prefix else None


@dataclass(frozen=True)
class Constraint:
    id: str
    description: str
    used_in: str
    predicate: Callable[[EntryContext], Verdict]
    needs_table: bool = False
    closed_form: bool = False

    def __call__(self, ctx: EntryContext) -> Verdict:
        return self.predicate(ctx)


def _v(cid, ctx, ok, lhs=None, rhs=None, relation="", note="") -> Verdict:
    conv = lambda x: to_hex(x) if isinstance(x, int) else x
    return Verdict(cid, ctx.k, "pass" if ok else "fail", conv(lhs), conv(rhs), relation, note)


def _na(cid, ctx, note="") -> Verdict:
    return Verdict(cid, ctx.k, "not-applicable", note=note)


def _c1(ctx):
    if ctx.k == 1:
        return _v("C1", ctx, ctx.entry.d > 2, ctx.entry.d, 2, "d_1 > 2")
    return _v("C1", ctx, ctx.entry.d > ctx.prev.d, ctx.entry.d, ctx.prev.d, "d_k > d_{k-1}")


def _c2(ctx):
    e = ctx.entry
    low = ctx.prev.d * ctx.prev.n if ctx.prev else 0
    ok = low < e.n < e.d * e.n
    return _v("C2", ctx, ok, e.n, low, "d_{k-1}n_{k-1} < n_k < d_k n_k")


def _c3(ctx):
    if ctx.k != 1:
        return _na("C3", ctx, "k = 1 only")
    e = ctx.entry
    lhs = (1 << e.n) + arith_closed_form(0, e.n, e.d * e.n)
    ok = cmp_nat_pow2(lhs, RationalPow2(3 * e.n + 1, 3)) != Ordering.GREATER
    return _v("C3", ctx, ok, lhs, f"2^({3 * e.n + 1}/3)", "2^n_1 + alpha_1 <= 2^(n_1 + 1/3)")


@functools.lru_cache(maxsize=64)
def condition_I_threshold(P: int, k: int) -> int:
    """Least a_0 with ``a_0 (c - 1)(1 - c**-eps) >= 1``, ``c = 2**(1/(2P))``, ``eps = 2**-(k+2)``.

    Expanded: ``a c + a c**-eps >= 1 + a + a c**(1-eps)``.
    """
    c = Fraction(1, 2 * P)
    eps = c * Fraction(1, 2 ** (k + 2))

    def ok(a):
        return cmp_pow2_sums([(a, c), (a, -eps)], [(1, 0), (a, 0), (a, c - eps)]) != Ordering.LESS

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _c4(ctx):
    t = condition_I_threshold(ctx.P, ctx.k)
    return _v("C4", ctx, ctx.f_dn >= t, ctx.f_dn, t,
              "f(d_k n_k) >= 1/((c-1)(1-c^-eps))")


def _c5(ctx):
    if ctx.k == 1:
        return _na("C5", ctx, "needs n_{k-1}")
    e, prev = ctx.entry, ctx.prev
    # d_k >= n_{k-1} / (2 d_1...d_{k-2}), empty product = 1
    ok = 2 * e.d * ctx.prods[ctx.k - 2] >= prev.n
    return _v("C5", ctx, ok, 2 * e.d * ctx.prods[ctx.k - 2], prev.n,
              "2 d_k d_1...d_{k-2} >= n_{k-1}")


def _c6(ctx):
    if ctx.k == 1:
        return _na("C6", ctx, "needs d_{k-1}")
    rhs = ctx.prev.d * ctx.prev.n + 1
    return _v("C6", ctx, ctx.entry.d > rhs, ctx.entry.d, rhs, "d_k > d_{k-1}n_{k-1} + 1")


def _c7(ctx):
    e = ctx.entry
    two_p = 2 * ctx.P
    lhs = e.d * e.n + 1
    ok = cmp_nat_sum_pow2(lhs, [(1, Fraction(e.n + 1, two_p)), (-1, Fraction(e.n, two_p))]) == Ordering.LESS
    return _v("C7", ctx, ok, lhs, f"2^({e.n}/{two_p}) (2^(1/{two_p}) - 1)",
              "1 + (d_k n_k + 1)/2^(n_k/2P) < 2^(1/2P)")


def _c8(ctx):
    ok = cmp_nat_mul_pow2(ctx.f_dn, ctx.f_n, Fraction(1, 3)) != Ordering.GREATER
    return _v("C8", ctx, ok, ctx.f_dn, ctx.f_n, "f(d_k n_k) <= f(n_k) 2^(1/3)")


def _c9(ctx):
    if ctx.k == 1:
        return _na("C9", ctx, "needs d_{k-1}, n_{k-1}")
    rhs = 2 * ctx.prev.d * ctx.prev.n
    return _v("C9", ctx, ctx.entry.n > rhs, ctx.entry.n, rhs, "n_k > 2 d_{k-1} n_{k-1}")


def _c10(ctx):
    e = ctx.entry
    sq = e.d ** 2 * e.n ** 2
    ok1 = ctx.f_n >= sq
    ok2 = cmp_nat_sum_pow2(ctx.f_n + sq, [(ctx.f_n, Fraction(e.n, 2 * ctx.P) + 1)]) != Ordering.GREATER
    return _v("C10", ctx, ok1 and ok2, ctx.f_n, sq,
              "f(n_k) >= d_k^2 n_k^2 and f(n_k) 2^(n_k/2P + 1) >= f(n_k) + d_k^2 n_k^2")


def _c11(ctx):
    n = ctx.entry.n
    ok = cmp_nat_mul_pow2(ctx.f_n + n * n, ctx.f_n, Fraction(1, 2)) != Ordering.GREATER
    return _v("C11", ctx, ok, ctx.f_n + n * n, ctx.f_n, "f(n_k) + n_k^2 <= f(n_k) 2^(1/2)")


def _c12(ctx):
    if ctx.k != 1:
        return _na("C12", ctx, "k = 1 only")
    return _v("C12", ctx, ctx.entry.n >= 3, ctx.entry.n, 3, "n_1 >= 3")


def _c13(ctx):
    e = ctx.entry
    ok = e.n % e.k == 0 and e.n > 2 * e.k
    return _v("C13", ctx, ok, e.n, 2 * e.k, "n_k = k m_k and n_k > 2k")


def _c14(ctx):
    if ctx.omega is None:
        return _na("C14", ctx, "no omega")
    last = ctx.omega.last_at_least(Fraction(1, 2 * ctx.P))
    if last is None:
        return _v("C14", ctx, False, ctx.entry.n, "inf", "n_k > max{m : omega(m) >= 1/2P}")
    return _v("C14", ctx, ctx.entry.n > last, ctx.entry.n, last, "n_k > max{m : omega(m) >= 1/2P}")


def _c15(ctx):
    # floor(c a) > a  <=>  c a >= a + 1; monotone in a, so the segment start decides
    ok = cmp_nat_mul_pow2(ctx.f_dn + 1, ctx.f_dn, Fraction(1, 2 * ctx.P)) != Ordering.GREATER
    return _v("C15", ctx, ok, ctx.f_dn + 1, ctx.f_dn, "f(d_k n_k) 2^(1/2P) >= f(d_k n_k) + 1")


CONSTRAINTS: Tuple[Constraint, ...] = (
    Constraint("C1", "d_1 > 2 and d increasing", "first geometric segment: ratio bound", _c1, closed_form=True),
    Constraint("C2", "n_k < d_k n_k < n_{k+1} interleaving", "segment layout", _c2, closed_form=True),
    Constraint("C3", "2^{n_1} + alpha_1 <= 2^{n_1 + 1/3}", "first arithmetic segment stays below 2^{1/3} growth", _c3),
    Constraint("C4", "Condition (I) seed threshold", "derived from the floor-lemma bound a_j >= c^j a_0 - (c^j-1)/(c-1)",
               _c4, needs_table=True),
    Constraint("C5", "d_k >= n_{k-1}/(2 d_1...d_{k-2})", "submultiplicativity across two geometric segments", _c5,
               closed_form=True),
    Constraint("C6", "d_k > d_{k-1} n_{k-1} + 1", "submultiplicativity, mixed arithmetic/geometric case", _c6,
               closed_form=True),
    Constraint("C7", "successive ratio bound on arithmetic segment", "arithmetic steps grow slower than the next ratio",
               _c7),
    Constraint("C8", "f(d_k n_k) <= f(n_k) 2^{1/3}", "arithmetic segment adds at most 2^{1/3}", _c8, needs_table=True),
    Constraint("C9", "n_k > 2 d_{k-1} n_{k-1}", "submultiplicativity, split inside segment k-1", _c9, closed_form=True),
    Constraint("C10", "f(n_k) >> d_k^2 n_k^2", "submultiplicativity, arithmetic segment k", _c10, needs_table=True),
    Constraint("C11", "f(n_k) + n_k^2 <= f(n_k) 2^{1/2}", "submultiplicativity, arithmetic segment k", _c11,
               needs_table=True),
    Constraint("C12", "n_1 >= 3", "lower-bound lemma base case", _c12, closed_form=True),
    Constraint("C13", "n_k = k m_k, n_k > 2k", "witness recipe ranges", _c13, closed_form=True),
    Constraint("C14", "omega dominance", "f dominates 2^{x omega(x)}", _c14, closed_form=True),
    Constraint("C15", "strict increase on geometric segment", "monotonicity of the floor steps", _c15, needs_table=True),
)


def _table_fvalue(table: Optional[GrowthTable], n: int) -> int:
    if table is None:
        raise MissingTable("constraint needs f-values but no table was given")
    if n > table.horizon:
        table.extend_to(n)
    return table.value_at(n)


def check_entry(prefix: Sequence[ScheduleEntry], entry: ScheduleEntry,
                table: Optional[GrowthTable] = None, omega: Optional[Omega] = None,
                *, stop_on_fail: bool = False) -> LedgerReport:
    """Evaluate C1..C15 for ``entry`` given the validated ``prefix``.

    ``table`` must be built for the prefix schedule; it is extended through
    ``n_k`` on demand (its last geometric segment is unterminated).  For
    ``k = 1`` no table is needed.
    """
    prefix = list(prefix)
    if entry.k != len(prefix) + 1:
        raise ValueError(f"entry k={entry.k} does not follow a prefix of length {len(prefix)}")
    if entry.k == 1:
        fvalue = lambda n: 1 << n
    else:
        fvalue = lambda n: _table_fvalue(table, n)
    ctx = EntryContext(prefix, entry, fvalue, omega)
    verdicts = []
    for c in CONSTRAINTS:
        v = c(ctx)
        verdicts.append(v)
        if stop_on_fail and v.verdict == "fail":
            break
    return LedgerReport(entry.k, verdicts)


def _closed_form_min_n(prefix, k: int, d: int, omega: Optional[Omega]) -> int:
    """Smallest n passing every constraint that does not need f-values."""
    low = 1
    if k == 1:
        low = 3
    low = max(low, 2 * k + 1)
    if prefix:
        p = prefix[-1]
        low = max(low, 2 * p.d * p.n + 1)
    if omega is not None:
        last = omega.last_at_least(Fraction(1, 2 * products(list(prefix) + [ScheduleEntry(k, d, 1)])[k]))
        if last is None:
            raise ScanCapExceeded("omega never drops below 1/(2 d_1...d_k); C14 is unsatisfiable")
        low = max(low, last + 1)
    return low


def find_min_n(prefix: Sequence[ScheduleEntry], k: int, d: int,
               omega: Optional[Omega] = None, *, cap: int = DEFAULT_SCAN_CAP,
               table: Optional[GrowthTable] = None) -> int:
    """Smallest ``n_k = k m_k`` passing all applicable constraints.

    Closed-form constraints give a starting point; from there a linear scan
    over ``m_k`` extends the prefix table incrementally.  Raises
    :class:`ScanCapExceeded` when ``m_k`` would exceed ``cap``.
    """
    prefix = list(prefix)
    start = _closed_form_min_n(prefix, k, d, omega)
    m = -(-start // k)
    if m > cap:
        raise ScanCapExceeded(f"closed-form lower bound m_{k} >= {m} exceeds cap {cap}")
    if k > 1 and table is None:
        table = GrowthTable(_Prefix(prefix), 0, strict=False)
    while m <= cap:
        rep = check_entry(prefix, ScheduleEntry(k, d, k * m), table, omega, stop_on_fail=True)
        if rep.passed:
            return k * m
        m += 1
    raise ScanCapExceeded(f"no n_{k} with m_{k} <= {cap}")


def find_min_d(prefix: Sequence[ScheduleEntry], k: int) -> int:
    """Smallest d_k passing C1, C5 and C6."""
    prefix = list(prefix)
    if k == 1:
        return 3
    p = prefix[-1]
    prods = products(prefix)
    c5 = -(-p.n // (2 * prods[k - 2]))
    return max(p.d + 1, p.d * p.n + 2, c5)


def build_schedule(depth: int, mode: str = "certified", *, d: Optional[Dict[int, int]] = None,
                   n: Optional[Dict[int, int]] = None, omega: Optional[Omega] = None,
                   cap: int = DEFAULT_SCAN_CAP) -> Schedule:
    """Choose ``(d_k, n_k)`` for k = 1..depth.

    ``d`` and ``n`` map k to user overrides.  Certified mode raises
    :class:`ScheduleInvalid` if any ledger entry fails; demo mode records
    the failures and keeps going.
    """
    if mode not in ("certified", "demo"):
        raise ValueError(f"unknown mode {mode!r}")
    d = d or {}
    n = n or {}
    sched = Schedule(mode, omega)
    table = None
    for k in range(1, depth + 1):
        if k > 1:
            table = GrowthTable(_Prefix(sched.entries), 0, strict=False)
        dk = d.get(k) or find_min_d(sched.entries, k)
        nk = n.get(k) or find_min_n(sched.entries, k, dk, omega, cap=cap, table=table)
        entry = ScheduleEntry(k, dk, nk)
        ledger = check_entry(sched.entries, entry, table, omega)
        if mode == "certified" and not ledger.passed:
            raise ScheduleInvalid(f"k={k}: ledger failures {', '.join(ledger.failures)}")
        sched.entries.append(entry)
        sched.ledgers.append(ledger)
    return sched


def validate_schedule(sched: Schedule) -> List[LedgerReport]:
    """Recompute every ledger from scratch."""
    out = []
    for i, e in enumerate(sched.entries):
        table = GrowthTable(_Prefix(sched.entries[:i]), 0, strict=False) if i else None
        out.append(check_entry(sched.entries[:i], e, table, sched.omega))
    return out
