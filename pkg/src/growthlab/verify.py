"""Necessary-condition checkers for growth functions, and the violation witness.

All checkers read integer sequences through a small protocol: ``first`` and
``last`` bound the domain and ``values(lo, hi)`` returns the exact values.
:class:`GrowthTable` satisfies it directly; :class:`IntSequence` wraps plain
lists (monomial algebra growth, hand-made controls).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .exact import Ordering, cmp_nat_pow2
from .growthfn import GrowthTable, OutOfRange
from .reports import CheckReport, to_hex

__all__ = [
    "IntSequence",
    "DerivativeViolation",
    "Witness",
    "P2Result",
    "RecipeRangeViolated",
    "NotViolated",
    "Uncertified",
    "check_increasing",
    "check_submultiplicative",
    "check_derivative_condition",
    "evaluate_p2",
    "witness_parameters",
    "find_witness",
    "check_dominance",
]

PAIR_BUDGET = 20_000


class RecipeRangeViolated(ValueError):
    def __init__(self, msg: str, constraint: str = "C13"):
        super().__init__(f"{constraint}: {msg}")
        self.constraint = constraint


class NotViolated(AssertionError):
    pass


class Uncertified(ValueError):
    pass


class IntSequence:
    """Read-only view of ``values[i]`` as the value at index ``first + i``."""

    def __init__(self, values: Sequence[int], first: int = 0, boundaries: Sequence[int] = ()):
        self._values = [int(v) for v in values]
        self.first = first
        self._boundaries = list(boundaries)

    @property
    def last(self) -> int:
        return self.first + len(self._values) - 1

    def __len__(self) -> int:
        return len(self._values)

    def __getitem__(self, x: int) -> int:
        if not self.first <= x <= self.last:
            raise OutOfRange(f"index {x} outside [{self.first}, {self.last}]")
        return self._values[x - self.first]

    def values(self, lo: int, hi: int) -> List[int]:
        if lo < self.first or hi > self.last:
            raise OutOfRange(f"[{lo}, {hi}] outside [{self.first}, {self.last}]")
        return self._values[lo - self.first:hi - self.first + 1]

    def boundaries(self) -> List[int]:
        return list(self._boundaries)


def _padded(seq, lo: int, hi: int) -> list:
    """Values indexed by position: ``out[x]`` is seq(x) for lo <= x <= hi."""
    return [None] * lo + seq.values(lo, hi)


def _bits(vals: list, lo: int) -> tuple:
    n = len(vals)
    bl = np.zeros(n, dtype=np.int64)
    pos = np.zeros(n, dtype=bool)
    for i in range(lo, n):
        v = vals[i]
        if v > 0:
            bl[i] = v.bit_length()
            pos[i] = True
    return bl, pos


def check_increasing(seq, lo: Optional[int] = None, hi: Optional[int] = None) -> CheckReport:
    lo = seq.first if lo is None else lo
    hi = seq.last if hi is None else hi
    report = CheckReport("mono", "exhaustive", (lo, hi))
    vals = seq.values(lo, hi)
    for i in range(len(vals) - 1):
        if not vals[i] < vals[i + 1]:
            return report.fail(n=lo + i, lhs=to_hex(vals[i]), rhs=to_hex(vals[i + 1]))
    return report


# -- submultiplicativity -----------------------------------------------------


def _first_submul_failure(vals, bl, pos, p: int, q: np.ndarray, stats) -> Optional[int]:
    """Smallest q in the sorted array with f(p+q) > f(p) f(q), else None."""
    s = p + q
    allpos = pos[p] & pos[q] & pos[s]
    sure_pass = allpos & (bl[s] <= bl[p] + bl[q] - 2)
    sure_fail = allpos & (bl[s] - 1 >= bl[p] + bl[q])
    undecided = ~(sure_pass | sure_fail)
    stats["filtered"] += int(sure_pass.sum() + sure_fail.sum())
    first_fail = int(q[sure_fail][0]) if sure_fail.any() else None
    fp = vals[p]
    for qq in q[undecided].tolist():
        if first_fail is not None and qq > first_fail:
            break
        stats["exact"] += 1
        if vals[p + qq] > fp * vals[qq]:
            return qq
    return first_fail


def check_submultiplicative(seq, N: Optional[int] = None, strategy: str = "exhaustive", *,
                            count: int = 100_000, seed: int = 0, width: int = 64,
                            boundaries: Optional[Sequence[int]] = None,
                            pair_budget: int = PAIR_BUDGET) -> CheckReport:
    """Check ``f(p+q) <= f(p) f(q)`` over pairs ``1 <= p <= q``, ``p + q <= N``.

    Bit lengths settle most pairs; the exact product is formed only when
    they cannot.  The reported failure is the lexicographically first (p, q)
    among the pairs examined.
    """
    N = seq.last if N is None else N
    if N < 2 or N > seq.last or seq.first > 1:
        raise OutOfRange(f"N={N} outside the sequence domain")
    report = CheckReport("submul", strategy, (1, N))
    vals = _padded(seq, 1, N)
    bl, pos = _bits(vals, 1)
    stats = {"filtered": 0, "exact": 0}

    def per_p(p, q):
        if q.size == 0:
            return None
        return _first_submul_failure(vals, bl, pos, p, q, stats)

    best = None
    if strategy == "exhaustive":
        if N > pair_budget:
            raise ValueError(f"exhaustive strategy limited to N <= {pair_budget}")
        for p in range(1, N // 2 + 1):
            q = per_p(p, np.arange(p, N - p + 1))
            if q is not None:
                best = (p, q)
                break
    elif strategy == "sampled":
        rng = np.random.default_rng(seed)
        pq = rng.integers(1, N, size=(count, 2))
        pq.sort(axis=1)
        pq = pq[pq.sum(axis=1) <= N]
        order = np.lexsort((pq[:, 1], pq[:, 0]))
        pq = np.unique(pq[order], axis=0)
        for p in np.unique(pq[:, 0]).tolist():
            q = per_p(p, pq[pq[:, 0] == p, 1])
            if q is not None:
                best = (p, q)
                break
        report.details.update(seed=seed, count=count, sampled_pairs=int(len(pq)))
    elif strategy == "boundary":
        if boundaries is None:
            boundaries = seq.boundaries() if hasattr(seq, "boundaries") else []
        near = set()
        for b in boundaries:
            near.update(range(max(b - width, 1), min(b + width, N) + 1))
        cands: dict = {}
        for t in sorted(near):
            if t <= N // 2:  # p = t
                cands.setdefault(t, set()).update(range(t, N - t + 1))
            for p in range(1, min(t, N - t) + 1):  # q = t
                cands.setdefault(p, set()).add(t)
            for p in range(1, t // 2 + 1):  # p + q = t
                cands.setdefault(p, set()).add(t - p)
        for p in sorted(cands):
            q = per_p(p, np.array(sorted(cands[p]), dtype=np.int64))
            if q is not None and (best is None or (p, q) < best):
                best = (p, q)
                break
        report.details.update(width=width, boundaries=list(boundaries))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    report.details.update(filtered_pairs=stats["filtered"], exact_pairs=stats["exact"])
    if best is not None:
        p, q = best
        report.fail(p=p, q=q, lhs=to_hex(vals[p + q]), rhs=to_hex(vals[p] * vals[q]))
    return report


# -- discrete derivative condition -------------------------------------------


@dataclass(frozen=True)
class DerivativeViolation:
    n: int
    m: int
    d: int
    lhs: int  # gamma'(m)
    rhs: int  # gamma'(n) ** d

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "d": self.d,
                "lhs_hex": to_hex(self.lhs), "rhs_hex": to_hex(self.rhs)}


def check_derivative_condition(seq, d: int, N: Optional[int] = None,
                               start: Optional[int] = None) -> CheckReport:
    """Check ``g'(m) <= g'(n)**d`` for all ``n <= m <= d n <= N``.

    ``g'(n) = g(n) - g(n-1)`` needs n - 1 in the domain, so n starts at
    ``first + 1`` (index 1 for algebra tables, 2 for f).  The violation
    reported is the first in lexicographic (n, m) order.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    N = seq.last if N is None else N
    start = seq.first + 1 if start is None else max(start, seq.first + 1)
    report = CheckReport("derivative", "exhaustive", (start, N))
    report.details["d"] = d
    vals = _padded(seq, start - 1, N)
    dv = [None] * start + [vals[x] - vals[x - 1] for x in range(start, N + 1)]
    bl = np.zeros(N + 1, dtype=np.int64)
    nonneg = np.zeros(N + 1, dtype=bool)
    for x in range(start, N + 1):
        if dv[x] >= 0:
            nonneg[x] = True
            bl[x] = dv[x].bit_length()
    for n in range(start, N + 1):
        a = dv[n]
        m = np.arange(n, min(d * n, N) + 1)
        if a > 0:
            sure_pass = ~nonneg[m] | (bl[m] <= d * (int(bl[n]) - 1))
            sure_fail = nonneg[m] & (bl[m] - 1 >= d * int(bl[n]))
        else:
            sure_pass = np.zeros(m.size, dtype=bool)
            sure_fail = np.zeros(m.size, dtype=bool)
        undecided = ~(sure_pass | sure_fail)
        first_fail = int(m[sure_fail][0]) if sure_fail.any() else None
        if undecided.any():
            rhs = a ** d
            for mm in m[undecided].tolist():
                if first_fail is not None and mm > first_fail:
                    break
                if dv[mm] > rhs:
                    first_fail = mm
                    break
        if first_fail is not None:
            v = DerivativeViolation(n, first_fail, d, dv[first_fail], a ** d)
            return report.fail(**v.to_dict())
    return report


# -- the inequality every growth function satisfies --------------------------


@dataclass(frozen=True)
class P2Result:
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def evaluate_p2(seq, C: int, D: int, n: int, *, value=None) -> P2Result:
    """``f(2CDn) - f(2CDn - C)`` against ``2 D^2 n (f(CDn) - f(Cn - C))**(2D)``."""
    if C * n - C < 1:
        raise OutOfRange("need Cn - C >= 1")
    top = 2 * C * D * n
    if top > seq.last:
        raise OutOfRange(f"needs f({top}); sequence ends at {seq.last}")
    f = value or seq.__getitem__
    lhs = f(top) - f(top - C)
    rhs = 2 * D * D * n * (f(C * D * n) - f(C * n - C)) ** (2 * D)
    return P2Result(lhs, rhs)


@dataclass(frozen=True)
class Witness:
    C: int
    D: int
    n: int
    lhs: int
    rhs: int

    @property
    def margin_bits(self) -> float:
        return self.lhs.bit_length() - self.rhs.bit_length()

    def to_dict(self) -> dict:
        return {
            "C": self.C, "D": self.D, "n": self.n,
            "lhs_hex": to_hex(self.lhs), "rhs_hex": to_hex(self.rhs),
            "lhs_bits": self.lhs.bit_length(), "rhs_bits": self.rhs.bit_length(),
            "violated": self.lhs > self.rhs,
        }


def witness_parameters(entries, C: int) -> tuple:
    """``(D, n)`` from the recipe with ``k = C``; checks its range facts."""
    if C < 1 or C > len(entries):
        raise OutOfRange(f"C={C} needs schedule depth >= {C}, have {len(entries)}")
    e = entries[C - 1]
    k, dk, nk = C, e.d, e.n
    if nk % k:
        raise RecipeRangeViolated(f"n_{k}={nk} is not a multiple of k={k}")
    m = nk // k
    n = m + 1
    D = dk * m // (m + 1)
    if not (2 * D >= dk and D <= dk):
        raise RecipeRangeViolated(f"D={D} outside [d_k/2, d_k]")
    if not 2 * C * D * n <= 2 * dk * nk:
        raise RecipeRangeViolated("2CDn > 2 d_k n_k")
    if not 2 * C * D * n - C >= dk * nk:
        raise RecipeRangeViolated("2CDn - C < d_k n_k (need n_k > 2k)")
    if not C * n - C == nk:
        raise RecipeRangeViolated("Cn - C != n_k")
    if not C * D * n <= dk * nk:
        raise RecipeRangeViolated("CDn > d_k n_k")
    return D, n


def find_witness(table: GrowthTable, C: int, *, require_certified: bool = True) -> Witness:
    """Parameters at which f breaks the growth-function inequality.

    Both sides are evaluated exactly, then the four f-values are recomputed
    from checkpoints and compared.
    """
    if require_certified and not table.certified:
        raise Uncertified("witness requires a certified schedule")
    D, n = witness_parameters(table.entries, C)
    res = evaluate_p2(table, C, D, n)
    again = evaluate_p2(table, C, D, n, value=table.recompute)
    if again != res:
        raise AssertionError("recomputed f-values disagree with the table")
    if res.holds:
        raise NotViolated(f"lhs <= rhs at C={C}, D={D}, n={n}")
    return Witness(C, D, n, res.lhs, res.rhs)


# -- dominance over a subexponential function ---------------------------------


def check_dominance(table: GrowthTable, omega, lo: Optional[int] = None,
                    hi: Optional[int] = None) -> CheckReport:
    """Exact check of ``f(x) >= 2**(x * omega(x))`` for built x >= n_1."""
    if lo is None:
        lo = table.entries[0].n if table.entries else 1
    hi = table.horizon if hi is None else hi
    report = CheckReport("dominance", "exhaustive", (lo, hi))
    report.details["omega"] = str(omega)
    if lo > hi:
        return report
    for x, v in zip(range(lo, hi + 1), table.iter_values(lo, hi)):
        ex = x * Fraction(omega(x))
        if cmp_nat_pow2(v, ex) == Ordering.LESS:
            return report.fail(x=x, exponent=str(ex), f_hex=to_hex(v))
    return report
