"""Certified integer arithmetic around powers of two with rational exponents.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point value ever decides a result.  Floats are only used to seed the
Newton iteration in :func:`iroot`, which then converges from above on exact
integers.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

__all__ = [
    "Unresolved",
    "Ordering",
    "RationalPow2",
    "CertifiedInterval",
    "iroot",
    "pow2_interval",
    "floor_mul_pow2",
    "floor_mul_pow2_oracle",
    "cmp_nat_pow2",
    "cmp_nat_mul_pow2",
    "cmp_nat_sum_pow2",
    "cmp_pow2_sums",
]

# q * bits above which comparisons switch from powering to interval refinement
EXACT_POWER_LIMIT = 1 << 17
# q * bits above which 2^(r/q) bounds come from series instead of an integer root
ROOT_BOUNDS_LIMIT = 1 << 18
GUARD_BITS = 32
GUARD_CAP = 4096


class Unresolved(ArithmeticError):
    """Refinement hit its precision cap without separating the two sides."""


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @classmethod
    def of(cls, x) -> "Ordering":
        return cls((x > 0) - (x < 0))


@dataclass(frozen=True)
class RationalPow2:
    """The real number ``2 ** (numer / denom)``, kept in lowest terms."""

    numer: int
    denom: int = 1

    def __post_init__(self):
        numer, denom = int(self.numer), int(self.denom)
        if denom == 0:
            raise ZeroDivisionError("exponent denominator must be nonzero")
        if denom < 0:
            numer, denom = -numer, -denom
        g = math.gcd(numer, denom)
        object.__setattr__(self, "numer", numer // g)
        object.__setattr__(self, "denom", denom // g)

    @classmethod
    def of(cls, exponent: Union[int, Fraction, str, "RationalPow2"]) -> "RationalPow2":
        if isinstance(exponent, RationalPow2):
            return exponent
        x = Fraction(exponent)
        return cls(x.numerator, x.denominator)

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.numer, self.denom)

    @property
    def is_rational(self) -> bool:
        """True iff the denoted real is rational (an exact power of two)."""
        return self.denom == 1

    def split(self) -> Tuple[int, int]:
        """Return ``(s, r)`` with ``numer = s*denom + r`` and ``0 <= r < denom``."""
        return divmod(self.numer, self.denom)

    def __mul__(self, other: "RationalPow2") -> "RationalPow2":
        if not isinstance(other, RationalPow2):
            return NotImplemented
        return RationalPow2.of(self.exponent + other.exponent)

    def __truediv__(self, other: "RationalPow2") -> "RationalPow2":
        if not isinstance(other, RationalPow2):
            return NotImplemented
        return RationalPow2.of(self.exponent - other.exponent)

    def __pow__(self, k: int) -> "RationalPow2":
        return RationalPow2.of(self.exponent * k)

    def reciprocal(self) -> "RationalPow2":
        return RationalPow2(-self.numer, self.denom)

    def __str__(self) -> str:
        if self.denom == 1:
            return f"2^{self.numer}"
        return f"2^({self.numer}/{self.denom})"


Exponent = Union[int, Fraction, str, RationalPow2]


def iroot(n: int, m: int) -> int:
    """Largest ``r`` with ``r**m <= n``."""
    if m < 1:
        raise ValueError("root degree must be positive")
    if n < 0:
        raise ValueError("iroot needs a nonnegative radicand")
    if n < 2 or m == 1:
        return n
    if m == 2:
        return math.isqrt(n)
    b = n.bit_length()
    if m >= b:
        return 1
    if b > 128 * m:
        # root of the top half first, then one or two full-size Newton steps
        k = b // (2 * m)
        x = (iroot(n >> (m * k), m) + 1) << k
    else:
        # float seed from the top 64 bits; Newton from above lands on the floor
        shift = max(b - 64, 0)
        t = (math.log2(n >> shift) + shift) / m
        x = int(2.0 ** t) + 1
    m1 = m - 1
    x = (m1 * x + n // x ** m1) // m
    while True:
        y = (m1 * x + n // x ** m1) // m
        if y >= x:
            return x
        x = y


@functools.lru_cache(maxsize=64)
def _ln2_fixed(prec: int) -> Tuple[int, int]:
    """Bounds ``lo <= ln(2) * 2**prec <= hi`` from ln 2 = 2 atanh(1/3)."""
    one2 = 2 << prec
    total = 0
    terms = 0
    j = 0
    p = 3
    while True:
        t = one2 // ((2 * j + 1) * p)
        if t == 0:
            break
        total += t
        terms += 1
        j += 1
        p *= 9
    # each floor drops < 1, the unsummed tail is < 1
    return total, total + terms + 1


def _exp_fixed(x_lo: int, x_hi: int, prec: int) -> Tuple[int, int]:
    """Bounds on ``exp(x) * 2**prec`` for ``x_lo/2**prec <= x <= x_hi/2**prec < 1``."""
    one = 1 << prec
    lo = term = one
    k = 1
    while term:
        term = term * x_lo // (k << prec)
        lo += term
        k += 1
    hi = term = one
    k = 1
    while term > 1:
        term = -(-(term * x_hi) // (k << prec))
        hi += term
        k += 1
    # the remainder after a term <= 1 is itself <= 1
    return lo, hi + 2


@functools.lru_cache(maxsize=512)
def _frac_pow2_fixed(r: int, q: int, bits: int) -> Tuple[int, int]:
    """Bounds ``lo <= 2**(r/q) * 2**bits <= hi`` for ``0 <= r < q``."""
    if r == 0:
        v = 1 << bits
        return v, v
    if q * bits <= ROOT_BOUNDS_LIMIT:
        y = iroot(1 << (r + q * bits), q)
        return y, y + 1
    extra = 2 * bits.bit_length() + 16
    prec = bits + extra
    l_lo, l_hi = _ln2_fixed(prec)
    x_lo = r * l_lo // q
    x_hi = -(-(r * l_hi) // q)
    e_lo, e_hi = _exp_fixed(x_lo, x_hi, prec)
    return e_lo >> extra, -(-e_hi >> extra)


@dataclass(frozen=True)
class CertifiedInterval:
    """Dyadic enclosure ``[lo / 2**scale, hi / 2**scale]`` of a real target.

    When ``target`` is set the interval encloses ``2 ** target`` and
    :meth:`refine` doubles its precision.
    """

    lo: int
    hi: int
    scale: int
    target: RationalPow2 | None = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return Fraction(self.hi - self.lo, 1 << self.scale)

    def __contains__(self, value) -> bool:
        v = Fraction(value) * (1 << self.scale)
        return self.lo <= v <= self.hi

    def refine(self) -> "CertifiedInterval":
        if self.target is None:
            raise ValueError("interval has no target to refine")
        return pow2_interval(self.target, 2 * self.scale)

    def floor_times(self, a: int) -> Tuple[int, int]:
        """``(floor(a*lo'), floor(a*hi'))`` for the real endpoints lo', hi'."""
        return (a * self.lo) >> self.scale, (a * self.hi) >> self.scale


def pow2_interval(e: Exponent, bits: int) -> CertifiedInterval:
    """Enclosure of ``2**e`` with ``bits`` fractional bits."""
    e = RationalPow2.of(e)
    if bits < 1:
        raise ValueError("need at least one fractional bit")
    s, r = e.split()
    lo, hi = _frac_pow2_fixed(r, e.denom, bits)
    if s >= 0:
        lo, hi = lo << s, hi << s
    else:
        lo, hi = lo >> -s, -(-hi >> -s)
    return CertifiedInterval(lo, hi, bits, e)


def _round_bits(bits: int) -> int:
    # coarse buckets keep the lru caches hot along a geometric segment
    return -(-bits // 64) * 64


def floor_mul_pow2(a: int, e: Exponent) -> int:
    """Exact ``floor(a * 2**e)`` for a natural ``a``.

    Uses interval refinement of ``2**e`` with guard bits starting at
    ``bits(a) + 32`` and doubling up to ``bits(a) + 4096``; raises
    :class:`Unresolved` past that.
    """
    e = RationalPow2.of(e)
    if a < 0:
        raise ValueError("floor_mul_pow2 is defined on naturals")
    if a == 0:
        return 0
    if e.denom == 1:
        return a << e.numer if e.numer >= 0 else a >> -e.numer
    nbits = a.bit_length()
    cap = nbits + GUARD_CAP
    bits = _round_bits(nbits + GUARD_BITS)
    while True:
        lo, hi = pow2_interval(e, bits).floor_times(a)
        if lo == hi:
            return lo
        if bits >= cap:
            raise Unresolved(f"floor({a.bit_length()}-bit * {e}) not separated at {bits} bits")
        bits = min(2 * bits, cap)


def floor_mul_pow2_oracle(a: int, e: Exponent) -> int:
    """Same value as :func:`floor_mul_pow2`, via one big integer root."""
    e = RationalPow2.of(e)
    p, q = e.numer, e.denom
    x = a ** q
    x = x << p if p >= 0 else x >> -p
    return iroot(x, q)


def cmp_nat_mul_pow2(n: int, a: int, e: Exponent) -> Ordering:
    """Order of ``n`` versus ``a * 2**e`` for naturals ``n`` and ``a``."""
    e = RationalPow2.of(e)
    if n < 0 or a < 0:
        raise ValueError("operands must be natural")
    if a == 0:
        return Ordering.of(n)
    if n == 0:
        return Ordering.LESS
    p, q = e.numer, e.denom
    bn, ba = n.bit_length(), a.bit_length()
    # n in [2^(bn-1), 2^bn), a*2^e in [2^(ba-1+e), 2^(ba+e))
    if q * bn < q * (ba - 1) + p:
        return Ordering.LESS
    if q * (bn - 1) > q * ba + p:
        return Ordering.GREATER
    if q == 1:
        lhs, rhs = (n, a << p) if p >= 0 else (n << -p, a)
        return Ordering.of(lhs - rhs)
    if q * max(bn, ba) <= EXACT_POWER_LIMIT:
        lhs, rhs = n ** q, a ** q
        if p >= 0:
            rhs <<= p
        else:
            lhs <<= -p
        return Ordering.of(lhs - rhs)
    # irrational right side: refinement always separates eventually
    bits = _round_bits(max(bn, ba) + GUARD_BITS)
    cap = bn + ba + GUARD_CAP
    while True:
        iv = pow2_interval(e, bits)
        scaled = n << bits
        if scaled < a * iv.lo:
            return Ordering.LESS
        if scaled > a * iv.hi:
            return Ordering.GREATER
        if bits >= cap:
            raise Unresolved(f"cannot separate n from a*{e} at {bits} bits")
        bits = min(2 * bits, cap)


def cmp_nat_pow2(n: int, e: Exponent) -> Ordering:
    """Order of ``n`` versus ``2**e``.

    ``n = 0`` returns LESS: every power of two is positive.
    """
    if n == 0:
        return Ordering.LESS
    return cmp_nat_mul_pow2(n, 1, e)


Term = Tuple[int, Exponent]


def _group_terms(terms: Iterable[Term]):
    """Split ``sum c * 2**e`` into a rational part and irrational classes.

    The powers ``2**(j/Q)``, ``0 <= j < Q``, are linearly independent over
    the rationals, so the sum is rational iff every nonzero class has a zero
    combined coefficient.
    """
    rational = Fraction(0)
    classes: dict = {}
    for c, e in terms:
        if c == 0:
            continue
        e = RationalPow2.of(e)
        s, r = e.split()
        coeff = Fraction(c) * (Fraction(2) ** s)
        if r == 0:
            rational += coeff
        else:
            key = (r, e.denom)
            classes[key] = classes.get(key, 0) + coeff
    classes = {k: v for k, v in classes.items() if v != 0}
    return rational, classes


def cmp_pow2_sums(left: Sequence[Term], right: Sequence[Term]) -> Ordering:
    """Order of ``sum(c * 2**e for left)`` versus the same sum over ``right``.

    Coefficients are integers of either sign.  Exact ties are decided by
    cancellation of like terms; an irrational difference is separated by
    refining interval enclosures.  :class:`Unresolved` signals the precision
    cap, never a wrong answer.
    """
    terms = list(left) + [(-c, e) for c, e in right]
    rational, classes = _group_terms(terms)
    if not classes:
        return Ordering.of(rational)
    magnitude = abs(rational) + sum(abs(v) for v in classes.values())
    mag_bits = max(int(magnitude).bit_length(), 1)
    cap = mag_bits + GUARD_CAP + 64
    bits = 64
    while True:
        lo = hi = rational * (1 << bits)
        for (r, q), coeff in classes.items():
            l, h = _frac_pow2_fixed(r, q, bits)
            if coeff > 0:
                lo += coeff * l
                hi += coeff * h
            else:
                lo += coeff * h
                hi += coeff * l
        if lo > 0:
            return Ordering.GREATER
        if hi < 0:
            return Ordering.LESS
        if bits >= cap:
            raise Unresolved("sum of powers of two not separated from zero")
        bits = min(2 * bits, _round_bits(cap))


def cmp_nat_sum_pow2(n: int, terms: Sequence[Term]) -> Ordering:
    """Order of ``n`` versus ``sum(coeff * 2**e)``."""
    if not terms:
        raise ValueError("need at least one term")
    return cmp_pow2_sums([(n, 0)], terms)
