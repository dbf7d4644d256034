"""Exact construction and checking of a counterexample growth function.

The library builds an increasing, submultiplicative integer function f that
is not equivalent to the growth function of any finitely generated algebra,
and provides the exact-arithmetic checks that certify each step.
"""

__version__ = "0.1.0"

from .exact import (  # noqa: E402
    CertifiedInterval,
    Ordering,
    RationalPow2,
    Unresolved,
    cmp_nat_mul_pow2,
    cmp_nat_pow2,
    cmp_nat_sum_pow2,
    cmp_pow2_sums,
    floor_mul_pow2,
    iroot,
)
from .growthfn import GrowthTable, OutOfRange, build, value_at  # noqa: E402
from .schedule import Omega, Schedule, ScheduleEntry, build_schedule, parse_omega, validate_schedule  # noqa: E402
from .verify import (  # noqa: E402
    IntSequence,
    check_derivative_condition,
    check_increasing,
    check_submultiplicative,
    evaluate_p2,
    find_witness,
)
from .algebra import MonomialAlgebraSpec, growth_table  # noqa: E402
