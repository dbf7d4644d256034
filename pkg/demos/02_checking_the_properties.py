"""
Checking the properties exactly
===============================

Monotonicity, submultiplicativity, Condition (I), the lower-bound lemma and
dominance over 2^(x omega(x)), all with exact integer comparisons.
"""

import time

from growthlab import build, build_schedule, check_increasing, check_submultiplicative, parse_omega
from growthlab.growthfn import verify_condition_I, verify_lower_bound
from growthlab.verify import check_dominance

omega = parse_omega("log")
table = build(build_schedule(1, d={1: 3}, omega=omega), 5000)

print("increasing:", check_increasing(table).verdict)

t0 = time.perf_counter()
rep = check_submultiplicative(table, 5000)
print(f"submultiplicative to 5000: {rep.verdict} in {time.perf_counter() - t0:.2f}s")
print(f"  {rep.details['filtered_pairs']} pairs settled by bit length, "
      f"{rep.details['exact_pairs']} by exact products")

print("Condition (I), k=1:", verify_condition_I(table, 1).verdict)

# The lower bound is stated for every x <= d_k n_k, but x = 1 is too small:
# f(1) = 2 while the bound asks for 2^(1/6 + 5/4).
lb = verify_lower_bound(table)
print("lower bound:", lb.verdict, "failures at", [f["x"] for f in lb.details["failures"]])
print("lower bound from x = 2:", verify_lower_bound(table, 2).verdict)

print("dominance over 2^(x omega(x)):", check_dominance(table, omega).verdict)
