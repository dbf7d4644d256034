"""
Where f stops looking like a growth function
============================================

Every growth function satisfies gamma'(m) <= gamma'(n)^d for n <= m <= dn,
and a consequence bounding f(2CDn) - f(2CDn - C).  f breaks both.
"""

from growthlab import build, build_schedule, check_derivative_condition, find_witness, parse_omega

table = build(build_schedule(1, d={1: 3}, omega=parse_omega("log")), 5000)

rep = check_derivative_condition(table, 2)
print("derivative condition, d = 2:", rep.verdict, (rep.violation["n"], rep.violation["m"]))

# The seed 2^x already fails at (2, 4).  The interesting jump is where the
# slow arithmetic segment meets the first geometric step.
late = check_derivative_condition(table, 2, start=127)
n, m = late.violation["n"], late.violation["m"]
print(f"from n = 127: first violation at n = {n}, m = {m}")
print(f"  f'({m}) has {int(late.violation['lhs_hex'], 16).bit_length()} bits, "
      f"f'({n})^2 has {int(late.violation['rhs_hex'], 16).bit_length()}")

# %%
# The witness for C = 1 follows the recipe n = m_1 + 1, D = floor(d_1 (1 - 1/(m_1+1))).
w = find_witness(table, 1)
print(f"\nwitness: C = {w.C}, D = {w.D}, n = {w.n}")
print(f"  lhs = f({2 * w.C * w.D * w.n}) - f({2 * w.C * w.D * w.n - w.C}): {w.lhs.bit_length()} bits")
print(f"  rhs = 2 D^2 n (f(CDn) - f(Cn - C))^(2D): {w.rhs.bit_length()} bits")
print(f"  lhs > rhs by about 2^{w.margin_bits}")
