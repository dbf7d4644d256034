"""
Building the function f
=======================

Three regimes glued together: 2^x up to n_1, then +x+1 steps up to d_1 n_1,
then repeated multiplication by 2^(1/(2 d_1)) with the floor taken each time.
"""

import numpy as np

from growthlab import build, build_schedule, parse_omega

# A deliberately small demo schedule first.  Small numbers are readable, but
# the ledger tells us which hypotheses they violate.
demo = build_schedule(1, "demo", d={1: 3}, n={1: 8})
print("demo ledger failures:", demo.ledgers[0].failures)

t = build(demo, 40)
for x in (7, 8, 9, 24, 25, 26):
    print(f"  f({x:2d}) = {t[x]:>6d}   [{t.segment_of(x).label}]")

# The arithmetic segment has a closed form; the table agrees with it.
n1 = demo.entries[0].n
xs = np.arange(n1, 3 * n1 + 1)
closed = t[n1] + (xs - n1) * (xs + n1 + 3) // 2
print("closed form matches:", np.array_equal(closed, t.values(n1, 3 * n1)))

# %%
# Now the certified schedule: the search walks up until every constraint
# C1..C15 passes, with omega(m) = 1/floor(log2(m+1)).
cert = build_schedule(1, d={1: 3}, omega=parse_omega("log"))
(e,) = cert.entries
print(f"\ncertified: d_1 = {e.d}, n_1 = {e.n}")
print("ledger:")
for v in cert.ledgers[0].verdicts:
    print(f"  {v.id:>3}  {v.verdict:<15} {v.relation}")

big = build(cert, 3000)

# The effective exponent log2 f(x) / x falls from 1 toward 1/(2 d_1).
xs = np.array([50, 127, 200, 381, 600, 1000, 2000, 3000])
rate = np.array([big[int(x)].bit_length() - 1 for x in xs]) / xs
for x, r in zip(xs, rate):
    print(f"  x = {x:5d}   log2 f(x) / x ~ {r:.3f}")
