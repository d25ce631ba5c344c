"""
Taut strings around a Brownian path
===================================

Sample a path, thread a string through the tube of width r around it, and
look at what the three end conditions do.
"""
import numpy as np

from tautstring import Boundary, SeedSpec, TubeSpec, simulate_wiener, taut_string, tv_trunc
from tautstring.taut_string import max_deviation

# 50 time units, 500 grid steps per unit
w = simulate_wiener(50.0, 25_000, SeedSpec(master=1))
r = 1.0

for mode in Boundary:
    h = taut_string(w, TubeSpec(r, mode))
    tv = np.sum(np.abs(np.diff(h.values)))
    print(f"{mode.value:>10}: {len(h):4d} knots, TV = {tv:8.4f}, "
          f"max |h - W| = {max_deviation(h, w):.6f} (r/2 = {r / 2})")

# With both ends free, the variation of the string is exactly the truncated
# variation of the path: the cheapest way to follow W up to r/2.
print("TV^r of the path:", tv_trunc(w, r).value)

# The string is piecewise linear; knots sit where it touches a barrier.
h = taut_string(w, TubeSpec(r))
print("first knots (t, h):")
for t, v in zip(h.times[:6], h.values[:6]):
    print(f"  {t:8.4f}  {v:+.4f}")
