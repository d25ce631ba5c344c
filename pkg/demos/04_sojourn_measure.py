"""
How long does the string spend at each slope?
=============================================

The time the derivative of the string spends above v, divided by T, is
compared with the limiting tail 1/2 (1 - coth(rv) + rv / sinh(rv)**2).
"""
import numpy as np

from tautstring import SeedSpec, TubeSpec, empirical_tail, ks_distance, limit_tail, simulate_wiener, sojourn_measure, taut_string
from tautstring.wiener import effective_width

r = 1.0
for T in (100.0, 400.0, 1600.0):
    w = simulate_wiener(T, int(T * 500), SeedSpec(4))
    nu = sojourn_measure(taut_string(w, TubeSpec(effective_width(r, w.dt))))
    print(f"T = {T:6g}: {nu.slopes.size:6d} distinct slopes, KS = {ks_distance(nu, r):.4f}")

print(f"\n{'v':>6} {'empirical':>10} {'limit':>10}")
for v in np.linspace(-2, 2, 9):
    print(f"{v:>6.2f} {empirical_tail(nu, v):>10.4f} {limit_tail(v, r):>10.4f}")
