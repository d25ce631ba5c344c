"""
Kinetic energy per unit time
============================

(1/T) * integral of h'(t)**2 over the taut string settles down to
pi**2 / (6 r**2) as T grows. On a grid the tube is monitored only at grid
points, which makes it effectively wider and the string lazier; shrinking the
grid tube by 2 * 0.5826 * sqrt(dt) compensates.
"""
import math

import numpy as np

from tautstring import PhiSpec, SeedSpec, TubeSpec, energy, integrate_against_p_inf, simulate_wiener, taut_string
from tautstring.wiener import effective_width

r = 1.0
target = integrate_against_p_inf(PhiSpec.power(2), r)
print(f"limit: {target:.6f}  (pi^2/6 = {math.pi ** 2 / 6:.6f})")

T = 1000.0
print(f"\nT = {T:g}, 8 replicates; nominal vs corrected grid tube")
print(f"{'steps/unit':>10} {'nominal':>10} {'corrected':>10}")
for spu in (50, 200, 800):
    raw, fixed = [], []
    for rep in range(8):
        w = simulate_wiener(T, int(T * spu), SeedSpec(7, rep))
        raw.append(energy(taut_string(w, TubeSpec(r)), PhiSpec.power(2)) / T)
        fixed.append(energy(taut_string(w, TubeSpec(effective_width(r, w.dt))), PhiSpec.power(2)) / T)
    print(f"{spu:>10} {np.mean(raw):>10.4f} {np.mean(fixed):>10.4f}")

# The same string minimises every convex energy at once.
w = simulate_wiener(T, int(T * 500), SeedSpec(8))
h = taut_string(w, TubeSpec(effective_width(r, w.dt)))
print("\nother integrands on one path:")
for phi in (PhiSpec.power(1), PhiSpec.graph_length(), PhiSpec.rho_plus(0.5), PhiSpec.exponential(1.5, r)):
    print(f"  {phi.descriptor:>12}: {energy(h, phi) / T:9.4f}   limit {integrate_against_p_inf(phi, r):9.4f}")
