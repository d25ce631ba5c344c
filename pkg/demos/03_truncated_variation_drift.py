"""
Truncated variation of a drifted path
=====================================

TV^r and its upward part per unit time, for W(t) - mu t, against the
closed-form limits mu coth(r mu) and mu / (exp(2 r mu) - 1).
"""
from tautstring import SeedSpec, add_drift, m_limit, q_limit, simulate_wiener, tv_trunc, utv_trunc
from tautstring.wiener import effective_width

r, T, spu = 1.0, 2000.0, 500
w = simulate_wiener(T, int(T * spu), SeedSpec(3))
width = effective_width(r, w.dt)

print(f"{'mu':>5} {'TV/T':>8} {'limit':>8} {'UTV/T':>8} {'limit':>8}")
for mu in (0.0, 0.25, 0.5, 1.0, 2.0):
    x = add_drift(w, mu)
    tv = tv_trunc(x, width).value / T
    up = utv_trunc(x, width).value / T
    print(f"{mu:>5g} {tv:>8.4f} {m_limit(mu, r):>8.4f} {up:>8.4f} {q_limit(mu, r):>8.4f}")

# A strong downward drift leaves almost no room for upward moves of size r.
