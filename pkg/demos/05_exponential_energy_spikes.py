"""
Exponential energies blow up
============================

For phi(u) = exp(1.5 r u) the limit integral is finite, yet the normalised
energy keeps spiking: now and then the path climbs r within a window of
length r**2 / (2 ln T), the pinned string has to follow, and Jensen's
inequality forces a large energy on that window.
"""
from tautstring import experiments as ex

cfg = ex.ExperimentConfig("divergence-probe", r=1.0, T_list=(10.0, 2000.0), steps_per_unit=200,
                          replicates=8, seed=5, phis=("exp:1.5",))
res = ex.run(cfg)
meta = res.metadata
print("window events:", meta["window_events.total"], "expected", meta["window_events.expected_total"])
row = res.row(2000.0, "min_jensen_ratio")
print(f"smallest window energy / Jensen bound: {row.mean:.3f}")
target = res.row(2000.0, "running_max").target
for i, m in enumerate(res.samples[(2000.0, "running_max")]):
    print(f"replicate {i}: running max {m:12.1f}  ({m / target:8.1f} x the limit integral)")
