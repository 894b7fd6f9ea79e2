"""
Synthetic graphs and the force layout
=====================================

Two generators cover the common comparison baselines: Gilbert G(n, p)
noise and Price preferential attachment with its heavy-tailed in-degrees.
The Barnes-Hut force layout turns either into screen coordinates.
"""

import numpy as np

import netcontrast as nc

# Gilbert: every ordered-or-not pair appears independently with
# probability p. Expected link count for the undirected case is
# p * n * (n - 1) / 2, here 495.
gil = nc.gilbert(100, 0.1, seed=5)
print(f"gilbert(100, 0.1): {gil.l} links, "
      f"max degree {int(nc.degree(gil).values.max())}")

# Price: each new node cites c existing ones with probability proportional
# to in-degree plus attractiveness a. Citations concentrate on old nodes.
pri = nc.price(100, c=3, a=1.0, seed=5)
indeg = nc.degree(pri, mode="in").values
print(f"price(100, c=3): {pri.l} links, in-degree max {int(indeg.max())}, "
      f"median {int(np.median(indeg))}")

# The k-core signature separates the two: Gilbert cores spread out while
# Price collapses onto a single value, a classic attachment fingerprint.
for name, g in (("gilbert", gil), ("price", pri)):
    cores = nc.kcore(g).values.astype(int)
    hist = {int(v): int((cores == v).sum()) for v in sorted(set(cores))}
    print(f"{name:<8} core sizes {hist}")

# Layouts are deterministic for a given seed. Coordinates come back
# centered with unit RMS radius, ready to scale to any viewport.
pos = nc.force_layout(gil, iterations=150, seed=9)
xy = pos.xy
print(f"\nlayout: centered at {np.round(xy.mean(axis=0), 9)}, "
      f"rms radius {np.sqrt((xy ** 2).sum(axis=1).mean()):.3f}")

# Edge lists round-trip through plain text for other tools.
print("\nfirst three links of the price graph:")
for s, t in pri.edges[:3].tolist():
    print(f"  {pri.labels[s]} -> {pri.labels[t]}")
