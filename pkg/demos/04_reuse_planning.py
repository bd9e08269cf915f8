"""Hexagonal quantization and geographic sequence reuse.

Positions quantize to hexagonal cells of radius h. Users farther apart
than 2R can safely share a schedule, so cells are colored by cosets of a
sublattice whose shortest vector is at least 2R; the number of colors is
the cluster size G.
"""

import math

from protoseq import (HexCell, PositionLogEntry, ReusePlan, cell_distance,
                      check_fermion, cluster_size, quantize)

h = 1.0

print("point (2.5, 1.1) lands in cell", quantize(2.5, 1.1, h))
print("adjacent centers are", cell_distance(HexCell(0, 0), HexCell(1, 0), h),
      "apart")

# How many sequences does a 500 m hearing radius need with 1 m cells?
G, b1, b2 = cluster_size(500.0, h)
print(f"\ncluster size for R=500, h=1: G={G} (witness {b1},{b2})")
print("shortest reuse distance:", round(math.sqrt(3.0) * math.sqrt(G), 3), "m")

# A small plan is easier to look at.
plan = ReusePlan.from_geometry(h, 1.94, labels=[f"s{i}" for i in range(7)])
print(f"\nplan with G={plan.G}: cell -> schedule")
for m in range(3):
    row = "  ".join(f"({m},{n})={plan.allocate(HexCell(m, n))}"
                    for n in range(4))
    print(" ", row)

same = [c for c in (HexCell(m, n) for m in range(-4, 5) for n in range(-4, 5))
        if plan.allocate(c) == plan.allocate(HexCell(0, 0))]
print("cells sharing schedule with (0,0):", same)
print("nearest of those:",
      min(cell_distance(HexCell(0, 0), c, h) for c in same if c != HexCell(0, 0)))

# One cell, one occupant. The exclusion audit walks a position log and
# reports any superframe where two users quantized into the same cell.
log = [
    PositionLogEntry("car-1", 0, quantize(10.0, 4.0, h)),
    PositionLogEntry("car-2", 0, quantize(13.0, 4.0, h)),
    PositionLogEntry("car-1", 1, quantize(10.4, 4.0, h)),
    PositionLogEntry("car-2", 1, quantize(10.6, 4.1, h)),  # drove too close
]
print("\nexclusion breaches:", check_fermion(log))
