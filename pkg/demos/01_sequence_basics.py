"""Tour of the core sequence type and its cyclic tools.

Run with: python3 demos/01_sequence_basics.py
"""

from protoseq import (BinarySequence, crt_map, crt_unmap, cyclic_min_distance,
                      cyclic_order, cyclic_shift, min_separation,
                      xcorr_profile)

# A sequence is a period plus the positions of its 1s.
x = BinarySequence(15, (0, 6, 12))
y = BinarySequence(15, (0, 7, 11))
print("x =", "".join(str(b) for b in x.bits()))
print("y =", "".join(str(b) for b in y.bits()))

# Cyclic shifts move the 1s; weight is invariant.
print("x shifted by 4:", cyclic_shift(x, 4).ones)

# The cross-correlation profile counts coinciding 1s at every relative shift.
prof = xcorr_profile(x, y)
print("correlation profile:", prof.tolist())
print("worst coincidence:", int(prof.max()))

# Two derived quantities the verifiers lean on:
print("cyclic min distance of {x, y}:", cyclic_min_distance([x, y]))
print("cyclic order of x:", cyclic_order(x))
print("closest pair of 1s in x (circular):", min_separation(x))

# Positions map to residue pairs when the period factors into coprime parts.
# Rotating the sequence rotates both residues at once, which is why these
# families keep their correlation promises under arbitrary shifts.
for pos in x.ones:
    print(f"position {pos:2d} -> residues {crt_map(pos, 3, 5)}")
print("and back:", [crt_unmap(crt_map(v, 3, 5), 3, 5) for v in x.ones])
