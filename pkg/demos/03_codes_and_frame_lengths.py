"""Reed-Solomon based schedules and the frame-length searches.

Large populations need large families. Evaluating degree-bounded
polynomials over a prime field and flattening each codeword to a binary
schedule gives p^(k-2) sequences of period n*p whose pairwise collisions
are capped at k-1 per period.
"""

from protoseq import (RsCpcParams, baseline_compare, length_bounds, pad_set,
                      rs_cpc, select_params_prop1, select_params_prop2,
                      tdma_set)

code = rs_cpc(RsCpcParams(n=5, p=11, k=3))
print(f"{len(code)} schedules, period {code.period}, "
      f"weight {code.sequences[0].weight}")
print("first three:")
for label, seq in list(code)[:3]:
    print(f"  msg {label}: {seq.ones}")

# Padding stretches each slot into 1 active + delta silent slots. That is
# what absorbs clock offsets and propagation skew later on.
padded = pad_set(code, 2)
print(f"\npadded period: {padded.period} (3x, ones land on multiples of 3)")

# Frame-length search. Scheme 1 pads a k-collision code; scheme 2 doubles
# the alphabet instead. Both must cover a population of G ids with at most
# M talkers in range.
for M, G, delta in ((3, 7, 0), (5, 37, 2)):
    s1 = select_params_prop1(M, G, delta)
    s2 = select_params_prop2(M, G)
    print(f"\nM={M} G={G} delta={delta}:")
    print(f"  padded code:   L={s1.period:4d}  (n,p,k)=({s1.n},{s1.p},{s1.k})")
    print(f"  doubled code:  L={s2.period:4d}  (n,p,k)=({s2.n},{s2.p},{s2.k})")
    print(f"  quadratic floor for any shift-tolerant scheme: {length_bounds(M)[1]}")

# The dedicated-slot baseline needs one slot per population member, so it
# only wins while the whole population could plausibly be in range.
table = baseline_compare(5, 2000, 2)
print(f"\npopulation 2000: winner is {table['winner']}")
for row in table["rows"]:
    print(f"  {row['scheme']:6s} L={row['frame_slots']}")

print("\n(dedicated slots for comparison:", tdma_set(4, 1).labels, ")")
