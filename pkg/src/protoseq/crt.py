"""Residue-pair (CRT) sequence families, products, and the expanded family.

All constructions emit a SequenceSet whose meta dict records the recipe, so
verifiers and the allocator can recover parameters without re-deriving them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .sequences import BinarySequence, SequenceSet, crt_unmap, xcorr_profile

__all__ = [
    "crt_set",
    "crt0_set",
    "product",
    "all_ones",
    "ExpandedSetSpec",
    "expanded_set",
    "select_expansion_base",
]


def _crt_member(p: int, q: int, g: int) -> BinarySequence:
    # generator g places the j-th one at the position with residues (j*g mod p, j mod q)
    ones = sorted(crt_unmap(((j * g) % p, j % q), p, q) for j in range(p))
    return BinarySequence(p * q, tuple(ones))


def _check_crt_params(p: int, q: int) -> None:
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"p and q must be coprime positive integers, got ({p}, {q})")
    if q < 2 * p - 1:
        raise ValueError(f"q must be at least 2p-1 = {2 * p - 1}, got {q}")


def crt_set(p: int, q: int) -> SequenceSet:
    """The p-member residue-pair family of period pq, generators 0..p-1.

    Member g has weight p: one 1 for each j in [0, p), placed where the
    position is congruent to j*g mod p and to j mod q.  Requires coprime
    p, q with q >= 2p-1.
    """
    _check_crt_params(p, q)
    seqs = [_crt_member(p, q, g) for g in range(p)]
    labels = [f"g{g}" for g in range(p)]
    meta = {"construction": "crt", "p": p, "q": q}
    return SequenceSet(tuple(seqs), tuple(labels), meta)


def crt0_set(p: int, q: int) -> SequenceSet:
    """Variant family with generator 1 swapped out for the q-multiples member.

    Generators {0} ∪ {2..p-1} give p-1 members; the extra member "*" holds
    its ones at the p multiples of q.  The run-of-ones generator 1 is omitted
    because its minimum separation of 1 defeats the spacing guarantees.
    """
    _check_crt_params(p, q)
    gens = [0] + list(range(2, p))
    seqs = [_crt_member(p, q, g) for g in gens]
    labels = [f"g{g}" for g in gens]
    star = sorted(crt_unmap((j % p, 0), p, q) for j in range(p))
    seqs.append(BinarySequence(p * q, tuple(star)))
    labels.append("*")
    meta = {"construction": "crt0", "p": p, "q": q}
    return SequenceSet(tuple(seqs), tuple(labels), meta)


def all_ones(length: int) -> BinarySequence:
    """Constant-one sequence of the given period."""
    if length < 1:
        raise ValueError("length must be >= 1")
    return BinarySequence(length, tuple(range(length)))


def product(x: BinarySequence, y: BinarySequence) -> BinarySequence:
    """Position-wise product sequence of coprime-period factors.

    The result has period period(x)*period(y) and holds a 1 at l exactly
    when x holds a 1 at l mod period(x) and y at l mod period(y); its weight
    is w(x)*w(y).  Shifting either factor shifts the product accordingly.
    """
    px, py = x.period, y.period
    if math.gcd(px, py) != 1:
        raise ValueError(f"factor periods must be coprime, got ({px}, {py})")
    ones = sorted(crt_unmap((a, b), px, py) for a in x.ones for b in y.ones)
    return BinarySequence(px * py, tuple(ones))


@dataclass
class ExpandedSetSpec:
    """Recipe for expanding a base family for geographic reuse.

    base_set: common-period family with bounded pairwise cross-correlation.
    p:        prime expansion factor, at most the interferer budget M.
    M:        maximum number of simultaneous interferers to protect against.
    split_labels: the p base members that get paired with the spacing family;
        defaults to the first p labels.
    n, k:     base-code parameters (columns and degree bound); read from the
        base set's meta when omitted.
    """

    base_set: SequenceSet
    p: int
    M: int
    split_labels: tuple[str, ...] = ()
    n: int | None = None
    k: int | None = None
    check_xcorr: bool = True

    def __post_init__(self) -> None:
        if not self.split_labels:
            self.split_labels = tuple(self.base_set.labels[: self.p])
        self.split_labels = tuple(self.split_labels)
        if self.n is None:
            self.n = self.base_set.meta.get("n")
        if self.k is None:
            self.k = self.base_set.meta.get("k")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(math.isqrt(n)) + 1):
        if n % d == 0:
            return False
    return True


def expanded_set(spec: ExpandedSetSpec) -> SequenceSet:
    """Blow up a base family so reuse groups stay conflict-free.

    Two tiers are produced, both of period p(2p-1) * base period:

    * tier "guard": each of the p split members is multiplied by one member
      of crt0_set(p, 2p-1), pairing by position.  These keep the spacing
      structure that guarantees periodic all-zero windows.
    * tier "open": every remaining base member is multiplied by the all-ones
      sequence of length p(2p-1).  Any selection of all guard members plus
      at most M-1 open members leaves each open member a guaranteed floor of
      p(3p-1)/2 conflict-free ones per period.

    Preconditions: p prime, p <= M, gcd(p(2p-1), base period) = 1,
    n >= (k-1)(M-1) + 1, and pairwise cross-correlation of the base <= k-1
    (audited unless check_xcorr is False).
    """
    base, p, M = spec.base_set, spec.p, spec.M
    if not _is_prime(p):
        raise ValueError(f"expansion factor p must be prime, got {p}")
    if p > M:
        raise ValueError(f"p must not exceed the interferer budget M, got p={p} M={M}")
    L = base.period
    spread = p * (2 * p - 1)
    if math.gcd(spread, L) != 1:
        raise ValueError(f"gcd(p(2p-1), base period) must be 1, got gcd({spread}, {L})")
    if spec.n is None or spec.k is None:
        raise ValueError("base code parameters n and k required (meta or explicit)")
    n, k = int(spec.n), int(spec.k)
    if n < (k - 1) * (M - 1) + 1:
        raise ValueError(f"need n >= (k-1)(M-1)+1 = {(k - 1) * (M - 1) + 1}, got n={n}")
    if len(spec.split_labels) != p or len(set(spec.split_labels)) != p:
        raise ValueError(f"split_labels must name {p} distinct members")
    for lab in spec.split_labels:
        base.get(lab)  # raises KeyError if absent
    if spec.check_xcorr:
        bound = k - 1
        seqs = base.sequences
        for i in range(len(seqs)):
            for j in range(i + 1, len(seqs)):
                worst = int(xcorr_profile(seqs[i], seqs[j]).max())
                if worst > bound:
                    raise ValueError(
                        f"base pair ({base.labels[i]}, {base.labels[j]}) has "
                        f"cross-correlation {worst} > k-1 = {bound}"
                    )

    spacing = crt0_set(p, 2 * p - 1)
    ones_seq = all_ones(spread)
    guard_labels, open_labels, seqs, labels = [], [], [], []
    for (clabel, cseq), slabel in zip(spacing, spec.split_labels):
        lab = f"{clabel}*{slabel}"
        seqs.append(product(cseq, base.get(slabel)))
        labels.append(lab)
        guard_labels.append(lab)
    for lab in base.labels:
        if lab in spec.split_labels:
            continue
        out = f"U*{lab}"
        seqs.append(product(ones_seq, base.get(lab)))
        labels.append(out)
        open_labels.append(out)

    meta = {
        "construction": "expanded",
        "p": p,
        "M": M,
        "n": n,
        "k": k,
        "base_period": L,
        "split_labels": list(spec.split_labels),
        "guard_labels": guard_labels,
        "open_labels": open_labels,
        "cf_floor": p * (3 * p - 1) // 2,
        "cf_gap_bound": 2 * p * L,
        "base_meta": dict(base.meta),
    }
    if "q" in base.meta:
        meta["q"] = base.meta["q"]
    return SequenceSet(tuple(seqs), tuple(labels), meta)


def select_expansion_base(p: int, M: int, k: int = 3, field_cap: int = 997) -> tuple[int, int, int]:
    """Smallest-period base-code triple (n, field, k) compatible with expansion.

    Searches field primes up to field_cap for divisors n of field-1 with
    n >= (k-1)(M-1)+1, k < n <= field, and gcd(p(2p-1), n*field) = 1,
    minimizing the base period n*field (ties: smaller field, then smaller n).
    """
    spread = p * (2 * p - 1)
    n_min = (k - 1) * (M - 1) + 1
    best = None
    for f in range(3, field_cap + 1):
        if not _is_prime(f):
            continue
        for n in range(max(n_min, k + 1), f):
            if (f - 1) % n != 0 or math.gcd(spread, n * f) != 1:
                continue
            cand = (n * f, f, n)
            if best is None or cand < best:
                best = cand
    if best is None:
        raise ValueError(
            f"no feasible base triple with k={k}, M={M}, p={p} and field <= {field_cap}"
        )
    return (best[2], best[1], k)
