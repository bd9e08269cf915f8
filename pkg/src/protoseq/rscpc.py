"""Constant-weight sequence codes from polynomial evaluation over GF(p).

Each codeword is a p-by-n one-per-column binary matrix flattened to a
length-pn sequence through the residue-pair correspondence.  Restricting
messages to f(x) = x + sum_{i>=2} m_i x^i and evaluating at the n powers of
an order-n element makes any nonzero cyclic shift leave the codebook, which
yields full cyclic order and pairwise cyclic distinctness.

Also here: silent-slot padding, the trivial one-slot-per-member round-robin
family, and the two parameter searches used for sizing comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from .sequences import BinarySequence, SequenceSet, crt_unmap

__all__ = [
    "RsCpcParams",
    "SelectedParams",
    "ParamSearchError",
    "vp_represent",
    "element_of_order",
    "rs_cpc",
    "pad_silent",
    "pad_set",
    "tdma_set",
    "select_params_prop1",
    "select_params_prop2",
    "length_bounds",
]


class ParamSearchError(ValueError):
    """No admissible parameters inside the search caps."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(math.isqrt(n)) + 1))


def element_of_order(n: int, p: int) -> int:
    """Smallest element of GF(p)* with multiplicative order exactly n."""
    if (p - 1) % n != 0:
        raise ValueError(f"order {n} must divide p-1 = {p - 1}")
    for a in range(2, p):
        x, k = a, 1
        while x != 1:
            x = x * a % p
            k += 1
        if k == n:
            return a
    raise ValueError(f"no element of order {n} mod {p}")  # unreachable for prime p


@dataclass(frozen=True)
class RsCpcParams:
    """Code parameters: n evaluation points, field prime p, degree bound k.

    Requires p prime, 3 <= k < n <= p, and n | p-1 so an order-n evaluation
    element exists.  alpha may pin that element; it defaults to the smallest
    one and is validated either way.
    """

    n: int
    p: int
    k: int
    alpha: int | None = None

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"field size must be prime, got {self.p}")
        if not (3 <= self.k < self.n <= self.p):
            raise ValueError(f"need 3 <= k < n <= p, got k={self.k} n={self.n} p={self.p}")
        if (self.p - 1) % self.n != 0:
            raise ValueError(f"n must divide p-1, got n={self.n} p={self.p}")
        if self.alpha is not None:
            a = self.alpha % self.p
            x, order = a, 1
            while x != 1:
                x = x * a % self.p
                order += 1
                if order > self.p:
                    raise ValueError(f"alpha={self.alpha} is not invertible mod {self.p}")
            if order != self.n:
                raise ValueError(f"alpha={self.alpha} has order {order}, need {self.n}")

    def resolved_alpha(self) -> int:
        return self.alpha if self.alpha is not None else element_of_order(self.n, self.p)


def vp_represent(j: int, p: int) -> np.ndarray:
    """Length-p unit vector with its single 1 at 0-based index j."""
    if not 0 <= j < p:
        raise ValueError(f"index must lie in [0, p), got {j}")
    e = np.zeros(p, dtype=np.uint8)
    e[j] = 1
    return e


def rs_cpc(params: RsCpcParams) -> SequenceSet:
    """All p^(k-2) codeword sequences of period n*p, constant weight n.

    Message (m_2, …, m_{k-1}) encodes f(x) = x + m_2 x² + … ; column j holds
    a single 1 in row f(alpha^j) mod p, and position l of the flattened
    sequence is the unique l ≡ row (mod p), l ≡ j (mod n).
    """
    n, p, k = params.n, params.p, params.k
    alpha = params.resolved_alpha()
    points = [pow(alpha, j, p) for j in range(n)]
    powers = [[pow(x, i, p) for i in range(k)] for x in points]
    seqs, labels = [], []
    for m in iproduct(range(p), repeat=k - 2):
        ones = []
        for j in range(n):
            row = powers[j][1]
            for i, mi in enumerate(m, start=2):
                row = (row + mi * powers[j][i]) % p
            ones.append(crt_unmap((row, j), p, n))
        seqs.append(BinarySequence(n * p, tuple(sorted(ones))))
        labels.append(",".join(map(str, m)) if m else "x")
    meta = {"construction": "rs_cpc", "n": n, "p": p, "k": k, "alpha": alpha}
    return SequenceSet(tuple(seqs), tuple(labels), meta)


def pad_silent(x: BinarySequence, delta: int) -> BinarySequence:
    """Stretch each slot to a group of delta+1 slots, transmitting in the first.

    Position i maps to (delta+1)*i in a period (delta+1)*n sequence.  The
    padding guarantees that transmissions with distinct group indices can
    never overlap once relative timing skew is below delta+1 slots.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    step = delta + 1
    return BinarySequence(step * x.period, tuple(step * i for i in x.ones))


def pad_set(s: SequenceSet, delta: int) -> SequenceSet:
    meta = dict(s.meta)
    meta.update({"padded_from": s.meta.get("construction"), "pad": delta})
    return SequenceSet(tuple(pad_silent(x, delta) for x in s.sequences), s.labels, meta)


def tdma_set(G: int, delta: int) -> SequenceSet:
    """Round-robin family: member i of G owns slot group i of a (delta+1)G frame."""
    if G < 1:
        raise ValueError("G must be >= 1")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    period = (delta + 1) * G
    seqs = tuple(BinarySequence(period, ((delta + 1) * i,)) for i in range(G))
    labels = tuple(f"t{i}" for i in range(G))
    return SequenceSet(seqs, labels, {"construction": "tdma", "G": G, "delta": delta})


@dataclass(frozen=True)
class SelectedParams:
    scheme: str
    M: int
    G: int
    delta: int
    n: int
    p: int
    k: int
    period: int


def _feasible_k(n: int, p: int, M: int, G: int, codebook_exponent_offset: int) -> int | None:
    # smallest k in [3, n) with p^(k - offset) >= G and n >= (k-1)(M-1) + 1
    k_hi = n - 1
    if M > 1:
        k_hi = min(k_hi, (n - 1) // (M - 1) + 1)
    for k in range(3, k_hi + 1):
        if p ** (k - codebook_exponent_offset) >= G:
            return k
    return None


def _search(scheme: str, M: int, G: int, delta: int, offset: int,
            frame_factor: int, p_cap: int, n_cap: int) -> SelectedParams:
    if M < 2 or G < 1 or delta < 0:
        raise ValueError(f"need M >= 2, G >= 1, delta >= 0; got M={M} G={G} delta={delta}")
    n_min = max(4, 2 * (M - 1) + 1)  # smallest n admitting k = 3
    best = None
    for p in range(max(M, 5), p_cap + 1):
        if not _is_prime(p):
            continue
        if best is not None and best[0] <= frame_factor * n_min * p:
            # period grows at least linearly in p, so no later p can win
            break
        for n in range(n_min, min(p, n_cap) + 1):
            if (p - 1) % n != 0:
                continue
            k = _feasible_k(n, p, M, G, offset)
            if k is None:
                continue
            period = frame_factor * n * p
            cand = (period, p, n, k)
            if best is None or cand[:3] < best[:3]:
                best = cand
    if best is None:
        raise ParamSearchError(
            f"{scheme}: no admissible (n, p, k) with p <= {p_cap}, n <= {n_cap} "
            f"for M={M}, G={G}, delta={delta}"
        )
    period, p, n, k = best
    return SelectedParams(scheme, M, G, delta, n, p, k, period)


def select_params_prop1(M: int, G: int, delta: int,
                        p_cap: int = 997, n_cap: int = 997) -> SelectedParams:
    """Cheapest padded-code frame: minimize (delta+1)*n*p.

    Constraints: p prime >= M, p^k >= G, n >= (k-1)(M-1)+1, n | p-1,
    3 <= k < n <= p.  Ties break toward smaller p, then smaller n.
    """
    return _search("prop1", M, G, delta, 0, delta + 1, p_cap, n_cap)


def select_params_prop2(M: int, G: int,
                        p_cap: int = 997, n_cap: int = 997) -> SelectedParams:
    """Cheapest doubled-slot frame for shift-tolerant codes: minimize 2*n*p.

    Constraints as for prop1 except the codebook requirement is
    p^(k-2) >= G (cyclically inequivalent codewords, not raw messages).
    """
    return _search("prop2", M, G, 0, 2, 2, p_cap, n_cap)


def length_bounds(M: int) -> tuple[int, int]:
    """(minimum weight, minimum period) every M-user conflict-free family obeys."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return M, -(-8 * M * M // 9)
