"""Core types for periodic binary transmission sequences.

A sequence of period n is stored by its characteristic set: the sorted
0-based positions of its ones.  Position arithmetic is always mod n.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "BinarySequence",
    "SequenceSet",
    "CrtIndexPair",
    "cyclic_shift",
    "hamming_xcorr",
    "xcorr_profile",
    "cyclic_min_distance",
    "cyclic_order",
    "min_separation",
    "crt_map",
    "crt_unmap",
]


@dataclass(frozen=True)
class BinarySequence:
    """A periodic 0/1 sequence, value 1 exactly at the ones positions."""

    period: int
    ones: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.period < 1:
            raise ValueError(f"period must be >= 1, got {self.period}")
        ones = tuple(int(x) for x in self.ones)
        if any(x < 0 or x >= self.period for x in ones):
            raise ValueError("ones positions must lie in [0, period)")
        if sorted(set(ones)) != list(ones):
            raise ValueError("ones must be strictly increasing and unique")
        object.__setattr__(self, "ones", ones)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BinarySequence":
        bits = list(bits)
        return cls(len(bits), tuple(i for i, b in enumerate(bits) if b))

    @classmethod
    def from_string(cls, text: str) -> "BinarySequence":
        """Parse a dense textual form such as '01001'."""
        if not text or set(text) - {"0", "1"}:
            raise ValueError("dense form must be a nonempty string of 0s and 1s")
        return cls.from_bits(int(c) for c in text)

    @property
    def weight(self) -> int:
        return len(self.ones)

    def bits(self) -> np.ndarray:
        out = np.zeros(self.period, dtype=np.uint8)
        out[list(self.ones)] = 1
        return out

    def __getitem__(self, i: int) -> int:
        return 1 if i % self.period in set(self.ones) else 0

    def shift(self, t: int) -> "BinarySequence":
        return cyclic_shift(self, t)

    def to_json(self, label: str | None = None) -> dict:
        obj: dict = {"period": self.period, "ones": list(self.ones)}
        if label is not None:
            obj["label"] = label
        return obj

    @classmethod
    def from_json(cls, obj: dict | str) -> "BinarySequence":
        """Accepts {'period','ones'}, {'bits': '0101'}, or a bare dense string."""
        if isinstance(obj, str):
            return cls.from_string(obj)
        if "bits" in obj:
            seq = cls.from_string(obj["bits"])
            if "period" in obj and obj["period"] != seq.period:
                raise ValueError("period does not match dense form length")
            return seq
        return cls(int(obj["period"]), tuple(int(x) for x in obj["ones"]))


def cyclic_shift(x: BinarySequence, t: int) -> BinarySequence:
    """Rotate x so that each one at position i moves to (i + t) mod period."""
    n = x.period
    return BinarySequence(n, tuple(sorted((i + t) % n for i in x.ones)))


def hamming_xcorr(x: BinarySequence, y: BinarySequence, t: int) -> int:
    """Number of positions where both x and the t-shifted y hold a 1.

    Equals |ones(x) ∩ (ones(y) + t mod n)|.  x and y must share a period;
    t may be negative and is reduced mod the period.
    """
    if x.period != y.period:
        raise ValueError("sequences must share a period")
    n = x.period
    shifted = {(i + t) % n for i in y.ones}
    return sum(1 for i in x.ones if i in shifted)


def xcorr_profile(x: BinarySequence, y: BinarySequence) -> np.ndarray:
    """All-shift Hamming cross-correlation, index t -> hamming_xcorr(x, y, t)."""
    if x.period != y.period:
        raise ValueError("sequences must share a period")
    n = x.period
    a = np.asarray(x.ones, dtype=np.int64)
    b = np.asarray(y.ones, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return np.zeros(n, dtype=np.int64)
    diffs = (a[:, None] - b[None, :]) % n
    return np.bincount(diffs.ravel(), minlength=n)


def cyclic_min_distance(seqs: Sequence[BinarySequence]) -> int:
    """Minimum Hamming distance between distinct members over all cyclic shifts.

    For 0/1 words, d(x, shift_t(y)) = w(x) + w(y) - 2 * H(x,y)(t), so the
    minimum is taken over every ordered pair of distinct members and every t.
    """
    if len(seqs) < 2:
        raise ValueError("need at least two sequences")
    best = None
    for i in range(len(seqs)):
        for j in range(i + 1, len(seqs)):
            prof = xcorr_profile(seqs[i], seqs[j])
            d = seqs[i].weight + seqs[j].weight - 2 * int(prof.max())
            if best is None or d < best:
                best = d
    return int(best)


def cyclic_order(x: BinarySequence) -> int:
    """Smallest t >= 1 with shift(x, t) == x.  Always divides the period."""
    n = x.period
    ones = set(x.ones)
    for t in sorted(d for d in range(1, n + 1) if n % d == 0):
        if {(i + t) % n for i in ones} == ones:
            return t
    raise AssertionError("unreachable: t = period always fixes x")


def min_separation(x: BinarySequence) -> int:
    """Minimum circular gap between consecutive ones; requires weight >= 2."""
    if x.weight < 2:
        raise ValueError("min separation needs at least two ones")
    n = x.period
    s = list(x.ones)
    return min((s[(i + 1) % len(s)] - s[i]) % n for i in range(len(s)))


class CrtIndexPair(NamedTuple):
    row: int
    col: int


def crt_map(l: int, p: int, q: int) -> CrtIndexPair:
    """Map a position l in [0, pq) to its residue pair (l mod p, l mod q)."""
    _require_coprime(p, q)
    return CrtIndexPair(l % p, l % q)


def crt_unmap(pair: tuple[int, int], p: int, q: int) -> int:
    """Inverse of crt_map: the unique l in [0, pq) with the given residues."""
    _require_coprime(p, q)
    r, c = pair
    return (r * q * pow(q, -1, p) + c * p * pow(p, -1, q)) % (p * q)


def _require_coprime(p: int, q: int) -> None:
    import math

    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"p and q must be coprime positive integers, got ({p}, {q})")


@dataclass
class SequenceSet:
    """A labeled family of equal-period sequences plus construction metadata."""

    sequences: tuple[BinarySequence, ...]
    labels: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.sequences = tuple(self.sequences)
        self.labels = tuple(self.labels)
        if len(self.sequences) != len(self.labels):
            raise ValueError("one label per sequence required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        if not self.sequences:
            raise ValueError("empty sequence set")
        periods = {s.period for s in self.sequences}
        if len(periods) != 1:
            raise ValueError(f"members must share a period, got {sorted(periods)}")

    @property
    def period(self) -> int:
        return self.sequences[0].period

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[tuple[str, BinarySequence]]:
        return iter(zip(self.labels, self.sequences))

    def get(self, label: str) -> BinarySequence:
        try:
            return self.sequences[self.labels.index(label)]
        except ValueError:
            raise KeyError(label) from None

    def select(self, labels: Iterable[str]) -> "SequenceSet":
        """Subset preserving the given label order; meta records the parent."""
        labels = list(labels)
        seqs = tuple(self.get(l) for l in labels)
        meta = dict(self.meta)
        meta["selected_from"] = meta.get("construction")
        return SequenceSet(seqs, tuple(labels), meta)

    def to_json(self) -> dict:
        return {
            "meta": dict(self.meta),
            "sequences": [s.to_json(label=l) for l, s in self],
        }

    @classmethod
    def from_json(cls, obj: dict | list) -> "SequenceSet":
        """Accepts {'meta':…, 'sequences':[…]} or a bare array of sequences."""
        if isinstance(obj, list):
            items, meta = obj, {}
        else:
            items, meta = obj["sequences"], dict(obj.get("meta", {}))
        seqs, labels = [], []
        for i, entry in enumerate(items):
            seqs.append(BinarySequence.from_json(entry))
            if isinstance(entry, Mapping) and "label" in entry:
                labels.append(str(entry["label"]))
            else:
                labels.append(str(i))
        return cls(tuple(seqs), tuple(labels), meta)

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "SequenceSet":
        with open(path) as fh:
            return cls.from_json(json.load(fh))
