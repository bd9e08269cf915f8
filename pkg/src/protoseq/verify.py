"""Property verifiers for sequence families under arbitrary cyclic shifts.

The central object is the stacked matrix: one row per family member, each
row cyclically shifted by an arbitrary amount.  Verifiers either enumerate
the whole shift space (first shift pinned to 0, since every property here
is invariant under common rotation) or sample it with a seeded generator.
Every verifier returns a VerifyReport with a reproducible counterexample
on failure.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .sequences import BinarySequence, SequenceSet, xcorr_profile

__all__ = [
    "StackedMatrix",
    "VerifyReport",
    "StateCapExceeded",
    "conflict_free_positions",
    "is_ui",
    "min_conflict_free_count",
    "max_conflict_free_gap",
    "zero_column_window",
    "window_audit",
    "xcorr_bound_audit",
    "separation_audit",
]

DEFAULT_STATE_CAP = 100_000_000
_BATCH = 1 << 14


class StateCapExceeded(ValueError):
    """Exhaustive enumeration would exceed the configured state cap."""


@dataclass(frozen=True)
class StackedMatrix:
    """Dense k-by-period matrix of independently shifted family members."""

    rows: np.ndarray
    shifts: tuple[int, ...]
    labels: tuple[str, ...]

    @classmethod
    def from_set(cls, s: SequenceSet, shifts: tuple[int, ...] | list[int]) -> "StackedMatrix":
        if len(shifts) != len(s):
            raise ValueError("one shift per member required")
        n = s.period
        rows = np.zeros((len(s), n), dtype=np.uint8)
        for i, seq in enumerate(s.sequences):
            rows[i, [(x + shifts[i]) % n for x in seq.ones]] = 1
        return cls(rows, tuple(int(t) % n for t in shifts), tuple(s.labels))


def conflict_free_positions(m: StackedMatrix, row: int) -> tuple[int, ...]:
    """Columns where the given row holds the only 1 of the whole stack."""
    colsum = m.rows.sum(axis=0)
    mask = (m.rows[row] == 1) & (colsum == 1)
    return tuple(int(i) for i in np.nonzero(mask)[0])


@dataclass
class VerifyReport:
    property: str
    mode: str
    samples: int
    seed: int | None
    verdict: str  # "holds" | "violated"
    counterexample: dict | None = None
    stats: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    @property
    def exit_code(self) -> int:
        return 0 if self.holds else 1

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
            "verdict": self.verdict,
            "counterexample": self.counterexample,
            "stats": self.stats,
        }

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


# ---------------------------------------------------------------------------
# shift-space enumeration helpers

def _char_arrays(s: SequenceSet) -> list[np.ndarray]:
    return [np.asarray(seq.ones, dtype=np.int64) for seq in s.sequences]


def _check_cap(n: int, k: int, cap: int) -> int:
    states = n ** (k - 1)
    if states > cap:
        raise StateCapExceeded(
            f"exhaustive mode needs {states} assignments (> cap {cap}); "
            f"use random mode with a seed instead"
        )
    return states


def _cover_tables(chars: list[np.ndarray], n: int) -> list[list[np.ndarray | None]]:
    # table[i][j][r] = bitmask over row i's ones covered by row j shifted by r
    k = len(chars)
    sets = [set(int(x) for x in c) for c in chars]
    out: list[list[np.ndarray | None]] = [[None] * k for _ in range(k)]
    for i in range(k):
        ci = [int(x) for x in chars[i]]
        for j in range(k):
            if i == j:
                continue
            t = np.zeros(n, dtype=np.int64)
            for bit, a in enumerate(ci):
                hits = [(a - b) % n for b in sets[j]]
                t[hits] |= 1 << bit
            out[i][j] = t
    return out


def _scan_ui_chunk(args: tuple) -> tuple[int, ...] | None:
    """Exhaustive scan of a slice of the shift space; earliest violation or None.

    Shift layout: (0, s2, …, sk); s2 restricted to [lo, hi).  The last two
    free axes are evaluated as a vectorized grid, the rest looped.
    """
    ones, n, lo, hi = args
    chars = [np.asarray(c, dtype=np.int64) for c in ones]
    k = len(chars)
    if any(c.size > 63 for c in chars):
        return _scan_ui_chunk_dense(chars, n, lo, hi)
    cov = _cover_tables(chars, n)
    full = [(1 << c.size) - 1 for c in chars]
    ar = np.arange(n)

    if k == 2:
        mask0 = cov[0][1][lo:hi]
        mask1 = cov[1][0][(-ar[lo:hi]) % n]
        fail = (mask0 == full[0]) | (mask1 == full[1])
        hit = np.nonzero(fail)[0]
        return (0, int(hit[0]) + lo) if hit.size else None

    # k >= 3: outer axes s2..s_{k-2}, grid over (s_{k-1}, s_k).  For k == 3
    # the chunk slice [lo, hi) lands on the grid's a axis, otherwise on s2.
    a_i, b_i = k - 2, k - 1  # 0-based row indices of the grid axes
    avals = ar[lo:hi] if k == 3 else ar
    REL_ab = (ar[None, :] - avals[:, None]) % n     # (s_b - s_a)
    grid_ab = cov[a_i][b_i][REL_ab]
    grid_ba = cov[b_i][a_i][(avals[:, None] - ar[None, :]) % n]
    outer_rows = list(range(1, k - 2))              # rows with looped shifts
    outer_ranges = [range(lo, hi) if r == 1 else range(n) for r in outer_rows]
    if not outer_rows:
        outer_ranges = [range(0, 1)]                # single dummy iteration

    for outer in iproduct(*outer_ranges):
        s_of = {0: 0}
        for r, v in zip(outer_rows, outer):
            s_of[r] = v
        masks = []
        for i in range(k):
            acc: np.ndarray | int = 0
            for j in range(k):
                if i == j:
                    continue
                if i in s_of and j in s_of:
                    acc = acc | int(cov[i][j][(s_of[j] - s_of[i]) % n])
                elif i in s_of and j == a_i:
                    acc = acc | cov[i][j][(avals - s_of[i]) % n][:, None]
                elif i in s_of and j == b_i:
                    acc = acc | cov[i][j][(ar - s_of[i]) % n][None, :]
                elif i == a_i and j in s_of:
                    acc = acc | cov[i][j][(s_of[j] - avals) % n][:, None]
                elif i == b_i and j in s_of:
                    acc = acc | cov[i][j][(s_of[j] - ar) % n][None, :]
                elif i == a_i and j == b_i:
                    acc = acc | grid_ab
                else:  # i == b_i and j == a_i
                    acc = acc | grid_ba
            masks.append(acc)
        fail = np.zeros((avals.size, n), dtype=bool)
        for i in range(k):
            fail |= masks[i] == full[i]
        if fail.any():
            flat = int(np.flatnonzero(fail)[0])
            ai, sb = divmod(flat, n)
            shifts = [0] * k
            for r, v in zip(outer_rows, outer):
                shifts[r] = v
            shifts[a_i], shifts[b_i] = int(avals[ai]), sb
            return tuple(shifts)
    return None


def _scan_ui_chunk_dense(chars: list[np.ndarray], n: int, lo: int, hi: int):
    # fallback for rows too heavy for 63-bit masks: per-assignment column sums
    k = len(chars)
    ranges = [range(lo, hi)] + [range(n)] * (k - 2)
    for rest in iproduct(*ranges):
        shifts = (0, *rest)
        col = np.zeros(n, dtype=np.int32)
        pos = [(c + t) % n for c, t in zip(chars, shifts)]
        for q in pos:
            col[q] += 1
        if any(int((col[q] == 1).sum()) == 0 for q in pos):
            return shifts
    return None


def _chunk_ranges(n: int, jobs: int) -> list[tuple[int, int]]:
    jobs = max(1, min(jobs, n))
    step = -(-n // jobs)
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


def is_ui(s: SequenceSet, mode: str = "exhaustive", samples: int = 100_000,
          seed: int | None = None, jobs: int = 1,
          state_cap: int = DEFAULT_STATE_CAP) -> VerifyReport:
    """Check that every member keeps a conflict-free 1 under any shifts.

    Equivalent to the stacked matrix always containing a k-by-k permutation
    submatrix.  Exhaustive mode pins the first shift to 0 and enumerates the
    remaining period^(k-1) assignments (capped); random mode samples full
    assignments from a seeded generator.  Reports the lexicographically
    earliest violating assignment (exhaustive) or the first drawn (random).
    """
    n = s.period
    k = len(s)
    chars = _char_arrays(s)
    if k == 1:
        verdict = "holds" if s.sequences[0].weight >= 1 else "violated"
        ce = None if verdict == "holds" else {"shifts": [0]}
        return VerifyReport("ui", "exhaustive", 1, None, verdict, ce,
                            {"members": 1, "period": n})

    if mode == "exhaustive":
        states = _check_cap(n, k, state_cap)
        ones = [tuple(int(x) for x in c) for c in chars]
        violation = None
        if jobs <= 1:
            violation = _scan_ui_chunk((ones, n, 0, n))
        else:
            chunks = _chunk_ranges(n, jobs)
            with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
                for res in pool.map(_scan_ui_chunk,
                                    [(ones, n, lo, hi) for lo, hi in chunks]):
                    if res is not None:
                        violation = res
                        break  # chunks are in ascending s2 order
        verdict = "holds" if violation is None else "violated"
        ce = None if violation is None else {"shifts": [int(t) for t in violation]}
        return VerifyReport("ui", "exhaustive", states, None, verdict, ce,
                            {"members": k, "period": n, "pinned_first_shift": True})

    if mode != "random":
        raise ValueError(f"mode must be 'exhaustive' or 'random', got {mode!r}")
    rng = np.random.default_rng(seed)
    done = 0
    min_cf = None
    while done < samples:
        b = min(_BATCH, samples - done)
        shifts = rng.integers(0, n, size=(b, k))
        counts = _cf_counts_batch(chars, n, shifts, range(k))
        worst = counts.min(axis=1)
        batch_min = int(worst.min())
        if min_cf is None or batch_min < min_cf:
            min_cf = batch_min
        bad = np.nonzero(worst == 0)[0]
        if bad.size:
            first = int(bad[0])
            ce = {"shifts": [int(t) for t in shifts[first]]}
            return VerifyReport("ui", "random", done + first + 1, seed, "violated",
                                ce, {"members": k, "period": n})
        done += b
    return VerifyReport("ui", "random", samples, seed, "holds", None,
                        {"members": k, "period": n,
                         "min_conflict_free_count": min_cf})


def _cf_counts_batch(chars: list[np.ndarray], n: int, shifts: np.ndarray,
                     rows: range | list[int]) -> np.ndarray:
    """Conflict-free-1 counts per (assignment, row) for a batch of shifts."""
    b = shifts.shape[0]
    col = np.zeros(b * n, dtype=np.int16)
    base = (np.arange(b) * n)[:, None]
    pos_cache = []
    for i, c in enumerate(chars):
        pos = (c[None, :] + shifts[:, i:i + 1]) % n
        pos_cache.append(pos)
        np.add.at(col, (base + pos).ravel(), 1)
    col = col.reshape(b, n)
    out = np.empty((b, len(rows)), dtype=np.int32)
    for oi, i in enumerate(rows):
        vals = np.take_along_axis(col, pos_cache[i], axis=1)
        out[:, oi] = (vals == 1).sum(axis=1)
    return out


def _cf_gaps_batch(chars: list[np.ndarray], n: int, shifts: np.ndarray,
                   rows: list[int]) -> np.ndarray:
    """Max circular gap between conflict-free 1s per (assignment, row).

    Rows with no conflict-free 1 get gap = period.
    """
    b = shifts.shape[0]
    col = np.zeros(b * n, dtype=np.int16)
    base = (np.arange(b) * n)[:, None]
    pos_cache = {}
    for i, c in enumerate(chars):
        pos = (c[None, :] + shifts[:, i:i + 1]) % n
        pos_cache[i] = pos
        np.add.at(col, (base + pos).ravel(), 1)
    col = col.reshape(b, n)
    out = np.empty((b, len(rows)), dtype=np.int64)
    for oi, i in enumerate(rows):
        pos = pos_cache[i]
        cf = np.take_along_axis(col, pos, axis=1) == 1
        for bi in range(b):
            pts = np.sort(pos[bi][cf[bi]])
            if pts.size == 0:
                out[bi, oi] = n
            elif pts.size == 1:
                out[bi, oi] = n
            else:
                d = np.diff(pts)
                wrap = int(pts[0]) + n - int(pts[-1])
                out[bi, oi] = max(int(d.max()), wrap)
    return out


def _assignment_batches(n: int, k: int, mode: str, samples: int,
                        seed: int | None, cap: int):
    """Yield (start_index, shifts_array) batches covering the requested space."""
    if mode == "exhaustive":
        total = _check_cap(n, k, cap)
        done = 0
        buf = []
        for rest in iproduct(*[range(n)] * (k - 1)):
            buf.append((0, *rest))
            if len(buf) == _BATCH:
                yield done, np.asarray(buf, dtype=np.int64)
                done += len(buf)
                buf = []
        if buf:
            yield done, np.asarray(buf, dtype=np.int64)
    elif mode == "random":
        rng = np.random.default_rng(seed)
        done = 0
        while done < samples:
            b = min(_BATCH, samples - done)
            yield done, rng.integers(0, n, size=(b, k))
            done += b
    else:
        raise ValueError(f"mode must be 'exhaustive' or 'random', got {mode!r}")


def _protected_indices(s: SequenceSet, protected_labels) -> list[int]:
    if protected_labels is None:
        labels = s.meta.get("open_labels")
        if labels is None:
            raise ValueError("protected_labels required (no open_labels in meta)")
        protected_labels = [l for l in labels if l in s.labels]
    idx = [s.labels.index(l) for l in protected_labels]
    if not idx:
        raise ValueError("no protected rows selected")
    return idx


def min_conflict_free_count(s: SequenceSet, protected_labels=None,
                            mode: str = "random", samples: int = 10_000,
                            seed: int | None = None, threshold: int | None = None,
                            state_cap: int = DEFAULT_STATE_CAP) -> VerifyReport:
    """Minimum per-period conflict-free-1 count over protected rows.

    Verdict compares the minimum against `threshold` (default: the family's
    recorded floor in meta["cf_floor"]).
    """
    if threshold is None:
        threshold = s.meta.get("cf_floor")
    if threshold is None:
        raise ValueError("threshold required (no cf_floor in meta)")
    idx = _protected_indices(s, protected_labels)
    chars = _char_arrays(s)
    n = s.period
    best = None
    total = 0
    for start, shifts in _assignment_batches(n, len(s), mode, samples, seed, state_cap):
        counts = _cf_counts_batch(chars, n, shifts, idx)
        worst = counts.min(axis=1)
        bmin = int(worst.min())
        total = start + shifts.shape[0]
        if best is None or bmin < best:
            best = bmin
        if bmin < threshold:
            first = int(np.nonzero(worst == bmin)[0][0])
            row = idx[int(np.argmin(counts[first]))]
            ce = {"shifts": [int(t) for t in shifts[first]],
                  "row": s.labels[row], "count": bmin}
            return VerifyReport("conflict_free_count", mode, start + first + 1, seed,
                                "violated", ce,
                                {"min_count": bmin, "threshold": threshold})
    return VerifyReport("conflict_free_count", mode, total, seed, "holds", None,
                        {"min_count": best, "threshold": threshold})


def max_conflict_free_gap(s: SequenceSet, protected_labels=None,
                          mode: str = "random", samples: int = 10_000,
                          seed: int | None = None, bound: int | None = None,
                          state_cap: int = DEFAULT_STATE_CAP) -> VerifyReport:
    """Largest circular gap between conflict-free 1s over protected rows.

    Verdict compares against `bound` (default meta["cf_gap_bound"]).
    """
    if bound is None:
        bound = s.meta.get("cf_gap_bound")
    if bound is None:
        raise ValueError("bound required (no cf_gap_bound in meta)")
    idx = _protected_indices(s, protected_labels)
    chars = _char_arrays(s)
    n = s.period
    worst_gap = 0
    total = 0
    for start, shifts in _assignment_batches(n, len(s), mode, samples, seed, state_cap):
        gaps = _cf_gaps_batch(chars, n, shifts, idx)
        bworst = gaps.max(axis=1)
        bmax = int(bworst.max())
        total = start + shifts.shape[0]
        if bmax > worst_gap:
            worst_gap = bmax
        if bmax > bound:
            first = int(np.nonzero(bworst == bmax)[0][0])
            row = idx[int(np.argmax(gaps[first]))]
            ce = {"shifts": [int(t) for t in shifts[first]],
                  "row": s.labels[row], "gap": bmax}
            return VerifyReport("conflict_free_gap", mode, start + first + 1, seed,
                                "violated", ce, {"max_gap": bmax, "bound": bound})
    return VerifyReport("conflict_free_gap", mode, total, seed, "holds", None,
                        {"max_gap": worst_gap, "bound": bound})


def zero_column_window(m: StackedMatrix, window: int) -> bool:
    """True iff every circular window of `window` columns has an all-zero column."""
    n = m.rows.shape[1]
    if not 1 <= window <= n:
        raise ValueError(f"window must lie in [1, period], got {window}")
    occupied = m.rows.sum(axis=0) > 0
    return int(_max_circular_run(occupied[None, :])[0]) <= window - 1


def _max_circular_run(occ: np.ndarray) -> np.ndarray:
    """Max circular run length of True per row of a boolean matrix."""
    b, n = occ.shape
    m = np.concatenate([occ, occ], axis=1).astype(np.int32)
    c = np.cumsum(m, axis=1)
    floor = np.maximum.accumulate(np.where(m == 0, c, 0), axis=1)
    runs = c - floor
    runs[m == 0] = 0
    return np.minimum(runs.max(axis=1), n)


def window_audit(s: SequenceSet, window: int | None = None, mode: str = "exhaustive",
                 samples: int = 100_000, seed: int | None = None,
                 state_cap: int = DEFAULT_STATE_CAP) -> VerifyReport:
    """zero_column_window across shift assignments of a whole family.

    Default window is 2p for families carrying meta["p"].  Exhaustive mode
    pins the first shift; random mode samples seeded assignments.
    """
    if window is None:
        p = s.meta.get("p")
        if p is None:
            raise ValueError("window required (no p in meta)")
        window = 2 * int(p)
    n = s.period
    chars = _char_arrays(s)
    longest = 0
    total = 0
    for start, shifts in _assignment_batches(n, len(s), mode, samples, seed, state_cap):
        b = shifts.shape[0]
        occ = np.zeros((b, n), dtype=bool)
        base = (np.arange(b) * n)[:, None]
        for i, c in enumerate(chars):
            pos = (c[None, :] + shifts[:, i:i + 1]) % n
            occ.ravel()[(base + pos).ravel()] = True
        runs = _max_circular_run(occ)
        bmax = int(runs.max())
        total = start + b
        if bmax > longest:
            longest = bmax
        if bmax > window - 1:
            first = int(np.nonzero(runs == bmax)[0][0])
            ce = {"shifts": [int(t) for t in shifts[first]],
                  "occupied_run": bmax, "window": window}
            return VerifyReport("zero_column_window", mode, start + first + 1, seed,
                                "violated", ce,
                                {"max_occupied_run": bmax, "window": window})
    return VerifyReport("zero_column_window", mode, total, seed, "holds", None,
                        {"max_occupied_run": longest, "window": window})


def xcorr_bound_audit(s: SequenceSet, bound: int) -> VerifyReport:
    """Exhaustive pairwise cross-correlation bound over all shifts."""
    worst = 0
    ce = None
    k = len(s)
    pairs = 0
    for i in range(k):
        for j in range(i + 1, k):
            prof = xcorr_profile(s.sequences[i], s.sequences[j])
            m = int(prof.max())
            pairs += 1
            if m > worst:
                worst = m
                if m > bound:
                    t = int(np.argmax(prof))
                    ce = {"pair": [s.labels[i], s.labels[j]], "shift": t, "value": m}
    verdict = "holds" if worst <= bound else "violated"
    return VerifyReport("xcorr_bound", "exhaustive", pairs * s.period, None,
                        verdict, ce if verdict == "violated" else None,
                        {"max_xcorr": worst, "bound": bound})


def separation_audit(s: SequenceSet, bound: int | None = None) -> VerifyReport:
    """Every member's minimum circular one-to-one spacing is >= bound.

    Default bound is meta["p"] for the families that promise it.
    """
    from .sequences import min_separation

    if bound is None:
        p = s.meta.get("p")
        if p is None:
            raise ValueError("bound required (no p in meta)")
        bound = int(p)
    worst = None
    ce = None
    for label, seq in s:
        m = min_separation(seq)
        if worst is None or m < worst:
            worst = m
            if m < bound:
                ce = {"label": label, "min_separation": m, "bound": bound}
    verdict = "holds" if worst is not None and worst >= bound else "violated"
    return VerifyReport("min_separation", "exhaustive", len(s), None, verdict,
                        ce if verdict == "violated" else None,
                        {"min_separation": worst, "bound": bound})
