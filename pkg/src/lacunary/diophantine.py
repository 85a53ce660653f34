"""Exact counts of solutions to a n_k - b n_l = c over index boxes.

L(N, a, b) is the largest number of pairs (k, l) in {1..N}^2 sharing one
right-hand side c, with c = 0 left out when a = b (that family is just the
diagonal). Two exact engines are provided:

* ``full``: a multiset of all N^2 differences.
* ``pruned``: uses the gap ratio q = min n_{k+1}/n_k. With M = 2q/(q-1),
  pairs whose magnitudes a n_k and b n_l differ by more than a factor M are
  "far". A far pair with c > 0 has a n_k in (c, c M/(M-1)), an interval too
  short to hold two terms, so each c carries at most one far pair of each
  sign. Only near pairs (O(N log M) of them) are tabulated; far pairs are
  added back by direct lookup.

Both engines agree exactly with a brute-force double loop; the test-suite
checks this on random sequences.
"""

from __future__ import annotations

import bisect
import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .sequences import GrowthFunction, LacunarySequence, SubBlock

CSV_HEADER = ("N", "a", "b", "L", "witness_c", "g_N", "L_times_g_over_N")


@dataclass(frozen=True)
class SolutionCensus:
    a: int
    b: int
    N: int
    max_count: int
    witness_c: int | None
    excluded_zero: bool

    @property
    def L(self) -> int:
        return self.max_count


def _check(seq: LacunarySequence, N: int, a: int, b: int) -> None:
    if not 1 <= N <= len(seq):
        raise ValueError(f"N={N} out of range 1..{len(seq)}")
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive integers")


def _better(c: int, count: int, best_c, best_count: int) -> bool:
    """Larger count wins; ties go to smaller |c|, then smaller c."""
    if count != best_count:
        return count > best_count
    if best_c is None:
        return True
    return (abs(c), c) < (abs(best_c), best_c)


def _pick(counts: Iterable[tuple[int, int]]) -> tuple[int | None, int]:
    best_c, best = None, 0
    for c, n in counts:
        if n > 0 and _better(c, n, best_c, best):
            best_c, best = c, n
    return best_c, best


def _census_full(terms: Sequence[int], a: int, b: int) -> Counter:
    counts: Counter = Counter()
    bn = [b * n for n in terms]
    for n in terms:
        an = a * n
        counts.update(an - x for x in bn)
    if a == b:
        counts.pop(0, None)
    return counts


def count_for_c(seq: LacunarySequence, N: int, a: int, b: int, c: int) -> int:
    """#{(k, l) <= N : a n_k - b n_l = c}; the diagonal counts when c = 0."""
    _check(seq, N, a, b)
    terms = seq.terms[:N]
    members = set(terms)
    total = 0
    for n in terms:
        v = c + b * n
        if v > 0 and v % a == 0 and v // a in members:
            total += 1
    return total


def _pruned(terms: Sequence[int], a: int, b: int) -> tuple[int | None, int]:
    N = len(terms)
    q = min(Fraction(terms[k + 1], terms[k]) for k in range(N - 1))
    M = 2 * q / (q - 1)
    Mn, Md = M.numerator, M.denominator
    index = {n: k for k, n in enumerate(terms)}
    near: Counter = Counter()
    # candidates with a single (far) pair: smallest |c| per k and per l
    far_single: list[int] = []
    for k, n in enumerate(terms):
        an = a * n
        # near: an / M <= b n_l <= M an  <=>  an*Md <= Mn*b n_l  and  b n_l*Md <= Mn*an
        lo = bisect.bisect_left(terms, Fraction(an * Md, Mn * b))
        hi = bisect.bisect_right(terms, Fraction(Mn * an, Md * b))
        for l in range(lo, hi):
            near[an - b * terms[l]] += 1
        if lo > 0:  # far with c > 0; the largest such l gives the smallest c
            far_single.append(an - b * terms[lo - 1])
        if hi < N:  # far with c < 0; the smallest such l gives the smallest |c|
            far_single.append(an - b * terms[hi])
    if a == b:
        near.pop(0, None)

    def is_far(k_val: int, l_val: int) -> bool:
        x, y = a * k_val, b * l_val
        return x * Md > Mn * y or y * Md > Mn * x

    def far_count(c: int) -> int:
        if c == 0:
            return 0
        if c > 0:
            # a n_k in (c, c M/(M-1)) holds at most one term
            lo = bisect.bisect_right(terms, Fraction(c, a))
            if lo < N:
                nk = terms[lo]
                v = a * nk - c
                if v > 0 and v % b == 0 and v // b in index and is_far(nk, v // b):
                    return 1
            return 0
        d = -c
        lo = bisect.bisect_right(terms, Fraction(d, b))
        if lo < N:
            nl = terms[lo]
            v = b * nl - d
            if v > 0 and v % a == 0 and v // a in index and is_far(v // a, nl):
                return 1
        return 0

    best_c, best = _pick((c, n + far_count(c)) for c, n in near.items())
    if best <= 1:
        for c in far_single:
            if _better(c, 1, best_c, best):
                best_c, best = c, 1
    return best_c, best


def count_solutions(
    seq: LacunarySequence, N: int, a: int, b: int, mode: str = "pruned"
) -> SolutionCensus:
    """Exact census of a n_k - b n_l = c for 1 <= k, l <= N.

    ``mode`` is ``"pruned"`` (default) or ``"full"``; both are exact.
    """
    _check(seq, N, a, b)
    terms = seq.terms[:N]
    if mode == "full" or N < 2:
        best_c, best = _pick(_census_full(terms, a, b).items())
    elif mode == "pruned":
        best_c, best = _pruned(terms, a, b)
    else:
        raise ValueError(f"unknown census mode {mode!r}")
    return SolutionCensus(a, b, N, best, best_c, a == b)


@dataclass(frozen=True)
class ScanRow:
    N: int
    a: int
    b: int
    L: int
    witness_c: int | None
    g_N: float
    L_times_g_over_N: float


def scan_L(
    seq: LacunarySequence,
    Ns: Sequence[int],
    pairs: Sequence[tuple[int, int]],
    g: GrowthFunction | None = None,
    mode: str = "pruned",
) -> list[ScanRow]:
    """One census per (N, a, b); the last column is L g_N / N (raw constant)."""
    if list(Ns) != sorted(set(Ns)):
        raise ValueError("Ns must be strictly increasing")
    g = g or GrowthFunction()
    rows = []
    for N in Ns:
        gN = g(N)
        for a, b in pairs:
            cen = count_solutions(seq, N, a, b, mode)
            rows.append(ScanRow(N, a, b, cen.max_count, cen.witness_c, gN, cen.max_count * gN / N))
    return rows


def format_scan_csv(rows: Sequence[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            r.N, r.a, r.b, r.L, "" if r.witness_c is None else r.witness_c,
            repr(r.g_N), repr(r.L_times_g_over_N),
        ])
    return buf.getvalue()


def _as_index_list(block) -> list[int]:
    if isinstance(block, SubBlock):
        return list(block.indices())
    return list(block)


def count_cross_block(
    seq: LacunarySequence, blocks: Sequence, a: int, b: int
) -> tuple[int, int | None]:
    """sup_c sum_{r != s} #{k in block r, l in block s : a n_k - b n_l = c}.

    Blocks are 1-based index sets (or :class:`SubBlock`), each a contiguous
    run, pairwise disjoint. Returns (max count, witness c).
    """
    idx = [_as_index_list(bl) for bl in blocks]
    idx = [x for x in idx if x]
    if not idx:
        return 0, None
    seen: set[int] = set()
    for x in idx:
        if sorted(x) != list(range(min(x), max(x) + 1)):
            raise ValueError("each block must be a contiguous run of indices")
        if seen.intersection(x):
            raise ValueError("blocks overlap")
        seen.update(x)
    if max(seen) > len(seq) or min(seen) < 1:
        raise ValueError("block index out of range")
    _check(seq, 1, a, b)
    counts: Counter = Counter()
    vals = [[seq.n(k) for k in x] for x in idx]
    for r, xr in enumerate(vals):
        for s, xs in enumerate(vals):
            if r == s:
                continue
            for nk in xr:
                an = a * nk
                counts.update(an - b * nl for nl in xs)
    best_c, best = _pick(counts.items())
    return best, best_c
