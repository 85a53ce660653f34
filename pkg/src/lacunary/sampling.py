"""Stratified dyadic sampling of S_N(x) = sum_k f(n_k x).

The unit interval is cut into 2^B0 cells; round r draws one uniform depth-B
point in every cell. Sample index s maps to cell s mod 2^B0 and round
s // 2^B0, and the point's random bits depend only on (seed, round, cell),
so any chunking or thread count reproduces the same values bit for bit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator

import numba
import numpy as np

from . import kernels
from .dilated import DepthError, DyadicPoint, TrigPolynomial, digit_tables, required_depth
from .dilated import GUARD_BITS
from .sequences import LacunarySequence

SEED_MASK = (1 << 64) - 1


def set_threads(n: int | None) -> int:
    """Set the numba worker count (None: one per core); returns the value used."""
    limit = numba.config.NUMBA_NUM_THREADS
    if n is None:
        n = min(os.cpu_count() or 1, limit)
    if not 1 <= n <= limit:
        raise ValueError(f"threads={n} outside 1..{limit} (set NUMBA_NUM_THREADS before import)")
    numba.set_num_threads(n)
    return n


@dataclass(frozen=True)
class SamplerConfig:
    """Stratified design: ``rounds`` points in each of 2^strata_bits cells.

    ``depth=None`` selects the exact-reduction depth bit_length(d n_N) + guard.
    """

    seed: int
    strata_bits: int = 16
    rounds: int = 1
    depth: int | None = None
    guard_bits: int = GUARD_BITS
    threads: int | None = None
    chunk: int = 1 << 16

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed <= SEED_MASK:
            raise ValueError("seed must be an integer in [0, 2^64)")
        if not 0 <= self.strata_bits <= 40:
            raise ValueError("strata_bits must be in [0, 40]")
        if self.rounds < 1 or self.chunk < 1:
            raise ValueError("rounds and chunk must be positive")

    @property
    def samples(self) -> int:
        return self.rounds << self.strata_bits

    @classmethod
    def for_samples(cls, seed: int, samples: int, strata_bits: int = 16, **kw) -> "SamplerConfig":
        """Smallest design with at least ``samples`` points (cells shrink if samples is small)."""
        b0 = min(strata_bits, max(samples - 1, 1).bit_length())
        rounds = -(-samples // (1 << b0))
        return cls(seed, b0, rounds, **kw)

    def resolve_depth(self, f: TrigPolynomial, seq: LacunarySequence, N: int) -> int:
        need = required_depth(f, seq, N, self.guard_bits)
        B = need if self.depth is None else self.depth
        if B < need:
            raise DepthError(
                f"depth {B} < required {need} (bit-length of d*n_N plus {self.guard_bits} guard bits)"
            )
        return max(B, self.strata_bits, 1)

    def key(self) -> tuple[np.uint64, np.uint64]:
        return np.uint64(self.seed & 0xFFFFFFFF), np.uint64(self.seed >> 32)


@dataclass
class PreparedSum:
    """Window tables and harmonics for one (f, sequence prefix, depth)."""

    tab: tuple
    weights: np.ndarray
    hj: np.ndarray
    hc: np.ndarray
    hs: np.ndarray
    has_sin: bool
    B: int

    @property
    def nterms(self) -> int:
        return len(self.weights)

    @classmethod
    def build(cls, f: TrigPolynomial, terms, B: int, weights=None) -> "PreparedSum":
        tab = kernels.window_tables(*digit_tables(terms), B)
        harm = f.harmonics()
        w = np.ones(len(terms)) if weights is None else np.asarray(weights, dtype=np.float64)
        if w.shape != (len(terms),):
            raise ValueError("one weight per term required")
        return cls(
            tab, w,
            np.asarray([j for j, _, _ in harm], dtype=np.uint64),
            np.asarray([c for _, c, _ in harm], dtype=np.float64),
            np.asarray([s for _, _, s in harm], dtype=np.float64),
            not f.is_even,
            B,
        )

    def args(self) -> tuple:
        return (self.tab,)

    def fargs(self) -> tuple:
        return (self.hj, self.hc, self.hs, self.has_sin, kernels.COS_TABLE, kernels.SIN_TABLE)


def points_array(points: list[DyadicPoint]) -> tuple[np.ndarray, int]:
    if not points:
        raise ValueError("no points")
    B = points[0].B
    if any(p.B != B for p in points):
        raise ValueError("points must share one depth")
    nwords = (B + 63) // 64
    return np.stack([kernels.int_to_words(p.p, nwords) for p in points]), B


def iter_sums(
    f: TrigPolynomial,
    seq: LacunarySequence,
    N: int,
    cfg: SamplerConfig,
    weights=None,
) -> Iterator[np.ndarray]:
    """Yield chunks of unnormalised S_N values in sample-index order."""
    if not 1 <= N <= len(seq):
        raise ValueError(f"N={N} out of range 1..{len(seq)}")
    B = cfg.resolve_depth(f, seq, N)
    prep = PreparedSum.build(f, seq.terms[:N], B, weights)
    set_threads(cfg.threads)
    k0, k1 = cfg.key()
    total = cfg.samples
    for start in range(0, total, cfg.chunk):
        count = min(cfg.chunk, total - start)
        out = np.empty(count, dtype=np.float64)
        kernels.stratified_sums(
            k0, k1, B, cfg.strata_bits, start, count,
            *prep.args(), prep.weights, *prep.fargs(), out,
        )
        yield out


def sample_sums(f, seq, N, cfg: SamplerConfig, weights=None) -> np.ndarray:
    """All S_N samples as one array (for KS statistics and small runs)."""
    return np.concatenate(list(iter_sums(f, seq, N, cfg, weights)))


def sample_points(cfg: SamplerConfig, B: int, start: int, count: int) -> list[DyadicPoint]:
    """The exact dyadic points used for sample indices start..start+count-1."""
    nwords = (B + 63) // 64
    out = np.zeros((count, nwords), dtype=np.uint64)
    k0, k1 = cfg.key()
    kernels.stratified_points(k0, k1, B, cfg.strata_bits, start, count, out)
    return [DyadicPoint(kernels.words_to_int(row), B) for row in out]


def sums_at(f: TrigPolynomial, terms, points: list[DyadicPoint], weights=None) -> np.ndarray:
    """Fast-kernel S values at explicit points of a common depth."""
    if not points:
        return np.empty(0)
    arr, B = points_array(points)
    prep = PreparedSum.build(f, terms, B, weights)
    out = np.empty(len(points))
    kernels.sums_at_points(arr, *prep.args(), prep.weights, *prep.fargs(), out)
    return out


def terms_at(f: TrigPolynomial, terms, points: list[DyadicPoint]) -> np.ndarray:
    """Matrix of f(n_k x_t), shape (len(points), len(terms))."""
    arr, B = points_array(points)
    prep = PreparedSum.build(f, terms, B)
    out = np.empty((len(points), len(terms)))
    kernels.terms_at_points(arr, *prep.args(), *prep.fargs(), out)
    return out
