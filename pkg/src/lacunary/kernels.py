"""Numba kernels for evaluating dilated sums at many dyadic points.

Points are stored as little-endian arrays of 64-bit words holding the
numerator p of x = p / 2^B. A frequency n is passed in non-adjacent form,
n = sum_t sign_t 2^shift_t, so that

    frac(n x) = sum_t sign_t frac(2^shift_t x)  (mod 1)

where each frac(2^s x) is a 64-bit window of the bits of p. The sum is formed
in wrapping uint64 arithmetic, i.e. exactly mod 1 in units of 2^-64. Bits of
p more than 64 places below the window are dropped, so every window carries
a truncation error below 2^-64 turns (zero when the window reaches bit 0).

Random bits come from Philox4x32-10 keyed by the seed, with the counter
holding (word block, round, stratum), so each stratum has its own stream and
results do not depend on how samples are split across threads.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

MASK32 = np.uint64(0xFFFFFFFF)
PHILOX_M0 = np.uint64(0xD2511F53)
PHILOX_M1 = np.uint64(0xCD9E8D57)
PHILOX_W0 = np.uint64(0x9E3779B9)
PHILOX_W1 = np.uint64(0xBB67AE85)

TABLE_BITS = 10
_TABLE_SIZE = 1 << TABLE_BITS


def _turn_table():
    i = np.arange(_TABLE_SIZE)
    c = np.cos(2 * np.pi * i / _TABLE_SIZE)
    s = np.sin(2 * np.pi * i / _TABLE_SIZE)
    q = _TABLE_SIZE // 4
    # exact values on the axes
    c[q], c[3 * q], s[0], s[2 * q] = 0.0, 0.0, 0.0, 0.0
    c[0], c[2 * q], s[q], s[3 * q] = 1.0, -1.0, 1.0, -1.0
    return c, s


COS_TABLE, SIN_TABLE = _turn_table()
_U64_TO_TURN_RAD = 2 * math.pi / 18446744073709551616.0
_LOW_MASK = np.uint64((1 << (64 - TABLE_BITS)) - 1)
_TABLE_SHIFT = np.uint64(64 - TABLE_BITS)


@njit(inline="always")
def philox4x32(c0, c1, c2, c3, k0, k1):
    for _ in range(10):
        p0 = PHILOX_M0 * c0
        p1 = PHILOX_M1 * c2
        hi0 = p0 >> np.uint64(32)
        lo0 = p0 & MASK32
        hi1 = p1 >> np.uint64(32)
        lo1 = p1 & MASK32
        c0, c1, c2, c3 = (hi1 ^ c1 ^ k0) & MASK32, lo1, (hi0 ^ c3 ^ k1) & MASK32, lo0
        k0 = (k0 + PHILOX_W0) & MASK32
        k1 = (k1 + PHILOX_W1) & MASK32
    return c0, c1, c2, c3


@njit
def philox_block(c0, c1, c2, c3, k0, k1):
    """Single Philox4x32-10 call on uint64-held 32-bit lanes (used for known-answer tests)."""
    return philox4x32(
        np.uint64(c0), np.uint64(c1), np.uint64(c2), np.uint64(c3), np.uint64(k0), np.uint64(k1)
    )


@njit(inline="always")
def _fill_point(words, nwords, B, B0, stratum, rnd, k0, k1):
    """Random depth-B numerator in ``words`` with the stratum index in its top B0 bits."""
    j_lo = np.uint64(stratum) & MASK32
    j_hi = np.uint64(stratum) >> np.uint64(32)
    r = np.uint64(rnd)
    for blk in range((nwords + 1) // 2):
        a, b, c, d = philox4x32(np.uint64(blk), r, j_lo, j_hi, k0, k1)
        words[2 * blk] = a | (b << np.uint64(32))
        if 2 * blk + 1 < nwords:
            words[2 * blk + 1] = c | (d << np.uint64(32))
    # clear bits >= B - B0, then place the stratum index on top
    pos = B - B0
    wi = pos >> 6
    off = pos & 63
    if wi >= nwords:
        return
    if off == 0:
        words[wi] = np.uint64(0)
    else:
        words[wi] &= (np.uint64(1) << np.uint64(off)) - np.uint64(1)
    for t in range(wi + 1, nwords):
        words[t] = np.uint64(0)
    if B0 > 0:
        sv = np.uint64(stratum)
        words[wi] |= sv << np.uint64(off)
        if off != 0 and off + B0 > 64 and wi + 1 < nwords:
            words[wi + 1] |= sv >> np.uint64(64 - off)


@njit(inline="always")
def _cos_turn(u, ctab, stab):
    idx = u >> _TABLE_SHIFT
    d = float(np.int64(u & _LOW_MASK)) * _U64_TO_TURN_RAD
    d2 = d * d
    cd = 1.0 - d2 * (0.5 - d2 * (1.0 / 24.0 - d2 * (1.0 / 720.0)))
    sd = d * (1.0 - d2 * (1.0 / 6.0 - d2 * (1.0 / 120.0 - d2 * (1.0 / 5040.0))))
    return ctab[idx] * cd - stab[idx] * sd


@njit(inline="always")
def _sin_turn(u, ctab, stab):
    idx = u >> _TABLE_SHIFT
    d = float(np.int64(u & _LOW_MASK)) * _U64_TO_TURN_RAD
    d2 = d * d
    cd = 1.0 - d2 * (0.5 - d2 * (1.0 / 24.0 - d2 * (1.0 / 720.0)))
    sd = d * (1.0 - d2 * (1.0 / 6.0 - d2 * (1.0 / 120.0 - d2 * (1.0 / 5040.0))))
    return stab[idx] * cd + ctab[idx] * sd


@njit(inline="always")
def _win(buf, i, o):
    return (buf[i] >> o) | ((buf[i + 1] << np.uint64(1)) << (np.uint64(63) - o))


@njit(inline="always")
def _phase(buf, tab, k):
    """frac(n_k x) in units of 2^-64, from the padded point buffer.

    ``buf`` holds a zero word followed by the words of p and two zero words
    on top, so every window is the branch-free two-word read
    (buf[i] >> o) | (buf[i+1] << 1 << (63 - o)). Negative digits are applied
    as two's-complement via an all-ones mask. The leading digit of each term
    is stored inline; further digits are listed via ``offs``.
    """
    offs, wi0, sh0, neg0, dwi, dsh, dneg = tab
    m = neg0[k]
    acc = (_win(buf, wi0[k], sh0[k]) ^ m) - m
    for t in range(offs[k], offs[k + 1]):
        m = dneg[t]
        acc += (_win(buf, dwi[t], dsh[t]) ^ m) - m
    return acc


@njit(inline="always")
def _terms_value(acc, hj, hc, hs, has_sin, ctab, stab):
    term = 0.0
    for h in range(hj.shape[0]):
        u = acc * hj[h]
        term += hc[h] * _cos_turn(u, ctab, stab)
        if has_sin:
            term += hs[h] * _sin_turn(u, ctab, stab)
    return term


@njit(inline="always")
def _point_sum(buf, tab, weights, hj, hc, hs, has_sin, ctab, stab):
    total = 0.0
    nterms = weights.shape[0]
    if hj.shape[0] == 1 and not has_sin and hj[0] == 1:
        # single cosine: the common case, kept free of the harmonic loop
        c = hc[0]
        for k in range(nterms):
            total += weights[k] * _cos_turn(_phase(buf, tab, k), ctab, stab)
        return c * total
    for k in range(nterms):
        acc = _phase(buf, tab, k)
        total += weights[k] * _terms_value(acc, hj, hc, hs, has_sin, ctab, stab)
    return total


@njit(parallel=True, cache=True)
def stratified_sums(k0, k1, B, B0, start, count, tab, weights,
                    hj, hc, hs, has_sin, ctab, stab, out):
    """S(x_s) for sample indices start..start+count-1 of the stratified design."""
    nwords = (B + 63) // 64
    smask = (1 << B0) - 1
    for t in prange(count):
        s = start + t
        buf = np.zeros(nwords + 3, dtype=np.uint64)
        _fill_point(buf[1:nwords + 1], nwords, B, B0, s & smask, s >> B0, k0, k1)
        out[t] = _point_sum(buf, tab, weights, hj, hc, hs, has_sin, ctab, stab)


@njit(parallel=True, cache=True)
def stratified_points(k0, k1, B, B0, start, count, out):
    """Raw words of the sample points, for cross-checking against exact arithmetic."""
    nwords = out.shape[1]
    smask = (1 << B0) - 1
    for t in prange(count):
        s = start + t
        _fill_point(out[t], nwords, B, B0, s & smask, s >> B0, k0, k1)


@njit(parallel=True, cache=True)
def sums_at_points(points, tab, weights, hj, hc, hs, has_sin, ctab, stab, out):
    nwords = points.shape[1]
    for t in prange(points.shape[0]):
        buf = np.zeros(nwords + 3, dtype=np.uint64)
        buf[1:nwords + 1] = points[t]
        out[t] = _point_sum(buf, tab, weights, hj, hc, hs, has_sin, ctab, stab)


@njit(parallel=True, cache=True)
def terms_at_points(points, tab, hj, hc, hs, has_sin, ctab, stab, out):
    """Per-term values f(n_k x): out[t, k]."""
    nwords = points.shape[1]
    for t in prange(points.shape[0]):
        buf = np.zeros(nwords + 3, dtype=np.uint64)
        buf[1:nwords + 1] = points[t]
        for k in range(out.shape[1]):
            acc = _phase(buf, tab, k)
            out[t, k] = _terms_value(acc, hj, hc, hs, has_sin, ctab, stab)


def window_tables(offsets, shifts, signs, B: int):
    """Window table for depth B: (offs, wi0, sh0, neg0, dwi, dsh, dneg).

    Per term, the leading digit's word index, bit offset and sign mask are
    stored inline; remaining digits are flattened with offsets ``offs``.
    Digits with shift >= B give 2^s x = 0 mod 1 and are dropped; a term with
    no digit left points its leading window at the all-zero top word.
    With one zero word below p, the window of 2^s x starts at bit B - s of
    the padded buffer.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    shifts = np.asarray(shifts, dtype=np.int64)
    signs = np.asarray(signs, dtype=np.int64)
    nterms = len(offsets) - 1
    nwords = (B + 63) // 64
    keep = shifts < B
    cs = np.concatenate([[0], np.cumsum(keep)])
    offs = cs[offsets]
    lo = B - shifts[keep]
    wi = (lo >> 6).astype(np.int64)
    sh = (lo & 63).astype(np.uint64)
    neg = np.where(signs[keep] < 0, np.uint64(0xFFFFFFFFFFFFFFFF), np.uint64(0)).astype(np.uint64)
    has = offs[1:] > offs[:-1]
    first = np.minimum(offs[:-1], max(len(wi) - 1, 0))
    wi0 = np.where(has, wi[first] if len(wi) else 0, nwords + 1).astype(np.int64)
    sh0 = np.where(has, sh[first] if len(wi) else 0, 0).astype(np.uint64)
    neg0 = np.where(has, neg[first] if len(wi) else 0, 0).astype(np.uint64)
    # rest: every kept digit except each term's first
    is_first = np.zeros(len(wi), dtype=bool)
    is_first[offs[:-1][has]] = True
    rest = ~is_first
    cr = np.concatenate([[0], np.cumsum(rest)])
    roffs = cr[offs].astype(np.int64)
    assert len(roffs) == nterms + 1
    return (roffs, wi0, sh0, neg0, wi[rest].copy(), sh[rest].copy(), neg[rest].copy())


def int_to_words(p: int, nwords: int) -> np.ndarray:
    return np.frombuffer(p.to_bytes(nwords * 8, "little"), dtype="<u8").astype(np.uint64)


def words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(words, dtype="<u8").tobytes(), "little")
