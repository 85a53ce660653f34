"""Exact evaluation of dilated trigonometric polynomials at dyadic points.

A sample point is x = p / 2^B with integer p. Since every frequency is an
integer, n*x mod 1 is ((n*p) mod 2^B) / 2^B, computed with Python integers
before any floating-point work. This module is the reference path; the
vectorised sampler in :mod:`lacunary.kernels` is checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Sequence

from .sequences import LacunarySequence

GUARD_BITS = 24
HALF_PI = math.pi / 2


class DepthError(ValueError):
    """Dyadic depth too shallow to resolve the frequencies involved."""


@dataclass(frozen=True)
class TrigPolynomial:
    """f(x) = sum_j cos_coeffs[j-1] cos(2 pi j x) + sin_coeffs[j-1] sin(2 pi j x)."""

    cos_coeffs: tuple[float, ...]
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        c = tuple(float(v) for v in self.cos_coeffs)
        s = tuple(float(v) for v in self.sin_coeffs)
        d = max(len(c), len(s))
        c += (0.0,) * (d - len(c))
        s += (0.0,) * (d - len(s))
        # strip trailing zero harmonics so degree is meaningful
        while d and c[d - 1] == 0.0 and s[d - 1] == 0.0:
            d -= 1
        c, s = c[:d], s[:d]
        if d == 0:
            raise ValueError("trigonometric polynomial is identically zero")
        if any(not math.isfinite(v) for v in c + s):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "cos_coeffs", c)
        object.__setattr__(self, "sin_coeffs", s)

    @property
    def degree(self) -> int:
        return len(self.cos_coeffs)

    @property
    def is_even(self) -> bool:
        return not any(self.sin_coeffs)

    def harmonics(self) -> list[tuple[int, float, float]]:
        """Nonzero (j, c_j, s_j) triples."""
        return [
            (j + 1, c, s)
            for j, (c, s) in enumerate(zip(self.cos_coeffs, self.sin_coeffs))
            if c or s
        ]

    def abs_coeff_sum(self) -> float:
        return sum(abs(c) + abs(s) for c, s in zip(self.cos_coeffs, self.sin_coeffs))

    @classmethod
    def cosine(cls, *coeffs) -> "TrigPolynomial":
        return cls(tuple(coeffs))

    @classmethod
    def parse(cls, text: str) -> "TrigPolynomial":
        """Parse ``cos:1=1,cos:2=1`` style specs (decimal strings for coefficients)."""
        cos: dict[int, float] = {}
        sin: dict[int, float] = {}
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            head, _, val = part.partition("=")
            kind, _, j = head.partition(":")
            j = int(j)
            if j < 1:
                raise ValueError("harmonic index must be >= 1 (mean-zero f has no j=0 term)")
            target = {"cos": cos, "sin": sin}.get(kind)
            if target is None:
                raise ValueError(f"unknown term kind {kind!r}")
            target[j] = target.get(j, 0.0) + float(Decimal(val))
        d = max(list(cos) + list(sin) + [0])
        return cls(
            tuple(cos.get(j, 0.0) for j in range(1, d + 1)),
            tuple(sin.get(j, 0.0) for j in range(1, d + 1)),
        )

    def format(self) -> str:
        parts = []
        for j, c, s in self.harmonics():
            if c:
                parts.append(f"cos:{j}={c!r}")
            if s:
                parts.append(f"sin:{j}={s!r}")
        return ",".join(parts)


def erdos_fortet_f() -> TrigPolynomial:
    return TrigPolynomial((1.0, 1.0))


def dyadic_block_f(d: int) -> TrigPolynomial:
    """sum_{j=0}^{d-1} cos(2 pi 2^j x), the polynomial used with the counterexample."""
    coeffs = [0.0] * (1 << (d - 1))
    for j in range(d):
        coeffs[(1 << j) - 1] = 1.0
    return TrigPolynomial(tuple(coeffs))


def l2_norm(f: TrigPolynomial) -> float:
    return math.sqrt(
        math.fsum(c * c + s * s for c, s in zip(f.cos_coeffs, f.sin_coeffs)) / 2.0
    )


@dataclass(frozen=True)
class DyadicPoint:
    """x = p / 2^B with 0 <= p < 2^B."""

    p: int
    B: int

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("depth must be >= 1")
        if not 0 <= self.p < (1 << self.B):
            raise ValueError("numerator out of range [0, 2^B)")

    @classmethod
    def from_fraction(cls, x, B: int) -> "DyadicPoint":
        """Nearest depth-B dyadic to ``x mod 1`` (ties rounded down)."""
        x = Fraction(x) % 1
        p = (x.numerator << B) // x.denominator
        rem = (x.numerator << B) - p * x.denominator
        if 2 * rem > x.denominator:
            p += 1
        return cls(p % (1 << B), B)

    def at_depth(self, B: int) -> "DyadicPoint":
        if B < self.B:
            raise DepthError("cannot refine to a shallower depth")
        return DyadicPoint(self.p << (B - self.B), B)

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, 1 << self.B)

    def __float__(self) -> float:
        return self.p / (1 << self.B)


def frac_mul(n: int, x: DyadicPoint) -> DyadicPoint:
    """Exact fractional part of n*x at the same depth."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return DyadicPoint((n * x.p) & ((1 << x.B) - 1), x.B)


def cos_sin_turns(u: int, B: int) -> tuple[float, float]:
    """(cos 2 pi y, sin 2 pi y) for y = u / 2^B, via exact quadrant reduction."""
    u &= (1 << B) - 1
    scaled = u << 2
    quadrant = scaled >> B
    rem = scaled - (quadrant << B)
    theta = (rem / (1 << B)) * HALF_PI
    c, s = math.cos(theta), math.sin(theta)
    if quadrant == 0:
        return c, s
    if quadrant == 1:
        return -s, c
    if quadrant == 2:
        return -c, -s
    return s, -c


def eval_f(f: TrigPolynomial, x: DyadicPoint) -> float:
    mask = (1 << x.B) - 1
    total = 0.0
    for j, c, s in f.harmonics():
        cj, sj = cos_sin_turns((j * x.p) & mask, x.B)
        total += c * cj + s * sj
    return total


def required_depth(f: TrigPolynomial, seq: LacunarySequence, N: int, guard: int = GUARD_BITS) -> int:
    return (f.degree * seq.n(N)).bit_length() + guard


def eval_SN(
    f: TrigPolynomial,
    seq: LacunarySequence,
    N: int,
    x: DyadicPoint,
    guard: int = GUARD_BITS,
) -> float:
    """Unnormalised sum_{k<=N} f(n_k x)."""
    if not 1 <= N <= len(seq):
        raise ValueError(f"N={N} out of range 1..{len(seq)}")
    need = required_depth(f, seq, N, guard)
    if x.B < need:
        raise DepthError(f"depth {x.B} < required {need} (bit-length of d*n_N plus {guard} guard bits)")
    total = 0.0
    for n in seq.terms[:N]:
        total += eval_f(f, frac_mul(n, x))
    return total


def lipschitz_refinement_bound(f: TrigPolynomial, seq: LacunarySequence, N: int, B: int) -> float:
    """Bound on |S_N(x) - S_N(x')| when x, x' differ by at most 2^-B."""
    total = sum(seq.terms[:N])
    sh = max(0, total.bit_length() - 60)
    return 2 * math.pi * f.degree * math.ldexp(float(total >> sh), sh - B) * f.abs_coeff_sum()


# --- sparse signed-digit form used by the fast kernels ------------------------


def _set_bits(x: int) -> list[int]:
    s = bin(x)[:1:-1]
    return [i for i, ch in enumerate(s) if ch == "1"]


def naf(n: int) -> list[tuple[int, int]]:
    """Non-adjacent form of n >= 0 as (shift, sign) pairs, sign in {+1, -1}.

    Uses the carry identity: with h = n >> 1 and t = n + h, the digits +1 sit
    at the set bits of t & (h ^ t) and the digits -1 at those of h & (h ^ t).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    h = n >> 1
    t = n + h
    c = h ^ t
    out = [(i, 1) for i in _set_bits(t & c)] + [(i, -1) for i in _set_bits(h & c)]
    out.sort()
    return out


def digit_tables(terms: Sequence[int]):
    """Flattened NAF digits: (offsets, shifts, signs) for all terms."""
    offsets = [0]
    shifts: list[int] = []
    signs: list[int] = []
    for n in terms:
        for s, d in naf(n):
            shifts.append(s)
            signs.append(d)
        offsets.append(len(shifts))
    return offsets, shifts, signs
