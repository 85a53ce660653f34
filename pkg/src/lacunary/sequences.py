"""Lacunary integer sequences: generators, gap certification and file I/O.

All terms are Python integers, so sequences with terms of several thousand
bits are handled exactly. Ratios are reported as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

PROVENANCES = ("geometric", "pow2", "erdos-fortet", "theoremB", "custom")

# Default cap on the largest exponent used by gen_theoremB (bits per term).
DEFAULT_BIT_BUDGET = 1 << 22
DEFAULT_TERM_BUDGET = 1 << 20


class SequenceError(ValueError):
    pass


class BitBudgetError(SequenceError):
    """A construction would need terms larger than the configured budget."""

    def __init__(self, i: int, needed_bits: float, budget: int, detail: str = "",
                 paper_tower: bool = True):
        self.i = i
        self.needed_bits = needed_bits
        self.budget = budget
        msg = (
            f"block i={i} needs terms of about {needed_bits:.4g} bits, "
            f"over the budget of {budget} bits"
        )
        if detail:
            msg += f"; {detail}"
        if paper_tower:
            msg += (
                "; the exact tower 2^(2^(2^(2^i))) is physically infeasible for i >= 3 "
                "(2^(2^256) has more digits than atoms in the universe), use the "
                "desk-scale tower instead"
            )
        super().__init__(msg)


def as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, float):
        return Fraction(repr(q))
    return Fraction(q)


@dataclass(frozen=True)
class SubBlock:
    """Indices ``start..stop`` (1-based, inclusive) forming Delta_i^(m)."""

    i: int
    m: int
    start: int
    stop: int

    def __len__(self) -> int:
        return self.stop - self.start + 1

    def indices(self) -> range:
        return range(self.start, self.stop + 1)


@dataclass(frozen=True)
class LacunarySequence:
    """Strictly increasing positive integers n_1 < n_2 < ...

    ``terms[0]`` is n_1. ``declared_gap_q``, when given, is certified on
    construction: n_{k+1}/n_k >= q for every k >= ``burn_in`` (1-based).
    """

    terms: tuple[int, ...]
    declared_gap_q: Fraction | None = None
    provenance: str = "custom"
    burn_in: int = 1
    sub_blocks: tuple[SubBlock, ...] = field(default=(), compare=False)

    def __post_init__(self):
        terms = tuple(int(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        if self.provenance not in PROVENANCES:
            raise SequenceError(f"unknown provenance {self.provenance!r}")
        if not terms:
            raise SequenceError("empty sequence")
        if terms[0] < 1:
            raise SequenceError("terms must be >= 1")
        for k in range(len(terms) - 1):
            if terms[k + 1] <= terms[k]:
                raise SequenceError(f"terms not strictly increasing at k={k + 1}")
        if self.declared_gap_q is not None:
            q = as_fraction(self.declared_gap_q)
            object.__setattr__(self, "declared_gap_q", q)
            if q <= 1:
                raise SequenceError("declared gap must exceed 1")
            for k in range(max(self.burn_in, 1), len(terms)):
                if terms[k] * q.denominator < q.numerator * terms[k - 1]:
                    raise SequenceError(
                        f"declared gap {q} violated at k={k}: "
                        f"{Fraction(terms[k], terms[k - 1])}"
                    )

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, k):
        return self.terms[k]

    def n(self, k: int) -> int:
        """n_k with the 1-based indexing used throughout."""
        if not 1 <= k <= len(self.terms):
            raise IndexError(k)
        return self.terms[k - 1]

    def head(self, N: int) -> "LacunarySequence":
        if not 1 <= N <= len(self.terms):
            raise SequenceError(f"N={N} out of range 1..{len(self.terms)}")
        blocks = tuple(b for b in self.sub_blocks if b.stop <= N)
        return LacunarySequence(
            self.terms[:N], self.declared_gap_q, self.provenance, self.burn_in, blocks
        )

    def is_dyadic(self) -> bool:
        """True when every term is a power of two."""
        return all(t & (t - 1) == 0 for t in self.terms)


# --- growth functions --------------------------------------------------------


@dataclass(frozen=True)
class GrowthFunction:
    """g_N in one of a few closed forms, or a lookup table.

    kinds: ``power`` (N**alpha), ``log-power`` ((log N)**beta),
    ``iterated-log`` (log log N) and ``table`` (explicit values).
    """

    kind: str = "power"
    param: Fraction | float = Fraction(1, 2)
    table: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("power", "log-power", "iterated-log", "table"):
            raise ValueError(f"unknown growth kind {self.kind!r}")
        if self.kind == "power":
            object.__setattr__(self, "param", as_fraction(self.param))

    @classmethod
    def parse(cls, spec: str) -> "GrowthFunction":
        """Parse ``sqrt``, ``identity``, ``power:1/3``, ``logpow:2``, ``loglog``."""
        spec = spec.strip()
        if spec == "sqrt":
            return cls("power", Fraction(1, 2))
        if spec in ("identity", "N"):
            return cls("power", Fraction(1))
        if spec == "loglog":
            return cls("iterated-log", 0.0)
        kind, _, arg = spec.partition(":")
        if kind == "power":
            return cls("power", Fraction(arg))
        if kind in ("logpow", "log-power"):
            return cls("log-power", float(arg))
        raise ValueError(f"cannot parse growth spec {spec!r}")

    def describe(self) -> str:
        if self.kind == "power":
            return f"power:{self.param}"
        if self.kind == "log-power":
            return f"logpow:{self.param}"
        if self.kind == "iterated-log":
            return "loglog"
        return "table"

    def __call__(self, N: int) -> float:
        if N < 1:
            raise ValueError("g_N needs N >= 1")
        if self.kind == "power":
            return float(N) ** float(self.param)
        if self.kind == "log-power":
            return math.log(N) ** float(self.param) if N > 1 else 0.0
        if self.kind == "iterated-log":
            return math.log(math.log(N)) if N > math.e else 0.0
        lookup = dict(self.table)
        if N not in lookup:
            raise KeyError(f"growth table has no entry for N={N}")
        return float(lookup[N])

    def ceil(self, N: int) -> int:
        """Exact ceiling of g_N (exact for rational powers)."""
        if self.kind == "power":
            p, q = self.param.numerator, self.param.denominator
            target = N**p
            # smallest m with m**q >= N**p
            m = max(1, int(round(float(N) ** (p / q))))
            while m**q < target:
                m += 1
            while m > 1 and (m - 1) ** q >= target:
                m -= 1
            return m
        return math.ceil(self(N))

    def check(self, Ns: Iterable[int]) -> None:
        """Validate 1 <= g_N <= N and monotonicity of g_N and N/g_N on ``Ns``."""
        Ns = sorted(set(Ns))
        prev = None
        for N in Ns:
            g = self(N)
            if not 1 <= g <= N:
                raise ValueError(f"g_N={g} outside [1, N] at N={N}")
            if prev is not None:
                pN, pg = prev
                if g < pg or N / g < pN / pg:
                    raise ValueError(f"g_N or N/g_N decreases between N={pN} and N={N}")
            prev = (N, g)


# --- construction plan for the counterexample ---------------------------------


def paper_tower(i: int) -> int:
    """T(i) = 2^(2^(2^i)); the term factor is 2^T(i)."""
    return 2 ** (2 ** (2**i))


def paper_tower_log2(i: int) -> float:
    return float(2 ** (2**i)) if i < 6 else math.inf


def desk_tower(i: int) -> int:
    return 4 ** (i + 2)


def desk_tower_log2(i: int) -> float:
    return 2.0 * (i + 2)


def paper_block_start(i: int) -> int:
    """First index of Delta_i = {2^(3^i - 1), ..., 2^(3^(i+1) - 1) - 1}."""
    return 2 ** (3**i - 1)


def desk_block_start(i: int) -> int:
    """First index of the desk-scale block {8^i, ..., 8^(i+1) - 1}."""
    return 8**i


@dataclass(frozen=True)
class ConstructionPlan:
    """Parameters of the sequence n_k = 2^T(i) (2^(k + i m) + m), k in Delta_i^(m)."""

    growth: GrowthFunction = GrowthFunction()
    block_index_bound: int = 2
    tower: Callable[[int], int] = desk_tower
    tower_log2: Callable[[int], float] = desk_tower_log2
    block_start: Callable[[int], int] = desk_block_start
    bit_budget: int = DEFAULT_BIT_BUDGET
    term_budget: int = DEFAULT_TERM_BUDGET
    name: str = "desk"

    @classmethod
    def paper(cls, growth: GrowthFunction = GrowthFunction(), I: int = 1, **kw):
        return cls(growth, I, paper_tower, paper_tower_log2, paper_block_start, name="paper", **kw)

    @classmethod
    def desk(cls, growth: GrowthFunction = GrowthFunction(), I: int = 2, **kw):
        return cls(growth, I, desk_tower, desk_tower_log2, desk_block_start, name="desk", **kw)

    def block(self, i: int) -> range:
        return range(self.block_start(i), self.block_start(i + 1))

    def block_max(self, i: int) -> int:
        """N_i = max Delta_i."""
        return self.block_start(i + 1) - 1

    def M(self, i: int) -> int:
        size = len(self.block(i))
        m = self.growth.ceil(size)
        if not 1 <= m <= size:
            raise SequenceError(f"M({i})={m} outside [1, #Delta_{i}={size}]")
        return m

    def sub_blocks(self, i: int) -> list[SubBlock]:
        """Split Delta_i into M(i) consecutive runs; the first (#Delta_i mod M) get one extra."""
        blk = self.block(i)
        M = self.M(i)
        base, extra = divmod(len(blk), M)
        out = []
        start = blk.start
        for m in range(1, M + 1):
            size = base + (1 if m <= extra else 0)
            out.append(SubBlock(i, m, start, start + size - 1))
            start += size
        return out

    def validate(self) -> None:
        I = self.block_index_bound
        if I < 0:
            raise SequenceError("block index bound must be >= 0")
        if self.block_start(0) != 1:
            raise SequenceError("Delta_0 must start at index 1")
        for i in range(I + 1):
            if self.block_start(i + 1) <= self.block_start(i):
                raise SequenceError(f"blocks not increasing at i={i}")
            if i < I and self.tower_log2(i + 1) <= self.tower_log2(i):
                raise SequenceError(f"tower not strictly increasing at i={i}")

    def check_budget(self) -> None:
        I = self.block_index_bound
        paper = self.name == "paper"
        for i in range(I + 1):
            t2 = self.tower_log2(i)
            if t2 > math.log2(self.bit_budget):
                raise BitBudgetError(i, 2.0**t2 if t2 < 1000 else math.inf, self.bit_budget,
                                     paper_tower=paper)
            if self.block_max(i) > self.term_budget:
                raise BitBudgetError(
                    i,
                    self.tower(i) + self.block_max(i),
                    self.bit_budget,
                    f"Delta_{i} ends at index {self.block_max(i)}, over the term budget "
                    f"{self.term_budget}",
                    paper_tower=paper,
                )
            bits = self.tower(i) + self.block_max(i) + i * self.M(i) + 1
            if bits > self.bit_budget:
                raise BitBudgetError(i, bits, self.bit_budget, paper_tower=paper)


# --- generators ----------------------------------------------------------------


def gen_geometric(q, N: int) -> LacunarySequence:
    """n_1 = 1, n_{k+1} = max(ceil(q n_k), n_k + 1)."""
    q = as_fraction(q)
    if q <= 1:
        raise SequenceError(f"growth factor q={q} must exceed 1")
    if N < 1:
        raise SequenceError("N must be >= 1")
    terms = [1]
    for _ in range(N - 1):
        n = terms[-1]
        nxt = -((-n * q.numerator) // q.denominator)
        terms.append(max(nxt, n + 1))
    return LacunarySequence(tuple(terms), q, "geometric")


def gen_erdos_fortet(N: int) -> LacunarySequence:
    """n_k = 2^k - 1."""
    if N < 1:
        raise SequenceError("N must be >= 1")
    return LacunarySequence(tuple((1 << k) - 1 for k in range(1, N + 1)), None, "erdos-fortet")


def gen_pow2(N: int) -> LacunarySequence:
    """n_k = 2^k."""
    if N < 1:
        raise SequenceError("N must be >= 1")
    return LacunarySequence(tuple(1 << k for k in range(1, N + 1)), Fraction(2), "pow2")


def gen_theoremB(plan: ConstructionPlan, I: int | None = None) -> LacunarySequence:
    """Terms n_k = 2^T(i) (2^(k + i m) + m) for k in Delta_i^(m), i = 0..I."""
    if I is None:
        I = plan.block_index_bound
    if I != plan.block_index_bound:
        plan = ConstructionPlan(
            plan.growth, I, plan.tower, plan.tower_log2, plan.block_start,
            plan.bit_budget, plan.term_budget, plan.name,
        )
    plan.validate()
    plan.check_budget()
    terms: list[int] = []
    blocks: list[SubBlock] = []
    for i in range(I + 1):
        factor_exp = plan.tower(i)
        for sb in plan.sub_blocks(i):
            m = sb.m
            for k in sb.indices():
                terms.append(((1 << (k + i * m)) + m) << factor_exp)
            blocks.append(sb)
    return LacunarySequence(tuple(terms), None, "theoremB", 1, tuple(blocks))


# --- gap certification ------------------------------------------------------------


@dataclass(frozen=True)
class GapReport:
    min_ratio: Fraction
    argmin: int  # k (1-based) with n_{k+1}/n_k minimal
    last_ratio: Fraction
    burn_in: int

    def ratios_trend(self) -> str:
        return f"min {float(self.min_ratio):.6g} at k={self.argmin}, last {float(self.last_ratio):.6g}"


def ratios(seq: LacunarySequence) -> list[Fraction]:
    t = seq.terms
    return [Fraction(t[k + 1], t[k]) for k in range(len(t) - 1)]


def verify_gap(seq: LacunarySequence, burn_in: int = 1) -> GapReport:
    """Exact min over k >= burn_in of n_{k+1}/n_k, plus the last ratio."""
    t = seq.terms
    if len(t) < 2:
        raise SequenceError("need at least two terms")
    if not 1 <= burn_in <= len(t) - 1:
        raise SequenceError(f"burn_in={burn_in} out of range")
    best = None
    arg = burn_in
    for k in range(burn_in, len(t)):
        r = Fraction(t[k], t[k - 1])
        if best is None or r < best:
            best, arg = r, k
    return GapReport(best, arg, Fraction(t[-1], t[-2]), burn_in)


@dataclass(frozen=True)
class BlockRatioReport:
    """Exact ratios of a block-structured sequence, split by sub-block membership.

    ``burn_in`` is the smallest k such that every within-sub-block ratio
    n_{k'+1}/n_{k'} with k' >= k lies in [2(1 - tol), 2(1 + tol)].
    ``cross_min_scaled`` is min over sub-block boundaries of n_{k+1}/(n_k 2^(i+1)),
    with i the block holding n_k.
    """

    tol: Fraction
    burn_in: int
    within_min: Fraction
    within_max: Fraction
    cross_min_scaled: Fraction
    cross_argmin: int

    def within_ok(self) -> bool:
        lo, hi = 2 * (1 - self.tol), 2 * (1 + self.tol)
        return lo <= self.within_min and self.within_max <= hi

    def to_dict(self) -> dict:
        return {
            "tol": float(self.tol), "burn_in": self.burn_in,
            "within_min": float(self.within_min), "within_max": float(self.within_max),
            "cross_min_scaled": float(self.cross_min_scaled), "cross_argmin": self.cross_argmin,
        }


def block_ratio_report(seq: LacunarySequence, tol=Fraction(1, 100)) -> BlockRatioReport:
    """Within- and cross-sub-block ratios of a sequence that carries sub-blocks."""
    if not seq.sub_blocks:
        raise SequenceError("sequence carries no sub-block structure")
    tol = as_fraction(tol)
    lo, hi = 2 * (1 - tol), 2 * (1 + tol)
    owner = {}
    for sb in seq.sub_blocks:
        for k in sb.indices():
            owner[k] = sb
    t = seq.terms
    within = []  # (k, ratio) for consecutive pairs inside one sub-block
    cross_min, cross_arg = None, 0
    for k in range(1, len(t)):
        r = Fraction(t[k], t[k - 1])
        a, b = owner[k], owner[k + 1]
        if a is b:
            within.append((k, r))
        else:
            scaled = r / (1 << (a.i + 1))
            if cross_min is None or scaled < cross_min:
                cross_min, cross_arg = scaled, k
    burn_in = 1
    for k, r in within:
        if not lo <= r <= hi:
            burn_in = k + 1
    kept = [r for k, r in within if k >= burn_in]
    return BlockRatioReport(
        tol, burn_in,
        min(kept, default=Fraction(2)), max(kept, default=Fraction(2)),
        cross_min if cross_min is not None else Fraction(0), cross_arg,
    )


def min_gap(seq: LacunarySequence) -> Fraction:
    return verify_gap(seq, 1).min_ratio if len(seq) > 1 else Fraction(2)


# --- "lacuseq v1" files ---------------------------------------------------------


def format_lacuseq(seq: LacunarySequence) -> str:
    q = "none" if seq.declared_gap_q is None else str(seq.declared_gap_q)
    lines = [f"# lacuseq v1 provenance={seq.provenance} q={q}"]
    lines.extend(str(t) for t in seq.terms)
    return "\n".join(lines) + "\n"


def parse_lacuseq(text: str) -> LacunarySequence:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# lacuseq v1"):
        raise SequenceError("missing '# lacuseq v1' header")
    meta = dict(tok.split("=", 1) for tok in lines[0].split()[3:] if "=" in tok)
    q = meta.get("q", "none")
    return LacunarySequence(
        tuple(int(ln) for ln in lines[1:]),
        None if q == "none" else Fraction(q),
        meta.get("provenance", "custom"),
    )


def write_lacuseq(seq: LacunarySequence, path) -> None:
    Path(path).write_text(format_lacuseq(seq))


def read_lacuseq(path) -> LacunarySequence:
    return parse_lacuseq(Path(path).read_text())


def parse_sequence_spec(spec: str, plan: ConstructionPlan | None = None) -> LacunarySequence:
    """``pow2:N``, ``erdos-fortet:N``, ``geometric:q:N``, ``theoremB:I`` or ``file:PATH``."""
    kind, _, rest = spec.partition(":")
    if kind == "pow2":
        return gen_pow2(int(rest))
    if kind in ("erdos-fortet", "ef"):
        return gen_erdos_fortet(int(rest))
    if kind == "geometric":
        q, _, n = rest.rpartition(":")
        return gen_geometric(Fraction(q), int(n))
    if kind == "theoremB":
        plan = plan or ConstructionPlan.desk()
        return gen_theoremB(plan, int(rest) if rest else None)
    if kind == "file":
        return read_lacuseq(rest)
    raise SequenceError(f"cannot parse sequence spec {spec!r}")


def cumulative_sizes(blocks: Sequence[SubBlock]) -> list[int]:
    return [b.stop for b in blocks]
