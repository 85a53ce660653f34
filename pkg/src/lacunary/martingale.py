"""Martingale decomposition diagnostics for lacunary sums.

Indices 1..N are split into alternating undashed blocks D_i and short
dashed separators D_i'. F_i is generated by the dyadic intervals of length
2^-r_i with r_i = ceil(margin + log2 max_{k in D_i} n_k), F_0 is trivial,
and

    xi_i = (E[Y_i | F_i] - E[Y_i | F_{i-1}]) / (||f|| sqrt(sum_i #D_i)),

Y_i being the block sum of f(n_k x).

Grids of depth max r_i + 4 are far too large to enumerate for real
sequences, so conditional expectations are evaluated in closed form at exact
dyadic points. For a dyadic cell of length 2^-r with centre z_r(x),

    E[cos 2 pi h x | F_r](x) = sinc(h / 2^r) cos(2 pi h z_r(x)),

and averaging cell centres of level R >= r over a level-r cell multiplies
by the Dirichlet kernel D_M(h / 2^R), M = 2^(R-r). These identities give
E[xi_i | F_{i-1}] and E[xi_i^2 | F_{i-1}] pointwise. On a full grid they
agree with plain cell averages (:func:`cond_exp`); the tests check this.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dilated import DyadicPoint, TrigPolynomial, cos_sin_turns, l2_norm, required_depth
from .quadrature import dyadic_exponents, mgf_dyadic
from .sampling import SamplerConfig, sample_points, sums_at
from .sequences import LacunarySequence

_COS = TrigPolynomial((1.0,))


# --- block plan --------------------------------------------------------------


@dataclass(frozen=True)
class BlockPlan:
    N: int
    undashed_len: int
    dashed_len: int
    blocks: tuple[tuple[range, range], ...]
    resolutions: tuple[int, ...] | None
    margin: float
    eta: float | None = None  # recorded only; both range exponents are reported

    @property
    def n(self) -> int:
        return len(self.blocks)

    def undashed(self, i: int) -> range:
        """Delta_i (1-based block number, 1-based indices)."""
        return self.blocks[i - 1][0]

    def dashed(self, i: int) -> range:
        return self.blocks[i - 1][1]

    @property
    def undashed_total(self) -> int:
        return sum(len(u) for u, _ in self.blocks)

    @property
    def dashed_total(self) -> int:
        return sum(len(d) for _, d in self.blocks)

    def resolution(self, i: int) -> int:
        """r_i, with r_0 = 0 (the trivial sigma-field)."""
        if self.resolutions is None:
            raise ValueError("plan was built without a sequence; no resolutions")
        return 0 if i == 0 else self.resolutions[i - 1]

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "undashed_len": self.undashed_len,
            "dashed_len": self.dashed_len,
            "blocks": self.n,
            "undashed_total": self.undashed_total,
            "dashed_total": self.dashed_total,
            "margin_bits": self.margin,
            "resolutions": list(self.resolutions) if self.resolutions else None,
            "eta": self.eta,
            "eta_range_factors": None if self.eta is None else {
                "eta^(3/2)": self.eta**1.5, "eta^(3/4)": self.eta**0.75,
            },
        }


def _log2(n: int) -> float:
    b = n.bit_length() - 1
    if b < 1000:
        return math.log2(n)
    return b + math.log2(n / (1 << b)) if b < 1020 else b + math.log2((n >> (b - 52)) / (1 << 52))


def make_block_plan(
    N: int,
    undashed_len: int,
    dashed_len: int,
    seq: LacunarySequence | None = None,
    margin: float | None = None,
    eta: float | None = None,
) -> BlockPlan:
    """Alternating cover of 1..N; leftover indices join the final dashed block.

    ``margin`` is the number of bits of resolution beyond log2 max n_k
    (default 3 log2 N). ``eta`` is carried along for the record.
    """
    if undashed_len < 1 or dashed_len < 0:
        raise ValueError("need undashed_len >= 1 and dashed_len >= 0")
    if undashed_len + dashed_len > N:
        raise ValueError(f"block lengths {undashed_len}+{dashed_len} exceed N={N}")
    if seq is not None and N > len(seq):
        raise ValueError(f"N={N} exceeds sequence length {len(seq)}")
    step = undashed_len + dashed_len
    n = N // step
    blocks = []
    for i in range(n):
        s = i * step + 1
        u = range(s, s + undashed_len)
        d_end = N + 1 if i == n - 1 else s + step
        blocks.append((u, range(s + undashed_len, d_end)))
    if margin is None:
        margin = 3 * math.log2(N) if N > 1 else 0.0
    res = None
    if seq is not None:
        res = tuple(math.ceil(margin + _log2(seq.n(u[-1]))) for u, _ in blocks)
    return BlockPlan(N, undashed_len, dashed_len, tuple(blocks), res, float(margin), eta)


def paper_block_plan(N: int, q: float, seq: LacunarySequence | None = None) -> BlockPlan:
    """Block lengths floor((log N)^5) and floor(6 log_q N); only valid for huge N."""
    u = int(math.log(N) ** 5)
    d = int(6 * math.log(N) / math.log(q))
    return make_block_plan(N, u, d, seq)


# --- grid conditional expectation ----------------------------------------------


def cond_exp(values: np.ndarray, r: int) -> np.ndarray:
    """Replace values on a full depth-D grid by their averages over level-r cells."""
    v = np.asarray(values, dtype=np.float64)
    D = int(round(math.log2(len(v)))) if len(v) else -1
    if len(v) != 1 << max(D, 0) or D < 0:
        raise ValueError("values must cover a full dyadic grid (length 2^D)")
    if r > D:
        raise ValueError(f"grid depth {D} < resolution {r}")
    if r < 0:
        raise ValueError("resolution must be >= 0")
    cells = v.reshape(1 << r, -1)
    return np.repeat(cells.mean(axis=1), cells.shape[1])


# --- exact trigonometric factors ----------------------------------------------


def sinc_dyadic(h: int, r: int) -> float:
    """sin(pi t) / (pi t) for t = h / 2^r, with sin(pi t) reduced exactly."""
    if h == 0:
        return 1.0
    s = cos_sin_turns(h % (1 << (r + 1)), r + 1)[1]
    if s == 0.0:
        return 0.0
    try:
        t = h / (1 << r)
    except OverflowError:
        return 0.0
    return s / (math.pi * t)


def dirichlet_dyadic(m: int, R: int, r: int) -> float:
    """D_M(theta) = sin(pi M theta) / (M sin(pi theta)) at theta = m / 2^R, M = 2^(R-r)."""
    if R < r:
        raise ValueError("need R >= r")
    M = 1 << (R - r)
    if M == 1:
        return 1.0
    if m % (1 << R) == 0:
        return -1.0 if (m >> R) & 1 else 1.0
    num = cos_sin_turns(m % (1 << (r + 1)), r + 1)[1]
    den = cos_sin_turns(m % (1 << (R + 1)), R + 1)[1]
    return num / (M * den)


def cell_centres(points: Sequence[DyadicPoint], r: int) -> list[DyadicPoint]:
    """z_r(x): centre of the level-r dyadic cell containing x."""
    out = []
    for x in points:
        if x.B < r:
            raise ValueError(f"point depth {x.B} < resolution {r}")
        out.append(DyadicPoint(((x.p >> (x.B - r)) << 1) | 1, r + 1))
    return out


def _cos_sum(terms: list[int], weights: list[float], points: list[DyadicPoint]) -> np.ndarray:
    """sum_t w_t cos(2 pi m_t x) at the points (m_t >= 0 integers)."""
    if not terms:
        return np.zeros(len(points))
    return sums_at(_COS, terms, points, weights)


def _harmonic_list(f: TrigPolynomial, seq: LacunarySequence, idx: range) -> list[tuple[int, float]]:
    if not f.is_even:
        raise ValueError("only cosine polynomials are supported")
    out: dict[int, float] = defaultdict(float)
    for k in idx:
        n = seq.n(k)
        for j, c, _ in f.harmonics():
            out[j * n] += c
    return sorted(out.items())


# --- point sets ------------------------------------------------------------------


@dataclass(frozen=True)
class PointSet:
    """Evaluation points: a full grid or a stratified sample of one."""

    points: tuple[DyadicPoint, ...]
    depth: int
    full: bool

    @classmethod
    def full_grid(cls, depth: int) -> "PointSet":
        if depth > 20:
            raise ValueError("full grids beyond depth 20 are not enumerated")
        return cls(tuple(DyadicPoint(j, depth) for j in range(1 << depth)), depth, True)

    @classmethod
    def stratified(cls, cfg: SamplerConfig, depth: int) -> "PointSet":
        return cls(tuple(sample_points(cfg, depth, 0, cfg.samples)), depth, False)

    def __len__(self) -> int:
        return len(self.points)


# --- martingale differences ----------------------------------------------------


@dataclass
class XiResult:
    plan: BlockPlan
    xi: np.ndarray  # shape (n, P)
    X: np.ndarray  # partial sum X_n at each point
    undashed_sum: np.ndarray  # normalised sum over all undashed blocks
    cond_mean: np.ndarray  # E[xi_i | F_{i-1}] at each point, shape (n, P)
    bracket_terms: np.ndarray  # E[xi_i^2 | F_{i-1}], shape (n, P)
    norm: float
    points: PointSet

    @property
    def bracket(self) -> np.ndarray:
        return self.bracket_terms.sum(axis=0)

    @property
    def max_cond_mean(self) -> float:
        return float(np.max(np.abs(self.cond_mean))) if self.cond_mean.size else 0.0

    @property
    def max_deviation(self) -> float:
        """max over points of |X_n - normalised undashed sum|."""
        return float(np.max(np.abs(self.X - self.undashed_sum)))


def xi_terms(
    seq: LacunarySequence,
    f: TrigPolynomial,
    plan: BlockPlan,
    points: PointSet,
) -> XiResult:
    """xi_i, X_n and conditional moments at the given points."""
    if plan.resolutions is None:
        raise ValueError("plan needs resolutions (build it with the sequence)")
    rmax = max(plan.resolutions)
    if points.depth < rmax:
        raise ValueError(f"point depth {points.depth} < max resolution {rmax}")
    P = len(points)
    n = plan.n
    norm = l2_norm(f) * math.sqrt(plan.undashed_total)
    pts = list(points.points)
    xi = np.zeros((n, P))
    cmean = np.zeros((n, P))
    brk = np.zeros((n, P))
    undashed = np.zeros(P)
    centres: dict[int, list[DyadicPoint]] = {}

    def at(r):
        if r not in centres:
            centres[r] = cell_centres(pts, r)
        return centres[r]

    for i in range(1, n + 1):
        R, r = plan.resolution(i), plan.resolution(i - 1)
        harm = _harmonic_list(f, seq, plan.undashed(i))
        hs = [h for h, _ in harm]
        w_R = [c * sinc_dyadic(h, R) for h, c in harm]
        w_r = [c * sinc_dyadic(h, r) for h, c in harm]
        top = _cos_sum(hs, w_R, at(R))  # E[Y_i | F_i]
        low = _cos_sum(hs, w_r, at(r))  # E[Y_i | F_{i-1}]
        # E[ E[Y_i|F_i] | F_{i-1} ] through the Dirichlet kernel
        proj = _cos_sum(hs, [w * dirichlet_dyadic(h, R, r) for h, w in zip(hs, w_R)], at(r))
        # E[ E[Y_i|F_i]^2 | F_{i-1} ]
        sq: dict[int, float] = defaultdict(float)
        for a, (h1, w1) in enumerate(zip(hs, w_R)):
            for h2, w2 in zip(hs, w_R):
                for m in (h1 + h2, abs(h1 - h2)):
                    sq[m] += 0.5 * w1 * w2 * dirichlet_dyadic(m, R, r)
        ms = sorted(sq)
        second = _cos_sum(ms, [sq[m] for m in ms], at(r))
        xi[i - 1] = (top - low) / norm
        cmean[i - 1] = (proj - low) / norm
        brk[i - 1] = (second - 2 * low * proj + low * low) / norm**2
        undashed += sums_at(f, [seq.n(k) for k in plan.undashed(i)], pts)
    return XiResult(plan, xi, xi.sum(axis=0), undashed / norm, cmean, brk, norm, points)


def default_point_depth(seq: LacunarySequence, f: TrigPolynomial, plan: BlockPlan) -> int:
    """max r_i + 4, and at least the exact-evaluation depth of the undashed sums."""
    last = plan.undashed(plan.n)[-1]
    return max(max(plan.resolutions) + 4, required_depth(f, seq, last))


# --- Grama statistics -------------------------------------------------------------


@dataclass(frozen=True)
class GramaStats:
    L4: float
    N4: float
    bracket_mean: float
    bracket_min: float
    bracket_max: float
    xi_sup: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def grama_stats(res: XiResult) -> GramaStats:
    """L4 = mean sum |xi_i|^4, N4 = mean (sum E[xi_i^2|F_{i-1}] - 1)^2 over the points."""
    xi = res.xi
    L4 = float(np.mean(np.sum(xi**4, axis=0))) if xi.size else 0.0
    V = res.bracket if xi.size else np.zeros(len(res.points))
    N4 = float(np.mean((V - 1.0) ** 2))
    return GramaStats(
        L4, N4, float(V.mean()), float(V.min()), float(V.max()),
        float(np.max(np.abs(xi))) if xi.size else 0.0,
    )


# --- r_h census ----------------------------------------------------------------------


@dataclass
class RhCensus:
    r_h: dict[int, Fraction]
    r_hi: dict[tuple[int, int], Fraction]
    total_abs: Fraction = field(init=False)
    sup_abs: Fraction = field(init=False)

    def __post_init__(self):
        self.total_abs = sum((abs(v) for v in self.r_hi.values()), Fraction(0))
        self.sup_abs = max((abs(v) for v in self.r_h.values()), default=Fraction(0))

    def sup_nonzero(self) -> Fraction:
        return max((abs(v) for h, v in self.r_h.items() if h != 0), default=Fraction(0))


def rh_census(seq: LacunarySequence, f: TrigPolynomial, plan: BlockPlan, blocks=None) -> RhCensus:
    """r_{h,i}: coefficient-weighted within-block solutions of j1 n_k - j2 n_l = h, |h| <= min n.

    Coefficients are accumulated as exact rationals (floats convert exactly).
    ``blocks`` optionally restricts to a subset of block numbers.
    """
    if not f.is_even:
        raise ValueError("r_h census is defined for cosine polynomials only")
    harm = [(j, Fraction(c)) for j, c, _ in f.harmonics()]
    r_hi: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for i in range(1, plan.n + 1) if blocks is None else blocks:
        idx = plan.undashed(i)
        if len(idx) == 0:
            continue
        vals = [seq.n(k) for k in idx]
        bound = min(vals)
        for a, nk in enumerate(vals):
            for b, nl in enumerate(vals):
                for j1, c1 in harm:
                    for j2, c2 in harm:
                        if a == b and j1 == j2:
                            continue
                        h = j1 * nk - j2 * nl
                        if abs(h) <= bound:
                            r_hi[(h, i)] += c1 * c2 / 2
    r_h: dict[int, Fraction] = defaultdict(Fraction)
    for (h, _), v in r_hi.items():
        r_h[h] += v
    return RhCensus(dict(r_h), dict(r_hi))


# --- dashed-block moment generating function ------------------------------------


@dataclass(frozen=True)
class MgfCheck:
    lam: float
    lhs: float
    rhs: float
    holds: bool


def dashed_mgf_check(seq: LacunarySequence, plan: BlockPlan, lam: float, G: int = 24) -> MgfCheck:
    """int exp(lam sum_{dashed k} cos 2 pi n_k x) dx  vs  exp(lam^2/2 sum #D_i')."""
    dl = max((len(plan.dashed(i)) for i in range(1, plan.n + 1)), default=0)
    if dl > 0 and abs(lam) > 1.0 / dl:
        raise ValueError(f"|lambda|={abs(lam)} exceeds 1/#dashed block = {1.0 / dl}")
    idx = [k for i in range(1, plan.n + 1) for k in plan.dashed(i)]
    exps = dyadic_exponents([seq.n(k) for k in idx])
    lhs = mgf_dyadic(exps, lam, G) if idx else 1.0
    rhs = math.exp(lam * lam / 2 * len(idx))
    return MgfCheck(float(lam), lhs, rhs, lhs <= rhs * (1 + 1e-6))


def diagnostics(plan: BlockPlan, stats: GramaStats | None = None, res: XiResult | None = None,
                rh: RhCensus | None = None, mgf: Sequence[MgfCheck] = ()) -> dict:
    out: dict = {"plan": plan.to_dict()}
    if stats is not None:
        out["grama"] = stats.to_dict()
    if res is not None:
        out["max_cond_mean"] = res.max_cond_mean
        out["max_deviation_X_vs_sum"] = res.max_deviation
        out["points"] = len(res.points)
        out["point_depth"] = res.points.depth
        out["full_grid"] = res.points.full
    if rh is not None:
        out["rh"] = {
            "sup_abs": float(rh.sup_abs),
            "sup_abs_nonzero_h": float(rh.sup_nonzero()),
            "total_abs": float(rh.total_abs),
            "distinct_h": len(rh.r_h),
        }
    if mgf:
        out["dashed_mgf"] = [
            {"lambda": m.lam, "lhs": m.lhs, "rhs": m.rhs, "holds": m.holds} for m in mgf
        ]
    return out
