"""Tail probabilities of S_N against the normal tail.

``normal_tail`` is computed from the complementary error function: an
all-positive series for erf below the crossover (no cancellation inside the
sum) and a continued fraction for erfc above it, so the relative error stays
near machine precision where the tail is small.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from .dilated import TrigPolynomial, l2_norm
from .sampling import SamplerConfig, iter_sums, sample_sums
from .sequences import GrowthFunction, LacunarySequence

T_LIMIT = 40.0
# erfc(x) for x = t / sqrt(2) >= ERFC_SWITCH uses the continued fraction
ERFC_SWITCH = 2.0
_SQRT_PI = math.sqrt(math.pi)
_SPLIT = 134217729.0  # 2^27 + 1

CSV_HEADER = ("t", "threshold_abs", "p_hat", "ci_low", "ci_high", "normal_tail", "ratio", "samples", "seed")


def _exp_neg_half_square(t: float) -> float:
    """exp(-t^2 / 2) with t^2 split exactly into hi + lo (Dekker)."""
    hi = t * t
    a = _SPLIT * t
    th = a - (a - t)
    tl = t - th
    lo = ((th * th - hi) + 2 * th * tl) + tl * tl
    return math.exp(-0.5 * hi) * (1.0 - 0.5 * lo)


def _erf_series(x: float, e: float) -> float:
    """erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!  (all terms positive)."""
    x2 = 2.0 * x * x
    term = x
    total = x
    n = 0
    while term > 1e-17 * total:
        term *= x2 / (2 * n + 3)
        total += term
        n += 1
    return 2.0 / _SQRT_PI * e * total


def _erfc_cf(x: float, e: float) -> float:
    """erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + (2/2)/(x + ...))), modified Lentz."""
    tiny = 1e-300
    f = x
    C = x
    D = 0.0
    for i in range(1, 5000):
        a = 0.5 * i
        D = x + a * D
        D = tiny if D == 0 else D
        C = x + a / C
        C = tiny if C == 0 else C
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return e / _SQRT_PI / f


def normal_tail(t: float) -> float:
    """1 - Phi(t) for t in [-40, 40]; underflows to 0.0 beyond t ~ 38.5."""
    t = float(t)
    if not -T_LIMIT <= t <= T_LIMIT:
        raise ValueError(f"t={t} outside [-{T_LIMIT}, {T_LIMIT}]")
    a = abs(t)
    x = a / math.sqrt(2.0)
    e = _exp_neg_half_square(a)
    if x < ERFC_SWITCH:
        erf = _erf_series(x, e)
        upper = 0.5 * (1.0 - erf)
        lower = 0.5 * (1.0 + erf)
    else:
        upper = 0.5 * _erfc_cf(x, e)
        lower = 1.0 - upper
    return upper if t >= 0 else lower


def normal_cdf(x) -> np.ndarray:
    """Vectorised Phi, used as the reference in KS statistics."""
    return special.ndtr(np.asarray(x, dtype=np.float64))


def clopper_pearson(k: int, n: int, level: float = 0.99) -> tuple[float, float]:
    """Exact binomial interval for k successes in n trials."""
    if not 0 <= k <= n or n < 1:
        raise ValueError("need 0 <= k <= n, n >= 1")
    alpha = 1.0 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


@dataclass(frozen=True)
class TailEstimate:
    thresholds: tuple[float, ...]
    counts: tuple[int, ...]
    samples: int
    level: float

    @property
    def p_hat(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.float64) / self.samples

    def ci(self) -> list[tuple[float, float]]:
        return [clopper_pearson(k, self.samples, self.level) for k in self.counts]

    def std_err(self) -> np.ndarray:
        p = self.p_hat
        return np.sqrt(p * (1 - p) / self.samples)


def exceedance_counts(values_iter, thresholds: Sequence[float]) -> tuple[list[int], int]:
    """Integer counts of values >= tau for each threshold, streamed over chunks."""
    th = np.asarray(thresholds, dtype=np.float64)
    counts = np.zeros(len(th), dtype=np.int64)
    n = 0
    for chunk in values_iter:
        s = np.sort(chunk)
        counts += len(s) - np.searchsorted(s, th, side="left")
        n += len(s)
    return [int(c) for c in counts], n


def estimate_tail(
    seq: LacunarySequence,
    f: TrigPolynomial,
    N: int,
    thresholds: Sequence[float],
    sampler: SamplerConfig,
    level: float = 0.99,
) -> TailEstimate:
    """P[S_N >= tau] for each absolute threshold tau (unnormalised S_N)."""
    counts, n = exceedance_counts(iter_sums(f, seq, N, sampler), thresholds)
    return TailEstimate(tuple(float(x) for x in thresholds), tuple(counts), n, level)


@dataclass
class TailScan:
    t_grid: list[float]
    threshold_abs: list[float]
    p_hat: list[float]
    ci_low: list[float]
    ci_high: list[float]
    normal_tail: list[float]
    ratio: list[float]
    samples: int
    seed: int
    normalization: float
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t_grid)

    def rows(self):
        for i in range(len(self)):
            yield (
                self.t_grid[i], self.threshold_abs[i], self.p_hat[i], self.ci_low[i],
                self.ci_high[i], self.normal_tail[i], self.ratio[i], self.samples, self.seed,
            )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows():
            w.writerow([repr(float(v)) for v in r[:7]] + [r[7], r[8]])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {"samples": self.samples, "seed": self.seed, "normalization": self.normalization, **self.meta}

    def write(self, csv_path, json_path=None) -> None:
        with open(csv_path, "w", newline="") as fh:
            fh.write(self.to_csv())
        if json_path is not None:
            with open(json_path, "w") as fh:
                json.dump(self.sidecar(), fh, indent=2, sort_keys=True)
                fh.write("\n")

    @classmethod
    def from_csv(cls, text: str, meta: dict | None = None) -> "TailScan":
        rd = csv.reader(io.StringIO(text))
        header = next(rd)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        cols: list[list] = [[] for _ in range(7)]
        samples = seed = 0
        for row in rd:
            for j in range(7):
                cols[j].append(float(row[j]))
            samples, seed = int(row[7]), int(row[8])
        meta = dict(meta or {})
        if not cols[0]:
            samples, seed = meta.get("samples", 0), meta.get("seed", 0)
        norm = meta.pop("normalization", math.nan)
        meta.pop("samples", None)
        meta.pop("seed", None)
        return cls(*cols, samples=samples, seed=seed, normalization=norm, meta=meta)


def tail_scan(
    seq: LacunarySequence,
    f: TrigPolynomial,
    N: int,
    t_grid: Sequence[float],
    sampler: SamplerConfig,
    level: float = 0.99,
    meta: dict | None = None,
) -> TailScan:
    """Tail ratios P[S_N >= t ||f|| sqrt(N)] / (1 - Phi(t)) on a grid of t."""
    t_grid = sorted(float(t) for t in t_grid)
    if any(t < 0 for t in t_grid):
        raise ValueError("t grid must be nonnegative")
    norm = l2_norm(f) * math.sqrt(N)
    taus = [t * norm for t in t_grid]
    est = estimate_tail(seq, f, N, taus, sampler, level)
    p = est.p_hat
    cis = est.ci()
    nt = [normal_tail(t) for t in t_grid]
    ratio = [float(pi / q) if q > 0 else math.inf for pi, q in zip(p, nt)]
    info = {
        "N": N,
        "f": f.format(),
        "sequence": seq.provenance,
        "depth": sampler.resolve_depth(f, seq, N),
        "strata_bits": sampler.strata_bits,
        "rounds": sampler.rounds,
        "level": level,
    }
    info.update(meta or {})
    return TailScan(
        list(t_grid), taus, [float(x) for x in p], [c[0] for c in cis], [c[1] for c in cis],
        nt, ratio, est.samples, sampler.seed, norm, info,
    )


def threshold_scale(g: GrowthFunction, N: int) -> float:
    """sqrt(2 log g_N), the end of the Gaussian range."""
    gN = g(N)
    if not gN > 1:
        raise ValueError(f"g_N={gN} <= 1: log g_N is not positive")
    return math.sqrt(2.0 * math.log(gN))


def ratio_scan(
    seq: LacunarySequence,
    f: TrigPolynomial,
    N: int,
    g: GrowthFunction,
    t_max_mult: float,
    steps: int,
    sampler: SamplerConfig,
    extra_t: Sequence[float] = (),
    level: float = 0.99,
) -> TailScan:
    """Scan t over [0, t_max_mult sqrt(2 log g_N)] in ``steps`` points (plus extra_t)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    g.check([N])
    scale = threshold_scale(g, N)
    grid = [t_max_mult * scale * i / max(steps - 1, 1) for i in range(steps)]
    grid = sorted(set(grid) | {float(t) for t in extra_t})
    meta = {"g": g.describe(), "g_N": g(N), "sqrt_2_log_g_N": scale, "t_max_mult": t_max_mult}
    return tail_scan(seq, f, N, grid, sampler, level, meta)


def ks_statistic(samples, reference) -> float:
    """Kolmogorov-Smirnov distance of the empirical CDF of ``samples``.

    ``reference`` is either a vectorised CDF (one-sample, exact sup for a
    continuous reference) or a second sample (two-sample statistic).
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    if callable(reference):
        F = np.asarray(reference(x), dtype=np.float64)
        # right limits at ties: use the last index of each run of equal values
        last = np.searchsorted(x, x, side="right")
        first = np.searchsorted(x, x, side="left")
        d_plus = np.max(last / n - F)
        d_minus = np.max(F - first / n)
        return float(max(d_plus, d_minus, 0.0))
    y = np.sort(np.asarray(reference, dtype=np.float64))
    if len(y) == 0:
        raise ValueError("empty reference sample")
    z = np.concatenate([x, y])
    fx = np.searchsorted(x, z, side="right") / n
    fy = np.searchsorted(y, z, side="right") / len(y)
    return float(np.max(np.abs(fx - fy)))


def normalized_samples(seq, f, N, sampler) -> np.ndarray:
    """S_N / (||f|| sqrt N) at every sample point."""
    return sample_sums(f, seq, N, sampler) / (l2_norm(f) * math.sqrt(N))


def gaposhkin_check(
    weights: Sequence[float],
    seq: LacunarySequence,
    sampler: SamplerConfig,
) -> tuple[float, float]:
    """KS of sqrt(2) sum lambda_k cos(2 pi n_k x) vs Phi, and the bound (max lambda_k)^(1/4)."""
    lam = np.asarray(weights, dtype=np.float64)
    N = len(lam)
    if N < 1 or N > len(seq):
        raise ValueError("need 1 <= len(weights) <= len(seq)")
    if abs(math.fsum(lam * lam) - 1.0) > 1e-12:
        raise ValueError("weights must satisfy sum lambda_k^2 = 1")
    if any(n & (n - 1) for n in seq.terms[:N]):
        raise ValueError("frequencies must be powers of two")
    vals = math.sqrt(2.0) * sample_sums(TrigPolynomial((1.0,)), seq, N, sampler, weights=lam)
    return ks_statistic(vals, normal_cdf), float(np.max(np.abs(lam))) ** 0.25
