"""Command-line front end: sequence generation, censuses, tail scans and presets.

Numba's worker pool is sized from ``--threads`` before any sampling module is
imported, so modules that pull in numba are imported lazily.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from .config import PRESETS, BlowupSpec, ConfigError, ExperimentConfig, SamplerSpec
from .dilated import TrigPolynomial, dyadic_block_f, erdos_fortet_f, l2_norm
from .diophantine import count_solutions, format_scan_csv, scan_L
from .sequences import (
    ConstructionPlan,
    GrowthFunction,
    SequenceError,
    block_ratio_report,
    gen_theoremB,
    parse_sequence_spec,
    verify_gap,
    write_lacuseq,
)

PLOT_COLUMNS = ("t", "threshold_abs", "p_hat", "ci_low", "ci_high", "normal_tail", "ratio")


# --- plot data -----------------------------------------------------------------


def emit_plotdata(scan, path=None) -> str:
    """Tab-separated columns of a TailScan; the first line carries the metadata as JSON.

    Floats are written with ``repr`` so the file parses back to an equal scan.
    """
    head = {"samples": scan.samples, "seed": scan.seed, "normalization": scan.normalization,
            "meta": scan.meta}
    buf = io.StringIO()
    buf.write("# " + json.dumps(head, sort_keys=True) + "\n")
    buf.write("\t".join(PLOT_COLUMNS) + "\n")
    cols = (scan.t_grid, scan.threshold_abs, scan.p_hat, scan.ci_low, scan.ci_high,
            scan.normal_tail, scan.ratio)
    for i in range(len(scan)):
        buf.write("\t".join(repr(float(c[i])) for c in cols) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_plotdata(text: str):
    from .tailprob import TailScan

    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing metadata line")
    head = json.loads(lines[0][2:])
    if tuple(lines[1].split("\t")) != PLOT_COLUMNS:
        raise ValueError(f"unexpected columns {lines[1]!r}")
    cols: list[list[float]] = [[] for _ in PLOT_COLUMNS]
    for line in lines[2:]:
        for j, v in enumerate(line.split("\t")):
            cols[j].append(float(v))
    return TailScan(*cols, samples=head["samples"], seed=head["seed"],
                    normalization=head["normalization"], meta=head["meta"])


# --- helpers -------------------------------------------------------------------


def _parse_ints(text: str) -> list[int]:
    return [int(float(x)) for x in text.split(",") if x.strip()]


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        a, _, b = item.partition(":")
        out.append((int(a), int(b)))
    return out


def _parse_f(spec: str) -> TrigPolynomial:
    if spec == "erdos-fortet":
        return erdos_fortet_f()
    if spec.startswith("dyadic:"):
        return dyadic_block_f(int(spec.split(":", 1)[1]))
    return TrigPolynomial.parse(spec)


def _seq_for(cfg: ExperimentConfig, N: int):
    """The configured sequence family truncated to N terms (a full spec is used as given)."""
    if not cfg.sequence:
        raise ConfigError("no sequence given (--sequence)")
    if ":" in cfg.sequence:
        return parse_sequence_spec(cfg.sequence).head(N)
    return parse_sequence_spec(f"{cfg.sequence}:{N}")


def _last_N(cfg: ExperimentConfig) -> int:
    if not cfg.N:
        raise ConfigError("no N given (--N)")
    return cfg.N[-1]


def _sampler(cfg: ExperimentConfig, default_samples: int):
    from .sampling import SamplerConfig

    s = cfg.sampler
    if s.seed is None:
        raise ConfigError("a seed is required (--seed or sampler.seed in the config)")
    n = s.samples if s.samples is not None else default_samples
    return SamplerConfig.for_samples(s.seed, n, strata_bits=s.strata_bits, depth=s.depth)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")


@dataclass
class Check:
    name: str
    value: float
    bound: str
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "bound": self.bound,
                "passed": bool(self.passed)}


@dataclass
class PresetResult:
    claim: str
    tolerances: dict
    outputs: list[str]
    checks: list[Check] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# --- presets -------------------------------------------------------------------

DEFAULT_SAMPLES = {
    "erdos-fortet": 1 << 20,
    "clt-pow2": 1 << 20,
    "theoremA-scan": 10_000_000,
    "theoremB-blowup": 1 << 20,
    "martingale-diag": 1 << 11,
}

# Per-preset defaults applied when the config leaves the field unset.
PRESET_DEFAULTS = {
    "erdos-fortet": {"sequence": "erdos-fortet", "f": "erdos-fortet", "N": [256, 1024]},
    "clt-pow2": {"sequence": "pow2", "f": "cos:1=1", "N": [64, 256, 1024]},
    "theoremA-scan": {"sequence": "pow2", "f": "cos:1=1", "N": [4096], "growth": "identity",
                      "t_max_mult": 0.6, "steps": 13},
    "theoremB-blowup": {"sequence": "theoremB", "growth": "sqrt"},
    "martingale-diag": {"sequence": "pow2", "f": "cos:1=1", "N": [512], "undashed": 16,
                        "dashed": 8, "margin": 10.0},
}


def _with_defaults(name: str, cfg: ExperimentConfig) -> ExperimentConfig:
    base = ExperimentConfig()
    upd = {}
    for key, val in PRESET_DEFAULTS[name].items():
        if getattr(cfg, key) == getattr(base, key):
            upd[key] = val
    return replace(cfg, preset=name, **upd)


def _ks_rows(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "N_a", "N_b", "ks", "samples", "seed"])
    for r in rows:
        w.writerow([r[0], r[1], r[2], repr(float(r[3])), r[4], r[5]])
    return buf.getvalue()


def _preset_erdos_fortet(cfg: ExperimentConfig, out: Path) -> PresetResult:
    from .tailprob import ks_statistic, normal_cdf, normalized_samples

    res = PresetResult(
        "2^k - 1 frequencies satisfy the gap condition yet carry many solutions of "
        "n_{k+1} - 2 n_k = 1; the normalized sum has a non-Gaussian limit law",
        {"ks_separation_factor": 3.0, "census": "L(N,1,2) = N-1, witness 1 (exact)"},
        ["ks.csv", "census.csv", "manifest.json"],
    )
    Ns = sorted(cfg.N)
    if len(Ns) < 2:
        raise ConfigError("erdos-fortet needs two values of N")
    f = _parse_f(cfg.f)
    sampler = _sampler(cfg, DEFAULT_SAMPLES["erdos-fortet"])
    seq = _seq_for(cfg, Ns[-1])
    vals = {N: normalized_samples(seq, f, N, sampler) for N in Ns}
    rows = [("vs_normal", N, "", ks_statistic(vals[N], normal_cdf), sampler.samples,
             sampler.seed) for N in Ns]
    two = ks_statistic(vals[Ns[0]], vals[Ns[-1]])
    rows.append(("two_sample", Ns[0], Ns[-1], two, sampler.samples, sampler.seed))
    (out / "ks.csv").write_text(_ks_rows(rows))
    one = rows[len(Ns) - 1][3]
    res.checks.append(Check("ks_vs_normal_over_two_sample", one / two if two else math.inf,
                            ">= 3", one > 3 * two))
    cen_rows = scan_L(seq, Ns, [(1, 2)])
    (out / "census.csv").write_text(format_scan_csv(cen_rows))
    for r in cen_rows:
        res.checks.append(Check(f"L({r.N},1,2)", r.L, f"== {r.N - 1}, witness 1",
                                r.L == r.N - 1 and r.witness_c == 1))
    res.details = {"ks_vs_normal": {str(r[1]): r[3] for r in rows[:-1]}, "ks_two_sample": two}
    return res


def _preset_clt_pow2(cfg: ExperimentConfig, out: Path) -> PresetResult:
    from .tailprob import ks_statistic, normal_cdf, normalized_samples

    res = PresetResult(
        "for n_k = 2^k the normalized sum sqrt(2) S_N / sqrt(N) tends to the standard "
        "normal law; the KS distance to Phi decreases with N",
        {"ks_last_max": 0.05, "monotone": "strictly decreasing in N"},
        ["ks.csv", "manifest.json"],
    )
    Ns = sorted(cfg.N)
    f = _parse_f(cfg.f)
    sampler = _sampler(cfg, DEFAULT_SAMPLES["clt-pow2"])
    seq = _seq_for(cfg, Ns[-1])
    ks = [ks_statistic(normalized_samples(seq, f, N, sampler), normal_cdf) for N in Ns]
    (out / "ks.csv").write_text(_ks_rows(
        [("vs_normal", N, "", k, sampler.samples, sampler.seed) for N, k in zip(Ns, ks)]))
    res.checks.append(Check(f"ks(N={Ns[-1]})", ks[-1], "<= 0.05", ks[-1] <= 0.05))
    dec = all(b < a for a, b in zip(ks, ks[1:]))
    res.checks.append(Check("ks_strictly_decreasing", float(dec), "== 1", dec))
    res.details = {"ks": dict(zip(map(str, Ns), ks))}
    return res


def _write_scan(scan, out: Path) -> None:
    scan.write(out / "scan.csv", out / "scan.json")
    emit_plotdata(scan, out / "plotdata.tsv")


def _preset_theorem_a(cfg: ExperimentConfig, out: Path) -> PresetResult:
    from .tailprob import ratio_scan

    lo, hi = 0.8, 1.25
    res = PresetResult(
        "under the Diophantine condition the tail ratio P[S_N >= t ||f|| sqrt N] / (1 - Phi(t)) "
        "stays near 1 for t up to a fraction of sqrt(2 log g_N)",
        {"ratio_range": [lo, hi], "t_max_mult": cfg.t_max_mult},
        ["scan.csv", "scan.json", "plotdata.tsv", "manifest.json"],
    )
    N = _last_N(cfg)
    seq = _seq_for(cfg, N)
    f = _parse_f(cfg.f)
    g = GrowthFunction.parse(cfg.growth)
    sampler = _sampler(cfg, DEFAULT_SAMPLES["theoremA-scan"])
    scan = ratio_scan(seq, f, N, g, cfg.t_max_mult, cfg.steps, sampler, level=cfg.level)
    _write_scan(scan, out)
    worst = max(scan.ratio, key=lambda r: abs(math.log(r)) if r > 0 else math.inf)
    res.checks.append(Check("ratio_extreme", worst, f"in [{lo}, {hi}]",
                            all(lo <= r <= hi for r in scan.ratio)))
    res.details = {"ratios": dict(zip(map(repr, scan.t_grid), scan.ratio))}
    return res


def blowup_parameters(plan: ConstructionPlan, I: int, b: BlowupSpec) -> dict:
    """h_I, s and the main-term lower bound of the counterexample at index I."""
    f = dyadic_block_f(b.d)
    M = plan.M(I)
    X = b.d * b.d * (1 << b.d) * M
    h = math.ceil(math.log2(10 * X))  # 1/(20X) <= 2^-h <= 1/(10X)
    N = plan.block_max(I)
    size = len(plan.block(I))
    log_g = math.log(plan.growth(N))
    s = (1 + b.eps) * l2_norm(f) + 4 * b.delta
    main = 2.0**-h * math.exp(-2 * s * s / (b.d * b.d) * N / size * log_g)
    return {"I": I, "N_I": N, "M_I": M, "block_size": size, "d": b.d, "eps": b.eps,
            "delta": b.delta, "h_I": h, "s": s, "main_term_lower_bound": main}


def _preset_theorem_b(cfg: ExperimentConfig, out: Path) -> PresetResult:
    import numpy as np

    from .tailprob import tail_scan, threshold_scale

    b = cfg.blowup
    res = PresetResult(
        "for any g_N = o(N) there is a lacunary sequence and a trigonometric polynomial "
        "whose tail ratio exceeds 1 substantially just beyond sqrt(2 log g_N)",
        {"blowup_factor_min": b.factor, "eps": b.eps},
        ["scan.csv", "scan.json", "plotdata.tsv", "census.csv", "manifest.json"],
    )
    g = GrowthFunction.parse(cfg.growth)
    plan = ConstructionPlan.desk(g, b.I)
    seq = gen_theoremB(plan)
    N = plan.block_max(b.I)
    f = dyadic_block_f(b.d)
    scale = threshold_scale(g, N)
    sub = [float(t) for t in np.linspace(0.0, (1 - b.eps) * scale, b.sub_steps)]
    t_hi = (1 + b.eps) * scale
    sampler = _sampler(cfg, DEFAULT_SAMPLES["theoremB-blowup"])
    meta = {"g": g.describe(), "g_N": g(N), "sqrt_2_log_g_N": scale, "t_hi": t_hi}
    scan = tail_scan(seq, f, N, sub + [t_hi], sampler, cfg.level, meta)
    _write_scan(scan, out)
    ratios = dict(zip(scan.t_grid, scan.ratio))
    med = float(np.median([ratios[t] for t in sub]))
    factor = ratios[t_hi] / med if med > 0 else math.inf
    res.checks.append(Check("blowup_factor", factor, f">= {b.factor}", factor >= b.factor))
    rows = scan_L(seq, [N], [(a, c) for a in (1, 2) for c in (1, 2)], g)
    (out / "census.csv").write_text(format_scan_csv(rows))
    res.details = {"parameters": blowup_parameters(plan, b.I, b), "median_sub_ratio": med,
                   "ratio_at_t_hi": ratios[t_hi],
                   "exceedances_at_t_hi": round(scan.p_hat[-1] * scan.samples)}
    return res


def _preset_martingale(cfg: ExperimentConfig, out: Path) -> PresetResult:
    import numpy as np

    from .martingale import (
        PointSet, dashed_mgf_check, default_point_depth, diagnostics, grama_stats,
        make_block_plan, rh_census, xi_terms,
    )

    tol = {"max_cond_mean": 1e-9, "N4": 0.1, "max_deviation": 1e-3, "mgf_rel": 1e-6}
    res = PresetResult(
        "the block-martingale decomposition: conditional means of xi_i vanish, the "
        "conditional variance concentrates at 1, X_n tracks the normalized undashed sum, "
        "and the dashed blocks obey the sub-Gaussian moment bound",
        tol, ["diagnostics.json", "manifest.json"],
    )
    N = _last_N(cfg)
    seq = _seq_for(cfg, N)
    f = _parse_f(cfg.f)
    plan = make_block_plan(N, cfg.undashed, cfg.dashed, seq, cfg.margin)
    sampler = _sampler(cfg, DEFAULT_SAMPLES["martingale-diag"])
    depth = cfg.sampler.depth or default_point_depth(seq, f, plan)
    pts = PointSet.stratified(sampler, depth)
    r = xi_terms(seq, f, plan, pts)
    stats = grama_stats(r)
    dl = max(len(plan.dashed(i)) for i in range(1, plan.n + 1))
    lams = [float(x) for x in np.linspace(-1.0 / dl, 1.0 / dl, 20)]
    mgf = [dashed_mgf_check(seq, plan, lam) for lam in lams]
    rh = rh_census(seq, f, plan) if f.is_even else None
    diag = diagnostics(plan, stats, r, rh, mgf)
    _write_json(out / "diagnostics.json", diag)
    res.checks += [
        Check("max_cond_mean", r.max_cond_mean, "<= 1e-9", r.max_cond_mean <= 1e-9),
        Check("N4", stats.N4, "<= 0.1", stats.N4 <= 0.1),
        Check("max_deviation", r.max_deviation, "<= 1e-3", r.max_deviation <= 1e-3),
        Check("dashed_mgf", max(m.lhs / m.rhs for m in mgf), "<= 1 + 1e-6",
              all(m.holds for m in mgf)),
    ]
    res.details = {"margin": plan.margin, "point_depth": depth, "points": len(pts)}
    return res


PRESET_RUNNERS = {
    "erdos-fortet": _preset_erdos_fortet,
    "clt-pow2": _preset_clt_pow2,
    "theoremA-scan": _preset_theorem_a,
    "theoremB-blowup": _preset_theorem_b,
    "martingale-diag": _preset_martingale,
}


def run_preset(name: str, cfg: ExperimentConfig, out_dir) -> PresetResult:
    """Run a preset, write its artifacts and manifest into ``out_dir``."""
    if name not in PRESET_RUNNERS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    if cfg.sampler.seed is None:
        raise ConfigError("a seed is required (--seed or sampler.seed in the config)")
    cfg = _with_defaults(name, cfg)
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = PRESET_RUNNERS[name](cfg, out)
    manifest = {
        "preset": name,
        "claim": res.claim,
        "tolerances": res.tolerances,
        "outputs": res.outputs,
        "config": cfg.to_dict(),
        "checks": [c.to_dict() for c in res.checks],
        "passed": res.passed,
        "details": res.details,
    }
    _write_json(out / "manifest.json", manifest)
    return res


# --- subcommands ---------------------------------------------------------------


def _cmd_gen(args, cfg: ExperimentConfig) -> int:
    if not cfg.sequence:
        raise ConfigError("no sequence given (--sequence)")
    plan = ConstructionPlan.desk(GrowthFunction.parse(cfg.growth))
    seq = parse_sequence_spec(cfg.sequence, plan)
    if cfg.out:
        write_lacuseq(seq, cfg.out)
    else:
        from .sequences import format_lacuseq

        sys.stdout.write(format_lacuseq(seq))
    return 0


def _cmd_census(args, cfg: ExperimentConfig) -> int:
    if not cfg.N:
        raise ConfigError("no N given (--N)")
    Ns = sorted(cfg.N)
    seq = _seq_for(cfg, Ns[-1])
    g = GrowthFunction.parse(cfg.growth)
    rows = scan_L(seq, Ns, _parse_pairs(args.pairs), g, args.mode)
    text = format_scan_csv(rows)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_construct(args, cfg: ExperimentConfig) -> int:
    g = GrowthFunction.parse(cfg.growth)
    I = args.I if args.I is not None else cfg.blowup.I
    plan = (ConstructionPlan.paper if args.plan == "paper" else ConstructionPlan.desk)(g, I)
    seq = gen_theoremB(plan)
    rep = block_ratio_report(seq)
    report = {
        "plan": plan.name, "I": I, "terms": len(seq), "growth": g.describe(),
        "blocks": [[plan.block(i).start, plan.block(i).stop - 1, plan.M(i)] for i in range(I + 1)],
        "min_ratio": float(verify_gap(seq).min_ratio),
        "ratios": rep.to_dict(),
        "max_bits": seq.terms[-1].bit_length(),
    }
    ok = rep.within_ok() and rep.cross_min_scaled >= 0.9
    report["checks_passed"] = ok
    if cfg.out:
        write_lacuseq(seq, cfg.out)
        _write_json(Path(cfg.out).with_suffix(".json"), report)
    print(json.dumps(report, indent=2))
    return 0 if ok else 1


def _cmd_tail_scan(args, cfg: ExperimentConfig) -> int:
    from .tailprob import ratio_scan

    N = _last_N(cfg)
    seq = _seq_for(cfg, N)
    f = _parse_f(cfg.f)
    sampler = _sampler(cfg, 1 << 20)
    scan = ratio_scan(seq, f, N, GrowthFunction.parse(cfg.growth), cfg.t_max_mult, cfg.steps,
                      sampler, level=cfg.level)
    if cfg.out:
        out = Path(cfg.out)
        scan.write(out, out.with_suffix(".json"))
        emit_plotdata(scan, out.with_suffix(".tsv"))
    else:
        sys.stdout.write(scan.to_csv())
    return 0


def _cmd_martingale(args, cfg: ExperimentConfig) -> int:
    from .martingale import (
        PointSet, default_point_depth, diagnostics, grama_stats, make_block_plan, xi_terms,
    )

    N = _last_N(cfg)
    seq = _seq_for(cfg, N)
    f = _parse_f(cfg.f)
    plan = make_block_plan(N, cfg.undashed, cfg.dashed, seq, cfg.margin)
    sampler = _sampler(cfg, 1 << 11)
    depth = cfg.sampler.depth or default_point_depth(seq, f, plan)
    r = xi_terms(seq, f, plan, PointSet.stratified(sampler, depth))
    diag = diagnostics(plan, grama_stats(r), r)
    text = json.dumps(diag, indent=2, sort_keys=True, default=str) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_preset(args, cfg: ExperimentConfig) -> int:
    out = cfg.out or os.path.join("runs", args.name)
    res = run_preset(args.name, cfg, out)
    for c in res.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name} = {c.value!r}  ({c.bound})")
    print(f"manifest: {os.path.join(out, 'manifest.json')}")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config; flags override it")
    common.add_argument("--seed", type=int, help="sampler seed (required for sampling)")
    common.add_argument("--out", help="output file (or directory for presets)")
    common.add_argument("--depth", type=int, help="dyadic sampling depth in bits")
    common.add_argument("--samples", type=int, help="number of stratified samples")
    common.add_argument("--threads", type=int, help="worker threads (results do not depend on it)")
    common.add_argument("--sequence", help="pow2:N, erdos-fortet:N, geometric:q:N, theoremB:I, file:PATH")
    common.add_argument("--f", dest="f", help="trig polynomial, e.g. cos:1=1,cos:2=0.5")
    common.add_argument("--N", help="comma-separated N values")
    common.add_argument("--growth", help="g_N: identity, sqrt, log, pow:a, ...")

    p = argparse.ArgumentParser(prog="lacunary", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="write a sequence in lacuseq format")
    c = sub.add_parser("census", parents=[common], help="Diophantine solution census")
    c.add_argument("--pairs", default="1:1,1:2,2:1,2:2", help="a:b pairs")
    c.add_argument("--mode", default="pruned", choices=("pruned", "full"))
    t = sub.add_parser("tail-scan", parents=[common], help="tail ratio scan")
    t.add_argument("--t-max-mult", type=float)
    t.add_argument("--steps", type=int)
    m = sub.add_parser("martingale", parents=[common], help="martingale diagnostics")
    m.add_argument("--undashed", type=int)
    m.add_argument("--dashed", type=int)
    m.add_argument("--margin", type=float)
    k = sub.add_parser("construct", parents=[common], help="build and certify the block construction")
    k.add_argument("--I", type=int)
    k.add_argument("--plan", default="desk", choices=("desk", "paper"))
    r = sub.add_parser("preset", parents=[common], help="run a named experiment")
    r.add_argument("name", choices=PRESETS)
    return p


def _merge(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    upd: dict = {}
    if args.out is not None:
        upd["out"] = args.out
    if args.sequence is not None:
        upd["sequence"] = args.sequence
    if args.f is not None:
        upd["f"] = args.f
    if args.N is not None:
        upd["N"] = _parse_ints(args.N)
    if args.growth is not None:
        upd["growth"] = args.growth
    for name in ("t_max_mult", "steps", "undashed", "dashed", "margin"):
        val = getattr(args, name, None)
        if val is not None:
            upd[name] = val
    s = cfg.sampler
    s = SamplerSpec(
        args.seed if args.seed is not None else s.seed,
        args.samples if args.samples is not None else s.samples,
        s.strata_bits,
        args.depth if args.depth is not None else s.depth,
        args.threads if args.threads is not None else s.threads,
    )
    cfg = replace(cfg, sampler=s, **upd)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge(args)
        threads = cfg.sampler.threads
        if threads is not None:
            if "numba" not in sys.modules and threads > int(os.environ["NUMBA_NUM_THREADS"]):
                os.environ["NUMBA_NUM_THREADS"] = str(threads)
            from .sampling import set_threads

            set_threads(threads)
        handler = {
            "gen": _cmd_gen, "census": _cmd_census, "tail-scan": _cmd_tail_scan,
            "martingale": _cmd_martingale, "construct": _cmd_construct, "preset": _cmd_preset,
        }[args.command]
        return handler(args, cfg)
    except (ConfigError, SequenceError, ValueError, OSError) as exc:
        print(f"lacunary: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
