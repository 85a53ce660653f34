import random

import numpy as np
import pytest

from lacunary.dilated import DyadicPoint, TrigPolynomial, eval_SN, required_depth
from lacunary.kernels import philox_block
from lacunary.sampling import SamplerConfig, sample_points, sample_sums, set_threads, sums_at, terms_at
from lacunary.sequences import ConstructionPlan, GrowthFunction, gen_erdos_fortet, gen_pow2, gen_theoremB

COS = TrigPolynomial.parse("cos:1=1")
MIXED = TrigPolynomial.parse("cos:1=0.7,sin:2=-1.1,cos:3=0.25")

# Random123 known-answer vectors for Philox4x32-10
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344), (0xA4093822, 0x299F31D0),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
]


@pytest.mark.parametrize("ctr,key,expect", KAT)
def test_philox_known_answers(ctr, key, expect):
    out = philox_block(*[np.uint64(v) for v in ctr + key])
    assert tuple(int(v) for v in out) == expect


def _reference_point(seed, B, B0, s):
    """Sample s from its Philox blocks, assembled with Python integers."""
    k0, k1 = seed & 0xFFFFFFFF, seed >> 32
    stratum, rnd = s & ((1 << B0) - 1), s >> B0
    nwords = (B + 63) // 64
    bits = 0
    for blk in range((nwords + 1) // 2):
        a, b, c, d = (int(v) for v in philox_block(*[np.uint64(v) for v in
                      (blk, rnd, stratum & 0xFFFFFFFF, stratum >> 32, k0, k1)]))
        bits |= (a | b << 32 | (c | d << 32) << 64) << (128 * blk)
    low = bits & ((1 << (B - B0)) - 1)
    return (stratum << (B - B0)) | low


@pytest.mark.parametrize("B,B0", [(40, 6), (64, 8), (130, 10), (200, 16), (1000, 3)])
def test_points_match_reference(B, B0):
    cfg = SamplerConfig(seed=0x1234_5678_9ABC, strata_bits=B0, rounds=3)
    pts = sample_points(cfg, B, 0, cfg.samples)
    for s, p in enumerate(pts):
        assert p.p == _reference_point(cfg.seed, B, B0, s)


def test_stratification_one_point_per_cell_per_round():
    cfg = SamplerConfig(seed=5, strata_bits=8, rounds=3)
    pts = sample_points(cfg, 50, 0, cfg.samples)
    cells = np.array([p.p >> 42 for p in pts])
    assert np.all(np.bincount(cells, minlength=256) == 3)


@pytest.mark.parametrize("f", [COS, MIXED])
def test_kernel_sums_match_exact_evaluation(f):
    rng = random.Random(7)
    seq = gen_theoremB(ConstructionPlan.desk(GrowthFunction.parse("sqrt"), 1))
    N = len(seq)
    B = required_depth(f, seq, N)
    pts = [DyadicPoint(rng.getrandbits(B), B) for _ in range(40)]
    fast = sums_at(f, seq.terms[:N], pts)
    exact = [eval_SN(f, seq, N, x) for x in pts]
    assert np.max(np.abs(fast - exact)) <= 1e-10 * N
    mat = terms_at(f, seq.terms[:N], pts[:5])
    assert np.allclose(mat.sum(axis=1), fast[:5], atol=1e-10 * N)


def test_sample_sums_match_points():
    cfg = SamplerConfig(seed=3, strata_bits=6, rounds=2)
    seq = gen_erdos_fortet(30)
    vals = sample_sums(MIXED, seq, 30, cfg)
    B = cfg.resolve_depth(MIXED, seq, 30)
    pts = sample_points(cfg, B, 0, cfg.samples)
    exact = np.array([eval_SN(MIXED, seq, 30, x) for x in pts])
    assert np.max(np.abs(vals - exact)) <= 1e-12 * 30


def test_thread_count_does_not_change_results():
    seq = gen_pow2(256)
    base = None
    for t in (1, 4, 8):
        cfg = SamplerConfig(seed=99, strata_bits=12, rounds=2, threads=t, chunk=1000)
        vals = sample_sums(COS, seq, 256, cfg)
        if base is None:
            base = vals
        assert np.array_equal(vals, base)
    set_threads(None)


def test_chunking_does_not_change_results():
    seq = gen_pow2(64)
    a = sample_sums(COS, seq, 64, SamplerConfig(seed=1, strata_bits=10, chunk=97))
    b = sample_sums(COS, seq, 64, SamplerConfig(seed=1, strata_bits=10, chunk=1 << 16))
    assert np.array_equal(a, b)


def test_seed_validation():
    with pytest.raises(ValueError):
        SamplerConfig(seed=-1)
    with pytest.raises(ValueError):
        SamplerConfig(seed=1 << 64)
    cfg = SamplerConfig.for_samples(1, 10_000_000)
    assert cfg.samples >= 10_000_000 and cfg.strata_bits == 16
