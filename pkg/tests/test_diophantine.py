import random

import pytest

from oracles import census_oracle

from lacunary.diophantine import (
    count_cross_block,
    count_for_c,
    count_solutions,
    format_scan_csv,
    scan_L,
)
from lacunary.sequences import (
    ConstructionPlan,
    GrowthFunction,
    LacunarySequence,
    gen_erdos_fortet,
    gen_geometric,
    gen_pow2,
    gen_theoremB,
)

SQRT = GrowthFunction.parse("sqrt")


def test_erdos_fortet_census():
    cen = count_solutions(gen_erdos_fortet(10), 10, 1, 2)
    assert (cen.max_count, cen.witness_c) == (9, 1)
    assert not cen.excluded_zero


def test_pow2_distinct_differences():
    cen = count_solutions(gen_pow2(10), 10, 1, 1)
    assert cen.max_count == 1
    assert cen.excluded_zero and cen.witness_c != 0


def test_pow2_double():
    cen = count_solutions(gen_pow2(10), 10, 2, 1)
    assert (cen.max_count, cen.witness_c) == (9, 0)


def test_count_for_c_examples():
    assert count_for_c(gen_erdos_fortet(10), 10, 1, 2, 1) == 9
    assert count_for_c(gen_geometric(3, 12), 12, 1, 1, 0) == 12
    assert count_for_c(gen_pow2(5), 5, 1, 1, 2) == 1


def test_n_out_of_range():
    with pytest.raises(ValueError):
        count_solutions(gen_pow2(5), 6, 1, 1)
    with pytest.raises(ValueError):
        count_solutions(gen_pow2(5), 5, 0, 1)


def test_scan_examples():
    rows = scan_L(gen_pow2(10), [10], [(1, 1)])
    assert rows[0].L == 1
    rows = scan_L(gen_erdos_fortet(20), [10, 20], [(1, 2)])
    assert [r.L for r in rows] == [9, 19]
    text = format_scan_csv(rows)
    assert text.splitlines()[0] == "N,a,b,L,witness_c,g_N,L_times_g_over_N"
    assert text.splitlines()[1].startswith("10,1,2,9,1,")


def test_scan_requires_increasing():
    with pytest.raises(ValueError):
        scan_L(gen_pow2(10), [10, 5], [(1, 1)])


def test_theoremB_scan_bounded_by_n_over_g():
    seq = gen_theoremB(ConstructionPlan.desk(SQRT, 1))
    rows = scan_L(seq, [7, 63], [(2, 1)], SQRT)
    for r in rows:
        assert r.L_times_g_over_N <= 2.0


@pytest.mark.parametrize("mode", ["pruned", "full"])
def test_witness_recount(mode):
    rng = random.Random(5)
    for _ in range(30):
        terms = sorted(rng.sample(range(1, 400), 12))
        seq = LacunarySequence(tuple(terms))
        a, b = rng.randint(1, 4), rng.randint(1, 4)
        cen = count_solutions(seq, 12, a, b, mode)
        assert count_for_c(seq, 12, a, b, cen.witness_c) == cen.max_count
        assert (cen.max_count, cen.witness_c) == census_oracle(terms, a, b)


def test_symmetry_and_monotonicity():
    seq = gen_theoremB(ConstructionPlan.desk(SQRT, 1))
    for a, b in [(1, 2), (1, 3), (2, 3)]:
        prev = 0
        for N in (8, 20, 40, 63):
            L_ab = count_solutions(seq, N, a, b).max_count
            assert L_ab == count_solutions(seq, N, b, a).max_count
            assert L_ab >= prev
            prev = L_ab


def test_singleton_family():
    cen = count_solutions(gen_pow2(1), 1, 1, 1)
    assert (cen.max_count, cen.witness_c) == (0, None)


@pytest.mark.parametrize("I", [1, 2])
def test_no_within_sub_block_power_of_two_relation(I):
    """a n_k = b n_l with a/b = 2^r has no solutions inside a sub-block."""
    seq = gen_theoremB(ConstructionPlan.desk(SQRT, I))
    for sb in seq.sub_blocks:
        if sb.i != I:
            continue
        vals = {seq.n(k) for k in sb.indices()}
        for r in (1, 2, 3):
            assert not any((v << r) in vals for v in vals)


def test_cross_block_examples():
    seq = gen_pow2(4)
    assert count_cross_block(seq, [[1], [2]], 1, 1) == (1, -2)
    assert count_cross_block(seq, [], 1, 1) == (0, None)
    with pytest.raises(ValueError):
        count_cross_block(seq, [[1, 2], [2, 3]], 1, 1)


def test_cross_block_theoremB_small():
    seq = gen_theoremB(ConstructionPlan.desk(SQRT, 2))
    for a in (1, 2):
        for b in (1, 2):
            best, _ = count_cross_block(seq, seq.sub_blocks, a, b)
            assert best <= 2
