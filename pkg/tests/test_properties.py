from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import census_oracle, frac_mul_oracle

from lacunary.dilated import DyadicPoint, frac_mul, naf
from lacunary.diophantine import count_solutions
from lacunary.martingale import cond_exp
from lacunary.sequences import LacunarySequence, format_lacuseq, gen_geometric, parse_lacuseq, verify_gap
from lacunary.tailprob import normal_tail

increasing = st.lists(st.integers(1, 10**6), min_size=1, max_size=24, unique=True).map(sorted)


@given(increasing, st.integers(1, 4), st.integers(1, 4))
@settings(max_examples=200, deadline=None)
def test_census_matches_oracle(terms, a, b):
    seq = LacunarySequence(tuple(terms))
    cen = count_solutions(seq, len(terms), a, b)
    assert (cen.max_count, cen.witness_c) == census_oracle(terms, a, b)


@given(st.integers(1, 2**4096), st.integers(1, 5000), st.data())
@settings(max_examples=300, deadline=None)
def test_frac_mul_exact(n, B, data):
    p = data.draw(st.integers(0, 2**B - 1))
    assert frac_mul(n, DyadicPoint(p, B)).as_fraction() == frac_mul_oracle(n, p, B)


@given(st.integers(0, 2**3000))
def test_naf_is_nonadjacent_and_exact(n):
    digits = naf(n)
    assert sum(s << e for e, s in digits) == n
    assert all(b - a >= 2 for (a, _), (b, _) in zip(digits, digits[1:]))


@given(st.floats(0, 8))
def test_normal_tail_symmetry(t):
    assert abs(normal_tail(t) + normal_tail(-t) - 1.0) <= 1e-14


@given(st.floats(0, 37.5), st.floats(0, 37.5))
def test_normal_tail_monotone(s, t):
    if s < t:
        assert normal_tail(s) >= normal_tail(t)


@given(st.integers(4, 12), st.data())
@settings(deadline=None)
def test_cond_exp_tower(D, data):
    r = data.draw(st.integers(0, D))
    r2 = data.draw(st.integers(0, r))
    v = np.random.default_rng(D * 100 + r).normal(size=1 << D)
    assert np.allclose(cond_exp(cond_exp(v, r), r2), cond_exp(v, r2), rtol=0, atol=1e-13)


@given(st.fractions(Fraction(101, 100), 4), st.integers(2, 40))
@settings(deadline=None)
def test_geometric_gap_and_round_trip(q, N):
    seq = gen_geometric(q, N)
    assert verify_gap(seq).min_ratio >= q
    back = parse_lacuseq(format_lacuseq(seq))
    assert back.terms == seq.terms and back.declared_gap_q == seq.declared_gap_q
