import math

import mpmath
import numpy as np
import pytest

from lacunary.dilated import TrigPolynomial
from lacunary.quadrature import (
    grid_mean_square,
    grid_values,
    mean_square_dyadic,
    mgf_dyadic,
    product_integral,
)
from lacunary.sequences import LacunarySequence, gen_pow2

COS = TrigPolynomial.parse("cos:1=1")


def test_grid_values_match_numpy():
    seq = gen_pow2(6)
    B = 10
    x = np.arange(1 << B) / (1 << B)
    ref = sum(np.cos(2 * np.pi * n * x) for n in seq.terms)
    assert np.max(np.abs(grid_values(COS, seq, 6, B) - ref)) <= 1e-12


@pytest.mark.parametrize("N", [4, 8, 16, 20])
def test_jets_equal_full_grid_mean(N):
    seq = gen_pow2(N)
    B = N + 2
    assert mean_square_dyadic(COS, seq, N) == pytest.approx(grid_mean_square(COS, seq, N, B), abs=1e-9)


def test_mixed_polynomial_mean_square():
    f = TrigPolynomial.parse("cos:1=1,cos:2=0.5,cos:3=-0.25")
    seq = gen_pow2(14)
    assert mean_square_dyadic(f, seq, 14) == pytest.approx(grid_mean_square(f, seq, 14, 18), abs=1e-9)


def test_product_integral_trivial():
    assert product_integral({})[0] == 1.0


def test_mgf_against_grid():
    seq = gen_pow2(12)
    lam = 0.3
    vals = grid_values(COS, seq, 12, 16)
    exps = list(range(1, 13))
    assert mgf_dyadic(exps, lam) == pytest.approx(np.mean(np.exp(lam * vals)), rel=1e-12)


def test_mgf_rejects_non_dyadic():
    from lacunary.quadrature import dyadic_exponents

    with pytest.raises(ValueError):
        dyadic_exponents(LacunarySequence((1, 3)).terms)


def test_mgf_single_cosine_bessel():
    # int exp(lam cos 2 pi x) dx = I_0(lam)
    assert mgf_dyadic([0], 0.7) == pytest.approx(float(mpmath.besseli(0, 0.7)), rel=1e-14)
    assert mgf_dyadic([5], 0.7) == pytest.approx(mgf_dyadic([0], 0.7), rel=1e-14)
    assert math.isclose(mgf_dyadic([], 0.7), 1.0)
