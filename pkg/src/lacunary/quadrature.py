"""Full-grid quadrature for sums over dyadic frequencies.

Two routes to the mean of a function of x over a complete dyadic grid:

* ``grid_values``: evaluate S_N at every point j / 2^B (feasible for B up
  to ~24).
* a transfer-operator recursion for products prod_k g_k(2^{e_k} x) with all
  frequencies powers of two. With (L A)(y) = (A(y/2) + A((y+1)/2)) / 2 one
  has int A(x) B(2x) dx = int (L A)(y) B(y) dy, and in Fourier coefficients
  L simply keeps the even ones, c'[m] = c[2m]. Sweeping e = 0, 1, ..., e_max
  while multiplying in one factor at a time keeps the support bounded, so
  the integral is computed on short coefficient arrays.

For trigonometric-polynomial factors the recursion is exact; it equals the
full-grid mean for any grid finer than twice the top frequency (discrete
orthogonality), which is how the grid means below are obtained for depths
far beyond enumeration.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import special

from . import kernels
from .dilated import TrigPolynomial
from .sampling import PreparedSum
from .sequences import LacunarySequence

MAX_GRID_BITS = 26


def grid_values(f: TrigPolynomial, seq: LacunarySequence, N: int, B: int, weights=None) -> np.ndarray:
    """S_N(j / 2^B) for every j in [0, 2^B), exact argument reduction."""
    if not 1 <= B <= MAX_GRID_BITS:
        raise ValueError(f"grid depth must be in 1..{MAX_GRID_BITS}")
    if not 1 <= N <= len(seq):
        raise ValueError(f"N={N} out of range 1..{len(seq)}")
    pts = np.arange(1 << B, dtype=np.uint64).reshape(-1, 1)
    prep = PreparedSum.build(f, seq.terms[:N], B, weights)
    out = np.empty(1 << B)
    kernels.sums_at_points(pts, *prep.args(), prep.weights, *prep.fargs(), out)
    return out


def grid_mean_square(f, seq, N, B) -> float:
    v = grid_values(f, seq, N, B)
    return math.fsum(v * v) / len(v)


def dyadic_exponents(terms: Sequence[int]) -> list[int]:
    """e_k with n_k = 2^{e_k}; raises if some term is not a power of two."""
    out = []
    for n in terms:
        if n < 1 or n & (n - 1):
            raise ValueError(f"{n} is not a power of two")
        out.append(n.bit_length() - 1)
    return out


def _conv_jet(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    """Product of two jets: arrays [power of lambda, Fourier index]."""
    la, lb = a.shape[1], b.shape[1]
    out = np.zeros((order + 1, la + lb - 1))
    for i in range(order + 1):
        for j in range(order + 1 - i):
            if a[i].any() and b[j].any():
                out[i + j] += np.convolve(a[i], b[j])
    return out


def _halve(c: np.ndarray) -> np.ndarray:
    """Transfer operator on centred coefficient arrays: keep even frequencies."""
    F = (c.shape[1] - 1) // 2
    idx = np.arange(-F, F + 1)
    keep = idx % 2 == 0
    return c[:, keep]


def product_integral(factors: dict[int, np.ndarray], order: int = 0) -> np.ndarray:
    """int_0^1 prod_e g_e(2^e x) dx for factor jets g_e given as centred Fourier arrays.

    ``factors[e]`` has shape (order + 1, 2G + 1): coefficient of lambda^i at
    frequency m - G. Returns the lambda-jet of the integral (length order+1).
    """
    if not factors:
        out = np.zeros(order + 1)
        out[0] = 1.0
        return out
    emax = max(factors)
    if min(factors) < 0:
        raise ValueError("exponents must be >= 0")
    acc = np.zeros((order + 1, 1))
    acc[0, 0] = 1.0
    for e in range(emax + 1):
        if e > 0:
            acc = _halve(acc)
        g = factors.get(e)
        if g is not None:
            acc = _conv_jet(acc, g, order)
        # drop negligible outer coefficients to keep arrays short
        F = (acc.shape[1] - 1) // 2
        while F > 0 and not np.any(np.abs(acc[:, [0, -1]]) > 1e-300):
            acc = acc[:, 1:-1]
            F -= 1
    F = (acc.shape[1] - 1) // 2
    return acc[:, F].copy()


def _poly_jet(f: TrigPolynomial, weight: float) -> np.ndarray:
    """Jet of exp(lambda w f) to second order: 1 + lambda w f + lambda^2 w^2 f^2 / 2."""
    d = f.degree
    fc = np.zeros(2 * d + 1, dtype=complex)
    for j, c, s in f.harmonics():
        fc[d + j] += 0.5 * (c - 1j * s)
        fc[d - j] += 0.5 * (c + 1j * s)
    f2 = np.convolve(fc, fc)
    jet = np.zeros((3, 4 * d + 1), dtype=complex)
    jet[0, 2 * d] = 1.0
    jet[1, d:3 * d + 1] = weight * fc
    jet[2] = 0.5 * weight * weight * f2
    if np.abs(jet.imag).max() > 1e-15 * max(1.0, np.abs(jet.real).max()):
        raise ValueError("sine terms need complex jets; only cosine polynomials are supported here")
    return jet.real


def mean_square_dyadic(f: TrigPolynomial, seq: LacunarySequence, N: int, weights=None) -> float:
    """int_0^1 (sum_k w_k f(n_k x))^2 dx for power-of-two n_k, via second-order jets.

    Equals the mean of S_N^2 over any full dyadic grid of depth beyond
    log2(2 d n_N), where all cross terms alias away exactly.
    """
    exps = dyadic_exponents(seq.terms[:N])
    w = [1.0] * N if weights is None else [float(x) for x in weights]
    if not f.is_even:
        raise ValueError("only cosine polynomials are supported")
    factors = {e: _poly_jet(f, wk) for e, wk in zip(exps, w)}
    jet = product_integral(factors, order=2)
    return 2.0 * jet[2]


def _bessel_coeffs(lam: float, G: int) -> np.ndarray:
    """Fourier coefficients of exp(lam cos 2 pi y): I_|m|(lam), |m| <= G."""
    m = np.abs(np.arange(-G, G + 1))
    return special.iv(m, lam).reshape(1, -1)


def mgf_dyadic(exponents: Sequence[int], lam: float, G: int = 24) -> float:
    """int_0^1 exp(lam sum_k cos(2 pi 2^{e_k} x)) dx, Bessel series truncated at |m| <= G.

    The truncation error per factor is below (|lam|/2)^(G+1)/(G+1)!.
    """
    if len(set(exponents)) != len(exponents):
        raise ValueError("exponents must be distinct")
    factors = {int(e): _bessel_coeffs(lam, G) for e in exponents}
    return float(product_integral(factors, order=0)[0])
