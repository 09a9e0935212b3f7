"""Special-function wrappers against series oracles and classical identities."""

from fractions import Fraction

import math

import numpy as np
import pytest

from bie2d.specfun import (EULER_GAMMA, SpecFunDomainError, bessel_j, bessel_y,
                           greens, greens_gradient, hankel1)


def j_series(order, z, terms=40):
    """Ascending power series of J_0/J_1, valid for complex z."""
    z = complex(z)
    total = 0.0 + 0.0j
    for m in range(terms):
        num = (-0.25 * z * z) ** m
        den = math.factorial(m) * math.factorial(m + order)
        total += num / den
    return (0.5 * z) ** order * total


def y_series(order, z, terms=40):
    """Ascending series of Y_0/Y_1 via the logarithmic expansion."""
    z = complex(z)
    h = lambda m: sum(1.0 / l for l in range(1, m + 1))
    if order == 0:
        s = sum((-1) ** (m + 1) * h(m) * (0.25 * z * z) ** m / math.factorial(m) ** 2
                for m in range(1, terms))
        return (2.0 / np.pi) * ((np.log(z / 2.0) + EULER_GAMMA) * j_series(0, z) + s)
    s = sum((-1) ** m * (h(m) + h(m + 1)) * (0.25 * z * z) ** m
            / (math.factorial(m) * math.factorial(m + 1))
            for m in range(terms))
    return (2.0 / np.pi) * (np.log(z / 2.0) + EULER_GAMMA) * j_series(1, z) \
        - 2.0 / (np.pi * z) - (z / (2.0 * np.pi)) * s


def test_bessel_j_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_bessel_j0_of_one_against_exact_rational_series():
    # J_0(1) = sum (-1)^m / (4^m (m!)^2), summed in exact rational arithmetic
    total = Fraction(0)
    for m in range(30):
        total += Fraction((-1) ** m, 4**m * math.factorial(m) ** 2)
    oracle = float(total)
    assert abs(oracle - 0.7651976865579666) < 1e-15
    assert abs(bessel_j(0, 1.0) - oracle) < 1e-14


def test_bessel_j1_derivative_at_zero():
    eps = 1e-6
    deriv = (bessel_j(1, eps) - bessel_j(1, -eps)) / (2 * eps)
    assert abs(deriv - 0.5) < 1e-9


def test_bessel_j_complex_matches_series():
    for z in (1.5 + 0.5j, 0.3 - 2.0j, 4.0 + 1.0j):
        assert abs(bessel_j(0, z) - j_series(0, z)) < 1e-12 * max(1.0, abs(j_series(0, z)))
        assert abs(bessel_j(1, z) - j_series(1, z)) < 1e-12 * max(1.0, abs(j_series(1, z)))


def test_hankel1_of_one_against_series_oracle():
    oracle = j_series(0, 1.0) + 1j * y_series(0, 1.0)
    assert abs(hankel1(0, 1.0) - oracle) < 1e-12
    assert abs(hankel1(0, 1.0) - (0.7651976866 + 0.0882569642j)) < 1e-9


def test_hankel1_small_argument_log_law():
    # H_0^(1)(x) ~ (2i/pi) ln x, so the difference stays bounded as x -> 0
    vals = [hankel1(0, x) - (2j / np.pi) * np.log(x) for x in (1e-3, 1e-6, 1e-9)]
    assert np.all(np.abs(vals) < 2.0)
    spread = max(abs(v - vals[-1]) for v in vals)
    assert spread < 1e-5


@pytest.mark.parametrize("x", [0.5, 1.0, 10.0])
def test_wronskian_identity(x):
    w = bessel_j(1, x) * bessel_y(0, x) - bessel_j(0, x) * bessel_y(1, x)
    assert abs(w - 2.0 / (np.pi * x)) < 1e-12


def test_hankel_reflection_gives_y():
    # series oracle is cancellation-limited to ~e^x * eps, so stay at moderate x
    for x in (0.7, 3.0, 8.0):
        assert abs(np.imag(hankel1(0, x)) - y_series(0, x, terms=80)) < 1e-10


def test_hankel_recurrences_by_finite_differences():
    eps = 1e-6
    for z in (0.8, 2.5, 7.0):
        dh0 = (hankel1(0, z + eps) - hankel1(0, z - eps)) / (2 * eps)
        assert abs(dh0 + hankel1(1, z)) < 1e-7
        dzh1 = ((z + eps) * hankel1(1, z + eps) - (z - eps) * hankel1(1, z - eps)) / (2 * eps)
        assert abs(dzh1 - z * hankel1(0, z)) < 1e-7


def test_bessel_series_vs_upward_values_on_circle():
    for ang in np.linspace(0, 2 * np.pi, 7)[:-1]:
        z = 5.0 * np.exp(1j * ang)
        assert abs(bessel_j(0, z) - j_series(0, z, 60)) < 1e-11 * max(1.0, abs(j_series(0, z, 60)))


def test_greens_values():
    assert greens(0.0, 1.0) == 0.0
    val = greens(1.0, 1.0)
    oracle = 0.25j * (j_series(0, 1.0) + 1j * y_series(0, 1.0))
    assert abs(val - oracle) < 1e-13
    assert abs(val - (-0.022064 + 0.191299j)) < 1e-6


def test_greens_complex_wavenumber_matches_series():
    k = 1.0 + 1.0j
    oracle = 0.25j * (j_series(0, k, 60) + 1j * y_series(0, k, 60))
    assert abs(greens(k, 1.0) - oracle) < 1e-11


def test_domain_errors():
    with pytest.raises(SpecFunDomainError):
        hankel1(0, 0.0)
    with pytest.raises(SpecFunDomainError):
        hankel1(0, -2.0)
    with pytest.raises(SpecFunDomainError):
        greens(1.0, 0.0)
    with pytest.raises(SpecFunDomainError):
        greens(-1.0, 1.0)
    with pytest.raises(SpecFunDomainError):
        bessel_j(0, 2.0e4)
    with pytest.raises(ValueError):
        bessel_j(2, 1.0)


def test_greens_gradient_matches_finite_differences():
    k = 1.3
    r = np.array([0.7, -0.4])
    eps = 1e-6
    g = greens_gradient(k, r)
    for a in range(2):
        e = np.zeros(2)
        e[a] = eps
        fd = (greens(k, np.linalg.norm(r + e)) - greens(k, np.linalg.norm(r - e))) / (2 * eps)
        assert abs(g[a] - fd) < 1e-8
