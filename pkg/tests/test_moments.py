import cmath
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from errors import GeometryError, InvalidParameter, PhaseBoundary
from model import branching_numbers
from moments import (asymptotic_log_variance, exp_vs_std_ratio, expectation, gauss_truncated_moment,
                     log_phi_complex, log_sum_exp_complex, mills_ratio_bound, pair_correlation,
                     phi_complex, variance_exact, window_correlation)


def test_phi_complex_matches_real_cdf():
    for x in (-6.0, -1.3, 0.0, 0.7, 4.0):
        assert phi_complex(x).real == pytest.approx(norm.cdf(x), rel=1e-10, abs=1e-15)
        assert abs(phi_complex(x).imag) < 1e-14


def test_phi_complex_reflection():
    z = 0.4 - 1.1j
    assert phi_complex(z) + phi_complex(-z) == pytest.approx(1.0)


def test_log_phi_deep_tail():
    assert log_phi_complex(-40.0).real == pytest.approx(norm.logcdf(-40.0), rel=1e-8)
    assert log_phi_complex(8.0).real == pytest.approx(norm.logcdf(8.0), abs=1e-14)


def test_gauss_truncated_moment_by_quadrature():
    w, a = 0.5 + 0.3j, 0.3

    def piece(x, part):
        value = cmath.exp(w * x) * math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        return value.real if part == 0 else value.imag

    re, _ = integrate.quad(piece, a, np.inf, args=(0,))
    im, _ = integrate.quad(piece, a, np.inf, args=(1,))
    assert gauss_truncated_moment(w, a) == pytest.approx(complex(re, im), rel=1e-8)

    upper = gauss_truncated_moment(w, a, "upper")
    lower = gauss_truncated_moment(w, a, "lower")
    assert upper + lower == pytest.approx(cmath.exp(0.5 * w * w))
    with pytest.raises(InvalidParameter):
        gauss_truncated_moment(w, a, "middle")


def test_mills_ratio_bound():
    assert norm.sf(2.0) < mills_ratio_bound(2.0)
    with pytest.raises(InvalidParameter):
        mills_ratio_bound(0.0)


def test_log_sum_exp_complex():
    logs = [math.log(2.0) + 0.5j, math.log(3.0) - 0.2j]
    expected = 2.0 * cmath.exp(0.5j) + 3.0 * cmath.exp(-0.2j)
    assert cmath.exp(log_sum_exp_complex(logs)) == pytest.approx(expected)
    assert log_sum_exp_complex([complex(-math.inf, 0.0)]).real == -math.inf


def test_expectation_at_zero_is_leaf_count(canonical):
    _, total = branching_numbers(canonical, 3)
    assert expectation(canonical, 3, 0.0) == pytest.approx(total)


def test_variance_vanishes_at_zero(canonical):
    report = variance_exact(canonical, 3, 0.0)
    assert report.var == 0.0
    assert report.log_var == -math.inf
    assert exp_vs_std_ratio(canonical, 3, 0.0) == math.inf


def test_rem_second_moment_closed_form(rem):
    n = 6
    beta = 0.4 + 0.7j
    (N,), _ = branching_numbers(rem, n)
    a = 2.0
    sigma, tau = beta.real, beta.imag
    second = N * math.exp(2 * sigma ** 2 * a * n) + N * (N - 1) * abs(cmath.exp(0.5 * beta ** 2 * a * n)) ** 2
    var = N * math.exp((sigma ** 2 - tau ** 2) * a * n) * math.expm1(abs(beta) ** 2 * a * n)
    report = variance_exact(rem, n, beta)
    assert report.second_abs == pytest.approx(second, rel=1e-10)
    assert report.var == pytest.approx(var, rel=1e-10)
    assert report.second_abs - abs(report.mean) ** 2 == pytest.approx(report.var, rel=1e-8)


def test_two_level_variance_by_enumeration(canonical):
    # brute-force sum over ordered leaf pairs grouped by overlap
    n = 2
    beta = 0.3 + 0.5j
    (n1, n2), total = branching_numbers(canonical, n)
    a1, a2 = canonical.a
    s2 = beta.real ** 2
    second = 0.0
    for overlap, pairs in ((0, total * (total - n2)), (1, total * (n2 - 1)), (2, total)):
        head = (a1 if overlap >= 1 else 0.0) + (a2 if overlap == 2 else 0.0)
        tail = a1 + a2 - head
        second += pairs * math.exp(2 * s2 * head * n + (beta.real ** 2 - beta.imag ** 2) * tail * n)
    assert variance_exact(canonical, n, beta).second_abs == pytest.approx(second, rel=1e-10)


def test_log_variance_rate(rem):
    beta = 0.3 + 0.8j
    n = 100
    report = variance_exact(rem, n, beta)
    assert report.log_var / n == pytest.approx(report.b[0], abs=1e-3)
    assert report.dominant == 1


def test_boundary_factor_on_inner_circle(canonical):
    # |beta| = sigma_2 / sqrt 2 = 1
    _, dominant, factor = asymptotic_log_variance(canonical, 10, 1j)
    assert (dominant, factor) == (2, 2)
    _, _, factor = asymptotic_log_variance(canonical, 10, 0.5j)
    assert factor == 1


def test_pair_correlation_diagonal(canonical):
    beta = 0.6 + 0.2j
    pair = pair_correlation(canonical, 4, beta, beta)
    report = variance_exact(canonical, 4, beta)
    assert pair.conj.real == pytest.approx(report.second_abs, rel=1e-10)
    assert abs(pair.conj.imag) < 1e-6 * report.second_abs
    assert len(pair.conj_terms) == 3


def test_window_correlation_sqrt_scaling(rem):
    t1, t2 = 0.1 + 0.05j, 0.2j
    corr = window_correlation(rem, 30, 0.3 + 0.8j, t1, t2)
    assert corr.ring == 1
    assert corr.cov_conj == pytest.approx(corr.limit_cov_conj, rel=1e-8)
    assert corr.limit_cov_conj == pytest.approx(cmath.exp(-0.5 * 2.0 * (t1 - t2.conjugate()) ** 2))


def test_window_correlation_linear_scaling(rem):
    beta_star = complex(0.3, math.sqrt(0.5 - 0.09))
    t1, t2 = 0.1, 0.05j
    corr = window_correlation(rem, 200, beta_star, t1, t2, scaling="linear")
    assert corr.cov_conj == pytest.approx(corr.limit_cov_conj, rel=1e-2)
    assert corr.mean == pytest.approx(corr.limit_mean, rel=1e-2)


def test_window_correlation_geometry_errors(rem):
    on_circle = complex(0.3, math.sqrt(0.5 - 0.09))
    with pytest.raises(PhaseBoundary):
        window_correlation(rem, 20, on_circle, 0.1, 0.1)
    with pytest.raises(GeometryError):
        window_correlation(rem, 20, 0.3 + 0.8j, 0.1, 0.1, scaling="linear")
    with pytest.raises(InvalidParameter):
        window_correlation(rem, 20, 0.3 + 0.8j, 0.1, 0.1, scaling="cubic")
