import math

import numpy as np
import pytest

from cascade import (fullness_condition_number, has_no_atoms, hill_tail_index, i_gamma, intensity_count,
                     regularized_piece, sample_cascade, stability_test, tail_index, truncated_moment,
                     zeta_direct, zeta_eval, zeta_recursive, zeta_samples)
from errors import DomainError, InvalidParameter, PoleProximity


def test_i_gamma_two_levels():
    assert i_gamma((3.0, 2.0), 1.0, (1.2, 1.0)) == pytest.approx(1.25)


def test_i_gamma_one_level_closed_form():
    z, a, g = 2.5 + 0.3j, 3.0, 0.7
    assert i_gamma((z,), a, (g,)) == pytest.approx(a ** ((1.0 - z) / g) / (z - 1.0))


def test_i_gamma_validation():
    with pytest.raises(InvalidParameter):
        i_gamma((3.0, 2.0), 1.0, (1.0, 1.2))
    with pytest.raises(InvalidParameter):
        i_gamma((3.0, 2.0), 0.0, (1.2, 1.0))
    with pytest.raises(DomainError):
        i_gamma((1.2, 1.4), 1.0, (1.2, 1.0))


def test_sample_cascade_reproducible():
    first = sample_cascade(2, 20.0, seed=4, replicate=1)
    again = sample_cascade(2, 20.0, seed=4, replicate=1)
    other = sample_cascade(2, 20.0, seed=4, replicate=2)
    assert first.level_counts() == again.level_counts()
    for a, b in zip(first.points, again.points):
        assert np.array_equal(a, b)
    assert not np.array_equal(first.points[0], other.points[0])


def test_sample_cascade_structure():
    sample = sample_cascade(3, 10.0, seed=0, first_T=25.0)
    assert sample.truncations == (25.0, 10.0, 10.0)
    assert sample.T == 25.0
    assert np.all(sample.points[0] <= 25.0)
    for j in range(1, 3):
        assert np.all(sample.points[j] <= 10.0)
        assert sample.parents[j].size == sample.points[j].size
        assert np.all(np.diff(sample.parents[j]) >= 0)
        assert sample.parents[j].max() < sample.points[j - 1].size


def test_sample_cascade_validation():
    with pytest.raises(InvalidParameter):
        sample_cascade(0, 10.0, seed=0)
    with pytest.raises(InvalidParameter):
        sample_cascade(1, -1.0, seed=0)


def test_unit_intensity():
    for d in (1, 2):
        counts = [intensity_count(sample_cascade(d, 3.0, seed=8, replicate=r)) for r in range(2000)]
        assert np.mean(counts) == pytest.approx(1.0, abs=0.12)


def test_direct_and_recursive_agree_in_domain():
    sample = sample_cascade(2, 30.0, seed=1)
    z = (2.5 + 0.4j, 1.5 - 0.2j)
    assert zeta_recursive(sample, z) == pytest.approx(zeta_direct(sample, z), rel=1e-10)
    assert zeta_recursive(sample, z, truncation=5.0) == pytest.approx(zeta_direct(sample, z, 5.0), rel=1e-10)


def test_empty_sample_gives_zero():
    sample = sample_cascade(2, 1e-12, seed=0)
    assert sample.level_counts() == [0, 0]
    assert zeta_direct(sample, (3.0, 2.0)) == 0
    assert zeta_recursive(sample, (3.0, 2.0)) == 0


def test_zeta_eval_one_level_identities():
    sample = sample_cascade(1, 50.0, seed=3)
    z = 0.8 + 0.3j
    result = zeta_eval(sample, z, ladder=[10.0, 20.0, 1e9])
    assert result.ladder == [10.0, 20.0, 50.0]
    assert len(result.increments) == 2
    assert result.uncertainty == result.increments[-1]
    assert result.value == pytest.approx(result.raw + 50.0 ** (1.0 - z) / (z - 1.0))
    assert result.value == pytest.approx(result.raw - result.regularizer + 1.0 / (z - 1.0))
    assert result.scaled == pytest.approx((z - 1.0) * result.value)


def test_zeta_eval_domain_mode_is_plain_sum():
    sample = sample_cascade(2, 40.0, seed=6)
    z = (3.0, 1.8)
    result = zeta_eval(sample, z, mode="domain", ladder=[])
    assert result.value == pytest.approx(zeta_direct(sample, z))
    assert result.increments == []


def test_zeta_eval_rejections():
    sample = sample_cascade(2, 10.0, seed=0)
    with pytest.raises(DomainError):
        zeta_eval(sample, (1.5, 0.9), mode="domain")
    with pytest.raises(DomainError):
        zeta_eval(sample, (0.9, 0.4))
    with pytest.raises(DomainError):
        zeta_eval(sample, (0.7, 0.8))
    with pytest.raises(PoleProximity):
        zeta_eval(sample, (1.5, 1.0 + 1e-8))
    with pytest.raises(InvalidParameter):
        zeta_eval(sample, (1.5,))
    with pytest.raises(InvalidParameter):
        zeta_eval(sample, (1.5, 1.2), mode="analytic")


def test_regularized_piece_has_zero_mean():
    z = 2.0
    values = np.array([regularized_piece(sample_cascade(1, 20.0, seed=12, replicate=r), (z,))
                       for r in range(4000)])
    assert abs(values.mean()) < 0.05
    # (z - 1)^2 times the integral of x^{-2z} over [1, T]
    assert values.real.var() == pytest.approx((1.0 - 20.0 ** -3) / 3.0, rel=0.15)


def test_regularized_piece_variance_scaling():
    z = 1.5 + 0.5j
    samples = [sample_cascade(1, 40.0, seed=21, replicate=r) for r in range(3000)]
    near = np.array([regularized_piece(s, (z,), a=1.0) for s in samples])
    far = np.array([regularized_piece(s, (z,), a=4.0) for s in samples])
    ratio = np.mean(np.abs(far) ** 2) / np.mean(np.abs(near) ** 2)
    assert ratio == pytest.approx(4.0 ** (1.0 - 2.0 * z.real), rel=0.25)


def test_regularized_piece_two_levels_matches_i_gamma():
    sample = sample_cascade(2, 1e-12, seed=0)
    z, gamma = (3.0, 2.0), (1.2, 1.0)
    assert regularized_piece(sample, z, 1.0, gamma) == pytest.approx(-(2.0 - 1.0) * 1.25)
    with pytest.raises(InvalidParameter):
        regularized_piece(sample, z, 1.0, (1.0,))


def test_zeta_samples_independent_of_workers():
    z = (0.9 + 0.2j, 0.7)
    single = zeta_samples(2, z, 16, 30.0, seed=5, threads=1)
    pooled = zeta_samples(2, z, 16, 30.0, seed=5, threads=2)
    assert np.array_equal(single, pooled)
    with pytest.raises(InvalidParameter):
        zeta_samples(2, (0.9,), 4, 10.0, seed=0)


def test_stability_single_copy():
    report = stability_test(1, 0.8, 1, 400, 40.0, seed=2, threads=1)
    assert report.m == 1
    assert report.passed(0.001)


def test_stability_three_copies():
    report = stability_test(1, 0.8 + 0.2j, 3, 300, 40.0, seed=5, threads=1)
    assert report.passed(0.001)
    assert report.log_modulus_quantile_gap < 0.5
    with pytest.raises(InvalidParameter):
        stability_test(1, 0.8, 0, 10, 10.0)


def test_tail_index_of_constant_law():
    report = tail_index(1, 1.0, 50, 20.0, seed=0, threads=1)
    assert math.isinf(report.index)
    assert math.isinf(report.expected)
    assert report.relative_error == 0.0


@pytest.mark.slow
def test_tail_index_one_level():
    report = tail_index(1, 1.6, 20000, 30.0, seed=1, k=400)
    assert report.expected == pytest.approx(1.0 / 1.6)
    assert report.relative_error < 0.15


def test_hill_estimator_on_pareto():
    rng = np.random.default_rng(0)
    samples = rng.pareto(1.5, 20000) + 1.0
    assert hill_tail_index(samples, k=500) == pytest.approx(1.5, rel=0.1)
    with pytest.raises(InvalidParameter):
        hill_tail_index([1.0, 2.0], k=5)


def test_sample_diagnostics():
    assert truncated_moment([1.0, -3.0j], 2) == pytest.approx(5.0)
    assert has_no_atoms([1.0, 2.0, 1j])
    assert not has_no_atoms([1.0, 1.0])
    rng = np.random.default_rng(1)
    full = rng.normal(size=500) + 1j * rng.normal(size=500)
    assert fullness_condition_number(full) < 2.0
    assert fullness_condition_number(rng.normal(size=500).astype(complex)) > 1e6
