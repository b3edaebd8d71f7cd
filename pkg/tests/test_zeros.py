import csv
import math

import numpy as np
import pytest

import zeros
from errors import BoundaryZero, InvalidParameter, NonConvergence
from simulate import LeafField
from zeros import (ZeroRecord, ZeroSet, arc_spacing, beak_offset_fraction, beak_spacing, find_zeros,
                   find_zeros_ensemble, nearest_neighbour_spacings, winding_number, write_zeros_csv,
                   zero_statistics)


def _log_linear(root):
    def log_z(points):
        return np.log(points - root)
    return log_z


def test_winding_number_of_linear_function():
    rect = (-1.0, 1.0, -1.0, 1.0)
    assert winding_number(_log_linear(0.3j), rect) == 1
    assert winding_number(_log_linear(2.0 + 0.3j), rect) == 0


def test_winding_number_zero_on_contour():
    with np.errstate(divide="ignore"):
        with pytest.raises(BoundaryZero):
            winding_number(_log_linear(1.0 + 0.0j), (-1.0, 1.0, -1.0, 1.0))


def test_two_exponentials_zeros_and_spacing():
    # Z = 1 + e^{2 beta} vanishes at beta = i pi (2k + 1) / 2
    field_ = LeafField.from_exponents([0.0, 2.0])
    zero_set = find_zeros(field_, (-0.5, 0.5, 0.5, 5.0))
    assert zero_set.count == 2
    locations = zero_set.locations
    assert list(locations) == pytest.approx([0.5j * math.pi, 1.5j * math.pi], abs=1e-10)
    assert abs(locations[1] - locations[0]) == pytest.approx(2.0 * math.pi / 2.0)
    assert all(z.residual < 1e-8 for z in zero_set.zeros)
    assert zero_set.audit[0].winding == 2


def test_double_zero_counted_twice():
    # (1 + e^beta)^2 has a double zero at i pi
    field_ = LeafField.from_exponents([0.0, 1.0, 1.0, 2.0])
    zero_set = find_zeros(field_, (-0.3, 0.5, 2.0, 4.5))
    assert zero_set.count == 2
    assert np.all(np.abs(zero_set.locations - 1j * math.pi) < 1e-5)


def test_newton_gives_up_when_iterations_run_out(monkeypatch):
    # Z = 1 + e^{2 beta}: zero at i pi / 2, start 0.07 away
    field_ = LeafField.from_exponents([0.0, 2.0])
    rect = (-0.4, 0.5, 0.5, 2.5)
    monkeypatch.setattr(zeros, "NEWTON_MAX_ITER", 2)
    assert zeros._newton(field_, 1.5j, rect) is None
    monkeypatch.setattr(zeros, "NEWTON_MAX_ITER", 60)
    assert zeros._newton(field_, 1.5j, rect) == pytest.approx(0.5j * math.pi, abs=1e-12)


def test_unpolished_cell_raises_at_depth_limit(monkeypatch):
    field_ = LeafField.from_exponents([0.0, 2.0])
    monkeypatch.setattr(zeros, "NEWTON_MAX_ITER", 2)
    with pytest.raises(NonConvergence):
        find_zeros(field_, (-0.4, 0.5, 0.5, 2.5), max_depth=0)


def test_slow_newton_start_is_subdivided(monkeypatch):
    field_ = LeafField.from_exponents([0.0, 2.0])
    monkeypatch.setattr(zeros, "NEWTON_MAX_ITER", 4)
    zero_set = find_zeros(field_, (-0.4, 0.5, 0.5, 2.5))
    assert zero_set.count == 1
    record = zero_set.zeros[0]
    assert record.value == pytest.approx(0.5j * math.pi, abs=1e-10)
    assert record.residual < 1e-9
    assert record.depth > 0


def test_find_zeros_rejects_degenerate_rectangle():
    with pytest.raises(InvalidParameter):
        find_zeros(LeafField.from_exponents([0.0, 1.0]), (1.0, 1.0, 0.0, 1.0))


def test_find_zeros_ensemble_is_worker_independent(rem):
    rect = (0.05, 0.45, 1.0, 2.0)
    single = find_zeros_ensemble(rem, 6, seed=2, replicates=3, rectangle=rect, threads=1)
    pooled = find_zeros_ensemble(rem, 6, seed=2, replicates=3, rectangle=rect, threads=2)
    assert [zs.replicate for zs in single] == [0, 1, 2]
    for a, b in zip(single, pooled):
        assert np.array_equal(a.locations, b.locations)


@pytest.mark.slow
def test_zero_density_in_fluctuation_phase(rem):
    rect = (0.05, 0.35, 1.0, 2.2)
    sets = find_zeros_ensemble(rem, 10, seed=17, replicates=30, rectangle=rect, threads=2)
    stats = zero_statistics(sets, rem, 10)
    assert stats.cells[0].predicted == pytest.approx(4.0)
    assert stats.pooled_density == pytest.approx(4.0, rel=0.35)


def _synthetic(points, rect=(0.0, 1.0, 0.0, 1.0), replicate=0):
    records = [ZeroRecord(value=complex(p), multiplicity=1, residual=0.0, depth=0) for p in points]
    return ZeroSet(rectangle=rect, zeros=records, replicate=replicate)


def test_zero_statistics_binning(rem):
    sets = [_synthetic([0.2 + 0.2j, 0.3 + 0.1j, 0.8 + 0.9j]), _synthetic([0.7 + 0.2j], replicate=1)]
    stats = zero_statistics(sets, rem, 10, bins=(2, 2))
    assert stats.total == 4
    assert stats.replicates == 2
    counts = [c.count for c in stats.cells]
    assert counts == [2, 0, 1, 1]
    assert stats.cells[0].empirical == pytest.approx(2.0 * math.pi * 2 / (10 * 0.25 * 2))
    assert stats.pooled_density == pytest.approx(2.0 * math.pi * 4 / (10 * 1.0 * 2))
    with pytest.raises(InvalidParameter):
        zero_statistics([], rem, 10)


def test_beak_spacing(rem):
    beta_star = 0.6 + 0.4j
    assert beak_spacing(rem, 30, beta_star, 1, finite_n=False) == pytest.approx(
        math.sqrt(2.0) * math.pi / (2.0 * 0.4 * 30))
    n = 400
    assert beak_spacing(rem, n, beta_star, 1) == pytest.approx(beak_spacing(rem, n, beta_star, 1, False), rel=0.01)


def test_arc_spacing(rem):
    beta_star = complex(0.3, math.sqrt(0.5 - 0.09))
    assert arc_spacing(rem, 20, beta_star) == pytest.approx(2.0 * math.pi / (2.0 * math.sqrt(0.5) * 20))


def test_nearest_neighbour_spacings():
    sets = [_synthetic([0.0, 0.1, 0.35, 5.0]), _synthetic([0.2j])]
    spacings = nearest_neighbour_spacings(sets, 0.0, 1.0)
    assert sorted(spacings) == pytest.approx([0.1, 0.1, 0.25])


def test_beak_offset_fraction(rem):
    sets = [_synthetic([0.1 + 0.1j, 2.0 + 0.05j, 0.15 + 0.1j, 1.9 + 0.1j])]
    assert beak_offset_fraction(sets, rem, 1, 1.0, 5.0) == pytest.approx(0.5)
    assert math.isnan(beak_offset_fraction(sets, rem, 1, 10.0, 0.1))


def test_write_zeros_csv(tmp_path):
    path = tmp_path / "zeros.csv"
    write_zeros_csv(str(path), [_synthetic([0.1 + 0.2j], replicate=4)])
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["replicate", "re", "im", "multiplicity", "residual", "cell_depth"]
    assert rows[1][0] == "4"
    assert float(rows[1][1]) == 0.1 and float(rows[1][2]) == 0.2
