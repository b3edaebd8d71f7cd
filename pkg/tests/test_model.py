import cmath
import json
import math

import pytest

from errors import (ConvexityViolation, GeometryError, InvalidParameter, LeafBudgetExceeded,
                    ModelFileError, PhaseBoundary, UnknownKind)
from model import (ComplexTemp, Normalizers, branching_numbers, build_model, effective_zeta_argument,
                   level_words, load_model, log_branching_numbers, model_to_dict, normalizer,
                   ring_index, solve_u, solve_u_log)


def test_critical_temperatures(rem, canonical):
    assert rem.sigma[0] == pytest.approx(1.0)
    assert canonical.sigma == pytest.approx((1.0, math.sqrt(2.0)))


def test_convexity_violation_names_sigma_ordering():
    with pytest.raises(ConvexityViolation, match="sigma ordering"):
        build_model(2, [1.0, 1.0], [4.0, 2.0])


@pytest.mark.parametrize("a, alpha", [([0.0], [2.0]), ([-1.0], [2.0]), ([1.0], [1.0]), ([1.0], [0.5])])
def test_invalid_parameters(a, alpha):
    with pytest.raises(InvalidParameter):
        build_model(1, a, alpha)


def test_length_mismatch():
    with pytest.raises(InvalidParameter):
        build_model(2, [1.0], [2.0, 3.0])


def test_partial_variances(canonical):
    assert canonical.partial_variance(1, 2) == canonical.total_variance == 4.0
    assert canonical.partial_variance(2, 1) == 0.0
    assert canonical.partial_variance(2, 2) == 2.0


def test_branching_numbers_floor(rem, canonical):
    assert branching_numbers(rem, 4) == ((54,), 54)
    assert branching_numbers(canonical, 2) == ((7, 54), 378)
    with pytest.raises(InvalidParameter):
        branching_numbers(rem, 0)


def test_branching_numbers_budget(desk_rem):
    with pytest.raises(LeafBudgetExceeded):
        branching_numbers(desk_rem, 20, leaf_budget=1000)
    counts, total = branching_numbers(desk_rem, 20, leaf_budget=1000, enforce_budget=False)
    assert total == 2 ** 20


def test_branching_budget_from_environment(desk_rem, monkeypatch):
    monkeypatch.setenv("GREM_LEAF_BUDGET", "100")
    with pytest.raises(LeafBudgetExceeded):
        branching_numbers(desk_rem, 10)


def test_explicit_branching():
    model = build_model(1, [2.0], [math.e], {"explicit": {"3": [5]}})
    assert branching_numbers(model, 3) == ((5,), 5)
    with pytest.raises(InvalidParameter):
        branching_numbers(model, 4)


def test_log_branching_numbers_match_exact(canonical):
    counts, _ = branching_numbers(canonical, 3)
    assert log_branching_numbers(canonical, 3) == pytest.approx(tuple(math.log(c) for c in counts))
    # far beyond any leaf budget
    assert log_branching_numbers(canonical, 200) == pytest.approx((200.0, 400.0))


def test_solve_u_residual():
    for N in (2, 54, 1e6, 1e40):
        u = solve_u(N)
        assert math.sqrt(2 * math.pi) * u * math.exp(u * u / 2) == pytest.approx(N, rel=1e-10)


def test_solve_u_known_value():
    assert solve_u(54) == pytest.approx(2.15, abs=0.01)


def test_solve_u_large_log_n():
    u = solve_u_log(500.0)
    assert u / math.sqrt(2 * 500.0) == pytest.approx(1.0, abs=0.01)


def test_solve_u_rejects_small_n():
    with pytest.raises(InvalidParameter):
        solve_u(1.5)


def test_complex_temp_parse():
    assert ComplexTemp.parse("0.3+0.1i").beta == complex(0.3, 0.1)
    assert ComplexTemp.parse("0.3-0.1j").beta == complex(0.3, -0.1)
    assert ComplexTemp.parse("1.5i").beta == complex(0.0, 1.5)
    assert ComplexTemp.parse("-2").beta == complex(-2.0, 0.0)
    assert ComplexTemp(3.0, 4.0).modulus == 5.0
    assert ComplexTemp(1.0, 2.0).conjugate().tau == -2.0
    with pytest.raises(InvalidParameter):
        ComplexTemp.parse("abc")


def test_model_file_round_trip(tmp_path, canonical):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model_to_dict(canonical)))
    loaded = load_model(str(path))
    assert loaded.sigma == pytest.approx(canonical.sigma)


def test_model_file_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"d": 1, "a": [1.0]}')
    with pytest.raises(ModelFileError):
        load_model(str(path))
    with pytest.raises(ModelFileError):
        load_model(str(tmp_path / "missing.json"))


def test_ring_index(canonical):
    assert ring_index(canonical, 0.5) == (0, False)
    assert ring_index(canonical, complex(math.sqrt(0.5), 0.0)) == (1, True)
    assert ring_index(canonical, 0.9) == (1, False)
    assert ring_index(canonical, 2.0) == (2, False)


def test_c_nk_expectation_level(canonical):
    norms = Normalizers(canonical, 5)
    beta = 0.2 + 0.1j
    expected = norms.log_counts[0] + 0.5 * 2.0 * beta ** 2 * 5
    assert norms.c_level(beta, 1) == pytest.approx(expected)
    assert norms.c_level(0.0, 2) == pytest.approx(norms.log_counts[1])


def test_c_n_sums_levels(canonical):
    norms = Normalizers(canonical, 6)
    beta = 1.5 + 0.2j
    assert norms.c_n(beta) == pytest.approx(norms.c_level(beta, 1) + norms.c_level(beta, 2))
    assert norms.c_tilde(beta) == pytest.approx(norms.c_level(beta, 2))


def test_c_n_glassy_level_uses_u(rem):
    norms = Normalizers(rem, 8)
    beta = 1.5 + 0.2j
    assert norms.c_level(beta, 1) == pytest.approx(beta * math.sqrt(8 * 2.0) * norms.u(1))
    # reflection beta -> -beta
    assert norms.c_level(-beta, 1) == pytest.approx(beta * math.sqrt(8 * 2.0) * norms.u(1))


def test_c_n_fluctuation_level(rem):
    norms = Normalizers(rem, 8)
    beta = 0.2 + 1.0j
    assert norms.c_level(beta, 1) == pytest.approx(0.5 * norms.log_counts[0] + 2.0 * 8 * 0.04)


def test_c_n_on_boundary(rem):
    with pytest.raises(PhaseBoundary):
        normalizer(rem, 5, "c_n", 0.5 + 0.9j)


def test_c_n_continuous_inside_phase(canonical):
    norms = Normalizers(canonical, 10)
    for beta in (0.2 + 0.1j, 0.3 + 1.2j, 1.6 + 0.3j):
        h = 1e-7
        assert abs(norms.c_n(beta + h) - norms.c_n(beta)) < 1e-4


def test_unknown_normalizer(rem):
    with pytest.raises(UnknownKind):
        normalizer(rem, 5, "z_n", 0.1)


def test_d_nl_reduced_mod_2pi(rem):
    beta_star = 0.6 + 0.4j
    n = 30
    d = normalizer(rem, n, "d_nl", beta_star, level=1)
    raw = -beta_star * math.log(4 * math.pi * n * 1.0) / 2.0 + 1j * n * 2.0 * 0.16
    assert abs(d.imag) <= math.pi + 1e-12
    assert (raw - d).real == pytest.approx(0.0, abs=1e-12)
    assert ((raw - d).imag / (2 * math.pi)) == pytest.approx(round((raw - d).imag / (2 * math.pi)), abs=1e-9)


def test_beak_window_rotation(rem):
    norms = Normalizers(rem, 30)
    beta_star = 0.6 + 0.4j
    w0 = norms.beak_window(beta_star, 1)
    w1 = norms.beak_window(beta_star, 1, 1.0)
    step = (w1 - w0) * math.sqrt(2.0) * 2.0 * 0.4 * 30
    assert step == pytest.approx(cmath.exp(-0.75j * math.pi))


def test_beak_geometry_checked(rem):
    with pytest.raises(GeometryError):
        normalizer(rem, 10, "d_nl", 0.6 + 0.5j, level=1)
    with pytest.raises(InvalidParameter):
        normalizer(rem, 10, "d_nl", 0.6 + 0.4j)


def test_h_hat_level_one_is_log_expectation_exponent(rem):
    norms = Normalizers(rem, 12)
    beta_star = 0.7 + 0.3j
    assert norms.h_hat(beta_star, 1) == pytest.approx(norms.log_counts[0] + 0.5 * beta_star ** 2 * 12 * 2.0)


def test_g_hat_and_g_n(canonical):
    norms = Normalizers(canonical, 10)
    beta_star = 1.0 + 0.5j
    # |beta*| above both circles: first branch everywhere
    expected = sum(0.5 * norms.log_counts[l] + 2.0 * (math.sqrt(10) * 1.0) ** 2 for l in range(2))
    assert norms.g_n(beta_star) == pytest.approx(expected)
    with pytest.raises(PhaseBoundary):
        norms.g_n(complex(math.sqrt(0.5), 0.0))


def test_r_n_on_fluctuation_line(rem):
    norms = Normalizers(rem, 10)
    beta = 0.5 + 1.0j
    expected = 0.5 * norms.log_counts[0] + 2.0 * 0.25 * 10
    assert norms.r_n(beta) == pytest.approx(expected)
    with pytest.raises(GeometryError):
        norms.r_n(0.4 + 1.0j)


def test_f_n_on_arc(canonical):
    norms = Normalizers(canonical, 10)
    # |beta*|^2 = 1/2 with sigma* < 1/2: one fluctuation level, one expectation level
    beta_star = complex(0.3, math.sqrt(0.5 - 0.09))
    assert norms.arc_levels(beta_star) == (0, 1)
    expected = (0.5 * norms.log_counts[0] + 2.0 * 0.09 * 10
                + norms.log_counts[1] + 0.5 * 2.0 * beta_star ** 2 * 10)
    assert norms.f_n(beta_star) == pytest.approx(expected)


def test_effective_zeta_argument_tends_to_ratio(rem):
    z_small = effective_zeta_argument(rem, 10, 1.5 + 0.2j, 1)[0]
    z_large = effective_zeta_argument(rem, 200, 1.5 + 0.2j, 1)[0]
    target = 1.5 + 0.2j
    assert abs(z_large - target) < abs(z_small - target)


def test_level_words():
    assert level_words(1) == ["E", "F", "G"]
    assert len(level_words(4)) == 15
