import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from combexit.series import (
    DEFAULT_SERIES_PARAMS,
    SeriesParams,
    build_disk_law,
    default_disk_law,
    disk_survival,
    rect_exit_tb_prob,
    sample_disk_exit,
    scaled_strip_moment,
    strip_moment,
    strip_survival,
    theta0,
)
from combexit.series import (
    _interval_moment_exact,
    _strip_moment_quadrature,
    _strip_survival_images,
    _strip_survival_spectral,
)

# independently derived reference values (rational recursion / Dirichlet-beta
# sums / direct high-precision summation)
RECT_21 = 0.8902302005857929
MOMENT_HALF = 0.9305277754396651
MOMENT_3_HALVES = 1.2215285530117383
MOMENT_5_HALVES = 2.4997153357974438


def test_rect_square_is_half():
    assert rect_exit_tb_prob(1.0, 1.0) == pytest.approx(0.5, abs=1e-12)


def test_rect_frozen_values():
    assert rect_exit_tb_prob(2.0, 1.0) == pytest.approx(RECT_21, abs=1e-12)
    assert rect_exit_tb_prob(1.0, 2.0) == pytest.approx(1.0 - RECT_21, abs=1e-12)


def test_rect_tall_limit():
    vals = [rect_exit_tb_prob(1.0, b) for b in (2.0, 5.0, 10.0, 50.0)]
    assert vals[-1] < 0.01
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_rect_validation():
    with pytest.raises(ValueError):
        rect_exit_tb_prob(0.0, 1.0)
    with pytest.raises(ValueError):
        rect_exit_tb_prob(1.0, -2.0)
    with pytest.raises(ValueError):
        rect_exit_tb_prob(1.0, math.inf)


def test_series_params_validation():
    with pytest.raises(ValueError):
        SeriesParams(truncation_terms=0)
    with pytest.raises(ValueError):
        SeriesParams(abs_tolerance=0.0)
    # a cap too small for the requested tolerance is reported, not hidden
    with pytest.raises(ValueError, match="cannot reach"):
        rect_exit_tb_prob(1.0, 1.0, SeriesParams(truncation_terms=2))


@given(st.floats(0.3, 5.0), st.floats(0.3, 5.0))
@settings(max_examples=150, deadline=None)
def test_rect_side_roles_sum_to_one(a, b):
    total = rect_exit_tb_prob(a, b) + rect_exit_tb_prob(b, a)
    assert total == pytest.approx(1.0, abs=2e-12)


def test_theta0_unit_aspect():
    res = theta0(1.0)
    assert res.theta0 == pytest.approx(0.75, abs=1e-12)
    assert res.p_top_bottom == pytest.approx(0.5, abs=1e-12)
    assert res.theta0 == 1.0 - 0.5 * res.p_top_bottom
    assert res.remainder_bound < 1e-12


def test_theta0_flat_limit():
    assert theta0(1e-3).theta0 == pytest.approx(0.5, abs=1e-3)


def test_theta0_increasing_and_bounded():
    grid = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    vals = [theta0(e).theta0 for e in grid]
    assert all(x < y for x, y in zip(vals, vals[1:]))
    assert all(0.5 < v < 1.0 for v in vals)
    assert vals[3] > 0.75  # ell=2 beats the unit square


def test_theta0_saturates_at_extreme_aspect():
    # beyond ell ~ 23 the top/bottom probability underflows one ulp of 1 and
    # the factor rounds to exactly 1, the conservative side for certification;
    # below ell ~ 0.043 it rounds to exactly 1/2 for the mirror reason
    assert theta0(128.0).theta0 == 1.0
    assert theta0(0.01).theta0 == 0.5


def test_theta0_frozen_value():
    assert theta0(2.0).theta0 == pytest.approx(0.9451151002928964, abs=1e-12)


def test_theta0_validation():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            theta0(bad)


def test_survival_endpoints():
    assert strip_survival(0.0) == 1.0
    s10 = strip_survival(10.0)
    assert 0.0 < s10 <= (4.0 / math.pi) * math.exp(-math.pi**2 * 10 / 8) * (1 + 1e-9)
    with pytest.raises(ValueError):
        strip_survival(-0.1)
    with pytest.raises(ValueError):
        strip_survival([0.5, math.nan])


def test_survival_monotone_and_vectorized():
    t = np.linspace(0.0, 6.0, 301)
    s = strip_survival(t)
    assert s.shape == t.shape
    assert np.all(np.diff(s) <= 1e-15)
    assert np.array_equal(s, strip_survival(t))  # pure, bit-identical


def test_survival_representations_agree():
    # both expansions are accurate on a band around the crossover
    t = np.linspace(0.02, 0.3, 57)
    spectral = _strip_survival_spectral(t, DEFAULT_SERIES_PARAMS)
    images = _strip_survival_images(t)
    assert np.max(np.abs(spectral - images)) < 1e-13


def test_survival_integrates_to_mean():
    val, _ = quad(lambda t: strip_survival(t), 0.0, np.inf, limit=200)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_survival_log_slope():
    rate = math.log(strip_survival(5.0)) - math.log(strip_survival(6.0))
    assert rate == pytest.approx(math.pi**2 / 8, abs=1e-6)


def test_integer_moments_exact():
    from fractions import Fraction

    assert _interval_moment_exact(1) == 1
    assert _interval_moment_exact(2) == Fraction(5, 3)
    assert _interval_moment_exact(3) == Fraction(61, 15)
    assert _interval_moment_exact(4) == Fraction(277, 21)
    assert strip_moment(2) == pytest.approx(5.0 / 3.0, abs=1e-14)
    assert strip_moment(3.0) == pytest.approx(61.0 / 15.0, abs=1e-14)


def test_fractional_moments_frozen():
    assert strip_moment(0.5) == pytest.approx(MOMENT_HALF, abs=1e-9)
    assert strip_moment(1.5) == pytest.approx(MOMENT_3_HALVES, abs=1e-9)
    assert strip_moment(2.5) == pytest.approx(MOMENT_5_HALVES, abs=1e-9)


def test_quadrature_path_matches_recursion():
    for p in (1.0, 2.0):
        quad_val = _strip_moment_quadrature(p, DEFAULT_SERIES_PARAMS)
        assert quad_val == pytest.approx(strip_moment(p), abs=1e-9)


def test_moment_monotone_in_p():
    grid = [0.5, 1.0, 1.5, 2.0, 3.0]
    vals = [strip_moment(p) for p in grid]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_moment_validation():
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(ValueError):
            strip_moment(bad)


def test_scaled_strip_moment():
    assert scaled_strip_moment(1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert scaled_strip_moment(1.0, 2.0, 1.0) == pytest.approx(4.0)
    assert scaled_strip_moment(3.0, 2.0, 2.0) == pytest.approx(135.0)
    with pytest.raises(ValueError):
        scaled_strip_moment(0.0, 1.0, 1.0)


def test_disk_survival_shape():
    assert disk_survival(0.01) == pytest.approx(1.0, abs=1e-12)
    t = np.linspace(0.05, 4.0, 80)
    s = disk_survival(t)
    assert np.all(np.diff(s) < 0)
    # leading eigenvalue controls the tail
    lam1 = 0.5 * 2.404825557695773**2
    rate = math.log(disk_survival(3.0)) - math.log(disk_survival(4.0))
    assert rate == pytest.approx(lam1, abs=1e-9)


def test_disk_table_build():
    table = build_disk_law()
    assert len(table.u_knots) >= 4096
    assert table.mean_error < 5e-6
    assert table.second_moment_error < 5e-5
    # seam between interpolant and analytic tail is continuous
    lo = float(table.times_from_uniform(table.u_cut - 1e-12))
    hi = float(table.times_from_uniform(table.u_cut + 1e-12))
    assert abs(hi - lo) < 1e-6


def test_disk_table_validation_errors():
    with pytest.raises(ValueError):
        build_disk_law(n_knots=4)
    with pytest.raises(ValueError):
        build_disk_law(u_cut=0.5)


def test_disk_quantiles_monotone():
    table = default_disk_law()
    u = np.sort(np.random.default_rng(11).random(5000))
    times = table.times_from_uniform(u)
    assert np.all(np.diff(times) >= 0)
    assert np.all(times >= 0)


def test_disk_sampling_moments():
    table = default_disk_law()
    draws = table.times_from_uniform(np.random.default_rng(5).random(200_000))
    n = len(draws)
    mean_se = draws.std() / math.sqrt(n)
    assert draws.mean() == pytest.approx(0.5, abs=4 * mean_se)
    sq = draws**2
    sq_se = sq.std() / math.sqrt(n)
    assert sq.mean() == pytest.approx(0.375, abs=4 * sq_se)


def test_disk_sample_scaling_and_validation():
    angle1, t1 = sample_disk_exit(1.0, np.random.default_rng(3))
    angle2, t2 = sample_disk_exit(2.0, np.random.default_rng(3))
    assert angle1 == angle2
    assert t2 == pytest.approx(4.0 * t1, rel=1e-12)
    assert 0.0 <= angle1 < 2 * math.pi
    with pytest.raises(ValueError):
        sample_disk_exit(0.0, np.random.default_rng(0))


@given(st.floats(0.05, 20.0))
@settings(max_examples=100, deadline=None)
def test_theta0_range_property(ell):
    v = theta0(ell).theta0
    assert 0.5 < v < 1.0
