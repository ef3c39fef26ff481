"""
Tests for the A_n Saito framework: critical data, special points, flat
coordinates, Euler field and direct sums
"""

import random

import numpy as np
import pytest

from an_saito import (
    AnChart,
    AnSaitoError,
    NonTameError,
    critical_data,
    direct_sum_verify,
    eta_jacobian,
    eta_jacobian_closed_form,
    euler_checks,
    flat_coordinates,
    metric_potential,
    metric_potential_from_roots,
    numeric_germ,
    special_point_closed_form,
    verify_special_point,
)
from germs import compare_germs


def random_charts(count, seed, max_n=5):
    rng = random.Random(seed)
    charts = []
    while len(charts) < count:
        n = rng.randint(1, max_n)
        chart = AnChart(n, tuple(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(n)))
        if critical_data(chart).tame:
            charts.append(chart)
    return charts


def test_chart_validation():
    with pytest.raises(AnSaitoError):
        AnChart(0, ())
    with pytest.raises(AnSaitoError):
        AnChart(3, (1, 2))
    with pytest.raises(AnSaitoError):
        AnChart.special(1, 1, 0)


def test_critical_data_of_cubic():
    data = critical_data(AnChart(2, (-3, 0)))
    assert data.tame
    np.testing.assert_allclose(data.roots, [1, -1], atol=1e-12)
    np.testing.assert_allclose(data.u, [-2, 2], atol=1e-12)
    np.testing.assert_allclose(data.eta, [1 / 6, -1 / 6], atol=1e-12)


def test_degenerate_chart_is_not_tame():
    data = critical_data(AnChart(2, (0, 0)))
    assert not data.tame
    assert data.multiple_roots
    with pytest.raises(NonTameError):
        numeric_germ(AnChart(2, (0, 0)))


def test_special_point_values():
    germ = special_point_closed_form(2, -3, 0)
    np.testing.assert_allclose(germ.u, [-2, 2], atol=1e-12)
    assert germ.v[0, 1] == pytest.approx(1 / 6)
    assert germ.v[1, 0] == pytest.approx(1 / 6)


def test_special_point_needs_nonzero_parameter():
    with pytest.raises(NonTameError):
        special_point_closed_form(2, 0, 0)
    with pytest.raises(NonTameError):
        verify_special_point(3, 0, 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("a_n", [0, 5])
def test_special_points_match_closed_form(n, a_n):
    report = verify_special_point(n, -(n + 1), a_n, tol=1e-9)
    assert report.passed
    assert report.max_deviation < 1e-9


@pytest.mark.parametrize("n, a_nm1", [(2, -3), (3, -4), (4, 2 + 1j)])
def test_eta_jacobian_closed_form(n, a_nm1):
    chart = AnChart.special(n, a_nm1, 0)
    closed = special_point_closed_form(n, a_nm1, 0)
    comparison = compare_germs(numeric_germ(chart), closed, 1e-9)
    assert comparison.isomorphic

    numeric = eta_jacobian(chart).matrix
    expected = eta_jacobian_closed_form(n, a_nm1)
    perm = comparison.permutation
    for j in range(n):
        for k in range(n):
            if j != k:
                assert numeric[j, k] == pytest.approx(expected[perm[j], perm[k]], rel=1e-8, abs=1e-10)


def test_eta_jacobian_is_symmetric_on_random_charts():
    for chart in random_charts(50, seed=7):
        assert eta_jacobian(chart).is_symmetric(1e-8), chart


@pytest.mark.parametrize("a1", [1.5, -2.0, 0.25 + 1j])
def test_flat_coordinates_a1(a1):
    x = flat_coordinates(AnChart(1, (a1,)))
    assert x[0] == pytest.approx(-a1 / 2, abs=1e-10)


@pytest.mark.parametrize("a1, a2", [(-3, 0), (1, 2), (0.5j, -1)])
def test_flat_coordinates_a2(a1, a2):
    x = flat_coordinates(AnChart(2, (a1, a2)))
    np.testing.assert_allclose(x, [-a1 / 3, -a2 / 3], atol=1e-10)


def test_metric_potential_root_formula():
    for chart in random_charts(10, seed=3):
        if chart.n >= 2:
            assert metric_potential_from_roots(chart) == pytest.approx(metric_potential(chart), abs=1e-9)


def test_euler_checks_pass_on_small_charts():
    rng = random.Random(11)
    charts = [
        AnChart(n, tuple(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)))
        for n in range(1, 5)
    ]
    report = euler_checks(charts)
    assert report.passed, report.violations
    assert report.charts == 4


def test_euler_checks_report_non_tame_chart():
    report = euler_checks(AnChart(3, (0, 0, 0)))
    assert not report.passed
    assert report.violations[0].identity == 'tameness'


def test_direct_sum_is_tensor_product():
    report = direct_sum_verify(AnChart(2, (-3, 0)), AnChart(2, (-12, 0)))
    assert report.passed
    assert report.germs_isomorphic
    assert report.eta_jacobian_deviation < 1e-6
    assert report.sum_germ.size == 4
