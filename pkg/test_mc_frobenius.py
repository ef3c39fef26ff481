"""
Tests for formal Frobenius manifolds built from dGBV algebras
"""

from fractions import Fraction

import pytest

from dgbv import check_dgbv, conditions_check, load_algebra_spec, load_catalog
from mc_frobenius import (
    MasterEquationError,
    basis_field,
    circ_product,
    euler_check,
    flatness_check,
    formal_base,
    metric,
    normalization_check,
    potential,
    potentiality_check,
    solve_master,
    third_derivative_check,
    wdvv_check,
)

ORDER = 5
SUITE_ORDER = 6
DIRECTIONS = 20
MASTER_READY = ('exterior-square', 'p2-exterior', 'p2-trivial', 'square-deformation')


@pytest.fixture(scope='module')
def square():
    dgbv = load_algebra_spec('square-deformation')
    return dgbv, solve_master(dgbv, order=ORDER)


@pytest.fixture(scope='module')
def projective():
    dgbv = load_algebra_spec('p2-trivial')
    return dgbv, solve_master(dgbv, order=ORDER)


def test_formal_base_of_square_deformation(square):
    _, solution = square
    base = solution.base
    assert [v.name for v in base.ring] == ['x0', 'x1']
    assert [v.weight for v in base.ring] == [2, 0]
    assert base.odd_mask == (False, False)


def test_square_deformation_gamma(square):
    dgbv, solution = square
    algebra = dgbv.algebra
    assert solution.solved
    assert list(solution.gamma.coefficient((1, 0))) == list(algebra.element({'1': 1}))
    assert list(solution.gamma.coefficient((0, 1))) == list(algebra.element({'h': 1}))
    assert list(solution.gamma.coefficient((0, 2))) == list(algebra.element({'c': Fraction(1, 2)}))
    assert set(solution.gamma.terms) == {(1, 0), (0, 1), (0, 2)}
    assert set(solution.b.terms) == {(0, 2)}
    assert list(solution.b.coefficient((0, 2))) == list(algebra.element({'a': Fraction(1, 2)}))


def test_square_deformation_normalization(square):
    _, solution = square
    report = normalization_check(solution)
    assert report.passed, report.violations


def test_square_deformation_potential(square):
    dgbv, solution = square
    phi = potential(dgbv, solution)
    assert phi.terms == {(2, 1): Fraction(1, 2)}


def test_projective_plane_potential(projective):
    dgbv, solution = projective
    phi = potential(dgbv, solution)
    assert phi.terms == {(2, 0, 1): Fraction(1, 2), (1, 2, 0): Fraction(1, 2)}
    report = wdvv_check(phi, metric(dgbv, solution))
    assert report.passed


def test_exterior_square_potential():
    dgbv = load_algebra_spec('exterior-square')
    solution = solve_master(dgbv, order=4)
    assert solution.base.odd_mask == (False, False, True, True)
    phi = potential(dgbv, solution)
    assert phi.terms == {(2, 1, 0, 0): Fraction(1, 2), (1, 0, 1, 1): Fraction(-1)}
    assert wdvv_check(phi, metric(dgbv, solution)).passed


@pytest.mark.parametrize("fixture", ['square', 'projective'])
def test_structure_checks(request, fixture):
    dgbv, solution = request.getfixturevalue(fixture)
    phi = potential(dgbv, solution)
    g = metric(dgbv, solution)
    for report in (
        third_derivative_check(dgbv, solution, phi, samples=5),
        potentiality_check(solution, g, phi),
        flatness_check(solution),
        euler_check(dgbv, solution, phi),
    ):
        assert report.passed, (report.name, report.violations[:3])


def test_unit_field_acts_as_identity(projective):
    _, solution = projective
    e = basis_field(solution, 0)
    x = basis_field(solution, 1)
    product = circ_product(solution, e, x)
    assert all(p == q for p, q in zip(product, x))


def test_h_times_h_is_h2(projective):
    _, solution = projective
    h = basis_field(solution, 1)
    assert circ_product(solution, h, h) == basis_field(solution, 2)


def test_euler_check_reports_spectrum(square):
    dgbv, solution = square
    report = euler_check(dgbv, solution, potential(dgbv, solution))
    assert report.details['spectrum'] == [1, 0]
    assert report.details['D'] == -1


def test_master_equation_needs_conditions():
    dgbv = load_algebra_spec('eps-xi-deltazero')
    with pytest.raises(MasterEquationError):
        formal_base(dgbv)
    with pytest.raises(MasterEquationError):
        solve_master(dgbv, order=3)


def test_master_ready_entries_satisfy_a_and_b():
    ready = [
        name for name, dgbv in load_catalog().items()
        if check_dgbv(dgbv).passed and conditions_check(dgbv).passed
    ]
    assert tuple(sorted(ready)) == MASTER_READY


@pytest.mark.parametrize("name", MASTER_READY)
def test_master_pipeline_at_suite_order(name):
    dgbv = load_algebra_spec(name)
    solution = solve_master(dgbv, order=SUITE_ORDER)
    assert solution.solved
    assert solution.residual.is_zero()
    assert normalization_check(solution).passed
    phi = potential(dgbv, solution)
    assert wdvv_check(phi, metric(dgbv, solution)).passed
    report = third_derivative_check(dgbv, solution, phi, samples=DIRECTIONS, seed=0)
    assert report.passed, report.violations[:3]
    assert report.checked == DIRECTIONS
