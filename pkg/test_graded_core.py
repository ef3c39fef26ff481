"""
Tests for graded series, root finding, Laurent inversion and exact linear algebra
"""

from fractions import Fraction

import numpy as np
import pytest

from graded_core import (
    ComplexPolynomial,
    GradedCoreError,
    GradedSeries,
    InconsistentSystemError,
    NonMonicError,
    RingMismatchError,
    ExactSolver,
    column_space,
    exact_inverse,
    exact_matrix,
    exact_nullspace,
    exact_rank,
    exact_vector,
    laurent_compose,
    laurent_invert,
    laurent_nth_root,
    make_ring,
    monomials_of_degree,
    nonzero_entries,
    poly_roots,
    same_subspace,
    sparse_apply,
    sparse_matmul,
    subspace_intersection,
    unit_vector,
)


@pytest.fixture
def super_ring():
    # x even, y and z odd
    return make_ring(['x', 'y', 'z'], odd=[False, True, True])


def test_poly_roots_sorted_by_argument():
    roots = poly_roots(ComplexPolynomial((1, 0, -1)))
    assert [r.value for r in roots] == pytest.approx([1, -1])
    assert not any(r.multiple for r in roots)


def test_poly_roots_flags_multiple_roots():
    roots = poly_roots(ComplexPolynomial((1, 0, 0, 0)))
    assert len(roots) == 3
    assert all(r.multiple for r in roots)


def test_poly_roots_cubic_residuals():
    p = ComplexPolynomial((1, 0, -4, 1))
    for root in poly_roots(p):
        assert abs(p(root.value)) < 1e-9


def test_poly_roots_rejects_constants():
    with pytest.raises(GradedCoreError):
        poly_roots(ComplexPolynomial((3,)))


def test_odd_variables_anticommute(super_ring):
    y = GradedSeries.variable(super_ring, 4, 1)
    z = GradedSeries.variable(super_ring, 4, 2)
    assert y * z == -(z * y)
    assert (y * y).is_zero()


def test_odd_derivative_sign(super_ring):
    y = GradedSeries.variable(super_ring, 4, 1)
    z = GradedSeries.variable(super_ring, 4, 2)
    assert (y * z).derivative('z') == -y
    assert (y * z).derivative('y') == z


def test_even_derivative_and_truncation(super_ring):
    x = GradedSeries.variable(super_ring, 3, 0)
    cube = x.power(3)
    assert cube.coefficient((3, 0, 0)) == 1
    assert x.power(4).is_zero()
    assert cube.derivative(0) == x.power(2).scale(3)


def test_ring_mismatch(super_ring):
    a = GradedSeries.variable(super_ring, 3, 0)
    b = GradedSeries.variable(super_ring, 4, 0)
    with pytest.raises(RingMismatchError):
        a + b


def test_inverse_and_fractional_power():
    ring = make_ring(['t'])
    t = GradedSeries.variable(ring, 6, 0)
    one = GradedSeries.constant(ring, 6, 1)
    f = one + t.scale(Fraction(2)) + t.power(2).scale(Fraction(1, 3))
    assert f * f.inverse() == one

    root = (one + t).fractional_power(Fraction(1, 2))
    assert root * root == one + t
    assert root.coefficient((2,)) == Fraction(-1, 8)


def test_parity_twist_negates_odd_monomials(super_ring):
    x = GradedSeries.variable(super_ring, 3, 0)
    y = GradedSeries.variable(super_ring, 3, 1)
    series = x + y + x * y
    twisted = series.parity_twist()
    assert twisted == x - y - x * y


def test_restrict_drops_variables(super_ring):
    x = GradedSeries.variable(super_ring, 3, 0)
    y = GradedSeries.variable(super_ring, 3, 1)
    restricted = (x * x + x * y).restrict([0])
    assert restricted.names == ('x',)
    assert restricted.terms == {(2,): 1}


def test_monomials_of_degree_respect_odd_exponents():
    monomials = list(monomials_of_degree([False, True], 2))
    assert sorted(monomials) == [(1, 1), (2, 0)]


def test_laurent_root_rejects_non_monic():
    with pytest.raises(NonMonicError):
        laurent_nth_root([2, 0, 1], 3)


@pytest.mark.parametrize("a1", [Fraction(1), Fraction(-3), Fraction(5, 2)])
def test_laurent_inversion_of_quadratic(a1):
    w = laurent_nth_root([1, 0, a1], 4)
    z = laurent_invert(w, 4)
    assert w.coefficient(-1) == a1 / 2
    assert z.coefficient(-1) == -a1 / 2


def test_laurent_compose_gives_identity():
    w = laurent_nth_root([1, 0, Fraction(-3), Fraction(1)], 5)
    z = laurent_invert(w, 5)
    composed = laurent_compose(w, z, 5)
    assert composed.coefficients[0] == 1
    assert all(c == 0 for c in composed.coefficients[1:])


def test_exact_rank_and_nullspace():
    m = exact_matrix([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert exact_rank(m) == 2
    (null,) = exact_nullspace(m)
    assert all(value == 0 for value in m.dot(null))


def test_subspace_intersection_of_planes():
    xy = [unit_vector(3, 0), unit_vector(3, 1)]
    yz = [unit_vector(3, 1), unit_vector(3, 2)]
    meet = subspace_intersection(xy, yz, 3)
    assert same_subspace(meet, [unit_vector(3, 1)], 3)


def test_column_space_spans_image():
    m = exact_matrix([[1, 1], [1, 1]])
    assert same_subspace(column_space(m), [exact_vector([1, 1])], 2)


def test_exact_solver_particular_solution():
    m = exact_matrix([[1, 1, 0], [0, 1, 1]])
    solver = ExactSolver(m)
    x = solver.solve([Fraction(2), Fraction(3)])
    assert list(m.dot(x)) == [2, 3]


def test_exact_solver_inconsistent():
    solver = ExactSolver(exact_matrix([[1, 1], [1, 1]]))
    assert solver.solve([1, 2]) is None
    with pytest.raises(InconsistentSystemError):
        solver.solve_or_raise([1, 2], "in test")


def test_exact_inverse():
    m = exact_matrix([[2, 1], [1, 1]])
    inverse = exact_inverse(m)
    np.testing.assert_array_equal(m.dot(inverse), exact_matrix([[1, 0], [0, 1]]))
    with pytest.raises(InconsistentSystemError):
        exact_inverse(exact_matrix([[1, 1], [1, 1]]))


def test_sparse_products_match_dense():
    left = exact_matrix([[0, Fraction(1, 2), 0], [3, 0, 0], [0, 0, 0]])
    right = exact_matrix([[1, 0, -1], [0, 0, 2], [Fraction(5, 3), 0, 0]])
    np.testing.assert_array_equal(sparse_matmul(left, right), left.dot(right))
    vector = exact_vector([0, 4, Fraction(-1, 3)])
    np.testing.assert_array_equal(sparse_apply(right, vector), right.dot(vector))
    assert nonzero_entries(vector) == [(1, 4), (2, Fraction(-1, 3))]
