"""
Tests for dGBV algebras: axioms, identities, exactness conditions, integrals,
tensor products and the algebra-spec format
"""

from fractions import Fraction

import numpy as np
import pytest

from dgbv import (
    AlgebraSpecError,
    CheckFailedError,
    DGBVError,
    catalog_names,
    check_dgbv,
    check_gbv,
    conditions_check,
    decomposable_mc,
    dump_algebra_spec,
    identity_suite,
    integral_check,
    load_catalog,
    parse_algebra_spec,
    resolve_spec_path,
    shifted_differential,
    tensor,
    tensor_bracket_check,
)
from graded_core import is_zero_vector

DGBV_ENTRIES = (
    'square-deformation', 'exterior-square', 'eps-xi-deltazero', 'eps-xi-derivation', 'p2-trivial',
    'p2-exterior', 'p2-eps-xi',
)
SAMPLES = 100

TINY_SPEC = """
# one even and one odd generator
name tiny
dimension 2
labels 1 t
parities 0 1
unit 1

[product]
1 1 1
1 t t
t 1 t

[bv]

[differential]

[integral]
1 1
"""


@pytest.fixture(scope='module')
def catalog():
    return load_catalog()


@pytest.fixture(scope='module')
def square(catalog):
    return catalog['square-deformation']


def test_catalog_is_complete():
    names = catalog_names()
    for name in ('square-deformation', 'p2-trivial', 'exterior-square', 'eps-xi-second-order', 'p2-eps-xi'):
        assert name in names


def test_catalog_superalgebras_satisfy_axioms(catalog):
    for name, dgbv in catalog.items():
        report = dgbv.algebra.check_axioms()
        assert report.passed, (name, report.violations[:3])


def test_check_dgbv_on_catalog(catalog):
    for name, dgbv in catalog.items():
        report = check_dgbv(dgbv)
        if name == 'eps-xi-second-order':
            assert not report.passed
        else:
            assert report.passed, (name, report.violations[:3])


def test_second_order_failure_is_named(catalog):
    dgbv = catalog['eps-xi-second-order']
    report = check_gbv(dgbv.algebra, dgbv.delta)
    assert not report.passed
    assert 'second_order' in {v.identity for v in report.violations}


@pytest.mark.parametrize("name", DGBV_ENTRIES)
def test_identity_suite(catalog, name):
    report = identity_suite(catalog[name], samples=SAMPLES, seed=0)
    assert report.passed, report.violations[:3]
    assert report.details['samples'] == SAMPLES


def test_identity_suite_detects_broken_operator(catalog):
    report = identity_suite(catalog['eps-xi-second-order'], samples=0)
    assert not report.passed


def test_bracket_of_h_with_itself(square):
    algebra = square.algebra
    h = algebra.element({'h': 1})
    assert list(square.bracket(h, h)) == list(algebra.element({'d': 1}))


def test_partial_is_linear_and_memoized(square):
    algebra = square.algebra
    h, c = algebra.element({'h': 1}), algebra.element({'c': 1})
    combined = algebra.element({'h': 2, 'c': Fraction(-1, 3)})
    expected = 2 * square.partial(h) - Fraction(1, 3) * square.partial(c)
    assert np.array_equal(square.partial(combined), expected)
    assert square.partial(combined) is square.partial(combined)
    b = algebra.element({'h': 1, 'a': 1})
    assert list(square.bracket(combined, b)) == list(square.partial(combined).dot(b))


def test_shifted_differential_of_maurer_cartan_element(square):
    a = square.algebra.element({'h': 1, 'c': Fraction(1, 2)})
    shifted = shifted_differential(square, a)
    assert shifted.maurer_cartan
    assert shifted.nilpotent
    assert shifted.delta_closed
    assert shifted.anticommutes_with_delta
    assert shifted.bracket_compatible


def test_shifted_differential_needs_even_element(square):
    with pytest.raises(DGBVError):
        shifted_differential(square, square.algebra.element({'a': 1}))


def test_conditions_on_square_deformation(square):
    report = conditions_check(square)
    assert report.A and report.B and report.C
    assert report.consistent
    assert [c.label for c in report.homology] == ['1', 'h']
    assert [c.weight for c in report.homology] == [0, 2]


def test_homology_of_exterior_square(catalog):
    report = conditions_check(catalog['exterior-square'])
    assert report.passed
    assert [c.label for c in report.homology] == ['1', 'te', 't', 'e']
    assert [c.parity for c in report.homology] == [0, 0, 1, 1]


def test_condition_b_fails_when_delta_hits_the_unit(catalog):
    for name in ('eps-xi-deltazero', 'p2-eps-xi'):
        report = conditions_check(catalog[name])
        assert not report.B, name
        assert not report.passed
        assert report.homology == []
    assert conditions_check(catalog['eps-xi-deltazero']).A


def test_condition_a_fails_for_derivation(catalog):
    report = conditions_check(catalog['eps-xi-derivation'])
    assert not report.A
    assert len(report.witnesses['A']) == 1
    assert not report.B


@pytest.mark.parametrize("name", ['p2-trivial', 'exterior-square', 'square-deformation', 'p2-exterior'])
def test_integral_axioms(catalog, name):
    report = integral_check(catalog[name])
    assert report.passed, report.violations[:3]


def test_tensor_product_dimensions(catalog):
    product = catalog['p2-exterior']
    assert product.dimension == 12
    assert product.algebra.labels[0] == '1|1'
    assert product.integral_degree == -6


def test_tensor_bracket_matches_factors(catalog):
    first, second = catalog['exterior-square'], catalog['eps-xi-deltazero']
    product = tensor(first, second)
    assert product.name == 'exterior-square*eps-xi-deltazero'
    report = tensor_bracket_check(first, second, product)
    assert report.passed, report.violations[:3]


def test_tensor_rejects_failing_factor(catalog):
    with pytest.raises(CheckFailedError):
        tensor(catalog['eps-xi-second-order'], catalog['p2-trivial'])


@pytest.fixture(scope='module')
def square_exterior(catalog, square):
    return tensor(square, catalog['exterior-square'])


def test_unverified_tensor_matches_checked_product(catalog):
    first, second = catalog['p2-trivial'], catalog['exterior-square']
    quick = tensor(first, second, verify=False)
    checked = catalog['p2-exterior']
    assert quick.algebra.labels == checked.algebra.labels
    assert is_zero_vector((quick.algebra.structure - checked.algebra.structure).reshape(-1))
    assert list(quick.integral) == list(checked.integral)


def test_decomposable_maurer_cartan(catalog, square, square_exterior):
    other = catalog['exterior-square']
    a1 = square.algebra.element({'h': 1, 'c': Fraction(1, 2)})
    a2 = other.algebra.element({'te': 3})
    report = decomposable_mc(square, a1, other, a2, product=square_exterior)
    assert report.factors_solve
    assert report.solves
    assert report.factors_closed and report.delta_closed
    assert report.passed


def test_parse_minimal_spec():
    dgbv = parse_algebra_spec(TINY_SPEC)
    assert dgbv.name == 'tiny'
    assert dgbv.dimension == 2
    assert dgbv.algebra.parities == (0, 1)
    assert dgbv.delta.is_zero() and dgbv.d.is_zero()
    assert check_dgbv(dgbv).passed


@pytest.mark.parametrize("broken", [
    TINY_SPEC.replace("t 1 t", "t 1 q"),
    TINY_SPEC.replace("parities 0 1", "parities 0 x"),
    TINY_SPEC.replace("dimension 2", "dimension 3"),
    TINY_SPEC.replace("[bv]", "[laplacian]"),
    TINY_SPEC.replace("1 t t", "1 t t 1/0"),
])
def test_parse_errors(broken):
    with pytest.raises(AlgebraSpecError):
        parse_algebra_spec(broken)


def test_missing_spec_file(tmp_path):
    with pytest.raises(AlgebraSpecError):
        resolve_spec_path('no-such-algebra', tmp_path)


def test_dump_then_parse_is_identity(square):
    parsed = parse_algebra_spec(dump_algebra_spec(square))
    assert parsed.name == square.name
    assert parsed.algebra.labels == square.algebra.labels
    assert parsed.algebra.weights == square.algebra.weights
    assert parsed.integral_degree == square.integral_degree
    assert is_zero_vector((parsed.algebra.structure - square.algebra.structure).reshape(-1))
    assert is_zero_vector((parsed.delta.matrix - square.delta.matrix).reshape(-1))
    assert is_zero_vector((parsed.d.matrix - square.d.matrix).reshape(-1))
    assert list(parsed.integral) == list(square.integral)
