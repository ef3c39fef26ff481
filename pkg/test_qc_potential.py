"""
Tests for qc-type potentials and the projective plane
"""

from fractions import Fraction

import numpy as np
import pytest

from qc_potential import (
    FourierSeries,
    InhomogeneousTermError,
    QCPotential,
    QCPotentialError,
    correlator_table,
    divisor_extend,
    divisor_identity_audit,
    hm_restrict,
    identity_checks,
    p2_generate,
    p2_numbers,
    qc_wdvv_check,
    specializations,
    split_check,
)
from spectrum import NonIntegralError


def p2_like(correlators, max_curve=1):
    classical = FourierSeries(3, (1,), {
        ((0,), (2, 0, 1)): Fraction(1, 2),
        ((0,), (1, 2, 0)): Fraction(1, 2),
    })
    metric = np.array([[Fraction(1 if a + b == 2 else 0) for b in range(3)] for a in range(3)], dtype=object)
    return QCPotential(
        labels=('1', 'h', 'h2'), degrees=(0, 1, 2), dimension=2, metric=metric,
        classical=classical, correlators=correlators, c1=(3,), max_curve=max_curve,
    )


@pytest.fixture(scope='module')
def plane():
    return p2_generate(3)


def test_projective_plane_numbers():
    assert p2_numbers(p2_generate(5)) == [1, 1, 12, 620, 87304]


def test_degree_one_is_the_seed():
    assert p2_numbers(p2_generate(1)) == [1]
    with pytest.raises(QCPotentialError):
        p2_generate(0)


def test_generated_potential_is_associative(plane):
    report = qc_wdvv_check(plane)
    assert report.passed
    assert report.details['failing_classes'] == []


def test_wrong_number_breaks_associativity():
    broken = p2_like({((1,), (0, 0, 2)): Fraction(1), ((2,), (0, 0, 5)): Fraction(13)}, max_curve=2)
    report = qc_wdvv_check(broken)
    assert not report.passed
    assert '[2]' in report.details['failing_classes']


def test_split_and_identity(plane):
    assert split_check(plane).passed
    assert identity_checks(plane).passed
    assert plane.D == 0
    assert plane.spectrum == (1, 0, -1)


def test_inhomogeneous_term_is_rejected():
    with pytest.raises(InhomogeneousTermError):
        p2_like({((1,), (0, 0, 3)): Fraction(1)})


def test_divisor_insertions_must_be_reduced():
    with pytest.raises(QCPotentialError):
        p2_like({((1,), (0, 1, 1)): Fraction(1)})


def test_correlators_and_divisor_audit(plane):
    table = correlator_table(plane)
    assert table[((1,), (1, 2, 2))] == 1
    assert table[((2,), (2, 2, 2, 2, 2))] == 1
    assert divisor_identity_audit(table, plane).passed


def test_divisor_extension_to_two_points(plane):
    extension = divisor_extend(correlator_table(plane), plane)
    assert extension.report.passed
    assert extension.table[((1,), (2, 2))] == 1
    assert ((1,), ()) not in extension.table


def test_specializations(plane):
    result = specializations(plane)
    assert result.report.passed
    assert result.cup[1, 1, 2] == 1
    assert result.cup[1, 2, 2] == 0
    assert result.small[1][2][0].terms == {((1,), (0, 0, 0)): 1}


def test_hm_restrict_keeps_integral_coordinates(plane):
    series = plane.to_series(6)
    restriction = hm_restrict(series, plane.spectrum, plane.D, plane.metric, case='ii', potential=plane)
    assert restriction.keep == [0, 1, 2]
    assert restriction.report.passed


def test_hm_restrict_drops_fractional_spectrum(plane):
    series = plane.to_series(6)
    restriction = hm_restrict(series, [1, Fraction(1, 2), 0], 0, plane.metric)
    assert restriction.keep == [0, 2]
    assert [v.name for v in restriction.series.ring] == ['x0', 'x2']
    assert restriction.report.passed


def test_hm_restrict_needs_integral_d(plane):
    with pytest.raises(NonIntegralError):
        hm_restrict(plane.to_series(4), plane.spectrum, Fraction(1, 2), plane.metric)
    with pytest.raises(QCPotentialError):
        hm_restrict(plane.to_series(4), plane.spectrum, 0, plane.metric, case='ii')
