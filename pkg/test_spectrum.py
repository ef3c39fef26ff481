"""
Tests for spectra, integrality and Betti counts
"""

import itertools
import math
from fractions import Fraction

import pytest

from spectrum import (
    NonIntegralError,
    SpectrumError,
    SpectrumProfile,
    an_profile,
    an_tensor_profile,
    betti,
    betti_from_profile,
    hm_profile,
    integrality,
    poincare_check,
    profile_from_dict,
    qc_profile,
    tensor_profile,
)


@pytest.mark.parametrize("ns, expected", [
    ((3, 3, 3, 3), [1, 19, 1]),
    ((4, 4, 4, 4, 4), [1, 101, 101, 1]),
    ((2, 2, 2, 2, 2, 2), [1, 20, 1]),
])
def test_betti_numbers(ns, expected):
    h = betti(ns)
    assert h == expected
    assert poincare_check(h)


def test_betti_without_enumeration_matches():
    assert betti((3, 3, 3, 3), brute_force_limit=0) == [1, 19, 1]


@pytest.mark.parametrize("ns, d, integral", [
    ((2, 2), Fraction(2, 3), False),
    ((3, 3, 3, 3), Fraction(2), True),
    ((2, 2, 2), Fraction(1), True),
])
def test_integrality(ns, d, integral):
    report = integrality(ns)
    assert report.d == d
    assert report.integral is integral


def test_invalid_factors():
    with pytest.raises(SpectrumError):
        integrality([])
    with pytest.raises(SpectrumError):
        betti([0, 3])
    with pytest.raises(SpectrumError):
        integrality([1, 5])
    with pytest.raises(SpectrumError):
        betti([1])


# every multiset of up to six factors with 2 <= n <= 6
SMALL_FACTORS = [
    ns for count in range(1, 7) for ns in itertools.combinations_with_replacement(range(2, 7), count)
]


def count_levels(ns):
    lattice = math.lcm(*(n + 1 for n in ns))
    weights = [lattice // (n + 1) for n in ns]
    top = math.floor(sum(Fraction(n - 1, n + 1) for n in ns))
    counts = [0] * (top + 1)
    for indices in itertools.product(*(range(n) for n in ns)):
        level, rest = divmod(sum(i * w for i, w in zip(indices, weights)), lattice)
        if rest == 0 and level <= top:
            counts[level] += 1
    return counts


def test_poincare_duality_on_all_small_integral_instances():
    integral = [ns for ns in SMALL_FACTORS if integrality(ns).integral]
    assert (3, 3, 3, 3) in integral and (2, 2, 2) in integral
    for ns in integral:
        assert poincare_check(betti(ns)), ns


def test_generating_function_matches_enumeration():
    for ns in SMALL_FACTORS:
        assert math.prod(ns) <= 10 ** 5
        assert betti(ns, brute_force_limit=0) == count_levels(ns), ns


def test_an_profile_is_dual():
    profile = an_profile(4)
    assert profile.d == Fraction(3, 5)
    assert profile.total_multiplicity == 4
    assert profile.is_dual()


def test_tensor_profile_adds_d_and_convolves():
    profile = tensor_profile(an_profile(2), an_profile(2))
    assert profile.d == Fraction(2, 3)
    assert profile.multiplicity(Fraction(1, 3)) == 2
    assert profile.total_multiplicity == 4


def test_betti_from_profile_agrees_with_enumeration():
    for ns in ((3, 3, 3, 3), (2, 2, 2), (4, 4, 4, 4, 4)):
        assert betti_from_profile(an_tensor_profile(ns)) == betti(ns)


def test_profile_round_trip_through_dict():
    profile = an_tensor_profile((3, 3))
    assert profile_from_dict(profile.to_dict()) == profile


def test_profile_from_bad_dict():
    with pytest.raises(SpectrumError):
        profile_from_dict({'d': '1'})


def test_zero_multiplicity_rejected():
    with pytest.raises(SpectrumError):
        SpectrumProfile(Fraction(1), ((Fraction(0), 0),))


def test_qc_profile_of_projective_plane():
    profile = qc_profile(2, [1, 1, 1])
    assert profile.d == 2
    assert betti_from_profile(profile) == [1, 1, 1]
    with pytest.raises(SpectrumError):
        qc_profile(2, [2, 1, 1])


def test_hm_profile_keeps_integral_levels():
    profile = hm_profile(an_tensor_profile((3, 3, 3, 3)))
    assert profile.entries == ((Fraction(0), 1), (Fraction(1), 19), (Fraction(2), 1))


def test_hm_profile_needs_integral_d():
    with pytest.raises(NonIntegralError):
        hm_profile(an_tensor_profile((2, 2)))
