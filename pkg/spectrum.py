"""
d-spectrum arithmetic

Spectra of A_n manifolds and their tensor products, Betti enumeration for
tensor powers of A_n, integrality tests and extraction of the integral part
(the spectrum of the HM submanifold). Everything here is exact rational.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from config import BRUTE_FORCE_LIMIT
from graded_core import FrobeniusError
from utils import format_fraction

logger = logging.getLogger(__name__)


class SpectrumError(FrobeniusError):
    """Errors of spectrum arithmetic"""


class NonIntegralError(SpectrumError):
    """The spectrum's d is not on the requested progression"""


@dataclass(frozen=True)
class SpectrumProfile:
    """
    A d-spectrum: the rational d together with the multiset of q values

    Attributes:
        d: The d of the spectrum (2 - D)
        entries: Sorted (q, multiplicity) pairs with distinct q
        flat_euler_part_zero: Whether the flat part of the Euler field vanishes
    """

    d: Fraction
    entries: Tuple[Tuple[Fraction, int], ...]
    flat_euler_part_zero: bool = True

    def __post_init__(self):
        merged: Dict[Fraction, int] = {}
        for q, multiplicity in self.entries:
            multiplicity = int(multiplicity)
            if multiplicity < 1:
                raise SpectrumError(f"Multiplicity must be >= 1, got {multiplicity} at q={q}")
            q = Fraction(q)
            merged[q] = merged.get(q, 0) + multiplicity
        object.__setattr__(self, 'd', Fraction(self.d))
        object.__setattr__(self, 'entries', tuple(sorted(merged.items())))

    @classmethod
    def from_values(cls, d, values: Iterable, flat_euler_part_zero: bool = True) -> 'SpectrumProfile':
        return cls(d, tuple((Fraction(q), 1) for q in values), flat_euler_part_zero)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def multiplicity(self, q) -> int:
        return dict(self.entries).get(Fraction(q), 0)

    def is_dual(self) -> bool:
        """Whether q and d - q occur with equal multiplicity."""
        table = dict(self.entries)
        return all(table.get(self.d - q, 0) == m for q, m in table.items())

    def to_dict(self) -> dict:
        return {
            'd': format_fraction(self.d),
            'entries': [[format_fraction(q), m] for q, m in self.entries],
            'flat_euler_part_zero': self.flat_euler_part_zero,
        }


def profile_from_dict(data: dict) -> SpectrumProfile:
    """Inverse of SpectrumProfile.to_dict; q and d may be "p/q" strings or ints."""
    try:
        entries = tuple((Fraction(q), int(m)) for q, m in data['entries'])
        return SpectrumProfile(Fraction(data['d']), entries, bool(data.get('flat_euler_part_zero', True)))
    except (KeyError, TypeError, ValueError) as e:
        raise SpectrumError(f"Invalid profile description: {e}") from e


def an_profile(n: int) -> SpectrumProfile:
    """Spectrum of A_n: d = (n-1)/(n+1), q_i = i/(n+1) for i = 0..n-1."""
    if n < 1:
        raise SpectrumError(f"A_n needs n >= 1, got {n}")
    return SpectrumProfile.from_values(Fraction(n - 1, n + 1), (Fraction(i, n + 1) for i in range(n)))


def tensor_profile(first: SpectrumProfile, second: SpectrumProfile) -> SpectrumProfile:
    """Convolution of q multisets; d adds."""
    entries: Dict[Fraction, int] = {}
    for q1, m1 in first.entries:
        for q2, m2 in second.entries:
            entries[q1 + q2] = entries.get(q1 + q2, 0) + m1 * m2
    return SpectrumProfile(
        first.d + second.d,
        tuple(entries.items()),
        first.flat_euler_part_zero and second.flat_euler_part_zero,
    )


def an_tensor_profile(ns: Sequence[int]) -> SpectrumProfile:
    """Spectrum of A_{n_1} ⊗ ... ⊗ A_{n_N}."""
    if not ns:
        return SpectrumProfile(Fraction(0), ((Fraction(0), 1),))
    return reduce(tensor_profile, (an_profile(n) for n in ns))


@dataclass(frozen=True)
class IntegralityReport:
    d: Fraction
    integral: bool

    def to_dict(self) -> dict:
        return {'d': format_fraction(self.d), 'integral': self.integral}


def _validate_ns(ns: Sequence[int]) -> List[int]:
    ns = [int(n) for n in ns]
    if not ns:
        raise SpectrumError("Need at least one factor")
    if any(n < 2 for n in ns):
        raise SpectrumError(f"Every n must be >= 2, got {ns}")
    return ns


def total_d(ns: Sequence[int]) -> Fraction:
    return sum((Fraction(n - 1, n + 1) for n in ns), Fraction(0))


def integrality(ns: Sequence[int]) -> IntegralityReport:
    """Exact d = sum (n_i - 1)/(n_i + 1) and whether it is an integer."""
    ns = _validate_ns(ns)
    d = total_d(ns)
    return IntegralityReport(d=d, integral=d.denominator == 1)


def _level_polynomial(ns: Sequence[int], lattice: int) -> np.ndarray:
    """Coefficients of prod_k (1 + t^(L/(n_k+1)) + ... ) over the common lattice."""
    poly = np.array([1], dtype=object)
    for n in ns:
        step = lattice // (n + 1)
        factor = np.zeros(step * (n - 1) + 1, dtype=object)
        factor[::step] = 1
        poly = np.convolve(poly, factor)
    return poly


def _brute_force_betti(ns: Sequence[int], lattice: int, top: int) -> List[int]:
    weights = [lattice // (n + 1) for n in ns]
    counts = [0] * (top + 1)
    for indices in itertools.product(*(range(n) for n in ns)):
        level = sum(i * w for i, w in zip(indices, weights))
        if level % lattice == 0 and level // lattice <= top:
            counts[level // lattice] += 1
    return counts


def betti(ns: Sequence[int], brute_force_limit: int = BRUTE_FORCE_LIMIT) -> List[int]:
    """
    Even Betti numbers h^{2m}, m = 0..floor(d), of the integral part of
    A_{n_1} ⊗ ... ⊗ A_{n_N}

    h^{2m} counts tuples 0 <= i_k <= n_k - 1 with sum i_k/(n_k+1) = m. The
    count is read off a generating function over the lattice lcm(n_k + 1) and
    cross-checked by enumeration when prod n_k <= brute_force_limit.

    Args:
        ns: Factor indices n_k
        brute_force_limit: Largest tuple count enumerated explicitly

    Returns:
        List of h^{2m}

    Raises:
        SpectrumError: if the two counts disagree
    """
    ns = _validate_ns(ns)
    lattice = reduce(math.lcm, (n + 1 for n in ns))
    top = math.floor(total_d(ns))

    poly = _level_polynomial(ns, lattice)
    if sum(poly) != math.prod(ns):
        raise SpectrumError(f"Level polynomial total {sum(poly)} != {math.prod(ns)}")
    counts = [int(poly[m * lattice]) if m * lattice < len(poly) else 0 for m in range(top + 1)]

    if math.prod(ns) <= brute_force_limit:
        enumerated = _brute_force_betti(ns, lattice, top)
        if enumerated != counts:
            raise SpectrumError(f"Generating function {counts} disagrees with enumeration {enumerated}")
        logger.debug(f"betti{tuple(ns)}: enumeration agrees with generating function")

    return counts


def betti_from_profile(profile: SpectrumProfile) -> List[int]:
    """Multiplicities at the integer levels 0..floor(d)."""
    return [profile.multiplicity(m) for m in range(math.floor(profile.d) + 1)]


def poincare_check(h: Sequence[int]) -> bool:
    """h^{2m} = h^{2(d-m)}."""
    return list(h) == list(h)[::-1]


def qc_profile(dim: int, betti_numbers: Sequence[int]) -> SpectrumProfile:
    """
    Spectrum of quantum cohomology: d = dim, q with multiplicity h^{2q}

    Raises:
        SpectrumError: if h^0 != 1
    """
    if not betti_numbers or betti_numbers[0] != 1:
        raise SpectrumError(f"Quantum cohomology spectrum needs h^0 = 1, got {list(betti_numbers)}")
    return SpectrumProfile(
        Fraction(dim),
        tuple((Fraction(q), int(h)) for q, h in enumerate(betti_numbers) if h > 0),
    )


def hm_profile(profile: SpectrumProfile, step=1) -> SpectrumProfile:
    """
    Keep the q values lying on the progression step*Z

    With the default step this is the spectrum of the submanifold cut out by
    the coordinates of non-integral degree.

    Raises:
        NonIntegralError: if d is not a multiple of step
    """
    step = Fraction(step)
    if step <= 0:
        raise SpectrumError(f"Progression step must be positive, got {step}")
    if (profile.d / step).denominator != 1:
        raise NonIntegralError(
            f"d = {format_fraction(profile.d)} is not a multiple of {format_fraction(step)}"
        )
    kept = tuple((q, m) for q, m in profile.entries if (q / step).denominator == 1)
    logger.debug(f"hm_profile: kept {len(kept)} of {len(profile.entries)} levels")
    return SpectrumProfile(profile.d, kept, profile.flat_euler_part_zero)
