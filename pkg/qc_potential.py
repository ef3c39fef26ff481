"""
Potentials of quantum-cohomology type

A qc-type potential is Phi = c + Psi with a classical cubic c and
Psi = sum_{beta != 0} sum_alpha I_beta(alpha) q^beta e^(<beta, x_div>) x^alpha / alpha!,
alpha running over the non-divisor coordinates. This module stores such
potentials exactly, checks their homogeneity and identity relations, reads
correlators off them, extends the correlator table to fewer than three points
through the divisor relation, computes the cup and small quantum products and
generates the potential of the projective plane from the associativity
equations. hm_restrict cuts any even potential down to its integral spectrum.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import MAX_CORRELATOR_POINTS, P2_DEFAULT_DEGREE, P2_SEED_INVARIANT
from graded_core import FrobeniusError, GradedSeries, exact_inverse, exact_rank, make_ring
from mc_frobenius import DegenerateMetricError, wdvv_check
from spectrum import NonIntegralError, SpectrumProfile, qc_profile
from utils import CheckReport, format_fraction

logger = logging.getLogger(__name__)

Curve = Tuple[int, ...]
Exponent = Tuple[int, ...]
CorrelatorKey = Tuple[Curve, Tuple[int, ...]]


class QCPotentialError(FrobeniusError):
    """Errors of the qc-type potential module"""


class DivisorPairingError(QCPotentialError):
    """No divisor class pairs invertibly with a curve class"""


class InhomogeneousTermError(QCPotentialError):
    """A correlator is not an Euler eigenvector with the required eigenvalue"""


# ---------------------------------------------------------------------------
# Fourier series
# ---------------------------------------------------------------------------

class FourierSeries:
    """
    Finite sums of coefficient * q^beta e^(<beta, x_div>) x^alpha

    beta has one entry per divisor coordinate and pairs with the j-th divisor
    class as beta[j]; alpha runs over all coordinates. Terms whose curve
    degree sum(beta) exceeds max_curve are dropped.
    """

    __slots__ = ('rank', 'divisor', 'max_curve', 'terms')

    def __init__(self, rank: int, divisor: Sequence[int],
                 terms: Optional[Dict[Tuple[Curve, Exponent], Fraction]] = None,
                 max_curve: Optional[int] = None):
        self.rank = int(rank)
        self.divisor = tuple(divisor)
        self.max_curve = max_curve
        clean: Dict[Tuple[Curve, Exponent], Fraction] = {}
        for (beta, alpha), c in (terms or {}).items():
            beta, alpha = tuple(beta), tuple(alpha)
            if len(beta) != len(self.divisor) or len(alpha) != self.rank:
                raise QCPotentialError(f"Bad term shape: beta {beta}, alpha {alpha}")
            if max_curve is not None and sum(beta) > max_curve:
                continue
            clean[(beta, alpha)] = clean.get((beta, alpha), 0) + c
        self.terms = {key: Fraction(c) for key, c in clean.items() if c != 0}

    def _like(self, terms, max_curve=None) -> 'FourierSeries':
        return FourierSeries(self.rank, self.divisor, terms,
                             self.max_curve if max_curve is None else max_curve)

    def _combined_curve(self, other: 'FourierSeries') -> Optional[int]:
        bounds = [b for b in (self.max_curve, other.max_curve) if b is not None]
        return min(bounds) if bounds else None

    def __add__(self, other: 'FourierSeries') -> 'FourierSeries':
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0) + c
        return self._like(terms, self._combined_curve(other))

    def __neg__(self) -> 'FourierSeries':
        return self._like({key: -c for key, c in self.terms.items()})

    def __sub__(self, other: 'FourierSeries') -> 'FourierSeries':
        return self + (-other)

    def scale(self, factor) -> 'FourierSeries':
        return self._like({key: factor * c for key, c in self.terms.items()})

    def __mul__(self, other: 'FourierSeries') -> 'FourierSeries':
        bound = self._combined_curve(other)
        result: Dict[Tuple[Curve, Exponent], Fraction] = {}
        for (beta, alpha), a in self.terms.items():
            for (gamma, delta), b in other.terms.items():
                curve = tuple(x + y for x, y in zip(beta, gamma))
                if bound is not None and sum(curve) > bound:
                    continue
                key = (curve, tuple(x + y for x, y in zip(alpha, delta)))
                result[key] = result.get(key, 0) + a * b
        return self._like(result, bound)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self, index: int) -> 'FourierSeries':
        """d/dx_index; a divisor coordinate also brings down (beta, delta)."""
        position = self.divisor.index(index) if index in self.divisor else None
        result: Dict[Tuple[Curve, Exponent], Fraction] = {}
        for (beta, alpha), c in self.terms.items():
            if position is not None and beta[position]:
                key = (beta, alpha)
                result[key] = result.get(key, 0) + beta[position] * c
            if alpha[index]:
                lowered = list(alpha)
                lowered[index] -= 1
                key = (beta, tuple(lowered))
                result[key] = result.get(key, 0) + alpha[index] * c
        return self._like(result)

    def curve_classes(self) -> List[Curve]:
        return sorted({beta for beta, _ in self.terms})

    def curve_part(self, beta: Curve) -> 'FourierSeries':
        return self._like({key: c for key, c in self.terms.items() if key[0] == tuple(beta)})

    def large_volume(self) -> 'FourierSeries':
        """Drop every beta != 0 term."""
        return self.curve_part((0,) * len(self.divisor))

    def small(self) -> 'FourierSeries':
        """Restrict to the divisor coordinates (non-divisor coordinates set to zero)."""
        others = [a for a in range(self.rank) if a not in self.divisor]
        return self._like({
            key: c for key, c in self.terms.items() if not any(key[1][a] for a in others)
        })

    def constant_term(self, beta: Optional[Curve] = None) -> Fraction:
        beta = (0,) * len(self.divisor) if beta is None else tuple(beta)
        return self.terms.get((beta, (0,) * self.rank), Fraction(0))

    def to_series(self, order: int, names: Optional[Sequence[str]] = None) -> GradedSeries:
        """Expansion at q = 1 into an even truncated power series."""
        names = names or [f"x{i}" for i in range(self.rank)]
        ring = make_ring(names)
        total = GradedSeries.zero(ring, order)
        exponentials: Dict[Curve, GradedSeries] = {}
        for (beta, alpha), c in self.terms.items():
            if sum(alpha) > order:
                continue
            if beta not in exponentials:
                linear = GradedSeries.zero(ring, order)
                for j, a in enumerate(self.divisor):
                    if beta[j]:
                        linear = linear + GradedSeries.variable(ring, order, a, Fraction(beta[j]))
                exp_series = GradedSeries.constant(ring, order, Fraction(1))
                term = exp_series
                for m in range(1, order + 1):
                    term = (term * linear).scale(Fraction(1, m))
                    if term.is_zero():
                        break
                    exp_series = exp_series + term
                exponentials[beta] = exp_series
            monomial = GradedSeries(ring, order, {alpha: c})
            total = total + exponentials[beta] * monomial
        return total

    def to_dict(self) -> List[dict]:
        return [
            {'curve': list(beta), 'exponents': list(alpha), 'coefficient': c}
            for (beta, alpha), c in sorted(self.terms.items(), key=lambda item: (sum(item[0][0]), item[0]))
        ]

    def __repr__(self) -> str:
        return f"FourierSeries({len(self.terms)} terms, classes {self.curve_classes()})"


# ---------------------------------------------------------------------------
# qc-type potentials
# ---------------------------------------------------------------------------

def _factorial(alpha: Exponent) -> int:
    return math.prod(math.factorial(e) for e in alpha)


@dataclass
class QCPotential:
    """
    qc-type potential with explicit curve and classical data

    Attributes:
        labels: Basis labels; index 0 is the unit
        degrees: q_a with basis element a in H^{2q}
        dimension: Complex dimension
        metric: Object matrix g_ab
        classical: The cubic c as a FourierSeries with beta = 0
        correlators: I_beta(alpha) keyed by (beta, alpha), alpha zero on divisors
        c1: Coefficients of the first Chern class on the divisor classes
        max_curve: Highest curve degree stored
    """

    labels: Tuple[str, ...]
    degrees: Tuple[int, ...]
    dimension: int
    metric: np.ndarray
    classical: FourierSeries
    correlators: Dict[Tuple[Curve, Exponent], Fraction]
    c1: Tuple[Fraction, ...]
    max_curve: int = 0
    name: str = ''

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.degrees = tuple(int(q) for q in self.degrees)
        self.c1 = tuple(Fraction(r) for r in self.c1)
        if len(self.c1) != len(self.divisor):
            raise QCPotentialError(f"c1 needs {len(self.divisor)} divisor coefficients, got {len(self.c1)}")
        if self.degrees[0] != 0:
            raise QCPotentialError("Basis element 0 must be the unit")
        for (beta, alpha), value in self.correlators.items():
            if len(beta) != len(self.divisor) or any(b < 0 for b in beta) or not any(beta):
                raise QCPotentialError(f"Curve class {beta} is not a nonzero effective class")
            if any(alpha[a] for a in self.divisor):
                raise QCPotentialError(f"Correlator {beta}, {alpha} has divisor insertions; store them reduced")
            eigenvalue = self.term_eigenvalue(beta, alpha)
            if eigenvalue != self.D + 1:
                raise InhomogeneousTermError(
                    f"Term {beta}, {alpha} has Euler eigenvalue {format_fraction(eigenvalue)}, "
                    f"expected {format_fraction(self.D + 1)}"
                )

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def divisor(self) -> Tuple[int, ...]:
        return tuple(a for a, q in enumerate(self.degrees) if q == 1)

    @property
    def spectrum(self) -> Tuple[Fraction, ...]:
        """d_a = 1 - q_a."""
        return tuple(Fraction(1 - q) for q in self.degrees)

    @property
    def D(self) -> Fraction:
        return Fraction(2 - self.dimension)

    def profile(self) -> SpectrumProfile:
        betti = [0] * (max(self.degrees) + 1)
        for q in self.degrees:
            betti[q] += 1
        return qc_profile(self.dimension, betti)

    def term_eigenvalue(self, beta: Curve, alpha: Exponent) -> Fraction:
        """Eigenvalue of E = sum d_a x_a d_a + sum r_j d_j on q^beta e^(beta x) x^alpha."""
        spectrum = self.spectrum
        value = sum((e * d for e, d in zip(alpha, spectrum)), Fraction(0))
        return value + sum((r * b for r, b in zip(self.c1, beta)), Fraction(0))

    def psi(self) -> FourierSeries:
        return FourierSeries(self.rank, self.divisor, {
            (beta, alpha): Fraction(value, _factorial(alpha)) for (beta, alpha), value in self.correlators.items()
        }, self.max_curve)

    def potential(self) -> FourierSeries:
        classical = FourierSeries(self.rank, self.divisor, self.classical.terms, self.max_curve)
        return classical + self.psi()

    def to_series(self, order: int) -> GradedSeries:
        return self.potential().to_series(order)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'labels': list(self.labels),
            'degrees': list(self.degrees),
            'dimension': self.dimension,
            'D': self.D,
            'c1': list(self.c1),
            'max_curve': self.max_curve,
            'classical': self.classical,
            'correlators': [
                {'curve': list(beta), 'exponents': list(alpha), 'value': value}
                for (beta, alpha), value in sorted(self.correlators.items())
            ],
        }


def split_check(potential: QCPotential, series: Optional[FourierSeries] = None) -> CheckReport:
    """
    Homogeneity of the split Phi = c + Psi

    Psi terms satisfy E Psi = (D + 1) Psi; classical terms are cubic with
    (E - E(0)) c = (D + 1) c, E(0) being the flat part sum r_j d/dx_j.
    """
    series = series if series is not None else potential.potential()
    report = CheckReport('split')
    target = potential.D + 1
    spectrum = potential.spectrum
    for (beta, alpha), _ in sorted(series.terms.items()):
        witness = f"curve {list(beta)}, exponents {list(alpha)}"
        if any(beta):
            report.expect(potential.term_eigenvalue(beta, alpha) == target, 'psi_eigenvalue', witness)
        else:
            report.expect(sum(alpha) == 3, 'classical_cubic', witness)
            eigenvalue = sum((e * d for e, d in zip(alpha, spectrum)), Fraction(0))
            report.expect(eigenvalue == target, 'classical_eigenvalue', witness)
    report.details['eigenvalue'] = target
    return report


def identity_checks(potential: QCPotential) -> CheckReport:
    """e Psi = 0 and d_0 d_a d_b c = g_ab."""
    report = CheckReport('identity')
    report.expect(potential.psi().derivative(0).is_zero(), 'unit_kills_psi', 'e Psi')
    first = potential.classical.derivative(0)
    for a in range(potential.rank):
        second = first.derivative(a)
        for b in range(potential.rank):
            value = second.derivative(b).constant_term()
            report.expect(value == potential.metric[a, b], 'unit_gives_metric',
                          f"e c ({potential.labels[a]}, {potential.labels[b]}) = {format_fraction(value)}")
    return report


# ---------------------------------------------------------------------------
# Correlators and the divisor relation
# ---------------------------------------------------------------------------

def _reduced_exponent(potential: QCPotential, insertions: Sequence[int]) -> Exponent:
    alpha = [0] * potential.rank
    for a in insertions:
        if a not in potential.divisor:
            alpha[a] += 1
    return tuple(alpha)


def correlator_table(potential: QCPotential,
                     max_points: int = MAX_CORRELATOR_POINTS) -> Dict[CorrelatorKey, Fraction]:
    """
    Nonzero correlators <a_1 ... a_n>_beta for 3 <= n <= max_points

    Read off Psi: divisor insertions contribute (beta, delta) each.
    """
    classes = sorted({beta for beta, _ in potential.correlators})
    table: Dict[CorrelatorKey, Fraction] = {}
    for n in range(3, max_points + 1):
        for insertions in combinations_with_replacement(range(potential.rank), n):
            alpha = _reduced_exponent(potential, insertions)
            for beta in classes:
                value = potential.correlators.get((beta, alpha))
                if not value:
                    continue
                for a in insertions:
                    if a in potential.divisor:
                        value = value * beta[potential.divisor.index(a)]
                if value:
                    table[(beta, insertions)] = Fraction(value)
    return table


@dataclass
class DivisorExtension:
    table: Dict[CorrelatorKey, Fraction]
    report: CheckReport

    def to_dict(self) -> dict:
        return {
            'entries': [
                {'curve': list(beta), 'insertions': list(insertions), 'value': value}
                for (beta, insertions), value in sorted(self.table.items())
            ],
            'consistency': self.report,
        }


def divisor_extend(table: Dict[CorrelatorKey, Fraction], potential: QCPotential,
                   max_points: int = MAX_CORRELATOR_POINTS) -> DivisorExtension:
    """
    Correlators with n <= 2 insertions for every beta != 0

    <S>_beta = (beta, delta)^(-m) <S delta^m>_beta for any divisor delta with
    (beta, delta) != 0 and any m bringing the count to at least three; every
    admissible (delta, m) is computed and required to agree.

    Raises:
        DivisorPairingError: if some beta pairs to zero with every divisor
    """
    report = CheckReport('divisor_extension')
    extended = dict(table)
    classes = sorted({beta for beta, _ in table if any(beta)})
    for beta in classes:
        usable = [(j, a) for j, a in enumerate(potential.divisor) if beta[j] != 0]
        if not usable:
            raise DivisorPairingError(f"Curve class {list(beta)} pairs to zero with every divisor")
        for n in range(0, 3):
            for insertions in combinations_with_replacement(range(potential.rank), n):
                candidates = []
                for j, a in usable:
                    for m in range(3 - n, max_points - n + 1):
                        key = (beta, tuple(sorted(insertions + (a,) * m)))
                        candidates.append((f"{potential.labels[a]}^{m}",
                                           Fraction(table.get(key, 0)) / Fraction(beta[j]) ** m))
                if not candidates:
                    continue
                value = candidates[0][1]
                for choice, other in candidates[1:]:
                    report.expect(other == value, 'extension_consistency',
                                  f"curve {list(beta)}, insertions {list(insertions)} via {choice}")
                if value:
                    extended[(beta, tuple(insertions))] = value
    logger.debug(f"divisor_extend: {len(extended) - len(table)} entries with at most two insertions")
    return DivisorExtension(extended, report)


def divisor_identity_audit(table: Dict[CorrelatorKey, Fraction], potential: QCPotential) -> CheckReport:
    """<delta S>_beta = (beta, delta) <S>_beta wherever both sides are tabulated."""
    report = CheckReport('divisor_identity')
    sizes = {len(insertions) for _, insertions in table}
    for (beta, insertions), value in sorted(table.items()):
        if not any(beta):
            continue
        for j, a in enumerate(potential.divisor):
            bigger = tuple(sorted(insertions + (a,)))
            if len(bigger) in sizes:
                report.expect(table.get((beta, bigger), 0) == beta[j] * value, 'divisor_identity',
                              f"curve {list(beta)}: <{potential.labels[a]} {list(insertions)}>")
            if a in insertions:
                smaller = list(insertions)
                smaller.remove(a)
                smaller = tuple(smaller)
                if len(smaller) in sizes:
                    report.expect(value == beta[j] * table.get((beta, smaller), 0), 'divisor_identity',
                                  f"curve {list(beta)}: <{list(insertions)}> against <{list(smaller)}>")
    return report


# ---------------------------------------------------------------------------
# Associativity on Fourier series
# ---------------------------------------------------------------------------

def _third_derivatives(series: FourierSeries) -> List[List[List[FourierSeries]]]:
    r = series.rank
    first = [series.derivative(c) for c in range(r)]
    second = [[first[c].derivative(b) for c in range(r)] for b in range(r)]
    return [[[second[b][c].derivative(a) for c in range(r)] for b in range(r)] for a in range(r)]


def _wdvv_residuals(series: FourierSeries, g_inverse: np.ndarray) -> Dict[Tuple[int, int, int, int], FourierSeries]:
    r = series.rank
    T = _third_derivatives(series)
    zero = FourierSeries(r, series.divisor, max_curve=series.max_curve)
    raised = [[[zero] * r for _ in range(r)] for _ in range(r)]
    for a in range(r):
        for b in range(r):
            for f in range(r):
                total = zero
                for e in range(r):
                    if g_inverse[e, f] != 0 and T[a][b][e].terms:
                        total = total + T[a][b][e].scale(g_inverse[e, f])
                raised[a][b][f] = total
    residuals = {}
    for a in range(r):
        for b in range(r):
            for c in range(r):
                for d in range(r):
                    total = zero
                    for f in range(r):
                        if raised[a][b][f].terms and T[f][c][d].terms:
                            total = total + raised[a][b][f] * T[f][c][d]
                        if raised[b][c][f].terms and T[f][a][d].terms:
                            total = total - raised[b][c][f] * T[f][a][d]
                    residuals[(a, b, c, d)] = total
    return residuals


def qc_wdvv_check(potential: QCPotential, max_degree: Optional[int] = None) -> CheckReport:
    """Exact associativity residual of the full potential, per curve class."""
    max_degree = potential.max_curve if max_degree is None else max_degree
    series = potential.potential()
    series = FourierSeries(series.rank, series.divisor, series.terms, max_degree)
    report = CheckReport('qc_wdvv')
    residuals = _wdvv_residuals(series, exact_inverse(potential.metric))
    per_class: Dict[str, bool] = {}
    for quadruple, residual in residuals.items():
        names = ", ".join(potential.labels[i] for i in quadruple)
        for beta in residual.curve_classes():
            per_class[str(list(beta))] = False
            report.fail('wdvv', f"({names}) at curve {list(beta)}")
        report.checked += 1
    report.details['max_degree'] = max_degree
    report.details['failing_classes'] = sorted(per_class)
    return report


# ---------------------------------------------------------------------------
# Specializations
# ---------------------------------------------------------------------------

@dataclass
class Specializations:
    """
    Cup product and small quantum product

    cup[a][b][c] are rational structure constants; small[a][b][c] are Fourier
    series in the divisor coordinates.
    """

    cup: np.ndarray
    small: List[List[List[FourierSeries]]]
    report: CheckReport = field(default_factory=lambda: CheckReport('specializations'))

    def to_dict(self) -> dict:
        return {'cup': self.cup, 'small': self.small, 'report': self.report}


def _contract(T, g_inverse: np.ndarray, rank: int, zero):
    result = []
    for a in range(rank):
        row = []
        for b in range(rank):
            entries = []
            for c in range(rank):
                total = zero
                for e in range(rank):
                    if g_inverse[e, c] != 0 and T[a][b][e].terms:
                        total = total + T[a][b][e].scale(g_inverse[e, c])
                entries.append(total)
            row.append(entries)
        result.append(row)
    return result


def specializations(potential: QCPotential) -> Specializations:
    """
    Cup product (all beta != 0 terms dropped) and the small quantum product
    (non-divisor coordinates set to zero)

    The cup product is checked for associativity and unit.
    """
    r = potential.rank
    g_inverse = exact_inverse(potential.metric)
    full = potential.potential()
    zero = FourierSeries(r, potential.divisor, max_curve=potential.max_curve)

    classical_structure = _contract(_third_derivatives(full.large_volume()), g_inverse, r, zero)
    cup = np.array([
        [[classical_structure[a][b][c].constant_term() for c in range(r)] for b in range(r)] for a in range(r)
    ], dtype=object).reshape(r, r, r)

    T = _third_derivatives(full)
    small_T = [[[T[a][b][c].small() for c in range(r)] for b in range(r)] for a in range(r)]
    small = _contract(small_T, g_inverse, r, zero)

    report = CheckReport('specializations')
    for a in range(r):
        report.expect(all(cup[0, a, c] == (1 if c == a else 0) for c in range(r)), 'cup_unit', potential.labels[a])
        for b in range(r):
            report.expect(all(cup[a, b, c] == cup[b, a, c] for c in range(r)), 'cup_commutative',
                          f"{potential.labels[a]}, {potential.labels[b]}")
            for c in range(r):
                for m in range(r):
                    left = sum(cup[a, b, p] * cup[p, c, m] for p in range(r))
                    right = sum(cup[b, c, p] * cup[a, p, m] for p in range(r))
                    report.expect(left == right, 'cup_associative',
                                  f"({potential.labels[a]} {potential.labels[b]}) {potential.labels[c]}")
    return Specializations(cup=cup, small=small, report=report)


# ---------------------------------------------------------------------------
# The projective plane
# ---------------------------------------------------------------------------

def _p2_potential(numbers: Dict[int, Fraction], max_curve: int) -> QCPotential:
    classical = FourierSeries(3, (1,), {
        ((0,), (2, 0, 1)): Fraction(1, 2),
        ((0,), (1, 2, 0)): Fraction(1, 2),
    })
    metric = np.array([[Fraction(1 if a + b == 2 else 0) for b in range(3)] for a in range(3)], dtype=object)
    correlators = {((d,), (0, 0, 3 * d - 1)): Fraction(n) for d, n in numbers.items() if n}
    return QCPotential(
        labels=('1', 'h', 'h2'),
        degrees=(0, 1, 2),
        dimension=2,
        metric=metric,
        classical=classical,
        correlators=correlators,
        c1=(Fraction(3),),
        max_curve=max_curve,
        name='projective-plane',
    )


def _class_residual(potential: QCPotential, degree: int) -> Dict[Tuple, Fraction]:
    series = potential.potential()
    residuals = _wdvv_residuals(series, exact_inverse(potential.metric))
    flat = {}
    for quadruple, residual in residuals.items():
        for (beta, alpha), value in residual.terms.items():
            if beta == (degree,):
                flat[(quadruple, alpha)] = value
    return flat


def p2_generate(max_degree: int = P2_DEFAULT_DEGREE, seed=P2_SEED_INVARIANT) -> QCPotential:
    """
    Quantum potential of the projective plane through curve degree max_degree

    Phi = x0^2 x2/2 + x0 x1^2/2 + sum_d N_d e^(d x1) x2^(3d-1)/(3d-1)!.
    N_1 is the seed; each later N_d enters the associativity residual of
    class d linearly and is solved from it, then the whole class-d residual
    is required to vanish.

    Raises:
        QCPotentialError: if max_degree < 1 or the residual cannot be cleared
    """
    if max_degree < 1:
        raise QCPotentialError("max_degree must be at least 1")
    numbers: Dict[int, Fraction] = {1: Fraction(seed)}
    for d in range(2, max_degree + 1):
        base = _class_residual(_p2_potential({**numbers, d: Fraction(0)}, d), d)
        unit = _class_residual(_p2_potential({**numbers, d: Fraction(1)}, d), d)
        solved = None
        for key in sorted(set(base) | set(unit)):
            slope = unit.get(key, 0) - base.get(key, 0)
            if slope != 0:
                solved = Fraction(-base.get(key, 0)) / slope
                break
        if solved is None:
            raise QCPotentialError(f"Associativity does not determine N_{d}")
        numbers[d] = solved
        remaining = _class_residual(_p2_potential(numbers, d), d)
        if remaining:
            raise QCPotentialError(f"Associativity residual of degree {d} does not vanish")
        logger.debug(f"p2_generate: N_{d} = {format_fraction(solved)}")
    potential = _p2_potential(numbers, max_degree)
    logger.info(f"p2_generate: N = {[format_fraction(numbers[d]) for d in sorted(numbers)]}")
    return potential


def p2_numbers(potential: QCPotential) -> List[Fraction]:
    """N_1, N_2, ... read back from a projective-plane potential."""
    return [
        potential.correlators.get(((d,), (0, 0, 3 * d - 1)), Fraction(0))
        for d in range(1, potential.max_curve + 1)
    ]


# ---------------------------------------------------------------------------
# Integral-spectrum restriction
# ---------------------------------------------------------------------------

@dataclass
class HMRestriction:
    series: GradedSeries
    keep: List[int]
    metric: np.ndarray
    report: CheckReport

    def to_dict(self) -> dict:
        return {'keep': self.keep, 'metric': self.metric, 'series': self.series, 'report': self.report}


def hm_restrict(series: GradedSeries, spectrum: Sequence, D, metric: np.ndarray, case: str = 'i',
                potential: Optional[QCPotential] = None) -> HMRestriction:
    """
    Restrict a potential to the coordinates with integral spectrum

    Case 'i' needs only D integral; case 'ii' is the qc-type case, where
    sum r_b beta_b must also be integral on every stored curve class. The
    metric must not couple integral and non-integral coordinates, the
    restricted metric must be nondegenerate, and the restriction is
    re-checked for associativity.

    Raises:
        NonIntegralError: if D is not an integer
        DegenerateMetricError: if the restricted metric is degenerate
    """
    D = Fraction(D)
    if D.denominator != 1:
        raise NonIntegralError(f"D = {format_fraction(D)} is not integral")
    if case not in ('i', 'ii'):
        raise QCPotentialError(f"Unknown case {case!r}; expected 'i' or 'ii'")

    spectrum = [Fraction(d) for d in spectrum]
    rank = len(spectrum)
    keep = [a for a, d in enumerate(spectrum) if d.denominator == 1]
    report = CheckReport('hm_restriction')

    for a in keep:
        for b in range(rank):
            if b not in keep:
                report.expect(metric[a, b] == 0 and metric[b, a] == 0, 'metric_block',
                              f"g({series.ring[a].name}, {series.ring[b].name})")

    if case == 'ii':
        if potential is None:
            raise QCPotentialError("Case 'ii' needs the qc-type potential")
        for beta in sorted({beta for beta, _ in potential.correlators}):
            value = sum((r * b for r, b in zip(potential.c1, beta)), Fraction(0))
            report.expect(value.denominator == 1, 'c1_integral', f"curve {list(beta)}")

    restricted_metric = np.array([[metric[a, b] for b in keep] for a in keep], dtype=object).reshape(len(keep), len(keep))
    if exact_rank(restricted_metric) < len(keep):
        raise DegenerateMetricError("Restricted metric is degenerate")

    restricted = series.restrict(keep)
    report.merge(wdvv_check(restricted, restricted_metric))
    report.details['keep'] = [series.ring[a].name for a in keep]
    logger.info(f"hm_restrict: kept {len(keep)} of {rank} coordinates")
    return HMRestriction(series=restricted, keep=keep, metric=restricted_metric, report=report)
