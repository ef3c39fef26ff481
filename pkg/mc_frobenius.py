"""
Formal Frobenius manifolds from dGBV algebras

Solves the master equation delta Gamma + 1/2 [Gamma . Gamma] = 0 over
K = Q[[x_0, ..., x_h]] degree by degree, reduces products of lifted vector
fields back to homology to get the multiplication X o Y, and builds the
metric and the potential Phi = integral(Gamma^3/6 - 1/2 delta B . Delta B).
The checks at the bottom verify WDVV, potentiality and the Euler structure
on the truncated output.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import DIRECTION_SAMPLES, DEFAULT_SEED, TRUNCATION_ORDER
from dgbv import ConditionsReport, DGBVAlgebra, conditions_check
from graded_core import (
    ExactSolver,
    FrobeniusError,
    GradedSeries,
    GradedVariable,
    column_space,
    columns_matrix,
    exact_inverse,
    exact_rank,
    is_zero_vector,
    make_ring,
    monomial_parity,
    monomial_product,
    sparse_apply,
    sparse_matmul,
    subspace_rank,
    zero_vector,
)
from utils import CheckReport, format_fraction

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


class MasterEquationError(FrobeniusError):
    """Errors of the master-equation pipeline"""


class ObstructionError(MasterEquationError):
    """A right-hand side of the degree-by-degree solve is not exact"""


class NonUnitError(MasterEquationError):
    """The first homology representative is not the unit"""


class ReductionError(MasterEquationError):
    """A product could not be reduced modulo the image of the shifted differential"""


class DegenerateMetricError(MasterEquationError):
    """The pairing on homology is degenerate"""


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


# ---------------------------------------------------------------------------
# Formal base
# ---------------------------------------------------------------------------

@dataclass
class FormalBase:
    """
    Coordinates x_i dual to homology representatives c_i

    Attributes:
        ring: Graded variables; x_i has the parity of c_i and weight 2 - w(c_i)
        representatives: Vectors c_i in the algebra, c_0 = 1
        order: Truncation order N
    """

    ring: Tuple[GradedVariable, ...]
    representatives: List[np.ndarray]
    order: int = TRUNCATION_ORDER

    @property
    def size(self) -> int:
        return len(self.ring)

    @property
    def odd_mask(self) -> Tuple[bool, ...]:
        return tuple(v.odd for v in self.ring)

    @property
    def weighted(self) -> bool:
        return all(v.weight is not None for v in self.ring)

    def operator_weight(self, index: int) -> Fraction:
        """|X_i| = -|x_i|."""
        return -self.ring[index].weight

    def to_dict(self) -> dict:
        return {
            'order': self.order,
            'coordinates': [
                {'name': v.name, 'odd': v.odd, 'weight': v.weight} for v in self.ring
            ],
        }


def formal_base(dgbv: DGBVAlgebra, order: int = TRUNCATION_ORDER,
                conditions: Optional[ConditionsReport] = None) -> FormalBase:
    """
    Formal base from the homology representatives of conditions_check

    Raises:
        MasterEquationError: if (A) or (B) fails
        NonUnitError: if the first representative is not the unit
    """
    conditions = conditions or conditions_check(dgbv)
    if not conditions.passed:
        raise MasterEquationError(
            f"Conditions (A) and (B) are required, got A={conditions.A} B={conditions.B} for {dgbv.name}"
        )
    classes = conditions.homology
    one = dgbv.algebra.basis(dgbv.algebra.unit)
    if not classes or not np.array_equal(classes[0].vector, one):
        raise NonUnitError("The first homology representative must be the unit")

    weights = [None if c.weight is None else 2 - c.weight for c in classes]
    ring = make_ring([f"x{i}" for i in range(len(classes))],
                     odd=[c.parity == 1 for c in classes],
                     weights=weights if all(w is not None for w in weights) else None)
    logger.debug(f"formal_base {dgbv.name}: {len(ring)} coordinates, order {order}")
    return FormalBase(ring=ring, representatives=[c.vector for c in classes], order=order)


# ---------------------------------------------------------------------------
# K ⊗ A
# ---------------------------------------------------------------------------

class AlgebraSeries:
    """
    Truncated element of K ⊗ A

    Terms map exponent vectors to coordinate vectors in the algebra. The
    product is (f ⊗ a)(g ⊗ b) = (-1)^(a g) fg ⊗ ab and odd operators act as
    T(f ⊗ a) = (-1)^f f ⊗ Ta.
    """

    __slots__ = ('ring', 'algebra', 'order', 'terms', '_odd')

    def __init__(self, ring: Sequence[GradedVariable], algebra, order: int,
                 terms: Optional[Dict[Exponent, np.ndarray]] = None):
        self.ring = tuple(ring)
        self.algebra = algebra
        self.order = int(order)
        self._odd = tuple(v.odd for v in self.ring)
        self.terms = {
            tuple(alpha): np.asarray(vector, dtype=object)
            for alpha, vector in (terms or {}).items()
            if sum(alpha) <= self.order and not is_zero_vector(vector)
        }

    def _like(self, terms: Dict[Exponent, np.ndarray]) -> 'AlgebraSeries':
        return AlgebraSeries(self.ring, self.algebra, self.order, terms)

    @classmethod
    def zero(cls, ring, algebra, order) -> 'AlgebraSeries':
        return cls(ring, algebra, order)

    @classmethod
    def from_scalar(cls, series: GradedSeries, algebra) -> 'AlgebraSeries':
        """f ⊗ 1."""
        one = algebra.basis(algebra.unit)
        return cls(series.ring, algebra, series.order,
                   {alpha: c * one for alpha, c in series.terms.items()})

    @property
    def odd_mask(self) -> Tuple[bool, ...]:
        return self._odd

    def coefficient(self, alpha: Exponent) -> np.ndarray:
        return self.terms.get(tuple(alpha), zero_vector(self.algebra.dimension))

    def is_zero(self) -> bool:
        return not self.terms

    def max_degree(self) -> int:
        return max((sum(alpha) for alpha in self.terms), default=-1)

    def __add__(self, other: 'AlgebraSeries') -> 'AlgebraSeries':
        terms = dict(self.terms)
        for alpha, vector in other.terms.items():
            terms[alpha] = terms[alpha] + vector if alpha in terms else vector
        return self._like(terms)

    def __neg__(self) -> 'AlgebraSeries':
        return self._like({alpha: -v for alpha, v in self.terms.items()})

    def __sub__(self, other: 'AlgebraSeries') -> 'AlgebraSeries':
        return self + (-other)

    def scale(self, factor) -> 'AlgebraSeries':
        return self._like({alpha: factor * v for alpha, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __mul__(self, other: 'AlgebraSeries') -> 'AlgebraSeries':
        algebra = self.algebra
        result: Dict[Exponent, np.ndarray] = {}
        other_items = [(beta, b, sum(beta), monomial_parity(beta, self._odd)) for beta, b in other.terms.items()]
        for alpha, a in self.terms.items():
            degree = sum(alpha)
            parts = [(p, v) for p, v in algebra.split(a).items() if not is_zero_vector(v)]
            for beta, b, beta_degree, beta_parity in other_items:
                if degree + beta_degree > self.order:
                    continue
                product = monomial_product(alpha, beta, self._odd)
                if product is None:
                    continue
                sign, gamma = product
                for parity, part in parts:
                    value = (sign * _sign(parity * beta_parity)) * algebra.multiply(part, b)
                    result[gamma] = result[gamma] + value if gamma in result else value
        return self._like(result)

    def left_multiply(self, series: GradedSeries) -> 'AlgebraSeries':
        """f · self for a scalar series f."""
        result: Dict[Exponent, np.ndarray] = {}
        for alpha, c in series.terms.items():
            degree = sum(alpha)
            for beta, b in self.terms.items():
                if degree + sum(beta) > self.order:
                    continue
                product = monomial_product(alpha, beta, self._odd)
                if product is None:
                    continue
                sign, gamma = product
                value = (sign * c) * b
                result[gamma] = result[gamma] + value if gamma in result else value
        return self._like(result)

    def apply_odd(self, matrix: np.ndarray) -> 'AlgebraSeries':
        return self._like({
            alpha: _sign(monomial_parity(alpha, self._odd)) * sparse_apply(matrix, v)
            for alpha, v in self.terms.items()
        })

    def derivative(self, index: int) -> 'AlgebraSeries':
        result: Dict[Exponent, np.ndarray] = {}
        for alpha, v in self.terms.items():
            if alpha[index] == 0:
                continue
            if self._odd[index]:
                before = sum(1 for j in range(index) if self._odd[j] and alpha[j])
                factor = _sign(before)
            else:
                factor = alpha[index]
            gamma = list(alpha)
            gamma[index] -= 1
            gamma = tuple(gamma)
            value = factor * v
            result[gamma] = result[gamma] + value if gamma in result else value
        return self._like(result)

    def homogeneous(self, degree: int) -> 'AlgebraSeries':
        return self._like({alpha: v for alpha, v in self.terms.items() if sum(alpha) == degree})

    def integrate(self, integral: np.ndarray) -> GradedSeries:
        return GradedSeries(self.ring, self.order, {
            alpha: Fraction(integral.dot(v)) for alpha, v in self.terms.items()
        })

    def split(self) -> Dict[int, 'AlgebraSeries']:
        """Even and odd parts for the total parity in K ⊗ A."""
        parts: Dict[int, Dict[Exponent, np.ndarray]] = {0: {}, 1: {}}
        for alpha, v in self.terms.items():
            p_alpha = monomial_parity(alpha, self._odd)
            for parity, component in self.algebra.split(v).items():
                if not is_zero_vector(component):
                    parts[(parity + p_alpha) % 2][alpha] = component
        return {parity: self._like(terms) for parity, terms in parts.items()}

    def weights(self) -> set:
        """Set of total weights of the terms; needs weighted coordinates and algebra."""
        found = set()
        for alpha, v in self.terms.items():
            x_weight = sum(e * var.weight for e, var in zip(alpha, self.ring))
            for i, value in enumerate(v):
                if value != 0:
                    found.add(x_weight + self.algebra.weights[i])
        return found

    def to_dict(self) -> List[dict]:
        labels = GradedSeries(self.ring, self.order)
        return [
            {'monomial': labels.monomial_label(alpha), 'element': self.algebra.format_element(v)}
            for alpha, v in sorted(self.terms.items(), key=lambda item: (sum(item[0]), tuple(-e for e in item[0])))
        ]

    def __repr__(self) -> str:
        return " + ".join(f"{item['monomial']}⊗({item['element']})" for item in self.to_dict()) or "0"


def bracket_series(dgbv: DGBVAlgebra, first: AlgebraSeries, second: AlgebraSeries) -> AlgebraSeries:
    """
    Odd bracket on K ⊗ A

    [f ⊗ a . g ⊗ b] = (-1)^((a+1) g) fg ⊗ [a . b]
    """
    if dgbv.delta.is_zero():
        return AlgebraSeries.zero(first.ring, first.algebra, first.order)
    odd = first.odd_mask
    result: Dict[Exponent, np.ndarray] = {}
    second_items = [(beta, b, sum(beta), monomial_parity(beta, odd)) for beta, b in second.terms.items()]
    for alpha, a in first.terms.items():
        degree = sum(alpha)
        parts = [
            (parity, part)
            for parity, part in dgbv.algebra.split(a).items() if not is_zero_vector(part)
        ]
        for beta, b, beta_degree, beta_parity in second_items:
            if degree + beta_degree > first.order:
                continue
            product = monomial_product(alpha, beta, odd)
            if product is None:
                continue
            sign, gamma = product
            for parity, part in parts:
                value = (sign * _sign((parity + 1) * beta_parity)) * dgbv.bracket(part, b)
                result[gamma] = result[gamma] + value if gamma in result else value
    return first._like(result)


def master_residual(dgbv: DGBVAlgebra, gamma: AlgebraSeries) -> AlgebraSeries:
    """delta Gamma + 1/2 [Gamma . Gamma] through the truncation order."""
    return gamma.apply_odd(dgbv.d.matrix) + bracket_series(dgbv, gamma, gamma).scale(Fraction(1, 2))


# ---------------------------------------------------------------------------
# Normalized solution
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GammaSolution:
    """
    Normalized solution Gamma = Gamma_1 + Delta B through order N

    Attributes:
        dgbv: The algebra the solution lives in
        base: Formal base
        gamma: Gamma as an element of K ⊗ A
        b: B with B_0 = B_1 = 0
        residual: Master-equation residual, zero on success
    """

    dgbv: DGBVAlgebra
    base: FormalBase
    gamma: AlgebraSeries
    b: AlgebraSeries
    residual: AlgebraSeries
    _partials: Optional[List[AlgebraSeries]] = field(default=None, init=False, repr=False)
    _structure: Optional[List[List[List[GradedSeries]]]] = field(default=None, init=False, repr=False)
    _reduction: Optional[ExactSolver] = field(default=None, init=False, repr=False)

    @property
    def order(self) -> int:
        return self.base.order

    @property
    def solved(self) -> bool:
        return self.residual.is_zero()

    def term(self, degree: int) -> AlgebraSeries:
        return self.gamma.homogeneous(degree)

    def partials(self) -> List[AlgebraSeries]:
        """d Gamma / d x_i, the lifts of the coordinate vector fields."""
        if self._partials is None:
            self._partials = [self.gamma.derivative(i) for i in range(self.base.size)]
        return self._partials

    def reduction_solver(self) -> ExactSolver:
        if self._reduction is None:
            n = self.dgbv.dimension
            matrix = np.hstack([columns_matrix(self.base.representatives, n), self.dgbv.d.matrix])
            self._reduction = ExactSolver(matrix)
        return self._reduction

    def to_dict(self) -> dict:
        return {
            'order': self.order,
            'solved': self.solved,
            'base': self.base,
            'gamma': self.gamma,
            'b': self.b,
        }


def solve_master(dgbv: DGBVAlgebra, base: Optional[FormalBase] = None,
                 order: int = TRUNCATION_ORDER) -> GammaSolution:
    """
    Normalized formal solution of the master equation

    Gamma_1 = sum x_i c_i. For n >= 2 each monomial coefficient of
    delta Gamma_n = -1/2 sum_{i+j=n} [Gamma_i . Gamma_j] is solved as
    Gamma_n = Delta B_n with delta Delta B_n prescribed, which keeps
    Gamma_n inside Im Delta.

    Raises:
        NonUnitError: if c_0 is not the unit
        ObstructionError: if some right-hand side is not in Im delta Delta
    """
    base = base or formal_base(dgbv, order)
    algebra = dgbv.algebra
    ring, N = base.ring, base.order
    odd = base.odd_mask

    if not base.representatives or not np.array_equal(base.representatives[0], algebra.basis(algebra.unit)):
        raise NonUnitError("The first homology representative must be the unit")

    Delta = dgbv.delta.matrix
    solver = ExactSolver(sparse_matmul(dgbv.d.matrix, Delta))

    linear = {}
    for i, vector in enumerate(base.representatives):
        alpha = tuple(1 if j == i else 0 for j in range(base.size))
        linear[alpha] = vector
    layers: List[AlgebraSeries] = [AlgebraSeries.zero(ring, algebra, N), AlgebraSeries(ring, algebra, N, linear)]
    b_terms: Dict[Exponent, np.ndarray] = {}

    for n in range(2, N + 1):
        rhs = AlgebraSeries.zero(ring, algebra, N)
        for i in range(1, n):
            rhs = rhs + bracket_series(dgbv, layers[i], layers[n - i])
        rhs = rhs.scale(Fraction(-1, 2))

        layer_terms = {}
        for alpha, r in rhs.terms.items():
            sign = _sign(monomial_parity(alpha, odd))
            x = solver.solve(sign * r)
            if x is None:
                label = GradedSeries(ring, N).monomial_label(alpha)
                raise ObstructionError(
                    f"Degree {n}, monomial {label}: {algebra.format_element(r)} is not in Im delta Delta"
                )
            layer_terms[alpha] = sparse_apply(Delta, x)
            b_terms[alpha] = sign * x
        layers.append(AlgebraSeries(ring, algebra, N, layer_terms))
        logger.debug(f"solve_master {dgbv.name}: degree {n}, {len(layer_terms)} nonzero terms")

    gamma = AlgebraSeries.zero(ring, algebra, N)
    for layer in layers:
        gamma = gamma + layer
    solution = GammaSolution(
        dgbv=dgbv, base=base, gamma=gamma,
        b=AlgebraSeries(ring, algebra, N, b_terms),
        residual=master_residual(dgbv, gamma),
    )
    if not solution.solved:
        logger.warning(f"solve_master {dgbv.name}: residual does not vanish through order {N}")
    else:
        logger.info(f"solve_master {dgbv.name}: normalized solution through order {N}")
    return solution


def normalization_check(solution: GammaSolution) -> CheckReport:
    """
    Properties of a normalized solution

    Vanishing residual, Gamma_n in Im Delta for n >= 2, Delta Gamma = 0,
    d Gamma / d x_0 = 1, Delta B = Gamma - Gamma_1 and |Gamma| = 2 when weights
    are present.
    """
    report = CheckReport('normalization')
    dgbv = solution.dgbv
    n = dgbv.dimension
    image = column_space(dgbv.delta.matrix)
    image_rank = len(image)
    labels = GradedSeries(solution.base.ring, solution.order)

    for alpha, vector in solution.residual.terms.items():
        report.fail('master_equation', f"{labels.monomial_label(alpha)}: {dgbv.algebra.format_element(vector)}")
    report.checked += 1

    for alpha, vector in solution.gamma.terms.items():
        if sum(alpha) >= 2:
            report.expect(subspace_rank(image + [vector], n) == image_rank,
                          'gamma_in_image_of_Delta', labels.monomial_label(alpha))

    report.expect(solution.gamma.apply_odd(dgbv.delta.matrix).is_zero(), 'gamma_Delta_closed', 'Delta Gamma')

    unit = AlgebraSeries(solution.base.ring, dgbv.algebra, solution.order,
                         {(0,) * solution.base.size: dgbv.algebra.basis(dgbv.algebra.unit)})
    report.expect(solution.gamma.derivative(0) == unit, 'unit_direction', 'd Gamma / d x0')

    gamma_1 = solution.gamma.homogeneous(1)
    report.expect(solution.b.apply_odd(dgbv.delta.matrix) == solution.gamma - gamma_1, 'gamma_from_B', 'Delta B')
    report.expect(all(sum(alpha) >= 2 for alpha in solution.b.terms), 'B_starts_in_degree_two', 'B')

    if solution.base.weighted and dgbv.algebra.weights is not None:
        weights = solution.gamma.weights()
        report.expect(weights <= {Fraction(2)}, 'gamma_weight', f"weights {sorted(weights)}")

    report.details['order'] = solution.order
    return report


# ---------------------------------------------------------------------------
# Multiplication on homology
# ---------------------------------------------------------------------------

def reduce_to_homology(solution: GammaSolution, element: AlgebraSeries,
                       order: Optional[int] = None) -> Tuple[List[GradedSeries], AlgebraSeries]:
    """
    Write element = sum_k f_k dGamma/dx_k + delta_Gamma Y

    Solved degree by degree; at each monomial the remainder is split into
    representatives and a delta-preimage with fixed pivoting.

    Returns:
        (coefficient series f_k, correction Y)

    Raises:
        ReductionError: if a remainder is not in span(c) + Im delta
    """
    order = solution.order - 1 if order is None else order
    dgbv = solution.dgbv
    ring, algebra, N = solution.base.ring, dgbv.algebra, solution.order
    h = solution.base.size
    odd = solution.base.odd_mask
    partials = solution.partials()
    solver = solution.reduction_solver()

    coefficients: List[Dict[Exponent, Fraction]] = [{} for _ in range(h)]
    layers: List[AlgebraSeries] = []
    gamma_layers = [solution.term(m) for m in range(N + 1)]
    partial_layers = [[p.homogeneous(m) for m in range(N + 1)] for p in partials]

    for degree in range(order + 1):
        explained = AlgebraSeries.zero(ring, algebra, N)
        for k in range(h):
            lower = GradedSeries(ring, N, {
                alpha: c for alpha, c in coefficients[k].items() if sum(alpha) < degree
            })
            if lower.terms:
                for m in range(degree):
                    part = lower.homogeneous(m)
                    if part.terms:
                        explained = explained + partial_layers[k][degree - m].left_multiply(part)
        for m in range(1, degree + 1):
            explained = explained + bracket_series(dgbv, gamma_layers[m], layers[degree - m])
        remainder = element.homogeneous(degree) - explained

        y_terms = {}
        for alpha, r in remainder.terms.items():
            if sum(alpha) != degree:
                continue
            x = solver.solve(r)
            if x is None:
                label = GradedSeries(ring, N).monomial_label(alpha)
                raise ReductionError(
                    f"Degree {degree}, monomial {label}: {algebra.format_element(r)} is not in span(c) + Im delta"
                )
            for k in range(h):
                if x[k] != 0:
                    coefficients[k][alpha] = x[k]
            y_terms[alpha] = _sign(monomial_parity(alpha, odd)) * x[h:]
        layers.append(AlgebraSeries(ring, algebra, N, y_terms))

    correction = AlgebraSeries.zero(ring, algebra, N)
    for layer in layers:
        correction = correction + layer
    return [GradedSeries(ring, order, terms) for terms in coefficients], correction


def structure_constants(solution: GammaSolution) -> List[List[List[GradedSeries]]]:
    """A[i][j][k] with X_i o X_j = sum_k A_ij^k X_k, through order N - 1; cached."""
    if solution._structure is None:
        partials = solution.partials()
        h = solution.base.size
        table = []
        for i in range(h):
            row = []
            for j in range(h):
                coefficients, _ = reduce_to_homology(solution, partials[i] * partials[j])
                row.append(coefficients)
            table.append(row)
        solution._structure = table
        logger.debug(f"structure_constants: {h}x{h} products reduced")
    return solution._structure


def _pass_odd(parity: int, series: GradedSeries) -> GradedSeries:
    """(-1)^(parity * |series|) series."""
    return series.parity_twist() if parity % 2 else series


def circ_product(solution: GammaSolution, first: Sequence[GradedSeries],
                 second: Sequence[GradedSeries]) -> List[GradedSeries]:
    """
    (sum f_i X_i) o (sum g_j X_j) = sum (-1)^(X_i g_j) f_i g_j A_ij^k X_k

    Vector fields are given by their coefficient series, order N - 1.
    """
    table = structure_constants(solution)
    h = solution.base.size
    odd = solution.base.odd_mask
    ring, order = solution.base.ring, solution.order - 1
    result = [GradedSeries.zero(ring, order) for _ in range(h)]
    for i, f in enumerate(first):
        if not f.terms:
            continue
        for j, g in enumerate(second):
            if not g.terms:
                continue
            factor = f * _pass_odd(odd[i], g)
            for k in range(h):
                if table[i][j][k].terms:
                    result[k] = result[k] + factor * table[i][j][k]
    return result


def basis_field(solution: GammaSolution, index: int) -> List[GradedSeries]:
    ring, order = solution.base.ring, solution.order - 1
    return [GradedSeries.constant(ring, order, 1) if k == index else GradedSeries.zero(ring, order)
            for k in range(solution.base.size)]


# ---------------------------------------------------------------------------
# Metric and potential
# ---------------------------------------------------------------------------

def metric(dgbv: DGBVAlgebra, solution) -> np.ndarray:
    """
    g_ij = integral(c_i c_j)

    Args:
        solution: GammaSolution or FormalBase

    Raises:
        DegenerateMetricError: if g is degenerate
    """
    base = solution.base if isinstance(solution, GammaSolution) else solution
    reps = base.representatives
    h = len(reps)
    g = np.array([
        [dgbv.integrate(dgbv.algebra.multiply(reps[i], reps[j])) for j in range(h)] for i in range(h)
    ], dtype=object).reshape(h, h)
    if exact_rank(g) < h:
        raise DegenerateMetricError(f"Metric on homology of {dgbv.name} has rank {exact_rank(g)} < {h}")
    return g


def potential(dgbv: DGBVAlgebra, solution: GammaSolution) -> GradedSeries:
    """
    Phi = integral(Gamma^3 / 6 - 1/2 delta B . Delta B) through order N

    Terms of degree <= 2 are dropped.
    """
    gamma = solution.gamma
    cubic = (gamma * gamma * gamma).integrate(dgbv.integral).scale(Fraction(1, 6))
    correction = (solution.b.apply_odd(dgbv.d.matrix) * solution.b.apply_odd(dgbv.delta.matrix))
    phi = cubic - correction.integrate(dgbv.integral).scale(Fraction(1, 2))
    phi = GradedSeries(phi.ring, phi.order, {alpha: c for alpha, c in phi.terms.items() if sum(alpha) >= 3})
    logger.info(f"potential {dgbv.name}: {len(phi.terms)} terms through order {phi.order}")
    return phi


def third_derivatives(phi: GradedSeries, order: int) -> List[List[List[GradedSeries]]]:
    """T[a][b][c] = d_a d_b d_c Phi truncated at order."""
    h = len(phi.ring)
    first = [phi.derivative(c) for c in range(h)]
    second = [[first[c].derivative(b) for c in range(h)] for b in range(h)]
    return [[[second[b][c].derivative(a).truncate(order) for c in range(h)] for b in range(h)] for a in range(h)]


def export_potential(phi: GradedSeries) -> List[dict]:
    """Ordered monomial list with exact coefficients."""
    return phi.to_dict()


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def wdvv_check(phi: GradedSeries, g: np.ndarray, order: Optional[int] = None) -> CheckReport:
    """
    Associativity equations for a potential

    sum_ef Phi_abe g^ef Phi_fcd = (-1)^(a(b+c)) sum_ef Phi_bce g^ef Phi_fad,
    compared coefficientwise through order (default N - 3).
    """
    order = phi.order - 3 if order is None else order
    report = CheckReport('wdvv')
    report.details['order'] = order
    if order < 0:
        return report

    h = len(phi.ring)
    odd = [1 if v.odd else 0 for v in phi.ring]
    g_inverse = exact_inverse(g)
    T = third_derivatives(phi, order)

    raised = [[None] * h for _ in range(h)]
    for a in range(h):
        for b in range(h):
            row = []
            for f in range(h):
                total = GradedSeries.zero(phi.ring, order)
                for e in range(h):
                    if g_inverse[e, f] != 0 and T[a][b][e].terms:
                        total = total + T[a][b][e].scale(g_inverse[e, f])
                row.append(total)
            raised[a][b] = row

    labels = GradedSeries(phi.ring, order)
    worst = 0
    for a in range(h):
        for b in range(h):
            for c in range(h):
                for d in range(h):
                    lhs = GradedSeries.zero(phi.ring, order)
                    rhs = GradedSeries.zero(phi.ring, order)
                    for f in range(h):
                        if raised[a][b][f].terms and T[f][c][d].terms:
                            lhs = lhs + raised[a][b][f] * T[f][c][d]
                        if raised[b][c][f].terms and T[f][a][d].terms:
                            rhs = rhs + raised[b][c][f] * T[f][a][d]
                    residual = lhs - rhs.scale(_sign(odd[a] * (odd[b] + odd[c])))
                    witness = f"({phi.ring[a].name}, {phi.ring[b].name}, {phi.ring[c].name}, {phi.ring[d].name})"
                    if residual.terms:
                        alpha, value = residual.sorted_terms()[0]
                        witness += f" at {labels.monomial_label(alpha)}: {value}"
                        worst = max(worst, len(residual.terms))
                    report.expect(not residual.terms, 'wdvv', witness)
    report.details['max_residual_terms'] = worst
    return report


def potentiality_check(solution: GammaSolution, g: np.ndarray, phi: GradedSeries) -> CheckReport:
    """g(X_i o X_j, X_k) against d_i d_j d_k Phi through order N - 3."""
    report = CheckReport('potentiality')
    order = solution.order - 3
    report.details['order'] = order
    if order < 0:
        return report
    table = structure_constants(solution)
    T = third_derivatives(phi, order)
    h = solution.base.size
    names = [v.name for v in solution.base.ring]
    for i in range(h):
        for j in range(h):
            for k in range(h):
                lhs = GradedSeries.zero(solution.base.ring, order)
                for m in range(h):
                    if g[m, k] != 0:
                        lhs = lhs + table[i][j][m].truncate(order).scale(g[m, k])
                report.expect(lhs == T[i][j][k], 'potentiality', f"({names[i]}, {names[j]}, {names[k]})")
    return report


def third_derivative_check(dgbv: DGBVAlgebra, solution: GammaSolution, phi: GradedSeries,
                        samples: int = DIRECTION_SAMPLES, seed: int = DEFAULT_SEED) -> CheckReport:
    """
    X^3 Phi = integral((X Gamma)^3) for random constant even directions X

    Both sides are compared through order N - 3.
    """
    report = CheckReport('third_derivative_identity')
    order = solution.order - 3
    report.details.update({'order': order, 'samples': samples, 'seed': seed})
    if order < 0:
        return report

    rng = random.Random(seed)
    partials = solution.partials()
    odd = solution.base.odd_mask
    h = solution.base.size
    for sample in range(samples):
        direction = [Fraction(0) if odd[i] else Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for i in range(h)]

        def apply(series: GradedSeries) -> GradedSeries:
            total = GradedSeries.zero(series.ring, series.order)
            for i, r in enumerate(direction):
                if r != 0:
                    total = total + series.derivative(i).scale(r)
            return total

        lhs = apply(apply(apply(phi))).truncate(order)

        lifted = AlgebraSeries.zero(solution.base.ring, dgbv.algebra, solution.order)
        for i, r in enumerate(direction):
            if r != 0:
                lifted = lifted + partials[i].scale(r)
        rhs = (lifted * lifted * lifted).integrate(dgbv.integral).truncate(order)

        witness = "direction (" + ", ".join(format_fraction(r) for r in direction) + ")"
        report.expect(lhs == rhs, 'third_derivative_identity', f"sample {sample}: {witness}")
    return report


def flatness_check(solution: GammaSolution) -> CheckReport:
    """
    Flatness of the deformed connection on basis fields

    Associativity of o, and the symmetry d_l A_ij^k = (-1)^(l i) d_i A_lj^k,
    through order N - 2.
    """
    report = CheckReport('flatness')
    order = solution.order - 2
    report.details['order'] = order
    if order < 0:
        return report
    table = structure_constants(solution)
    h = solution.base.size
    odd = solution.base.odd_mask
    ring = solution.base.ring
    names = [v.name for v in ring]

    A = [[[table[i][j][k].truncate(order) for k in range(h)] for j in range(h)] for i in range(h)]
    for i in range(h):
        for j in range(h):
            for k in range(h):
                for m in range(h):
                    left = GradedSeries.zero(ring, order)
                    right = GradedSeries.zero(ring, order)
                    for p in range(h):
                        if A[i][j][p].terms and A[p][k][m].terms:
                            left = left + A[i][j][p] * A[p][k][m]
                        if A[j][k][p].terms and A[i][p][m].terms:
                            right = right + _pass_odd(odd[i], A[j][k][p]) * A[i][p][m]
                    report.expect(left == right, 'associativity',
                                  f"({names[i]} o {names[j]}) o {names[k]} -> {names[m]}")

    for l in range(h):
        for i in range(h):
            for j in range(h):
                for k in range(h):
                    lhs = table[i][j][k].derivative(l).truncate(order - 1)
                    rhs = table[l][j][k].derivative(i).truncate(order - 1)
                    report.expect(lhs == rhs.scale(_sign(odd[l] * odd[i])), 'flat_symmetry',
                                  f"d_{names[l]} A_({names[i]},{names[j]})^{names[k]}")
    return report


def euler_check(dgbv: DGBVAlgebra, solution: GammaSolution, phi: GradedSeries) -> CheckReport:
    """
    Euler structure E = sum d_i x_i d/dx_i with d_i = |x_i| / 2

    d_0 = 1, E Phi = (1 - D) Phi on every monomial, g(X, Y) != 0 only when
    |X| + |Y| = 2D, and A_ij^k homogeneous of weight |X_i| + |X_j| - |X_k| + 2.
    Skipped when weights are absent.
    """
    report = CheckReport('euler')
    base = solution.base
    if not base.weighted or dgbv.D is None:
        report.details['skipped'] = True
        logger.info(f"euler_check {dgbv.name}: no weights, skipped")
        return report

    D = dgbv.D
    spectrum = [Fraction(v.weight, 2) for v in base.ring]
    report.details.update({'skipped': False, 'D': D, 'spectrum': spectrum, 'flat_part': 0})
    report.expect(spectrum[0] == 1, 'unit_spectrum', f"d_0 = {format_fraction(spectrum[0])}")

    names = [v.name for v in base.ring]
    labels = GradedSeries(base.ring, phi.order)
    for alpha, _ in phi.sorted_terms():
        eigenvalue = sum(e * d for e, d in zip(alpha, spectrum))
        report.expect(eigenvalue == 1 - D, 'potential_eigenvalue',
                      f"{labels.monomial_label(alpha)}: {format_fraction(eigenvalue)}")

    g = metric(dgbv, solution)
    h = base.size
    for i in range(h):
        for j in range(h):
            if g[i, j] != 0:
                total = base.operator_weight(i) + base.operator_weight(j)
                report.expect(total == 2 * D, 'metric_degree', f"g({names[i]}, {names[j]})")

    table = structure_constants(solution)
    for i in range(h):
        for j in range(h):
            for k in range(h):
                expected = base.operator_weight(i) + base.operator_weight(j) - base.operator_weight(k) + 2
                for alpha, _ in table[i][j][k].terms.items():
                    weight = sum(e * v.weight for e, v in zip(alpha, base.ring))
                    report.expect(weight == expected, 'product_degree',
                                  f"A_({names[i]},{names[j]})^{names[k]} at {labels.monomial_label(alpha)}")
    return report


def solution_report(dgbv: DGBVAlgebra, solution: GammaSolution, phi: Optional[GradedSeries] = None) -> dict:
    """Summary for export: checked order, normalization and Euler outcome."""
    normalization = normalization_check(solution)
    summary = {
        'residual_max_degree_checked': solution.order,
        'normalized': normalization.passed,
        'normalization': normalization,
    }
    if phi is not None:
        summary['euler'] = euler_check(dgbv, solution, phi)
    return summary
