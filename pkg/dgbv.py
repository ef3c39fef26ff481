"""
Finite-dimensional dGBV algebras over Q

A superalgebra is given by structure constants C[i, j, k] (e_i e_j =
sum_k C[i, j, k] e_k); the odd operators Delta and delta are matrices acting on
coordinate vectors. This module checks the GBV and dGBV axioms, computes the
odd bracket [a . b] = d_a b, runs the derived identity suites, checks the
exactness conditions (A), (B), (C) and extracts homology representatives,
validates integrals, builds tensor products and reads/writes the algebra-spec
text format used by the catalog.

Everything is exact: scalars are fractions.Fraction held in numpy object
arrays.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import ALGEBRA_SUFFIX, CATALOG_DIR, DEFAULT_SEED, IDENTITY_SAMPLES, PARTIAL_CACHE_SIZE
from graded_core import (
    FrobeniusError,
    column_space,
    exact_nullspace,
    is_zero_vector,
    nonzero_entries,
    same_subspace,
    sparse_apply,
    sparse_matmul,
    subspace_intersection,
    subspace_rank,
    subspace_sum,
    unit_vector,
    zero_matrix,
    zero_vector,
)
from utils import CheckReport, format_fraction, parse_fraction

logger = logging.getLogger(__name__)


class DGBVError(FrobeniusError):
    """Errors of the dGBV engine"""


class AlgebraSpecError(DGBVError):
    """Malformed algebra-spec file"""


class CheckFailedError(DGBVError):
    """An operation required data that failed its axiom checks"""


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SuperAlgebra:
    """
    Supercommutative algebra with a distinguished basis

    Attributes:
        labels: Basis labels
        parities: 0 (even) or 1 (odd) per basis element
        structure: Object array C[i, j, k]
        unit: Index of the identity
        weights: Optional additional grading per basis element
    """

    labels: Tuple[str, ...]
    parities: Tuple[int, ...]
    structure: np.ndarray
    unit: int = 0
    weights: Optional[Tuple[Fraction, ...]] = None
    _table: Optional[List[List[Tuple[int, int, Fraction]]]] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.parities = tuple(int(p) % 2 for p in self.parities)
        if self.weights is not None:
            self.weights = tuple(Fraction(w) for w in self.weights)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise DGBVError(f"Basis labels must be unique: {self.labels}")
        if len(self.parities) != n or (self.weights is not None and len(self.weights) != n):
            raise DGBVError("labels, parities and weights must have the same length")
        if self.structure.shape != (n, n, n):
            raise DGBVError(f"Structure constants must have shape {(n, n, n)}, got {self.structure.shape}")
        if not 0 <= self.unit < n:
            raise DGBVError(f"Unit index {self.unit} out of range")

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def basis(self, index: int) -> np.ndarray:
        return unit_vector(self.dimension, index)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as e:
            raise DGBVError(f"Unknown basis label {label!r}") from e

    def element(self, coefficients: Dict[str, object]) -> np.ndarray:
        """Vector from a {label: coefficient} mapping."""
        vector = zero_vector(self.dimension)
        for label, value in coefficients.items():
            vector[self.index_of(label)] += Fraction(value)
        return vector

    @property
    def table(self) -> List[List[Tuple[int, int, Fraction]]]:
        """Nonzero structure constants as table[i] = [(j, k, C[i, j, k]), ...], cached."""
        if self._table is None:
            n = self.dimension
            self._table = [
                [(j, k, self.structure[i, j, k]) for j in range(n) for k in range(n) if self.structure[i, j, k] != 0]
                for i in range(n)
            ]
        return self._table

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        result = zero_vector(self.dimension)
        right = dict(nonzero_entries(b))
        if not right:
            return result
        for i, x in nonzero_entries(a):
            for j, k, c in self.table[i]:
                y = right.get(j)
                if y is not None:
                    result[k] += x * y * c
        return result

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix L_a with L_a b = a b."""
        matrix = zero_matrix(self.dimension, self.dimension)
        for i, x in nonzero_entries(a):
            for j, k, c in self.table[i]:
                matrix[k, j] += x * c
        return matrix

    def parity_of(self, vector: np.ndarray) -> Optional[int]:
        """Parity of a homogeneous vector, None if mixed; zero counts as even."""
        parities = {self.parities[i] for i, v in enumerate(vector) if v != 0}
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    def split(self, vector: np.ndarray) -> Dict[int, np.ndarray]:
        """Even and odd components."""
        parts = {0: zero_vector(self.dimension), 1: zero_vector(self.dimension)}
        for i, v in enumerate(vector):
            if v != 0:
                parts[self.parities[i]][i] = v
        return parts

    def weight_of(self, vector: np.ndarray) -> Optional[Fraction]:
        if self.weights is None:
            return None
        weights = {self.weights[i] for i, v in enumerate(vector) if v != 0}
        return weights.pop() if len(weights) == 1 else None

    def format_element(self, vector: np.ndarray) -> str:
        parts = []
        for label, value in zip(self.labels, vector):
            if value == 0:
                continue
            if value == 1:
                parts.append(label)
            else:
                parts.append(f"{format_fraction(value)}*{label}")
        return " + ".join(parts) or "0"

    def check_axioms(self) -> CheckReport:
        """Supercommutativity, associativity, unit and grading additivity."""
        report = CheckReport('superalgebra')
        n = self.dimension
        C = self.structure
        one = self.basis(self.unit)

        for i in range(n):
            e_i = self.basis(i)
            report.expect(
                np.array_equal(self.multiply(one, e_i), e_i) and np.array_equal(self.multiply(e_i, one), e_i),
                'unit', f"1 * {self.labels[i]}",
            )
            for j in range(n):
                sign = _sign(self.parities[i] * self.parities[j])
                report.expect(
                    np.array_equal(C[i, j], sign * C[j, i]),
                    'supercommutativity', f"{self.labels[i]}, {self.labels[j]}",
                )
                for k in range(n):
                    if C[i, j, k] == 0:
                        continue
                    report.expect(
                        self.parities[k] == (self.parities[i] + self.parities[j]) % 2,
                        'parity_additivity', f"{self.labels[i]} * {self.labels[j]} -> {self.labels[k]}",
                    )
                    if self.weights is not None:
                        report.expect(
                            self.weights[k] == self.weights[i] + self.weights[j],
                            'weight_additivity', f"{self.labels[i]} * {self.labels[j]} -> {self.labels[k]}",
                        )

        for i in range(n):
            L_i = self.left_matrix(self.basis(i))
            for j in range(n):
                product_ij = self.multiply(self.basis(i), self.basis(j))
                L_ij = self.left_matrix(product_ij)
                L_j = self.left_matrix(self.basis(j))
                report.expect(
                    np.array_equal(L_ij, sparse_matmul(L_i, L_j)),
                    'associativity', f"({self.labels[i]} {self.labels[j]}) x",
                )
        return report


@dataclass(eq=False)
class OddOperator:
    """
    Linear operator given by its matrix in the basis

    The entry matrix[target, source] is the coefficient of e_target in the
    image of e_source.
    """

    matrix: np.ndarray
    weight_shift: Optional[Fraction] = None
    name: str = ''

    def __call__(self, vector: np.ndarray) -> np.ndarray:
        return sparse_apply(self.matrix, vector)

    @classmethod
    def zero(cls, dimension: int, weight_shift=None, name: str = '') -> 'OddOperator':
        return cls(zero_matrix(dimension, dimension), weight_shift, name)

    @classmethod
    def from_entries(cls, dimension: int, entries: Sequence[Tuple[int, int, object]],
                     weight_shift=None, name: str = '') -> 'OddOperator':
        operator = cls.zero(dimension, weight_shift, name)
        for source, target, value in entries:
            operator.matrix[target, source] += Fraction(value)
        return operator

    def is_zero(self) -> bool:
        return is_zero_vector(self.matrix)


@dataclass(eq=False)
class DGBVAlgebra:
    """
    Superalgebra with BV operator Delta, differential delta and an integral

    Attributes:
        algebra: The underlying superalgebra
        delta: Delta, odd, second order, weight shift -1
        d: delta, odd derivation, weight shift +1
        integral: Linear functional as a coefficient vector
        integral_degree: Degree of the integral (-2D - 4) when weights are present
        name: Catalog name
    """

    algebra: SuperAlgebra
    delta: OddOperator
    d: OddOperator
    integral: np.ndarray
    integral_degree: Optional[Fraction] = None
    name: str = ''
    _partials: Optional[List[np.ndarray]] = field(default=None, init=False, repr=False)
    _partial_columns: list = field(default_factory=list, init=False, repr=False)
    _partial_cache: Dict[tuple, np.ndarray] = field(default_factory=dict, init=False, repr=False)

    @property
    def dimension(self) -> int:
        return self.algebra.dimension

    @property
    def D(self) -> Optional[Fraction]:
        """D from the integral degree -2D - 4."""
        if self.integral_degree is None:
            return None
        return Fraction(-self.integral_degree - 4, 2)

    def integrate(self, vector: np.ndarray) -> Fraction:
        return Fraction(self.integral.dot(vector))

    def basis_partials(self) -> List[np.ndarray]:
        """The matrices d_{e_i}, cached."""
        if self._partials is None:
            self._partials = [partial_matrix(self, self.algebra.basis(i)) for i in range(self.dimension)]
            self._partial_columns = [
                [nonzero_entries(matrix[:, j]) for j in range(self.dimension)] for matrix in self._partials
            ]
        return self._partials

    def partial(self, a: np.ndarray) -> np.ndarray:
        """d_a, linear in a; memoized per element, callers must not mutate the result."""
        key = tuple(a)
        cached = self._partial_cache.get(key)
        if cached is not None:
            return cached
        partials = self.basis_partials()
        entries = nonzero_entries(a)
        if len(entries) == 1 and entries[0][1] == 1:
            result = partials[entries[0][0]]
        else:
            result = zero_matrix(self.dimension, self.dimension)
            for i, x in entries:
                for j, column in enumerate(self._partial_columns[i]):
                    for r, v in column:
                        result[r, j] += x * v
        if len(self._partial_cache) < PARTIAL_CACHE_SIZE:
            self._partial_cache[key] = result
        return result

    def bracket(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """[a . b] from the cached basis partials, over the nonzero coordinates of a and b."""
        self.basis_partials()
        result = zero_vector(self.dimension)
        right = nonzero_entries(b)
        if not right:
            return result
        for i, x in nonzero_entries(a):
            columns = self._partial_columns[i]
            for j, y in right:
                for r, v in columns[j]:
                    result[r] += x * y * v
        return result


def partial_matrix(dgbv: DGBVAlgebra, a: np.ndarray) -> np.ndarray:
    """
    d_a = (-1)^a (Delta L_a - L_{Delta a}) - L_a Delta

    Mixed-parity a is split into homogeneous components.
    """
    algebra = dgbv.algebra
    Delta = dgbv.delta.matrix
    result = zero_matrix(dgbv.dimension, dgbv.dimension)
    for parity, component in algebra.split(a).items():
        if is_zero_vector(component):
            continue
        L = algebra.left_matrix(component)
        L_Delta = algebra.left_matrix(sparse_apply(Delta, component))
        result = result + _sign(parity) * (sparse_matmul(Delta, L) - L_Delta) - sparse_matmul(L, Delta)
    return result


def bracket(dgbv: DGBVAlgebra, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Odd bracket [a . b] = d_a b."""
    return dgbv.bracket(a, b)


# ---------------------------------------------------------------------------
# Axiom checks
# ---------------------------------------------------------------------------

def _check_odd(report: CheckReport, algebra: SuperAlgebra, operator: OddOperator, name: str) -> None:
    for i in range(algebra.dimension):
        image = operator(algebra.basis(i))
        parity = algebra.parity_of(image)
        report.expect(
            is_zero_vector(image) or parity == 1 - algebra.parities[i],
            f'{name}_odd', f"{name}({algebra.labels[i]}) = {algebra.format_element(image)}",
        )
        if algebra.weights is not None and operator.weight_shift is not None and not is_zero_vector(image):
            report.expect(
                algebra.weight_of(image) == algebra.weights[i] + operator.weight_shift,
                f'{name}_weight_shift', f"{name}({algebra.labels[i]}) = {algebra.format_element(image)}",
            )


def check_gbv(algebra: SuperAlgebra, delta: OddOperator) -> CheckReport:
    """
    GBV axioms for Delta

    Delta odd, Delta 1 = 0, Delta^2 = 0, and every d_a a derivation of parity
    a+1: [d_a, L_b] = L_{d_a b} on all basis pairs.
    """
    report = CheckReport('gbv')
    n = algebra.dimension
    _check_odd(report, algebra, delta, 'Delta')

    report.expect(is_zero_vector(delta(algebra.basis(algebra.unit))), 'Delta_unit', 'Delta(1)')
    report.expect(is_zero_vector(sparse_matmul(delta.matrix, delta.matrix)), 'Delta_square', 'Delta^2')

    carrier = DGBVAlgebra(algebra, delta, OddOperator.zero(n), zero_vector(n))
    lefts = [algebra.left_matrix(algebra.basis(b)) for b in range(n)]
    for a in range(n):
        d_a = partial_matrix(carrier, algebra.basis(a))
        for b in range(n):
            L_b = lefts[b]
            sign = _sign((algebra.parities[a] + 1) * algebra.parities[b])
            lhs = sparse_matmul(d_a, L_b) - sign * sparse_matmul(L_b, d_a)
            rhs = algebra.left_matrix(d_a[:, b])
            report.expect(
                np.array_equal(lhs, rhs),
                'second_order', f"d_{algebra.labels[a]} on ({algebra.labels[b]}, x)",
            )

    if not report.passed:
        logger.debug(f"check_gbv: {len(report.violations)} violations")
    return report


def check_dgbv(dgbv: DGBVAlgebra) -> CheckReport:
    """Superalgebra axioms, GBV axioms and the axioms of delta."""
    algebra = dgbv.algebra
    report = CheckReport('dgbv')
    report.merge(algebra.check_axioms())
    report.merge(check_gbv(algebra, dgbv.delta))

    D, d = dgbv.delta.matrix, dgbv.d.matrix
    _check_odd(report, algebra, dgbv.d, 'delta')
    report.expect(is_zero_vector(sparse_matmul(d, d)), 'delta_square', 'delta^2')
    report.expect(
        is_zero_vector(sparse_matmul(d, D) + sparse_matmul(D, d)),
        'anticommutation', 'delta Delta + Delta delta',
    )

    for b in range(dgbv.dimension):
        L_b = algebra.left_matrix(algebra.basis(b))
        lhs = sparse_matmul(d, L_b) - _sign(algebra.parities[b]) * sparse_matmul(L_b, d)
        report.expect(
            np.array_equal(lhs, algebra.left_matrix(d[:, b])),
            'delta_derivation', f"delta on ({algebra.labels[b]}, x)",
        )

    logger.debug(f"check_dgbv {dgbv.name}: {report.checked} checks, {len(report.violations)} violations")
    return report


# ---------------------------------------------------------------------------
# Identity suites
# ---------------------------------------------------------------------------

def random_element(algebra: SuperAlgebra, rng: random.Random, parity: Optional[int] = None) -> np.ndarray:
    """Random homogeneous element with small rational coefficients."""
    if parity is None:
        parity = rng.randint(0, 1)
    vector = zero_vector(algebra.dimension)
    for i, p in enumerate(algebra.parities):
        if p == parity:
            vector[i] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return vector


def _identities_on(report: CheckReport, dgbv: DGBVAlgebra,
                   elements: Sequence[Tuple[str, np.ndarray, int]], triples: bool) -> None:
    algebra = dgbv.algebra
    Delta, d = dgbv.delta.matrix, dgbv.d.matrix

    partials = {name: dgbv.partial(x) for name, x, _ in elements}
    # [x . y] for every pair of named elements
    brackets = {
        (name_x, name_y): sparse_apply(partials[name_x], y)
        for name_x, _, _ in elements for name_y, y, _ in elements
    }
    for name_a, a, pa in elements:
        d_a = partials[name_a]
        Delta_a, delta_a = sparse_apply(Delta, a), sparse_apply(d, a)
        report.expect(
            np.array_equal(sparse_matmul(Delta, d_a) - _sign(pa + 1) * sparse_matmul(d_a, Delta),
                           dgbv.partial(Delta_a)),
            'Delta_partial_commutator', name_a,
        )
        report.expect(
            np.array_equal(sparse_matmul(d, d_a) - _sign(pa + 1) * sparse_matmul(d_a, d),
                           dgbv.partial(delta_a)),
            'delta_partial_commutator', name_a,
        )
        for name_b, b, pb in elements:
            d_b = partials[name_b]
            ab = brackets[name_a, name_b]
            witness = f"{name_a}, {name_b}"
            report.expect(
                np.array_equal(sparse_matmul(d_a, d_b) - _sign((pa + 1) * (pb + 1)) * sparse_matmul(d_b, d_a),
                               dgbv.partial(ab)),
                'partial_commutator', witness,
            )
            report.expect(
                is_zero_vector(ab + _sign((pa + 1) * (pb + 1)) * brackets[name_b, name_a]),
                'odd_anticommutativity', witness,
            )
            report.expect(
                np.array_equal(sparse_apply(d, ab),
                               dgbv.bracket(delta_a, b) + _sign(pa + 1) * sparse_apply(d_a, sparse_apply(d, b))),
                'delta_bracket_derivation', witness,
            )
            report.expect(
                np.array_equal(sparse_apply(Delta, ab),
                               dgbv.bracket(Delta_a, b) + _sign(pa + 1) * sparse_apply(d_a, sparse_apply(Delta, b))),
                'Delta_bracket_derivation', witness,
            )
            if not triples:
                continue
            for name_c, c, pc in elements:
                witness3 = f"{name_a}, {name_b}, {name_c}"
                jacobi = (
                    sparse_apply(d_a, brackets[name_b, name_c])
                    - dgbv.bracket(ab, c)
                    - _sign((pa + 1) * (pb + 1)) * sparse_apply(d_b, brackets[name_a, name_c])
                )
                report.expect(is_zero_vector(jacobi), 'odd_jacobi', witness3)
                poisson = (
                    sparse_apply(d_a, algebra.multiply(b, c))
                    - algebra.multiply(ab, c)
                    - _sign((pa + 1) * pb) * algebra.multiply(b, brackets[name_a, name_c])
                )
                report.expect(is_zero_vector(poisson), 'odd_poisson', witness3)


def identity_suite(dgbv: DGBVAlgebra, samples: int = IDENTITY_SAMPLES,
                   seed: int = DEFAULT_SEED) -> CheckReport:
    """
    Identities implied by the dGBV axioms

    [Delta, d_a] = d_{Delta a}, [d_a, d_b] = d_{[a.b]}, odd anticommutativity,
    odd Jacobi, odd Poisson, [delta, d_a] = d_{delta a}, and delta and Delta
    as derivations of the bracket. Checked on all basis pairs and triples,
    then on `samples` seeded random homogeneous triples.
    """
    report = CheckReport('identities')
    algebra = dgbv.algebra
    basis = [(algebra.labels[i], algebra.basis(i), algebra.parities[i]) for i in range(dgbv.dimension)]
    _identities_on(report, dgbv, basis, triples=True)

    rng = random.Random(seed)
    for sample in range(samples):
        elements = []
        for tag in 'abc':
            parity = rng.randint(0, 1)
            elements.append((f"sample{sample}.{tag}", random_element(algebra, rng, parity), parity))
        _identities_on(report, dgbv, elements, triples=True)

    report.details['samples'] = samples
    report.details['seed'] = seed
    logger.info(f"identity_suite {dgbv.name}: {report.checked} checks, {len(report.violations)} violations")
    return report


# ---------------------------------------------------------------------------
# Shifted differential
# ---------------------------------------------------------------------------

@dataclass
class ShiftedDifferential:
    operator: np.ndarray
    residual: np.ndarray
    nilpotent: bool
    anticommutes_with_delta: bool
    delta_closed: bool
    bracket_compatible: bool

    @property
    def maurer_cartan(self) -> bool:
        return is_zero_vector(self.residual)

    def to_dict(self) -> dict:
        return {
            'residual': self.residual, 'maurer_cartan': self.maurer_cartan,
            'nilpotent': self.nilpotent, 'anticommutes_with_delta': self.anticommutes_with_delta,
            'delta_closed': self.delta_closed, 'bracket_compatible': self.bracket_compatible,
        }


def maurer_cartan_residual(dgbv: DGBVAlgebra, a: np.ndarray) -> np.ndarray:
    """delta a + 1/2 [a . a]."""
    return dgbv.d(a) + Fraction(1, 2) * dgbv.bracket(a, a)


def shifted_differential(dgbv: DGBVAlgebra, a: np.ndarray) -> ShiftedDifferential:
    """
    delta_a = delta + d_a for even a, with its Maurer-Cartan residual

    Raises:
        DGBVError: if a is not even
    """
    if dgbv.algebra.parity_of(a) != 0:
        raise DGBVError("Shifted differentials need an even element")
    operator = dgbv.d.matrix + dgbv.partial(a)
    Delta = dgbv.delta.matrix

    compatible = True
    for b in range(dgbv.dimension):
        p_b = dgbv.algebra.parities[b]
        d_b = dgbv.partial(dgbv.algebra.basis(b))
        lhs = sparse_matmul(operator, d_b) - _sign(p_b + 1) * sparse_matmul(d_b, operator)
        if not np.array_equal(lhs, dgbv.partial(operator[:, b])):
            compatible = False
            break

    return ShiftedDifferential(
        operator=operator,
        residual=maurer_cartan_residual(dgbv, a),
        nilpotent=is_zero_vector(sparse_matmul(operator, operator)),
        anticommutes_with_delta=is_zero_vector(sparse_matmul(operator, Delta) + sparse_matmul(Delta, operator)),
        delta_closed=is_zero_vector(sparse_apply(Delta, a)),
        bracket_compatible=compatible,
    )


# ---------------------------------------------------------------------------
# Exactness conditions and homology
# ---------------------------------------------------------------------------

@dataclass
class HomologyClass:
    vector: np.ndarray
    parity: int
    weight: Optional[Fraction]
    label: str

    def to_dict(self) -> dict:
        return {'vector': self.vector, 'parity': self.parity, 'weight': self.weight, 'label': self.label}


@dataclass
class ConditionsReport:
    A: bool
    B: bool
    C: bool
    dimensions: Dict[str, int]
    homology: List[HomologyClass]
    homology_dimensions: Dict[str, int]
    image_symmetric: bool
    witnesses: Dict[str, List[str]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.A and self.B

    @property
    def consistent(self) -> bool:
        """(C) agrees with (A) and (B), and the three homologies agree when they hold."""
        if self.C != (self.A and self.B):
            return False
        if self.passed:
            return len(set(self.homology_dimensions.values())) == 1
        return True

    def to_dict(self) -> dict:
        return {
            'A': self.A, 'B': self.B, 'C': self.C, 'passed': self.passed,
            'consistent': self.consistent, 'dimensions': self.dimensions,
            'homology': self.homology, 'homology_dimensions': self.homology_dimensions,
            'image_symmetric': self.image_symmetric, 'witnesses': self.witnesses,
        }


def _block_key(algebra: SuperAlgebra, index: int):
    weight = algebra.weights[index] if algebra.weights is not None else Fraction(0)
    return (algebra.parities[index], weight)


def homology_representatives(dgbv: DGBVAlgebra) -> List[HomologyClass]:
    """
    Homogeneous representatives of (Ker Delta ∩ Ker delta)/Im delta Delta

    Works block by block in (parity, weight), where Delta, delta and
    delta Delta restrict cleanly. In each block the cycles are scanned in
    basis order and kept when they are independent modulo the boundaries;
    the unit is tried first.
    """
    algebra = dgbv.algebra
    n = dgbv.dimension
    Delta, d = dgbv.delta.matrix, dgbv.d.matrix
    boundary_map = sparse_matmul(d, Delta)

    blocks: Dict[tuple, List[int]] = {}
    for i in range(n):
        blocks.setdefault(_block_key(algebra, i), []).append(i)
    unit_key = _block_key(algebra, algebra.unit)
    order = [unit_key] + sorted(k for k in blocks if k != unit_key)

    classes: List[HomologyClass] = []
    for key in order:
        columns = blocks[key]
        stacked = np.vstack([Delta[:, columns], d[:, columns]])
        cycles = []
        for null in exact_nullspace(stacked):
            vector = zero_vector(n)
            for coefficient, column in zip(null, columns):
                vector[column] = coefficient
            cycles.append(vector)
        if key == unit_key:
            one = algebra.basis(algebra.unit)
            if is_zero_vector(Delta.dot(one)) and is_zero_vector(d.dot(one)):
                cycles.insert(0, one)

        boundaries = column_space(boundary_map[:, columns])

        span = list(boundaries)
        rank = subspace_rank(span, n)
        for cycle in cycles:
            if subspace_rank(span + [cycle], n) > rank:
                span.append(cycle)
                rank += 1
                weight = algebra.weights[columns[0]] if algebra.weights is not None else None
                classes.append(HomologyClass(cycle, key[0], weight, algebra.format_element(cycle)))
    return classes


def conditions_check(dgbv: DGBVAlgebra) -> ConditionsReport:
    """
    Exactness conditions

    (A) Im delta Delta = Im delta ∩ Ker Delta, (B) Im delta Delta =
    Im Delta ∩ Ker delta, (C) Im delta Delta = Im Delta delta =
    (Ker delta ∩ Ker Delta) ∩ (Im delta + Im Delta). When (A) and (B) hold,
    homology representatives are returned and the three presentations of the
    homology are compared.
    """
    n = dgbv.dimension
    Delta, d = dgbv.delta.matrix, dgbv.d.matrix

    im_d = column_space(d)
    im_D = column_space(Delta)
    ker_d = exact_nullspace(d)
    ker_D = exact_nullspace(Delta)
    im_dD = column_space(sparse_matmul(d, Delta))
    im_Dd = column_space(sparse_matmul(Delta, d))

    im_d_ker_D = subspace_intersection(im_d, ker_D, n)
    im_D_ker_d = subspace_intersection(im_D, ker_d, n)
    cycles = subspace_intersection(ker_d, ker_D, n)
    exact_cycles = subspace_intersection(cycles, subspace_sum(im_d, im_D, n), n)

    A = same_subspace(im_dD, im_d_ker_D, n)
    B = same_subspace(im_dD, im_D_ker_d, n)
    image_symmetric = same_subspace(im_dD, im_Dd, n)
    C = image_symmetric and same_subspace(im_dD, exact_cycles, n)

    algebra = dgbv.algebra
    witnesses = {}
    if not A:
        witnesses['A'] = [algebra.format_element(v) for v in im_d_ker_D]
    if not B:
        witnesses['B'] = [algebra.format_element(v) for v in im_D_ker_d]

    dimensions = {
        'im_delta': len(im_d), 'im_Delta': len(im_D),
        'ker_delta': len(ker_d), 'ker_Delta': len(ker_D),
        'im_delta_Delta': len(im_dD), 'im_Delta_delta': len(im_Dd),
        'im_delta_cap_ker_Delta': len(im_d_ker_D),
        'im_Delta_cap_ker_delta': len(im_D_ker_d),
        'cycles': len(cycles),
    }
    homology_dimensions = {
        'cycles_mod_im_delta_Delta': len(cycles) - len(im_dD),
        'ker_Delta_delta': len(cycles) - subspace_rank([d.dot(v) for v in ker_D], n),
        'ker_delta_Delta': len(cycles) - subspace_rank([Delta.dot(v) for v in ker_d], n),
    }

    homology = homology_representatives(dgbv) if A and B else []
    logger.info(
        f"conditions {dgbv.name}: A={A} B={B} C={C}, "
        f"homology dimension {homology_dimensions['cycles_mod_im_delta_Delta']}"
    )
    return ConditionsReport(
        A=A, B=B, C=C, dimensions=dimensions, homology=homology,
        homology_dimensions=homology_dimensions, image_symmetric=image_symmetric,
        witnesses=witnesses,
    )


# ---------------------------------------------------------------------------
# Integral
# ---------------------------------------------------------------------------

def integral_check(dgbv: DGBVAlgebra) -> CheckReport:
    """
    Integral axioms

    Evenness, (delta a) b = (-1)^(a+1) a delta b and (Delta a) b =
    (-1)^a a Delta b under the integral on all basis pairs, vanishing of the
    integral of brackets with an element of Ker Delta, and homogeneity of
    the stated degree when weights are present.
    """
    report = CheckReport('integral')
    algebra = dgbv.algebra
    n = dgbv.dimension
    integrate = dgbv.integrate
    Delta, d = dgbv.delta, dgbv.d

    for i in range(n):
        value = dgbv.integral[i]
        if value == 0:
            continue
        report.expect(algebra.parities[i] == 0, 'integral_even', algebra.labels[i])
        if algebra.weights is not None and dgbv.integral_degree is not None:
            report.expect(
                algebra.weights[i] + dgbv.integral_degree == 0,
                'integral_homogeneous', f"{algebra.labels[i]} has weight {format_fraction(algebra.weights[i])}",
            )

    for i in range(n):
        a = algebra.basis(i)
        pa = algebra.parities[i]
        for j in range(n):
            b = algebra.basis(j)
            witness = f"{algebra.labels[i]}, {algebra.labels[j]}"
            report.expect(
                integrate(algebra.multiply(d(a), b)) == _sign(pa + 1) * integrate(algebra.multiply(a, d(b))),
                'integral_delta', witness,
            )
            report.expect(
                integrate(algebra.multiply(Delta(a), b)) == _sign(pa) * integrate(algebra.multiply(a, Delta(b))),
                'integral_Delta', witness,
            )

    for null in exact_nullspace(Delta.matrix):
        for component in algebra.split(null).values():
            if is_zero_vector(component):
                continue
            for j in range(n):
                b = algebra.basis(j)
                witness = f"{algebra.format_element(component)}, {algebra.labels[j]}"
                report.expect(integrate(dgbv.bracket(component, b)) == 0, 'integral_bracket', witness)
                report.expect(integrate(dgbv.bracket(b, component)) == 0, 'integral_bracket', witness)

    return report


# ---------------------------------------------------------------------------
# Tensor products
# ---------------------------------------------------------------------------

def tensor_vector(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """x ⊗ y in the product basis (index i * dim2 + j)."""
    return np.array([a * b for a in first for b in second], dtype=object)


def tensor(first: DGBVAlgebra, second: DGBVAlgebra, verify: bool = True) -> DGBVAlgebra:
    """
    Tensor product with Koszul signs

    (a1 ⊗ a2)(b1 ⊗ b2) = (-1)^(a2 b1) a1 b1 ⊗ a2 b2,
    Delta = Delta1 ⊗ 1 + 1 ⊗ Delta2, delta likewise, integral = integral1 * integral2.

    The factors are always checked; `verify=False` skips re-checking the
    product, for callers that build it once and reuse it.

    Raises:
        CheckFailedError: if a factor fails its axioms, or if the product fails
            a check that both factors pass
    """
    for factor in (first, second):
        report = check_dgbv(factor)
        if not report.passed:
            raise CheckFailedError(
                f"Factor {factor.name or '?'} fails its axioms: {report.violations[0].identity}"
            )

    A1, A2 = first.algebra, second.algebra
    n1, n2 = A1.dimension, A2.dimension
    n = n1 * n2

    structure = np.array([Fraction(0)] * n ** 3, dtype=object).reshape(n, n, n)
    for i in range(n1):
        for j in range(n2):
            for k in range(n1):
                for l in range(n2):
                    sign = _sign(A2.parities[j] * A1.parities[k])
                    for m in range(n1):
                        c1 = A1.structure[i, k, m]
                        if c1 == 0:
                            continue
                        for p in range(n2):
                            c2 = A2.structure[j, l, p]
                            if c2 != 0:
                                structure[i * n2 + j, k * n2 + l, m * n2 + p] = sign * c1 * c2

    def lift(op1: np.ndarray, op2: np.ndarray) -> np.ndarray:
        matrix = zero_matrix(n, n)
        for i in range(n1):
            for j in range(n2):
                for m in range(n1):
                    if op1[m, i] != 0:
                        matrix[m * n2 + j, i * n2 + j] += op1[m, i]
                for p in range(n2):
                    if op2[p, j] != 0:
                        matrix[i * n2 + p, i * n2 + j] += _sign(A1.parities[i]) * op2[p, j]
        return matrix

    weights = None
    if A1.weights is not None and A2.weights is not None:
        weights = tuple(w1 + w2 for w1 in A1.weights for w2 in A2.weights)
    degree = None
    if first.integral_degree is not None and second.integral_degree is not None:
        degree = first.integral_degree + second.integral_degree

    algebra = SuperAlgebra(
        labels=tuple(f"{l1}|{l2}" for l1 in A1.labels for l2 in A2.labels),
        parities=tuple((p1 + p2) % 2 for p1 in A1.parities for p2 in A2.parities),
        structure=structure,
        unit=A1.unit * n2 + A2.unit,
        weights=weights,
    )
    product = DGBVAlgebra(
        algebra=algebra,
        delta=OddOperator(lift(first.delta.matrix, second.delta.matrix), Fraction(-1), 'Delta'),
        d=OddOperator(lift(first.d.matrix, second.d.matrix), Fraction(1), 'delta'),
        integral=tensor_vector(first.integral, second.integral),
        integral_degree=degree,
        name=f"{first.name}*{second.name}",
    )

    if verify:
        report = check_dgbv(product)
        if not report.passed:
            raise CheckFailedError(f"Tensor product fails its axioms: {report.violations[0].identity}")
        if integral_check(first).passed and integral_check(second).passed:
            integral_report = integral_check(product)
            if not integral_report.passed:
                raise CheckFailedError(f"Tensor integral fails: {integral_report.violations[0].identity}")

    logger.info(f"tensor {product.name}: dimension {n}")
    return product


def tensor_bracket_check(first: DGBVAlgebra, second: DGBVAlgebra, product: DGBVAlgebra) -> CheckReport:
    """
    Bracket of decomposables against the factor brackets

    [a1⊗a2 . b1⊗b2] = (-1)^(a2 (b1+1)) [a1 . b1] ⊗ a2 b2
                      + (-1)^(b1 (a2+1)) a1 b1 ⊗ [a2 . b2]
    """
    report = CheckReport('tensor_bracket')
    A1, A2 = first.algebra, second.algebra
    for i in range(A1.dimension):
        for j in range(A2.dimension):
            a1, a2 = A1.basis(i), A2.basis(j)
            for k in range(A1.dimension):
                for l in range(A2.dimension):
                    b1, b2 = A1.basis(k), A2.basis(l)
                    pa2, pb1 = A2.parities[j], A1.parities[k]
                    expected = (
                        _sign(pa2 * (pb1 + 1)) * tensor_vector(first.bracket(a1, b1), A2.multiply(a2, b2))
                        + _sign(pb1 * (pa2 + 1)) * tensor_vector(A1.multiply(a1, b1), second.bracket(a2, b2))
                    )
                    actual = product.bracket(tensor_vector(a1, a2), tensor_vector(b1, b2))
                    report.expect(
                        np.array_equal(actual, expected), 'tensor_bracket',
                        f"{A1.labels[i]}|{A2.labels[j]}, {A1.labels[k]}|{A2.labels[l]}",
                    )
    return report


@dataclass
class DecomposableReport:
    element: np.ndarray
    factor_residuals: Tuple[np.ndarray, np.ndarray]
    residual: np.ndarray
    factors_closed: bool
    delta_closed: bool

    @property
    def factors_solve(self) -> bool:
        return all(is_zero_vector(r) for r in self.factor_residuals)

    @property
    def solves(self) -> bool:
        return is_zero_vector(self.residual)

    @property
    def passed(self) -> bool:
        return (not self.factors_solve or self.solves) and (not self.factors_closed or self.delta_closed)

    def to_dict(self) -> dict:
        return {
            'element': self.element, 'residual': self.residual,
            'factors_solve': self.factors_solve, 'solves': self.solves,
            'factors_closed': self.factors_closed, 'delta_closed': self.delta_closed,
            'passed': self.passed,
        }


def decomposable_mc(first: DGBVAlgebra, a1: np.ndarray, second: DGBVAlgebra, a2: np.ndarray,
                    product: Optional[DGBVAlgebra] = None) -> DecomposableReport:
    """Maurer-Cartan residual and Delta-closedness of a1 ⊗ 1 + 1 ⊗ a2; a given product is reused unchecked."""
    if product is None:
        product = tensor(first, second)
    one1 = first.algebra.basis(first.algebra.unit)
    one2 = second.algebra.basis(second.algebra.unit)
    element = tensor_vector(a1, one2) + tensor_vector(one1, a2)
    return DecomposableReport(
        element=element,
        factor_residuals=(maurer_cartan_residual(first, a1), maurer_cartan_residual(second, a2)),
        residual=maurer_cartan_residual(product, element),
        factors_closed=is_zero_vector(first.delta(a1)) and is_zero_vector(second.delta(a2)),
        delta_closed=is_zero_vector(product.delta(element)),
    )


# ---------------------------------------------------------------------------
# Algebra-spec files
# ---------------------------------------------------------------------------

SECTIONS = ('product', 'bv', 'differential', 'integral')


def resolve_spec_path(name: str, base_dir: Path = CATALOG_DIR) -> Path:
    """Find an algebra-spec file by path or catalog name, with or without suffix."""
    candidates = [Path(name), Path(name + ALGEBRA_SUFFIX),
                  Path(base_dir) / name, Path(base_dir) / (name + ALGEBRA_SUFFIX)]
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    raise AlgebraSpecError(f"Algebra spec not found: {name}")


def _parse_parity(token: str, line_no: int) -> int:
    table = {'0': 0, '1': 1, 'even': 0, 'odd': 1}
    if token not in table:
        raise AlgebraSpecError(f"line {line_no}: bad parity {token!r}")
    return table[token]


def parse_algebra_spec(text: str, source: str = '<string>', base_dir: Path = CATALOG_DIR) -> DGBVAlgebra:
    """
    Parse the algebra-spec text format

    Header lines are `keyword values...`; sections [product] (i j k value),
    [bv] and [differential] (source target value) and [integral]
    (index value) follow. Indices may be labels or integers; a missing value
    means 1. A `tensor a b` line builds the tensor product of two specs.

    Raises:
        AlgebraSpecError: on malformed input
    """
    header: Dict[str, List[str]] = {}
    sections: Dict[str, List[Tuple[int, List[str]]]] = {s: [] for s in SECTIONS}
    current = None

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if line.startswith('[') and line.endswith(']'):
            current = line[1:-1].strip()
            if current not in sections:
                raise AlgebraSpecError(f"{source}:{line_no}: unknown section [{current}]")
            continue
        tokens = line.split()
        if current is None:
            header[tokens[0]] = tokens[1:] + [str(line_no)]
        else:
            sections[current].append((line_no, tokens))

    if 'tensor' in header:
        args = header['tensor'][:-1]
        if len(args) != 2:
            raise AlgebraSpecError(f"{source}: tensor needs two operands")
        product = tensor(load_algebra_spec(args[0], base_dir), load_algebra_spec(args[1], base_dir))
        if 'name' in header:
            product.name = header['name'][0]
        return product

    def values(key: str, required: bool = True) -> Optional[List[str]]:
        if key not in header:
            if required:
                raise AlgebraSpecError(f"{source}: missing header {key!r}")
            return None
        return header[key][:-1]

    try:
        dimension = int(values('dimension')[0])
        labels = values('labels')
        line_no = int(header['parities'][-1]) if 'parities' in header else 0
        parities = [_parse_parity(t, line_no) for t in values('parities')]
        weight_tokens = values('weights', required=False)
        weights = [parse_fraction(t) for t in weight_tokens] if weight_tokens else None
        unit_tokens = values('unit', required=False)
        degree_tokens = values('integral_degree', required=False)
        integral_degree = parse_fraction(degree_tokens[0]) if degree_tokens else None
        name = (values('name', required=False) or [Path(source).stem])[0]
    except (ValueError, IndexError, ZeroDivisionError) as e:
        raise AlgebraSpecError(f"{source}: bad header: {e}") from e

    if len(labels) != dimension or len(parities) != dimension or (weights and len(weights) != dimension):
        raise AlgebraSpecError(f"{source}: header lists do not match dimension {dimension}")

    def index(token: str, line_no: int) -> int:
        if token in labels:
            return labels.index(token)
        try:
            value = int(token)
        except ValueError:
            raise AlgebraSpecError(f"{source}:{line_no}: unknown basis element {token!r}") from None
        if not 0 <= value < dimension:
            raise AlgebraSpecError(f"{source}:{line_no}: index {value} out of range")
        return value

    def scalar(tokens: List[str], position: int, line_no: int) -> Fraction:
        if len(tokens) <= position:
            return Fraction(1)
        try:
            return parse_fraction(tokens[position])
        except (ValueError, ZeroDivisionError):
            raise AlgebraSpecError(f"{source}:{line_no}: bad rational {tokens[position]!r}") from None

    unit = index(unit_tokens[0], 0) if unit_tokens else 0

    structure = np.array([Fraction(0)] * dimension ** 3, dtype=object).reshape(dimension, dimension, dimension)
    for line_no, tokens in sections['product']:
        if len(tokens) not in (3, 4):
            raise AlgebraSpecError(f"{source}:{line_no}: product lines are `i j k [value]`")
        i, j, k = (index(t, line_no) for t in tokens[:3])
        structure[i, j, k] += scalar(tokens, 3, line_no)

    def operator(section: str, shift: int, name: str) -> OddOperator:
        entries = []
        for line_no, tokens in sections[section]:
            if len(tokens) not in (2, 3):
                raise AlgebraSpecError(f"{source}:{line_no}: operator lines are `source target [value]`")
            entries.append((index(tokens[0], line_no), index(tokens[1], line_no), scalar(tokens, 2, line_no)))
        return OddOperator.from_entries(dimension, entries, Fraction(shift), name)

    integral = zero_vector(dimension)
    for line_no, tokens in sections['integral']:
        if len(tokens) not in (1, 2):
            raise AlgebraSpecError(f"{source}:{line_no}: integral lines are `index [value]`")
        integral[index(tokens[0], line_no)] += scalar(tokens, 1, line_no)

    try:
        algebra = SuperAlgebra(tuple(labels), tuple(parities), structure, unit,
                               tuple(weights) if weights else None)
    except DGBVError as e:
        raise AlgebraSpecError(f"{source}: {e}") from e

    return DGBVAlgebra(
        algebra=algebra,
        delta=operator('bv', -1, 'Delta'),
        d=operator('differential', 1, 'delta'),
        integral=integral,
        integral_degree=integral_degree,
        name=name,
    )


def load_algebra_spec(name: str, base_dir: Path = CATALOG_DIR) -> DGBVAlgebra:
    path = resolve_spec_path(name, base_dir)
    logger.debug(f"Loading algebra spec {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return parse_algebra_spec(f.read(), source=str(path), base_dir=path.parent)


def dump_algebra_spec(dgbv: DGBVAlgebra) -> str:
    """Render in the algebra-spec format; parse_algebra_spec inverts it exactly."""
    algebra = dgbv.algebra
    labels = algebra.labels
    lines = [
        f"name {dgbv.name or 'algebra'}",
        f"dimension {algebra.dimension}",
        f"labels {' '.join(labels)}",
        f"parities {' '.join(str(p) for p in algebra.parities)}",
    ]
    if algebra.weights is not None:
        lines.append(f"weights {' '.join(format_fraction(w) for w in algebra.weights)}")
    lines.append(f"unit {labels[algebra.unit]}")
    if dgbv.integral_degree is not None:
        lines.append(f"integral_degree {format_fraction(dgbv.integral_degree)}")

    n = algebra.dimension
    lines += ["", "[product]"]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                value = algebra.structure[i, j, k]
                if value != 0:
                    lines.append(f"{labels[i]} {labels[j]} {labels[k]} {format_fraction(value)}")

    for section, operator in (('bv', dgbv.delta), ('differential', dgbv.d)):
        lines += ["", f"[{section}]"]
        for source in range(n):
            for target in range(n):
                value = operator.matrix[target, source]
                if value != 0:
                    lines.append(f"{labels[source]} {labels[target]} {format_fraction(value)}")

    lines += ["", "[integral]"]
    for i in range(n):
        if dgbv.integral[i] != 0:
            lines.append(f"{labels[i]} {format_fraction(dgbv.integral[i])}")
    return "\n".join(lines) + "\n"


def catalog_names(base_dir: Path = CATALOG_DIR) -> List[str]:
    return sorted(path.stem for path in Path(base_dir).glob(f"*{ALGEBRA_SUFFIX}"))


def load_catalog(base_dir: Path = CATALOG_DIR) -> Dict[str, DGBVAlgebra]:
    return {name: load_algebra_spec(name, base_dir) for name in catalog_names(base_dir)}
