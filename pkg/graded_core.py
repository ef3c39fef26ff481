"""
Arithmetic substrate for the Frobenius toolkit

Scalars live in one of two regimes that are never mixed inside a single
computation: exact rationals (fractions.Fraction) for every algebraic
identity, and complex floats for root-based numerics. This module provides
univariate complex polynomials with simultaneous-iteration root finding,
Z/2-graded truncated multivariate power series with Koszul signs, Laurent
series at infinity, and the exact linear algebra used by the dGBV pipeline.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Number
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from config import DEFAULT_TOLERANCE, ROOT_MAX_ITERATIONS, NEWTON_POLISH_STEPS

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


class FrobeniusError(Exception):
    """Base class for every error raised by the toolkit"""


class GradedCoreError(FrobeniusError):
    """Errors of the arithmetic substrate"""


class RingMismatchError(GradedCoreError):
    """Series over different rings or truncation orders were combined"""


class RootFindingError(GradedCoreError):
    """Simultaneous iteration did not converge"""


class NonMonicError(GradedCoreError):
    """A monic polynomial was required"""


class InconsistentSystemError(GradedCoreError):
    """An exact linear system has no solution"""


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

class ScalarRegime(Enum):
    EXACT = "exact"
    COMPLEX = "complex"


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def scalar_regime(values: Iterable) -> ScalarRegime:
    """Regime of a collection of scalars: exact only if every entry is rational."""
    for value in values:
        if not is_exact(value):
            return ScalarRegime.COMPLEX
    return ScalarRegime.EXACT


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to an exact rational."""
    try:
        return Fraction(value)
    except (TypeError, ValueError) as e:
        raise GradedCoreError(f"Not an exact rational: {value!r}") from e


def scalars_close(a, b, tol: Optional[float] = None) -> bool:
    """
    Compare two scalars in their regime

    Args:
        a, b: Scalars
        tol: Absolute tolerance for the complex regime

    Returns:
        Exact equality for rationals, |a - b| <= tol otherwise
    """
    if is_exact(a) and is_exact(b):
        return a == b
    tol = DEFAULT_TOLERANCE if tol is None else tol
    return abs(complex(a) - complex(b)) <= tol


# ---------------------------------------------------------------------------
# Complex polynomials and roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexPolynomial:
    """Univariate polynomial, coefficients listed from the highest degree."""

    coefficients: Tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        start = 0
        while start < len(coeffs) - 1 and coeffs[start] == 0:
            start += 1
        object.__setattr__(self, 'coefficients', coeffs[start:] or (0j,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> complex:
        return self.coefficients[0]

    def __call__(self, z):
        return np.polyval(np.asarray(self.coefficients, dtype=complex), z)

    def derivative(self) -> 'ComplexPolynomial':
        if self.degree == 0:
            return ComplexPolynomial((0j,))
        return ComplexPolynomial(tuple(np.polyder(np.asarray(self.coefficients, dtype=complex))))

    def scale(self) -> float:
        """Magnitude used to turn absolute tolerances into relative ones."""
        return max(1.0, max(abs(c) for c in self.coefficients) / abs(self.leading))

    def is_monic(self, tol: float = 0.0) -> bool:
        return abs(self.leading - 1) <= tol


@dataclass(frozen=True)
class PolynomialRoot:
    value: complex
    multiple: bool = False


def _root_sort_key(z: complex) -> Tuple[float, float]:
    if abs(z) == 0:
        return (0.0, 0.0)
    angle = float(np.angle(z))
    if angle <= -math.pi + 1e-10:
        angle = math.pi
    return (round(angle, 10), round(abs(z), 10))


def _aberth(coeffs: np.ndarray, max_iterations: int) -> np.ndarray:
    """Aberth-Ehrlich iteration on a monic polynomial with nonzero constant term."""
    n = coeffs.size - 1
    if n == 1:
        return np.array([-coeffs[1]], dtype=complex)

    derivative = np.polyder(coeffs)
    abs_coeffs = np.abs(coeffs)
    radius = max(abs_coeffs[k] ** (1.0 / k) for k in range(1, n + 1))
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    eps = np.finfo(float).eps

    for iteration in range(1, max_iterations + 1):
        values = np.polyval(coeffs, z)
        noise = 8 * eps * np.polyval(abs_coeffs, np.abs(z))
        if np.all(np.abs(values) <= noise):
            logger.debug(f"Aberth converged on residual after {iteration} iterations")
            return z

        slopes = np.polyval(derivative, z)
        ratio = np.divide(values, slopes, out=np.zeros_like(values), where=slopes != 0)
        diffs = z[:, None] - z[None, :]
        np.fill_diagonal(diffs, 1.0)
        repulsion = 1.0 / diffs
        np.fill_diagonal(repulsion, 0.0)
        denominators = 1.0 - ratio * repulsion.sum(axis=1)
        step = np.divide(ratio, denominators, out=ratio.copy(), where=denominators != 0)
        z = z - step

        if np.all(np.abs(step) <= 4 * eps * (1 + np.abs(z))):
            logger.debug(f"Aberth converged on step size after {iteration} iterations")
            return z

    raise RootFindingError(f"Aberth iteration did not converge after {max_iterations} iterations")


def _polish(coeffs: np.ndarray, z: complex) -> complex:
    derivative = np.polyder(coeffs)
    best, best_residual = z, abs(np.polyval(coeffs, z))
    for _ in range(NEWTON_POLISH_STEPS):
        slope = np.polyval(derivative, best)
        if slope == 0:
            break
        candidate = best - np.polyval(coeffs, best) / slope
        residual = abs(np.polyval(coeffs, candidate))
        if residual >= best_residual:
            break
        best, best_residual = candidate, residual
    return complex(best)


def poly_roots(p: ComplexPolynomial, tol: float = DEFAULT_TOLERANCE,
               max_iterations: int = ROOT_MAX_ITERATIONS) -> List[PolynomialRoot]:
    """
    All roots of a polynomial by simultaneous iteration with Newton polishing

    Roots are ordered by (argument, modulus). Roots closer than tol (relative
    to their size) are flagged as multiple.

    Args:
        p: Polynomial of degree >= 1
        tol: Absolute tolerance after scaling by the coefficient magnitude
        max_iterations: Iteration cap

    Returns:
        deg(p) roots with multiplicity flags

    Raises:
        RootFindingError: on non-convergence or a residual above tolerance
    """
    if p.degree < 1:
        raise GradedCoreError("poly_roots needs a polynomial of degree >= 1")

    monic = np.asarray(p.coefficients, dtype=complex) / p.leading
    scale = max(1.0, float(np.max(np.abs(monic))))

    zero_roots = 0
    while monic.size > 1 and monic[-1] == 0:
        monic = monic[:-1]
        zero_roots += 1

    values: List[complex] = []
    if monic.size > 1:
        values = [_polish(monic, complex(z)) for z in _aberth(monic, max_iterations)]
    values.extend([0j] * zero_roots)

    full = np.asarray(p.coefficients, dtype=complex) / p.leading
    for z in values:
        residual = abs(np.polyval(full, z))
        if residual > tol * scale * max(1.0, abs(z)) ** p.degree:
            raise RootFindingError(f"Residual {residual:.3e} at root {z} exceeds tolerance")

    values.sort(key=_root_sort_key)
    multiple = [False] * len(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= tol * max(1.0, abs(values[i])):
                multiple[i] = multiple[j] = True

    if any(multiple):
        logger.debug(f"poly_roots: clustered roots detected in degree {p.degree} polynomial")

    return [PolynomialRoot(value=v, multiple=m) for v, m in zip(values, multiple)]


# ---------------------------------------------------------------------------
# Graded variables and monomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedVariable:
    name: str
    odd: bool = False
    weight: Optional[Fraction] = None

    @property
    def parity(self) -> int:
        return 1 if self.odd else 0


def make_ring(names: Sequence[str], odd: Optional[Sequence[bool]] = None,
              weights: Optional[Sequence] = None) -> Tuple[GradedVariable, ...]:
    """Build an ordered tuple of graded variables."""
    odd = odd or [False] * len(names)
    weights = weights or [None] * len(names)
    return tuple(
        GradedVariable(name, bool(o), None if w is None else Fraction(w))
        for name, o, w in zip(names, odd, weights)
    )


def monomial_parity(alpha: Exponent, odd: Sequence[bool]) -> int:
    return sum(e for e, o in zip(alpha, odd) if o) % 2


def monomial_product(alpha: Exponent, beta: Exponent,
                     odd: Sequence[bool]) -> Optional[Tuple[int, Exponent]]:
    """
    Product x^alpha * x^beta of ordered monomials

    Returns:
        (sign, gamma) with x^alpha x^beta = sign x^gamma, or None when an odd
        variable would appear squared
    """
    swaps = 0
    alpha_odd_after = sum(1 for e, o in zip(alpha, odd) if o and e)
    gamma = []
    for j, o in enumerate(odd):
        if o:
            if alpha[j]:
                alpha_odd_after -= 1
            if beta[j]:
                if alpha[j]:
                    return None
                swaps += alpha_odd_after
        gamma.append(alpha[j] + beta[j])
    return (-1 if swaps % 2 else 1), tuple(gamma)


def monomial_derivative(alpha: Exponent, i: int,
                        odd: Sequence[bool]) -> Optional[Tuple[int, Exponent]]:
    """Left derivative d/dx_i of x^alpha as (factor, gamma), or None if zero."""
    if alpha[i] == 0:
        return None
    if odd[i]:
        before = sum(1 for j in range(i) if odd[j] and alpha[j])
        factor = -1 if before % 2 else 1
    else:
        factor = alpha[i]
    gamma = list(alpha)
    gamma[i] -= 1
    return factor, tuple(gamma)


def monomials_of_degree(odd: Sequence[bool], degree: int) -> Iterator[Exponent]:
    """All exponent vectors of the given total degree (odd exponents <= 1)."""
    size = len(odd)

    def build(position: int, remaining: int) -> Iterator[List[int]]:
        if position == size:
            if remaining == 0:
                yield []
            return
        top = min(remaining, 1) if odd[position] else remaining
        for e in range(top, -1, -1):
            for rest in build(position + 1, remaining - e):
                yield [e] + rest

    for exponents in build(0, degree):
        yield tuple(exponents)


# ---------------------------------------------------------------------------
# Graded truncated series
# ---------------------------------------------------------------------------

class GradedSeries:
    """
    Truncated supercommutative power series

    Terms map exponent vectors to scalars; monomials are ordered products
    x_0^a0 x_1^a1 ... with odd variables appearing at most once. Values are
    treated as immutable: every operation returns a new series.
    """

    __slots__ = ('ring', 'order', 'terms', '_odd')

    def __init__(self, ring: Sequence[GradedVariable], order: int,
                 terms: Optional[Dict[Exponent, object]] = None):
        self.ring = tuple(ring)
        self.order = int(order)
        self._odd = tuple(v.odd for v in self.ring)

        names = [v.name for v in self.ring]
        if len(set(names)) != len(names):
            raise GradedCoreError(f"Variable names must be unique: {names}")
        if self.order < 0:
            raise GradedCoreError("Truncation order must be >= 0")

        clean: Dict[Exponent, object] = {}
        for alpha, coefficient in (terms or {}).items():
            alpha = tuple(int(e) for e in alpha)
            if len(alpha) != len(self.ring) or any(e < 0 for e in alpha):
                raise GradedCoreError(f"Bad exponent vector {alpha} for ring of size {len(self.ring)}")
            if any(e > 1 for e, o in zip(alpha, self._odd) if o):
                raise GradedCoreError(f"Odd variable with exponent > 1 in {alpha}")
            if sum(alpha) > self.order:
                continue
            clean[alpha] = clean.get(alpha, 0) + coefficient
        self.terms = {alpha: c for alpha, c in clean.items() if c != 0}

    @classmethod
    def _raw(cls, ring, order, terms, odd) -> 'GradedSeries':
        series = cls.__new__(cls)
        series.ring = ring
        series.order = order
        series._odd = odd
        series.terms = {alpha: c for alpha, c in terms.items() if c != 0}
        return series

    def _like(self, terms: Dict[Exponent, object]) -> 'GradedSeries':
        return GradedSeries._raw(self.ring, self.order, terms, self._odd)

    # Constructors

    @classmethod
    def zero(cls, ring, order) -> 'GradedSeries':
        return cls(ring, order)

    @classmethod
    def constant(cls, ring, order, value) -> 'GradedSeries':
        ring = tuple(ring)
        return cls(ring, order, {(0,) * len(ring): value})

    @classmethod
    def variable(cls, ring, order, index: int, coefficient=1) -> 'GradedSeries':
        ring = tuple(ring)
        alpha = [0] * len(ring)
        alpha[index] = 1
        return cls(ring, order, {tuple(alpha): coefficient})

    # Introspection

    @property
    def odd_mask(self) -> Tuple[bool, ...]:
        return self._odd

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.ring)

    def index_of(self, name_or_index: Union[str, int]) -> int:
        if isinstance(name_or_index, int):
            return name_or_index
        return self.names.index(name_or_index)

    def coefficient(self, alpha: Exponent):
        return self.terms.get(tuple(alpha), 0)

    def constant_term(self):
        return self.coefficient((0,) * len(self.ring))

    def max_degree(self) -> int:
        return max((sum(alpha) for alpha in self.terms), default=-1)

    def parity(self) -> Optional[int]:
        """Parity of a homogeneous series, None for mixed parity, 0 for zero."""
        parities = {monomial_parity(alpha, self._odd) for alpha in self.terms}
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    def regime(self) -> ScalarRegime:
        return scalar_regime(self.terms.values())

    def is_zero(self, tol: Optional[float] = None) -> bool:
        if tol is None:
            return not self.terms
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def sorted_terms(self) -> List[Tuple[Exponent, object]]:
        """Terms ordered by total degree, then by exponent vector descending."""
        return sorted(self.terms.items(), key=lambda item: (sum(item[0]), tuple(-e for e in item[0])))

    # Arithmetic

    def _check_compatible(self, other: 'GradedSeries') -> None:
        if self.ring != other.ring or self.order != other.order:
            raise RingMismatchError(
                f"Ring mismatch: {self.names}/N={self.order} vs {other.names}/N={other.order}"
            )

    def __add__(self, other) -> 'GradedSeries':
        if isinstance(other, GradedSeries):
            self._check_compatible(other)
            terms = dict(self.terms)
            for alpha, c in other.terms.items():
                terms[alpha] = terms.get(alpha, 0) + c
            return self._like(terms)
        if isinstance(other, Number):
            return self + GradedSeries.constant(self.ring, self.order, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> 'GradedSeries':
        return self._like({alpha: -c for alpha, c in self.terms.items()})

    def __sub__(self, other) -> 'GradedSeries':
        if isinstance(other, (GradedSeries, Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other) -> 'GradedSeries':
        return (-self) + other

    def scale(self, factor) -> 'GradedSeries':
        return self._like({alpha: factor * c for alpha, c in self.terms.items()})

    def __mul__(self, other) -> 'GradedSeries':
        if isinstance(other, Number):
            return self.scale(other)
        if not isinstance(other, GradedSeries):
            return NotImplemented
        self._check_compatible(other)

        result: Dict[Exponent, object] = {}
        other_items = [(beta, b, sum(beta)) for beta, b in other.terms.items()]
        for alpha, a in self.terms.items():
            degree = sum(alpha)
            for beta, b, beta_degree in other_items:
                if degree + beta_degree > self.order:
                    continue
                product = monomial_product(alpha, beta, self._odd)
                if product is None:
                    continue
                sign, gamma = product
                result[gamma] = result.get(gamma, 0) + sign * a * b
        return self._like(result)

    def __rmul__(self, other) -> 'GradedSeries':
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.ring == other.ring and self.order == other.order and self.terms == other.terms

    __hash__ = None

    def power(self, exponent: int) -> 'GradedSeries':
        if exponent < 0:
            return self.inverse().power(-exponent)
        result = GradedSeries.constant(self.ring, self.order, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def inverse(self) -> 'GradedSeries':
        """Multiplicative inverse; the constant term must be nonzero."""
        c0 = self.constant_term()
        if c0 == 0:
            raise GradedCoreError("Series with zero constant term is not invertible")
        inv_c0 = Fraction(1) / c0 if is_exact(c0) else 1 / c0
        nilpotent = (self - c0).scale(-inv_c0)
        result = GradedSeries.constant(self.ring, self.order, 1)
        term = result
        for _ in range(self.order):
            term = term * nilpotent
            if term.is_zero():
                break
            result = result + term
        return result.scale(inv_c0)

    def fractional_power(self, alpha) -> 'GradedSeries':
        """
        (self)^alpha for a univariate even series with constant term 1

        Uses the recurrence g_k = (1/k) sum_j ((alpha+1) j - k) f_j g_{k-j}.
        """
        if len(self.ring) != 1 or self._odd[0]:
            raise GradedCoreError("fractional_power is defined for one even variable")
        if self.constant_term() != 1:
            raise GradedCoreError("fractional_power needs constant term 1")

        f = [self.coefficient((k,)) for k in range(self.order + 1)]
        g = [1] + [0] * self.order
        for k in range(1, self.order + 1):
            total = 0
            for j in range(1, k + 1):
                if f[j] != 0 and g[k - j] != 0:
                    total += ((alpha + 1) * j - k) * f[j] * g[k - j]
            g[k] = total / k if not is_exact(total) else Fraction(total) / k
        return self._like({(k,): c for k, c in enumerate(g)})

    def truncate(self, order: int) -> 'GradedSeries':
        order = min(order, self.order)
        return GradedSeries._raw(
            self.ring, order,
            {alpha: c for alpha, c in self.terms.items() if sum(alpha) <= order},
            self._odd,
        )

    def filter_degree(self, max_degree: int) -> 'GradedSeries':
        """Drop terms above max_degree but keep the ring's truncation order."""
        return self._like({alpha: c for alpha, c in self.terms.items() if sum(alpha) <= max_degree})

    def homogeneous(self, degree: int) -> 'GradedSeries':
        return self._like({alpha: c for alpha, c in self.terms.items() if sum(alpha) == degree})

    def derivative(self, variable: Union[str, int]) -> 'GradedSeries':
        """Left partial derivative (Koszul sign for odd variables)."""
        i = self.index_of(variable)
        result: Dict[Exponent, object] = {}
        for alpha, c in self.terms.items():
            d = monomial_derivative(alpha, i, self._odd)
            if d is None:
                continue
            factor, gamma = d
            result[gamma] = result.get(gamma, 0) + factor * c
        return self._like(result)

    def parity_twist(self) -> 'GradedSeries':
        """Negate the odd monomials (the sign picked up passing an odd element)."""
        return self._like({
            alpha: (-c if monomial_parity(alpha, self._odd) else c)
            for alpha, c in self.terms.items()
        })

    def without_variables(self, indices: Iterable[int]) -> 'GradedSeries':
        """Set the given variables to zero."""
        indices = set(indices)
        return self._like({
            alpha: c for alpha, c in self.terms.items()
            if not any(alpha[i] for i in indices)
        })

    def restrict(self, keep: Sequence[int]) -> 'GradedSeries':
        """Set every variable outside keep to zero and drop it from the ring."""
        keep = list(keep)
        dropped = [i for i in range(len(self.ring)) if i not in keep]
        reduced = self.without_variables(dropped)
        ring = tuple(self.ring[i] for i in keep)
        return GradedSeries(ring, self.order, {
            tuple(alpha[i] for i in keep): c for alpha, c in reduced.terms.items()
        })

    # Presentation

    def monomial_label(self, alpha: Exponent) -> str:
        parts = []
        for v, e in zip(self.ring, alpha):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts) or "1"

    def to_dict(self) -> List[dict]:
        return [
            {'monomial': self.monomial_label(alpha), 'exponents': list(alpha), 'coefficient': c}
            for alpha, c in self.sorted_terms()
        ]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{self.monomial_label(alpha)}" for alpha, c in self.sorted_terms())


def series_arith(a: GradedSeries, b: GradedSeries, op: str) -> GradedSeries:
    """Add or multiply two series over the same ring and truncation order."""
    if op == 'add':
        return a + b
    if op == 'mul':
        return a * b
    raise GradedCoreError(f"Unknown series operation: {op!r}")


# ---------------------------------------------------------------------------
# Laurent series at infinity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    """
    Laurent series at infinity with leading term z

    coefficients[k] multiplies z^(1-k): index 0 is the z term, index 1 the
    constant, index k+1 the z^(-k) term.
    """

    coefficients: Tuple

    @property
    def order(self) -> int:
        """Number of negative powers retained."""
        return len(self.coefficients) - 2

    def coefficient(self, power: int):
        index = 1 - power
        if index < 0 or index >= len(self.coefficients):
            return 0
        return self.coefficients[index]


_T_RING = (GradedVariable('t'),)


def _coefficient_list(p) -> list:
    if isinstance(p, ComplexPolynomial):
        return list(p.coefficients)
    return list(p)


def laurent_nth_root(p, order: int) -> LaurentSeries:
    """
    w(z) = p(z)^(1/(n+1)) = z + c_0 + c_1/z + ... for monic p of degree n+1

    Args:
        p: ComplexPolynomial, or a coefficient list (highest first) of exact
           rationals for exact output
        order: Number of negative powers to keep

    Raises:
        NonMonicError: when the leading coefficient is not 1
    """
    coeffs = _coefficient_list(p)
    if not coeffs or coeffs[0] != 1:
        raise NonMonicError(f"laurent_nth_root needs a monic polynomial, leading={coeffs[0] if coeffs else None}")
    degree = len(coeffs) - 1
    if degree < 1:
        raise GradedCoreError("laurent_nth_root needs degree >= 1")

    count = order + 2
    # p(z)/z^(n+1) as a series in t = 1/z
    f = GradedSeries(_T_RING, count - 1, {(k,): coeffs[k] for k in range(min(len(coeffs), count))})
    g = f.fractional_power(Fraction(1, degree))
    return LaurentSeries(tuple(g.coefficient((k,)) for k in range(count)))


def laurent_invert(w: LaurentSeries, order: int) -> LaurentSeries:
    """
    Inverse series z(w) = w + s_1 + x_1/w + x_2/w^2 + ...

    Writes z = w (1 + sigma(t)) with t = 1/w and iterates
    sigma = -sum_j c_j t^(j+1) (1 + sigma)^(-j).

    Args:
        w: Series z + c_0 + c_1/z + ...
        order: Number of negative powers of w to keep
    """
    if not w.coefficients or w.coefficients[0] != 1:
        raise GradedCoreError("laurent_invert needs leading term z")

    size = order + 1
    t = GradedSeries.variable(_T_RING, size, 0)
    one = GradedSeries.constant(_T_RING, size, 1)
    tails = [(j, w.coefficients[j + 1]) for j in range(min(len(w.coefficients) - 1, size))]

    sigma = GradedSeries.zero(_T_RING, size)
    for _ in range(size):
        inverse = (one + sigma).inverse()
        accumulated = GradedSeries.zero(_T_RING, size)
        for j, c in tails:
            if c != 0:
                accumulated = accumulated + (t.power(j + 1) * inverse.power(j)).scale(c)
        sigma = -accumulated

    return LaurentSeries((1,) + tuple(sigma.coefficient((k,)) for k in range(1, size + 1)))


def laurent_compose(outer: LaurentSeries, inner: LaurentSeries, order: int) -> LaurentSeries:
    """
    outer(inner(w)) as a Laurent series in w, both with leading term z

    Used to check that inversion composes to the identity.
    """
    size = order + 1
    t = GradedSeries.variable(_T_RING, size, 0)
    one = GradedSeries.constant(_T_RING, size, 1)
    sigma = GradedSeries(_T_RING, size, {
        (k,): inner.coefficients[k] for k in range(1, min(len(inner.coefficients), size + 1))
    })
    inverse = (one + sigma).inverse()

    total = GradedSeries.zero(_T_RING, size)
    for k, g in enumerate(outer.coefficients[:size + 1]):
        if g != 0:
            total = total + (t.power(k) * inverse.power(k)).scale(g)
    total = total * (one + sigma)
    return LaurentSeries(tuple(total.coefficient((k,)) for k in range(size + 1)))


# ---------------------------------------------------------------------------
# Exact linear algebra over Q
# ---------------------------------------------------------------------------

def _to_rational(value) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _from_rational(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def exact_vector(values: Iterable) -> np.ndarray:
    return np.array([Fraction(v) for v in values], dtype=object)


def zero_vector(size: int) -> np.ndarray:
    return np.array([Fraction(0)] * size, dtype=object)


def unit_vector(size: int, index: int) -> np.ndarray:
    vector = zero_vector(size)
    vector[index] = Fraction(1)
    return vector


def exact_matrix(rows: Sequence[Sequence], shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    if shape is not None and not rows:
        return np.array([[Fraction(0)] * shape[1] for _ in range(shape[0])], dtype=object).reshape(shape)
    return np.array([[Fraction(v) for v in row] for row in rows], dtype=object)


def zero_matrix(rows: int, cols: int) -> np.ndarray:
    return np.array([[Fraction(0)] * cols for _ in range(rows)], dtype=object).reshape(rows, cols)


def is_zero_vector(vector) -> bool:
    return all(v == 0 for v in np.asarray(vector, dtype=object).ravel())


def nonzero_entries(vector) -> List[Tuple[int, object]]:
    """(index, value) for every nonzero coordinate."""
    return [(i, v) for i, v in enumerate(vector) if v != 0]


def sparse_apply(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """matrix @ vector over the nonzero entries only."""
    result = zero_vector(matrix.shape[0])
    for j, v in nonzero_entries(vector):
        for i, m in nonzero_entries(matrix[:, j]):
            result[i] += m * v
    return result


def sparse_matmul(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """left @ right for exact matrices, skipping zero products."""
    result = zero_matrix(left.shape[0], right.shape[1])
    rows = [nonzero_entries(row) for row in right]
    for i, row in enumerate(left):
        for k, a in nonzero_entries(row):
            for j, b in rows[k]:
                result[i, j] += a * b
    return result


def to_sympy(matrix: np.ndarray) -> sympy.Matrix:
    matrix = np.asarray(matrix, dtype=object)
    rows, cols = matrix.shape
    return sympy.Matrix(rows, cols, [_to_rational(v) for v in matrix.ravel()])


def from_sympy(matrix: sympy.Matrix) -> np.ndarray:
    values = [_from_rational(v) for v in matrix]
    return np.array(values, dtype=object).reshape(matrix.rows, matrix.cols)


def columns_matrix(vectors: Sequence[np.ndarray], size: int) -> np.ndarray:
    if not vectors:
        return zero_matrix(size, 0)
    return np.array([list(v) for v in vectors], dtype=object).T.reshape(size, len(vectors))


def exact_rank(matrix: np.ndarray) -> int:
    matrix = np.asarray(matrix, dtype=object)
    if matrix.size == 0:
        return 0
    return to_sympy(matrix).rank()


def exact_nullspace(matrix: np.ndarray) -> List[np.ndarray]:
    """Basis of {x : M x = 0} from the reduced row echelon form."""
    matrix = np.asarray(matrix, dtype=object)
    cols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return [unit_vector(cols, i) for i in range(cols)]
    return [np.array([_from_rational(v) for v in vec], dtype=object) for vec in to_sympy(matrix).nullspace()]


def column_space(matrix: np.ndarray) -> List[np.ndarray]:
    """Basis of the image, taken from the pivot columns."""
    matrix = np.asarray(matrix, dtype=object)
    if matrix.size == 0:
        return []
    _, pivots = to_sympy(matrix).rref()
    return [matrix[:, j].copy() for j in pivots]


def subspace_rank(vectors: Sequence[np.ndarray], size: int) -> int:
    return exact_rank(columns_matrix(vectors, size)) if vectors else 0


def subspace_sum(first: Sequence[np.ndarray], second: Sequence[np.ndarray], size: int) -> List[np.ndarray]:
    return column_space(columns_matrix(list(first) + list(second), size))


def subspace_intersection(first: Sequence[np.ndarray], second: Sequence[np.ndarray],
                          size: int) -> List[np.ndarray]:
    """Basis of span(first) ∩ span(second)."""
    if not first or not second:
        return []
    first = column_space(columns_matrix(first, size))
    second = column_space(columns_matrix(second, size))
    if not first or not second:
        return []
    stacked = columns_matrix(first + [-v for v in second], size)
    vectors = []
    for null in exact_nullspace(stacked):
        combination = zero_vector(size)
        for coefficient, basis in zip(null[:len(first)], first):
            combination = combination + coefficient * basis
        vectors.append(combination)
    return column_space(columns_matrix(vectors, size)) if vectors else []


def same_subspace(first: Sequence[np.ndarray], second: Sequence[np.ndarray], size: int) -> bool:
    rank_first = subspace_rank(first, size)
    rank_second = subspace_rank(second, size)
    if rank_first != rank_second:
        return False
    return subspace_rank(list(first) + list(second), size) == rank_first


def exact_inverse(matrix: np.ndarray) -> np.ndarray:
    """Inverse of a square rational matrix."""
    sym = to_sympy(matrix)
    if sym.rows != sym.cols or sym.rank() < sym.rows:
        raise InconsistentSystemError("Matrix is singular")
    return from_sympy(sym.inv())


class ExactSolver:
    """
    Deterministic solver for M x = b over Q

    Row reduces [M | I] once with fixed pivoting. Particular solutions set
    every free variable to zero, so the support is confined to pivot columns.
    """

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=object)
        self.rows, self.cols = matrix.shape
        augmented = to_sympy(matrix).row_join(sympy.eye(self.rows))
        reduced, pivots = augmented.rref()
        self.pivots = [p for p in pivots if p < self.cols]
        self.rank = len(self.pivots)
        self.transform = from_sympy(reduced[:, self.cols:])
        logger.debug(f"ExactSolver: {self.rows}x{self.cols} matrix of rank {self.rank}")

    def solve(self, target: Sequence) -> Optional[np.ndarray]:
        """Particular solution or None when the system is inconsistent."""
        y = self.transform.dot(np.asarray(target, dtype=object)) if self.rows else np.array([], dtype=object)
        if any(value != 0 for value in y[self.rank:]):
            return None
        x = zero_vector(self.cols)
        for row, column in enumerate(self.pivots):
            x[column] = y[row]
        return x

    def solve_or_raise(self, target: Sequence, context: str = "") -> np.ndarray:
        x = self.solve(target)
        if x is None:
            raise InconsistentSystemError(f"Inconsistent linear system {context}".strip())
        return x
