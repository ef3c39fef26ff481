"""
A_n unfoldings and their direct sums

Numeric side of the Saito construction for F(z) = z^{n+1} + a_1 z^{n-1} + ...
+ a_n: critical data (roots of F', canonical coordinates u^i = F(rho_i),
metric coefficients eta_i = 1/F''(rho_i)), the derivative matrix
eta_jk = d eta_j / d u^k by the three-step chain rule, closed forms at the
special points a_1 = ... = a_{n-2} = 0, flat coordinates from the Laurent
inversion of the (n+1)-th root of F, Euler-field checks, and the
Sebastiani-Thom sum F_A(z1) + F_B(z2) compared against the tensor-product
formulas.
"""

import cmath
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_TOLERANCE, FD_STEP
from graded_core import (
    ComplexPolynomial,
    FrobeniusError,
    laurent_invert,
    laurent_nth_root,
    poly_roots,
)
from germs import CollidingSpectrumError, SemisimpleGerm, compare_germs, tensor
from utils import Violation

logger = logging.getLogger(__name__)


class AnSaitoError(FrobeniusError):
    """Errors of the A_n numerics"""


class NonTameError(AnSaitoError):
    """The chart has multiple critical points or coinciding critical values"""


class SingularVandermondeError(AnSaitoError):
    """The Vandermonde system relating a and u is singular"""


class RelabelingError(AnSaitoError):
    """No relabeling of roots matches the closed forms"""


@dataclass(frozen=True)
class AnChart:
    """
    A point of the A_n unfolding

    Attributes:
        n: Index of the singularity (n >= 1)
        coefficients: a_1..a_n
    """

    n: int
    coefficients: Tuple[complex, ...]

    def __post_init__(self):
        if self.n < 1:
            raise AnSaitoError(f"A_n needs n >= 1, got {self.n}")
        coefficients = tuple(complex(a) for a in self.coefficients)
        if len(coefficients) != self.n:
            raise AnSaitoError(f"A_{self.n} needs {self.n} coefficients, got {len(coefficients)}")
        object.__setattr__(self, 'coefficients', coefficients)

    @classmethod
    def special(cls, n: int, a_nm1, a_n) -> 'AnChart':
        """Chart with a_1 = ... = a_{n-2} = 0."""
        if n < 2:
            raise AnSaitoError("Special points need n >= 2")
        coefficients = [0j] * n
        coefficients[n - 2] = complex(a_nm1)
        coefficients[n - 1] = complex(a_n)
        return cls(n, tuple(coefficients))

    def polynomial(self) -> ComplexPolynomial:
        return ComplexPolynomial((1, 0) + self.coefficients)

    def shifted(self, direction: Sequence[complex], scale: complex) -> 'AnChart':
        return AnChart(self.n, tuple(a + scale * d for a, d in zip(self.coefficients, direction)))

    def to_dict(self) -> dict:
        return {'n': self.n, 'coefficients': list(self.coefficients)}


@dataclass
class CriticalData:
    roots: np.ndarray
    u: np.ndarray
    eta: np.ndarray
    tame: bool
    multiple_roots: bool = False

    @property
    def eta_sum(self) -> complex:
        """g(e, e) for e = sum of the idempotents."""
        return complex(np.sum(self.eta))

    def to_dict(self) -> dict:
        return {
            'roots': self.roots, 'u': self.u, 'eta': self.eta,
            'tame': self.tame, 'multiple_roots': self.multiple_roots,
        }


@dataclass
class EtaJacobian:
    """eta_jk = d eta_j / d u^k at a tame point."""

    matrix: np.ndarray

    @property
    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T))) if self.matrix.size else 0.0

    def is_symmetric(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.matrix))) if self.matrix.size else 1.0)
        return self.asymmetry <= tol * scale

    def to_dict(self) -> dict:
        return {'matrix': self.matrix, 'asymmetry': self.asymmetry}


def _pairwise_distinct(values: np.ndarray, tol: float) -> bool:
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= tol * max(1.0, abs(values[i])):
                return False
    return True


def critical_data(chart: AnChart, tol: float = DEFAULT_TOLERANCE) -> CriticalData:
    """
    Roots of F', critical values and metric coefficients

    Args:
        chart: A_n point
        tol: Root clustering and tameness tolerance

    Returns:
        CriticalData in the deterministic root order of poly_roots
    """
    F = chart.polynomial()
    F1 = F.derivative()
    F2 = F1.derivative()

    roots = poly_roots(F1, tol)
    rho = np.array([r.value for r in roots], dtype=complex)
    multiple = any(r.multiple for r in roots)

    u = np.array(F(rho), dtype=complex)
    second = np.array(F2(rho), dtype=complex)
    eta = np.full(chart.n, np.nan + 0j)
    nonzero = np.abs(second) > tol
    eta[nonzero] = 1.0 / second[nonzero]

    tame = not multiple and _pairwise_distinct(u, tol)
    if not tame:
        logger.warning(f"A_{chart.n} chart {chart.coefficients} is not tame")

    return CriticalData(roots=rho, u=u, eta=eta, tame=tame, multiple_roots=multiple)


def _require_tame(chart: AnChart, tol: float) -> CriticalData:
    data = critical_data(chart, tol)
    if not data.tame:
        raise NonTameError(f"A_{chart.n} chart {chart.coefficients} is not tame")
    return data


def a_to_u_inverse(rho: np.ndarray, n: int) -> np.ndarray:
    """
    d a_l / d u^k as the inverse of V_il = rho_i^(n-l)

    Raises:
        SingularVandermondeError: for coincident roots
    """
    powers = n - np.arange(1, n + 1)
    vandermonde = rho[:, None] ** powers[None, :]
    try:
        if np.linalg.cond(vandermonde) > 1e14:
            raise SingularVandermondeError("Vandermonde matrix is numerically singular")
        return np.linalg.inv(vandermonde)
    except np.linalg.LinAlgError as e:
        raise SingularVandermondeError(f"Vandermonde matrix is singular: {e}") from e


def eta_jacobian(chart: AnChart, tol: float = DEFAULT_TOLERANCE) -> EtaJacobian:
    """
    d eta_j / d u^k via rho and a

    The three factors are d eta_j/d rho_m (eta_j = 1/((n+1) prod_{i!=j}(rho_j - rho_i))),
    d rho_m/d a_l = -(n-l) rho_m^(n-l-1) eta_m, and d a_l/d u^k from the
    Vandermonde relation.

    Raises:
        NonTameError: if the chart is not tame
        SingularVandermondeError: for coincident roots
    """
    data = _require_tame(chart, tol)
    n = chart.n
    rho, eta = data.roots, data.eta

    d_eta_d_rho = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for m in range(n):
            if m != j:
                d_eta_d_rho[j, m] = -eta[j] / (rho[m] - rho[j])
        d_eta_d_rho[j, j] = eta[j] * sum(1.0 / (rho[i] - rho[j]) for i in range(n) if i != j)

    d_rho_d_a = np.zeros((n, n), dtype=complex)
    for m in range(n):
        for l in range(1, n + 1):
            if n - l >= 1:
                d_rho_d_a[m, l - 1] = -(n - l) * rho[m] ** (n - l - 1) * eta[m]

    d_a_d_u = a_to_u_inverse(rho, n)
    return EtaJacobian(matrix=d_eta_d_rho @ d_rho_d_a @ d_a_d_u)


def numeric_germ(chart: AnChart, tol: float = DEFAULT_TOLERANCE) -> SemisimpleGerm:
    """Special coordinates of a tame chart from the chain-rule eta_jk."""
    data = _require_tame(chart, tol)
    return SemisimpleGerm.from_eta_jacobian(data.u, data.eta, eta_jacobian(chart, tol).matrix)


def principal_branch(n: int, a_nm1) -> complex:
    """Principal n-th root b of -a_{n-1}/(n+1)."""
    return complex(-complex(a_nm1) / (n + 1)) ** (1.0 / n)


def special_point_closed_form(n: int, a_nm1, a_n, b: Optional[complex] = None,
                              zeta: Optional[complex] = None) -> SemisimpleGerm:
    """
    Closed-form special coordinates at a_1 = ... = a_{n-2} = 0

    u^i = a_n + (n/(n+1)) zeta^i a_{n-1} b,
    eta_i = zeta^i / (n (n+1) b^(n-1)),
    v_jk = 1/((n+1)(1 - zeta^(k-j))), zero diagonal.

    Args:
        n: Index (n >= 2)
        a_nm1: a_{n-1}, nonzero
        a_n: a_n
        b: Branch with b^n = -a_{n-1}/(n+1); principal root by default
        zeta: Primitive n-th root of unity; exp(2 pi i/n) by default

    Raises:
        NonTameError: if a_{n-1} = 0
    """
    if n < 2:
        raise AnSaitoError("Special points need n >= 2")
    a_nm1, a_n = complex(a_nm1), complex(a_n)
    if a_nm1 == 0:
        raise NonTameError("a_{n-1} = 0 is not a tame point")
    b = principal_branch(n, a_nm1) if b is None else complex(b)
    zeta = cmath.exp(2j * cmath.pi / n) if zeta is None else complex(zeta)

    if abs(b ** n + a_nm1 / (n + 1)) > DEFAULT_TOLERANCE * max(1.0, abs(a_nm1)):
        raise AnSaitoError(f"b = {b} is not an n-th root of -a_(n-1)/(n+1)")

    powers = np.array([zeta ** i for i in range(n)], dtype=complex)
    u = a_n + (n / (n + 1)) * powers * a_nm1 * b
    eta = powers / (n * (n + 1) * b ** (n - 1))
    v = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if j != k:
                v[j, k] = 1.0 / ((n + 1) * (1 - zeta ** (k - j)))
    return SemisimpleGerm(u=u, eta=eta, v=v)


def eta_jacobian_closed_form(n: int, a_nm1, zeta: Optional[complex] = None) -> np.ndarray:
    """
    Off-diagonal eta_jk = 2 r / ((r - 1)^2 n^2 a_{n-1}^2), r = zeta^(k-j)

    Labels follow special_point_closed_form; the diagonal is left at zero.
    """
    zeta = cmath.exp(2j * cmath.pi / n) if zeta is None else complex(zeta)
    a = complex(a_nm1)
    matrix = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if j != k:
                r = zeta ** (k - j)
                matrix[j, k] = 2 * r / ((r - 1) ** 2 * n ** 2 * a ** 2)
    return matrix


def projective_special_point(n: int, x0, x1) -> SemisimpleGerm:
    """
    Special coordinates of the quantum cohomology of P^(n-1)

    u^i = x0 + n zeta^i e^(x1/n), eta_i = (zeta^i/n) e^(-x1 (n-1)/n),
    v_jk = 1/(1 - zeta^(k-j)).
    """
    if n < 2:
        raise AnSaitoError("Projective special points need n >= 2")
    zeta = cmath.exp(2j * cmath.pi / n)
    x0, x1 = complex(x0), complex(x1)
    powers = np.array([zeta ** i for i in range(n)], dtype=complex)
    u = x0 + n * powers * cmath.exp(x1 / n)
    eta = powers / n * cmath.exp(-x1 * (n - 1) / n)
    v = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if j != k:
                v[j, k] = 1.0 / (1 - zeta ** (k - j))
    return SemisimpleGerm(u=u, eta=eta, v=v)


@dataclass
class SpecialPointReport:
    n: int
    a_nm1: complex
    a_n: complex
    permutation: List[int]
    max_deviation: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            'n': self.n, 'a_nm1': self.a_nm1, 'a_n': self.a_n,
            'permutation': self.permutation, 'max_deviation': self.max_deviation,
            'passed': self.passed,
        }


def verify_special_point(n: int, a_nm1, a_n, tol: float = DEFAULT_TOLERANCE) -> SpecialPointReport:
    """
    Compare the chain-rule germ at a special point with the closed forms

    Raises:
        NonTameError: if a_{n-1} = 0
        RelabelingError: if no relabeling matches within tol
    """
    if complex(a_nm1) == 0:
        raise NonTameError("a_{n-1} = 0 is not a tame point")
    chart = AnChart.special(n, a_nm1, a_n)
    numeric = numeric_germ(chart, tol)
    closed = special_point_closed_form(n, a_nm1, a_n)

    comparison = compare_germs(numeric, closed, tol)
    if not comparison.isomorphic:
        raise RelabelingError(
            f"A_{n} special point ({a_nm1}, {a_n}): no relabeling within {tol}, "
            f"deviation {comparison.max_deviation:.3e}"
        )
    logger.info(f"A_{n} special point verified, max deviation {comparison.max_deviation:.3e}")
    return SpecialPointReport(
        n=n, a_nm1=complex(a_nm1), a_n=complex(a_n),
        permutation=list(comparison.permutation), max_deviation=comparison.max_deviation,
        passed=True,
    )


def flat_coordinates(chart: AnChart, order: Optional[int] = None) -> np.ndarray:
    """
    x_1..x_n: coefficients of w^-1..w^-n in the inverse of w = F^(1/(n+1))
    """
    order = max(chart.n, order or 0)
    w = laurent_nth_root(list((1, 0) + chart.coefficients), order)
    z = laurent_invert(w, order)
    return np.array([z.coefficients[k + 1] for k in range(1, chart.n + 1)], dtype=complex)


def metric_potential(chart: AnChart) -> complex:
    """eta = a_1/(n+1)."""
    return chart.coefficients[0] / (chart.n + 1)


def metric_potential_from_roots(chart: AnChart, tol: float = DEFAULT_TOLERANCE) -> complex:
    """eta = -sum rho_i^2 / (2(n-1)) for n >= 2."""
    if chart.n < 2:
        return metric_potential(chart)
    rho = np.array([r.value for r in poly_roots(chart.polynomial().derivative(), tol)])
    return complex(-np.sum(rho ** 2) / (2 * (chart.n - 1)))


def euler_vector(chart: AnChart) -> np.ndarray:
    """Components ((l+1)/(n+1)) a_l of E in the a-coordinates."""
    n = chart.n
    return np.array([(l + 1) / (n + 1) * chart.coefficients[l - 1] for l in range(1, n + 1)], dtype=complex)


def identity_vector(chart: AnChart) -> np.ndarray:
    """The unit field e shifts a_n."""
    direction = np.zeros(chart.n, dtype=complex)
    direction[-1] = 1.0
    return direction


def _directional(function, chart: AnChart, direction: np.ndarray, step: float):
    h = step * max(1.0, max(abs(a) for a in chart.coefficients))
    plus = np.asarray(function(chart.shifted(direction, h)))
    minus = np.asarray(function(chart.shifted(direction, -h)))
    return (plus - minus) / (2 * h)


@dataclass
class EulerReport:
    deviations: Dict[str, float] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)
    charts: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, name: str, deviation: float, tol: float, witness: str) -> None:
        self.deviations[name] = max(self.deviations.get(name, 0.0), float(deviation))
        if deviation > tol:
            self.violations.append(Violation(name, f"{witness}: deviation {deviation:.3e}"))

    def to_dict(self) -> dict:
        return {
            'passed': self.passed, 'charts': self.charts,
            'deviations': self.deviations, 'violations': self.violations,
        }


def euler_checks(charts: Union[AnChart, Sequence[AnChart]], tol: float = 1e-6,
                 step: float = FD_STEP) -> EulerReport:
    """
    Finite-difference checks of the Euler field and the identity on A_n

    For each tame chart: (i) E x_i = ((i+1)/(n+1)) x_i, (ii) e eta = sum eta_i,
    (iii) E eta = (2/(n+1)) eta, (iv) d eta/d u^i = eta_i,
    (v) e eta_i = 0, (vi) the root formula for eta agrees with a_1/(n+1).

    Args:
        charts: One chart or a family of charts
        tol: Absolute tolerance on finite-difference residuals
        step: Relative central-difference step

    Returns:
        EulerReport listing violations instead of raising
    """
    if isinstance(charts, AnChart):
        charts = [charts]
    report = EulerReport()

    for chart in charts:
        data = critical_data(chart)
        if not data.tame:
            report.violations.append(Violation('tameness', f"chart {chart.coefficients} is not tame"))
            continue
        report.charts += 1
        n = chart.n
        label = f"A_{n} {chart.coefficients}"
        E = euler_vector(chart)
        e = identity_vector(chart)

        x = flat_coordinates(chart)
        Ex = _directional(flat_coordinates, chart, E, step)
        weights = np.array([(i + 1) / (n + 1) for i in range(1, n + 1)])
        report.record('flat_coordinate_weights', float(np.max(np.abs(Ex - weights * x))), tol, label)

        potential = metric_potential_from_roots
        e_eta = _directional(potential, chart, e, step)
        report.record('identity_on_metric_potential', abs(e_eta - data.eta_sum), tol, label)
        expected_sum = 0.5 if n == 1 else 0.0
        report.record('metric_coefficient_sum', abs(data.eta_sum - expected_sum), tol, label)

        E_eta = _directional(potential, chart, E, step)
        report.record('euler_on_metric_potential', abs(E_eta - 2 / (n + 1) * potential(chart)), tol, label)

        gradient = a_to_u_inverse(data.roots, n)[0, :] / (n + 1)
        report.record('metric_potential_gradient', float(np.max(np.abs(gradient - data.eta))), tol, label)

        def sorted_eta(c: AnChart) -> np.ndarray:
            return critical_data(c).eta

        e_eta_i = _directional(sorted_eta, chart, e, step)
        report.record('identity_on_metric_coefficients', float(np.max(np.abs(e_eta_i))), tol, label)

        report.record(
            'metric_potential_root_formula',
            abs(metric_potential_from_roots(chart) - metric_potential(chart)), tol, label,
        )

    if report.violations:
        logger.warning(f"euler_checks: {len(report.violations)} violations")
    return report


# ---------------------------------------------------------------------------
# Direct sums
# ---------------------------------------------------------------------------

def _perturbation_terms(z: complex, size: int):
    powers = np.arange(size)
    value = z ** powers
    first = np.where(powers >= 1, powers * z ** np.maximum(powers - 1, 0), 0)
    second = np.where(powers >= 2, powers * (powers - 1) * z ** np.maximum(powers - 2, 0), 0)
    return value.astype(complex), first.astype(complex), second.astype(complex)


class _SumUnfolding:
    """G_t(z1, z2) = F_A(z1) + F_B(z2) + sum t_pq z1^p z2^q."""

    def __init__(self, chart_a: AnChart, chart_b: AnChart):
        self.FA = chart_a.polynomial()
        self.FB = chart_b.polynomial()
        self.FA1, self.FB1 = self.FA.derivative(), self.FB.derivative()
        self.FA2, self.FB2 = self.FA1.derivative(), self.FB1.derivative()
        self.na, self.nb = chart_a.n, chart_b.n

    def gradient_hessian(self, z1: complex, z2: complex, t: np.ndarray):
        P, dP, ddP = _perturbation_terms(z1, self.na)
        Q, dQ, ddQ = _perturbation_terms(z2, self.nb)
        value = self.FA(z1) + self.FB(z2) + P @ t @ Q
        gradient = np.array([self.FA1(z1) + dP @ t @ Q, self.FB1(z2) + P @ t @ dQ])
        hessian = np.array([
            [self.FA2(z1) + ddP @ t @ Q, dP @ t @ dQ],
            [dP @ t @ dQ, self.FB2(z2) + P @ t @ ddQ],
        ])
        return complex(value), gradient, hessian

    def critical(self, start: Tuple[complex, complex], t: np.ndarray, tol: float,
                 max_iterations: int = 50) -> Tuple[complex, complex, np.ndarray]:
        """Newton from start; returns (critical value, 1/det Hessian, point)."""
        z = np.array(start, dtype=complex)
        for _ in range(max_iterations):
            _, gradient, hessian = self.gradient_hessian(z[0], z[1], t)
            step = np.linalg.solve(hessian, gradient)
            z = z - step
            if np.max(np.abs(step)) <= 1e-15 * max(1.0, float(np.max(np.abs(z)))):
                break
        value, gradient, hessian = self.gradient_hessian(z[0], z[1], t)
        if np.max(np.abs(gradient)) > tol * max(1.0, float(np.max(np.abs(z)))):
            raise AnSaitoError(f"Newton on the sum unfolding did not converge near {start}")
        return value, 1.0 / np.linalg.det(hessian), z


@dataclass
class DirectSumReport:
    u: np.ndarray
    eta: np.ndarray
    eta_jacobian: np.ndarray
    predicted_eta_jacobian: np.ndarray
    u_deviation: float
    eta_deviation: float
    eta_jacobian_deviation: float
    block_deviation: float
    sum_germ: SemisimpleGerm
    tensor_germ: SemisimpleGerm
    germs_isomorphic: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            'u': self.u, 'eta': self.eta,
            'u_deviation': self.u_deviation, 'eta_deviation': self.eta_deviation,
            'eta_jacobian_deviation': self.eta_jacobian_deviation,
            'block_deviation': self.block_deviation,
            'germs_isomorphic': self.germs_isomorphic,
            'sum_germ': self.sum_germ, 'tensor_germ': self.tensor_germ,
            'passed': self.passed,
        }


def direct_sum_verify(chart_a: AnChart, chart_b: AnChart, tol: float = DEFAULT_TOLERANCE,
                      fd_tol: float = 1e-6, step: float = FD_STEP) -> DirectSumReport:
    """
    Critical data of F_A(z1) + F_B(z2) against the product formulas

    u^I = u^i + u^j and eta_I = eta_i eta_j are checked directly from the
    Hessian of the sum. eta_IK is obtained by central differences of eta_I
    along canonical directions, which come from inverting the Jacobian of u
    with respect to the unfolding parameters t_pq (coefficients of
    z1^p z2^q), and compared with
    eta_IK = delta_jl eta_ik eta_j + delta_ik eta_k eta_jl.

    Args:
        chart_a, chart_b: Tame charts
        tol: Tolerance on u and eta
        fd_tol: Tolerance on finite-difference eta_IK
        step: Relative central-difference step

    Raises:
        NonTameError: if a factor is not tame
        CollidingSpectrumError: if two sums u^i + u^j coincide
    """
    data_a = _require_tame(chart_a, tol)
    data_b = _require_tame(chart_b, tol)
    na, nb = chart_a.n, chart_b.n
    size = na * nb

    predicted_u = (data_a.u[:, None] + data_b.u[None, :]).ravel()
    if not _pairwise_distinct(predicted_u, tol):
        raise CollidingSpectrumError("Sums of critical values collide; the direct sum is not tame")

    unfolding = _SumUnfolding(chart_a, chart_b)
    base = np.zeros((na, nb), dtype=complex)
    starts = [(data_a.roots[i], data_b.roots[j]) for i in range(na) for j in range(nb)]

    u = np.zeros(size, dtype=complex)
    eta = np.zeros(size, dtype=complex)
    points = []
    for index, start in enumerate(starts):
        u[index], eta[index], z = unfolding.critical(start, base, tol)
        points.append(z)

    predicted_eta = (data_a.eta[:, None] * data_b.eta[None, :]).ravel()
    u_deviation = float(np.max(np.abs(u - predicted_u)))
    eta_deviation = float(np.max(np.abs(eta - predicted_eta)))

    jacobian = np.array([
        [points[I][0] ** p * points[I][1] ** q for p in range(na) for q in range(nb)]
        for I in range(size)
    ], dtype=complex)
    directions = np.linalg.inv(jacobian)

    h = step * max(1.0, float(np.max(np.abs(u))))
    numeric = np.zeros((size, size), dtype=complex)
    for K in range(size):
        direction = directions[:, K].reshape(na, nb)
        plus = np.array([unfolding.critical(starts[I], h * direction, tol)[1] for I in range(size)])
        minus = np.array([unfolding.critical(starts[I], -h * direction, tol)[1] for I in range(size)])
        numeric[:, K] = (plus - minus) / (2 * h)

    jac_a = eta_jacobian(chart_a, tol).matrix
    jac_b = eta_jacobian(chart_b, tol).matrix
    predicted = np.zeros((size, size), dtype=complex)
    for i in range(na):
        for j in range(nb):
            for k in range(na):
                for l in range(nb):
                    value = 0j
                    if j == l:
                        value += jac_a[i, k] * data_b.eta[j]
                    if i == k:
                        value += data_a.eta[k] * jac_b[j, l]
                    predicted[i * nb + j, k * nb + l] = value

    scale = max(1.0, float(np.max(np.abs(predicted))))
    eta_jacobian_deviation = float(np.max(np.abs(numeric - predicted))) / scale
    block_mask = np.array([
        [(I // nb != K // nb) and (I % nb != K % nb) for K in range(size)] for I in range(size)
    ])
    block_deviation = float(np.max(np.abs(numeric[block_mask]))) if block_mask.any() else 0.0

    sum_germ = SemisimpleGerm.from_eta_jacobian(u, eta, numeric)
    tensor_germ = tensor(numeric_germ(chart_a, tol), numeric_germ(chart_b, tol))
    comparison = compare_germs(sum_germ, tensor_germ, fd_tol)

    passed = (
        u_deviation <= tol * max(1.0, float(np.max(np.abs(u))))
        and eta_deviation <= tol
        and eta_jacobian_deviation <= fd_tol
        and block_deviation <= fd_tol
        and comparison.isomorphic
    )
    logger.info(
        f"direct sum A_{na} + A_{nb}: eta_IK deviation {eta_jacobian_deviation:.3e}, "
        f"{'passed' if passed else 'FAILED'}"
    )

    return DirectSumReport(
        u=u, eta=eta, eta_jacobian=numeric, predicted_eta_jacobian=predicted,
        u_deviation=u_deviation, eta_deviation=eta_deviation,
        eta_jacobian_deviation=eta_jacobian_deviation, block_deviation=block_deviation,
        sum_germ=sum_germ, tensor_germ=tensor_germ,
        germs_isomorphic=comparison.isomorphic, passed=passed,
    )
