"""
Tame semisimple germs in special coordinates

A germ is recorded by the values at its base point of the canonical
coordinates u, the metric coefficients eta and the matrix
v_ij = 1/2 (u^j - u^i) eta_ij / eta_j. Germs can be tensored, compared up to
relabeling and round-tripped through JSON files.
"""

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from config import DEFAULT_TOLERANCE, MAX_PERMUTATION_SIZE
from graded_core import FrobeniusError

logger = logging.getLogger(__name__)


class GermError(FrobeniusError):
    """Errors of the germ calculus"""


class CollidingSpectrumError(GermError):
    """Canonical coordinates of a product germ are not pairwise distinct"""


class GermFileError(GermError):
    """Malformed germ file"""


@dataclass
class SemisimpleGerm:
    """
    Special coordinates (u, eta, v) of a tame semisimple germ

    Attributes:
        u: Canonical coordinates at the base point
        eta: Metric coefficients, all nonzero
        v: mu x mu matrix with zero diagonal
    """

    u: np.ndarray
    eta: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=complex).ravel()
        self.eta = np.asarray(self.eta, dtype=complex).ravel()
        self.v = np.asarray(self.v, dtype=complex)
        size = self.u.size
        if self.eta.size != size or self.v.shape != (size, size):
            raise GermError(
                f"Inconsistent germ shapes: u {self.u.shape}, eta {self.eta.shape}, v {self.v.shape}"
            )
        if np.any(self.eta == 0):
            raise GermError("Metric coefficients must be nonzero")
        self.v = self.v.copy()
        np.fill_diagonal(self.v, 0)

    @property
    def size(self) -> int:
        return self.u.size

    @classmethod
    def from_eta_jacobian(cls, u, eta, eta_jacobian) -> 'SemisimpleGerm':
        """v_ij = 1/2 (u^j - u^i) eta_ij / eta_j."""
        u = np.asarray(u, dtype=complex)
        eta = np.asarray(eta, dtype=complex)
        eta_jacobian = np.asarray(eta_jacobian, dtype=complex)
        v = 0.5 * (u[None, :] - u[:, None]) * eta_jacobian / eta[None, :]
        return cls(u=u, eta=eta, v=v)

    def is_tame(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        for i in range(self.size):
            for j in range(i + 1, self.size):
                if abs(self.u[i] - self.u[j]) <= tol * max(1.0, abs(self.u[i])):
                    return False
        return True

    def relabel(self, permutation: Sequence[int]) -> 'SemisimpleGerm':
        """Germ whose label a carries the data of label permutation[a]."""
        permutation = list(permutation)
        if sorted(permutation) != list(range(self.size)):
            raise GermError(f"Not a permutation of {self.size} labels: {permutation}")
        return SemisimpleGerm(
            u=self.u[permutation],
            eta=self.eta[permutation],
            v=self.v[np.ix_(permutation, permutation)],
        )

    def reciprocity_defect(self) -> float:
        """max |eta_j v_ij + eta_i v_ji|."""
        defect = self.eta[None, :] * self.v + self.eta[:, None] * self.v.T
        return float(np.max(np.abs(defect))) if defect.size else 0.0

    def circulant_defect(self) -> float:
        """How far v is from depending only on k - j mod mu."""
        n = self.size
        worst = 0.0
        for j in range(n):
            for k in range(n):
                if j != k:
                    worst = max(worst, abs(self.v[j, k] - self.v[0, (k - j) % n]))
        return worst

    def to_dict(self) -> dict:
        return {'size': self.size, 'u': self.u, 'eta': self.eta, 'v': self.v}


def tensor(first: SemisimpleGerm, second: SemisimpleGerm,
           tol: float = DEFAULT_TOLERANCE) -> SemisimpleGerm:
    """
    Tensor product of germs, labels (i, j) in row-major order

    u^I = u'^i + u''^j, eta_I = eta'_i eta''_j,
    v_IK = delta_jl v'_ik + delta_ik v''_jl.

    Raises:
        CollidingSpectrumError: if the sums u'^i + u''^j are not pairwise distinct
    """
    u = (first.u[:, None] + second.u[None, :]).ravel()
    eta = (first.eta[:, None] * second.eta[None, :]).ravel()
    v = np.kron(first.v, np.eye(second.size)) + np.kron(np.eye(first.size), second.v)
    product = SemisimpleGerm(u=u, eta=eta, v=v)
    if not product.is_tame(tol):
        raise CollidingSpectrumError(
            f"Tensor of germs of sizes {first.size} and {second.size} has colliding canonical coordinates"
        )
    logger.debug(f"tensor: {first.size} x {second.size} -> {product.size}")
    return product


def identity_germ(c: complex = 0) -> SemisimpleGerm:
    """The size-one germ (u = c, eta = 1), the tensor identity up to a shift."""
    return SemisimpleGerm(u=[c], eta=[1.0], v=[[0.0]])


def germ_from_an(n: int, a_nm1, a_n, b: Optional[complex] = None,
                 zeta: Optional[complex] = None) -> SemisimpleGerm:
    """Germ of A_n at a special point; see an_saito.special_point_closed_form."""
    from an_saito import special_point_closed_form

    return special_point_closed_form(n, a_nm1, a_n, b=b, zeta=zeta)


def germ_from_projective(n: int, x0, x1) -> SemisimpleGerm:
    """Germ of the quantum cohomology of P^(n-1) at (x0, x1)."""
    from an_saito import projective_special_point

    return projective_special_point(n, x0, x1)


@dataclass
class GermComparison:
    isomorphic: bool
    permutation: Optional[List[int]]
    max_deviation: float

    def to_dict(self) -> dict:
        return {
            'isomorphic': self.isomorphic,
            'permutation': self.permutation,
            'max_deviation': self.max_deviation,
        }


def _deviation(first: SemisimpleGerm, second: SemisimpleGerm, permutation: Sequence[int]) -> float:
    relabeled = second.relabel(permutation)
    return float(max(
        np.max(np.abs(first.u - relabeled.u)),
        np.max(np.abs(first.eta - relabeled.eta)),
        np.max(np.abs(first.v - relabeled.v)),
    ))


def compare_germs(first: SemisimpleGerm, second: SemisimpleGerm,
                  tol: float = DEFAULT_TOLERANCE) -> GermComparison:
    """
    Search for a relabeling of second that matches first within tol

    Candidates for each label are tried in order of distance in u, and
    partial assignments are pruned on eta and on the v entries among labels
    already placed. Tolerances scale with the magnitude of each quantity.

    Returns:
        GermComparison; permutation[a] is the label of second matched to a
    """
    if first.size != second.size:
        return GermComparison(False, None, float('inf'))
    size = first.size
    if size > MAX_PERMUTATION_SIZE:
        raise GermError(f"Germ comparison is capped at size {MAX_PERMUTATION_SIZE}, got {size}")

    tol_u = tol * max(1.0, float(np.max(np.abs(first.u))))
    tol_eta = tol * max(1.0, float(np.max(np.abs(first.eta))))
    tol_v = tol * max(1.0, float(np.max(np.abs(first.v))))

    assignment: List[int] = []
    used = [False] * size

    def fits(a: int, b: int) -> bool:
        if abs(first.u[a] - second.u[b]) > tol_u or abs(first.eta[a] - second.eta[b]) > tol_eta:
            return False
        for a_prev, b_prev in enumerate(assignment):
            if abs(first.v[a, a_prev] - second.v[b, b_prev]) > tol_v:
                return False
            if abs(first.v[a_prev, a] - second.v[b_prev, b]) > tol_v:
                return False
        return True

    def search(a: int) -> bool:
        if a == size:
            return True
        for b in sorted(range(size), key=lambda c: abs(first.u[a] - second.u[c])):
            if not used[b] and fits(a, b):
                used[b] = True
                assignment.append(b)
                if search(a + 1):
                    return True
                assignment.pop()
                used[b] = False
        return False

    if search(0):
        permutation = list(assignment)
        return GermComparison(True, permutation, _deviation(first, second, permutation))

    greedy: List[int] = []
    for a in range(size):
        remaining = [b for b in range(size) if b not in greedy]
        greedy.append(min(remaining, key=lambda b: abs(first.u[a] - second.u[b])))
    deviation = _deviation(first, second, greedy)
    logger.debug(f"compare_germs: no relabeling within {tol}, nearest deviation {deviation:.3e}")
    return GermComparison(False, None, deviation)


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def _complex_list(data, name: str) -> np.ndarray:
    try:
        return np.array([complex(re, im) for re, im in data], dtype=complex)
    except (TypeError, ValueError) as e:
        raise GermFileError(f"Field {name!r} must be a list of [re, im] pairs") from e


def germ_to_json(germ: SemisimpleGerm) -> str:
    return json.dumps({
        'size': germ.size,
        'u': _pairs(germ.u),
        'eta': _pairs(germ.eta),
        'v': [_pairs(row) for row in germ.v],
    }, indent=2)


def germ_from_json(text: str) -> SemisimpleGerm:
    try:
        data = json.loads(text)
        size = int(data['size'])
        u = _complex_list(data['u'], 'u')
        eta = _complex_list(data['eta'], 'eta')
        v = np.array([_complex_list(row, 'v') for row in data['v']], dtype=complex).reshape(size, size)
    except (KeyError, ValueError, TypeError) as e:
        raise GermFileError(f"Invalid germ file: {e}") from e
    if u.size != size:
        raise GermFileError(f"Germ file declares size {size} but lists {u.size} u values")
    return SemisimpleGerm(u=u, eta=eta, v=v)


def write_germ(germ: SemisimpleGerm, path: Path) -> None:
    """Write a germ file atomically (temp file + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + '.tmp')
    with open(temp_path, 'w', encoding='utf-8') as f:
        f.write(germ_to_json(germ))
        f.write("\n")
    os.replace(temp_path, path)
    logger.info(f"Germ of size {germ.size} written to {path}")


def read_germ(path: Path) -> SemisimpleGerm:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return germ_from_json(f.read())
    except FileNotFoundError as e:
        raise GermFileError(f"Germ file not found: {path}") from e
