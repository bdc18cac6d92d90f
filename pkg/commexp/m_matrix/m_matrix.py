from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np

from commexp.constants import MAX_DIMENSION, Tolerances
from commexp.errors import DimensionError, NonFiniteError
from commexp.m_matrix.m_roots import monic_roots
from commexp.utils.utils import frobenius, greedy_match

logger = logging.getLogger(__name__)


class CMatrix:
    """An immutable square complex matrix of dimension 1, 2 or 3.

    Parameters
    ----------
    entries : array_like
        Row-major n x n entries, anything ``numpy.asarray`` accepts.

    Raises
    ------
    DimensionError
        If the input is not square or its dimension is outside {1, 2, 3}.
    NonFiniteError
        If some entry is NaN or infinite.
    """

    __slots__ = ("_data",)

    def __init__(self, entries):
        data = np.array(entries, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"matrix must be square, got shape {data.shape}")
        if not 1 <= data.shape[0] <= MAX_DIMENSION:
            raise DimensionError(
                f"dimension must be ≤ {MAX_DIMENSION}, got {data.shape[0]}"
            )
        if not np.all(np.isfinite(data)):
            raise NonFiniteError("matrix entries must be finite")
        data.setflags(write=False)
        self._data = data

    @classmethod
    def identity(cls, n: int) -> CMatrix:
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, n: int) -> CMatrix:
        return cls(np.zeros((n, n)))

    @classmethod
    def diag(cls, *values: complex) -> CMatrix:
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    @classmethod
    def elementary(cls, n: int, i: int, j: int) -> CMatrix:
        """The matrix E_ij with a single 1 at row ``i``, column ``j`` (1-based)."""
        data = np.zeros((n, n), dtype=np.complex128)
        data[i - 1, j - 1] = 1.0
        return cls(data)

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def data(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._data

    def trace(self) -> complex:
        return complex(np.trace(self._data))

    def det(self) -> complex:
        return complex(np.linalg.det(self._data))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self._data)))

    def fro_norm(self) -> float:
        return frobenius(self._data)

    def scale(self) -> float:
        """Magnitude used to make thresholds relative: ``max(1, ||m||_F)``."""
        return max(1.0, self.fro_norm())

    def allclose(self, other: CMatrix, tol: Tolerances._DefaultTolerances) -> bool:
        """Entrywise comparison within ``eps_entry * (1 + max norm of both operands)``."""
        check_same_dimension(self, other)
        bound = tol.eps_entry * (1.0 + max(self.max_norm(), other.max_norm()))
        return bool(np.max(np.abs(self._data - other._data)) <= bound)

    def is_zero(
        self, tol: Tolerances._DefaultTolerances, reference: float = 0.0
    ) -> bool:
        """Whether every entry is below ``eps_entry * (1 + reference)``."""
        return bool(self.max_norm() <= tol.eps_entry * (1.0 + reference))

    def __add__(self, other: CMatrix) -> CMatrix:
        check_same_dimension(self, other)
        return CMatrix(self._data + other._data)

    def __sub__(self, other: CMatrix) -> CMatrix:
        check_same_dimension(self, other)
        return CMatrix(self._data - other._data)

    def __neg__(self) -> CMatrix:
        return CMatrix(-self._data)

    def __mul__(self, scalar: complex) -> CMatrix:
        if isinstance(scalar, CMatrix):
            return NotImplemented
        return CMatrix(self._data * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: CMatrix) -> CMatrix:
        return matmul(self, other)

    def __pow__(self, k: int) -> CMatrix:
        return CMatrix(np.linalg.matrix_power(self._data, k))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CMatrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            np.array_equal(self._data, other._data)
        )

    def __hash__(self) -> int:
        return hash((self.n, self._data.tobytes()))

    def __repr__(self) -> str:
        rows = ", ".join(
            "[" + ", ".join(f"{z:.6g}" for z in row) + "]" for row in self._data
        )
        return f"CMatrix([{rows}])"


def check_same_dimension(a: CMatrix, b: CMatrix) -> None:
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of an n x n matrix, repeated according to multiplicity."""

    values: tuple[complex, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[complex]:
        return iter(self.values)

    def __getitem__(self, i: int) -> complex:
        return self.values[i]

    def permuted(self, perm: Sequence[int]) -> Spectrum:
        return Spectrum(tuple(self.values[k] for k in perm))

    def clusters(self, threshold: float) -> list[tuple[complex, int]]:
        """Groups eigenvalues closer than ``threshold``, by transitive closure.

        Returns
        -------
        list[tuple[complex, int]]
            One ``(mean value, multiplicity)`` entry per cluster, in order of
            first appearance.
        """
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.values)))
        for i, x in enumerate(self.values):
            for j in range(i + 1, len(self.values)):
                if abs(x - self.values[j]) <= threshold:
                    graph.add_edge(i, j)
        components = sorted(
            (sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0]
        )
        result = []
        for component in components:
            members = [self.values[k] for k in component]
            if len(members) > 1:
                logger.debug("eigenvalue cluster %s", members)
            result.append((complex(sum(members) / len(members)), len(members)))
        return result

    def matches(self, other: Spectrum, threshold: float) -> bool:
        """Multiset equality within ``threshold`` (greedy minimal-distance matching)."""
        return greedy_match(list(self.values), list(other.values), threshold)


@dataclass(frozen=True)
class CharPoly:
    """Coefficients c0..cn of ``det(zI - M)``; the leading coefficient is 1."""

    coefficients: tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc


def matmul(a: CMatrix, b: CMatrix) -> CMatrix:
    check_same_dimension(a, b)
    return CMatrix(a.data @ b.data)


def commutator(a: CMatrix, b: CMatrix) -> CMatrix:
    """Returns ``ab - ba``."""
    check_same_dimension(a, b)
    return CMatrix(a.data @ b.data - b.data @ a.data)


def char_poly(m: CMatrix) -> CharPoly:
    """Characteristic polynomial from trace, principal minors and determinant."""
    x = m.data
    tr = complex(np.trace(x))
    if m.n == 1:
        return CharPoly((-x[0, 0], 1 + 0j))
    if m.n == 2:
        det = x[0, 0] * x[1, 1] - x[0, 1] * x[1, 0]
        return CharPoly((complex(det), -tr, 1 + 0j))
    minors = (
        x[0, 0] * x[1, 1]
        - x[0, 1] * x[1, 0]
        + x[0, 0] * x[2, 2]
        - x[0, 2] * x[2, 0]
        + x[1, 1] * x[2, 2]
        - x[1, 2] * x[2, 1]
    )
    det = (
        x[0, 0] * (x[1, 1] * x[2, 2] - x[1, 2] * x[2, 1])
        - x[0, 1] * (x[1, 0] * x[2, 2] - x[1, 2] * x[2, 0])
        + x[0, 2] * (x[1, 0] * x[2, 1] - x[1, 1] * x[2, 0])
    )
    return CharPoly((complex(-det), complex(minors), -tr, 1 + 0j))


def singular_values(m: CMatrix | np.ndarray) -> np.ndarray:
    data = m.data if isinstance(m, CMatrix) else m
    return np.linalg.svd(data, compute_uv=False)


def rank_eps(m: CMatrix, tol=Tolerances.DEFAULT) -> int:
    """Numerical rank: singular values above ``eps_rank * s_max``."""
    s = singular_values(m)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol.eps_rank * s[0]))


def _is_rank_deficient_at(m: CMatrix, z: complex, tol) -> bool:
    shifted = m.data - z * np.eye(m.n)
    s = singular_values(shifted)
    return bool(s[-1] <= tol.eps_rank * max(s[0], m.scale()))


def eigenvalues(m: CMatrix, tol=Tolerances.DEFAULT) -> Spectrum:
    """All eigenvalues of ``m`` with multiplicity, in closed form.

    Multiple eigenvalues are returned exactly repeated: a candidate multiple root
    of the characteristic polynomial is accepted only when ``m - zI`` is
    numerically singular. Roots closer than ``eps_eig * scale`` are then merged
    to their mean.
    """
    scale = m.scale()
    coeffs = char_poly(m).coefficients[:-1]
    roots = monic_roots(
        coeffs,
        scale,
        tol.eps_root,
        confirm=lambda z: _is_rank_deficient_at(m, z, tol),
    )
    spectrum = Spectrum(tuple(roots))
    snapped: list[complex] = []
    for value, multiplicity in spectrum.clusters(tol.eps_eig * scale):
        snapped.extend([value] * multiplicity)
    return Spectrum(tuple(sorted(snapped, key=lambda z: (z.real, z.imag))))


def eigen_clusters(m: CMatrix, tol=Tolerances.DEFAULT) -> list[tuple[complex, int]]:
    """Distinct eigenvalues of ``m`` with their algebraic multiplicities."""
    return eigenvalues(m, tol).clusters(tol.eps_eig * m.scale())


def is_nilpotent(m: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """``m**n`` vanishes relative to ``||m||**n``."""
    norm = np.linalg.norm(m.data, 2)
    if norm == 0:
        return True
    power = np.linalg.matrix_power(m.data, m.n)
    return bool(np.linalg.norm(power, 2) <= tol.eps_entry * norm**m.n)


def is_diagonalizable(m: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """Geometric multiplicity equals algebraic multiplicity for every eigenvalue."""
    for value, multiplicity in eigen_clusters(m, tol):
        if multiplicity < 2:
            continue
        if rank_eps(m - CMatrix.identity(m.n) * value, tol) > m.n - multiplicity:
            return False
    return True
