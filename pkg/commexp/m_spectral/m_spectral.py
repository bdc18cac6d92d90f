from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from commexp.constants import TWO_PI_I, Tolerances
from commexp.m_matrix.m_matrix import (
    CMatrix,
    Spectrum,
    check_same_dimension,
    char_poly,
    eigen_clusters,
    eigenvalues,
)
from commexp.utils.utils import greedy_match

logger = logging.getLogger(__name__)

_INDECOMPOSABLE_SAMPLES = 20


@dataclass(frozen=True)
class EigenPairing:
    """Orderings of the spectra of A and B matched position by position.

    ``lam[i]`` is paired with ``mu[perm[i]]``; ``perm`` is 0-based.
    """

    lam: Spectrum
    mu: Spectrum
    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.lam))):
            raise ValueError(f"perm must be a permutation of 0..{len(self.lam) - 1}")

    @property
    def paired_mu(self) -> Spectrum:
        return self.mu.permuted(self.perm)

    def pairs(self) -> list[tuple[complex, complex]]:
        return list(zip(self.lam.values, self.paired_mu.values))

    def combined(self, x: complex, y: complex) -> list[complex]:
        """The claimed spectrum ``x λ_i + y μ_perm(i)`` of ``xA + yB``."""
        return [x * lam + y * mu for lam, mu in self.pairs()]


@dataclass(frozen=True)
class CommutantBasis:
    dim: int
    basis: tuple[CMatrix, ...]


def in_2pi_z(z: complex, tol=Tolerances.DEFAULT) -> bool:
    """Whether ``z`` is within ``eps_eig`` of ``2iπk`` for the nearest integer k."""
    k = round(z.imag / (2 * math.pi))
    return abs(z.real) < tol.eps_eig and abs(z - k * TWO_PI_I) < tol.eps_eig


def is_2pi_cf(s: Spectrum, tol=Tolerances.DEFAULT) -> bool:
    """No two eigenvalues differ by a nonzero integer multiple of 2iπ.

    Examples
    --------
    ``{0, 2iπ, 4iπ}`` is not congruence-free; ``{0, 0, 5}`` is.
    """
    for x, y in itertools.combinations(s.values, 2):
        d = x - y
        if in_2pi_z(d, tol) and round(d.imag / (2 * math.pi)) != 0:
            return False
    return True


def _pencil_bound(a: CMatrix, b: CMatrix, x: float, y: float) -> float:
    return max(1.0, abs(x) * a.fro_norm() + abs(y) * b.fro_norm())


def pairing_holds(
    a: CMatrix,
    b: CMatrix,
    pairing: EigenPairing,
    tol=Tolerances.DEFAULT,
) -> bool:
    """Checks ``det(zI - xA - yB) = prod(z - xλ_i - yμ_i)`` on the grid x, y in 1..n+1.

    Each coefficient of z**k is a homogeneous polynomial of degree n - k in (x, y),
    so agreement on n + 1 points of every line y = const already forces the identity.
    Coefficient k is compared within ``eps_eig * R**(n-k)`` where R bounds the
    pencil's norm.
    """
    check_same_dimension(a, b)
    n = a.n
    grid = range(1, n + 2)
    for x, y in itertools.product(grid, grid):
        actual = char_poly(a * x + b * y).coefficients
        # numpy.poly lists the leading coefficient first
        expected = np.poly(pairing.combined(x, y))[::-1]
        bound = _pencil_bound(a, b, x, y)
        for k in range(n):
            if abs(actual[k] - expected[k]) > tol.eps_eig * bound ** (n - k):
                return False
    return True


def property_L(a: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> EigenPairing | None:
    """Finds orderings of the spectra of ``a`` and ``b`` that make the pencil linear.

    Every permutation is tried in lexicographic order and the first that passes
    :func:`pairing_holds` is returned.

    Parameters
    ----------
    a, b : CMatrix
        The pair, of equal dimension.
    tol : :class:`Tolerances`, optional
        Default is Tolerances.DEFAULT.

    Returns
    -------
    EigenPairing | None
        The pairing, or None when the pair does not have property L.
    """
    check_same_dimension(a, b)
    lam = eigenvalues(a, tol)
    mu = eigenvalues(b, tol)
    for perm in itertools.permutations(range(a.n)):
        pairing = EigenPairing(lam, mu, perm)
        if pairing_holds(a, b, pairing, tol):
            return pairing
    logger.debug("no pairing of %s and %s passes", lam.values, mu.values)
    return None


def property_L_bruteforce(
    a: CMatrix,
    b: CMatrix,
    tol=Tolerances.DEFAULT,
    samples: int = 25,
    seed: int = 0,
) -> EigenPairing | None:
    """Random-sample check of property L, independent of the characteristic polynomial.

    For each pairing, the eigenvalues of ``xA + yB`` computed by LAPACK are compared
    as multisets with the claimed combinations on ``samples`` random complex points.
    """
    check_same_dimension(a, b)
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(samples, 2)) + 1j * rng.normal(size=(samples, 2))
    lam = eigenvalues(a, tol)
    mu = eigenvalues(b, tol)
    spectra = [
        list(np.linalg.eigvals(x * a.data + y * b.data)) for x, y in points
    ]
    for perm in itertools.permutations(range(a.n)):
        pairing = EigenPairing(lam, mu, perm)
        if all(
            greedy_match(
                computed,
                pairing.combined(x, y),
                1e-6 * (1.0 + _pencil_bound(a, b, x, y)),
            )
            for (x, y), computed in zip(points, spectra)
        ):
            return pairing
    return None


def _normalized(m: CMatrix) -> np.ndarray:
    norm = m.fro_norm()
    return m.data / norm if norm > 0 else m.data


def is_st_heuristic(a: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """Simultaneous triangularizability by McCoy's criterion, in trace form.

    ``p(A, B) [A, B]`` is nilpotent for every noncommutative polynomial p exactly when
    ``trace(W [A, B])`` vanishes for every word W: the powers of ``p [A, B]`` are
    themselves combinations of such products. Words up to length 2n span the
    algebra generated by two n x n matrices for n <= 3.
    """
    check_same_dimension(a, b)
    x = _normalized(a)
    y = _normalized(b)
    c = x @ y - y @ x
    if np.max(np.abs(c)) <= tol.eps_entry:
        return True
    words = [np.eye(a.n, dtype=np.complex128)]
    frontier = list(words)
    for _ in range(2 * a.n):
        frontier = [w @ g for w in frontier for g in (x, y)]
        words.extend(frontier)
    return all(abs(np.trace(w @ c)) <= tol.eps_eig for w in words)


def commutant_basis(a: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> CommutantBasis:
    """Basis of ``{X : XA = AX, XB = BX}`` from the null space of the stacked Sylvester maps.

    With row-major vectorization, ``vec(XA - AX) = (I ⊗ A^T - A ⊗ I) vec(X)``.
    """
    check_same_dimension(a, b)
    n = a.n
    identity = np.eye(n)
    blocks = [
        np.kron(identity, m.T) - np.kron(m, identity)
        for m in (_normalized(a), _normalized(b))
    ]
    kernel = null_space(np.vstack(blocks), rcond=tol.eps_rank)
    basis = tuple(CMatrix(v.reshape(n, n)) for v in kernel.T)
    return CommutantBasis(len(basis), basis)


def is_indecomposable(a: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """Whether the commutant of ``{a, b}`` is local (scalars plus nilpotents).

    A nontrivial idempotent in the commutant splits the space into invariant
    summands; for a local commutant every traceless part ``X - tr(X)/n I`` is
    nilpotent, which is checked through the traces of its powers on the basis
    and on seeded random combinations of it. A local verdict is then confirmed
    on the eigenvalue clusters of the basis and of one random combination.
    """
    commutant = commutant_basis(a, b, tol)
    if commutant.dim <= 1:
        return True
    rng = np.random.default_rng(0)
    stacked = np.stack([x.data for x in commutant.basis])
    candidates = list(stacked)
    for _ in range(_INDECOMPOSABLE_SAMPLES):
        weights = rng.normal(size=commutant.dim) + 1j * rng.normal(size=commutant.dim)
        candidates.append(np.tensordot(weights, stacked, axes=1))

    if any(_has_traceless_power(x, tol) for x in candidates):
        return False
    # an element with two eigenvalue clusters carries a nontrivial idempotent
    for x in candidates[: commutant.dim + 1]:
        clusters = eigen_clusters(CMatrix(x), tol)
        if len(clusters) > 1:
            logger.warning(
                "commutant element passed the trace test with clusters %s", clusters
            )
            return False
    return True


def _has_traceless_power(x: np.ndarray, tol: Tolerances._DefaultTolerances) -> bool:
    # some power of x - tr(x)/n I has a nonzero trace, so it is not nilpotent
    norm = np.linalg.norm(x)
    if norm == 0:
        return False
    n = x.shape[0]
    x = x / norm
    y = x - np.trace(x) / n * np.eye(n, dtype=np.complex128)
    power = y
    for _ in range(2, n + 1):
        power = power @ y
        if abs(np.trace(power)) > tol.eps_eig:
            logger.debug("commutant element with nonzero trace power: %s", x)
            return True
    return False

