from __future__ import annotations

import cmath
import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from commexp.constants import EXP_REAL_LIMIT, SPECTRAL_SEPARATION, Tolerances
from commexp.errors import (
    DimensionError,
    NonFiniteError,
    OutOfRangeError,
    SingularMatrixError,
)
from commexp.m_matrix.m_matrix import (
    CMatrix,
    commutator,
    eigen_clusters,
    is_diagonalizable,
    singular_values,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JCDecomp:
    """Jordan-Chevalley decomposition ``m = semisimple + nilpotent``."""

    semisimple: CMatrix
    nilpotent: CMatrix


@dataclass(frozen=True)
class LogSplit:
    """The unique splitting ``m = f + delta`` with ``e^f = e^m`` and ``e^delta = I``.

    ``f`` is the principal logarithm of ``e^m``; both parts are polynomials in ``m``.
    """

    f: CMatrix
    delta: CMatrix


class LogPartForm(enum.Enum):
    """Shapes of a 3 x 3 log part after removing its repeated eigenvalue."""

    ZERO = "zero"
    SQUARE_ZERO = "square-zero"
    SPLIT = "split"
    OTHER = "other"


def _spectral_projectors(
    m: CMatrix, tol: Tolerances._DefaultTolerances
) -> list[tuple[complex, int, np.ndarray]]:
    """Projectors onto the generalized eigenspaces of ``m``.

    For n <= 3 at most one eigenvalue is repeated. A simple eigenvalue λ_k gets
    ``prod_j ((m - λ_j I) / (λ_k - λ_j)) ** mult_j``; the repeated one, if any,
    takes the complement ``I - sum``.
    """
    n = m.n
    identity = np.eye(n, dtype=np.complex128)
    clusters = eigen_clusters(m, tol)
    if len(clusters) == 1:
        value, multiplicity = clusters[0]
        return [(value, multiplicity, identity)]

    projectors: list[tuple[complex, int, np.ndarray | None]] = []
    for k, (value, multiplicity) in enumerate(clusters):
        if multiplicity > 1:
            projectors.append((value, multiplicity, None))
            continue
        p = identity.copy()
        for j, (other, other_mult) in enumerate(clusters):
            if j == k:
                continue
            factor = (m.data - other * identity) / (value - other)
            p = p @ np.linalg.matrix_power(factor, other_mult)
        projectors.append((value, multiplicity, p))

    known = sum(p for _, _, p in projectors if p is not None)
    return [
        (value, multiplicity, p if p is not None else identity - known)
        for value, multiplicity, p in projectors
    ]


def jordan_chevalley(m: CMatrix, tol=Tolerances.DEFAULT) -> JCDecomp:
    """Splits ``m`` into commuting diagonalizable and nilpotent parts.

    Examples
    --------
    ``diag(1, 1, 2) + E12`` gives ``(diag(1, 1, 2), E12)``.
    """
    s = sum(value * p for value, _, p in _spectral_projectors(m, tol))
    semisimple = CMatrix(s)
    return JCDecomp(semisimple, m - semisimple)


def _separated(clusters: list[tuple[complex, int]], scale: float) -> bool:
    if any(multiplicity > 1 for _, multiplicity in clusters):
        return False
    values = [value for value, _ in clusters]
    gaps = [
        abs(x - y) for i, x in enumerate(values) for y in values[i + 1 :]
    ]
    return not gaps or min(gaps) > SPECTRAL_SEPARATION * scale


def expm_spectral(m: CMatrix, tol=Tolerances.DEFAULT) -> CMatrix:
    """``V diag(e^λ) V^-1`` with eigenvectors from the null spaces of ``m - λI``.

    Only valid when ``m`` has n distinct eigenvalues.
    """
    n = m.n
    values = [value for value, _ in eigen_clusters(m, tol)]
    if len(values) != n:
        raise ValueError("expm_spectral needs n distinct eigenvalues")
    vectors = []
    for value in values:
        _, _, vh = np.linalg.svd(m.data - value * np.eye(n))
        vectors.append(vh[-1].conj())
    v = np.column_stack(vectors)
    scaled = v * np.array([cmath.exp(value) for value in values])
    # X V = V D  <=>  V^T X^T = (V D)^T
    return CMatrix(np.linalg.solve(v.T, scaled.T).T)


def expm_jordan(m: CMatrix, tol=Tolerances.DEFAULT) -> CMatrix:
    """``exp(S) exp(N)`` from the Jordan-Chevalley decomposition ``m = S + N``."""
    n = m.n
    identity = np.eye(n, dtype=np.complex128)
    projectors = _spectral_projectors(m, tol)
    exp_s = sum(cmath.exp(value) * p for value, _, p in projectors)
    s = sum(value * p for value, _, p in projectors)
    nil = m.data - s
    # nil**n == 0, so the series stops at the square for n <= 3
    exp_n = identity + nil + nil @ nil / 2
    return CMatrix(exp_s @ exp_n)


def expm(m: CMatrix, tol=Tolerances.DEFAULT) -> CMatrix:
    """Matrix exponential.

    The eigenvector formula is used when the spectrum is well separated, the
    Jordan-Chevalley formula otherwise.

    Parameters
    ----------
    m : CMatrix
        The argument.
    tol : :class:`Tolerances`, optional
        Thresholds for eigenvalue clustering. Default is Tolerances.DEFAULT.

    Returns
    -------
    CMatrix
        ``exp(m)``.

    Raises
    ------
    OutOfRangeError
        If an eigenvalue has real part above EXP_REAL_LIMIT, or the result
        overflows anyway.
    """
    if m.max_norm() == 0:
        return CMatrix.identity(m.n)
    clusters = eigen_clusters(m, tol)
    largest = max(value.real for value, _ in clusters)
    if largest > EXP_REAL_LIMIT:
        raise OutOfRangeError(
            f"e^m overflows: an eigenvalue has real part {largest:.6g}"
        )
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            if _separated(clusters, m.scale()):
                return expm_spectral(m, tol)
            logger.debug("expm: Jordan path for clusters %s", clusters)
            return expm_jordan(m, tol)
    except (NonFiniteError, OverflowError) as exc:
        raise OutOfRangeError("e^m does not fit in double precision") from exc


def real_shift(m: CMatrix) -> float:
    """``Re tr(m) / n``. Subtracting it from ``m`` scales ``e^m`` by ``e^-c > 0``."""
    return m.trace().real / m.n


def centered(m: CMatrix) -> CMatrix:
    """``m - cI`` with ``c = real_shift(m)``; its eigenvalue real parts sum to 0."""
    return m - CMatrix.identity(m.n) * real_shift(m)


def principal_log(z: complex, tol=Tolerances.DEFAULT) -> complex:
    """Principal branch with imaginary part in (-π, π]; -π within eps_eig goes to +π."""
    if z == 0:
        raise SingularMatrixError("logarithm of zero")
    w = cmath.log(z)
    if abs(w.imag + math.pi) <= tol.eps_eig:
        w = complex(w.real, math.pi)
    return w


def two_pi_i_part(z: complex, tol=Tolerances.DEFAULT) -> complex:
    """``z - principal_log(e^z)``, read off ``Im z`` without evaluating ``e^z``.

    Follows the same branch convention as :func:`principal_log`, so it agrees
    with it wherever ``e^z`` is a normal nonzero double.

    Examples
    --------
    ``3iπ`` gives ``2iπ``; ``-800 - iπ`` gives ``-2iπ``.
    """
    k = math.ceil((z.imag - math.pi - tol.eps_eig) / (2 * math.pi))
    return complex(0.0, 2 * math.pi * k)


def logm_principal(m: CMatrix, tol=Tolerances.DEFAULT) -> CMatrix:
    """Principal matrix logarithm as a primary matrix function.

    On each generalized eigenspace of eigenvalue z the Taylor terms
    ``log(z)``, ``1/z`` and ``-1/(2 z**2)`` are applied to the nilpotent part.

    Raises
    ------
    SingularMatrixError
        If ``m`` has an eigenvalue at zero.
    """
    s = singular_values(m)
    if s[-1] <= np.finfo(float).eps * s[0]:
        raise SingularMatrixError("logm_principal needs an invertible matrix")
    n = m.n
    identity = np.eye(n, dtype=np.complex128)
    result = np.zeros((n, n), dtype=np.complex128)
    for value, _, p in _spectral_projectors(m, tol):
        if value == 0:
            raise SingularMatrixError("logm_principal: eigenvalue at zero")
        nil = (m.data - value * identity) @ p
        result += (
            principal_log(value, tol) * p
            + nil / value
            - nil @ nil / (2 * value * value)
        )
    return CMatrix(result)


def poly_in_matrix_witness(p: CMatrix, of: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """Whether ``p`` lies in the unital algebra generated by ``of``.

    Least squares in the basis ``I, X, ..., X**(n-1)`` of normalized powers;
    accepted when the residual is below ``eps_eig`` relative to ``||p||``.
    """
    if p.n != of.n:
        raise DimensionError(f"dimension mismatch: {p.n} vs {of.n}")
    n = of.n
    x = of.data / of.scale()
    columns = [np.linalg.matrix_power(x, k).ravel() for k in range(n)]
    basis = np.column_stack(columns)
    target = p.data.ravel()
    coeffs, *_ = np.linalg.lstsq(basis, target, rcond=None)
    residual = np.linalg.norm(basis @ coeffs - target)
    return bool(residual <= tol.eps_eig * (1.0 + np.linalg.norm(target)))


def log_split(m: CMatrix, tol=Tolerances.DEFAULT) -> LogSplit:
    """``F = log(e^m)`` with the principal branch and ``Δ = m - F``.

    Examples
    --------
    ``diag(3iπ, 0, 0)`` splits into ``diag(iπ, 0, 0)`` and ``diag(2iπ, 0, 0)``.
    """
    # log(e^-c X) = log(X) - c for real c, so the shift leaves the branch alone
    shift = real_shift(m)
    identity = CMatrix.identity(m.n)
    f = logm_principal(expm(m - identity * shift, tol), tol) + identity * shift
    return LogSplit(f, m - f)


def branch_cut_flag(m: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """True when ``m`` has a defective eigenvalue on the closed negative real axis.

    The principal log is still computed there, but its accuracy is not guaranteed.
    """
    scale = m.scale()
    for value, multiplicity, p in _spectral_projectors(m, tol):
        if multiplicity < 2:
            continue
        on_axis = value.real < 0 and abs(value.imag) <= tol.eps_eig * scale
        nil = (m.data - value * np.eye(m.n)) @ p
        if on_axis and np.max(np.abs(nil)) > tol.eps_entry * scale:
            return True
    return False


def log_part_form(
    f: CMatrix, tol=Tolerances.DEFAULT
) -> tuple[LogPartForm, complex | None]:
    """Classifies ``f`` after shifting away its repeated eigenvalue.

    Returns
    -------
    tuple[LogPartForm, complex | None]
        The shape and the shift σ that was removed (None for OTHER).
    """
    clusters = eigen_clusters(f, tol)
    repeated = [value for value, multiplicity in clusters if multiplicity >= 2]
    if not repeated:
        return LogPartForm.OTHER, None
    sigma = repeated[0]
    shifted = f - CMatrix.identity(f.n) * sigma
    reference = f.max_norm()
    if shifted.is_zero(tol, reference):
        return LogPartForm.ZERO, sigma
    if (shifted @ shifted).is_zero(tol, reference**2):
        return LogPartForm.SQUARE_ZERO, sigma
    if is_diagonalizable(shifted, tol) and len(clusters) == 2:
        return LogPartForm.SPLIT, sigma
    return LogPartForm.OTHER, sigma


def commutes(a: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """``ab == ba`` entrywise, relative to the size of the products."""
    reference = a.max_norm() * b.max_norm() * a.n
    return commutator(a, b).is_zero(tol, reference)

