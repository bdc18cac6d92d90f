from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, fields

import numpy as np

from commexp.constants import TWO_PI_I, Sampling, Tolerances
from commexp.errors import GenerationError, PreconditionError
from commexp.m_analysis.m_analysis import AnalysisReport, StarDecomp, star_verify
from commexp.m_matrix.m_matrix import CMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpectedFacts:
    """Facts asserted about a catalog pair; None means "not asserted"."""

    commute: bool | None = None
    triple_equal: bool | None = None
    has_property_L: bool | None = None
    simultaneously_triangularizable: bool | None = None
    indecomposable: bool | None = None
    condition3: bool | None = None
    exceptional: tuple[int, ...] | None = None

    def asserted(self) -> dict[str, object]:
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if getattr(self, f.name) is not None
        }

    def mismatches(self, report: AnalysisReport) -> list[str]:
        """Names and values of every asserted fact the report contradicts."""
        found = []
        for name, expected in self.asserted().items():
            actual = getattr(report, name)
            if name == "exceptional":
                actual = actual.members
            if actual != expected:
                found.append(f"{name}: expected {expected}, got {actual}")
        return found


@dataclass(frozen=True)
class NamedPair:
    name: str
    a: CMatrix
    b: CMatrix
    expected: ExpectedFacts
    description: str = ""


class Catalog(Sequence[NamedPair]):
    """The fixed example pairs, indexable by position or by name."""

    def __init__(self, entries: Sequence[NamedPair]):
        self._entries = tuple(entries)
        self._by_name = {entry.name: entry for entry in self._entries}

    def __getitem__(self, key):
        if isinstance(key, str):
            return self._by_name[key]
        return self._entries[key]

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[NamedPair]:
        return iter(self._entries)

    def __contains__(self, key) -> bool:
        if isinstance(key, str):
            return key in self._by_name
        return key in self._entries

    def names(self) -> list[str]:
        return [entry.name for entry in self._entries]


def _two_pi_i(values) -> np.ndarray:
    # 2iπ * k built as complex(0, 2πk) so that zero entries stay +0.0
    data = np.asarray(values, dtype=float)
    to_complex = np.vectorize(
        lambda k: complex(0.0, 2.0 * math.pi * k), otypes=[complex]
    )
    return to_complex(data)


def tu_pair() -> tuple[CMatrix, CMatrix]:
    """The non-simultaneously-triangularizable pair with ``e^{tA+B} = I`` for every t."""
    a0 = CMatrix(np.diag(_two_pi_i([1, 2, 0])))
    b0 = CMatrix(_two_pi_i([[2, 1, 1], [1, 3, -2], [1, 1, 0]]))
    return a0, b0


def catalog() -> Catalog:
    """Returns the named example pairs together with the facts known about them.

    Returns
    -------
    Catalog
        Contains at least "tu", "tu-scaled" and "dim2-remark".
    """
    a0, b0 = tu_pair()
    entries = [
        NamedPair(
            "tu",
            a0,
            b0,
            ExpectedFacts(
                commute=False,
                triple_equal=True,
                has_property_L=True,
                simultaneously_triangularizable=False,
                indecomposable=True,
                condition3=True,
                exceptional=(),
            ),
            "every exponential of tA0 + B0 is the identity",
        ),
        NamedPair(
            "tu-scaled",
            a0,
            b0 * -2,
            ExpectedFacts(
                commute=False,
                triple_equal=True,
                has_property_L=True,
                indecomposable=True,
                condition3=True,
                exceptional=(2, 3, 4),
            ),
            "tA0 - 2B0 is not diagonalizable for t in {2, 3, 4}",
        ),
        NamedPair(
            "tu-shifted",
            a0 + CMatrix.identity(3) * complex(1.0, 0.5),
            b0 - CMatrix.identity(3) * 0.25,
            ExpectedFacts(
                commute=False,
                triple_equal=True,
                has_property_L=True,
                simultaneously_triangularizable=False,
                condition3=True,
                exceptional=(),
            ),
            "scalar shifts multiply every side of the identity by the same factor",
        ),
        NamedPair(
            "dim2-remark",
            CMatrix(np.diag([complex(0.0, math.pi), complex(0.0, -math.pi)])),
            CMatrix(
                [
                    [complex(0.0, -11.0 * math.pi), complex(6.0 * math.pi, 0.0)],
                    [complex(16.0 * math.pi, 0.0), complex(0.0, 11.0 * math.pi)],
                ]
            ),
            ExpectedFacts(
                commute=False,
                triple_equal=True,
                has_property_L=False,
                simultaneously_triangularizable=False,
                condition3=False,
            ),
            "equal exponentials without property L",
        ),
        NamedPair(
            "dim2-normal-form",
            CMatrix(np.diag(_two_pi_i([1, 0]))),
            CMatrix([[complex(0.0, -6.0 * math.pi), 1.0], [0.0, 0.0]]),
            ExpectedFacts(
                commute=False,
                triple_equal=True,
                has_property_L=True,
                simultaneously_triangularizable=True,
                condition3=True,
                exceptional=(3,),
            ),
            "2 x 2 normal form; the identity fails only at t = -mu/lambda",
        ),
    ]
    return Catalog(entries)


def _unit_disk(rng: np.random.Generator, size) -> np.ndarray:
    radius = np.sqrt(rng.uniform(size=size))
    return radius * np.exp(2j * math.pi * rng.uniform(size=size))


def _nonzero(rng: np.random.Generator, sampling: Sampling._DefaultSampling) -> complex:
    radius = rng.uniform(sampling.min_radius, sampling.max_radius)
    return complex(radius * np.exp(2j * math.pi * rng.uniform()))


def _integers(
    rng: np.random.Generator, count: int, sampling: Sampling._DefaultSampling
) -> list[int]:
    # distinct integers in [-range, range]
    span = 2 * sampling.integer_range + 1
    draw = rng.choice(span, count, replace=False)
    return [int(k) - sampling.integer_range for k in draw]


def _integer(rng: np.random.Generator, sampling: Sampling._DefaultSampling) -> int:
    return int(rng.integers(-sampling.integer_range, sampling.integer_range + 1))


def well_conditioned(
    rng: np.random.Generator, n: int, sampling=Sampling.DEFAULT
) -> np.ndarray:
    """A random complex matrix with condition number at most ``sampling.max_condition``.

    Raises
    ------
    GenerationError
        If no draw qualifies within ``sampling.max_rounds`` attempts.
    """
    for attempt in range(sampling.max_rounds):
        p = _unit_disk(rng, (n, n))
        if np.linalg.cond(p) <= sampling.max_condition:
            return p
        logger.debug("similarity rejected at round %d", attempt)
    raise GenerationError(
        f"no matrix with condition number <= {sampling.max_condition} "
        f"after {sampling.max_rounds} rounds"
    )


def _conjugate(p: np.ndarray, x: np.ndarray) -> np.ndarray:
    # p x p^-1 through a solve: (p x) p^-1 = y  <=>  p^T y^T = (p x)^T
    return np.linalg.solve(p.T, (p @ x).T).T


def _check_dimension(n: int, allowed: tuple[int, ...]) -> None:
    if n not in allowed:
        raise PreconditionError(f"dimension must be one of {allowed}, got {n}")


def gen_st_pair(
    n: int, seed: int, scale: float = 1.0, sampling=Sampling.DEFAULT
) -> tuple[CMatrix, CMatrix]:
    """``(P T1 P^-1, P T2 P^-1)`` for random upper-triangular T1, T2.

    Parameters
    ----------
    n : int
        Dimension, 2 or 3.
    seed : int
        Seed of the generator; equal seeds give equal pairs.
    scale : float, optional
        Multiplies both triangular factors; 0 gives the zero pair. Default is 1.
    sampling : :class:`Sampling`, optional
        Default is Sampling.DEFAULT.
    """
    _check_dimension(n, (2, 3))
    rng = np.random.default_rng(seed)
    t1 = np.triu(_unit_disk(rng, (n, n))) * scale
    t2 = np.triu(_unit_disk(rng, (n, n))) * scale
    p = well_conditioned(rng, n, sampling)
    return CMatrix(_conjugate(p, t1)), CMatrix(_conjugate(p, t2))


def gen_prop21_pair(
    n: int, seed: int, sampling=Sampling.DEFAULT
) -> tuple[CMatrix, CMatrix]:
    """A diagonal A and an upper-triangular B, both with distinct spectra in 2iπℤ.

    Draws where two diagonal entries of ``tA + B`` meet at a positive integer t
    are rejected, so the pair satisfies the identity for every t.
    """
    _check_dimension(n, (2, 3))
    rng = np.random.default_rng(seed)
    for attempt in range(sampling.max_rounds):
        ks = _integers(rng, n, sampling)
        ms = _integers(rng, n, sampling)
        collides = any(
            (ms[j] - ms[i]) % (ks[i] - ks[j]) == 0
            and (ms[j] - ms[i]) // (ks[i] - ks[j]) >= 1
            for i in range(n)
            for j in range(i + 1, n)
        )
        if collides:
            logger.debug("prop21 draw rejected at round %d: %s / %s", attempt, ks, ms)
            continue
        a = np.diag(_two_pi_i(ks))
        b = np.diag(_two_pi_i(ms)) + np.triu(_unit_disk(rng, (n, n)), 1) * 2 * math.pi
        return CMatrix(a), CMatrix(b)
    raise GenerationError(f"no collision-free draw after {sampling.max_rounds} rounds")


def _star_branch_degenerate(rng, sampling):
    a0, b0 = tu_pair()
    zero = np.zeros((3, 3), dtype=np.complex128)
    return a0.data, b0.data, zero, zero.copy()


def _star_branch_parallel(rng, sampling):
    # G parallel to F; Θ couples the repeated block to the third coordinate on one side
    k, m = _integers(rng, 2, sampling)
    a_int, c_int = _integers(rng, 2, sampling)
    while a_int - c_int == m - k:
        a_int, c_int = _integers(rng, 2, sampling)
    a, theta33 = complex(TWO_PI_I * a_int), complex(TWO_PI_I * c_int)
    coupling = _nonzero(rng, sampling)
    theta = np.diag([a, a, theta33])
    if rng.uniform() < 0.5:
        theta[0, 2] = coupling
    else:
        theta[2, 1] = coupling
    delta = np.diag(_two_pi_i([k, k, m]))
    f = np.zeros((3, 3), dtype=np.complex128)
    g = np.zeros((3, 3), dtype=np.complex128)
    f[0, 1] = _nonzero(rng, sampling)
    g[0, 1] = _nonzero(rng, sampling)
    return delta, theta, f, g


def _star_branch_coupled(rng, sampling):
    # G has an E13 component; [F,Θ] = [Δ,G] and ΘG = GΘ then fix Θ[1, 2] and G[0, 1]
    k, m = _integers(rng, 2, sampling)
    j = 0
    while j in (0, m - k):
        j = _integer(rng, sampling)
    f12 = _nonzero(rng, sampling)
    g13 = _nonzero(rng, sampling)
    theta33 = complex(TWO_PI_I * _integer(rng, sampling))
    a = theta33 + TWO_PI_I * j
    theta = np.diag([a, a, theta33]).astype(np.complex128)
    theta[0, 2] = _unit_disk(rng, 1)[0]
    theta[1, 2] = TWO_PI_I * (k - m) * g13 / f12
    delta = np.diag(_two_pi_i([k, k, m]))
    f = np.zeros((3, 3), dtype=np.complex128)
    g = np.zeros((3, 3), dtype=np.complex128)
    f[0, 1] = f12
    g[0, 1] = j * f12 / (k - m)
    g[0, 2] = g13
    return delta, theta, f, g


_STAR_BRANCHES = (_star_branch_degenerate, _star_branch_parallel, _star_branch_coupled)


def gen_star_pair(
    seed: int, sampling=Sampling.DEFAULT, tol=Tolerances.DEFAULT
) -> tuple[CMatrix, CMatrix, StarDecomp]:
    """A 3 x 3 pair built from a property (*) decomposition.

    One of three families is drawn: the degenerate one (Tu's matrices, F = G = 0),
    G parallel to F, or G with a component coupling to the third coordinate. A
    random well-conditioned similarity is then applied to Δ, Θ, F and G, and the
    scalars σ and τ are drawn from the unit disk, where the principal log
    recovers them.

    Returns
    -------
    tuple[CMatrix, CMatrix, StarDecomp]
        ``A = σI + Δ + F``, ``B = τI + Θ + G`` and the decomposition itself.

    Raises
    ------
    GenerationError
        If no draw passes :func:`star_verify` within ``sampling.max_rounds`` rounds.
    """
    rng = np.random.default_rng(seed)
    identity = np.eye(3, dtype=np.complex128)
    for attempt in range(sampling.max_rounds):
        branch = _STAR_BRANCHES[int(rng.integers(len(_STAR_BRANCHES)))]
        delta, theta, f, g = branch(rng, sampling)
        q = well_conditioned(rng, 3, sampling)
        delta, theta, f, g = (_conjugate(q, x) for x in (delta, theta, f, g))
        sigma, tau = (complex(z) for z in _unit_disk(rng, 2))
        decomposition = StarDecomp(
            sigma, tau, CMatrix(delta), CMatrix(theta), CMatrix(f), CMatrix(g)
        )
        a = CMatrix(sigma * identity + delta + f)
        b = CMatrix(tau * identity + theta + g)
        if star_verify(decomposition, a, b, tol):
            return a, b, decomposition
        logger.debug("star draw from %s rejected at round %d", branch.__name__, attempt)
    raise GenerationError(f"no verified star pair after {sampling.max_rounds} rounds")


def gen_commuting_pair(n: int, seed: int) -> tuple[CMatrix, CMatrix]:
    """``(X, p(X))`` for a random X and a random cubic p."""
    _check_dimension(n, (1, 2, 3))
    rng = np.random.default_rng(seed)
    x = _unit_disk(rng, (n, n))
    coefficients = _unit_disk(rng, 4)
    y = sum(c * np.linalg.matrix_power(x, k) for k, c in enumerate(coefficients))
    return CMatrix(x), CMatrix(y)


def gen_random_pair(n: int, seed: int, scale: float = 1.0) -> tuple[CMatrix, CMatrix]:
    """Two unrelated matrices with entries in the disk of radius ``scale``."""
    _check_dimension(n, (1, 2, 3))
    rng = np.random.default_rng(seed)
    return (
        CMatrix(_unit_disk(rng, (n, n)) * scale),
        CMatrix(_unit_disk(rng, (n, n)) * scale),
    )


def gen_band_matrix(n: int, seed: int, sampling=Sampling.DEFAULT) -> CMatrix:
    """A matrix whose eigenvalues have imaginary parts in (-3, 3).

    Such a spectrum lies inside the principal band and is 2iπ congruence-free,
    so the principal log inverts the exponential on it.
    """
    _check_dimension(n, (1, 2, 3))
    rng = np.random.default_rng(seed)
    spectrum = rng.uniform(-1.0, 1.0, n) + 1j * rng.uniform(-3.0, 3.0, n)
    t = np.diag(spectrum) + np.triu(_unit_disk(rng, (n, n)), 1)
    p = well_conditioned(rng, n, sampling)
    return CMatrix(_conjugate(p, t))
