from __future__ import annotations

import logging
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from commexp.constants import DEFAULT_T_MAX, Tolerances
from commexp.errors import InvariantViolation, OutOfRangeError, PreconditionError
from commexp.m_function.m_function import (
    LogPartForm,
    branch_cut_flag,
    centered,
    commutes,
    expm,
    jordan_chevalley,
    log_part_form,
    log_split,
    two_pi_i_part,
)
from commexp.m_matrix.m_matrix import (
    CMatrix,
    check_same_dimension,
    commutator,
    eigen_clusters,
    eigenvalues,
)
from commexp.m_spectral.m_spectral import (
    EigenPairing,
    commutant_basis,
    is_2pi_cf,
    is_indecomposable,
    is_st_heuristic,
    pairing_holds,
    property_L,
)
from commexp.utils.utils import frobenius, nearest_positive_integer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StarDecomp:
    """``A = σI + Δ + F`` and ``B = τI + Θ + G`` in property (*) form."""

    sigma: complex
    tau: complex
    delta: CMatrix
    theta: CMatrix
    f: CMatrix
    g: CMatrix


@dataclass(frozen=True)
class SweepRecord:
    t: int
    deviation: float
    passed: bool


@dataclass(frozen=True)
class ExceptionalSet:
    """Positive integers t where ``e^{tA+B} = e^{tA} e^B = e^B e^{tA}`` fails.

    Attributes
    ----------
    members : tuple[int, ...]
        Failing t, sorted.
    sweep_bound : int
        Every t in ``[1, sweep_bound]`` was checked.
    complete : bool
        True when no failure can exist outside the checked values.
    candidates : tuple[int, ...]
        Positive integers where two paired eigenvalues of ``tA + B`` collide.
    persistent_pairs : tuple[tuple[int, int], ...]
        Index pairs whose 2iπℤ parts coincide in both A and B, so that the
        eigenvalue of ``tΔ + Θ`` they carry is repeated for every t.
    """

    members: tuple[int, ...]
    sweep_bound: int
    complete: bool
    candidates: tuple[int, ...] = ()
    persistent_pairs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class AnalysisReport:
    commute: bool
    triple_equal: bool
    has_property_L: bool
    pairing: tuple[int, ...] | None
    simultaneously_triangularizable: bool
    indecomposable: bool
    commutant_dim: int
    condition3: bool
    exceptional: ExceptionalSet
    star: StarDecomp | None
    spectra_cf: tuple[bool, bool]
    consistent: bool
    notes: tuple[str, ...] = ()
    tolerances: dict[str, float] = field(default_factory=dict)
    sweep_bound: int = DEFAULT_T_MAX


def _deviation(
    a0: CMatrix, b0: CMatrix, exp_b: np.ndarray, tol: Tolerances._DefaultTolerances
) -> float:
    # a0 and b0 are centered, and exp_b = e^b0
    exp_a = expm(a0, tol).data
    with np.errstate(over="ignore", invalid="ignore"):
        products = (expm(a0 + b0, tol).data, exp_a @ exp_b, exp_b @ exp_a)
        if not all(np.all(np.isfinite(x)) for x in products):
            raise OutOfRangeError("e^tA e^B overflows even after centering")
    peak = max(float(np.max(np.abs(x))) for x in products)
    products = tuple(x / peak for x in products)
    largest = max(frobenius(x) for x in products)
    spread = max(
        frobenius(products[i] - products[j]) for i in range(3) for j in range(i + 1, 3)
    )
    return spread / largest


def exp_identity_deviation(a_t: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> float:
    """Largest pairwise distance between ``e^{a+b}``, ``e^a e^b`` and ``e^b e^a``.

    Frobenius distances, divided by the largest of the three norms. Both
    arguments are first shifted by :func:`real_shift`; this multiplies the three
    products by one positive factor, so the ratio is unchanged while the
    exponentials stay in range.

    Raises
    ------
    OutOfRangeError
        If a product overflows even after the shift.
    """
    check_same_dimension(a_t, b)
    b0 = centered(b)
    return _deviation(centered(a_t), b0, expm(b0, tol).data, tol)


def _identity_holds(
    a_t: CMatrix, b: CMatrix, deviation: float, tol: Tolerances._DefaultTolerances
) -> bool:
    # the condition number of exp grows with the norm of its argument
    return deviation <= tol.eps_entry * (1.0 + (a_t + b).fro_norm())


def exp_triple_equal(a: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """Whether ``e^{a+b}``, ``e^a e^b`` and ``e^b e^a`` agree.

    Examples
    --------
    Both Tu matrices exponentiate to the identity, and so does their sum.
    """
    return _identity_holds(a, b, exp_identity_deviation(a, b, tol), tol)


def _sweep_one(
    a: CMatrix, b: CMatrix, t: int, b0: CMatrix, exp_b: np.ndarray, tol
) -> SweepRecord:
    a_t = a * t
    deviation = _deviation(centered(a_t), b0, exp_b, tol)
    return SweepRecord(t, deviation, _identity_holds(a_t, b, deviation, tol))


def sweep_records(
    a: CMatrix,
    b: CMatrix,
    ts: Iterable[int],
    tol=Tolerances.DEFAULT,
    workers: int = 1,
) -> list[SweepRecord]:
    """Evaluates the exponential identity for ``(tA, B)`` at every t of ``ts``.

    Parameters
    ----------
    a, b : CMatrix
        The pair.
    ts : Iterable[int]
        Values of t; duplicates are dropped.
    tol : :class:`Tolerances`, optional
        Default is Tolerances.DEFAULT.
    workers : int, optional
        Size of the thread pool; 1 runs inline. Default is 1.

    Returns
    -------
    list[SweepRecord]
        One record per t, sorted by t whatever the execution order.
    """
    check_same_dimension(a, b)
    values = sorted(set(int(t) for t in ts))
    if not values:
        return []
    b0 = centered(b)
    exp_b = expm(b0, tol).data

    def one(t: int) -> SweepRecord:
        return _sweep_one(a, b, t, b0, exp_b, tol)

    if workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, values))
    else:
        records = [one(t) for t in values]
    return sorted(records, key=lambda r: r.t)


def max_sweep_deviation(records: Iterable[SweepRecord]) -> float:
    return max((r.deviation for r in records), default=0.0)


def _failures(records: Iterable[SweepRecord], t_max: int) -> ExceptionalSet:
    members = tuple(r.t for r in records if not r.passed and r.t <= t_max)
    return ExceptionalSet(members, t_max, complete=False)


def condition1_sweep(
    a: CMatrix,
    b: CMatrix,
    t_max: int = DEFAULT_T_MAX,
    tol=Tolerances.DEFAULT,
    workers: int = 1,
) -> ExceptionalSet:
    """Failures of the exponential identity for t in ``[1, t_max]``; never complete."""
    if t_max < 1:
        raise PreconditionError(f"t_max must be at least 1, got {t_max}")
    return _failures(sweep_records(a, b, range(1, t_max + 1), tol, workers), t_max)


def _crossings(
    pairs: list[tuple[complex, complex]], threshold: float, eps: float
) -> tuple[set[int], list[tuple[int, int]]]:
    # positive integers t with t x_i + y_i == t x_j + y_j, and the pairs equal for all t
    crossings: set[int] = set()
    persistent: list[tuple[int, int]] = []
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            (x_i, y_i), (x_j, y_j) = pairs[i], pairs[j]
            if abs(x_i - x_j) <= threshold:
                if abs(y_i - y_j) <= threshold:
                    persistent.append((i, j))
                continue
            k = nearest_positive_integer((y_j - y_i) / (x_i - x_j), eps)
            if k is not None:
                crossings.add(k)
    return crossings, persistent


def collision_candidates(
    pairing: EigenPairing, tol=Tolerances.DEFAULT
) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
    """Positive integers t where two paired eigenvalues of ``tΔ + Θ`` meet.

    ``Δ`` and ``Θ`` are the 2iπℤ parts of the log splittings of A and B; their
    eigenvalues are ``δ = λ - log(e^λ)`` and ``θ = μ - log(e^μ)`` for the paired
    λ, μ, computed by :func:`two_pi_i_part` so that no exponential is taken.

    Returns
    -------
    tuple[tuple[int, ...], tuple[tuple[int, int], ...]]
        The sorted candidates, and the index pairs whose ``(δ, θ)`` coincide, so
        that ``tΔ + Θ`` repeats an eigenvalue for every t.
    """
    integer_parts = [
        (two_pi_i_part(x, tol), two_pi_i_part(y, tol)) for x, y in pairing.pairs()
    ]
    scale = max([1.0] + [max(abs(x), abs(y)) for x, y in integer_parts])
    crossings, persistent = _crossings(integer_parts, tol.eps_eig * scale, tol.eps_eig)
    return tuple(sorted(crossings)), tuple(persistent)


def exceptional_set_solver(
    a: CMatrix,
    b: CMatrix,
    pairing: EigenPairing,
    t_max: int = DEFAULT_T_MAX,
    tol=Tolerances.DEFAULT,
    workers: int = 1,
    records: Iterable[SweepRecord] = (),
) -> ExceptionalSet:
    """The exceptional set of a pair with property L and ``e^{A+B} = e^A e^B = e^B e^A``.

    Under these hypotheses the identity holds at t exactly when ``e^{tΔ+Θ} = I``,
    that is when ``tΔ + Θ`` is diagonalizable. It can only stop being so where
    two of its paired eigenvalues meet at that t alone: on a persistent pair the
    rank of ``t(Δ - δI) + (Θ - θI)`` is already minimal for almost all t, hence
    for all t. The candidates are checked together with every t in ``[1, t_max]``,
    and the result is complete.

    Parameters
    ----------
    records : Iterable[SweepRecord], optional
        Results already computed for this pair and ``tol``, typically by
        :func:`sweep_records` over ``[1, t_max]``; only the values of t they
        do not cover are evaluated.

    Raises
    ------
    PreconditionError
        If the pairing does not hold or the exponentials do not agree.
    """
    check_same_dimension(a, b)
    if t_max < 1:
        raise PreconditionError(f"t_max must be at least 1, got {t_max}")
    if not pairing_holds(a, b, pairing, tol):
        raise PreconditionError("the pairing does not realize property L")
    known = {r.t: r for r in records}
    if 1 not in known:
        known.update((r.t, r) for r in sweep_records(a, b, [1], tol))
    if not known[1].passed:
        raise PreconditionError("e^(A+B), e^A e^B and e^B e^A differ")

    candidates, persistent = collision_candidates(pairing, tol)
    ts = set(range(1, t_max + 1)) | set(candidates)
    missing = ts - set(known)
    known.update((r.t, r) for r in sweep_records(a, b, missing, tol, workers))
    members = tuple(t for t in sorted(ts) if not known[t].passed)
    logger.debug(
        "collision candidates %s, persistent pairs %s, %d of %d values reused",
        candidates,
        persistent,
        len(ts) - len(missing),
        len(ts),
    )
    return ExceptionalSet(
        members,
        t_max,
        complete=True,
        candidates=candidates,
        persistent_pairs=persistent,
    )


def condition3_verdict(a: CMatrix, b: CMatrix, tol=Tolerances.DEFAULT) -> bool:
    """Exponential identity at t = 1 together with property L."""
    return exp_triple_equal(a, b, tol) and property_L(a, b, tol) is not None


def _close(
    x: CMatrix, y: CMatrix, tol: Tolerances._DefaultTolerances, reference: float
) -> bool:
    return (x - y).is_zero(tol, reference)


def star_verify(
    d: StarDecomp,
    a: CMatrix,
    b: CMatrix,
    tol=Tolerances.DEFAULT,
) -> bool:
    """Checks every property (*) relation of ``d`` against the pair.

    When all of them hold, the exponential identity must hold too.

    Raises
    ------
    PreconditionError
        If the matrices are not 3 x 3.
    InvariantViolation
        If the relations hold but the exponentials disagree.
    """
    check_same_dimension(a, b)
    if a.n != 3:
        raise PreconditionError("property (*) is defined for 3 x 3 matrices")
    identity = CMatrix.identity(3)
    f, g, delta, theta = d.f, d.g, d.delta, d.theta
    nf, ng, nd, nt = (x.fro_norm() for x in (f, g, delta, theta))

    square_zero = all(
        (x @ y).is_zero(tol, norm)
        for x, y, norm in (
            (f, f, nf * nf),
            (g, g, ng * ng),
            (f, g, nf * ng),
            (g, f, nf * ng),
        )
    )
    unit_exponentials = all(
        _close(expm(x, tol), identity, tol, x.fro_norm())
        for x in (delta, theta, delta + theta)
    )
    mixed = _close(commutator(f, theta), commutator(delta, g), tol, nf * nt + nd * ng)
    commuting = commutator(delta, f).is_zero(tol, nd * nf) and commutator(
        theta, g
    ).is_zero(tol, nt * ng)
    reconstructs = _close(
        identity * d.sigma + delta + f, a, tol, a.fro_norm()
    ) and _close(identity * d.tau + theta + g, b, tol, b.fro_norm())

    verified = all(
        (square_zero, unit_exponentials, mixed, commuting, reconstructs)
    )
    if not verified:
        logger.debug(
            "star_verify: square_zero=%s unit_exp=%s mixed=%s commuting=%s "
            "reconstructs=%s",
            square_zero,
            unit_exponentials,
            mixed,
            commuting,
            reconstructs,
        )
        return False
    if not exp_triple_equal(a, b, tol):
        raise InvariantViolation(
            "property (*) holds but the exponential identity does not"
        )
    return True


def star_jordan_chevalley_check(
    d: StarDecomp,
    a: CMatrix,
    b: CMatrix,
    tol=Tolerances.DEFAULT,
) -> bool:
    """The Jordan-Chevalley parts of A, B and A + B are read off the decomposition."""
    identity = CMatrix.identity(a.n)
    expected = (
        (a, identity * d.sigma + d.delta, d.f),
        (b, identity * d.tau + d.theta, d.g),
        (a + b, identity * (d.sigma + d.tau) + d.delta + d.theta, d.f + d.g),
    )
    for m, semisimple, nilpotent in expected:
        jc = jordan_chevalley(m, tol)
        reference = m.fro_norm()
        if not (
            _close(jc.semisimple, semisimple, tol, reference)
            and _close(jc.nilpotent, nilpotent, tol, reference)
        ):
            return False
    return True


def _star_part(
    m: CMatrix, tol: Tolerances._DefaultTolerances
) -> tuple[complex, CMatrix, CMatrix, LogPartForm] | None:
    # returns (shift, semisimple remainder, nilpotent part, shape of the log part)
    log_part = log_split(m, tol).f
    clusters = eigen_clusters(log_part, tol)
    repeated = [value for value, multiplicity in clusters if multiplicity >= 2]
    form, _ = log_part_form(log_part, tol)
    if not repeated:
        return None
    shift = repeated[0]
    identity = CMatrix.identity(m.n)
    nilpotent = log_part - identity * shift
    return shift, m - identity * shift - nilpotent, nilpotent, form


def star_decompose(
    a: CMatrix,
    b: CMatrix,
    tol=Tolerances.DEFAULT,
    notes: list[str] | None = None,
) -> StarDecomp | None:
    """Property (*) form of an indecomposable non-commuting 3 x 3 pair.

    The log part ``F' = log(e^A)`` has an eigenvalue σ of multiplicity at least 2;
    ``F = F' - σI`` and ``Δ = A - σI - F``, and likewise for B.

    Parameters
    ----------
    a, b : CMatrix
        3 x 3 pair with ``AB != BA``, ``e^{A+B} = e^A e^B = e^B e^A`` and an
        indecomposable module structure.
    tol : :class:`Tolerances`, optional
        Default is Tolerances.DEFAULT.
    notes : list[str], optional
        Receives diagnostics when the decomposition is abandoned.

    Returns
    -------
    StarDecomp | None
        The decomposition, or None when it cannot be confirmed numerically.

    Raises
    ------
    PreconditionError
        If one of the hypotheses fails.
    """
    check_same_dimension(a, b)
    if a.n != 3:
        raise PreconditionError("star_decompose needs 3 x 3 matrices")
    if not exp_triple_equal(a, b, tol):
        raise PreconditionError("e^(A+B), e^A e^B and e^B e^A differ")
    if commutes(a, b, tol):
        raise PreconditionError("star_decompose needs a non-commuting pair")
    if not is_indecomposable(a, b, tol):
        raise PreconditionError("star_decompose needs an indecomposable pair")

    diagnostics = notes if notes is not None else []
    parts = []
    for label, m in (("A", a), ("B", b)):
        part = _star_part(m, tol)
        if part is None:
            diagnostics.append(
                f"star: log(e^{label}) has three distinct eigenvalue clusters"
            )
            logger.warning("star_decompose gave up: %s", diagnostics[-1])
            return None
        diagnostics.append(f"star: log part of {label} is {part[3].value}")
        parts.append(part)

    (sigma, delta, f, _), (tau, theta, g, _) = parts
    decomposition = StarDecomp(sigma, tau, delta, theta, f, g)
    if not star_verify(decomposition, a, b, tol):
        diagnostics.append("star: the candidate decomposition fails verification")
        logger.warning("star_decompose gave up: %s", diagnostics[-1])
        return None
    return decomposition


def _cross_validate(
    condition3: bool,
    has_property_L: bool,
    sweep: ExceptionalSet,
    solved: ExceptionalSet | None,
    notes: list[str],
) -> bool:
    if condition3:
        assert solved is not None
        within_sweep = tuple(t for t in solved.members if t <= sweep.sweep_bound)
        if within_sweep != sweep.members:
            notes.append(
                f"sweep failures {list(sweep.members)} differ from solver "
                f"failures {list(within_sweep)}"
            )
            return False
        if not set(solved.members) <= set(solved.candidates):
            notes.append(
                f"failures {list(solved.members)} outside collision candidates "
                f"{list(solved.candidates)}"
            )
            return False
        return True
    if not sweep.members and has_property_L:
        notes.append(
            "condition (3) rejected without a failing t or a property L refutation"
        )
        return False
    return True


def analyze(
    a: CMatrix,
    b: CMatrix,
    t_max: int = DEFAULT_T_MAX,
    tol=Tolerances.DEFAULT,
    workers: int = 1,
) -> AnalysisReport:
    """Runs every check on the pair and cross-validates the theorem against the sweeps.

    Parameters
    ----------
    a, b : CMatrix
        The pair, of equal dimension.
    t_max : int, optional
        Sweep bound. Default is DEFAULT_T_MAX.
    tol : :class:`Tolerances`, optional
        Default is Tolerances.DEFAULT.
    workers : int, optional
        Threads for the sweeps. Default is 1.

    Returns
    -------
    AnalysisReport
        ``consistent`` is False when two independent lines of evidence disagree.

    Raises
    ------
    OutOfRangeError
        If an exponential of the pair overflows even after centering.
    """
    check_same_dimension(a, b)
    if t_max < 1:
        raise PreconditionError(f"t_max must be at least 1, got {t_max}")
    notes: list[str] = []

    commute = commutes(a, b, tol)
    records = sweep_records(a, b, range(1, t_max + 1), tol, workers)
    # t = 1 is the pair itself
    triple_equal = records[0].passed
    logger.info(
        "sweep over [1, %d]: largest deviation %.3g",
        t_max,
        max_sweep_deviation(records),
    )
    pairing = property_L(a, b, tol)
    has_property_L = pairing is not None
    condition3 = triple_equal and has_property_L
    commutant = commutant_basis(a, b, tol)
    indecomposable = is_indecomposable(a, b, tol)
    spectra_cf = (
        is_2pi_cf(eigenvalues(a, tol), tol),
        is_2pi_cf(eigenvalues(b, tol), tol),
    )

    for label, m in (("A", a), ("B", b)):
        if branch_cut_flag(expm(centered(m), tol), tol):
            notes.append(
                f"e^{label} has a defective eigenvalue on the negative real axis; "
                "the principal log there is not guaranteed accurate"
            )
            logger.warning(notes[-1])

    consistent = True
    if not commute and triple_equal and any(spectra_cf):
        notes.append(
            "non-commuting pair with equal exponentials has a 2iπ-CF spectrum"
        )
        consistent = False

    sweep = _failures(records, t_max)
    solved = None
    if condition3:
        solved = exceptional_set_solver(
            a, b, pairing, t_max, tol, workers, records=records
        )
    if not _cross_validate(condition3, has_property_L, sweep, solved, notes):
        consistent = False

    star = None
    if a.n == 3 and triple_equal and not commute and indecomposable:
        star = star_decompose(a, b, tol, notes)
        if star is not None and not star_jordan_chevalley_check(star, a, b, tol):
            notes.append("star: Jordan-Chevalley parts do not match the decomposition")
            logger.warning(notes[-1])

    if not consistent:
        logger.warning("inconsistent analysis: %s", "; ".join(notes))

    return AnalysisReport(
        commute=commute,
        triple_equal=triple_equal,
        has_property_L=has_property_L,
        pairing=pairing.perm if pairing is not None else None,
        simultaneously_triangularizable=is_st_heuristic(a, b, tol),
        indecomposable=indecomposable,
        commutant_dim=commutant.dim,
        condition3=condition3,
        exceptional=solved if solved is not None else sweep,
        star=star,
        spectra_cf=spectra_cf,
        consistent=consistent,
        notes=tuple(notes),
        tolerances=tol.to_dict(),
        sweep_bound=t_max,
    )
