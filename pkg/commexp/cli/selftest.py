"""Seeded invariant suites run by ``commexp selftest``.

Every suite returns the failures it found; a failure names the suite, the seed
that produced the input (None for fixed inputs) and what went wrong.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from commexp.constants import DEFAULT_T_MAX, TWO_PI_I, Tolerances
from commexp.errors import CommexpError, PreconditionError
from commexp.m_analysis.m_analysis import (
    AnalysisReport,
    analyze,
    exp_triple_equal,
    star_verify,
)
from commexp.m_catalog.m_catalog import (
    catalog,
    gen_band_matrix,
    gen_commuting_pair,
    gen_prop21_pair,
    gen_random_pair,
    gen_st_pair,
    gen_star_pair,
)
from commexp.m_function.m_function import (
    expm,
    log_split,
    logm_principal,
    poly_in_matrix_witness,
)
from commexp.m_function.m_oracle import expm_series
from commexp.m_matrix.m_matrix import CMatrix, eigenvalues
from commexp.m_spectral.m_spectral import property_L, property_L_bruteforce

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = 25

# relative accuracy demanded of the matrix function suites
_LOG_SPLIT_ACCURACY = 1e-7
_ORACLE_ACCURACY = 1e-9
_ROUND_TRIP_ACCURACY = 1e-8


@dataclass(frozen=True)
class Failure:
    suite: str
    seed: int | None
    message: str

    def to_dict(self) -> dict[str, Any]:
        return {"suite": self.suite, "seed": self.seed, "message": self.message}


@dataclass
class SelftestSummary:
    passed: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict[str, Any]:
        return {
            "pass": self.passed,
            "fail": self.failed,
            "details": [failure.to_dict() for failure in self.failures],
        }


class _Suite:
    """Counts checks and collects failures for one named suite."""

    def __init__(self, name: str, summary: SelftestSummary):
        self.name = name
        self.summary = summary

    def check(self, condition: bool, seed: int | None, message: str) -> bool:
        if condition:
            self.summary.passed += 1
        else:
            self.summary.failures.append(Failure(self.name, seed, message))
            logger.warning("%s (seed %s): %s", self.name, seed, message)
        return condition

    def guarded(self, seed: int | None, run: Callable[[], None]) -> None:
        # an exception inside a check is one failure, not the end of the run
        try:
            run()
        except CommexpError as exc:
            self.check(False, seed, f"{type(exc).__name__}: {exc}")


def _relative_gap(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.norm(x - y) / max(1.0, np.linalg.norm(y)))


def _golden_catalog(suite: _Suite, t_max: int, tol) -> None:
    for entry in catalog():

        def run(entry=entry):
            report = analyze(entry.a, entry.b, t_max, tol)
            for mismatch in entry.expected.mismatches(report):
                suite.check(False, None, f"{entry.name}: {mismatch}")
            suite.check(report.consistent, None, f"{entry.name}: {list(report.notes)}")

        suite.guarded(None, run)


def _family_pairs(seed: int) -> Iterator[tuple[str, CMatrix, CMatrix]]:
    yield "st", *gen_st_pair(2 + seed % 2, seed)
    yield "prop21", *gen_prop21_pair(2 + seed % 2, seed)
    a, b, _ = gen_star_pair(seed)
    yield "star", a, b
    yield "commuting", *gen_commuting_pair(2 + seed % 2, seed)


def _family_expectations(family: str, report: AnalysisReport) -> list[str]:
    problems = []
    if family == "st" and not report.has_property_L:
        problems.append("ST pair without property L")
    if family == "prop21" and (not report.condition3 or report.exceptional.members):
        problems.append(
            f"condition3={report.condition3}, "
            f"exceptional={list(report.exceptional.members)}"
        )
    if family == "star" and not report.triple_equal:
        problems.append("star pair fails the exponential identity")
    if family == "commuting" and not (report.commute and report.condition3):
        problems.append("commuting pair fails condition (3)")
    return problems


def _cross_validation(suite: _Suite, seeds: int, t_max: int, tol) -> None:
    for seed in range(seeds):

        def run(seed=seed):
            for family, a, b in _family_pairs(seed):
                report = analyze(a, b, t_max, tol)
                suite.check(report.consistent, seed, f"{family}: {list(report.notes)}")
                for problem in _family_expectations(family, report):
                    suite.check(False, seed, f"{family}: {problem}")

        suite.guarded(seed, run)


def _in_2pi_z(z: complex, scale: float) -> bool:
    k = round(z.imag / (2 * math.pi))
    return abs(z - k * TWO_PI_I) <= _LOG_SPLIT_ACCURACY * scale


def _log_split_suite(suite: _Suite, seeds: int, tol) -> None:
    for seed in range(seeds):

        def run(seed=seed):
            a, _ = gen_random_pair(2 + seed % 2, seed, scale=4.0)
            split = log_split(a, tol)
            f, delta = split.f, split.delta
            scale = a.scale()
            identity = np.eye(a.n)
            relations = {
                "F + Δ = A": _relative_gap((f + delta).data, a.data),
                "e^Δ = I": _relative_gap(expm(delta, tol).data, identity),
                "FΔ = ΔF": float(np.linalg.norm((f @ delta - delta @ f).data))
                / scale**2,
                "e^F = e^A": _relative_gap(expm(f, tol).data, expm(a, tol).data),
            }
            for name, gap in relations.items():
                suite.check(gap <= _LOG_SPLIT_ACCURACY * scale, seed, f"{name}: {gap}")
            band = all(
                -math.pi - _LOG_SPLIT_ACCURACY < z.imag <= math.pi + _LOG_SPLIT_ACCURACY
                for z in eigenvalues(f, tol)
            )
            suite.check(band, seed, "s(F) leaves the principal band")
            integral = all(_in_2pi_z(z, scale) for z in eigenvalues(delta, tol))
            suite.check(integral, seed, "s(Δ) is not in 2iπZ")
            suite.check(
                poly_in_matrix_witness(f, a, tol), seed, "F is not a polynomial in A"
            )
            again = log_split(a, tol)
            suite.check(again == split, seed, "log_split is not deterministic")

        suite.guarded(seed, run)


def _star_converse(suite: _Suite, seeds: int, tol) -> None:
    for seed in range(seeds):

        def run(seed=seed):
            a, b, decomposition = gen_star_pair(seed)
            suite.check(star_verify(decomposition, a, b, tol), seed, "star_verify")
            suite.check(exp_triple_equal(a, b, tol), seed, "exp_triple_equal")

        suite.guarded(seed, run)


def _oracle_equivalence(suite: _Suite, seeds: int, tol) -> None:
    for seed in range(seeds):

        def run(seed=seed):
            # entries in the disk of radius 5 keep ||M|| <= 10 up to n = 3 on average
            for m in gen_random_pair(2 + seed % 2, seed, scale=5.0):
                gap = _relative_gap(expm(m, tol).data, expm_series(m).data)
                bound = _ORACLE_ACCURACY * (1.0 + m.fro_norm())
                suite.check(gap <= bound, seed, f"expm vs series: {gap}")
            band = gen_band_matrix(2 + seed % 2, seed)
            back = logm_principal(expm(band, tol), tol)
            gap = _relative_gap(back.data, band.data)
            bound = _ROUND_TRIP_ACCURACY * (1.0 + band.fro_norm())
            suite.check(gap <= bound, seed, f"logm(expm(M)) vs M: {gap}")

        suite.guarded(seed, run)


def _property_L_oracle(suite: _Suite, seeds: int, tol) -> None:
    for seed in range(seeds):

        def run(seed=seed):
            n = 2 + seed % 2
            pairs = [
                ("st", *gen_st_pair(n, seed)),
                ("commuting", *gen_commuting_pair(n, seed)),
                ("random", *gen_random_pair(n, seed)),
            ]
            for family, a, b in pairs:
                fast = property_L(a, b, tol) is not None
                slow = property_L_bruteforce(a, b, tol, seed=seed) is not None
                message = f"{family}: checker {fast}, oracle {slow}"
                suite.check(fast == slow, seed, message)
                if family != "random":
                    suite.check(fast, seed, f"{family}: pair without property L")

        suite.guarded(seed, run)


def run_selftest(
    seeds: int = DEFAULT_SEEDS,
    t_max: int = DEFAULT_T_MAX,
    tol=Tolerances.DEFAULT,
) -> SelftestSummary:
    """Runs every suite and returns the combined summary.

    Parameters
    ----------
    seeds : int, optional
        Seeds 0..seeds-1 are used by every randomized suite. Default is 25.
    t_max : int, optional
        Sweep bound for the analyses. Default is DEFAULT_T_MAX.
    tol : :class:`Tolerances`, optional
        Default is Tolerances.DEFAULT.

    Raises
    ------
    PreconditionError
        If ``seeds`` or ``t_max`` is below 1.
    """
    if seeds < 1:
        raise PreconditionError(f"seeds must be at least 1, got {seeds}")
    if t_max < 1:
        raise PreconditionError(f"t_max must be at least 1, got {t_max}")
    summary = SelftestSummary()
    suites: list[tuple[str, Callable[[_Suite], None]]] = [
        ("golden-catalog", lambda s: _golden_catalog(s, t_max, tol)),
        ("cross-validation", lambda s: _cross_validation(s, seeds, t_max, tol)),
        ("log-split", lambda s: _log_split_suite(s, seeds, tol)),
        ("star-converse", lambda s: _star_converse(s, seeds, tol)),
        ("oracle-equivalence", lambda s: _oracle_equivalence(s, seeds, tol)),
        ("property-L-oracle", lambda s: _property_L_oracle(s, seeds, tol)),
    ]
    for name, run in suites:
        before = (summary.passed, summary.failed)
        run(_Suite(name, summary))
        logger.info(
            "%s: %d passed, %d failed",
            name,
            summary.passed - before[0],
            summary.failed - before[1],
        )
    return summary


def fault_injected_tolerances() -> Tolerances._DefaultTolerances:
    """Default tolerances with ``eps_entry`` set to the smallest positive double."""
    return Tolerances.custom(eps_entry=math.ulp(0.0))
