"""JSON encoding of matrices, analysis reports, sweep records and catalog entries.

Complex numbers travel as ``[re, im]`` pairs. Floats are written with Python's
shortest round-trip representation, so parsing what was emitted gives back the
same doubles.
"""

from __future__ import annotations

import json
import math
from typing import Any

from commexp.constants import MAX_ABS_ENTRY, MAX_DIMENSION
from commexp.errors import DimensionError, InputError, NonFiniteError
from commexp.m_analysis.m_analysis import (
    AnalysisReport,
    ExceptionalSet,
    StarDecomp,
    SweepRecord,
)
from commexp.m_catalog.m_catalog import NamedPair
from commexp.m_matrix.m_matrix import CMatrix


def _number(value: Any, where: str) -> float:
    # bool is an int subclass but never a valid matrix entry
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise NonFiniteError(f"{where}: entries must be finite")
    if abs(x) > MAX_ABS_ENTRY:
        raise InputError(f"{where}: |{x}| exceeds {MAX_ABS_ENTRY:g}")
    return x


def complex_to_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def complex_from_json(value: Any, where: str = "scalar") -> complex:
    if not isinstance(value, list) or len(value) != 2:
        raise InputError(f"{where}: expected [re, im], got {value!r}")
    return complex(_number(value[0], where), _number(value[1], where))


def matrix_to_json(m: CMatrix) -> list[list[list[float]]]:
    return [[complex_to_json(complex(z)) for z in row] for row in m.data]


def matrix_from_json(value: Any, name: str = "matrix") -> CMatrix:
    """Parses an array of n rows of n ``[re, im]`` entries.

    Raises
    ------
    DimensionError
        If the matrix is empty, not square or larger than 3 x 3.
    NonFiniteError
        If an entry is NaN or infinite.
    InputError
        If the nesting is wrong or an entry exceeds ``MAX_ABS_ENTRY`` in modulus.
    """
    if not isinstance(value, list):
        raise InputError(f"{name}: expected an array of rows")
    n = len(value)
    if n == 0:
        raise DimensionError(f"{name}: matrix is empty")
    if n > MAX_DIMENSION:
        raise DimensionError(f"{name}: dimension must be ≤ {MAX_DIMENSION}, got {n}")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise DimensionError(f"{name}: matrix must be square ({n} x {n})")
        rows.append(
            [complex_from_json(z, f"{name}[{i}][{j}]") for j, z in enumerate(row)]
        )
    return CMatrix(rows)


def _loads(text: str) -> Any:
    def reject(constant: str):
        raise NonFiniteError(f"non-finite constant {constant} in input")

    try:
        return json.loads(text, parse_constant=reject)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc


def _field(document: Any, key: str) -> Any:
    if not isinstance(document, dict) or key not in document:
        raise InputError(f"missing field {key!r}")
    return document[key]


def parse_pair(text: str) -> tuple[CMatrix, CMatrix]:
    """Reads ``{"A": MatrixJson, "B": MatrixJson}``; other keys are ignored.

    Catalog entries printed by ``commexp catalog --name`` are therefore valid input.
    """
    document = _loads(text)
    a = matrix_from_json(_field(document, "A"), "A")
    b = matrix_from_json(_field(document, "B"), "B")
    if a.n != b.n:
        raise DimensionError(f"A is {a.n} x {a.n} but B is {b.n} x {b.n}")
    return a, b


def _star_to_json(star: StarDecomp) -> dict[str, Any]:
    return {
        "sigma": complex_to_json(star.sigma),
        "tau": complex_to_json(star.tau),
        "delta": matrix_to_json(star.delta),
        "theta": matrix_to_json(star.theta),
        "f": matrix_to_json(star.f),
        "g": matrix_to_json(star.g),
    }


def _star_from_json(value: dict[str, Any]) -> StarDecomp:
    return StarDecomp(
        sigma=complex_from_json(_field(value, "sigma"), "sigma"),
        tau=complex_from_json(_field(value, "tau"), "tau"),
        delta=matrix_from_json(_field(value, "delta"), "delta"),
        theta=matrix_from_json(_field(value, "theta"), "theta"),
        f=matrix_from_json(_field(value, "f"), "f"),
        g=matrix_from_json(_field(value, "g"), "g"),
    )


def report_to_json(report: AnalysisReport) -> dict[str, Any]:
    """The JSON form of a report; the pairing and index pairs are 1-based."""
    exceptional = report.exceptional
    return {
        "commute": report.commute,
        "triple_equal": report.triple_equal,
        "has_property_L": report.has_property_L,
        "pairing": (
            [k + 1 for k in report.pairing] if report.pairing is not None else None
        ),
        "simultaneously_triangularizable": report.simultaneously_triangularizable,
        "indecomposable": report.indecomposable,
        "commutant_dim": report.commutant_dim,
        "condition3": report.condition3,
        "exceptional": list(exceptional.members),
        "exceptional_complete": exceptional.complete,
        "collision_candidates": list(exceptional.candidates),
        "persistent_pairs": [[i + 1, j + 1] for i, j in exceptional.persistent_pairs],
        "star": _star_to_json(report.star) if report.star is not None else None,
        "spectra_cf": list(report.spectra_cf),
        "consistent": report.consistent,
        "notes": list(report.notes),
        "tolerances": dict(report.tolerances),
        "sweep_bound": report.sweep_bound,
    }


def report_from_json(document: dict[str, Any]) -> AnalysisReport:
    pairing = _field(document, "pairing")
    sweep_bound = int(_field(document, "sweep_bound"))
    star = _field(document, "star")
    exceptional = ExceptionalSet(
        members=tuple(int(t) for t in _field(document, "exceptional")),
        sweep_bound=sweep_bound,
        complete=bool(_field(document, "exceptional_complete")),
        candidates=tuple(int(t) for t in _field(document, "collision_candidates")),
        persistent_pairs=tuple(
            (int(i) - 1, int(j) - 1) for i, j in _field(document, "persistent_pairs")
        ),
    )
    return AnalysisReport(
        commute=bool(_field(document, "commute")),
        triple_equal=bool(_field(document, "triple_equal")),
        has_property_L=bool(_field(document, "has_property_L")),
        pairing=tuple(int(k) - 1 for k in pairing) if pairing is not None else None,
        simultaneously_triangularizable=bool(
            _field(document, "simultaneously_triangularizable")
        ),
        indecomposable=bool(_field(document, "indecomposable")),
        commutant_dim=int(_field(document, "commutant_dim")),
        condition3=bool(_field(document, "condition3")),
        exceptional=exceptional,
        star=_star_from_json(star) if star is not None else None,
        spectra_cf=tuple(bool(x) for x in _field(document, "spectra_cf")),
        consistent=bool(_field(document, "consistent")),
        notes=tuple(str(note) for note in _field(document, "notes")),
        tolerances={k: float(v) for k, v in _field(document, "tolerances").items()},
        sweep_bound=sweep_bound,
    )


def emit_report(report: AnalysisReport) -> str:
    return json.dumps(report_to_json(report), indent=2)


def parse_report(text: str) -> AnalysisReport:
    return report_from_json(_loads(text))


def record_to_json(record: SweepRecord) -> dict[str, Any]:
    return {"t": record.t, "deviation": record.deviation, "passed": record.passed}


def named_pair_to_json(pair: NamedPair) -> dict[str, Any]:
    expected = {
        name: list(value) if isinstance(value, tuple) else value
        for name, value in pair.expected.asserted().items()
    }
    return {
        "name": pair.name,
        "description": pair.description,
        "A": matrix_to_json(pair.a),
        "B": matrix_to_json(pair.b),
        "expected": expected,
    }
