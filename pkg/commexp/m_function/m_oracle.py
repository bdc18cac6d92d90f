"""Series-based matrix exponential, kept independent of the spectral machinery.

Only used to cross-check :func:`commexp.m_function.m_function.expm`.
"""

from __future__ import annotations

import math

import numpy as np

from commexp.m_matrix.m_matrix import CMatrix

_THETA = 0.5
_MAX_TERMS = 40


def expm_series(m: CMatrix, target: float = 1e-12) -> CMatrix:
    """Taylor series with scaling and squaring.

    The argument is halved until its 1-norm is at most 0.5, the series is summed
    until the next term falls below ``target`` relative to the partial sum, and the
    result is squared back.
    """
    x = m.data
    norm = float(np.linalg.norm(x, 1))
    squarings = max(0, math.ceil(math.log2(norm / _THETA))) if norm > _THETA else 0
    x = x / 2.0**squarings

    identity = np.eye(m.n, dtype=np.complex128)
    total = identity.copy()
    term = identity.copy()
    for k in range(1, _MAX_TERMS):
        term = term @ x / k
        total = total + term
        if np.linalg.norm(term, 1) <= target * 1e-4 * np.linalg.norm(total, 1):
            break

    for _ in range(squarings):
        total = total @ total
    return CMatrix(total)
