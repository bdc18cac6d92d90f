"""Closed-form roots of monic polynomials of degree at most three."""

from __future__ import annotations

import cmath
import logging
from collections.abc import Callable, Sequence

logger = logging.getLogger(__name__)

_OMEGA = complex(-0.5, 3**0.5 / 2)


def solve_quadratic(b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of ``z**2 + b*z + c``, computed without cancellation.

    The root of larger modulus comes from the quadratic formula with the sign
    matching ``b``; the other one from Vieta's product.
    """
    disc = cmath.sqrt(b * b - 4 * c)
    if (b.conjugate() * disc).real < 0:
        disc = -disc
    q = -(b + disc) / 2
    if q == 0:
        return 0j, 0j
    return q, c / q


def _horner(coeffs: Sequence[complex], z: complex) -> complex:
    # coeffs are c0..c_{n-1} of a monic polynomial
    acc = 1 + 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _horner_derivative(coeffs: Sequence[complex], z: complex) -> complex:
    n = len(coeffs)
    acc = complex(n)
    for k in range(n - 1, 0, -1):
        acc = acc * z + k * coeffs[k]
    return acc


def _polish(coeffs: Sequence[complex], z: complex) -> complex:
    # One Newton step, kept only when it lowers the residual.
    d = _horner_derivative(coeffs, z)
    if d == 0:
        return z
    candidate = z - _horner(coeffs, z) / d
    if abs(_horner(coeffs, candidate)) < abs(_horner(coeffs, z)):
        return candidate
    return z


def _cardano(p: complex, q: complex) -> tuple[complex, complex, complex]:
    """Roots of the depressed cubic ``w**3 + p*w + q``: dominant root first, then deflation."""
    s = cmath.sqrt(q * q / 4 + p**3 / 27)
    u3 = max((-q / 2 + s, -q / 2 - s), key=abs)
    if u3 == 0:
        return 0j, 0j, 0j
    u = u3 ** (1 / 3)
    candidates = [u * _OMEGA**k - p / (3 * u * _OMEGA**k) for k in range(3)]
    w1 = max(candidates, key=abs)
    if w1 == 0:
        return 0j, 0j, 0j
    w2, w3 = solve_quadratic(w1, -q / w1)
    return w1, w2, w3


def monic_roots(
    coeffs: Sequence[complex],
    scale: float,
    eps_root: float,
    confirm: Callable[[complex], bool] | None = None,
) -> tuple[complex, ...]:
    """All roots, with multiplicity, of ``z**n + c_{n-1} z**(n-1) + ... + c0`` for n <= 3.

    Multiple roots are looked for first among the critical points of the
    polynomial: a critical point whose residual is below ``eps_root * scale**n``
    and which ``confirm`` accepts is returned with the right multiplicity and
    exactly repeated. Everything else goes through Cardano's formula.

    Parameters
    ----------
    coeffs : Sequence[complex]
        Coefficients c0..c_{n-1} (the leading 1 is implicit).
    scale : float
        Magnitude bound of the roots, used to make residuals relative.
    eps_root : float
        Relative residual threshold for multiple-root candidates.
    confirm : Callable[[complex], bool], optional
        Extra check a candidate multiple root must pass. Default accepts every candidate.

    Returns
    -------
    tuple[complex, ...]
        The n roots.
    """
    coeffs = [complex(c) for c in coeffs]
    n = len(coeffs)
    scale = max(1.0, float(scale))
    accept = confirm if confirm is not None else (lambda z: True)

    if n == 0:
        return ()
    if n == 1:
        return (-coeffs[0],)
    if n == 2:
        c0, c1 = coeffs
        centre = -c1 / 2
        if abs(_horner(coeffs, centre)) <= eps_root * scale**2 and accept(centre):
            return centre, centre
        r1, r2 = solve_quadratic(c1, c0)
        return _polish(coeffs, r1), _polish(coeffs, r2)
    if n != 3:
        raise ValueError(f"degree must be at most 3, got {n}")

    c0, c1, c2 = coeffs
    shift = -c2 / 3
    p = c1 - c2 * c2 / 3
    q = 2 * c2**3 / 27 - c2 * c1 / 3 + c0

    if (
        abs(p) <= eps_root * scale**2
        and abs(q) <= eps_root * scale**3
        and accept(shift)
    ):
        return shift, shift, shift

    # Critical points of the depressed cubic are +-sqrt(-p/3).
    w = cmath.sqrt(-p / 3)
    critical = min((w, -w), key=lambda x: abs(x**3 + p * x + q))
    if abs(critical**3 + p * critical + q) <= eps_root * scale**3:
        double = critical + shift
        if accept(double):
            logger.debug("double root detected at %s", double)
            return double, double, shift - 2 * critical

    roots = tuple(r + shift for r in _cardano(p, q))
    return tuple(_polish(coeffs, r) for r in roots)
