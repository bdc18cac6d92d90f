from __future__ import annotations

import logging

import numpy as np
from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "commexp"

_VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def configure_logging(verbosity: int = 0) -> logging.Logger:
    """Routes the package logger to a rich handler on stderr.

    Parameters
    ----------
    verbosity : int, optional
        0 shows warnings, 1 adds info, 2 or more adds debug messages. Default is 0.

    Returns
    -------
    logging.Logger
        The configured ``commexp`` logger.
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(_VERBOSITY_LEVELS.get(verbosity, logging.DEBUG))
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True),
        show_time=False,
        show_path=verbosity >= 2,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    return logger


def frobenius(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def nearest_positive_integer(z: complex, eps: float) -> int | None:
    """Returns k when ``z`` lies within ``eps * max(1, |z|)`` of a positive integer k."""
    k = round(z.real)
    if k < 1:
        return None
    if abs(z - k) <= eps * max(1.0, abs(z)):
        return int(k)
    return None


def greedy_match(left: list[complex], right: list[complex], threshold: float) -> bool:
    """Matches two multisets of complex numbers greedily by minimal distance.

    Every element of ``left`` must find a distinct partner of ``right`` within
    ``threshold``. Adequate for the three-element multisets used here.
    """
    if len(left) != len(right):
        return False
    pairs = sorted(
        (abs(x - y), i, j) for i, x in enumerate(left) for j, y in enumerate(right)
    )
    used_left: set[int] = set()
    used_right: set[int] = set()
    for dist, i, j in pairs:
        if i in used_left or j in used_right:
            continue
        if dist > threshold:
            return False
        used_left.add(i)
        used_right.add(j)
    return len(used_left) == len(left)
