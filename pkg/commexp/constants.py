from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from commexp.errors import ToleranceError

TWO_PI_I: complex = complex(0.0, 2.0 * math.pi)

MAX_DIMENSION: int = 3
MAX_ABS_ENTRY: float = 1e6
DEFAULT_T_MAX: int = 50

# e^x overflows a double just above x = 709.
EXP_REAL_LIMIT: float = 700.0

# Relative gap (to the matrix scale) under which distinct eigenvalues stop being
# "well separated" and expm leaves the eigenvector path.
SPECTRAL_SEPARATION: float = 1e-4

EXIT_OK: int = 0
EXIT_VALIDATION: int = 2
EXIT_INVARIANT: int = 3


class Tolerances:
    """Threshold presets shared by every numerical decision of the package.

    The presets are immutable; use :meth:`Tolerances.custom` to derive new values.

    Attributes
    ----------
    eps_entry : float
        Entrywise comparison threshold, relative to ``1 + max norm`` of the operands.
    eps_eig : float
        Eigenvalue-coincidence threshold, relative to the matrix scale.
    eps_rank : float
        Singular values below ``eps_rank * s_max`` count as zero.
    eps_root : float
        Relative residual under which a critical point of a characteristic
        polynomial is proposed as a multiple root.
    """

    @dataclass(frozen=True)
    class _DefaultTolerances:
        eps_entry: float = 1e-9
        eps_eig: float = 1e-7
        eps_rank: float = 1e-9
        eps_root: float = 1e-10

        def __post_init__(self):
            for f in fields(self):
                value = getattr(self, f.name)
                if not (isinstance(value, (int, float)) and value > 0.0):
                    raise ToleranceError(
                        f"{f.name} must be strictly positive, got {value!r}"
                    )

        def to_dict(self) -> dict[str, float]:
            return {f.name: float(getattr(self, f.name)) for f in fields(self)}

    @dataclass(frozen=True)
    class _StrictTolerances(_DefaultTolerances):
        eps_entry: float = 1e-11
        eps_eig: float = 1e-9
        eps_rank: float = 1e-11
        eps_root: float = 1e-12

    @dataclass(frozen=True)
    class _LooseTolerances(_DefaultTolerances):
        eps_entry: float = 1e-7
        eps_eig: float = 1e-5
        eps_rank: float = 1e-7
        eps_root: float = 1e-8

    DEFAULT = _DefaultTolerances()
    STRICT = _StrictTolerances()
    LOOSE = _LooseTolerances()

    @staticmethod
    def custom(base: _DefaultTolerances | None = None, **overrides: float):
        """Returns a copy of ``base`` (DEFAULT when omitted) with the given fields replaced."""
        return replace(base if base is not None else Tolerances.DEFAULT, **overrides)


class Sampling:
    """Parameter presets for the random pair generators."""

    @dataclass(frozen=True)
    class _DefaultSampling:
        # integer spectra are drawn from [-integer_range, integer_range]
        integer_range: int = 5
        max_condition: float = 20.0
        max_rounds: int = 1000
        # moduli of entries that must stay away from zero
        min_radius: float = 0.5
        max_radius: float = 2.0

    @dataclass(frozen=True)
    class _SmallSampling(_DefaultSampling):
        integer_range: int = 2
        max_condition: float = 5.0

    DEFAULT = _DefaultSampling()
    SMALL = _SmallSampling()
