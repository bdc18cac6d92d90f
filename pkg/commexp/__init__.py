import logging

from commexp.constants import Sampling, Tolerances
from commexp.errors import (
    CommexpError,
    DimensionError,
    GenerationError,
    InputError,
    InvariantViolation,
    NonFiniteError,
    OutOfRangeError,
    PreconditionError,
    SingularMatrixError,
    ToleranceError,
)
from commexp.m_analysis.m_analysis import (
    AnalysisReport,
    ExceptionalSet,
    StarDecomp,
    SweepRecord,
    analyze,
    collision_candidates,
    condition1_sweep,
    condition3_verdict,
    exceptional_set_solver,
    exp_identity_deviation,
    exp_triple_equal,
    max_sweep_deviation,
    star_decompose,
    star_jordan_chevalley_check,
    star_verify,
    sweep_records,
)
from commexp.m_catalog.m_catalog import (
    Catalog,
    ExpectedFacts,
    NamedPair,
    catalog,
    gen_band_matrix,
    gen_commuting_pair,
    gen_prop21_pair,
    gen_random_pair,
    gen_st_pair,
    gen_star_pair,
    tu_pair,
)
from commexp.m_function.m_function import (
    JCDecomp,
    LogPartForm,
    LogSplit,
    branch_cut_flag,
    centered,
    commutes,
    expm,
    jordan_chevalley,
    log_part_form,
    log_split,
    logm_principal,
    poly_in_matrix_witness,
    principal_log,
    real_shift,
    two_pi_i_part,
)
from commexp.m_function.m_oracle import expm_series
from commexp.m_matrix.m_matrix import (
    CharPoly,
    CMatrix,
    Spectrum,
    char_poly,
    commutator,
    eigen_clusters,
    eigenvalues,
    is_diagonalizable,
    is_nilpotent,
    rank_eps,
)
from commexp.m_spectral.m_spectral import (
    CommutantBasis,
    EigenPairing,
    commutant_basis,
    in_2pi_z,
    is_2pi_cf,
    is_indecomposable,
    is_st_heuristic,
    pairing_holds,
    property_L,
    property_L_bruteforce,
)

logging.getLogger("commexp").addHandler(logging.NullHandler())

__all__ = [
    "AnalysisReport",
    "Catalog",
    "CharPoly",
    "CMatrix",
    "CommexpError",
    "CommutantBasis",
    "DimensionError",
    "EigenPairing",
    "ExceptionalSet",
    "ExpectedFacts",
    "GenerationError",
    "InputError",
    "InvariantViolation",
    "JCDecomp",
    "LogPartForm",
    "LogSplit",
    "NamedPair",
    "NonFiniteError",
    "OutOfRangeError",
    "PreconditionError",
    "Sampling",
    "SingularMatrixError",
    "Spectrum",
    "StarDecomp",
    "SweepRecord",
    "ToleranceError",
    "Tolerances",
    "analyze",
    "branch_cut_flag",
    "catalog",
    "centered",
    "char_poly",
    "collision_candidates",
    "commutant_basis",
    "commutator",
    "commutes",
    "condition1_sweep",
    "condition3_verdict",
    "eigen_clusters",
    "eigenvalues",
    "exceptional_set_solver",
    "exp_identity_deviation",
    "exp_triple_equal",
    "expm",
    "expm_series",
    "gen_band_matrix",
    "gen_commuting_pair",
    "gen_prop21_pair",
    "gen_random_pair",
    "gen_st_pair",
    "gen_star_pair",
    "in_2pi_z",
    "is_2pi_cf",
    "is_diagonalizable",
    "is_indecomposable",
    "is_nilpotent",
    "is_st_heuristic",
    "jordan_chevalley",
    "log_part_form",
    "log_split",
    "logm_principal",
    "max_sweep_deviation",
    "pairing_holds",
    "poly_in_matrix_witness",
    "principal_log",
    "property_L",
    "property_L_bruteforce",
    "rank_eps",
    "real_shift",
    "star_decompose",
    "star_jordan_chevalley_check",
    "star_verify",
    "sweep_records",
    "tu_pair",
    "two_pi_i_part",
]
