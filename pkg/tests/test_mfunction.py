import cmath
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from commexp.errors import OutOfRangeError, SingularMatrixError
from commexp.m_catalog.m_catalog import (
    gen_band_matrix,
    gen_commuting_pair,
    well_conditioned,
)
from commexp.m_function.m_function import (
    LogPartForm,
    branch_cut_flag,
    centered,
    commutes,
    expm,
    expm_jordan,
    expm_spectral,
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
from commexp.m_matrix.m_matrix import CMatrix, eigenvalues, is_diagonalizable
from tests.conftest import assert_matrix_close, two_pi_i

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dimensions = st.integers(min_value=1, max_value=3)


def random_matrix(seed, n, scale=1.0):
    rng = np.random.default_rng(seed)
    return CMatrix((rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) * scale)


class TestExpm:
    def test_zero_gives_identity(self):
        assert expm(CMatrix.zeros(3)) == CMatrix.identity(3)

    def test_tu_matrices_exponentiate_to_identity(self, tu):
        a0, b0 = tu
        for m in (a0, b0, a0 + b0, a0 * 7 + b0):
            assert_matrix_close(expm(m), np.eye(3))

    def test_jordan_block(self):
        a = 0.3 - 1.2j
        m = CMatrix([[a, 1], [0, a]])
        assert_matrix_close(expm(m), cmath.exp(a) * np.array([[1, 1], [0, 1]]))

    def test_nilpotent_of_order_three(self):
        n = CMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        assert_matrix_close(expm(n), [[1, 1, 0.5], [0, 1, 1], [0, 0, 1]])

    def test_paths_agree_on_separated_spectra(self):
        m = CMatrix([[1, 2, 0], [0, 2j, 1], [0, 0, -1]])
        assert_matrix_close(expm_spectral(m), expm_jordan(m))

    def test_spectral_path_needs_distinct_eigenvalues(self):
        with pytest.raises(ValueError):
            expm_spectral(CMatrix.identity(2))

    @given(seed=seeds, n=dimensions)
    @settings(max_examples=60, deadline=None)
    def test_matches_scipy(self, seed, n):
        m = random_matrix(seed, n, scale=2.0)
        assert_matrix_close(expm(m), scipy.linalg.expm(m.data), rtol=1e-9)

    @given(seed=seeds, n=dimensions)
    @settings(max_examples=60, deadline=None)
    def test_matches_series_oracle(self, seed, n):
        m = random_matrix(seed, n, scale=3.0)
        rtol = 1e-9 * (1.0 + m.fro_norm())
        assert_matrix_close(expm(m), expm_series(m), rtol=rtol)

    def test_series_oracle_matches_scipy(self):
        m = random_matrix(7, 3, scale=4.0)
        assert_matrix_close(expm_series(m), scipy.linalg.expm(m.data), rtol=1e-11)

    @given(seed=seeds, n=dimensions)
    @settings(max_examples=40, deadline=None)
    def test_commutes_with_similarity(self, seed, n):
        m = random_matrix(seed, n, scale=2.0)
        p = well_conditioned(np.random.default_rng(seed), n)
        p_inv = np.linalg.inv(p)
        conjugated = expm(CMatrix(p @ m.data @ p_inv))
        expected = p @ expm(m).data @ p_inv
        assert_matrix_close(conjugated, expected, rtol=1e-8 * (1.0 + m.fro_norm()))

    @given(seed=seeds, n=dimensions)
    @settings(max_examples=40, deadline=None)
    def test_determinant_is_exp_of_trace(self, seed, n):
        m = random_matrix(seed, n, scale=2.0)
        assert expm(m).det() == pytest.approx(cmath.exp(m.trace()), rel=1e-8)

    @given(seed=seeds, n=dimensions)
    @settings(max_examples=40, deadline=None)
    def test_commuting_sum_factorizes(self, seed, n):
        x, y = gen_commuting_pair(n, seed)
        rtol = 1e-8 * (1.0 + x.fro_norm() + y.fro_norm())
        assert_matrix_close(expm(x + y), expm(x) @ expm(y), rtol=rtol)

    def test_overflow_is_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            expm(CMatrix.diag(800.0, 0.0))

    def test_underflow_gives_zero(self):
        assert_matrix_close(expm(CMatrix.diag(-800.0, 0.0)), np.diag([0.0, 1.0]))

    def test_centering(self):
        m = CMatrix([[2 + 1j, 5], [0, 4]])
        assert real_shift(m) == pytest.approx(3.0)
        assert centered(m).trace() == pytest.approx(1j)
        # the shift scales e^m by a positive real
        assert_matrix_close(expm(centered(m)) * math.exp(3.0), expm(m))


class TestJordanChevalley:
    def test_documented_example(self):
        m = CMatrix([[1, 1, 0], [0, 1, 0], [0, 0, 2]])
        jc = jordan_chevalley(m)
        assert_matrix_close(jc.semisimple, CMatrix.diag(1, 1, 2))
        assert_matrix_close(jc.nilpotent, CMatrix.elementary(3, 1, 2))

    @given(seed=seeds)
    @settings(max_examples=30, deadline=None)
    def test_parts_commute_and_have_their_shape(self, seed):
        rng = np.random.default_rng(seed)
        t = np.diag([1.5, 1.5, -0.5j]) + np.triu(rng.normal(size=(3, 3)), 1)
        p = rng.normal(size=(3, 3)) + 2 * np.eye(3)
        m = CMatrix(p @ t @ np.linalg.inv(p))
        jc = jordan_chevalley(m)
        assert_matrix_close(jc.semisimple + jc.nilpotent, m)
        assert commutes(jc.semisimple, jc.nilpotent)
        assert is_diagonalizable(jc.semisimple)
        assert_matrix_close(jc.nilpotent**3, np.zeros((3, 3)), rtol=1e-8)


class TestLogarithm:
    def test_principal_log_branch(self):
        assert principal_log(-1) == pytest.approx(1j * math.pi)
        assert principal_log(complex(-1.0, -0.0)) == pytest.approx(1j * math.pi)
        assert principal_log(math.e) == pytest.approx(1)

    def test_principal_log_of_zero(self):
        with pytest.raises(SingularMatrixError):
            principal_log(0)

    def test_two_pi_i_part(self):
        assert two_pi_i_part(3j * math.pi) == pytest.approx(two_pi_i(1))
        assert two_pi_i_part(1j * math.pi) == 0
        assert two_pi_i_part(complex(-800.0, -math.pi)) == pytest.approx(two_pi_i(-1))
        assert two_pi_i_part(complex(1e6, 7.0)) == pytest.approx(two_pi_i(1))

    @given(
        re=st.floats(min_value=-5.0, max_value=5.0),
        im=st.floats(min_value=-40.0, max_value=40.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_two_pi_i_part_matches_the_exponential(self, re, im):
        # rounding in e^z can only move the branch next to the cut
        assume(abs(math.remainder(im - math.pi, 2 * math.pi)) > 1e-6)
        z = complex(re, im)
        expected = z - principal_log(cmath.exp(z))
        assert two_pi_i_part(z) == pytest.approx(expected, abs=1e-9)

    def test_logm_of_jordan_block(self):
        m = CMatrix([[2, 1], [0, 2]])
        expected = [[math.log(2), 0.5], [0, math.log(2)]]
        assert_matrix_close(logm_principal(m), expected)

    def test_logm_of_minus_identity(self):
        expected = 1j * math.pi * np.eye(2)
        assert_matrix_close(logm_principal(-CMatrix.identity(2)), expected)

    def test_logm_of_singular_matrix(self):
        with pytest.raises(SingularMatrixError):
            logm_principal(CMatrix.diag(1, 0, 2))

    @given(seed=seeds, n=dimensions)
    @settings(max_examples=40, deadline=None)
    def test_matches_scipy(self, seed, n):
        m = gen_band_matrix(n, seed)
        x = expm(m)
        assert_matrix_close(logm_principal(x), scipy.linalg.logm(x.data), rtol=1e-8)

    @given(seed=seeds, n=dimensions)
    @settings(max_examples=40, deadline=None)
    def test_inverts_expm_in_the_band(self, seed, n):
        m = gen_band_matrix(n, seed)
        rtol = 1e-8 * (1.0 + m.fro_norm())
        assert_matrix_close(logm_principal(expm(m)), m, rtol=rtol)


class TestLogSplit:
    def test_documented_example(self):
        split = log_split(CMatrix.diag(3j * math.pi, 0, 0))
        assert_matrix_close(split.f, CMatrix.diag(1j * math.pi, 0, 0))
        assert_matrix_close(split.delta, CMatrix.diag(two_pi_i(1), 0, 0))

    def test_large_real_parts(self):
        split = log_split(CMatrix.diag(900 + 3j * math.pi, 880))
        assert_matrix_close(split.f, CMatrix.diag(900 + 1j * math.pi, 880))
        assert_matrix_close(split.delta, CMatrix.diag(two_pi_i(1), 0))

    def test_tu_matrix_is_all_integer_part(self, tu):
        a0, _ = tu
        split = log_split(a0)
        assert_matrix_close(split.f, np.zeros((3, 3)), rtol=1e-9)
        assert_matrix_close(split.delta, a0)

    @given(seed=seeds, n=st.integers(min_value=2, max_value=3))
    @settings(max_examples=40, deadline=None)
    def test_invariants(self, seed, n):
        a = random_matrix(seed, n, scale=2.5)
        split = log_split(a)
        f, delta = split.f, split.delta
        rtol = 1e-7 * a.scale()
        assert_matrix_close(f + delta, a, rtol=rtol)
        assert_matrix_close(expm(delta), np.eye(n), rtol=rtol)
        assert_matrix_close(expm(f), expm(a), rtol=rtol)
        assert_matrix_close(f @ delta, delta @ f, rtol=rtol * a.scale())
        for z in eigenvalues(f):
            assert -math.pi - 1e-7 < z.imag <= math.pi + 1e-7
        for z in eigenvalues(delta):
            k = round(z.imag / (2 * math.pi))
            assert abs(z - two_pi_i(k)) <= rtol
        assert poly_in_matrix_witness(f, a)
        assert log_split(a) == split

    def test_witness_rejects_non_polynomial(self):
        a = CMatrix.diag(1, 2, 3)
        assert poly_in_matrix_witness(a**2 + a, a)
        assert not poly_in_matrix_witness(CMatrix.elementary(3, 1, 2), a)


class TestClassification:
    def test_branch_cut_flag(self):
        assert branch_cut_flag(CMatrix([[-1, 1], [0, -1]]))
        assert not branch_cut_flag(-CMatrix.identity(2))
        assert not branch_cut_flag(CMatrix([[2, 1], [0, 2]]))

    def test_log_part_zero(self):
        form, sigma = log_part_form(CMatrix.identity(3) * 0.5j)
        assert form is LogPartForm.ZERO
        assert sigma == pytest.approx(0.5j)

    def test_log_part_square_zero(self):
        f = CMatrix.identity(3) * 2 + CMatrix.elementary(3, 1, 2)
        form, sigma = log_part_form(f)
        assert form is LogPartForm.SQUARE_ZERO
        assert sigma == pytest.approx(2)

    def test_log_part_split(self):
        form, sigma = log_part_form(CMatrix.diag(1, 1, 3))
        assert form is LogPartForm.SPLIT
        assert sigma == pytest.approx(1)

    def test_log_part_other(self):
        assert log_part_form(CMatrix.diag(1, 2, 3)) == (LogPartForm.OTHER, None)
        nilpotent = CMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        assert log_part_form(nilpotent)[0] is LogPartForm.OTHER

    def test_commutes(self, tu):
        a0, b0 = tu
        assert commutes(CMatrix.diag(1, 2, 3), CMatrix.diag(4, 5, 6j))
        assert commutes(a0, a0 @ a0 + a0)
        assert not commutes(a0, b0)
