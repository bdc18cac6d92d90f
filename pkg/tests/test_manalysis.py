import cmath
import logging

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from commexp.constants import Tolerances
from commexp.errors import InvariantViolation, OutOfRangeError, PreconditionError
from commexp.m_analysis import m_analysis
from commexp.m_analysis.m_analysis import (
    StarDecomp,
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
    gen_commuting_pair,
    gen_prop21_pair,
    gen_random_pair,
    gen_st_pair,
    gen_star_pair,
)
from commexp.m_function.m_function import commutes, expm
from commexp.m_matrix.m_matrix import CMatrix
from commexp.m_spectral.m_spectral import EigenPairing, is_indecomposable, property_L
from tests.conftest import assert_matrix_close

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestIdentity:
    def test_tu_pair(self, tu):
        a0, b0 = tu
        assert exp_triple_equal(a0, b0)
        records = sweep_records(a0, b0, range(1, 51))
        assert all(r.passed for r in records)
        assert max_sweep_deviation(records) < 1e-7

    def test_commuting_pair(self):
        a, b = gen_commuting_pair(3, 11)
        assert exp_identity_deviation(a, b) < 1e-10

    def test_random_pair_fails(self):
        a, b = gen_random_pair(3, 5, scale=2.0)
        assert not exp_triple_equal(a, b)
        assert exp_identity_deviation(a, b) > 1e-6

    def test_scalar_shift_keeps_verdicts(self, tu_scaled):
        a, b = tu_scaled
        shift = CMatrix.identity(3) * (0.4 - 0.3j)
        plain = condition1_sweep(a, b, 10)
        shifted = condition1_sweep(a + shift, b - shift, 10)
        assert plain.members == shifted.members == (2, 3, 4)

    def test_records_are_ordered_with_threads(self, tu_scaled):
        a, b = tu_scaled
        inline = sweep_records(a, b, [5, 1, 3, 3, 2, 4])
        threaded = sweep_records(a, b, [5, 1, 3, 3, 2, 4], workers=4)
        assert [r.t for r in inline] == [1, 2, 3, 4, 5]
        assert threaded == inline

    def test_sweep_bound_must_be_positive(self, tu):
        with pytest.raises(PreconditionError):
            condition1_sweep(*tu, t_max=0)

    def test_large_real_shift_keeps_verdicts(self, tu_scaled):
        a, b = tu_scaled
        shift = CMatrix.identity(3) * 300.0
        plain = sweep_records(a, b, range(1, 6))
        shifted = sweep_records(a + shift, b + shift, range(1, 6))
        assert [r.passed for r in shifted] == [r.passed for r in plain]
        assert [r.t for r in shifted if not r.passed] == [2, 3, 4]

    def test_real_growth_does_not_overflow(self):
        a, b = CMatrix([[20.0]]), CMatrix([[0.0]])
        records = sweep_records(a, b, range(1, 51))
        assert all(r.passed for r in records)
        assert exp_identity_deviation(a * 50, b) < 1e-12

    def test_unavoidable_overflow_is_reported(self):
        a = CMatrix.diag(800.0, -800.0)
        with pytest.raises(OutOfRangeError):
            exp_triple_equal(a, CMatrix.zeros(2))


class TestExceptionalSet:
    def test_tu_scaled_sweep(self, tu_scaled):
        result = condition1_sweep(*tu_scaled, 50)
        assert result.members == (2, 3, 4)
        assert result.sweep_bound == 50
        assert not result.complete

    def test_tu_scaled_solver(self, tu_scaled):
        a, b = tu_scaled
        pairing = property_L(a, b)
        result = exceptional_set_solver(a, b, pairing, 50)
        assert result.members == (2, 3, 4)
        assert result.complete
        assert set(result.candidates) == {2, 3, 4}

    def test_solver_is_complete_beyond_the_sweep(self, tu_scaled):
        a, b = tu_scaled
        result = exceptional_set_solver(a, b, property_L(a, b), t_max=1)
        assert result.members == (2, 3, 4)

    def test_solver_reuses_sweep_records(self, tu_scaled, monkeypatch):
        a, b = tu_scaled
        pairing = property_L(a, b)
        fresh = exceptional_set_solver(a, b, pairing, 3)
        records = sweep_records(a, b, range(1, 4))
        evaluated = []
        original = m_analysis.sweep_records

        def counting(a, b, ts, *args, **kwargs):
            ts = sorted(ts)
            evaluated.extend(ts)
            return original(a, b, ts, *args, **kwargs)

        monkeypatch.setattr(m_analysis, "sweep_records", counting)
        reused = exceptional_set_solver(a, b, pairing, 3, records=records)
        assert reused == fresh
        assert reused.members == (2, 3, 4)
        # only the candidate beyond the sweep is evaluated again
        assert evaluated == [4]

    def test_candidates_ignore_the_real_parts(self):
        a, b = CMatrix.diag(1.0, 0.0), CMatrix.diag(-800.0, 0.0)
        candidates, persistent = collision_candidates(property_L(a, b))
        assert candidates == ()
        assert persistent == ((0, 1),)

    def test_spectral_crossings_are_not_candidates(self):
        # t - 720 meets 0 at t = 720, but both integer parts vanish
        a, b = CMatrix.diag(1.0, 0.0), CMatrix.diag(-720.0, 0.0)
        candidates, _ = collision_candidates(property_L(a, b))
        assert 720 not in candidates
        result = exceptional_set_solver(a, b, property_L(a, b), 10)
        assert result.members == ()

    def test_tu_candidates(self, tu):
        candidates, persistent = collision_candidates(property_L(*tu))
        # 2iπ(t + 2), 2iπ(2t + 3) and 0 never meet for t >= 1
        assert candidates == ()
        assert persistent == ()

    def test_normal_form_fails_once(self, golden):
        entry = golden["dim2-normal-form"]
        pairing = property_L(entry.a, entry.b)
        result = exceptional_set_solver(entry.a, entry.b, pairing, 20)
        assert result.members == (3,)
        assert 3 in result.candidates

    def test_solver_needs_equal_exponentials(self):
        a, b = gen_st_pair(3, 4)
        pairing = property_L(a, b)
        assert pairing is not None
        with pytest.raises(PreconditionError, match="differ"):
            exceptional_set_solver(a, b, pairing, 5)

    def test_solver_needs_a_valid_pairing(self, tu):
        a0, b0 = tu
        pairing = property_L(a0, b0)
        p = pairing.perm
        swapped = EigenPairing(pairing.lam, pairing.mu, (p[1], p[0], p[2]))
        with pytest.raises(PreconditionError, match="pairing"):
            exceptional_set_solver(a0, b0, swapped, 5)

    def test_remark_pair_sweep_finds_failures(self, golden):
        entry = golden["dim2-remark"]
        assert exp_triple_equal(entry.a, entry.b)
        assert not condition3_verdict(entry.a, entry.b)
        records = sweep_records(entry.a, entry.b, range(2, 51))
        assert [r.t for r in records if not r.passed]

    @given(seed=seeds, n=st.integers(min_value=2, max_value=3))
    @settings(max_examples=15, deadline=None)
    def test_prop21_pairs_have_empty_exceptional_set(self, seed, n):
        a, b = gen_prop21_pair(n, seed)
        assert condition3_verdict(a, b)
        result = exceptional_set_solver(a, b, property_L(a, b), 50)
        assert result.members == ()


class TestStar:
    def test_verify_rejects_other_dimensions(self):
        zero = CMatrix.zeros(2)
        d = StarDecomp(0j, 0j, zero, zero, zero, zero)
        with pytest.raises(PreconditionError):
            star_verify(d, zero, zero)

    def test_tu_pair_is_degenerate_star(self, tu):
        a0, b0 = tu
        zero = CMatrix.zeros(3)
        d = StarDecomp(0j, 0j, a0, b0, zero, zero)
        assert star_verify(d, a0, b0)
        assert star_jordan_chevalley_check(d, a0, b0)

    def test_wrong_decomposition_is_rejected(self, tu):
        a0, b0 = tu
        zero = CMatrix.zeros(3)
        d = StarDecomp(1j, 0j, a0, b0, zero, zero)
        assert not star_verify(d, a0, b0)

    def test_contradiction_is_an_invariant_violation(self, tu, monkeypatch):
        a0, b0 = tu
        zero = CMatrix.zeros(3)
        d = StarDecomp(0j, 0j, a0, b0, zero, zero)
        monkeypatch.setattr(m_analysis, "exp_triple_equal", lambda *args: False)
        with pytest.raises(InvariantViolation):
            star_verify(d, a0, b0)

    @given(seed=seeds)
    @settings(max_examples=20, deadline=None)
    def test_generated_pairs_satisfy_identity(self, seed):
        a, b, d = gen_star_pair(seed)
        assert star_verify(d, a, b)
        assert exp_triple_equal(a, b)
        assert star_jordan_chevalley_check(d, a, b)

    @given(seed=seeds, t=st.integers(min_value=1, max_value=6))
    @settings(max_examples=20, deadline=None)
    def test_exponential_is_affine_in_t(self, seed, t):
        a, _, d = gen_star_pair(seed)
        expected = cmath.exp(t * d.sigma) * (np.eye(3) + t * d.f.data)
        assert_matrix_close(expm(a * t), expected, rtol=1e-8 * (1 + t * a.fro_norm()))

    def test_decompose_tu_pair(self, tu):
        notes = []
        d = star_decompose(*tu, notes=notes)
        assert d is not None
        assert star_verify(d, *tu)
        assert any("log part of A" in note for note in notes)

    @given(seed=seeds)
    @settings(max_examples=10, deadline=None)
    def test_decompose_recovers_the_generated_form(self, seed):
        a, b, expected = gen_star_pair(seed)
        assume(not commutes(a, b) and is_indecomposable(a, b))
        d = star_decompose(a, b)
        assert d is not None
        assert star_verify(d, a, b)
        scale = max(a.fro_norm(), b.fro_norm())
        assert abs(d.sigma - expected.sigma) <= 1e-8 * scale
        assert abs(d.tau - expected.tau) <= 1e-8 * scale
        for name in ("delta", "theta", "f", "g"):
            assert_matrix_close(
                getattr(d, name), getattr(expected, name), rtol=1e-8 * scale
            )

    def test_decompose_preconditions(self, tu):
        a0, b0 = tu
        with pytest.raises(PreconditionError):
            star_decompose(a0, a0 @ a0)
        with pytest.raises(PreconditionError):
            star_decompose(a0, b0 * 0.5)
        with pytest.raises(PreconditionError):
            star_decompose(CMatrix.identity(2), CMatrix.identity(2))


class TestAnalyze:
    def test_tu_report(self, tu):
        report = analyze(*tu)
        assert not report.commute
        assert report.triple_equal
        assert report.has_property_L
        assert not report.simultaneously_triangularizable
        assert report.indecomposable
        assert report.commutant_dim == 1
        assert report.condition3
        assert report.exceptional.members == ()
        assert report.exceptional.complete
        assert report.spectra_cf == (False, False)
        assert report.consistent
        assert report.star is not None
        assert report.tolerances == Tolerances.DEFAULT.to_dict()

    def test_trivial_pair(self):
        zero = CMatrix.zeros(1)
        report = analyze(zero, zero)
        assert report.commute
        assert report.triple_equal
        assert report.has_property_L
        assert report.condition3
        assert report.exceptional.members == ()
        assert report.consistent
        assert report.star is None

    def test_remark_pair_report(self, golden):
        entry = golden["dim2-remark"]
        report = analyze(entry.a, entry.b)
        assert report.triple_equal
        assert not report.has_property_L
        assert report.pairing is None
        assert not report.condition3
        assert report.exceptional.members
        assert report.consistent

    def test_catalog_expectations(self, golden):
        for entry in golden:
            report = analyze(entry.a, entry.b, 20)
            assert entry.expected.mismatches(report) == [], entry.name
            assert report.consistent, (entry.name, report.notes)

    @pytest.mark.parametrize("family", ["prop21", "star", "commuting"])
    def test_generated_families_are_consistent(self, family):
        for seed in range(3):
            if family == "prop21":
                a, b = gen_prop21_pair(3, seed)
            elif family == "star":
                a, b, _ = gen_star_pair(seed)
            else:
                a, b = gen_commuting_pair(3, seed)
            report = analyze(a, b, 20, workers=2)
            assert report.consistent, report.notes
            assert report.condition3 or family == "star"

    def test_real_growth_report(self):
        report = analyze(CMatrix([[20.0]]), CMatrix([[0.0]]), 50)
        assert report.triple_equal
        assert report.condition3
        assert report.exceptional.members == ()
        assert report.exceptional.complete
        assert report.consistent

    def test_overflow_propagates(self):
        with pytest.raises(OutOfRangeError):
            analyze(CMatrix.diag(800.0, -800.0), CMatrix.zeros(2), 5)

    def test_largest_deviation_is_logged(self, tu, caplog):
        caplog.set_level(logging.INFO, logger="commexp")
        analyze(*tu, 5)
        assert "largest deviation" in caplog.text

    def test_deterministic(self, tu_scaled):
        a, b, _ = gen_star_pair(3)
        for pair in (tu_scaled, (a, b)):
            assert analyze(*pair, 10) == analyze(*pair, 10)

    def test_complete_empty_set_implies_property_L(self, golden):
        pairs = [(entry.a, entry.b) for entry in golden]
        pairs += [gen_prop21_pair(2 + seed % 2, seed) for seed in range(4)]
        pairs += [gen_st_pair(3, seed) for seed in range(2)]
        certified = 0
        for a, b in pairs:
            report = analyze(a, b, 10)
            if report.exceptional.complete and not report.exceptional.members:
                certified += 1
                assert report.has_property_L
                assert report.condition3
        assert certified >= 5
