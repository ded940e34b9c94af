import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinsep.errors import ValidationError
from twinsep.model import (
    ModelParams,
    SolverInput,
    eval_pmf,
    predict_lmax,
    solve_approx,
    solve_exact,
    solve_f0,
)
from twinsep.sieve import CountRecord

s0_values = st.floats(min_value=0.1, max_value=1000.0, allow_nan=False)


def relation_residuals(params, s0, pi2, f):
    """Substitute params into the three model relations; scale by lhs size."""
    a, q, l_cut = params.a, params.q, params.l_cut
    c = f / pi2
    r1 = abs(a / (1 - q) - (1 + c))
    r2 = abs(a * (1 - q ** (l_cut + 1)) / (1 - q) - 1.0)
    r3 = abs(q / (1 - q) - (l_cut + 1) * c - s0) / max(1.0, s0)
    return r1, r2, r3


class TestSolveF0:
    def test_s0_one(self):
        p = solve_f0(1.0)
        assert p.q == pytest.approx(0.5, abs=1e-15)
        assert p.a == pytest.approx(0.5, abs=1e-15)
        assert p.sbar == pytest.approx(1.4426950408889634, abs=1e-14)
        assert p.l_cut is None and p.f == 0.0

    def test_s0_ten(self):
        p = solve_f0(10.0)
        assert p.sbar == pytest.approx(10.49205868725707, abs=1e-12)
        assert p.a == pytest.approx(1 / 11, abs=1e-15)
        # both closed-form sums must come back exact
        assert p.a / (1 - p.q) == pytest.approx(1.0, abs=1e-12)
        assert p.a * p.q / (1 - p.q) ** 2 == pytest.approx(10.0, rel=1e-12)

    def test_large_s0_tail(self):
        p = solve_f0(1e4)
        assert abs(p.sbar - 1e4 - 0.5) < 1e-3

    @pytest.mark.parametrize("s0", [1e2, 1e3, 1e4])
    def test_sbar_tracks_s0(self, s0):
        p = solve_f0(s0)
        assert p.sbar / s0 - 1 < 1.1 / (2 * s0)
        assert p.sbar > s0

    @settings(max_examples=300)
    @given(s0=s0_values)
    def test_closed_form_identities(self, s0):
        p = solve_f0(s0)
        total = p.a / (1 - p.q)
        mean = p.a * p.q / (1 - p.q) ** 2
        assert abs(total - 1.0) <= 1e-12
        assert abs(mean - s0) <= 1e-12 * max(1.0, s0)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValidationError):
            solve_f0(0.0)
        with pytest.raises(ValidationError):
            solve_f0(-2.0)


class TestSolveApprox:
    def test_reference_case(self):
        p = solve_approx(SolverInput(s0=10.0, pi2=1000, f=1.0))
        assert p.l_cut == pytest.approx(71.48706060044306, abs=1e-9)
        assert p.a == pytest.approx(1.001 / 11, rel=1e-12)
        assert p.sbar == pytest.approx(10.49205868725707, abs=1e-12)

    def test_normalisation_with_real_cutoff(self):
        p = solve_approx(SolverInput(s0=10.0, pi2=1000, f=1.0))
        total = p.a * (1 - p.q ** (p.l_cut + 1)) / (1 - p.q)
        assert abs(total - 1.0) < 1e-10

    def test_small_f_recovers_f0(self):
        base = solve_f0(10.0)
        p = solve_approx(SolverInput(s0=10.0, pi2=10**6, f=1e-6))
        assert p.l_cut > 250
        assert p.a == pytest.approx(base.a, rel=1e-10)
        assert p.sbar == base.sbar

    def test_f_zero_delegates(self):
        p = solve_approx(SolverInput(s0=10.0, pi2=1000, f=0.0))
        assert p == solve_f0(10.0)

    def test_f_equal_pi2_rejected(self):
        with pytest.raises(ValidationError):
            SolverInput(s0=10.0, pi2=1000, f=1000.0)


class TestSolveExact:
    def test_f_zero_degenerate(self):
        assert solve_exact(SolverInput(s0=7.0, pi2=100, f=0.0)) == solve_f0(7.0)

    def test_reference_case(self):
        s0, pi2, f = 10.0, 1000, 1.0
        p = solve_exact(SolverInput(s0=s0, pi2=pi2, f=f), tol=1e-12)
        r1, r2, r3 = relation_residuals(p, s0, pi2, f)
        assert max(r1, r2, r3) < 1e-10
        assert p.q > 10 / 11  # mean relation pushes q above the approximate value
        assert p.sbar >= solve_approx(SolverInput(s0=s0, pi2=pi2, f=f)).sbar

    def test_desk_case_n100(self):
        s0, pi2, f = 1.125, 8, 1.0
        p = solve_exact(SolverInput(s0=s0, pi2=pi2, f=f), tol=1e-12)
        r1, r2, r3 = relation_residuals(p, s0, pi2, f)
        assert max(r1, r2, r3) < 1e-10
        assert p.l_cut > 0

    @settings(max_examples=150, deadline=None)
    @given(s0=s0_values, pi2=st.sampled_from([100, 10_000, 10**6]), f=st.sampled_from([0.5, 1.0, 5.0]))
    def test_random_inputs_satisfy_relations(self, s0, pi2, f):
        if f > pi2 / 10:  # stay inside the modelled regime
            f = pi2 / 10
        p = solve_exact(SolverInput(s0=s0, pi2=pi2, f=f), tol=1e-12)
        r1, r2, r3 = relation_residuals(p, s0, pi2, f)
        assert max(r1, r2, r3) < 1e-10

    def test_tol_must_be_positive(self):
        with pytest.raises(ValidationError):
            solve_exact(SolverInput(s0=1.0, pi2=100, f=1.0), tol=0.0)


class TestEvalPmf:
    def test_value_at_zero(self):
        p = solve_f0(1.0)
        assert eval_pmf(p, 0) == pytest.approx(0.5, abs=1e-15)

    def test_ratio_law(self):
        p = solve_approx(SolverInput(s0=3.0, pi2=500, f=1.0))
        for s in range(0, int(p.l_cut) - 1):
            ratio = eval_pmf(p, s) / eval_pmf(p, s + 1)
            assert ratio == pytest.approx(math.exp(1 / p.sbar), rel=1e-12)

    def test_zero_beyond_cutoff(self):
        p = solve_approx(SolverInput(s0=3.0, pi2=500, f=1.0))
        assert eval_pmf(p, int(p.l_cut) + 1) == 0.0

    def test_mass_below_cutoff_at_most_one(self):
        p = solve_approx(SolverInput(s0=3.0, pi2=500, f=1.0))
        total = sum(eval_pmf(p, s) for s in range(0, math.floor(p.l_cut) + 1))
        assert total <= 1.0 + 1e-12

    def test_negative_separation_rejected(self):
        with pytest.raises(ValidationError):
            eval_pmf(solve_f0(1.0), -1)


class TestPredictLmax:
    def test_n100_case(self):
        rec = CountRecord(n=100, pi1=25, pi2=8)
        l_cut = predict_lmax(rec, f=1.0)
        assert l_cut == pytest.approx(2.4548166450612476, abs=1e-12)
        # observed maximum separation below 100 is 2
        assert 2 <= math.ceil(l_cut)

    def test_decreasing_in_f(self):
        rec = CountRecord(n=10**6, pi1=78498, pi2=8169)
        ls = [predict_lmax(rec, f=f) for f in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(ls, ls[1:]))

    def test_increasing_in_pi2_at_fixed_s0(self):
        ls = [
            solve_approx(SolverInput(s0=5.0, pi2=pi2, f=1.0)).l_cut
            for pi2 in (100, 1000, 10_000, 100_000)
        ]
        assert all(a < b for a, b in zip(ls, ls[1:]))

    def test_increasing_in_s0(self):
        ls = [
            solve_approx(SolverInput(s0=s0, pi2=10_000, f=1.0)).l_cut
            for s0 in (1.0, 2.0, 5.0, 20.0)
        ]
        assert all(a < b for a, b in zip(ls, ls[1:]))

    def test_requires_positive_f(self):
        with pytest.raises(ValidationError):
            predict_lmax(CountRecord(n=100, pi1=25, pi2=8), f=0.0)


class TestModelParamsValidation:
    def test_q_sbar_consistency_enforced(self):
        with pytest.raises(ValidationError):
            ModelParams(a=0.5, sbar=2.0, q=0.5, l_cut=None, f=0.0)

    def test_cutoff_flag_tied_to_f(self):
        with pytest.raises(ValidationError):
            ModelParams(a=0.5, sbar=1 / math.log(2), q=0.5, l_cut=10.0, f=0.0)
        with pytest.raises(ValidationError):
            ModelParams(a=0.5, sbar=1 / math.log(2), q=0.5, l_cut=None, f=1.0)

    def test_l_ceil(self):
        p = solve_approx(SolverInput(s0=10.0, pi2=1000, f=1.0))
        assert p.l_ceil == 72
        assert solve_f0(1.0).l_ceil is None
