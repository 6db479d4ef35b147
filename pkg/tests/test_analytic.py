import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import erfc

import oracles
from tdhp_uwoc.analytic import (
    DEFAULT_Q_GRID,
    FEC_THRESHOLD,
    TdhpParams,
    ber_floor,
    ber_pam2,
    ber_pam4,
    ber_tdhp,
    bits_per_symbol,
    db_linear,
    fec_limit_snr,
    linear_db,
    optimize_q,
)
from tdhp_uwoc.errors import DomainError, NoSolution

# frozen from tests/oracles.py (50-digit mpmath)
HALF_ERFC_1 = 0.078649603525142565
THREE_EIGHTHS_ERFC_1 = 0.058987202643856924
FEC_PAM2_DB = 8.6481070717690979
FEC_PAM4_DB = 16.782226646044819
FEC_HALF_Q0_DB = 15.919829309886325
FEC_HALF_Q06_DB = 14.031576401674911


def test_erfc_matches_high_precision_oracle():
    x = np.linspace(0.0, 6.0, 601)
    ref = np.array([float(oracles.erfc(v)) for v in x])
    rel = np.abs(erfc(x) - ref) / ref
    assert rel.max() < 1e-10


def test_ber_pam2_examples():
    assert ber_pam2(0, 0) == 0.5
    assert ber_pam2(2, 0) == pytest.approx(HALF_ERFC_1, rel=1e-12)
    for s in (0.0, 3.0, 1e4):
        assert ber_pam2(s, 1) == 0.5


def test_ber_pam4_examples():
    assert ber_pam4(0, 0) == 0.375
    assert ber_pam4(14, 0) == pytest.approx(THREE_EIGHTHS_ERFC_1, rel=1e-12)
    assert ber_pam4(7, 1) == pytest.approx(THREE_EIGHTHS_ERFC_1, rel=1e-12)


def test_ber_tdhp_mixture():
    s = np.linspace(0, 40, 17)
    np.testing.assert_array_equal(ber_tdhp(s, TdhpParams(0, 0)), ber_pam2(s, 0))
    np.testing.assert_array_equal(ber_tdhp(s, TdhpParams(1, 0)), ber_pam4(s, 0))
    assert ber_tdhp(0, TdhpParams(0.5, 0)) == pytest.approx(0.4375)
    assert ber_tdhp(20.0, TdhpParams(0.3, 0.4)) == pytest.approx(
        0.3 * ber_pam4(20.0, 0.4) + 0.7 * ber_pam2(20.0, 0.4)
    )


def test_vector_and_scalar_agree():
    s = np.array([0.5, 5.0, 50.0])
    vec = ber_pam4(s, 0.3)
    assert isinstance(ber_pam4(5.0, 0.3), float)
    assert vec[1] == ber_pam4(5.0, 0.3)


@pytest.mark.parametrize("bad", [(-1.0, 0.0), (1.0, -0.1), (1.0, 1.1), (float("nan"), 0.0)])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        ber_pam2(*bad)
    with pytest.raises(DomainError):
        ber_pam4(*bad)


def test_params_validation_and_pure_formats():
    with pytest.raises(DomainError):
        TdhpParams(1.2, 0)
    with pytest.raises(DomainError):
        TdhpParams(0.5, -0.1)
    assert TdhpParams(0.0, 0.7).q == 0.0
    assert TdhpParams(1.0, 0.7).q == 0.0
    assert TdhpParams(0.5, 0.7).q == 0.7


def test_bits_per_symbol():
    assert bits_per_symbol(0) == 1
    assert bits_per_symbol(1) == 2
    assert bits_per_symbol(0.5) == 1.5
    assert TdhpParams(0.25).bits_per_symbol == 1.25


def test_db_conversions():
    assert db_linear(0) == 1.0
    assert db_linear(10) == pytest.approx(10.0)
    assert linear_db(db_linear(8.64)) == pytest.approx(8.64, rel=1e-12)
    with pytest.raises(DomainError):
        linear_db(0.0)
    with pytest.raises(DomainError):
        linear_db(-3.0)


@pytest.mark.parametrize(
    "p, q, expected",
    [(0, 0, FEC_PAM2_DB), (1, 0, FEC_PAM4_DB), (0.5, 0, FEC_HALF_Q0_DB), (0.5, 0.6, FEC_HALF_Q06_DB)],
)
def test_fec_limit_against_oracle(p, q, expected):
    res = fec_limit_snr(TdhpParams(p, q), FEC_THRESHOLD, tol_db=1e-6)
    assert res.converged
    assert res.snr_db == pytest.approx(expected, abs=1e-6)
    assert res.snr_linear == pytest.approx(10 ** (res.snr_db / 10))


def test_fec_limit_default_tolerance_brackets_root():
    res = fec_limit_snr(TdhpParams(0, 0))
    lo, hi = res.bracket_db
    assert hi - lo <= 0.01
    assert lo <= FEC_PAM2_DB <= hi
    assert round(res.snr_db, 2) == 8.65 or abs(res.snr_db - 8.64) < 0.01


def test_fec_limit_no_solution_reports_floor():
    with pytest.raises(NoSolution) as exc:
        fec_limit_snr(TdhpParams(0.5, 1.0))
    assert exc.value.floor == 0.25
    assert ber_floor(TdhpParams(0.5, 1.0)) == 0.25
    assert ber_floor(TdhpParams(0.5, 0.9)) == 0.0


def test_fec_limit_threshold_domain():
    with pytest.raises(DomainError):
        fec_limit_snr(TdhpParams(0.0), threshold=0.6)
    with pytest.raises(DomainError):
        fec_limit_snr(TdhpParams(0.0), threshold=0.0)
    with pytest.raises(DomainError):
        fec_limit_snr(TdhpParams(0.0), tol_db=0)


def test_fec_limit_expands_bracket():
    # needs > 60 dB: PAM2 part gets 1e-7 of its power
    res = fec_limit_snr(TdhpParams(0.5, 1 - 1e-7), threshold=1e-3)
    assert res.snr_db > 60
    assert ber_tdhp(res.snr_linear, TdhpParams(0.5, 1 - 1e-7)) == pytest.approx(1e-3, rel=1e-2)


def test_optimize_q_default_grid():
    opt = optimize_q(0.5)
    assert opt.q_star == 0.6
    assert [q for q, _ in opt.grid] == list(DEFAULT_Q_GRID)
    assert opt.snr_at_fec_limit == min(s for _, s in opt.grid)
    gap = fec_limit_snr(TdhpParams(0.5, 0)).snr_db - opt.snr_at_fec_limit
    assert 1.5 <= gap <= 2.5


def test_optimize_q_singleton_and_errors():
    opt = optimize_q(0.5, q_grid=[0.0])
    assert opt.q_star == 0.0
    assert opt.snr_at_fec_limit == fec_limit_snr(TdhpParams(0.5, 0)).snr_db
    with pytest.raises(DomainError):
        optimize_q(0.0)
    with pytest.raises(DomainError):
        optimize_q(0.5, q_grid=[0.2, 1.0])


def _failing_above(limit, real=fec_limit_snr):
    def fake(params, threshold=FEC_THRESHOLD, tol_db=0.01):
        if params.q > limit:
            raise NoSolution("injected", floor=0.5)
        return real(params, threshold, tol_db)

    return fake


def test_optimize_q_skips_infeasible_points(monkeypatch):
    import tdhp_uwoc.analytic as analytic

    monkeypatch.setattr(analytic, "fec_limit_snr", _failing_above(0.55))
    opt = analytic.optimize_q(0.5)
    assert opt.q_star == 0.5
    assert [q for q, s in opt.grid if s is None] == [0.6, 0.7, 0.8, 0.9]


def test_optimize_q_all_infeasible(monkeypatch):
    import tdhp_uwoc.analytic as analytic

    monkeypatch.setattr(analytic, "fec_limit_snr", _failing_above(-1.0))
    with pytest.raises(NoSolution):
        analytic.optimize_q(0.5)


def test_optimize_q_tie_breaks_to_smaller_q():
    opt = optimize_q(0.5, q_grid=[0.6, 0.6])
    assert opt.q_star == 0.6
    assert len(opt.grid) == 2


def test_optimize_q_refinement_never_worse():
    grid = optimize_q(0.5)
    fine = optimize_q(0.5, refine=True)
    assert fine.snr_at_fec_limit <= grid.snr_at_fec_limit
    assert 0.5 < fine.q_star < 0.7


snr_st = st.floats(min_value=0.0, max_value=500.0)
p_st = st.floats(min_value=0.0, max_value=1.0)
q_st = st.floats(min_value=0.0, max_value=0.99)


@given(a=snr_st, b=snr_st, p=p_st, q=q_st)
def test_ber_strictly_decreasing_in_snr(a, b, p, q):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-6 * max(1.0, hi):
        return
    params = TdhpParams(p, q)
    # underflow to 0 makes strictness meaningless far in the tail
    if ber_tdhp(hi, params) > 1e-300:
        assert ber_tdhp(hi, params) < ber_tdhp(lo, params)
    if ber_pam2(hi, q) > 1e-300:
        assert ber_pam2(hi, q) < ber_pam2(lo, q)
    if ber_pam4(hi, q) > 1e-300:
        assert ber_pam4(hi, q) < ber_pam4(lo, q)


@given(s=snr_st, p=p_st, q=st.floats(0.0, 1.0))
def test_ber_tdhp_bounds(s, p, q):
    params = TdhpParams(p, q)
    val = ber_tdhp(s, params)
    assert 0.0 <= val <= (1 - params.p) * 0.5 + params.p * 0.375 + 1e-15


@given(p=p_st, q=st.floats(0.0, 0.95))
def test_fec_residual(p, q):
    params = TdhpParams(p, q)
    res = fec_limit_snr(params, FEC_THRESHOLD, tol_db=1e-3)
    assert abs(ber_tdhp(res.snr_linear, params) - FEC_THRESHOLD) / FEC_THRESHOLD < 1e-3


@given(p=st.floats(0.01, 0.99))
def test_optimization_never_hurts(p):
    assert optimize_q(p).snr_at_fec_limit <= fec_limit_snr(TdhpParams(p, 0)).snr_db


def test_fec_limit_nondecreasing_in_p():
    ps = np.linspace(0, 1, 41)
    limits = [fec_limit_snr(TdhpParams(float(p)), tol_db=1e-6).snr_db for p in ps]
    assert all(b >= a for a, b in zip(limits, limits[1:]))


def test_pure_format_oracles_closed_form():
    assert float(oracles.db(oracles.pam2_fec_snr(FEC_THRESHOLD))) == pytest.approx(FEC_PAM2_DB, abs=1e-12)
    assert float(oracles.db(oracles.pam4_fec_snr(FEC_THRESHOLD))) == pytest.approx(FEC_PAM4_DB, abs=1e-12)
    assert math.isclose(float(oracles.tdhp_fec_snr(0.5, 0.6, FEC_THRESHOLD)), FEC_HALF_Q06_DB, abs_tol=1e-10)
