import numpy as np
import pytest

from bec2model.errors import DegenerateState, InvalidOperator
from bec2model.fock import MonomialOp
from bec2model.loss import (LossSpec, accessible_totals, background_correction, conjugated_block,
                            degenerate_block_is_nilpotent, enlarged_first_order, generalized_distribution,
                            loss_distribution, s_A_degenerate, tbr_correction)
from bec2model.wigner import distribution


def test_accessible_totals():
    N = 10
    assert accessible_totals(LossSpec.background({2: 0.1}), N) == {N, N - 2}
    assert accessible_totals(LossSpec.background({2: 1, 4: 1, 6: 1}), N) == {N, N - 2, N - 4, N - 6}
    assert accessible_totals(LossSpec.tbr(0.2), N) == {N, N - 2, N - 3}
    assert accessible_totals(LossSpec.background({12: 1}), N) == {N}


def test_shared_label_degeneracy():
    N = 8
    A = {N, N - 2}
    assert not s_A_degenerate(N, A)
    assert s_A_degenerate(N - 2, A)
    assert not any(s_A_degenerate(m, {N}) for m in range(-N, N + 1, 2))


def test_degenerate_blocks_are_strictly_triangular():
    N = 6
    assert degenerate_block_is_nilpotent(LossSpec.background({2: 0.3}), {N, N - 2}, N - 4)
    assert degenerate_block_is_nilpotent(LossSpec.background({4: 0.3}), {N, N - 4}, 0)
    assert degenerate_block_is_nilpotent(LossSpec.tbr(0.4), {N, N - 2, N - 3}, N - 4, theta=0.7, phi=0.3)
    with pytest.raises(InvalidOperator):
        degenerate_block_is_nilpotent(LossSpec(()), {N}, 0)


def test_number_conserving_terms_rejected():
    with pytest.raises(InvalidOperator):
        LossSpec((MonomialOp.parse("a+ a"),))
    with pytest.raises(InvalidOperator):
        LossSpec((MonomialOp.parse("a a+"),))


def test_zero_strength_leaves_distribution_unchanged():
    N, th = 40, 1.0
    base = distribution(N, N, th).p
    s = background_correction(N, th, {2: 0.0, 4: 0.0}, -2 * N, 1)
    assert np.array_equal(s.p, base) and not np.any(s.p1)
    s = tbr_correction(N, th, 0.0, -2 * N, 1)
    assert not np.any(s.p1)


def test_odd_ejection_has_no_effect():
    s = background_correction(30, 1.0, {3: 0.5}, -60, 1)
    assert not np.any(s.p1)


@pytest.mark.parametrize("phi", [0.0, 0.9])
@pytest.mark.parametrize("N", [4, 9, 16])
def test_background_closed_form_against_oracle(N, phi):
    alphas = {2: -0.1, 4: -0.001}
    a = background_correction(N, 1.1, alphas, -2 * N, 1, phi)
    b = loss_distribution(LossSpec.background(alphas), N, N, 1.1, -2 * N, 1, phi, method="oracle")
    assert np.abs(a.p1 - b.p1).max() < 1e-10


@pytest.mark.parametrize("phi", [0.0, 1.4])
@pytest.mark.parametrize("N", [3, 8, 15])
def test_tbr_closed_form_against_oracle(N, phi):
    a = tbr_correction(N, 0.8, 0.01, -2 * N, 1, phi)
    b = loss_distribution(LossSpec.tbr(0.01), N, N, 0.8, -2 * N, 1, phi, method="oracle")
    assert np.abs(a.p1 - b.p1).max() < 1e-10


def test_tbr_single_branch_option_differs():
    a = tbr_correction(20, 1.0, 0.01, -40, 1)
    b = tbr_correction(20, 1.0, 0.01, -40, 1, include_exchange_branch=False)
    assert np.abs(a.p1 - b.p1).max() > 1e-6


def test_sigma_sign_flips_correction():
    a = tbr_correction(50, 1.0, 1e-3, -100, 1)
    b = tbr_correction(50, 1.0, -1e-3, -100, 1)
    assert np.array_equal(a.p1, -b.p1)


@pytest.mark.parametrize("m0", [-6, 0, 4])
def test_general_path_matches_oracle_for_any_start(m0):
    N = 10
    spec = LossSpec.from_alphas({(2, 0): 0.2, (1, 1): -0.05, (0, 2): 0.1})
    a = loss_distribution(spec, N, m0, 0.9, -2 * m0 + 0.5, 1, 0.4)
    b = loss_distribution(spec, N, m0, 0.9, -2 * m0 + 0.5, 1, 0.4, method="oracle")
    assert np.abs(a.p1 - b.p1).max() < 1e-10


def test_conjugated_block_analytic_equals_oracle():
    spec = LossSpec.tbr(0.3)
    for n_out in (6, 5):
        a = conjugated_block(spec, 8, n_out, 1.2, 0.5)
        b = conjugated_block(spec, 8, n_out, 1.2, 0.5, method="oracle")
        assert np.abs(a - b).max() < 1e-12


def test_single_sector_reduces_to_plain_distribution():
    N = 6
    spec = LossSpec.background({8: 1.0})                # cannot act on 6 particles
    s = loss_distribution(spec, N, 2, 0.7, -4, 1)
    assert np.allclose(s.p, distribution(N, 2, 0.7).p) and not np.any(s.p1)


def test_wrong_parity_sectors_drop_out():
    corr = enlarged_first_order(LossSpec.background({1: 0.5}), 8, 8, 0.6, -16, 1)
    assert np.any(corr.sectors[7])
    assert not np.any(generalized_distribution(corr, 0.6).p1)


def test_degenerate_components_skip_or_raise():
    N = 8
    spec = LossSpec.background({2: 0.2})
    corr = enlarged_first_order(spec, N, 2, 1.0, -4, 1)
    assert (N - 2, 2) in corr.skipped
    with pytest.raises(DegenerateState):
        enlarged_first_order(spec, N, 2, 1.0, -4, 1, on_degenerate="raise")
    with pytest.raises(DegenerateState):
        background_correction(N, 1.0, {2: 0.1}, -(2 * N - 2), 1)
    with pytest.raises(ValueError):
        tbr_correction(2, 1.0, 0.1, -4, 1)
