import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bec2model.errors import InvalidBasis
from bec2model.oracle import exact_unitary
from bec2model.wigner import (distribution, rotation_matrix, wigner_d, wigner_d_column, wigner_d_exact,
                              wigner_d_matrix, wigner_d_sum)


def test_zero_angle_is_identity():
    for N in (0, 1, 5, 40):
        assert np.array_equal(wigner_d_matrix(N, 0.0), np.eye(N + 1))
    assert wigner_d(6, 2, 2, 0.0) == 1.0
    assert wigner_d(6, 2, 4, 0.0) == 0.0


def test_element_matches_oracle_unitary():
    U = exact_unitary(1.0, 0.0, 6).matrix
    assert wigner_d(6, 2, 4, 1.0) == pytest.approx(U.conj().T[(2 + 6) // 2, (4 + 6) // 2].real, abs=1e-10)


def test_rotation_matrix_is_adjoint_of_displacement_with_phase():
    for N, th, ph in [(1, 0.4, 1.1), (7, 2.1, -0.6), (12, 1.0, 3.0)]:
        U = exact_unitary(th, ph, N).matrix
        assert np.abs(rotation_matrix(N, th, ph) - U.conj().T).max() < 1e-12


def test_distribution_matches_oracle_column():
    U = exact_unitary(0.7, 0.0, 10).matrix.conj().T
    d = distribution(10, 6, 0.7)
    assert np.abs(d.p - np.abs(U[:, 8]) ** 2).max() < 1e-10


def test_distribution_delta_at_zero_angle():
    d = distribution(8, -2, 0.0)
    assert d.p.tolist() == [0, 0, 0, 1, 0, 0, 0, 0, 0]


def test_large_sector_normalisation_and_single_peak():
    d = distribution(1000, 1000, 1.0)
    assert abs(d.p.sum() - 1) < 1e-10
    peaks = np.sum((d.p[1:-1] > d.p[:-2]) & (d.p[1:-1] >= d.p[2:]))
    assert peaks == 1
    assert abs(d.argmax() - 1000 * math.cos(1.0)) <= 4


def test_normalisation_at_two_thousand():
    col = wigner_d_column(2000, 0, 1.3)
    assert abs(col @ col - 1) < 1e-9


def test_phi_does_not_change_distribution():
    a = distribution(30, 10, 0.9, phi=0.0)
    b = distribution(30, 10, 0.9, phi=2.5)
    assert np.array_equal(a.p, b.p)


def test_peak_drifts_monotonically_from_top_to_bottom():
    N = 200
    args = [distribution(N, N, th).argmax() for th in np.linspace(0.0, math.pi, 41)]
    assert args[0] == N and args[-1] == -N
    assert all(x >= y for x, y in zip(args, args[1:]))


@pytest.mark.parametrize("N", [1, 2, 17, 50, 200])
def test_orthogonality(N):
    D = wigner_d_matrix(N, 1.9)
    assert np.abs(D.T @ D - np.eye(N + 1)).max() < 1e-10


def test_near_pole_uses_stable_route():
    D = wigner_d_matrix(30, 1e-14)
    assert np.abs(D - np.eye(31)).max() < 1e-12
    D = wigner_d_matrix(30, math.pi)
    assert np.abs(D.T @ D - np.eye(31)).max() < 1e-12


def test_tiny_values_are_flushed():
    col = wigner_d_column(1000, 1000, 0.3)
    nz = np.abs(col[col != 0])
    assert nz.min() >= 1e-300


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 40), st.data(), st.floats(0.0, math.pi))
def test_recurrence_matches_high_precision(N, data, theta):
    m = data.draw(st.sampled_from(range(-N, N + 1, 2)))
    m0 = data.draw(st.sampled_from(range(-N, N + 1, 2)))
    assert abs(wigner_d(N, m, m0, theta) - float(wigner_d_exact(N, m, m0, theta))) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 30), st.data(), st.floats(0.05, math.pi - 0.05))
def test_sum_route_agrees_on_small_sectors(N, data, theta):
    m = data.draw(st.sampled_from(range(-N, N + 1, 2)))
    m0 = data.draw(st.sampled_from(range(-N, N + 1, 2)))
    assert abs(wigner_d_sum(N, m, m0, theta) - wigner_d(N, m, m0, theta)) < 1e-10


def test_exact_route_in_matrix_form():
    D = wigner_d_matrix(5, 0.8, method="exact")
    assert np.abs(D - wigner_d_matrix(5, 0.8)).max() < 1e-13


def test_invalid_labels_raise():
    with pytest.raises(InvalidBasis):
        wigner_d(4, 3, 0, 0.2)
    with pytest.raises(InvalidBasis):
        distribution(4, 6, 0.2)
    with pytest.raises(ValueError):
        wigner_d_matrix(4, 0.5, method="nope")
