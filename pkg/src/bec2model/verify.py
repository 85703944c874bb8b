"""Closed forms against the brute-force oracle on small sectors.

Every check returns a :class:`Check`; :func:`run_all` collects them.  The
command-line ``verify`` command prints the report and fails on any breach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import InitialState, relative_population
from .fock import build_operator_matrix, number_difference
from .loss import LossSpec, background_correction, loss_distribution, tbr_correction
from .model import ModelParams, build_h0, build_h2, couplings_from_constraints
from .oracle import conjugate_numeric, exact_eigensystem, exact_propagate, exact_unitary, expectation
from .perturb import Kind, bare_perturbation, degenerate_block, degenerate_solve, first_order_coefficients, \
    perturbation_matrix
from .symbolic import n_model_hamiltonian
from .wigner import rotation_matrix

THETAS = (0.3, 1.0, 2.2)
PHIS = (0.0, 0.7)


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<28} err={self.error:.3e}  tol={self.tol:.0e}"


def _ns(max_n: int):
    return [n for n in (1, 2, 5, 8, 12) if n <= max_n]


def check_rotation(max_n: int = 12) -> Check:
    err = 0.0
    for N in _ns(max_n):
        for th in THETAS:
            for ph in PHIS:
                U = exact_unitary(th, ph, N).matrix
                err = max(err, float(np.abs(rotation_matrix(N, th, ph) - U.conj().T).max()))
    return Check("rotation vs exact unitary", err, 1e-12)


def check_constraints(max_n: int = 12) -> Check:
    """``U H2 U^dagger`` is diagonal and equal to ``H0`` when the couplings obey the constraints."""
    err = 0.0
    for N in _ns(max_n):
        for th in THETAS:
            for ph in PHIS:
                p = ModelParams(N, th, ph, 0.37, 1.3)
                H = build_h2(couplings_from_constraints(p), ph, N)
                D = conjugate_numeric(H, th, ph).matrix
                err = max(err, float(np.abs(D - build_h0(p)).max()) / max(1.0, N * N))
    return Check("constraint set diagonalises", err, 1e-12)


def check_matrix_elements(max_n: int = 12) -> Check:
    err = 0.0
    for N in _ns(max_n):
        for kind in Kind:
            for th in THETAS:
                for ph in PHIS:
                    exact = conjugate_numeric(bare_perturbation(kind, 1.0, ph, N), th, ph).matrix
                    closed = perturbation_matrix(kind, th, ph, N)
                    err = max(err, float(np.abs(exact - closed).max()) / max(1.0, N * N))
    return Check("perturbation matrix elements", err, 1e-12)


def check_first_order(max_n: int = 12, eps: float = 2e-4) -> Check:
    """First-order amplitudes against a Richardson-extrapolated central difference of exact eigenvectors."""
    err = 0.0
    N = max(n for n in _ns(max_n))
    for kind in Kind:
        for m0 in (-N, 0 if N % 2 == 0 else 1, N - 2):
            p = ModelParams(N, 0.8, 0.4, -2 * m0 + 0.5, 1.0)
            Ht = perturbation_matrix(kind, p.theta, p.phi, N)
            j = (m0 + N) // 2

            def vec(e):
                w, V = exact_eigensystem(build_h0(p) + e * Ht)
                k = int(np.argmax(np.abs(V[j])))
                v = V[:, k]
                return v * (abs(v[j]) / v[j])

            def central(h):
                return (vec(h) - vec(-h)) / (2 * h)

            deriv = (4 * central(eps / 2) - central(eps)) / 3
            corr = first_order_coefficients(kind, p, m0, 1.0, warn=False)
            ref = np.zeros(N + 1, dtype=complex)
            for m, a in corr.coefficients.items():
                ref[(m + N) // 2] = a
            deriv[j] = 0.0
            err = max(err, float(np.abs(deriv - ref).max()))
    return Check("first-order amplitudes", err, 1e-9)


def check_degenerate(ns=(10, 1000), n_theta: int = 1000) -> Check:
    err = 0.0
    for N in ns:
        for kind in (Kind.OMEGA, Kind.LAMBDA_SMALL):
            for th in np.linspace(0.0, math.pi, n_theta):
                sol = degenerate_solve(kind, th, N, 1.0)
                p = ModelParams(N, th, 0.0, -(2 * N - 2), 1.0)
                w = np.linalg.eigvalsh(degenerate_block(kind, p, (N - 2, N)))
                err = max(err, abs(w[0] - sol.eps_minus), abs(w[1] - sol.eps_plus))
    return Check("degenerate closed forms", err, 1e-12 * max(ns))


def check_loss(max_n: int = 12) -> Check:
    err = 0.0
    for N in [n for n in _ns(max_n) if n >= 3]:
        for th in THETAS:
            A1, A2 = -2.0 * N, 1.0
            bg = {2: -0.1, 4: -0.01, 3: 0.2}
            closed = background_correction(N, th, bg, A1, A2)
            oracle = loss_distribution(LossSpec.background(bg), N, N, th, A1, A2, method="oracle")
            err = max(err, float(np.abs(closed.p1 - oracle.p1).max()))
            closed = tbr_correction(N, th, 0.3, A1, A2)
            oracle = loss_distribution(LossSpec.tbr(0.3), N, N, th, A1, A2, method="oracle")
            err = max(err, float(np.abs(closed.p1 - oracle.p1).max()))
    return Check("loss closed forms", err, 1e-10)


def check_dynamics(N: int = 8, t_max: float = 20.0, n_t: int = 201) -> Check:
    p = ModelParams(N, 1.0, 0.3, -1.9, 1.0)
    state = InitialState.gaussian(N, 1.0, 2.0)
    t = np.linspace(0.0, t_max, n_t)
    U = exact_unitary(p.theta, p.phi, N).matrix
    psi0 = U.conj().T @ state.C
    H2 = build_h2(couplings_from_constraints(p), p.phi, N)
    psi = exact_propagate(H2, psi0, t)
    M = number_difference(N)
    exact = np.array([expectation(M, row).real for row in psi])
    closed = relative_population(state, p, t).values
    return Check("unperturbed evolution", float(np.abs(exact - closed).max()), 1e-10)


def check_symbolic(n_body: int = 3, ns=(2, 5)) -> Check:
    err = 0.0
    amps = {i: 0.3 + 0.7 * i for i in range(n_body + 1)}
    H = n_model_hamiltonian(n_body)
    for N in ns:
        for th in THETAS:
            for ph in PHIS:
                M = build_operator_matrix(H.to_monomials(th, ph, amps), N)
                m = np.diag(np.arange(-N, N + 1, 2, dtype=float))
                H0 = sum(a * np.linalg.matrix_power(m, i) for i, a in amps.items())
                U = exact_unitary(th, ph, N).matrix
                err = max(err, float(np.abs(M - U.conj().T @ H0 @ U).max()) / max(1.0, float(N) ** n_body))
    return Check("symbolic displacement", err, 1e-12)


def run_all(max_n: int = 12) -> list[Check]:
    return [
        check_rotation(max_n),
        check_constraints(max_n),
        check_matrix_elements(max_n),
        check_first_order(max_n),
        check_degenerate(ns=(min(10, max_n), 1000), n_theta=200),
        check_loss(max_n),
        check_dynamics(min(8, max_n)),
        check_symbolic(),
    ]
