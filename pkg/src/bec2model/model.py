"""The solvable two-mode Hamiltonian H0, its displaced form H2, and energies.

``H0 = A1 m + A2 m^2`` is diagonal in ``|N, m>``.  Displacing it with
``U = exp(xi a+b - xi* ab+)``, ``xi = theta exp(i phi) / 2``, gives
``H2 = U^dagger H0 U``, which is the general two-body Hamiltonian

    A0 + omega m + lambda (e^{i phi} a+b + h.c.) + U_el a+a b+b
       + Lambda (e^{2 i phi} a+a+bb + h.c.)
       + mu (e^{i phi} (a+a+ab - a+b+bb) + h.c.)

with couplings tied to ``(A1, A2, theta)`` by :func:`couplings_from_constraints`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import AmbiguousMinimum
from .fock import MonomialOp, allowed_m, build_operator_matrix, exchange_raise_matrix


@dataclass(frozen=True)
class ModelParams:
    """Inputs of the solvable model on the ``N``-particle sector.

    ``A1`` and ``A2`` may be ints or Fractions; degeneracy tests then run in
    exact arithmetic.  The constant ``A0`` is not an input: it is fixed by
    the other parameters and exposed as :attr:`A0`.
    """

    N: int
    theta: float = 0.0
    phi: float = 0.0
    A1: float = 0.0
    A2: float = 1

    def __post_init__(self):
        allowed_m(self.N)
        object.__setattr__(self, "N", int(self.N))

    @property
    def xi(self) -> complex:
        return 0.5 * self.theta * cmath.exp(1j * self.phi)

    @property
    def A0(self) -> float:
        return couplings_from_constraints(self).A0

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class CouplingSet:
    """The six couplings of ``H2``; any values are allowed."""

    A0: float = 0.0
    omega: float = 0.0
    lam: float = 0.0
    U_elastic: float = 0.0
    Lambda_exchange: float = 0.0
    mu: float = 0.0

    def __add__(self, other: "CouplingSet") -> "CouplingSet":
        return CouplingSet(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def couplings_from_constraints(p: ModelParams) -> CouplingSet:
    c, s = math.cos(p.theta), math.sin(p.theta)
    A1, A2, N = float(p.A1), float(p.A2), p.N
    return CouplingSet(
        A0=A2 * (N * N * c * c + N * s * s),
        omega=A1 * c,
        lam=A1 * s,
        U_elastic=2.0 * A2 * (1.0 - 3.0 * c * c),
        Lambda_exchange=A2 * s * s,
        mu=2.0 * A2 * c * s,
    )


def energy(A1, A2, m):
    """``E_m = A1 m + A2 m^2``; exact for int/Fraction inputs."""
    return A1 * m + A2 * m * m


def a1_for_m0(m0: int, A2=1):
    """The ``A1`` that centres the parabola ``E_m`` on ``m0`` (so ``m0`` is the ground state)."""
    return -2 * A2 * m0


def _exact(x):
    return x if isinstance(x, Rational) else Fraction(x)


def ground_state_m0(A1, A2, N: int) -> int:
    """Allowed ``m`` of lowest energy; exact ties go to the smaller ``m``.

    Energies are compared as exact rationals (floats convert exactly), so the
    tie rule is deterministic.
    """
    ms = allowed_m(N)
    if N == 0:
        return 0
    a1, a2 = _exact(A1), _exact(A2)
    if a2 <= 0 and a1 == 0:
        raise AmbiguousMinimum(f"A1=0 with A2={A2} leaves m=-N and m=N (or every m) tied")
    if a2 <= 0:
        return N if a1 < 0 else -N
    x = -a1 / (2 * a2)
    # nearest allowed values on either side of the vertex
    lo = max(-N, min(N, math.floor((x + N) / 2) * 2 - N))
    cands = {lo, min(lo + 2, N), max(lo - 2, -N)}
    return min(cands, key=lambda m: (energy(a1, a2, m), m))


def build_h0(p: ModelParams) -> np.ndarray:
    ms = np.arange(-p.N, p.N + 1, 2, dtype=float)
    return np.diag(float(p.A1) * ms + float(p.A2) * ms * ms)


def h2_monomials(c: CouplingSet, phi: float) -> list[MonomialOp]:
    """``H2`` as a list of normal-ordered monomials with complex coefficients."""
    e1 = cmath.exp(1j * phi)
    e2 = e1 * e1
    P = MonomialOp.parse
    terms = [
        P("", c.A0),
        P("a+ a", c.omega), P("b+ b", -c.omega),
        P("a+ b", c.lam * e1), P("a b+", c.lam / e1),
        P("a+ b+ a b", c.U_elastic),
        P("a+ a+ b b", c.Lambda_exchange * e2), P("b+ b+ a a", c.Lambda_exchange / e2),
        P("a+ a+ a b", c.mu * e1), P("a+ b+ b b", -c.mu * e1),
        P("a+ b+ a a", c.mu / e1), P("b+ b+ a b", -c.mu / e1),
    ]
    return [t for t in terms if t.coeff != 0] or [P("", 0.0)]


def build_h2(c: CouplingSet, phi: float, N: int) -> np.ndarray:
    """Dense Hermitian matrix of ``H2`` on ``H_N``."""
    return build_operator_matrix(h2_monomials(c, phi), N)


def displacement_unitary(theta: float, phi: float, N: int) -> np.ndarray:
    """``exp(xi a+b - xi* ab+)`` on ``H_N`` via eigendecomposition of a Hermitian generator."""
    allowed_m(N)
    J = exchange_raise_matrix(N).astype(complex)
    xi = 0.5 * theta * cmath.exp(1j * phi)
    gen = xi * J - np.conj(xi) * J.T
    w, V = np.linalg.eigh(1j * gen)
    return (V * np.exp(-1j * w)) @ V.conj().T
