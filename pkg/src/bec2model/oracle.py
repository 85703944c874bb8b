"""Dense brute-force reference computations on fixed-N sectors.

Everything here is deliberately naive: full matrices, full eigensolves.  The
analytic modules are tested against these routines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOperator, ResourceLimit
from .model import displacement_unitary

DEFAULT_CAP = 256


@dataclass(frozen=True)
class SectorOperator:
    """Dense map from ``H_N`` (domain) to ``H_N'`` (codomain)."""

    matrix: np.ndarray
    N: int
    N_out: int | None = None

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=complex)
        n_out = self.N if self.N_out is None else self.N_out
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "N_out", n_out)
        if M.shape != (n_out + 1, self.N + 1):
            raise InvalidOperator(f"shape {M.shape} does not map H_{self.N} to H_{n_out}")

    @property
    def square(self) -> bool:
        return self.N == self.N_out

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        if not self.square:
            return False
        M = self.matrix
        scale = max(1.0, float(np.abs(M).max()))
        return bool(np.abs(M - M.conj().T).max() <= tol * scale)

    def __matmul__(self, other):
        if isinstance(other, SectorOperator):
            if other.N_out != self.N:
                raise InvalidOperator("sector mismatch in composition")
            return SectorOperator(self.matrix @ other.matrix, other.N, self.N_out)
        return self.matrix @ other


def _check_cap(N: int, cap: int):
    if N > cap:
        raise ResourceLimit(f"oracle sector N={N} exceeds cap {cap}")


def exact_unitary(theta: float, phi: float, N: int, cap: int = DEFAULT_CAP) -> SectorOperator:
    _check_cap(N, cap)
    return SectorOperator(displacement_unitary(theta, phi, N), N)


def _as_op(H) -> SectorOperator:
    if isinstance(H, SectorOperator):
        return H
    H = np.asarray(H)
    return SectorOperator(H, H.shape[1] - 1)


def exact_eigensystem(H) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    op = _as_op(H)
    if not op.is_hermitian():
        raise InvalidOperator("eigensystem requires a Hermitian sector operator")
    M = 0.5 * (op.matrix + op.matrix.conj().T)
    return np.linalg.eigh(M)


def exact_propagate(H, state, t):
    """``exp(-i H t) state``.  ``t`` may be a scalar or 1-D array; arrays give one row per time."""
    w, V = exact_eigensystem(H)
    psi = np.asarray(state, dtype=complex)
    coeffs = V.conj().T @ psi
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = (np.exp(-1j * np.outer(ts, w)) * coeffs) @ V.T
    return out[0] if np.ndim(t) == 0 else out


def conjugate_numeric(op, theta: float, phi: float, cap: int = DEFAULT_CAP) -> SectorOperator:
    """``U op U^dagger`` with the sector unitaries of domain and codomain."""
    op = _as_op(op)
    _check_cap(max(op.N, op.N_out), cap)
    U_in = displacement_unitary(theta, phi, op.N)
    U_out = U_in if op.square else displacement_unitary(theta, phi, op.N_out)
    return SectorOperator(U_out @ op.matrix @ U_in.conj().T, op.N, op.N_out)


def expectation(op, psi) -> complex:
    M = _as_op(op).matrix
    psi = np.asarray(psi, dtype=complex)
    return complex(np.vdot(psi, M @ psi))
