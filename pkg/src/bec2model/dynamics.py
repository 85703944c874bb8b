"""Time evolution of the relative population ``<m>(t)``.

The initial state is ``sum_m C_m U^dagger |N, m>`` with real ``C``.  In the
frame rotated by ``U`` the unperturbed evolution is a set of phases, and the
observable becomes ``U m U^dagger = cos(theta) m - sin(theta) K`` with
``K = e^{i phi} a+b + e^{-i phi} ab+``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateState, InvalidState
from .model import ModelParams, energy
from .perturb import Kind, _check_nondegenerate, first_order_coefficients, perturbation_matrix


@dataclass(frozen=True)
class InitialState:
    """Real amplitudes ``C_m`` over the ascending-m basis of ``H_N``."""

    C: np.ndarray
    N: int

    def __post_init__(self):
        C = np.asarray(self.C)
        if np.iscomplexobj(C):
            if np.any(C.imag != 0):
                raise InvalidState("amplitudes must be real")
            C = C.real
        C = C.astype(float)
        if C.shape != (self.N + 1,):
            raise InvalidState(f"expected {self.N + 1} amplitudes, got shape {C.shape}")
        if abs(float(C @ C) - 1.0) > 1e-12:
            raise InvalidState(f"amplitudes are not normalised (sum C^2 = {float(C @ C)!r})")
        object.__setattr__(self, "C", C)

    @classmethod
    def gaussian(cls, N: int, centre: float, width: float) -> "InitialState":
        """Amplitudes ``~ exp(-(m - centre)^2 / (4 width^2))``, so ``C^2`` has std ``width``."""
        ms = np.arange(-N, N + 1, 2, dtype=float)
        C = np.exp(-((ms - centre) ** 2) / (4.0 * width * width))
        return cls(C / np.linalg.norm(C), N)

    @classmethod
    def basis(cls, N: int, m: int) -> "InitialState":
        C = np.zeros(N + 1)
        C[(m + N) // 2] = 1.0
        return cls(C, N)


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    N: int
    breakdown: bool = False
    meta: dict = field(default_factory=dict)

    def time_average(self) -> float:
        return float(np.mean(self.values))


def _times(times) -> np.ndarray:
    return np.atleast_1d(np.asarray(times, dtype=float))


def relative_population(state: InitialState, params: ModelParams, times) -> TimeSeries:
    """``cos(theta) sum m C_m^2 - sin(theta) sum C_m C_{m+2} r+(m) cos(phi + (E_{m+2} - E_m) t)``."""
    N = params.N
    if state.N != N:
        raise InvalidState("state and parameters refer to different N")
    t = _times(times)
    C = state.C
    ms = np.arange(-N, N + 1, 2, dtype=float)
    static = math.cos(params.theta) * float(np.sum(ms * C * C))
    if N == 0:
        vals = np.full(t.shape, static)
    else:
        lo = ms[:-1]
        r = np.sqrt((N - lo) * (N + lo + 2.0))
        A1, A2 = float(params.A1), float(params.A2)
        gaps = energy(A1, A2, lo + 2) - energy(A1, A2, lo)
        w = C[:-1] * C[1:] * r
        L = np.cos(params.phi + np.outer(t, gaps))
        vals = static - math.sin(params.theta) * (L @ w)
    return TimeSeries(t, vals, N, breakdown=bool(np.any(np.abs(vals) > N)))


def rotated_observable(params: ModelParams) -> np.ndarray:
    """``U m U^dagger`` on ``H_N`` in closed form."""
    N = params.N
    ms = np.arange(-N, N + 1, 2, dtype=float)
    M = np.diag(math.cos(params.theta) * ms).astype(complex)
    if N:
        r = 0.5 * np.sqrt((N - ms[:-1]) * (N + ms[:-1] + 2.0))
        e = complex(math.cos(params.phi), math.sin(params.phi))
        M -= math.sin(params.theta) * (np.diag(e * r, -1) + np.diag(np.conj(e) * r, 1))
    return M


def relative_population_corrected(state: InitialState, params: ModelParams, kind, delta: float,
                                  times, initial: str = "eigen") -> TimeSeries:
    """``<m>(t)`` to first order in a coupling shift ``delta``.

    ``initial="eigen"`` weights the perturbed eigenstates by ``C`` (their
    first-order form is ``U^dagger (|m> + sum_k a_{m,k} |k>)``); ``"bare"``
    weights the unperturbed ones.  Phases use first-order energies in both
    cases.  ``breakdown`` is set when ``|<m>|`` exceeds ``N``.
    """
    kind = Kind.parse(kind)
    N = params.N
    if state.N != N:
        raise InvalidState("state and parameters refer to different N")
    if initial not in ("eigen", "bare"):
        raise ValueError("initial must be 'eigen' or 'bare'")
    t = _times(times)
    C = state.C
    ms = np.arange(-N, N + 1, 2)
    A1, A2 = float(params.A1), float(params.A2)
    Ht = perturbation_matrix(kind, params.theta, params.phi, N, delta)
    E1 = energy(A1, A2, ms.astype(float)) + Ht.diagonal().real
    # a[m, k] = first-order amplitude of |k> in the perturbed |m>
    a = np.zeros((N + 1, N + 1), dtype=complex)
    for i, m in enumerate(ms):
        if C[i] == 0.0:
            continue
        try:
            _check_nondegenerate(kind, params, int(m), delta)
        except DegenerateState:
            raise
        corr = first_order_coefficients(kind, params, int(m), delta, warn=False)
        for k, v in corr.coefficients.items():
            a[i, (k + N) // 2] = v
    ph = np.exp(-1j * np.outer(t, E1))                     # (T, N+1)
    z0 = C * ph
    own = (C * ph) @ a                                      # sum_m C_m e^{-iE_m t} a[m, k]
    z1 = own if initial == "eigen" else own - ph * (C @ a)
    M = rotated_observable(params)
    Mz0 = z0 @ M.T
    vals = np.einsum("tk,tk->t", z0.conj(), Mz0).real + 2.0 * np.einsum("tk,tk->t", Mz0.conj(), z1).real
    return TimeSeries(t, vals, N, breakdown=bool(np.any(np.abs(vals) > N)),
                      meta={"kind": kind.value, "delta": delta, "initial": initial})
