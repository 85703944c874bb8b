"""Entanglement entropy between the two modes.

For a state ``U^dagger |N, m0>`` (or any state diagonal in Schmidt form over
``|n_a, n_b>``) the reduced density matrix of one mode is diagonal with
entries ``P(m)``, so the entropy is the Shannon entropy of the distribution
in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeProbability
from .model import ModelParams, a1_for_m0
from .perturb import Kind, first_order_coefficients, first_order_shift
from .wigner import DistributionSeries, wigner_d_matrix

P_FLOOR = 1e-300
_INV_LN2 = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class EntropyResult:
    S0: float
    S1_shift: float

    @property
    def increased(self) -> bool:
        return self.S1_shift > 0.0

    @property
    def total(self) -> float:
        return self.S0 + self.S1_shift


def _probs(P) -> np.ndarray:
    if isinstance(P, DistributionSeries):
        return P.p if P.p1 is None else P.total
    return np.asarray(P, dtype=float)


def entropy(P) -> float:
    """``-sum P log2 P`` in bits, with ``0 log 0 = 0``.

    A :class:`DistributionSeries` contributes its total (zeroth plus
    first-order) probabilities.  Negative entries raise; use
    :func:`entropy_clamped` for signed first-order series.
    """
    p = _probs(P)
    if np.any(p < 0):
        raise NegativeProbability(f"distribution has negative entries (min {p.min():.3g})")
    q = p[p > P_FLOOR]
    return float(-np.sum(q * np.log2(q)))


def entropy_clamped(P) -> float:
    """Entropy of ``|P|``; the non-linearised treatment of a signed first-order series."""
    return entropy(np.abs(_probs(P)))


def entropy_first_order(P0, P1) -> EntropyResult:
    """Linearised entropy change ``-sum P1 (log2 P0 + 1/ln 2)``.

    Entries with ``P0`` below ``1e-300`` are skipped in both sums.
    """
    p0 = _probs(P0) if not isinstance(P0, DistributionSeries) else P0.p
    p1 = np.zeros_like(p0) if P1 is None else np.asarray(P1, dtype=float)
    keep = p0 > P_FLOOR
    S0 = entropy(p0)
    shift = -float(np.sum(p1[keep] * (np.log2(p0[keep]) + _INV_LN2)))
    return EntropyResult(S0, shift)


def entropy_of_series(series: DistributionSeries) -> EntropyResult:
    return entropy_first_order(series.p, series.p1)


@dataclass
class EntropySurface:
    """Entropy over a ``(theta, m0)`` grid; arrays are indexed ``[i_theta, i_m0]``."""

    N: int
    thetas: np.ndarray
    m0s: np.ndarray
    S0: np.ndarray
    dS: np.ndarray
    meta: dict

    @property
    def S(self) -> np.ndarray:
        return self.S0 + self.dS

    def argextremum(self, which: str = "max", of: str = "dS") -> tuple[float, int]:
        """``(theta, m0)`` at the largest (or smallest) value of ``S0``, ``dS`` or ``|dS|``."""
        arr = {"S0": self.S0, "dS": self.dS, "absdS": np.abs(self.dS), "S": self.S}[of]
        idx = np.argmax(arr) if which == "max" else np.argmin(arr)
        i, j = np.unravel_index(idx, arr.shape)
        return float(self.thetas[i]), int(self.m0s[j])


def default_m0_grid(N: int) -> np.ndarray:
    return np.arange(-N, N + 1, 2)


def entropy_surface(N: int, thetas, m0s=None, kind=None, delta: float = 0.0, phi: float = 0.0,
                    A2: float = 1.0, A1_of_m0=None) -> EntropySurface:
    """``S0`` and the first-order ``dS`` for a coupling shift, over ``(theta, m0)``.

    By default ``A1 = -2 A2 m0`` so that ``|N, m0>`` is the non-degenerate
    ground state at every grid point; pass ``A1_of_m0`` to override.
    """
    thetas = np.asarray(thetas, dtype=float)
    m0s = default_m0_grid(N) if m0s is None else np.asarray(m0s, dtype=int)
    a1f = A1_of_m0 or (lambda m0: a1_for_m0(m0, A2))
    S0 = np.zeros((len(thetas), len(m0s)))
    dS = np.zeros_like(S0)
    for i, th in enumerate(thetas):
        D = wigner_d_matrix(N, th)
        for j, m0 in enumerate(m0s):
            p0 = D[:, (m0 + N) // 2] ** 2
            p1 = None
            if kind is not None and delta != 0.0:
                params = ModelParams(N, th, phi, a1f(int(m0)), A2)
                corr = first_order_coefficients(kind, params, int(m0), delta, warn=False)
                p1 = first_order_shift(corr, D, phi)
            r = entropy_first_order(p0, p1)
            S0[i, j], dS[i, j] = r.S0, r.S1_shift
    meta = {"kind": None if kind is None else Kind.parse(kind).value, "delta": delta, "phi": phi, "A2": A2}
    return EntropySurface(N, thetas, m0s, S0, dS, meta)


def loss_entropy_surface(spec, N: int, thetas, m0s=None, A2: float = 1.0, A1_of_m0=None,
                         phi: float = 0.0) -> EntropySurface:
    """Linearised entropy change from a loss term over ``(theta, m0)``.

    Each point uses the generalized first-order distribution on the enlarged
    space; components degenerate with ``|N, m0>`` are skipped and counted in
    ``meta["skipped"]``.
    """
    from .loss import accessible_totals, conjugated_block, enlarged_first_order, generalized_distribution
    from .wigner import rotation_matrix

    thetas = np.asarray(thetas, dtype=float)
    m0s = default_m0_grid(N) if m0s is None else np.asarray(m0s, dtype=int)
    a1f = A1_of_m0 or (lambda m0: a1_for_m0(m0, A2))
    S0 = np.zeros((len(thetas), len(m0s)))
    dS = np.zeros_like(S0)
    skipped = 0
    totals = sorted(accessible_totals(spec, N))
    for i, th in enumerate(thetas):
        th = float(th)
        blocks = {n: conjugated_block(spec, N, n, th, phi) for n in totals if n != N}
        rots = {n: rotation_matrix(n, th, phi) for n in totals if (N - n) % 2 == 0}
        for j, m0 in enumerate(m0s):
            corr = enlarged_first_order(spec, N, int(m0), th, a1f(int(m0)), A2, phi, blocks=blocks)
            skipped += len(corr.skipped)
            series = generalized_distribution(corr, th, phi, rotations=rots)
            r = entropy_first_order(series.p, series.p1)
            S0[i, j], dS[i, j] = r.S0, r.S1_shift
    return EntropySurface(N, thetas, m0s, S0, dS, {"loss": repr(spec), "A2": A2, "phi": phi, "skipped": skipped})


def degenerate_entropy_surface(kind, N: int, thetas, m0s=None, delta: float = 0.005,
                               A2: float = 1.0, phi: float = 0.0) -> EntropySurface:
    """Entropy of the degenerate ground mixture over ``(theta, m0)``.

    At each ``m0`` the levels ``m0 - 2`` and ``m0`` are made degenerate with
    ``A1 = -(2 m0 - 2) A2``; ``dS`` is the exact entropy of the lower-energy
    zeroth-order-correct state minus that of ``U^dagger |N, m0>``.  The
    change is finite as ``delta -> 0``, so no linearisation is applied.
    """
    from .perturb import degenerate_distribution

    thetas = np.asarray(thetas, dtype=float)
    m0s = default_m0_grid(N)[1:] if m0s is None else np.asarray(m0s, dtype=int)
    if np.any(m0s <= -N):
        raise ValueError("m0 must exceed -N so that m0 - 2 is a level")
    S0 = np.zeros((len(thetas), len(m0s)))
    dS = np.zeros_like(S0)
    for i, th in enumerate(thetas):
        for j, m0 in enumerate(m0s):
            params = ModelParams(N, float(th), phi, -(2 * int(m0) - 2) * A2, A2)
            series = degenerate_distribution(kind, params, (int(m0) - 2, int(m0)), delta)
            S0[i, j] = entropy(series.p)
            dS[i, j] = entropy(np.clip(series.total, 0.0, None)) - S0[i, j]
    meta = {"kind": Kind.parse(kind).value, "delta": delta, "phi": phi, "A2": A2, "degenerate": True}
    return EntropySurface(N, thetas, m0s, S0, dS, meta)
