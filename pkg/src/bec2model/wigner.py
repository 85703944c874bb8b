"""Wigner rotation elements d^N_{m,m0}(theta) in the doubled (N, m) labelling.

``d^N_{m,m0}(theta) = <N,m| U^dagger |N,m0>`` at ``phi = 0``, where ``U`` is
the two-mode displacement operator.  Three evaluation routes are provided:

``"recurrence"``
    Default.  Columns are generated with the three-term recurrence in ``m``
    started from the closed-form edge values ``m = -N`` and ``m = N`` and run
    inward from both ends, meeting at the classical centre ``m0 cos(theta)``.
    Each half only ever grows, so the recurrence is forward stable; a
    running log-scale keeps values representable for N in the thousands.
``"sum"``
    The finite alternating sum over ``k`` with log-gamma terms added with
    :func:`math.fsum`.  Accurate only while cancellation is mild, i.e. small
    N or ``theta`` near 0 or pi.
``"exact"``
    The same sum with exact integer binomials evaluated in mpmath at a
    working precision that grows with N.  Slow; used for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import gammaln

from .errors import InvalidBasis
from .fock import allowed_m, check_label

FLUSH = 1e-300
_LOG_FLUSH = math.log(FLUSH)
_RESCALE_HI = 1e150
_SIN_EPS = 1e-12


@dataclass
class DistributionSeries:
    """Probability series over the allowed ``m`` of one sector.

    ``p`` is the zeroth-order distribution.  ``p1`` holds a signed first-order
    correction when one has been computed, so ``total`` may dip below zero.
    """

    N: int
    m: np.ndarray
    p: np.ndarray
    theta: float
    phi: float = 0.0
    m0: int | None = None
    p1: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=int)
        self.p = np.asarray(self.p, dtype=float)
        if self.p1 is not None:
            self.p1 = np.asarray(self.p1, dtype=float)
        if self.m.shape != self.p.shape:
            raise ValueError("m and p must align")

    @property
    def total(self) -> np.ndarray:
        return self.p if self.p1 is None else self.p + self.p1

    def argmax(self) -> int:
        return int(self.m[np.argmax(self.total)])


def _half_angle(theta):
    return math.cos(0.5 * theta), math.sin(0.5 * theta)


def _log_abs(x: float) -> float:
    return math.log(abs(x)) if x != 0.0 else -math.inf


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _edge_values(N: int, m0s: np.ndarray, theta: float, top: bool):
    """Log-magnitude and sign of d at m = N (top) or m = -N (bottom)."""
    c, s = _half_angle(theta)
    a = (N + m0s) // 2
    b = (N - m0s) // 2
    lc, ls = _log_abs(c), _log_abs(s)
    if top:
        pc, ps = a, b
        sign = np.where(b % 2 == 0, 1.0, -1.0)
    else:
        pc, ps = b, a
        sign = np.ones(len(m0s))
    with np.errstate(invalid="ignore"):
        logv = 0.5 * _log_binom(N, a) + np.where(pc > 0, pc * lc, 0.0) + np.where(ps > 0, ps * ls, 0.0)
    if c < 0:
        sign = sign * np.where(pc % 2 == 0, 1.0, -1.0)
    if s < 0:
        sign = sign * np.where(ps % 2 == 0, 1.0, -1.0)
    return logv, sign


def _run_recurrence(N: int, m0s: np.ndarray, theta: float, upward: bool):
    """Scaled three-term recurrence over all m for every column in ``m0s``.

    Returns (mantissa, log_scale) arrays of shape (N+1, len(m0s)).
    """
    ms = np.arange(-N, N + 1, 2)
    ncol = len(m0s)
    mant = np.zeros((N + 1, ncol))
    lsc = np.zeros((N + 1, ncol))
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    logv, sign = _edge_values(N, m0s, theta, top=not upward)
    start = 0 if upward else N
    mant[start] = sign
    lsc[start] = logv
    if N == 0:
        return mant, lsc
    # r(m) = sqrt((N - m)(N + m + 2)) couples m and m+2.
    r = np.sqrt(np.maximum((N - ms) * (N + ms + 2.0), 0.0))
    prev = np.zeros(ncol)
    cur = sign.copy()
    scale = logv.copy()
    order = range(0, N) if upward else range(N, 0, -1)
    for i in order:
        m = ms[i]
        g = 2.0 * (m0s - m * cos_t) / sin_t
        if upward:
            nxt = (g * cur - (r[i - 1] * prev if i > 0 else 0.0)) / r[i]
            j = i + 1
        else:
            nxt = (g * cur - (r[i] * prev if i < N else 0.0)) / r[i - 1]
            j = i - 1
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE_HI
        if big.any():
            f = np.where(big, np.abs(cur), 1.0)
            cur = cur / f
            prev = prev / f
            scale = scale + np.log(f)
        mant[j] = cur
        lsc[j] = scale
    return mant, lsc


def _assemble(mant: np.ndarray, lsc: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logmag = np.log(np.abs(mant)) + lsc
        vals = np.sign(mant) * np.exp(np.minimum(logmag, 700.0))
    vals[~np.isfinite(logmag) | (logmag < _LOG_FLUSH)] = 0.0
    return vals


def _columns_by_recurrence(N: int, m0s: np.ndarray, theta: float) -> np.ndarray:
    ms = np.arange(-N, N + 1, 2)
    up = _assemble(*_run_recurrence(N, m0s, theta, upward=True))
    down = _assemble(*_run_recurrence(N, m0s, theta, upward=False))
    centre = m0s * math.cos(theta)
    use_up = ms[:, None] <= centre[None, :]
    return np.where(use_up, up, down)


def _columns_by_sum(N: int, m0s: np.ndarray, theta: float) -> np.ndarray:
    ms = allowed_m(N)
    out = np.zeros((N + 1, len(m0s)))
    for j, m0 in enumerate(m0s):
        for i, m in enumerate(ms):
            out[i, j] = wigner_d_sum(N, m, int(m0), theta)
    return out


def _check(N, m, m0):
    check_label(N, m)
    check_label(N, m0)


def wigner_d_sum(N: int, m: int, m0: int, theta: float) -> float:
    """Alternating-sum evaluation with log-gamma terms and exact-rounded addition."""
    _check(N, m, m0)
    c, s = _half_angle(theta)
    a, b = (N + m0) // 2, (N - m0) // 2
    p, q = (N + m) // 2, (N - m) // 2
    k_lo = max(0, (m0 - m) // 2)
    k_hi = min(q, a)
    if k_lo > k_hi:
        return 0.0
    lc, ls = _log_abs(c), _log_abs(s)
    pref = 0.5 * (gammaln(p + 1) + gammaln(q + 1) - gammaln(a + 1) - gammaln(b + 1))
    terms = []
    for k in range(k_lo, k_hi + 1):
        ps = (m - m0) // 2 + 2 * k
        pc = N - ps
        if (ps > 0 and s == 0.0) or (pc > 0 and c == 0.0):
            continue
        logt = pref + _log_binom(a, k) + _log_binom(b, q - k)
        logt += (pc * lc if pc else 0.0) + (ps * ls if ps else 0.0)
        sign = (-1) ** (((m - m0) // 2 + k) % 2)
        if c < 0 and pc % 2:
            sign = -sign
        if s < 0 and ps % 2:
            sign = -sign
        if logt > _LOG_FLUSH:
            terms.append(sign * math.exp(min(logt, 700.0)))
    terms.sort(key=abs)
    val = math.fsum(terms)
    return 0.0 if abs(val) < FLUSH else val


def wigner_d_exact(N: int, m: int, m0: int, theta, dps: int | None = None) -> mpmath.mpf:
    """High-precision value of the alternating sum with exact integer binomials.

    ``theta`` may be a float (taken as exact binary value) or an mpmath number.
    """
    _check(N, m, m0)
    a, b = (N + m0) // 2, (N - m0) // 2
    p, q = (N + m) // 2, (N - m) // 2
    k_lo = max(0, (m0 - m) // 2)
    k_hi = min(q, a)
    if dps is None:
        dps = 40 + N
    with mpmath.workdps(dps):
        th = mpmath.mpf(theta)
        c = mpmath.cos(th / 2)
        s = mpmath.sin(th / 2)
        total = mpmath.mpf(0)
        for k in range(k_lo, k_hi + 1):
            ps = (m - m0) // 2 + 2 * k
            coef = math.comb(a, k) * math.comb(b, q - k)
            term = coef * c ** (N - ps) * s ** ps
            total += -term if ((m - m0) // 2 + k) % 2 else term
        norm = mpmath.sqrt(mpmath.mpf(math.factorial(p) * math.factorial(q))
                           / (math.factorial(a) * math.factorial(b)))
        return +(norm * total)


def wigner_d_column(N: int, m0: int, theta: float, method: str = "recurrence") -> np.ndarray:
    """All ``d^N_{m,m0}(theta)`` for ascending allowed ``m``."""
    check_label(N, m0)
    return wigner_d_matrix(N, theta, m0s=[m0], method=method)[:, 0]


def wigner_d_matrix(N: int, theta: float, m0s=None, method: str = "recurrence") -> np.ndarray:
    """Matrix ``D[i, j] = d^N_{m_i, m0_j}(theta)``; all columns by default."""
    allowed_m(N)
    m0s = np.arange(-N, N + 1, 2) if m0s is None else np.asarray(m0s, dtype=int)
    for m0 in m0s:
        check_label(N, int(m0))
    if method == "exact":
        return np.array([[float(wigner_d_exact(N, m, int(m0), theta)) for m0 in m0s]
                         for m in allowed_m(N)]).reshape(N + 1, len(m0s))
    if theta == 0.0:
        return (np.arange(-N, N + 1, 2)[:, None] == m0s[None, :]).astype(float)
    if method == "sum" or abs(math.sin(theta)) < _SIN_EPS:
        return _columns_by_sum(N, m0s, theta)
    if method != "recurrence":
        raise ValueError(f"unknown method {method!r}")
    return _columns_by_recurrence(N, m0s, theta)


def wigner_d(N: int, m: int, m0: int, theta: float, method: str = "recurrence") -> float:
    """Single element ``d^N_{m,m0}(theta)``."""
    _check(N, m, m0)
    if method == "exact":
        return float(wigner_d_exact(N, m, m0, theta))
    if method == "sum":
        return wigner_d_sum(N, m, m0, theta)
    return float(wigner_d_column(N, m0, theta, method)[(m + N) // 2])


def rotation_matrix(N: int, theta: float, phi: float = 0.0) -> np.ndarray:
    """``<N,m| U^dagger |N,m0>`` for the displacement operator with phase ``phi``.

    The phase enters only as ``exp(i phi (m - m0) / 2)``.
    """
    D = wigner_d_matrix(N, theta)
    if phi == 0.0:
        return D.astype(complex)
    ms = np.arange(-N, N + 1, 2)
    return np.exp(0.5j * phi * (ms[:, None] - ms[None, :])) * D


def distribution(N: int, m0: int, theta: float, phi: float = 0.0) -> DistributionSeries:
    """Unperturbed particle distribution ``P(m) = |d^N_{m,m0}(theta)|^2``.

    ``phi`` is recorded but never used: the distribution does not depend on it.
    """
    try:
        check_label(N, m0)
    except InvalidBasis:
        raise
    d = wigner_d_column(N, m0, theta)
    return DistributionSeries(N=N, m=np.arange(-N, N + 1, 2), p=d * d, theta=theta, phi=phi, m0=m0)
