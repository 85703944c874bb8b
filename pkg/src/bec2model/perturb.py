"""First-order perturbation theory around the solvable Hamiltonian.

A perturbation shifts one coupling of ``H2`` by ``delta``.  Since
``U (H2 + H') U^dagger = H0 + U H' U^dagger``, everything reduces to the
matrix elements of ``H~' = U H' U^dagger`` in the diagonal basis of ``H0``;
:func:`matrix_element` gives them in closed form.

Notation: ``r+(m) = sqrt((N - m)(N + m + 2))`` links ``m`` to ``m + 2`` and
``r-(m) = sqrt((N + m)(N - m + 2))`` links ``m`` to ``m - 2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import DegenerateState, NotDegenerate, UnsupportedParameters
from .fock import allowed_m, check_label
from .model import CouplingSet, ModelParams, build_h2, energy
from .wigner import DistributionSeries, wigner_d_matrix

BREAKDOWN_THRESHOLD = 0.1
_REL_TOL = 1e-9


class Kind(str, Enum):
    """Which coupling of ``H2`` is shifted."""

    OMEGA = "omega"
    LAMBDA_SMALL = "lambda"
    U_ELASTIC = "U"
    LAMBDA_BIG = "Lambda"
    MU = "mu"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        for k in cls:
            if value in (k.value, k.name):
                return k
        raise ValueError(f"unknown perturbation kind {value!r}; choose from {[k.value for k in cls]}")

    @property
    def band(self) -> int:
        """Largest ``|Delta m|`` the transformed perturbation connects."""
        return 2 if self in (Kind.OMEGA, Kind.LAMBDA_SMALL) else 4


_COUPLING_FIELD = {
    Kind.OMEGA: "omega",
    Kind.LAMBDA_SMALL: "lam",
    Kind.U_ELASTIC: "U_elastic",
    Kind.LAMBDA_BIG: "Lambda_exchange",
    Kind.MU: "mu",
}


@dataclass(frozen=True)
class PerturbationKind:
    kind: Kind
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))

    def couplings(self) -> CouplingSet:
        return CouplingSet(**{_COUPLING_FIELD[self.kind]: self.delta})


@dataclass
class FirstOrderCorrection:
    """Coefficients ``a_{m0,m}`` of the first-order state correction (``m != m0``)."""

    N: int
    m0: int
    coefficients: dict[int, complex] = field(default_factory=dict)
    energy_shift: float = 0.0

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coefficients.values()), default=0.0)

    def as_vector(self) -> np.ndarray:
        v = np.zeros(self.N + 1, dtype=complex)
        for m, a in self.coefficients.items():
            v[(m + self.N) // 2] = a
        return v


def _rp(N, m):
    return math.sqrt(max((N - m) * (N + m + 2), 0))


def _rm(N, m):
    return math.sqrt(max((N + m) * (N - m + 2), 0))


def _element(kind: Kind, theta: float, phi: float, N: int, d: int, m: int) -> complex:
    """``<m + d| H~' |m>`` per unit strength, for ``d`` in {0, +-2, +-4}."""
    c, s = math.cos(theta), math.sin(theta)
    s2, c2 = math.sin(2 * theta), math.cos(2 * theta)
    sg = 1 if d > 0 else -1
    if d == 0:
        if kind is Kind.OMEGA:
            return m * c
        if kind is Kind.LAMBDA_SMALL:
            return m * s
        if kind is Kind.U_ELASTIC:
            return 0.25 * (c * c * (N * N - m * m) + s * s * (0.5 * (N * N + m * m) - N))
        q = 0.5 * (3 * m * m - N * N) - N
        if kind is Kind.LAMBDA_BIG:
            return 0.5 * s * s * q
        return 0.5 * s2 * q
    ph = complex(math.cos(d * phi / 2), math.sin(d * phi / 2))
    if abs(d) == 2:
        r = _rp(N, m) if d > 0 else _rm(N, m)
        if r == 0.0:
            return 0.0
        if kind is Kind.OMEGA:
            return -0.5 * s * r * ph
        if kind is Kind.LAMBDA_SMALL:
            return 0.5 * c * r * ph
        w = (m + sg) * r
        if kind is Kind.U_ELASTIC:
            return 0.125 * s2 * w * ph
        if kind is Kind.LAMBDA_BIG:
            return 0.25 * s2 * w * ph
        return 0.5 * c2 * w * ph
    if abs(d) == 4 and kind.band == 4:
        r = (_rp(N, m) * _rp(N, m + 2)) if d > 0 else (_rm(N, m) * _rm(N, m - 2))
        if r == 0.0:
            return 0.0
        if kind is Kind.U_ELASTIC:
            return -0.0625 * s * s * r * ph
        if kind is Kind.LAMBDA_BIG:
            return 0.125 * (1 + c * c) * r * ph
        return -0.125 * s2 * r * ph
    return 0.0


def matrix_element(kind, theta: float, phi: float, N: int, m_row: int, m_col: int,
                   delta: float = 1.0) -> complex:
    """``<N, m_row| U H' U^dagger |N, m_col>`` for a shift ``delta`` of the chosen coupling."""
    check_label(N, m_row)
    check_label(N, m_col)
    kind = Kind.parse(kind)
    d = m_row - m_col
    if abs(d) > kind.band:
        return 0j
    return complex(delta * _element(kind, theta, phi, N, d, m_col))


def perturbation_matrix(kind, theta: float, phi: float, N: int, delta: float = 1.0) -> np.ndarray:
    """Full banded matrix of ``U H' U^dagger`` on ``H_N`` from the closed forms."""
    kind = Kind.parse(kind)
    allowed_m(N)
    M = np.zeros((N + 1, N + 1), dtype=complex)
    for j, m in enumerate(range(-N, N + 1, 2)):
        for d in range(-kind.band, kind.band + 1, 2):
            i = j + d // 2
            if 0 <= i <= N:
                M[i, j] = delta * _element(kind, theta, phi, N, d, m)
    return M


def bare_perturbation(kind, delta: float, phi: float, N: int) -> np.ndarray:
    """Matrix of ``H'`` itself, i.e. ``H2`` with only the shifted coupling set."""
    return build_h2(PerturbationKind(kind, delta).couplings(), phi, N)


def _is_exact(*xs) -> bool:
    return all(isinstance(x, Rational) for x in xs)


def _energies_equal(e1, e2, scale) -> bool:
    if isinstance(e1, Rational) and isinstance(e2, Rational):
        return e1 == e2
    return abs(e1 - e2) <= _REL_TOL * max(scale, 1e-300)


def detect_degeneracies(A1, A2, N: int) -> list[tuple[int, int]]:
    """Degenerate pairs ``(m1, m2)``, ``m1 > m2``, that the perturbations can couple.

    Only separations 2 and 4 are reported.  Exact when ``A1`` and ``A2`` are
    ints or Fractions, relative tolerance ``1e-9`` otherwise.
    """
    allowed_m(N)
    if A2 == 0:
        raise UnsupportedParameters("A2 = 0 gives an equally spaced spectrum; degeneracy analysis needs A2 != 0")
    exact = _is_exact(A1, A2)
    scale = abs(A1) * N + abs(A2) * N * N
    pairs = []
    for gap in (2, 4):
        for m2 in range(-N, N - gap + 1, 2):
            m1 = m2 + gap
            if _energies_equal(energy(A1, A2, m1), energy(A1, A2, m2), scale):
                pairs.append((m1, m2))
    if not exact:
        pairs = [p for p in pairs if abs(p[0] + p[1] + float(A1) / float(A2)) < 1e-6]
    return pairs


def _check_nondegenerate(kind: Kind, p: ModelParams, m0: int, delta: float):
    for m1, m2 in detect_degeneracies(p.A1, p.A2, p.N):
        if m0 in (m1, m2):
            other = m2 if m0 == m1 else m1
            if abs(matrix_element(kind, p.theta, p.phi, p.N, other, m0)) > 0.0:
                raise DegenerateState(
                    f"|{p.N},{m0}> is degenerate with |{p.N},{other}> and coupled by {kind.value}; "
                    "use degenerate_solve_general")


def first_order_coefficients(kind, params: ModelParams, m0: int, delta: float = 1.0,
                             warn: bool = True) -> FirstOrderCorrection:
    """``a_{m0,m} = <m| H~' |m0> / (E_m0 - E_m)`` for every coupled ``m``."""
    kind = Kind.parse(kind)
    N = params.N
    check_label(N, m0)
    _check_nondegenerate(kind, params, m0, delta)
    A1, A2 = float(params.A1), float(params.A2)
    e0 = energy(A1, A2, m0)
    coeffs = {}
    for d in range(-kind.band, kind.band + 1, 2):
        m = m0 + d
        if d == 0 or abs(m) > N:
            continue
        num = matrix_element(kind, params.theta, params.phi, N, m, m0, delta)
        if num != 0:
            coeffs[m] = num / (e0 - energy(A1, A2, m))
    shift = matrix_element(kind, params.theta, params.phi, N, m0, m0, delta).real
    corr = FirstOrderCorrection(N, m0, coeffs, shift)
    if warn and corr.max_abs() > BREAKDOWN_THRESHOLD:
        from .errors import PerturbationBreakdownWarning
        warnings.warn(f"first-order coefficient {corr.max_abs():.3g} exceeds {BREAKDOWN_THRESHOLD}; "
                      "the expansion is unreliable", PerturbationBreakdownWarning, stacklevel=2)
    return corr


def first_order_shift(corr: FirstOrderCorrection, D: np.ndarray, phi: float) -> np.ndarray:
    """Signed first-order change of ``P(m)`` given the rotation columns ``D[:, n]``."""
    N, m0 = corr.N, corr.m0
    i0 = (m0 + N) // 2
    acc = np.zeros(N + 1)
    for n, a in corr.coefficients.items():
        acc += (a * complex(math.cos(phi * (m0 - n) / 2), math.sin(phi * (m0 - n) / 2))).real * D[:, (n + N) // 2]
    return 2.0 * D[:, i0] * acc


def perturbed_distribution(kind, params: ModelParams, m0: int, delta: float = 1.0,
                           warn: bool = True) -> DistributionSeries:
    """Distribution to first order; ``p1`` carries the signed correction.

    The correction does not depend on ``phi``: the phase factors of the
    coefficients cancel against those of the rotation elements.
    """
    corr = first_order_coefficients(kind, params, m0, delta, warn=warn)
    N = params.N
    cols = sorted({m0, *corr.coefficients})
    Dc = wigner_d_matrix(N, params.theta, m0s=cols)
    D = np.zeros((N + 1, N + 1))
    for j, n in enumerate(cols):
        D[:, (n + N) // 2] = Dc[:, j]
    p0 = D[:, (m0 + N) // 2] ** 2
    p1 = first_order_shift(corr, D, params.phi)
    return DistributionSeries(N=N, m=np.arange(-N, N + 1, 2), p=p0, p1=p1, theta=params.theta,
                              phi=params.phi, m0=m0,
                              meta={"kind": Kind.parse(kind).value, "delta": delta,
                                    "max_coefficient": corr.max_abs()})


@dataclass(frozen=True)
class DegenerateSolution:
    """First-order energies and zeroth-order states inside a degenerate pair.

    Vectors are expressed over ``basis`` (ascending ``m``) and normalised.
    """

    eps_plus: float
    eps_minus: float
    vec_plus: np.ndarray
    vec_minus: np.ndarray
    basis: tuple[int, int]
    gauge_free: bool = False


def _normalise(v):
    n = np.linalg.norm(v)
    return v / n


def degenerate_solve(kind, theta: float, N: int, delta: float, phi: float = 0.0) -> DegenerateSolution:
    """Closed-form solution in the pair ``(N - 2, N)`` for the omega or lambda shifts.

    With ``g = cos(theta)`` (omega) or ``g = sin(theta)`` (lambda) and ``h``
    the other one, ``eps_pm = delta ((N - 1) g +- sqrt(g^2 + N h^2))``.
    """
    kind = Kind.parse(kind)
    if N < 1:
        raise NotDegenerate("the pair (N-2, N) needs N >= 2")
    c, s = math.cos(theta), math.sin(theta)
    e = complex(math.cos(phi), math.sin(phi))
    sq = math.sqrt(N)
    if kind is Kind.OMEGA:
        g, R = c, math.hypot(c, sq * s)
        # columns over (|N-2>, |N>): eigenvectors of [[(N-2)c, -sqrt(N) s e^-i], [., N c]]
        off = -sq * s
    elif kind is Kind.LAMBDA_SMALL:
        g, R = s, math.hypot(s, sq * c)
        off = sq * c
    else:
        raise UnsupportedParameters("closed forms exist for omega and lambda only")
    eps_p = delta * ((N - 1) * g + R)
    eps_m = delta * ((N - 1) * g - R)
    # (Delta - eps) v = 0 with Delta/delta = [[(N-2)g, off e^-iphi], [off e^iphi, N g]].
    # Root (N-1)g + sigma R: the two rows give v = (off e^-iphi, g + sigma R) or
    # v = (sigma R - g, off e^iphi); take whichever is larger.
    vecs = []
    for sigma in (1.0, -1.0):
        a = np.array([off / e, g + sigma * R], dtype=complex)
        b = np.array([sigma * R - g, off * e], dtype=complex)
        vecs.append(_normalise(a if np.linalg.norm(a) >= np.linalg.norm(b) else b))
    return DegenerateSolution(eps_p, eps_m, vecs[0], vecs[1], (N - 2, N))


def degenerate_block(kind, params: ModelParams, pair: tuple[int, int], delta: float = 1.0) -> np.ndarray:
    lo, hi = sorted(pair)
    ms = (lo, hi)
    return np.array([[matrix_element(kind, params.theta, params.phi, params.N, r, c, delta) for c in ms]
                     for r in ms])


def degenerate_solve_general(kind, params: ModelParams, pair: tuple[int, int],
                             delta: float = 1.0) -> DegenerateSolution:
    """Diagonalise the 2x2 block of ``H~'`` on a degenerate pair of ``H0`` levels."""
    m1, m2 = pair
    N = params.N
    check_label(N, m1)
    check_label(N, m2)
    scale = abs(float(params.A1)) * N + abs(float(params.A2)) * N * N
    e1, e2 = energy(params.A1, params.A2, m1), energy(params.A1, params.A2, m2)
    if m1 == m2 or not _energies_equal(e1, e2, scale):
        raise NotDegenerate(f"|{N},{m1}> and |{N},{m2}> are not degenerate")
    B = degenerate_block(kind, params, pair, delta)
    if not np.any(B):
        eye = np.eye(2, dtype=complex)
        return DegenerateSolution(0.0, 0.0, eye[:, 1], eye[:, 0], tuple(sorted(pair)), gauge_free=True)
    w, V = np.linalg.eigh(B)
    return DegenerateSolution(float(w[1]), float(w[0]), V[:, 1], V[:, 0], tuple(sorted(pair)))


def degenerate_distribution(kind, params: ModelParams, pair: tuple[int, int], delta: float = 1.0,
                            branch: str = "ground") -> DistributionSeries:
    """Distribution of the zeroth-order-correct state inside a degenerate pair.

    ``branch="ground"`` takes the lower first-order energy (``"excited"`` the
    other).  ``p`` is the unperturbed distribution of the upper member of the
    pair and ``p1`` the change, so ``total`` is the new distribution.
    """
    if branch not in ("ground", "excited"):
        raise ValueError("branch must be 'ground' or 'excited'")
    sol = degenerate_solve_general(kind, params, pair, delta)
    N = params.N
    lo, hi = sol.basis
    v = sol.vec_minus if branch == "ground" else sol.vec_plus
    Dc = wigner_d_matrix(N, params.theta, m0s=[lo, hi])
    # <m|U^dagger|n> = e^{i phi (m - n)/2} d_{m,n}; keep the n-dependent phase
    ph = np.exp(-0.5j * params.phi * np.array([lo - hi, 0.0]))
    amp = Dc @ (v * ph)
    p0 = Dc[:, 1] ** 2
    p = np.abs(amp) ** 2
    return DistributionSeries(N=N, m=np.arange(-N, N + 1, 2), p=p0, p1=p - p0, theta=params.theta,
                              phi=params.phi, m0=hi,
                              meta={"kind": Kind.parse(kind).value, "delta": delta, "pair": (lo, hi),
                                    "branch": branch, "eps": (sol.eps_minus, sol.eps_plus)})


def exact_ratio(x):
    """Helper for callers that want exact degeneracy tests from decimal strings."""
    return Fraction(x)
