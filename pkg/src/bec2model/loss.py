"""Particle-loss perturbations on an enlarged state space.

A loss term removes particles, so the perturbed state lives in a direct sum
of sectors ``H_n`` over the accessible totals ``n``.  The conjugated loss
operator ``U H_loss U^dagger`` only lowers ``n``; its blocks between sectors
are built here either analytically, by substituting the transformed ladder
operators

    U a U^dagger = c a - e^{i phi} s b,     U b U^dagger = c b + e^{-i phi} s a

(``c = cos(theta/2)``, ``s = sin(theta/2)``) or numerically with the oracle.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateState, InvalidOperator
from .fock import MonomialOp, allowed_m, build_operator_matrix, check_label
from .model import energy
from .oracle import conjugate_numeric
from .wigner import DistributionSeries, rotation_matrix, wigner_d_column


@dataclass(frozen=True)
class LossSpec:
    """A sum of normal-ordered monomials that each lower the particle number."""

    terms: tuple[MonomialOp, ...]

    def __post_init__(self):
        terms = tuple(t for t in self.terms if t.coeff != 0)
        object.__setattr__(self, "terms", terms)
        for t in terms:
            if not t.is_normal_ordered():
                raise InvalidOperator(f"{t} is not normal ordered")
            if t.net_change >= 0:
                raise InvalidOperator(f"{t} does not remove particles")

    @classmethod
    def from_alphas(cls, alphas: dict[tuple[int, int], float]) -> "LossSpec":
        """``sum alpha_{ka,kb} a^ka b^kb`` with scalar coefficients."""
        return cls(tuple(MonomialOp.from_powers(0, 0, ka, kb, float(v))
                         for (ka, kb), v in sorted(alphas.items()) if ka + kb >= 1))

    @classmethod
    def background(cls, alphas: dict[int, float]) -> "LossSpec":
        """Ejection of ``k`` particles from mode a: ``sum_k alpha_k a^k``."""
        return cls.from_alphas({(int(k), 0): v for k, v in alphas.items()})

    @classmethod
    def tbr(cls, sigma: float, escape: float | None = None) -> "LossSpec":
        """Three-body recombination ``sigma a+aaa + escape aaa``; ``escape`` defaults to ``1 - sigma``."""
        escape = 1.0 - sigma if escape is None else escape
        return cls((MonomialOp.parse("a+ a a a", float(sigma)), MonomialOp.parse("a a a", float(escape))))

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def by_net_change(self) -> dict[int, list[MonomialOp]]:
        out: dict[int, list[MonomialOp]] = {}
        for t in self.terms:
            out.setdefault(t.net_change, []).append(t)
        return out


def accessible_totals(spec: LossSpec, N: int) -> frozenset[int]:
    """``{N}`` plus every total reached by one application of a term."""
    allowed_m(N)
    return frozenset({N} | {N + t.net_change for t in spec.terms if N + t.net_change >= 0})


def s_A_degenerate(m: int, A) -> bool:
    """True when more than one sector in ``A`` contains a state with relative number ``m``."""
    return sum(1 for n in A if n >= abs(m) and (n - m) % 2 == 0) > 1


# transformed factor -> list of (coefficient, factor)
def _transformed(f: str, c: float, s: float, e: complex):
    return {
        "a": [(c, "a"), (-e * s, "b")],
        "b": [(c, "b"), (s / e, "a")],
        "a+": [(c, "a+"), (-s / e, "b+")],
        "b+": [(c, "b+"), (e * s, "a+")],
    }[f]


def conjugated_monomials(op: MonomialOp, theta: float, phi: float) -> list[MonomialOp]:
    """Expansion of ``U op U^dagger`` as monomials (normal order is preserved)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = cmath.exp(1j * phi)
    choices = [_transformed(f, c, s, e) for f in op.factors]
    out = []
    for combo in itertools.product(*choices):
        coeff = complex(op.coeff)
        for k, _ in combo:
            coeff *= k
        if coeff != 0:
            out.append(MonomialOp(tuple(f for _, f in combo), coeff))
    return out


def conjugated_block(spec: LossSpec, N: int, n_out: int, theta: float, phi: float,
                     method: str = "analytic") -> np.ndarray:
    """Matrix of ``U H_loss U^dagger`` from ``H_N`` into ``H_{n_out}``."""
    terms = [t for t in spec.terms if N + t.net_change == n_out]
    if not terms:
        return np.zeros((n_out + 1, N + 1), dtype=complex)
    if method == "oracle":
        return conjugate_numeric(_sector_matrix(terms, N, n_out), theta, phi).matrix
    mons = [m for t in terms for m in conjugated_monomials(t, theta, phi)]
    return build_operator_matrix(mons, N)


def _sector_matrix(terms, N, n_out):
    from .oracle import SectorOperator
    return SectorOperator(build_operator_matrix(terms, N), N, n_out)


@dataclass
class EnlargedCorrection:
    """First-order state correction, one amplitude vector per lower sector.

    Vectors are in the rotated frame (coefficients of ``|n, m>``).  Components
    whose energy denominator vanishes are listed in ``skipped``; their
    coupling block is strictly triangular, so first order fixes nothing there.
    """

    N: int
    m0: int
    sectors: dict[int, np.ndarray] = field(default_factory=dict)
    skipped: list[tuple[int, int]] = field(default_factory=list)


def enlarged_first_order(spec: LossSpec, N: int, m0: int, theta: float, A1, A2, phi: float = 0.0,
                         method: str = "analytic", on_degenerate: str = "skip",
                         blocks: dict[int, np.ndarray] | None = None) -> EnlargedCorrection:
    """Non-degenerate first-order correction of ``|N, m0>`` over the accessible sectors.

    ``on_degenerate`` is ``"skip"`` or ``"raise"``.  ``blocks`` may supply
    precomputed :func:`conjugated_block` matrices keyed by output sector.
    """
    check_label(N, m0)
    if on_degenerate not in ("skip", "raise"):
        raise ValueError("on_degenerate must be 'skip' or 'raise'")
    A1f, A2f = float(A1), float(A2)
    e0 = energy(A1f, A2f, m0)
    col = (m0 + N) // 2
    out = EnlargedCorrection(N, m0)
    for n in sorted(accessible_totals(spec, N) - {N}, reverse=True):
        full = blocks[n] if blocks is not None else conjugated_block(spec, N, n, theta, phi, method)
        B = full[:, col]
        ms = np.arange(-n, n + 1, 2)
        vec = np.zeros(n + 1, dtype=complex)
        for i, m in enumerate(ms):
            if B[i] == 0:
                continue
            den = e0 - energy(A1f, A2f, float(m))
            if den == 0.0 or abs(den) <= 1e-12 * max(abs(e0), 1.0):
                if on_degenerate == "raise":
                    raise DegenerateState(f"|{n},{m}> is degenerate with |{N},{m0}> and coupled")
                out.skipped.append((n, int(m)))
                continue
            vec[i] = B[i] / den
        out.sectors[n] = vec
    return out


def generalized_distribution(corr: EnlargedCorrection, theta: float, phi: float = 0.0,
                             method: str = "analytic", rotations: dict[int, np.ndarray] | None = None
                             ) -> DistributionSeries:
    """Linearised ``P_gen(m) = |sum_n <n,m| U^dagger |N,m0>^(0+1)|^2`` over ``m`` of ``H_N``.

    Only sectors of the same parity as ``N`` share values of ``m`` with it;
    the others drop out exactly.
    """
    N, m0 = corr.N, corr.m0
    if rotations is not None:
        rot = rotations.__getitem__
    elif method == "oracle":
        from .oracle import exact_unitary
        rot = lambda n: exact_unitary(theta, phi, n).matrix.conj().T  # noqa: E731
    else:
        rot = lambda n: rotation_matrix(n, theta, phi)  # noqa: E731
    amp0 = rot(N)[:, (m0 + N) // 2]
    p1 = np.zeros(N + 1)
    for n, vec in corr.sectors.items():
        if (N - n) % 2 or not np.any(vec):
            continue
        amp = rot(n) @ vec                       # over m = -n..n
        off = (N - n) // 2
        p1[off:off + n + 1] += 2.0 * (np.conj(amp0[off:off + n + 1]) * amp).real
    return DistributionSeries(N=N, m=np.arange(-N, N + 1, 2), p=np.abs(amp0) ** 2, p1=p1,
                              theta=theta, phi=phi, m0=m0)


def _d_padded(n: int, col: int, N: int, theta: float) -> np.ndarray:
    """``d^n_{m,col}`` placed on the ``m`` grid of ``H_N`` (zero where ``|m| > n``)."""
    out = np.zeros(N + 1)
    off = (N - n) // 2
    out[off:off + n + 1] = wigner_d_column(n, col, theta)
    return out


def background_correction(N: int, theta: float, alphas: dict[int, float], A1, A2,
                          phi: float = 0.0) -> DistributionSeries:
    """Closed-form generalized distribution for ``sum_k alpha_k a^k`` acting on ``|N, N>``.

    The first-order amplitude of ``|N-k, N-k>`` is
    ``alpha_k c^k sqrt(N!/(N-k)!) / (k A1 + k (2N - k) A2)``; odd ``k`` land in
    sectors of the wrong parity and contribute exactly zero.  For ``phi != 0``
    each term carries an extra ``cos(k phi / 2)``.
    """
    allowed_m(N)
    c = math.cos(theta / 2)
    dN = wigner_d_column(N, N, theta)
    p1 = np.zeros(N + 1)
    for k, alpha in sorted(alphas.items()):
        k = int(k)
        if alpha == 0 or k < 1 or k > N:
            continue
        den = k * float(A1) + k * (2 * N - k) * float(A2)
        if den == 0:
            raise DegenerateState(f"|N-{k}, N-{k}> is degenerate with |N, N>")
        if k % 2:
            continue
        log_ff = 0.5 * (math.lgamma(N + 1) - math.lgamma(N - k + 1))
        coef = alpha * c ** k * math.exp(log_ff) / den
        p1 += 2.0 * coef * math.cos(k * phi / 2) * dN * _d_padded(N - k, N - k, N, theta)
    return DistributionSeries(N=N, m=np.arange(-N, N + 1, 2), p=dN * dN, p1=p1, theta=theta, phi=phi,
                              m0=N, meta={"alphas": dict(alphas)})


def tbr_correction(N: int, theta: float, sigma: float, A1, A2, phi: float = 0.0,
                   include_exchange_branch: bool = True) -> DistributionSeries:
    """Closed-form generalized distribution for ``sigma a+aaa`` acting on ``|N, N>``.

    The conjugated operator sends ``|N, N>`` to two states of ``H_{N-2}``:

    * ``|N-2, N-2>`` with amplitude ``sigma c^4 sqrt(N(N-1)) (N-2) / (2 A1 + 4 A2 (N-1))``;
    * ``|N-2, N-4>`` with amplitude
      ``-sigma e^{-i phi} s c^3 sqrt(N(N-1)(N-2)) / (4 A1 + 8 A2 (N-2))``.

    ``include_exchange_branch=False`` keeps only the first.  The companion
    ``aaa`` term changes the particle number by three and has no first-order
    effect, so it is not needed here.
    """
    if N < 3:
        raise ValueError("three-body loss needs N >= 3")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    A1f, A2f = float(A1), float(A2)
    dN = wigner_d_column(N, N, theta)
    p1 = np.zeros(N + 1)
    den1 = 2 * A1f + 4 * A2f * (N - 1)
    if den1 == 0:
        raise DegenerateState("|N-2, N-2> is degenerate with |N, N>")
    g1 = sigma * c ** 4 * math.sqrt(N * (N - 1)) * (N - 2) / den1
    p1 += 2.0 * g1 * math.cos(phi) * dN * _d_padded(N - 2, N - 2, N, theta)
    if include_exchange_branch and s != 0.0:
        den2 = 4 * A1f + 8 * A2f * (N - 2)
        if den2 == 0:
            raise DegenerateState("|N-2, N-4> is degenerate with |N, N>")
        g2 = -sigma * s * c ** 3 * math.sqrt(N * (N - 1) * (N - 2)) / den2
        # e^{-i phi} from the amplitude times e^{2 i phi} from the rotation phase
        p1 += 2.0 * g2 * math.cos(phi) * dN * _d_padded(N - 2, N - 4, N, theta)
    return DistributionSeries(N=N, m=np.arange(-N, N + 1, 2), p=dN * dN, p1=p1, theta=theta, phi=phi,
                              m0=N, meta={"sigma": sigma, "exchange_branch": include_exchange_branch})


def loss_distribution(spec: LossSpec, N: int, m0: int, theta: float, A1, A2, phi: float = 0.0,
                      method: str = "analytic") -> DistributionSeries:
    """Generalized first-order distribution for any loss spec and any initial ``m0``."""
    corr = enlarged_first_order(spec, N, m0, theta, A1, A2, phi, method=method)
    series = generalized_distribution(corr, theta, phi, method=method)
    series.meta["skipped"] = list(corr.skipped)
    return series


def degenerate_block_is_nilpotent(spec: LossSpec, A, m: int, theta: float = 1.0, phi: float = 0.0,
                                  tol: float = 1e-12) -> bool:
    """Check numerically that ``U H_loss U^dagger`` restricted to ``S_A(m)`` is strictly triangular.

    Rows and columns are ordered by ascending total ``n``; every entry on or
    below the diagonal must vanish.
    """
    if spec.is_empty:
        raise InvalidOperator("spec has no loss terms")
    ns = sorted(n for n in A if n >= abs(m) and (n - m) % 2 == 0)
    block = np.zeros((len(ns), len(ns)), dtype=complex)
    for j, nj in enumerate(ns):
        for i, ni in enumerate(ns):
            B = conjugated_block(spec, nj, ni, theta, phi, method="oracle")
            block[i, j] = B[(m + ni) // 2, (m + nj) // 2]
    scale = max(1.0, float(np.abs(block).max()))
    return bool(np.all(np.abs(np.tril(block)) <= tol * scale))
