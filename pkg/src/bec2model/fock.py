"""Two-mode boson (Schwinger) basis |N, m> and sparse operator actions.

States are labelled by the total number ``N = n_a + n_b`` and the relative
number ``m = n_a - n_b``.  Inside a sector ``H_N`` the allowed values are
``m = -N, -N+2, ..., N`` and every matrix in this package orders the basis by
ascending ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidBasis, NotNormalOrdered

#: Elementary factor names.  ``"a+"`` is the creation operator for mode a.
FACTORS = ("a", "a+", "b", "b+")


def allowed_m(N: int) -> list[int]:
    """Relative numbers available in the ``N``-particle sector, ascending."""
    if int(N) != N or N < 0:
        raise InvalidBasis(f"total particle number must be a non-negative integer, got {N!r}")
    N = int(N)
    return list(range(-N, N + 1, 2))


def m_index(N: int, m: int) -> int:
    """Position of ``|N, m>`` in the ascending-m basis of ``H_N``."""
    check_label(N, m)
    return (m + N) // 2


def check_label(N: int, m: int) -> None:
    if int(N) != N or N < 0:
        raise InvalidBasis(f"N must be a non-negative integer, got {N!r}")
    if int(m) != m or abs(m) > N or (N - m) % 2:
        raise InvalidBasis(f"m={m!r} is not an allowed relative number for N={N}")


@dataclass(frozen=True, order=True)
class FockLabel:
    """Basis state ``|N, m>``; occupation numbers are derived on demand."""

    N: int
    m: int

    def __post_init__(self):
        check_label(self.N, self.m)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def from_occupations(cls, na: int, nb: int) -> "FockLabel":
        if na < 0 or nb < 0:
            raise InvalidBasis(f"negative occupation ({na}, {nb})")
        return cls(na + nb, na - nb)

    @property
    def na(self) -> int:
        return (self.N + self.m) // 2

    @property
    def nb(self) -> int:
        return (self.N - self.m) // 2

    @property
    def index(self) -> int:
        return (self.m + self.N) // 2


def raise_factor(N: int, m: int) -> float:
    """``sqrt(N(N+2) - m(m+2)) / 2``, the a+b matrix element onto m+2."""
    return 0.5 * math.sqrt(max(N * (N + 2) - m * (m + 2), 0))


def lower_factor(N: int, m: int) -> float:
    """``sqrt(N(N+2) - m(m-2)) / 2``, the ab+ matrix element onto m-2."""
    return 0.5 * math.sqrt(max(N * (N + 2) - m * (m - 2), 0))


def apply_exchange_raise(s: FockLabel) -> tuple[float, FockLabel | None]:
    """Apply ``a+ b`` to ``|N, m>``; at the top of the ladder returns ``(0.0, None)``."""
    if s.m == s.N:
        return 0.0, None
    return raise_factor(s.N, s.m), FockLabel(s.N, s.m + 2)


def apply_exchange_lower(s: FockLabel) -> tuple[float, FockLabel | None]:
    """Apply ``a b+`` to ``|N, m>``; at the bottom of the ladder returns ``(0.0, None)``."""
    if s.m == -s.N:
        return 0.0, None
    return lower_factor(s.N, s.m), FockLabel(s.N, s.m - 2)


@dataclass(frozen=True)
class MonomialOp:
    """Product of elementary boson factors times a scalar.

    ``factors`` is read left to right as written, so ``("a+", "b")`` is
    ``a+ b`` and acts on a ket with ``b`` first.  Coefficients may be ints,
    Fractions or complex numbers; they are only turned into floating point
    when a matrix is built.
    """

    factors: tuple[str, ...] = ()
    coeff: Number = 1

    def __post_init__(self):
        factors = tuple(self.factors)
        bad = [f for f in factors if f not in FACTORS]
        if bad:
            raise ValueError(f"unknown boson factors {bad}; use {FACTORS}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def parse(cls, text: str, coeff: Number = 1) -> "MonomialOp":
        """Build from a whitespace separated string such as ``"a+ a+ b b"``."""
        return cls(tuple(text.split()), coeff)

    @classmethod
    def from_powers(cls, pa_dag: int, pb_dag: int, pa: int, pb: int, coeff: Number = 1) -> "MonomialOp":
        """Normal-ordered ``a+^pa_dag b+^pb_dag a^pa b^pb``."""
        return cls(("a+",) * pa_dag + ("b+",) * pb_dag + ("a",) * pa + ("b",) * pb, coeff)

    def powers(self) -> tuple[int, int, int, int]:
        """Counts of (a+, b+, a, b)."""
        return (self.factors.count("a+"), self.factors.count("b+"),
                self.factors.count("a"), self.factors.count("b"))

    @property
    def net_change(self) -> int:
        """Change in total particle number produced by the monomial."""
        pad, pbd, pa, pb = self.powers()
        return pad + pbd - pa - pb

    def is_normal_ordered(self) -> bool:
        for mode in ("a", "b"):
            seen_annihilator = False
            for f in self.factors:
                if f == mode:
                    seen_annihilator = True
                elif f == mode + "+" and seen_annihilator:
                    return False
        return True

    def adjoint(self) -> "MonomialOp":
        flipped = tuple(f[0] if f.endswith("+") else f + "+" for f in reversed(self.factors))
        c = self.coeff
        c = c.conjugate() if hasattr(c, "conjugate") else c
        return MonomialOp(flipped, c)

    def scaled(self, factor: Number) -> "MonomialOp":
        return MonomialOp(self.factors, self.coeff * factor)

    def __str__(self):
        body = " ".join(self.factors) or "1"
        return f"({self.coeff})*{body}"


def _apply_factors(factors: Sequence[str], na: int, nb: int) -> tuple[float, int, int]:
    amp = 1.0
    for f in reversed(factors):
        if f == "a":
            if na == 0:
                return 0.0, 0, 0
            amp *= math.sqrt(na)
            na -= 1
        elif f == "a+":
            na += 1
            amp *= math.sqrt(na)
        elif f == "b":
            if nb == 0:
                return 0.0, 0, 0
            amp *= math.sqrt(nb)
            nb -= 1
        else:
            nb += 1
            amp *= math.sqrt(nb)
    return amp, na, nb


def build_operator_matrix(op: MonomialOp | Iterable[MonomialOp], N: int) -> np.ndarray:
    """Matrix of a normal-ordered monomial (or sum of monomials) on ``H_N``.

    Column ``j`` holds the expansion of ``op |N, m_j>`` in the codomain sector
    ``H_{N + net_change}``; number-conserving operators give a square matrix.
    A sum must share one net change.
    """
    ops = [op] if isinstance(op, MonomialOp) else list(op)
    if not ops:
        raise ValueError("empty operator sum")
    for o in ops:
        if not o.is_normal_ordered():
            raise NotNormalOrdered(f"{o} is not normal ordered")
    nets = {o.net_change for o in ops}
    if len(nets) != 1:
        raise ValueError(f"operator sum mixes particle-number changes {sorted(nets)}")
    allowed_m(N)
    target = N + nets.pop()
    rows = max(target + 1, 0)
    out = np.zeros((rows, N + 1), dtype=complex)
    if rows == 0:
        return out
    for j, m in enumerate(range(-N, N + 1, 2)):
        na, nb = (N + m) // 2, (N - m) // 2
        for o in ops:
            amp, na2, nb2 = _apply_factors(o.factors, na, nb)
            if amp == 0.0:
                continue
            out[(na2 - nb2 + target) // 2, j] += complex(o.coeff) * amp
    return out


def number_difference(N: int) -> np.ndarray:
    """Diagonal matrix of ``m = a+a - b+b`` on ``H_N``."""
    return np.diag(np.arange(-N, N + 1, 2, dtype=float))


def exchange_raise_matrix(N: int) -> np.ndarray:
    """Real matrix of ``a+ b`` on ``H_N`` (below the diagonal in ascending-m order)."""
    ms = np.arange(-N, N, 2)
    vals = 0.5 * np.sqrt((N - ms) * (N + ms + 2.0))
    return np.diag(vals, k=-1) if N > 0 else np.zeros((1, 1))

