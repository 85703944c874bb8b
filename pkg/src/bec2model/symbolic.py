"""Exact normal ordering of two-mode boson polynomials and term counting.

Coefficients live in a small exact ring: rational linear combinations of
products ``A_i N^p c^u s^v e^k`` with ``c = cos(theta/2)``,
``s = sin(theta/2)``, ``e = exp(i phi)`` (``k`` may be negative) and at most
one symbolic amplitude ``A_i``.  The relation ``c^2 = 1 - s^2`` is applied
eagerly, so a coefficient is zero exactly when its dictionary is empty.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import InvalidDegree, ResourceLimit
from .fock import FACTORS, MonomialOp

# key: (amplitude index or -1, power of N, power of c (0/1), power of s, power of e)
Key = tuple[int, int, int, int, int]


class Coef:
    """Element of the exact coefficient ring."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, Fraction] | None = None):
        self.terms: dict[Key, Fraction] = {}
        for k, v in (terms or {}).items():
            self._add_term(k, Fraction(v))

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, x) -> "Coef":
        return cls({(-1, 0, 0, 0, 0): Fraction(x)}) if x else cls()

    @classmethod
    def monomial(cls, x=1, amp: int = -1, n: int = 0, c: int = 0, s: int = 0, e: int = 0) -> "Coef":
        out = cls()
        out._add_term((amp, n, c, s, e), Fraction(x))
        return out

    def _add_term(self, key: Key, v: Fraction):
        amp, n, pc, ps, pe = key
        if pc >= 2:  # c^2 = 1 - s^2
            q, r = divmod(pc, 2)
            for j in range(q + 1):
                w = v * math.comb(q, j) * (-1) ** j
                self._add_term((amp, n, r, ps + 2 * j, pe), w)
            return
        new = self.terms.get(key, Fraction(0)) + v
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    # ring operations ------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = Coef(self.terms)
        for k, v in other.terms.items():
            out._add_term(k, v)
        return out

    __radd__ = __add__

    def __neg__(self):
        return Coef({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __mul__(self, other):
        other = _coerce(other)
        out = Coef()
        for (a1, n1, c1, s1, e1), v1 in self.terms.items():
            for (a2, n2, c2, s2, e2), v2 in other.terms.items():
                if a1 >= 0 and a2 >= 0:
                    raise ValueError("products of two symbolic amplitudes are not supported")
                out._add_term((max(a1, a2), n1 + n2, c1 + c2, s1 + s2, e1 + e2), v1 * v2)
        return out

    __rmul__ = __mul__

    def conj(self) -> "Coef":
        return Coef({(a, n, c, s, -e): v for (a, n, c, s, e), v in self.terms.items()})

    def negate_s(self) -> "Coef":
        """Substitute ``s -> -s`` (``theta -> -theta``)."""
        return Coef({k: (-v if k[3] % 2 else v) for k, v in self.terms.items()})

    # queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, (Coef, int, Fraction)) and (self - _coerce(other)).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def amplitudes(self) -> set[int]:
        return {k[0] for k in self.terms}

    def proportional_to(self, other: "Coef") -> Fraction | None:
        """Rational ``r`` with ``self == r * other``, or ``None``."""
        if self.is_zero() or other.is_zero() or self.terms.keys() != other.terms.keys():
            return None
        ratios = {self.terms[k] / other.terms[k] for k in self.terms}
        return ratios.pop() if len(ratios) == 1 else None

    def evaluate(self, theta: float, phi: float, amps: Mapping[int, float] | None = None,
                 N: float = 0.0) -> complex:
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        total = 0j
        for (a, n, pc, ps, pe), v in self.terms.items():
            amp = 1.0 if a < 0 else (amps or {}).get(a, 0.0)
            total += float(v) * amp * N ** n * c ** pc * s ** ps * cmath.exp(1j * pe * phi)
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, n, pc, ps, pe), v in sorted(self.terms.items()):
            sym = "".join(x for x in (f"A{a}" if a >= 0 else "", f"N^{n}" if n else "",
                                      "c" if pc else "", f"s^{ps}" if ps else "",
                                      f"e^{pe}" if pe else "") if x)
            parts.append(f"{v}{'*' + sym if sym else ''}")
        return " + ".join(parts)


def _coerce(x) -> Coef:
    return x if isinstance(x, Coef) else Coef.const(x)


# ---------------------------------------------------------------------------
# boson polynomials

Powers = tuple[int, int, int, int]   # (a+, b+, a, b) of a normal-ordered monomial


def _word(p: Powers) -> tuple[str, ...]:
    pad, pbd, pa, pb = p
    return ("a+",) * pad + ("b+",) * pbd + ("a",) * pa + ("b",) * pb


@lru_cache(maxsize=None)
def _order_mode(word: tuple[bool, ...]) -> tuple[tuple[tuple[int, int], int], ...]:
    """Normal-order one mode; ``True`` marks a creation operator.

    Returns ``((i, j), n)`` meaning ``n * (dagger)^i (plain)^j``.
    """
    acc: dict[tuple[int, int], int] = {(0, 0): 1}
    for dag in word:
        nxt: dict[tuple[int, int], int] = {}
        for (i, j), n in acc.items():
            if dag:
                # x+^i x^j x+ = x+^(i+1) x^j + j x+^i x^(j-1)
                nxt[(i + 1, j)] = nxt.get((i + 1, j), 0) + n
                if j:
                    nxt[(i, j - 1)] = nxt.get((i, j - 1), 0) + n * j
            else:
                nxt[(i, j + 1)] = nxt.get((i, j + 1), 0) + n
        acc = nxt
    return tuple(sorted(acc.items()))


def _order_word(word: tuple[str, ...]) -> dict[Powers, int]:
    wa = tuple(f == "a+" for f in word if f in ("a", "a+"))
    wb = tuple(f == "b+" for f in word if f in ("b", "b+"))
    out: dict[Powers, int] = {}
    for (ia, ja), na in _order_mode(wa):
        for (ib, jb), nb in _order_mode(wb):
            key = (ia, ib, ja, jb)
            out[key] = out.get(key, 0) + na * nb
    return out


@dataclass
class BosonPolynomial:
    """Map from boson words to exact coefficients.

    Words are tuples over ``("a", "a+", "b", "b+")`` in written order; after
    :func:`normal_order` every word has the form ``a+^p b+^q a^r b^s``.
    """

    terms: dict[tuple[str, ...], Coef]

    def __init__(self, terms: Mapping[tuple[str, ...], object] | None = None):
        self.terms = {}
        for w, c in (terms or {}).items():
            self._add(tuple(w), _coerce(c))

    def _add(self, word, coef: Coef):
        bad = [f for f in word if f not in FACTORS]
        if bad:
            raise ValueError(f"unknown boson factors {bad}")
        new = self.terms.get(word, Coef()) + coef
        if new.is_zero():
            self.terms.pop(word, None)
        else:
            self.terms[word] = new

    @classmethod
    def parse(cls, text: str, coef=1) -> "BosonPolynomial":
        return cls({tuple(text.split()): coef})

    @classmethod
    def from_powers(cls, powers: Powers, coef=1) -> "BosonPolynomial":
        return cls({_word(powers): coef})

    @classmethod
    def relative_number(cls) -> "BosonPolynomial":
        return cls({("a+", "a"): 1, ("b+", "b"): -1})

    @classmethod
    def total_number(cls) -> "BosonPolynomial":
        return cls({("a+", "a"): 1, ("b+", "b"): 1})

    def __add__(self, other: "BosonPolynomial") -> "BosonPolynomial":
        out = BosonPolynomial(self.terms)
        for w, c in other.terms.items():
            out._add(w, c)
        return out

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, k) -> "BosonPolynomial":
        k = _coerce(k)
        return BosonPolynomial({w: c * k for w, c in self.terms.items()})

    def __mul__(self, other: "BosonPolynomial") -> "BosonPolynomial":
        out = BosonPolynomial()
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out._add(w1 + w2, c1 * c2)
        return out

    def power(self, k: int) -> "BosonPolynomial":
        out = BosonPolynomial({(): 1})
        for _ in range(k):
            out = normal_order(out * self)
        return out

    def adjoint(self) -> "BosonPolynomial":
        flip = {"a": "a+", "a+": "a", "b": "b+", "b+": "b"}
        return BosonPolynomial({tuple(flip[f] for f in reversed(w)): c.conj() for w, c in self.terms.items()})

    def is_normal_ordered(self) -> bool:
        return all(MonomialOp(w).is_normal_ordered() for w in self.terms)

    def is_hermitian(self) -> bool:
        a = normal_order(self)
        b = normal_order(self.adjoint())
        return (a - b).is_zero()

    def is_zero(self) -> bool:
        return not self.terms

    def by_powers(self) -> dict[Powers, Coef]:
        """Normal-ordered terms keyed by ``(a+, b+, a, b)`` powers."""
        p = normal_order(self)
        return {MonomialOp(w).powers(): c for w, c in p.terms.items()}

    def degrees(self) -> set[int]:
        return {len(w) for w in self.terms}

    def to_monomials(self, theta: float, phi: float, amps=None, N: float = 0.0) -> list[MonomialOp]:
        """Numeric monomials (for :func:`bec2model.fock.build_operator_matrix`)."""
        return [MonomialOp(w, c.evaluate(theta, phi, amps, N)) for w, c in normal_order(self).terms.items()]


def normal_order(p: BosonPolynomial) -> BosonPolynomial:
    """Equivalent polynomial whose words are all of the form ``a+^p b+^q a^r b^s``."""
    out = BosonPolynomial()
    for w, c in p.terms.items():
        for powers, n in _order_word(w).items():
            out._add(_word(powers), c * n)
    return out


def _displaced_factor(f: str, inverse: bool) -> list[tuple[Coef, str]]:
    """``U^dagger f U`` as a linear combination; ``inverse`` gives ``U f U^dagger``."""
    c = Coef.monomial(c=1)
    s = Coef.monomial(s=1)
    if inverse:
        s = -s
    e, ei = Coef.monomial(e=1), Coef.monomial(e=-1)
    table = {
        "a": [(c, "a"), (e * s, "b")],
        "b": [(-(ei * s), "a"), (c, "b")],
        "a+": [(c, "a+"), (ei * s, "b+")],
        "b+": [(-(e * s), "a+"), (c, "b+")],
    }
    return table[f]


def conjugate_by_displacement(p: BosonPolynomial, inverse: bool = False) -> BosonPolynomial:
    """Exact normal-ordered ``U^dagger p U`` (or ``U p U^dagger`` with ``inverse=True``)."""
    out = BosonPolynomial()
    for w, coef in normal_order(p).terms.items():
        for combo in itertools.product(*(_displaced_factor(f, inverse) for f in w)):
            k = coef
            for ck, _ in combo:
                k = k * ck
            out._add(tuple(f for _, f in combo), k)
    return normal_order(out)


# ---------------------------------------------------------------------------
# counting

def _check_degree(degree: int):
    if int(degree) != degree or degree < 0 or degree % 2:
        raise InvalidDegree(f"number-conserving terms have even degree >= 0, got {degree!r}")


def count_general_terms(degree: int) -> int:
    """Families ``{M, M^dagger}`` in a homogeneous number-conserving Hamiltonian: ``(n+2)(n+4)/8``."""
    _check_degree(degree)
    return (degree + 2) * (degree + 4) // 8


def enumerate_general_families(degree: int) -> list[tuple[Powers, Powers]]:
    """Brute-force list of families ``(M, M^dagger)`` of normal-ordered degree-``degree`` monomials."""
    _check_degree(degree)
    k = degree // 2
    seen: set[Powers] = set()
    fams = []
    for pad in range(k + 1):
        for pa in range(k + 1):
            m = (pad, k - pad, pa, k - pa)
            adj = (pa, k - pa, pad, k - pad)
            if m in seen:
                continue
            seen.update({m, adj})
            fams.append((m, adj))
    return fams


def count_general_cumulative(n_body: int) -> int:
    """Families up to ``n_body``-body terms (degree ``2 n_body``)."""
    if int(n_body) != n_body or n_body < 0:
        raise InvalidDegree(f"body count must be a non-negative integer, got {n_body!r}")
    return sum(count_general_terms(2 * j) for j in range(n_body + 1))


def count_general_by_degree(degree: int) -> int:
    """Cumulative count indexed by polynomial degree: ``n^3/48 + n^2/4 + 11n/12 + 1``."""
    _check_degree(degree)
    return count_general_cumulative(degree // 2)


def n_model_hamiltonian(n_body: int) -> BosonPolynomial:
    """``U^dagger (sum_i A_i m^i) U`` with symbolic amplitudes ``A_0 .. A_n``."""
    m = BosonPolynomial.relative_number()
    total = BosonPolynomial()
    for i in range(n_body + 1):
        total = total + m.power(i).scaled(Coef.monomial(amp=i))
    return conjugate_by_displacement(total)


def reduce_in_sector(p: BosonPolynomial) -> BosonPolynomial:
    """Rewrite ``p`` on the fixed-``N`` sector so no monomial holds both ``b+`` and ``b``.

    Uses ``b+^q b^s = b+^(q-1) b^(s-1) (N - a+a - s + 1)`` with the total
    number placed rightmost, where it acts as the symbol ``N``.  The result
    is the canonical representative of ``p`` modulo ``N_op - N``.
    """
    n_sym = Coef.monomial(n=1)
    todo = dict(p.by_powers())
    out = BosonPolynomial()
    na = BosonPolynomial.parse("a+ a")
    while todo:
        powers, c = todo.popitem()
        pad, pbd, pa, pb = powers
        if pbd == 0 or pb == 0:
            out._add(_word(powers), c)
            continue
        base = BosonPolynomial.from_powers((pad, pbd - 1, pa, pb - 1))
        repl = base.scaled(c * (n_sym - (pb - 1))) - normal_order(base * na).scaled(c)
        for pp, cc in repl.by_powers().items():
            new = todo.get(pp, Coef()) + cc
            if new.is_zero():
                todo.pop(pp, None)
            else:
                todo[pp] = new
    return out


def _hermitian_families(terms: Mapping[Powers, Coef]) -> set[Powers]:
    return {min(p, (p[2], p[3], p[0], p[1])) for p in terms}


N_MODEL_RULES = ("couplings", "monomials", "families")
MAX_N_MODEL = 5


def count_n_model_terms(n_body: int, rule: str = "couplings") -> int:
    """Number of terms in the displaced ``n``-body polynomial Hamiltonian.

    ``rule`` selects what counts as a term:

    * ``"couplings"``: Hermitian families ``{M, M^dagger}`` left after
      reducing on the fixed-``N`` sector (:func:`reduce_in_sector`); each
      family carries one independent coupling.
    * ``"monomials"``: every normal-ordered monomial with a nonzero exact
      coefficient, before any sector reduction.
    * ``"families"``: Hermitian families before sector reduction.
    """
    if int(n_body) != n_body or n_body < 0:
        raise InvalidDegree(f"body count must be a non-negative integer, got {n_body!r}")
    if n_body > MAX_N_MODEL:
        raise ResourceLimit(f"n-model expansion limited to n <= {MAX_N_MODEL}, got {n_body}")
    if rule not in N_MODEL_RULES:
        raise ValueError(f"rule must be one of {N_MODEL_RULES}")
    H = n_model_hamiltonian(int(n_body))
    if rule == "monomials":
        return len(H.terms)
    if rule == "families":
        return len(_hermitian_families(H.by_powers()))
    return len(_hermitian_families(reduce_in_sector(H).by_powers()))


@dataclass(frozen=True)
class CountRow:
    n_body: int
    n_model: int
    general: int

    @property
    def missed(self) -> int:
        return self.general - self.n_model


def count_table(max_body: int = 3, rule: str = "couplings") -> list[CountRow]:
    """Rows comparing the displaced ``n``-model with the general ``n``-body Hamiltonian."""
    return [CountRow(n, count_n_model_terms(n, rule), count_general_cumulative(n)) for n in range(max_body + 1)]
