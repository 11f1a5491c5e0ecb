"""Exact arithmetic in F_q[pi, pi^-1] for an odd prime q.

Every element that occurs in the constructions downstream (matrix entries,
truncated sections, integral parts, character parameters) has finite support,
so a sparse Laurent *polynomial* with coefficients in F_q is the universal
container: it covers the elements we need of the Laurent-series field
F = F_q((pi)), of its ring of integers O = F_q[[pi]], and of the polynomial
ring F_q[pi^-1].

The ultrametric absolute value is |x| = q^(-valuation(x)) with |0| = 0,
kept exact as a Fraction.  Division is never needed outside inverting
nonzero constants, which `Fq` provides.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Iterator

__all__ = [
    "Fq",
    "LaurentPoly",
    "ResidueClass",
    "integral_part",
    "valuation_abs",
    "halve",
    "section",
]

INF = math.inf


def _is_odd_prime(q: int) -> bool:
    if q < 3 or q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


class Fq:
    """The coefficient field F_q, q an odd prime.  Scalars are ints in [0, q)."""

    def __init__(self, q: int):
        if not _is_odd_prime(q):
            raise ValueError(f"q must be an odd prime, got {q}")
        self.q = q
        # 2 is invertible since q is odd
        self.inv2 = pow(2, q - 2, q)

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return pow(a, self.q - 2, self.q)

    def half(self, a: int) -> int:
        return (a * self.inv2) % self.q

    def __repr__(self):
        return f"Fq({self.q})"


class LaurentPoly:
    """Element of F_q[pi, pi^-1]: finite map exponent -> nonzero coefficient.

    Canonical form stores no zero coefficients, so equality is map equality.
    Instances are immutable and hashable.
    """

    __slots__ = ("q", "c", "_key")

    def __init__(self, q: int, coeffs: dict[int, int] | None = None):
        self.q = q
        c = {}
        if coeffs:
            for e, a in coeffs.items():
                a %= q
                if a:
                    c[e] = a
        self.c = c
        self._key = (q,) + tuple(sorted(c.items()))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, q: int) -> "LaurentPoly":
        return cls(q)

    @classmethod
    def one(cls, q: int) -> "LaurentPoly":
        return cls(q, {0: 1})

    @classmethod
    def pi_pow(cls, q: int, k: int, coeff: int = 1) -> "LaurentPoly":
        """coeff * pi^k."""
        return cls(q, {k: coeff})

    @classmethod
    def from_digits(cls, q: int, digits: Iterable[int], lo: int) -> "LaurentPoly":
        """Polynomial sum(digits[k] * pi^(lo+k))."""
        return cls(q, {lo + k: d for k, d in enumerate(digits)})

    # -- ring structure ----------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        assert self.q == other.q
        c = dict(self.c)
        for e, a in other.c.items():
            c[e] = c.get(e, 0) + a
        return LaurentPoly(self.q, c)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.q, {e: -a for e, a in self.c.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        assert self.q == other.q
        c: dict[int, int] = {}
        for e1, a1 in self.c.items():
            for e2, a2 in other.c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + a1 * a2
        return LaurentPoly(self.q, c)

    def scale(self, a: int) -> "LaurentPoly":
        return LaurentPoly(self.q, {e: a * b for e, b in self.c.items()})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by pi^k."""
        return LaurentPoly(self.q, {e + k: a for e, a in self.c.items()})

    def square(self) -> "LaurentPoly":
        return self * self

    # -- structure queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, e: int) -> int:
        return self.c.get(e, 0)

    def valuation(self) -> float:
        """Min exponent; +inf for the zero element."""
        return min(self.c) if self.c else INF

    def degree(self) -> float:
        """Max exponent; -inf for the zero element."""
        return max(self.c) if self.c else -INF

    def abs_q(self) -> Fraction:
        """Ultrametric absolute value q^(-valuation); |0| = 0."""
        if not self.c:
            return Fraction(0)
        return Fraction(self.q) ** (-min(self.c))

    def in_O(self) -> bool:
        """All exponents >= 0 (integral element)."""
        return all(e >= 0 for e in self.c)

    def in_pi_inv(self) -> bool:
        """All exponents <= 0 (element of F_q[pi^-1])."""
        return all(e <= 0 for e in self.c)

    # -- truncations -------------------------------------------------------

    def integral_part(self) -> "LaurentPoly":
        """Keep exactly the terms with exponent <= 0."""
        return LaurentPoly(self.q, {e: a for e, a in self.c.items() if e <= 0})

    def truncate_mod(self, m: int) -> "LaurentPoly":
        """Drop terms with exponent >= m (reduction mod pi^m on O-elements)."""
        return LaurentPoly(self.q, {e: a for e, a in self.c.items() if e < m})

    def halve(self) -> "LaurentPoly":
        """Coefficientwise division by 2 (q odd)."""
        inv2 = pow(2, self.q - 2, self.q)
        return self.scale(inv2)

    def digits(self, lo: int, hi: int) -> list[int]:
        """Coefficients on the exponent window [lo, hi] inclusive."""
        return [self.c.get(e, 0) for e in range(lo, hi + 1)]

    # -- hashing / io ------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __str__(self) -> str:
        if not self.c:
            return "0"
        return "+".join(f"{a}*pi^{e}" for e, a in sorted(self.c.items()))

    __repr__ = __str__

    _TERM_RE = re.compile(r"^(\d+)\*pi\^(-?\d+)$")

    @classmethod
    def parse(cls, q: int, text: str) -> "LaurentPoly":
        """Parse the text encoding produced by str(): e.g. '1*pi^-2+2*pi^0'."""
        text = text.strip().replace(" ", "")
        if text == "0":
            return cls.zero(q)
        c: dict[int, int] = {}
        for term in text.split("+"):
            m = cls._TERM_RE.match(term)
            if not m:
                raise ValueError(f"bad element term: {term!r}")
            a, e = int(m.group(1)), int(m.group(2))
            c[e] = c.get(e, 0) + a
        return cls(q, c)


class ResidueClass:
    """Element of the residue ring O/pi^m O, m >= 1.

    The stored representative is the canonical truncation: exponents in
    [0, m).  Because addition in characteristic p is digitwise, the canonical
    section is additive, which downstream factorizations rely on.
    """

    __slots__ = ("q", "m", "rep")

    def __init__(self, q: int, m: int, rep: LaurentPoly):
        if m < 1:
            raise ValueError("modulus level must be >= 1")
        if rep.valuation() < 0:
            raise ValueError("residue representative must lie in O")
        self.q = q
        self.m = m
        self.rep = rep.truncate_mod(m)

    @classmethod
    def from_int(cls, q: int, m: int, a: int) -> "ResidueClass":
        return cls(q, m, LaurentPoly(q, {0: a}))

    @classmethod
    def from_digits(cls, q: int, m: int, digits: Iterable[int]) -> "ResidueClass":
        return cls(q, m, LaurentPoly.from_digits(q, digits, 0))

    @classmethod
    def zero(cls, q: int, m: int) -> "ResidueClass":
        return cls(q, m, LaurentPoly.zero(q))

    @classmethod
    def all_classes(cls, q: int, m: int) -> Iterator["ResidueClass"]:
        """All q^m classes, in lexicographic digit order."""
        for code in range(q**m):
            digits = []
            x = code
            for _ in range(m):
                x, d = divmod(x, q)
                digits.append(d)
            yield cls.from_digits(q, m, digits)

    def _check(self, other: "ResidueClass"):
        if self.q != other.q or self.m != other.m:
            raise ValueError("residue level mismatch")

    def __add__(self, other: "ResidueClass") -> "ResidueClass":
        self._check(other)
        return ResidueClass(self.q, self.m, self.rep + other.rep)

    def __sub__(self, other: "ResidueClass") -> "ResidueClass":
        self._check(other)
        return ResidueClass(self.q, self.m, self.rep - other.rep)

    def __mul__(self, other: "ResidueClass") -> "ResidueClass":
        self._check(other)
        return ResidueClass(self.q, self.m, self.rep * other.rep)

    def __neg__(self) -> "ResidueClass":
        return ResidueClass(self.q, self.m, -self.rep)

    def square(self) -> "ResidueClass":
        return ResidueClass(self.q, self.m, self.rep * self.rep)

    def half(self) -> "ResidueClass":
        return ResidueClass(self.q, self.m, self.rep.halve())

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def valuation(self) -> int | None:
        """Valuation in {0, ..., m-1}, or None for the zero class."""
        if self.rep.is_zero():
            return None
        return int(self.rep.valuation())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ResidueClass)
            and self.q == other.q
            and self.m == other.m
            and self.rep == other.rep
        )

    def __hash__(self) -> int:
        return hash((self.q, self.m, self.rep))

    def __repr__(self) -> str:
        return f"[{self.rep} mod pi^{self.m}]"


# -- module-level operation wrappers ---------------------------------------


def integral_part(x: LaurentPoly) -> LaurentPoly:
    """Truncation of x to its terms pi^k with k <= 0, landing in F_q[pi^-1]."""
    return x.integral_part()


def valuation_abs(x: LaurentPoly) -> tuple[float, Fraction]:
    """(valuation, ultrametric absolute value q^(-valuation))."""
    return x.valuation(), x.abs_q()


def halve(x: LaurentPoly) -> LaurentPoly:
    """The unique y with 2y = x (coefficientwise, q odd)."""
    return x.halve()


def section(c: ResidueClass) -> LaurentPoly:
    """Canonical section O/pi^m O -> O: the degree-< m representative."""
    return c.rep
