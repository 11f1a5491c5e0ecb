"""Additive characters of F_q, of residue rings, and of F_q[pi^-1].

Everything is built from one base character psi0 of F_q (a |-> exp(2 pi i a/q),
values taken from a precomputed root-of-unity table so long sums do not
drift) and the pairing

    chi_t(gamma) = psi0(coefficient of pi^0 in t * gamma).

The exponent-k coefficient of t pairs with the exponent-(-k) coefficient of
gamma, so the parameter t lives on the opposite side of the exponent axis
from its argument domain:

  * characters of a residue ring O/pi^l O evaluate on canonical
    representatives (exponents in [0, l)), so t is a polynomial in pi^-1
    with |t| <= q^(l-1);
  * characters of the discrete group F_q[pi^-1] evaluate on polynomials in
    pi^-1, so t is a polynomial in pi (an O-element); t determines the
    character through its exponent-[0, L] coefficients only.

With this pairing, chi_t as a character of the subgroups pi^l O is nonzero
on pi^l O and vanishes on pi^(l+1) O exactly when |t| = q^l.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Iterator

from .field import LaurentPoly, ResidueClass

__all__ = [
    "BaseCharacter",
    "RationalCharacter",
    "ResidueCharacter",
    "is_nondegenerate",
    "gauss_sum",
    "residue_characters",
    "char_average",
]


class BaseCharacter:
    """Nontrivial additive character of F_q: a -> exp(2 pi i a / q)."""

    __slots__ = ("q", "roots")

    def __init__(self, q: int):
        self.q = q
        self.roots = tuple(cmath.exp(2j * cmath.pi * k / q) for k in range(q))

    def value(self, a: int) -> complex:
        return self.roots[a % self.q]


_BASE_CACHE: dict[int, BaseCharacter] = {}


def base_character(q: int) -> BaseCharacter:
    if q not in _BASE_CACHE:
        _BASE_CACHE[q] = BaseCharacter(q)
    return _BASE_CACHE[q]


@dataclass(frozen=True)
class RationalCharacter:
    """Character gamma -> psi0((t * gamma)_0) of an additive group of polynomials."""

    q: int
    t: LaurentPoly

    def pair(self, gamma: LaurentPoly) -> int:
        """The F_q value sum_k t_k gamma_{-k}."""
        acc = 0
        for e, a in self.t.c.items():
            b = gamma.coeff(-e)
            if b:
                acc += a * b
        return acc % self.q

    def value(self, gamma: LaurentPoly) -> complex:
        return base_character(self.q).value(self.pair(gamma))

    def is_trivial(self) -> bool:
        return self.t.is_zero()

    def is_trivial_on(self, elems: Iterable[LaurentPoly]) -> bool:
        return all(self.pair(g) == 0 for g in elems)

    def to_json(self) -> dict:
        return {"t": str(self.t)}


@dataclass(frozen=True)
class ResidueCharacter:
    """Character of O/pi^level O, evaluated on canonical representatives.

    The parameter is reduced to the exponent window (-level, 0]; coefficients
    of t below pi^(-(level-1)) cannot pair with any representative digit.
    """

    q: int
    level: int
    chi: RationalCharacter

    @classmethod
    def from_t(cls, q: int, level: int, t: LaurentPoly) -> "ResidueCharacter":
        window = LaurentPoly(q, {e: a for e, a in t.c.items() if -level < e <= 0})
        return cls(q, level, RationalCharacter(q, window))

    def value_class(self, c: ResidueClass) -> complex:
        assert c.m == self.level
        return self.chi.value(c.rep)

    def value_rep(self, rep: LaurentPoly) -> complex:
        return self.chi.value(rep.truncate_mod(self.level))

    def to_json(self) -> dict:
        return {"t": str(self.chi.t), "level": self.level}


def is_nondegenerate(eta: ResidueCharacter) -> bool:
    """Nontrivial on the top graded piece pi^(level-1) O / pi^level O.

    Equivalent to the parameter having a nonzero coefficient at
    pi^(-(level-1)), i.e. |t| = q^(level-1) in the canonical window.
    """
    return eta.chi.t.coeff(-(eta.level - 1)) != 0


def gauss_sum(eta: ResidueCharacter) -> complex:
    """Average of eta(a^2) over the residue ring at eta's level."""
    q, level = eta.q, eta.level
    total = 0j
    for a in ResidueClass.all_classes(q, level):
        total += eta.value_class(a.square())
    return total / q**level


def residue_characters(q: int, level: int, nondegenerate: bool | None = None) -> Iterator[ResidueCharacter]:
    """All q^level characters of O/pi^level O (optionally filtered)."""
    for code in range(q**level):
        digits = []
        x = code
        for _ in range(level):
            x, d = divmod(x, q)
            digits.append(d)
        t = LaurentPoly(q, {-k: d for k, d in enumerate(digits)})
        eta = ResidueCharacter(q, level, RationalCharacter(q, t))
        if nondegenerate is None or is_nondegenerate(eta) == nondegenerate:
            yield eta


def char_average(chi: RationalCharacter, elems: Iterable[LaurentPoly]) -> complex:
    """Average of chi over a finite family (1 if trivial on a subgroup, else 0)."""
    total = 0j
    n = 0
    for g in elems:
        total += chi.value(g)
        n += 1
    return total / n
