"""Sp4 over F_q[pi, pi^-1]: Cartan invariants, unipotent subgroups, cells.

The double coset of an element g under the integral symplectic subgroup is
read off from two exact quantities: the sup of entry absolute values |g| and
the sup over all 2x2 minors.  g lies in the (i, j) cell of the Weyl chamber
iff the first equals q^i and the second q^(i+j).  All computations here are
exact valuation arithmetic; no floating point.

Two parametrized unipotent families live inside the full upper unipotent
subgroup H: the abelian family H1 and the Heisenberg-type family H2 (whose
middle matrix entries carry y/2, so the parameter law is
(x,y,z)(x',y',z') = (x+x', y+y', z+z'+ (xy'-yx')/2)).  The alpha/beta maps
below produce the product elements whose cells are classified by the
valuation of a single affine combination of the inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .field import Fq, LaurentPoly, ResidueClass

__all__ = [
    "NotSymplectic",
    "OutsideChamber",
    "SpMatrix4",
    "CartanPair",
    "cartan_invariants",
    "diag_rep",
    "shear",
    "H1Elem",
    "H2Elem",
    "TildeH2Elem",
    "conj_by_shear",
    "FiniteWindow",
    "alpha1",
    "beta1",
    "cell_membership_h1",
    "h1_cell_formula",
    "alpha2",
    "beta2",
    "tilde_alpha2",
    "cell_membership_h2",
    "h2_cell_formula",
    "ball_contains",
    "group_mul",
    "group_inv",
]


class NotSymplectic(ValueError):
    pass


class OutsideChamber(ValueError):
    pass


def _J(q: int) -> tuple[tuple[LaurentPoly, ...], ...]:
    z = LaurentPoly.zero(q)
    one = LaurentPoly.one(q)
    none_ = -one
    return (
        (z, z, z, one),
        (z, z, one, z),
        (z, none_, z, z),
        (none_, z, z, z),
    )


class SpMatrix4:
    """4x4 matrix over F_q[pi, pi^-1] satisfying A J A^T = J (checked)."""

    __slots__ = ("q", "e")

    def __init__(self, q: int, entries, check: bool = True):
        self.q = q
        self.e = tuple(tuple(row) for row in entries)
        if len(self.e) != 4 or any(len(r) != 4 for r in self.e):
            raise ValueError("need a 4x4 entry array")
        if check and not self._is_symplectic():
            raise NotSymplectic("A J A^T != J")

    def _is_symplectic(self) -> bool:
        J = _J(self.q)
        e = self.e
        for r in range(4):
            for s in range(4):
                acc = LaurentPoly.zero(self.q)
                for k in range(4):
                    for l in range(4):
                        acc = acc + e[r][k] * J[k][l] * e[s][l]
                if acc != J[r][s]:
                    return False
        return True

    @classmethod
    def identity(cls, q: int) -> "SpMatrix4":
        z = LaurentPoly.zero(q)
        one = LaurentPoly.one(q)
        rows = [[one if r == s else z for s in range(4)] for r in range(4)]
        return cls(q, rows, check=False)

    def __mul__(self, other: "SpMatrix4") -> "SpMatrix4":
        assert self.q == other.q
        z = LaurentPoly.zero(self.q)
        rows = []
        for r in range(4):
            row = []
            for s in range(4):
                acc = z
                for k in range(4):
                    acc = acc + self.e[r][k] * other.e[k][s]
                row.append(acc)
            rows.append(row)
        return SpMatrix4(self.q, rows, check=False)

    def transpose(self) -> "SpMatrix4":
        return SpMatrix4(self.q, tuple(zip(*self.e)), check=False)

    def inverse(self) -> "SpMatrix4":
        # A J A^T = J and J^2 = -I give A^-1 = -J A^T J
        J = SpMatrix4(self.q, _J(self.q), check=False)
        m = J * self.transpose() * J
        rows = [[-a for a in row] for row in m.e]
        return SpMatrix4(self.q, rows, check=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, SpMatrix4) and self.q == other.q and self.e == other.e

    def __hash__(self) -> int:
        return hash((self.q, self.e))

    def entry_sup_val(self) -> float:
        """min over entries of the valuation (so sup |entry| = q^(-this))."""
        return min(a.valuation() for row in self.e for a in row)

    def minor_sup_val(self) -> float:
        """min over all 2x2 minors of the valuation."""
        best = float("inf")
        for r1, r2 in itertools.combinations(range(4), 2):
            for c1, c2 in itertools.combinations(range(4), 2):
                d = self.e[r1][c1] * self.e[r2][c2] - self.e[r1][c2] * self.e[r2][c1]
                v = d.valuation()
                if v < best:
                    best = v
        return best

    def to_json(self) -> list[str]:
        return [str(a) for row in self.e for a in row]

    def __repr__(self) -> str:
        return "SpMatrix4[" + "; ".join(", ".join(str(a) for a in row) for row in self.e) + "]"


class CartanPair(NamedTuple):
    i: int
    j: int

    @property
    def length(self) -> int:
        return self.i + self.j

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j}


def cartan_invariants(g: SpMatrix4) -> CartanPair:
    """Cell invariants (i, j): sup|entry| = q^i and sup|2x2 minor| = q^(i+j).

    Raises OutsideChamber when the computed pair violates i >= j >= 0, which
    signals an input outside the integral-times-chamber normal form.
    """
    vi = g.entry_sup_val()
    if vi > 0:
        raise OutsideChamber("sup entry absolute value below 1")
    i = -int(vi)
    vl = g.minor_sup_val()
    length = -int(vl)
    j = length - i
    if not 0 <= j <= i:
        raise OutsideChamber(f"invariants ({i},{j}) outside the chamber")
    return CartanPair(i, j)


def diag_rep(q: int, i: int, j: int) -> SpMatrix4:
    """Diagonal cell representative diag(pi^-i, pi^-j, pi^j, pi^i)."""
    if not 0 <= j <= i:
        raise OutsideChamber(f"({i},{j}) not in the chamber")
    z = LaurentPoly.zero(q)
    p = LaurentPoly.pi_pow
    rows = [
        [p(q, -i), z, z, z],
        [z, p(q, -j), z, z],
        [z, z, p(q, j), z],
        [z, z, z, p(q, i)],
    ]
    return SpMatrix4(q, rows, check=False)


def shear(q: int, eps: int) -> SpMatrix4:
    """Unipotent embedding of F_q with entry eps*pi^-1 in the (2,3) slot."""
    z = LaurentPoly.zero(q)
    one = LaurentPoly.one(q)
    rows = [
        [one, z, z, z],
        [z, one, LaurentPoly.pi_pow(q, -1, eps), z],
        [z, z, one, z],
        [z, z, z, one],
    ]
    return SpMatrix4(q, rows, check=False)


@dataclass(frozen=True)
class H1Elem:
    """Abelian family: parameters sit at entries (1,3)=(2,4)=x, (2,3)=y, (1,4)=z."""

    q: int
    x: LaurentPoly
    y: LaurentPoly
    z: LaurentPoly

    def __mul__(self, other: "H1Elem") -> "H1Elem":
        return H1Elem(self.q, self.x + other.x, self.y + other.y, self.z + other.z)

    def inv(self) -> "H1Elem":
        return H1Elem(self.q, -self.x, -self.y, -self.z)

    @classmethod
    def identity(cls, q: int) -> "H1Elem":
        zero = LaurentPoly.zero(q)
        return cls(q, zero, zero, zero)

    def embed(self) -> SpMatrix4:
        q = self.q
        z0 = LaurentPoly.zero(q)
        one = LaurentPoly.one(q)
        rows = [
            [one, z0, self.x, self.z],
            [z0, one, self.y, self.x],
            [z0, z0, one, z0],
            [z0, z0, z0, one],
        ]
        return SpMatrix4(q, rows, check=False)

    def key(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class H2Elem:
    """Heisenberg-type family: matrix carries (1,2)=x, (1,3)=(2,4)=y/2, (1,4)=z."""

    q: int
    x: LaurentPoly
    y: LaurentPoly
    z: LaurentPoly

    def __mul__(self, other: "H2Elem") -> "H2Elem":
        comm = (self.x * other.y - self.y * other.x).halve()
        return H2Elem(self.q, self.x + other.x, self.y + other.y, self.z + other.z + comm)

    def inv(self) -> "H2Elem":
        return H2Elem(self.q, -self.x, -self.y, -self.z)

    @classmethod
    def identity(cls, q: int) -> "H2Elem":
        zero = LaurentPoly.zero(q)
        return cls(q, zero, zero, zero)

    def embed(self) -> SpMatrix4:
        q = self.q
        z0 = LaurentPoly.zero(q)
        one = LaurentPoly.one(q)
        w = self.y.halve()
        rows = [
            [one, self.x, w, self.z],
            [z0, one, z0, w],
            [z0, z0, one, -self.x],
            [z0, z0, z0, one],
        ]
        return SpMatrix4(q, rows, check=False)

    def key(self):
        return (self.x, self.y, self.z)


def conj_by_shear(q: int, eps: int, h: H2Elem) -> H2Elem:
    """shear(eps) h shear(-eps) = h2(x, y - 2 eps pi^-1 x, z)."""
    shift = h.x.shift(-1).scale(2 * eps)
    return H2Elem(q, h.x, h.y - shift, h.z)


@dataclass(frozen=True)
class TildeH2Elem:
    """Element shear(eps) * h of the index-q extension of H2."""

    q: int
    eps: int
    h: H2Elem

    def __mul__(self, other: "TildeH2Elem") -> "TildeH2Elem":
        # shear(e)h shear(e')h' = shear(e+e') (shear(-e') h shear(e')) h'
        moved = conj_by_shear(self.q, -other.eps, self.h)
        return TildeH2Elem(self.q, (self.eps + other.eps) % self.q, moved * other.h)

    def inv(self) -> "TildeH2Elem":
        return TildeH2Elem(
            self.q, (-self.eps) % self.q, conj_by_shear(self.q, self.eps, self.h.inv())
        )

    @classmethod
    def identity(cls, q: int) -> "TildeH2Elem":
        return cls(q, 0, H2Elem.identity(q))

    def embed(self) -> SpMatrix4:
        return shear(self.q, self.eps) * self.h.embed()


def group_mul(a, b):
    """Product in the family of a (matrix multiplication for SpMatrix4)."""
    if type(a) is not type(b):
        raise TypeError("operands from different families")
    return a * b


def group_inv(a):
    return a.inverse() if isinstance(a, SpMatrix4) else a.inv()


# -- finite windows ----------------------------------------------------------


def _box(q: int, n: int) -> Iterator[LaurentPoly]:
    """All elements of F_q[pi^-1] with absolute value <= q^n (exponents in [-n, 0])."""
    for code in range(q ** (n + 1)):
        digits = []
        x = code
        for _ in range(n + 1):
            x, d = divmod(x, q)
            digits.append(d)
        yield LaurentPoly.from_digits(q, digits, -n)


def _in_box(v: LaurentPoly, n: int) -> bool:
    return v.in_pi_inv() and v.valuation() >= -n


@dataclass(frozen=True)
class FiniteWindow:
    """Finite subgroup cut out by coordinatewise absolute-value bounds.

    family 'H1n':      |x|,|y|,|z| <= q^n inside H1
    family 'H2n':      |x|,|y| <= q^n, |z| <= q^(2n) inside H2
    family 'H2primen': |x| <= q^n, |y| <= q^(n+1), |z| <= q^(2n+1) inside H2
    family 'tildeH2n': shear(F_q) . H2primen window
    """

    family: str
    q: int
    n: int

    def bounds(self) -> tuple[int, int, int]:
        n = self.n
        if self.family == "H1n":
            return (n, n, n)
        if self.family == "H2n":
            return (n, n, 2 * n)
        if self.family in ("H2primen", "tildeH2n"):
            return (n, n + 1, 2 * n + 1)
        raise ValueError(f"unknown window family {self.family}")

    def size(self) -> int:
        bx, by, bz = self.bounds()
        base = self.q ** ((bx + 1) + (by + 1) + (bz + 1))
        return base * self.q if self.family == "tildeH2n" else base

    def contains(self, elem) -> bool:
        bx, by, bz = self.bounds()
        if self.family == "tildeH2n":
            if isinstance(elem, TildeH2Elem):
                elem = elem.h
            elif not isinstance(elem, H2Elem):
                return False
        expected = H1Elem if self.family == "H1n" else H2Elem
        if self.family != "tildeH2n" and not isinstance(elem, expected):
            return False
        return (
            _in_box(elem.x, bx) and _in_box(elem.y, by) and _in_box(elem.z, bz)
        )

    def __iter__(self):
        bx, by, bz = self.bounds()
        if self.family == "H1n":
            for x in _box(self.q, bx):
                for y in _box(self.q, by):
                    for z in _box(self.q, bz):
                        yield H1Elem(self.q, x, y, z)
        elif self.family in ("H2n", "H2primen"):
            for x in _box(self.q, bx):
                for y in _box(self.q, by):
                    for z in _box(self.q, bz):
                        yield H2Elem(self.q, x, y, z)
        elif self.family == "tildeH2n":
            for eps in range(self.q):
                for x in _box(self.q, bx):
                    for y in _box(self.q, by):
                        for z in _box(self.q, bz):
                            yield TildeH2Elem(self.q, eps, H2Elem(self.q, x, y, z))
        else:
            raise ValueError(self.family)


def ball_contains(g: SpMatrix4, n: int) -> bool:
    """True iff the cell length i+j of g is at most n."""
    return cartan_invariants(g).length <= n


# -- alpha/beta families and their cells -------------------------------------


def _ip_shift(poly: LaurentPoly, k: int) -> LaurentPoly:
    """[pi^k * poly]: integral part of the shifted polynomial."""
    return poly.shift(k).integral_part()


def alpha1(a: ResidueClass, b: ResidueClass, i: int) -> H1Elem:
    """First abelian family member, residue inputs at level i+1."""
    _check_level(i + 1, a, b)
    q = a.q
    x = _ip_shift(a.rep, -i)
    y = LaurentPoly.pi_pow(q, -i)
    z = _ip_shift((a.square() - b).rep, -i)
    return H1Elem(q, x, y, z)


def beta1(x: ResidueClass, y: ResidueClass, i: int) -> H1Elem:
    """Second abelian family member, residue inputs at level i+1."""
    _check_level(i + 1, x, y)
    q = x.q
    xh = x.half()
    xe = _ip_shift(xh.rep, -i)
    z = _ip_shift((xh.square() + y).rep, -i)
    return H1Elem(q, xe, LaurentPoly.zero(q), z)


def _check_level(level: int, *classes: ResidueClass):
    for c in classes:
        if c.m != level:
            raise ValueError(f"residue input at level {c.m}, expected {level}")


def h1_cell_formula(i: int, l: int) -> CartanPair:
    """Expected cell of alpha1*beta1 when the combination has valuation l <= i."""
    if not 0 <= l <= i:
        raise ValueError("valuation out of the classified range")
    return CartanPair(i, i - l)


def cell_membership_h1(
    a: ResidueClass, b: ResidueClass, x: ResidueClass, y: ResidueClass, i: int
) -> tuple[int | None, CartanPair]:
    """(valuation of y-ax-b or None if zero, computed cell of the product)."""
    v = y - a * x - b
    g = alpha1(a, b, i) * beta1(x, y, i)
    return v.valuation(), cartan_invariants(g.embed())


def _one_plus_pi(q: int, c: ResidueClass) -> LaurentPoly:
    return LaurentPoly.one(q) + c.rep.shift(1)


def alpha2(a1: ResidueClass, a2: ResidueClass, b: ResidueClass, m: int) -> H2Elem:
    """First Heisenberg family member, residue inputs at level m+1."""
    _check_level(m + 1, a1, a2, b)
    q = a1.q
    x = -_ip_shift(_one_plus_pi(q, a1), -m - 1)
    y = _ip_shift(_one_plus_pi(q, a2), -m - 1).scale(2)
    z = -_ip_shift(b.rep, -2 * m)
    return H2Elem(q, x, y, z)


def beta2(x1: ResidueClass, x2: ResidueClass, y: ResidueClass, m: int) -> H2Elem:
    """Second Heisenberg family member, residue inputs at level m+1."""
    _check_level(m + 1, x1, x2, y)
    q = x1.q
    x = _ip_shift(x2.rep, -m)
    ye = _ip_shift(x1.rep, -m).scale(2)
    z = _ip_shift((x1 + x2).rep, -m).shift(-m - 1) + _ip_shift(y.rep, -2 * m)
    return H2Elem(q, x, ye, z)


def tilde_alpha2(a1: ResidueClass, a2: ResidueClass, b: ResidueClass, m: int) -> TildeH2Elem:
    """shear(1) * alpha2: the twist used when the target length is odd."""
    return TildeH2Elem(a1.q, 1, alpha2(a1, a2, b, m))


def h2_cell_formula(m: int, l: int, odd: bool) -> CartanPair:
    """Expected cell of the Heisenberg product for combination valuation l.

    Even target length i+j = 2m+2: (i+j-2-l, l+2) for l <= m-1.
    Odd  target length i+j = 2m+3: (i+j-3-l, l+3) for l <= m-2; at l = m-1
    the (2,4) entry dominates the sup norm and the cell is (m+2, m+1).
    """
    if odd:
        if not 0 <= l <= m - 1:
            raise ValueError("valuation out of the classified range")
        if l == m - 1:
            return CartanPair(m + 2, m + 1)
        return CartanPair(2 * m - l, l + 3)
    if not 0 <= l <= m - 1:
        raise ValueError("valuation out of the classified range")
    return CartanPair(2 * m - l, l + 2)


def cell_membership_h2(
    a1: ResidueClass,
    a2: ResidueClass,
    b: ResidueClass,
    x1: ResidueClass,
    x2: ResidueClass,
    y: ResidueClass,
    m: int,
    odd: bool = False,
) -> tuple[int | None, CartanPair]:
    """(valuation of y-(a1x1+a2x2+b) or None, computed cell of the product)."""
    v = y - (a1 * x1 + a2 * x2 + b)
    prod = alpha2(a1, a2, b, m) * beta2(x1, x2, y, m)
    mat = shear(a1.q, 1) * prod.embed() if odd else prod.embed()
    return v.valuation(), cartan_invariants(mat)
