"""Averaged group-algebra elements on the unipotent families and their pairings.

The builders produce uniform averages of point masses parametrized by
residue classes; the two-parameter differences (the deltas) are the signed
functions whose reduced C*-norms decay in the chamber coordinates.  Supports
are stored sparsely as maps from parameter triples (x, y, z) to complex
weights, with duplicate triples merged (several residue tuples can produce
one group element, because the entries only depend on coarser quotients).

A function of the Cartan pair (a chamber table) pairs with a delta through
the cells its support lands in; for odd total length the support must be
shifted by shear(1) before its cell is read off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .field import LaurentPoly, ResidueClass
from .symplectic import (
    CartanPair,
    H1Elem,
    H2Elem,
    OutsideChamber,
    cartan_invariants,
    shear,
)

__all__ = [
    "GroupFunction",
    "m_rule",
    "build_h1",
    "build_h2",
    "delta1",
    "delta2",
    "support_cells",
    "pairing",
]

PRUNE_EPS = 1e-15

Key = tuple[LaurentPoly, LaurentPoly, LaurentPoly]


@dataclass
class GroupFunction:
    """Finitely supported complex function on H1 or H2 parameter triples."""

    family: str  # 'H1' or 'H2'
    q: int
    data: dict[Key, complex] = field(default_factory=dict)

    def _elem(self, key: Key):
        cls = H1Elem if self.family == "H1" else H2Elem
        return cls(self.q, *key)

    def add_mass(self, key: Key, w: complex):
        self.data[key] = self.data.get(key, 0j) + w

    def prune(self) -> "GroupFunction":
        self.data = {k: w for k, w in self.data.items() if abs(w) > PRUNE_EPS}
        return self

    def support(self) -> list[Key]:
        return list(self.data)

    def elements(self):
        return ((self._elem(k), w) for k, w in self.data.items())

    def total_mass(self) -> complex:
        return sum(self.data.values(), 0j)

    def __sub__(self, other: "GroupFunction") -> "GroupFunction":
        assert self.family == other.family and self.q == other.q
        out = GroupFunction(self.family, self.q, dict(self.data))
        for k, w in other.data.items():
            out.add_mass(k, -w)
        return out.prune()

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        assert self.family == other.family and self.q == other.q
        out = GroupFunction(self.family, self.q, dict(self.data))
        for k, w in other.data.items():
            out.add_mass(k, w)
        return out.prune()

    def scale(self, c: complex) -> "GroupFunction":
        return GroupFunction(self.family, self.q, {k: c * w for k, w in self.data.items()})

    def adjoint(self) -> "GroupFunction":
        """f*(g) = conj(f(g^-1))."""
        out = GroupFunction(self.family, self.q)
        for k, w in self.data.items():
            inv = self._elem(k).inv()
            out.add_mass(inv.key(), w.conjugate())
        return out.prune()

    def convolve(self, other: "GroupFunction") -> "GroupFunction":
        assert self.family == other.family and self.q == other.q
        out = GroupFunction(self.family, self.q)
        for k1, w1 in self.data.items():
            g1 = self._elem(k1)
            for k2, w2 in other.data.items():
                out.add_mass((g1 * self._elem(k2)).key(), w1 * w2)
        return out.prune()

    @classmethod
    def point_mass(cls, family: str, q: int, key: Key, w: complex = 1.0) -> "GroupFunction":
        return cls(family, q, {key: complex(w)})

    @classmethod
    def identity_mass(cls, family: str, q: int) -> "GroupFunction":
        z = LaurentPoly.zero(q)
        return cls.point_mass(family, q, (z, z, z))

    def to_json(self) -> list[dict]:
        return [
            {"x": str(k[0]), "y": str(k[1]), "z": str(k[2]), "re": w.real, "im": w.imag}
            for k, w in sorted(self.data.items(), key=lambda kv: tuple(map(str, kv[0])))
        ]


def m_rule(i: int, j: int) -> int:
    """Integral part of (i+j)/2."""
    return (i + j) // 2


def build_h1(q: int, i: int, j: int, check_chamber: bool = True) -> GroupFunction:
    """Uniform average over a in O/pi^i O of the abelian point masses.

    Triple: ([pi^-i a], pi^-i, [pi^-i a^2] + pi^-j).  For the second term of
    a diagonal delta, j may exceed i by one; the support then sits in the
    (j, i) cell instead, and the chamber guard is relaxed by the caller.
    """
    if i < 1:
        raise OutsideChamber("need i >= 1")
    if check_chamber and not 0 <= j <= i:
        raise OutsideChamber(f"({i},{j}) not in the chamber")
    f = GroupFunction("H1", q)
    w = 1.0 / q**i
    y = LaurentPoly.pi_pow(q, -i)
    pj = LaurentPoly.pi_pow(q, -j)
    for a in ResidueClass.all_classes(q, i):
        x = a.rep.shift(-i).integral_part()
        z = a.square().rep.shift(-i).integral_part() + pj
        f.add_mass((x, y, z), w)
    return f


def build_h2(q: int, i: int, j: int, check_chamber: bool = True) -> GroupFunction:
    """Uniform average of Heisenberg point masses over residue parameters.

    Triple: ([pi^-m (1+pi a)], [pi^-m b], [pi^-i (1+pi c)]) with
    m = (i+j)//2.  Each parameter is averaged over exactly the residue level
    its entry depends on: a mod pi^m, b mod pi^(m+1), c mod pi^i.  For
    j < i this merely merges the duplicates of an average over (O/pi^i O)^3;
    at j = i the level m+1 exceeds i and the full b-range is essential: a
    truncated b-average leaves a norm-one piece in the two-term difference
    (a character trivial on the truncated b-values but not on [pi^-m O]
    turns the difference into a plain translation average), destroying the
    decay of the deltas.
    """
    if check_chamber and not 0 <= j <= i:
        raise OutsideChamber(f"({i},{j}) not in the chamber")
    if i < 1:
        raise OutsideChamber("need i >= 1")
    m = m_rule(i, j)
    f = GroupFunction("H2", q)
    one = LaurentPoly.one(q)
    da, db, dc = m, m + 1, i
    w = 1.0 / q ** (da + db + dc)

    def classes(d):
        if d == 0:
            return [LaurentPoly.zero(q)]
        return [c.rep for c in ResidueClass.all_classes(q, d)]

    for a in classes(da):
        x = (one + a.shift(1)).shift(-m).integral_part()
        for b in classes(db):
            y = b.shift(-m).integral_part()
            for c in classes(dc):
                z = (one + c.shift(1)).shift(-i).integral_part()
                f.add_mass((x, y, z), w)
    return f.prune()


def delta1(q: int, i: int, j: int) -> GroupFunction:
    """Signed difference moving the second chamber coordinate up by one."""
    if not (i >= 1 and 0 <= j <= i):
        raise OutsideChamber(f"({i},{j}) outside the delta range")
    return build_h1(q, i, j) - build_h1(q, i, j + 1, check_chamber=False)


def delta2(q: int, i: int, j: int) -> GroupFunction:
    """Signed difference moving along (i,j) -> (i+1, j-1)."""
    if not (i >= 1 and 1 <= j <= i):
        raise OutsideChamber(f"({i},{j}) outside the delta range")
    return build_h2(q, i, j) - build_h2(q, i + 1, j - 1)


def support_cells(f: GroupFunction, shift_eps: int = 0) -> dict[CartanPair, int]:
    """Cartan cells met by the support (after an optional shear(eps) shift)."""
    cells: dict[CartanPair, int] = {}
    s = shear(f.q, shift_eps) if shift_eps else None
    for g, _ in f.elements():
        mat = g.embed() if s is None else s * g.embed()
        pair = cartan_invariants(mat)
        cells[pair] = cells.get(pair, 0) + 1
    return cells


def pairing(
    table: dict[tuple[int, int], complex],
    delta: GroupFunction,
    shift_eps: int = 0,
) -> complex:
    """sum over the support of table[cell(shift * h)] * delta(h).

    The table is a chamber function: one complex value per Cartan pair.
    Raises KeyError when the support meets a cell missing from the table.
    """
    s = shear(delta.q, shift_eps) if shift_eps else None
    total = 0j
    for g, w in delta.elements():
        mat = g.embed() if s is None else s * g.embed()
        pair = cartan_invariants(mat)
        total += table[(pair.i, pair.j)] * w
    return total
