"""Cell classification of the two-parameter unipotent products.

The vectorized sweeps are exhaustive over the reduced coordinates that the
product matrices factor through; the object-level route (residue classes,
matrix products, exact minors) is compared against them on exhaustive small
levels and random samples, which validates the reduction itself.
"""

import itertools

import numpy as np
import pytest

from sp4norms import sweeps
from sp4norms.field import LaurentPoly, ResidueClass
from sp4norms.symplectic import (
    CartanPair,
    FiniteWindow,
    SpMatrix4,
    alpha1,
    alpha2,
    beta1,
    beta2,
    cartan_invariants,
    cell_membership_h1,
    cell_membership_h2,
    h1_cell_formula,
    h2_cell_formula,
    shear,
    tilde_alpha2,
)


def classes(q, lvl):
    return list(ResidueClass.all_classes(q, lvl))


class TestAlphaBetaDisplays:
    def test_alpha1_at_zero(self):
        q, i = 3, 2
        z = ResidueClass.zero(q, i + 1)
        a = alpha1(z, z, i)
        m = a.embed()
        # only off-diagonal entry is pi^-i at (2,3)
        assert m.e[1][2] == LaurentPoly.pi_pow(q, -i)
        assert m.e[0][2].is_zero() and m.e[0][3].is_zero() and m.e[1][3].is_zero()

    def test_beta1_at_zero(self):
        q, i = 3, 2
        z = ResidueClass.zero(q, i + 1)
        assert beta1(z, z, i).embed() == SpMatrix4.identity(q)

    def test_level_mismatch(self):
        q = 3
        z = ResidueClass.zero(q, 2)
        with pytest.raises(ValueError):
            alpha1(z, z, 2)
        with pytest.raises(ValueError):
            beta2(z, z, z, 2)

    def test_alpha_beta_window_membership(self, rng):
        """Images land in the stated finite windows."""
        q = 3
        for i in (1, 2):
            w = FiniteWindow("H1n", q, i)
            cls = classes(q, i + 1)
            for _ in range(40):
                a, b = (cls[int(k)] for k in rng.integers(0, len(cls), 2))
                assert w.contains(alpha1(a, b, i))
                assert w.contains(beta1(a, b, i))
        for m in (1, 2):
            weven = FiniteWindow("H2n", q, m + 1)
            wtilde = FiniteWindow("H2primen", q, m + 1)
            cls = classes(q, m + 1)
            for _ in range(40):
                a1, a2, b = (cls[int(k)] for k in rng.integers(0, len(cls), 3))
                assert weven.contains(alpha2(a1, a2, b, m))
                assert weven.contains(beta2(a1, a2, b, m))
                assert wtilde.contains(tilde_alpha2(a1, a2, b, m).h)


class TestAbelianCells:
    def test_exhaustive_sweep(self):
        for i in (1, 2, 3):
            stats = sweeps.h1_cells_sweep(3, i)
            assert stats["pairs"] == 3 ** (2 * (i + 1))

    def test_object_route_exhaustive_i1(self):
        q, i = 3, 1
        for a, b, x, y in itertools.product(classes(q, 2), repeat=4):
            l, pair = cell_membership_h1(a, b, x, y, i)
            if l is not None:
                assert pair == h1_cell_formula(i, l)

    def test_object_route_sampled(self, rng):
        q = 3
        for i in (2, 3):
            cls = classes(q, i + 1)
            for _ in range(120):
                a, b, x, y = (cls[int(k)] for k in rng.integers(0, len(cls), 4))
                l, pair = cell_membership_h1(a, b, x, y, i)
                v = y - a * x - b
                assert l == v.valuation()
                if l is not None:
                    assert pair == h1_cell_formula(i, l)

    def test_examples(self):
        q, i = 3, 2
        z = ResidueClass.zero(q, 3)
        one = ResidueClass.from_int(q, 3, 1)
        l, pair = cell_membership_h1(z, z, z, one, i)
        assert l == 0 and pair == CartanPair(2, 2)
        l, pair = cell_membership_h1(z, z, z, z, i)
        assert l is None

    def test_sup_norm_and_det_congruence_object(self, rng):
        q, i = 3, 2
        cls = classes(q, i + 1)
        for _ in range(100):
            a, b, x, y = (cls[int(k)] for k in rng.integers(0, len(cls), 4))
            g = (alpha1(a, b, i) * beta1(x, y, i)).embed()
            assert -g.entry_sup_val() == i  # sup entry norm q^i
            det = g.e[0][2] * g.e[1][3] - g.e[0][3] * g.e[1][2]
            v = y - a * x - b
            resid = det + v.rep.shift(-2 * i)
            assert resid.valuation() >= -i + 1


class TestHeisenbergCells:
    def test_exhaustive_sweeps(self):
        for m in (1, 2):
            for odd in (False, True):
                stats = sweeps.h2_cells_sweep(3, m, odd)
                assert stats["pairs"] == 3 ** (5 * (m + 1))

    def test_object_route_sampled(self, rng):
        q = 3
        for m, odd in [(1, False), (1, True), (2, False), (2, True)]:
            cls = classes(q, m + 1)
            for _ in range(60):
                a1, a2, b, x1, x2, y = (cls[int(k)] for k in rng.integers(0, len(cls), 6))
                l, pair = cell_membership_h2(a1, a2, b, x1, x2, y, m, odd=odd)
                v = y - (a1 * x1 + a2 * x2 + b)
                assert l == v.valuation()
                if l is not None and l <= m - 1:
                    assert pair == h2_cell_formula(m, l, odd)

    def test_product_entry_formulas(self, rng):
        """alpha2*beta2 has entries (-xi1, xi2, eta) exactly as constructed."""
        q = 3
        for m in (1, 2):
            cls = classes(q, m + 1)
            for _ in range(40):
                a1, a2, b, x1, x2, y = (cls[int(k)] for k in rng.integers(0, len(cls), 6))
                g = (alpha2(a1, a2, b, m) * beta2(x1, x2, y, m)).embed()
                one = LaurentPoly.one(q)
                xi1 = (one + (a1 - x2).rep.shift(1)).shift(-m - 1).integral_part()
                xi2 = (one + (a2 + x1).rep.shift(1)).shift(-m - 1).integral_part()
                eta = (y - b).rep.shift(-2 * m).integral_part() \
                    - a1.rep.shift(-m) * x1.rep.shift(-m) \
                    - a2.rep.shift(-m) * x2.rep.shift(-m)
                assert g.e[0][1] == -xi1
                assert g.e[0][2] == xi2
                assert g.e[0][3] == eta
                assert g.e[1][3] == xi2 and g.e[2][3] == xi1
                # eta congruence
                v = y - (a1 * x1 + a2 * x2 + b)
                assert (eta - v.rep.shift(-2 * m)).valuation() >= -m + 1

    def test_minor_norm_object_sampled(self, rng):
        """The minor sup is q^(2m+2) (even) / q^(2m+3) (twisted) on samples;
        the sweeps check it exhaustively over the reduced tuple space."""
        q = 3
        for m in (1, 2):
            cls = classes(q, m + 1)
            for _ in range(40):
                a1, a2, b, x1, x2, y = (cls[int(k)] for k in rng.integers(0, len(cls), 6))
                g = (alpha2(a1, a2, b, m) * beta2(x1, x2, y, m)).embed()
                assert -g.minor_sup_val() == 2 * m + 2
                gt = shear(q, 1) * (tilde_alpha2(a1, a2, b, m).h * beta2(x1, x2, y, m)).embed()
                # tilde product via the matrix route
                gt2 = (tilde_alpha2(a1, a2, b, m) * type(tilde_alpha2(a1, a2, b, m))(
                    q, 0, beta2(x1, x2, y, m))).embed()
                assert -gt2.minor_sup_val() == 2 * m + 3

    def test_odd_boundary_cell(self):
        """At l = m-1 the twisted product sits in (m+2, m+1), not the formula cell."""
        q, m = 3, 1
        cls = classes(q, m + 1)
        z = ResidueClass.zero(q, m + 1)
        one = ResidueClass.from_int(q, m + 1, 1)
        l, pair = cell_membership_h2(z, z, z, z, z, one, m, odd=True)
        assert l == 0 == m - 1
        assert pair == CartanPair(m + 2, m + 1)
        assert h2_cell_formula(m, l, odd=True) == pair

    def test_formula_ranges(self):
        with pytest.raises(ValueError):
            h1_cell_formula(2, 3)
        with pytest.raises(ValueError):
            h2_cell_formula(2, 2, odd=False)
        assert h2_cell_formula(2, 0, odd=True) == CartanPair(4, 3)
        assert h2_cell_formula(2, 1, odd=True) == CartanPair(4, 3)
        assert h2_cell_formula(2, 1, odd=False) == CartanPair(3, 3)
