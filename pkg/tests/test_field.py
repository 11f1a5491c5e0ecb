import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from sp4norms.field import Fq, LaurentPoly, ResidueClass, halve, integral_part, section, valuation_abs


def P(q, text):
    return LaurentPoly.parse(q, text)


class TestFq:
    def test_validation(self):
        for bad in (2, 4, 9, 15, 1):
            with pytest.raises(ValueError):
                Fq(bad)
        for good in (3, 5, 7, 11):
            Fq(good)

    def test_inverses(self):
        for q in (3, 5, 7):
            f = Fq(q)
            for a in range(1, q):
                assert (a * f.inv(a)) % q == 1
            assert (2 * f.inv2) % q == 1


class TestRingAxioms:
    def test_exhaustive_small(self):
        # all polynomials supported on {pi^-1, pi^0, pi^1} over q=3
        q = 3
        polys = [
            LaurentPoly(q, {-1: a, 0: b, 1: c})
            for a in range(q) for b in range(q) for c in range(q)
        ]
        sub = polys[::4]
        for x, y in product(sub, sub):
            assert x + y == y + x
            assert x * y == y * x
        for x, y, z in product(sub[:5], sub[:5], sub[:5]):
            assert (x + y) + z == x + (y + z)
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z

    def test_randomized(self, rng):
        for q in (3, 5):
            for _ in range(200):
                def rp():
                    return LaurentPoly(q, {int(e): int(rng.integers(0, q))
                                           for e in rng.integers(-5, 6, size=4)})
                x, y, z = rp(), rp(), rp()
                assert (x + y) * z == x * z + y * z
                assert x - x == LaurentPoly.zero(q)


class TestUltrametric:
    def test_examples(self):
        q = 3
        assert valuation_abs(P(q, "1*pi^-3+1*pi^2")) == (-3, Fraction(27))
        assert valuation_abs(LaurentPoly.zero(q)) == (math.inf, Fraction(0))
        assert valuation_abs(P(q, "1*pi^5")) == (5, Fraction(1, 243))

    def test_inequality(self, rng):
        q = 5
        for _ in range(500):
            def rp():
                return LaurentPoly(q, {int(e): int(rng.integers(0, q))
                                       for e in rng.integers(-6, 7, size=3)})
            x, y = rp(), rp()
            assert (x + y).abs_q() <= max(x.abs_q(), y.abs_q())
            if x.abs_q() != y.abs_q():
                assert (x + y).abs_q() == max(x.abs_q(), y.abs_q())
            assert (x * y).abs_q() == x.abs_q() * y.abs_q()


class TestIntegralPart:
    def test_examples(self):
        q = 3
        assert integral_part(P(q, "1*pi^-2+1*pi^0+1*pi^3")) == P(q, "1*pi^-2+1*pi^0")
        assert integral_part(LaurentPoly.zero(q)) == LaurentPoly.zero(q)
        x = LaurentPoly.pi_pow(q, -1) * (LaurentPoly.one(q) + LaurentPoly.pi_pow(q, 1))
        assert integral_part(x) == x  # pi^-1 + 1 already has all exponents <= 0

    def test_homomorphism(self, rng):
        q = 3
        for _ in range(300):
            def rp():
                return LaurentPoly(q, {int(e): int(rng.integers(0, q))
                                       for e in rng.integers(-4, 5, size=4)})
            x, y = rp(), rp()
            assert integral_part(x + y) == integral_part(x) + integral_part(y)
            ip = integral_part(x)
            assert integral_part(ip) == ip
            assert (x - integral_part(x)).valuation() >= 1

    def test_fixed_points_and_kernel(self):
        q = 5
        x = P(q, "2*pi^-3+1*pi^0")
        assert integral_part(x) == x
        assert integral_part(P(q, "4*pi^2+1*pi^7")) == LaurentPoly.zero(q)


class TestHalve:
    def test_examples(self):
        assert halve(LaurentPoly.one(3)) == P(3, "2*pi^0")  # 2*2 = 4 = 1 mod 3
        assert halve(LaurentPoly.zero(3)) == LaurentPoly.zero(3)
        assert halve(LaurentPoly.pi_pow(5, -1)) == P(5, "3*pi^-1")  # 2*3 = 6 = 1 mod 5

    def test_doubling(self, rng):
        for q in (3, 7):
            for _ in range(100):
                x = LaurentPoly(q, {int(e): int(rng.integers(0, q))
                                    for e in rng.integers(-3, 4, size=3)})
                assert halve(x).scale(2) == x


class TestResidueClasses:
    def test_section_examples(self):
        q = 3
        rep = ResidueClass(q, 2, P(q, "1*pi^0+1*pi^1+2*pi^5"))
        assert section(rep) == P(q, "1*pi^0+1*pi^1")
        assert section(ResidueClass.zero(q, 4)) == LaurentPoly.zero(q)
        level1 = {str(section(c)) for c in ResidueClass.all_classes(q, 1)}
        assert level1 == {"0", "1*pi^0", "2*pi^0"}

    def test_section_reduction_identities(self):
        q = 3
        for m in (1, 2, 3):
            for c in ResidueClass.all_classes(q, m):
                assert ResidueClass(q, m, section(c)) == c
                assert section(c).degree() < m

    def test_ring_ops_reduce(self):
        q = 3
        a = ResidueClass(q, 2, P(q, "1*pi^0+2*pi^1"))
        b = ResidueClass(q, 2, P(q, "2*pi^0+2*pi^1"))
        assert (a * b).rep.degree() < 2
        assert (a + b) - b == a
        assert a.valuation() == 0
        assert ResidueClass.zero(q, 2).valuation() is None

    def test_negative_valuation_rejected(self):
        with pytest.raises(ValueError):
            ResidueClass(3, 2, P(3, "1*pi^-1"))


class TestIO:
    def test_roundtrip(self, rng):
        q = 5
        for _ in range(50):
            x = LaurentPoly(q, {int(e): int(rng.integers(0, q))
                                for e in rng.integers(-8, 9, size=5)})
            assert LaurentPoly.parse(q, str(x)) == x
        assert str(LaurentPoly.zero(q)) == "0"
        assert LaurentPoly.parse(q, "0") == LaurentPoly.zero(q)

    def test_bad_input(self):
        with pytest.raises(ValueError):
            LaurentPoly.parse(3, "pi^2")
