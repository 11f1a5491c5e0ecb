"""Shared helpers: random elements and an independent dense convolution oracle."""

from __future__ import annotations

import numpy as np
import pytest

from sp4norms.field import LaurentPoly
from sp4norms.norms import _coord_windows
from sp4norms.symplectic import H1Elem, H2Elem
from sp4norms.sweeps import all_tuples


def random_poly(rng, q, lo, hi) -> LaurentPoly:
    return LaurentPoly(q, {e: int(rng.integers(0, q)) for e in range(lo, hi + 1)})


def dense_conv_matrix(f) -> np.ndarray:
    """Full matrix of left convolution by f on l^2 of the support's digit box.

    Built elementwise from the group law: out(g) = sum_h f(h) V(h^-1 g), so
    M[g, h^-1 g] += f(h).  Independent of the production engine's code paths.
    """
    q = f.q
    wins = _coord_windows(f)
    if f.family == "H2":
        (xlo, xhi), (ylo, yhi), (zlo, zhi) = wins
        zlo = min(zlo, xlo + ylo)
        zhi = max(zhi, xhi + yhi, 0)
        wins = [(xlo, xhi), (ylo, yhi), (zlo, zhi)]
    boxes = []
    for lo, hi in wins:
        boxes.append([LaurentPoly.from_digits(q, dig, lo) for dig in all_tuples(q, hi - lo + 1)])
    elems = [(x, y, z) for x in boxes[0] for y in boxes[1] for z in boxes[2]]
    index = {k: n for n, k in enumerate(elems)}
    cls = H1Elem if f.family == "H1" else H2Elem
    M = np.zeros((len(elems), len(elems)), dtype=complex)
    for hk, w in f.data.items():
        hinv = cls(q, *hk).inv()
        for n, g in enumerate(elems):
            M[n, index[(hinv * cls(q, *g)).key()]] += w
    return M


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
