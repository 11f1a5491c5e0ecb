"""Vectorized exhaustive sweeps over residue tuples, supports, and characters.

The object layer (LaurentPoly, SpMatrix4) is exact but too slow for the
multi-million-tuple exhaustive verifications.  This module redoes the same
arithmetic on numpy digit arrays: a batch of polynomials supported on a fixed
exponent window [lo, hi] is an int array of shape (N, hi-lo+1) with column k
holding the coefficient of pi^(lo+k).  Everything stays exact (integers
mod q); the tests cross-check these paths against the object layer.

Cells of batched matrices are read off the handful of varying entries of the
two matrix shapes in play (abelian and Heisenberg, optionally shear-shifted);
ultrametric valuation arithmetic accounts for every constant minor.
"""

from __future__ import annotations

import numpy as np

from .field import Fq

BIG = 10**6  # valuation sentinel for the zero polynomial


# -- digit-array helpers -----------------------------------------------------


def all_tuples(q: int, d: int) -> np.ndarray:
    """(q^d, d) array of all digit vectors; column 0 varies fastest."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.int16)
    grids = np.indices((q,) * d).reshape(d, -1)
    return grids[::-1].T.astype(np.int16).copy()


def poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Windowed product: (N, Wa) x (N, Wb) -> (N, Wa+Wb-1), exponents add."""
    n = max(a.shape[0], b.shape[0])
    wa, wb = a.shape[1], b.shape[1]
    out = np.zeros((n, wa + wb - 1), dtype=np.int32)
    for k in range(wa):
        out[:, k : k + wb] += a[:, k : k + 1].astype(np.int32) * b
    return out


def val_of(arr: np.ndarray, lo: int) -> np.ndarray:
    """Valuation (min exponent with nonzero digit) per row; BIG if zero."""
    nz = arr != 0
    first = np.argmax(nz, axis=1)
    some = nz.any(axis=1)
    return np.where(some, lo + first, BIG)


def window_slice(arr: np.ndarray, lo: int, new_lo: int, new_hi: int) -> np.ndarray:
    """Re-window a digit array to exponents [new_lo, new_hi] (zero padded)."""
    n, w = arr.shape
    out = np.zeros((n, new_hi - new_lo + 1), dtype=np.int32)
    src_lo = max(lo, new_lo)
    src_hi = min(lo + w - 1, new_hi)
    if src_lo <= src_hi:
        out[:, src_lo - new_lo : src_hi - new_lo + 1] = arr[:, src_lo - lo : src_hi - lo + 1]
    return out


def shift_down(arr: np.ndarray) -> np.ndarray:
    """Multiply by pi^-1 within the window; requires an empty low column."""
    if arr[:, 0].any():
        raise ValueError("no headroom for a pi^-1 shift")
    out = np.empty_like(arr)
    out[:, :-1] = arr[:, 1:]
    out[:, -1] = 0
    return out


# -- cell invariants for the two matrix shapes -------------------------------


def h1_shape_cell(q, x, xlo, y, ylo, z, zlo):
    """(i, i+j) arrays for matrices [[1,0,x,z],[0,1,y,x],[0,0,1,0],[0,0,0,1]].

    Varying minors are x, y, z and x^2 - yz; all others are 0 or 1.
    """
    vx = val_of(x % q, xlo)
    vy = val_of(y % q, ylo)
    vz = val_of(z % q, zlo)
    lo = min(2 * xlo, ylo + zlo)
    hi = max(0, 2 * (xlo + x.shape[1] - 1), ylo + y.shape[1] - 1 + zlo + z.shape[1] - 1)
    xx = window_slice(poly_mul(x, x), 2 * xlo, lo, hi)
    yz = window_slice(poly_mul(y, z), ylo + zlo, lo, hi)
    vd = val_of((xx - yz) % q, lo)
    zero = np.zeros(len(vx), dtype=np.int64)
    i_arr = -np.minimum.reduce([vx, vy, vz, zero])
    len_arr = -np.minimum.reduce([vx, vy, vz, vd, zero])
    return i_arr, len_arr


def h2_shape_cell(q, x, xlo, w, wlo, z, zlo, shifted: bool):
    """(i, i+j) arrays for the Heisenberg matrix shape.

    Unshifted [[1,x,w,z],[0,1,0,w],[0,0,1,-x],[0,0,0,1]]: varying minors are
    x, w, z, x^2, w^2, xw-z, xw+z.  Shifted (pi^-1 in the (2,3) slot, (2,4)
    becomes w - pi^-1 x): x, w, z, x^2, w^2, xw+z, pi^-1, w - pi^-1 x,
    xw - pi^-1 x^2 - z, w^2 - pi^-1 xw - pi^-1 z.
    """
    vx = val_of(x % q, xlo)
    vw = val_of(w % q, wlo)
    vz = val_of(z % q, zlo)
    zero = np.zeros(len(vx), dtype=np.int64)

    lo = min(2 * xlo - 1, 2 * wlo, xlo + wlo - 1, zlo - 1, xlo - 1)
    hi = max(0, 2 * (xlo + x.shape[1] - 1), 2 * (wlo + w.shape[1] - 1),
             xlo + x.shape[1] + wlo + w.shape[1] - 2, zlo + z.shape[1] - 1)

    def win(a, alo):
        return window_slice(a, alo, lo, hi)

    xw = win(poly_mul(x, w), xlo + wlo)
    zw = win(z % q, zlo)
    m_plus = val_of((xw + zw) % q, lo)                    # xw + z
    ents = [vx, vw, vz, zero]
    vals = [vx, vw, vz, 2 * vx, 2 * vw, m_plus, zero]
    if not shifted:
        vals.append(val_of((xw - zw) % q, lo))            # xw - z
    else:
        xx = win(poly_mul(x, x), 2 * xlo)
        ww = win(poly_mul(w, w), 2 * wlo)
        xl = win(x % q, xlo)
        wl = win(w % q, wlo)
        m24 = val_of((wl - shift_down(xl)) % q, lo)       # w - pi^-1 x
        m3 = val_of((xw - shift_down(xx) - zw) % q, lo)   # xw - pi^-1 x^2 - z
        m4 = val_of((ww - shift_down(xw) - shift_down(zw)) % q, lo)
        none = np.full(len(vx), -1, dtype=np.int64)       # the pi^-1 entry
        ents += [m24, none]
        vals += [m24, m3, m4, none]
    i_arr = -np.minimum.reduce(ents)
    len_arr = -np.minimum.reduce(vals)
    return i_arr, len_arr


# -- supports of the averaged functions --------------------------------------


def h1_support_digits(q: int, i: int, j: int):
    """Digit arrays (x, y, z) with exponent lows for the abelian builder support."""
    a = all_tuples(q, i)                        # class digits at pi^0..pi^(i-1)
    x = a                                       # [pi^-i a]: digits at -i..-1
    aa = poly_mul(a, a) % q
    aa = aa[:, :i]                              # a^2 reduced mod pi^i
    zlo = min(-i, -j - 1)
    z = window_slice(aa, -i, zlo, 0)
    z[:, -j - zlo] = (z[:, -j - zlo] + 1) % q   # + pi^-j
    y = np.ones((x.shape[0], 1), dtype=np.int16)
    return (x.astype(np.int32), -i), (y.astype(np.int32), -i), (z, zlo)


def h1_support_cells(q: int, i: int, j: int):
    """{(i',j'): multiplicity} over the support of the abelian builder."""
    (x, xlo), (y, ylo), (z, zlo) = h1_support_digits(q, i, j)
    ia, ln = h1_shape_cell(q, x, xlo, y, ylo, z, zlo)
    return _tally(ia, ln)


def h2_support_parts(q: int, i: int, j: int):
    """Distinct coordinate values of the Heisenberg builder support.

    The support is the full product of the three returned sets, with uniform
    weights.  The (1,3) matrix entry is y/2; the unit 1/2 leaves valuations
    unchanged, so y itself can feed the shape evaluator.
    """
    m = (i + j) // 2
    da = m
    db = m + 1
    a = all_tuples(q, da)
    x = np.zeros((len(a), m + 1), dtype=np.int32)
    x[:, 0] = 1                                  # pi^-m
    x[:, 1 : 1 + da] = a                         # + [pi^(-m+1) a]
    b = all_tuples(q, db)
    y = np.zeros((len(b), m + 1), dtype=np.int32)
    y[:, :db] = b
    c = all_tuples(q, i)
    z = np.zeros((len(c), i + 1), dtype=np.int32)
    z[:, 0] = 1
    z[:, 1 : 1 + i] = c
    return (x, -m), (y, -m), (z, -i)


def _product_grid(nx: int, ny: int, nz: int):
    ix = np.repeat(np.arange(nx), ny * nz)
    iy = np.tile(np.repeat(np.arange(ny), nz), nx)
    iz = np.tile(np.arange(nz), nx * ny)
    return ix, iy, iz


def h2_support_cells(q: int, i: int, j: int, shift_eps: int = 0):
    """{(i',j'): multiplicity} over the Heisenberg builder support."""
    (x, xlo), (y, ylo), (z, zlo) = h2_support_parts(q, i, j)
    ix, iy, iz = _product_grid(len(x), len(y), len(z))
    half = pow(2, q - 2, q)
    ia, ln = h2_shape_cell(
        q, x[ix], xlo, (y[iy] * half) % q, ylo, z[iz], zlo, shifted=bool(shift_eps)
    )
    return _tally(ia, ln)


def _tally(i_arr, len_arr):
    out: dict[tuple[int, int], int] = {}
    pairs = np.stack([i_arr, len_arr - i_arr], axis=1)
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    for (a, b), c in zip(uniq, counts):
        out[(int(a), int(b))] = int(c)
    return out


def delta1_cell_masses(q: int, i: int, j: int):
    """[(cell, signed mass)] of the delta1 support, cellwise."""
    out: list[tuple[tuple[int, int], float]] = []
    for (ii, jj), sign in (((i, j), 1.0), ((i, j + 1), -1.0)):
        cells = h1_support_cells(q, ii, jj)
        total = sum(cells.values())
        for cell, cnt in sorted(cells.items()):
            out.append((cell, sign * cnt / total))
    return out


def delta2_cell_masses(q: int, i: int, j: int, shift_eps: int | None = None):
    """[(cell, signed mass)] of the delta2 support, shear-shifted when odd."""
    if shift_eps is None:
        shift_eps = 1 if (i + j) % 2 else 0
    out: list[tuple[tuple[int, int], float]] = []
    for (ii, jj), sign in (((i, j), 1.0), ((i + 1, j - 1), -1.0)):
        cells = h2_support_cells(q, ii, jj, shift_eps=shift_eps)
        total = sum(cells.values())
        for cell, cnt in sorted(cells.items()):
            out.append((cell, sign * cnt / total))
    return out


# -- exhaustive cell-membership sweeps ---------------------------------------


def h1_cells_sweep(q: int, i: int) -> dict:
    """Exhaustive check of the abelian product cells at level i+1.

    The product matrix depends on the residue tuple (a,b,x,y) only through
    s = a + x/2 and v = y - ax - b: its entries are X = [pi^-i s], pi^-i and
    Z = [pi^-i (s^2 + v)] (the canonical section is additive and
    (a + x/2)^2 = a^2 + ax + x^2/4 exactly).  Sweeping (s, v) therefore
    covers the whole tuple space, with a fiber of q^(2(i+1)) tuples each.

    Checks for every (s, v): sup entry norm q^i; the distinguished 2x2 block
    determinant X^2 - pi^-i Z == -pi^-2i v mod pi^(-i+1) O; and, when
    l = val(v) <= i, the cell equals (i, i-l).
    """
    lvl = i + 1
    tup = all_tuples(q, lvl)
    n1 = len(tup)
    sd = tup[np.repeat(np.arange(n1), n1)].astype(np.int32)
    vd = tup[np.tile(np.arange(n1), n1)].astype(np.int32)

    ss = poly_mul(sd, sd) % q
    r = (ss[:, :lvl] + vd) % q                     # s^2 + v reduced mod pi^(i+1)

    X = sd                                         # digits at exponents -i..0
    Z = r
    Y = np.ones((len(sd), 1), dtype=np.int32)
    ia, ln = h1_shape_cell(q, X, -i, Y, -i, Z, -i)
    if not np.all(ia == i):
        raise AssertionError("sup entry norm != q^i somewhere in the abelian sweep")

    # det congruence: X^2 - pi^-i Z + pi^-2i v vanishes at exponents <= -i
    lo, hi = -2 * i, 0
    det = (window_slice(poly_mul(X, X), -2 * i, lo, hi)
           - window_slice(Z, -2 * i, lo, hi)) % q
    diff = (det + window_slice(vd, -2 * i, lo, hi)) % q
    if diff[:, : i + 1].any():
        raise AssertionError("determinant congruence failed")

    lv = val_of(vd % q, 0)
    sel = lv <= i
    if not np.all((ln - ia)[sel] == (i - lv[sel])):
        raise AssertionError("cell formula failed in the abelian sweep")
    return {"pairs": len(sd), "classified": int(sel.sum()), "fiber": q ** (2 * lvl)}


def h2_cells_sweep(q: int, m: int, odd: bool) -> dict:
    """Exhaustive check of the Heisenberg product cells at level m+1.

    The product matrix depends on (a1,a2,b,x1,x2,y) only through the reduced
    coordinates (a1, a2, x1, x2, w = y - b):

        (1,2) = -xi1,  xi1 = [pi^(-m-1)(1 + pi s1)],  s1 = a1 - x2,
        (1,3) =  xi2,  xi2 = [pi^(-m-1)(1 + pi s2)],  s2 = a2 + x1,
        (1,4) =  eta = [pi^-2m w] - pi^-2m(a1 x1 + a2 x2  as section products),

    so sweeping the 5-tuple covers the whole level-(m+1) tuple space with a
    (b, y)-fiber of q^(m+1) each.  Checks per tuple: the minor sup is exactly
    q^(2m+2) (even target) / q^(2m+3) (odd); eta == pi^-2m v mod pi^(-m+1) O
    for v = w - a1x1 - a2x2; and the cell formula for l = val(v) <= m-1,
    including the corrected odd boundary cell (m+2, m+1) at l = m-1.
    """
    lvl = m + 1
    n1 = q**lvl
    tuples = all_tuples(q, lvl).astype(np.int32)

    inner = n1**3
    X1 = tuples[np.repeat(np.arange(n1), n1 * n1)]
    X2 = tuples[np.tile(np.repeat(np.arange(n1), n1), n1)]
    W = tuples[np.tile(np.arange(n1), n1 * n1)]

    counts = {"pairs": 0, "classified": 0, "fiber": q**lvl}
    want_len = 2 * m + 3 if odd else 2 * m + 2
    for ja1 in range(n1):
        a1 = np.broadcast_to(tuples[ja1], (inner, lvl))
        p1 = poly_mul(a1, X1)                       # section product on 0..2m
        for ja2 in range(n1):
            a2 = np.broadcast_to(tuples[ja2], (inner, lvl))
            p2 = poly_mul(a2, X2)

            comb = (window_slice(W, 0, 0, 2 * m) - p1 - p2) % q
            v = comb[:, :lvl]                       # w - a1x1 - a2x2 mod pi^(m+1)
            lv = val_of(v, 0)

            eta = (window_slice(W, 0, 0, 2 * m) - p1 - p2) % q  # window -2m..0
            # congruence against the reduced combination: high part must agree
            if ((eta[:, : lvl] - v) % q).any():
                raise AssertionError("eta congruence failed")

            s1 = (tuples[ja1][None, :] - X2) % q
            s2 = (tuples[ja2][None, :] + X1) % q
            xi1 = np.zeros((inner, m + 2), dtype=np.int32)
            xi1[:, 0] = 1
            xi1[:, 1:] = s1
            xi2 = np.zeros((inner, m + 2), dtype=np.int32)
            xi2[:, 0] = 1
            xi2[:, 1:] = s2

            ia, ln = h2_shape_cell(
                q, (-xi1) % q, -(m + 1), xi2, -(m + 1), eta, -2 * m, shifted=odd
            )
            if not np.all(ln == want_len):
                raise AssertionError("minor sup norm deviates from q^(i+j)")
            sel = lv <= m - 1
            li = lv[sel]
            if odd:
                exp_i = np.where(li == m - 1, m + 2, 2 * m - li)
                exp_j = np.where(li == m - 1, m + 1, li + 3)
            else:
                exp_i = 2 * m - li
                exp_j = li + 2
            if not (np.all(ia[sel] == exp_i) and np.all((ln - ia)[sel] == exp_j)):
                raise AssertionError("cell formula failed in the Heisenberg sweep")
            counts["pairs"] += inner
            counts["classified"] += int(sel.sum())
    return counts


# -- quadratic character sums -------------------------------------------------


def gauss_magnitudes(q: int, level: int, sample: int | None = None, seed: int = 0):
    """|average of eta(a^2)| over O/pi^level O for a family of characters.

    Returns (t_digit_matrix, magnitudes, nondegenerate_mask).  Character
    digits pair position k with the class digit at pi^k.  With sample set,
    draws that many characters (seeded); otherwise enumerates all q^level.
    """
    Fq(q)  # validate q
    reps = all_tuples(q, level)
    sq = poly_mul(reps, reps)[:, :level] % q
    if sample is None:
        ts = all_tuples(q, level)
    else:
        rng = np.random.default_rng(seed)
        ts = rng.integers(0, q, size=(sample, level), dtype=np.int16)
    phases = (sq.astype(np.int64) @ ts.T.astype(np.int64)) % q
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    mags = np.abs(roots[phases].mean(axis=0))
    nondeg = ts[:, level - 1] != 0
    return ts, mags, nondeg


# -- group-law / embedding sweep ----------------------------------------------


def h2_embedding_sweep(q: int, n: int, chunk: int = 500_000) -> int:
    """All pairs from the H2 window |x|,|y| <= q^n, |z| <= q^(2n).

    Compares the (1,4) entry of the matrix product, z + z' + x(y'/2) - (y/2)x',
    against the z part of the parameter law, z + z' + (xy' - yx')/2, digit
    for digit.  The remaining product entries are sums, so this entry carries
    the whole content.  Returns the number of pairs checked.
    """
    half = pow(2, q - 2, q)
    dxy, dz = n + 1, 2 * n + 1
    Xs = all_tuples(q, dxy).astype(np.int32)
    nP = len(Xs) ** 2
    ix = np.repeat(np.arange(len(Xs)), len(Xs))
    iy = np.tile(np.arange(len(Xs)), len(Xs))
    pairs = 0
    for lo in range(0, nP * nP, chunk * nP // nP if False else chunk):
        hi = min(lo + chunk, nP * nP)
        if lo >= hi:
            break
        idx = np.arange(lo, hi)
        p, pp = idx // nP, idx % nP
        x, y = Xs[ix[p]], Xs[iy[p]]
        xp, yp = Xs[ix[pp]], Xs[iy[pp]]
        lhs = (poly_mul(x, (yp * half) % q) - poly_mul((y * half) % q, xp)) % q
        rhs = ((poly_mul(x, yp) - poly_mul(y, xp)) * half) % q
        if (lhs != rhs).any():
            raise AssertionError("embedding law failed")
        pairs += len(idx)
    return pairs
