"""Reduced group C*-norm engines and the structural audits behind them.

Three independent routes to the operator norm of convolution by a finitely
supported function:

* ``regular_rep_norm`` -- the brute-force oracle: power iteration for the
  largest singular value of left convolution on l^2 of a finite subgroup
  containing the support (the norm there equals the norm on the whole
  discrete group, and does not depend on which containing subgroup is used:
  l^2 of a bigger window decomposes into cosets carrying unitarily
  equivalent copies).

* ``char_sup_norm`` / ``delta1_norm`` -- the abelian route: the norm is the
  sup over characters of the transform.  The brute-force version enumerates
  every functional on the coordinate digit box; the structured version
  evaluates the two-parameter family in closed form: the inner average is a
  quadratic character sum whose maximal magnitude over the free linear
  character is q^(-rank/2) of the associated bilinear form.

* ``delta2_norm`` -- the Heisenberg route: the norm of the two-parameter
  difference is the sup of the norms of finite blocks of the induced-type
  representations rho_{chi,chi'}.  Each block lives on a translate of
  [pi^-m O], and equals a scalar C(chi) times a 0/1-patterned translation
  operator, so the block matrix is assembled from triviality tests of small
  functionals.  The family of (chi, chi', translate) classes that can
  produce distinct blocks is finite: chi matters through levels <= max(i+1,
  2m) and (chi', translate) through one functional on [pi^-m O], reduced
  further by translation conjugations that permute blocks unitarily.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .characters import RationalCharacter, base_character
from .field import LaurentPoly
from .functions import GroupFunction, m_rule
from .symplectic import FiniteWindow
from .sweeps import all_tuples, poly_mul, window_slice

__all__ = [
    "IterationLimit",
    "BoundViolated",
    "ConvolutionOperator",
    "regular_rep_norm",
    "char_sup_norm",
    "delta1_norm",
    "central_scalar",
    "central_scalar_closed",
    "BlockMatrix",
    "delta2_block",
    "delta2_char_family",
    "beta_transversal",
    "delta2_norm",
    "rho_block_generic",
    "block_structure_audit",
    "delta1_bound",
    "delta2_bound",
]


class IterationLimit(RuntimeError):
    pass


class BoundViolated(AssertionError):
    pass


def delta1_bound(q: int, i: int, j: int) -> float:
    return 2.0 * q ** (-(i - j) / 2)


def delta2_bound(q: int, i: int, j: int) -> float:
    return 2.0 * q ** (2 - j)


# -- regular representation oracle -------------------------------------------


@dataclass
class ConvolutionOperator:
    """Left convolution by f on l^2 of a finite window subgroup."""

    f: GroupFunction
    window: FiniteWindow | None = None

    def __post_init__(self):
        if self.window is not None:
            fam = {"H1": "H1n"}.get(self.f.family)
            if fam is not None and self.window.family != fam:
                raise ValueError("window family does not match the function")
            for g, _ in self.f.elements():
                if not self.window.contains(g):
                    raise ValueError("support escapes the window")


def _coord_windows(f: GroupFunction):
    """Per-coordinate exponent windows [lo, hi] spanned by the support."""
    wins = []
    for c in range(3):
        los, his = [0], [0]
        for key in f.data:
            poly = key[c]
            if not poly.is_zero():
                los.append(int(poly.valuation()))
                his.append(int(poly.degree()))
        wins.append((min(los), max(his)))
    return wins


def _digits_of(poly: LaurentPoly, lo: int, hi: int) -> tuple[int, ...]:
    return tuple(poly.digits(lo, hi))


def _h1_apply_factory(f: GroupFunction):
    """Returns (apply_conv, apply_adj, shape) for the abelian family."""
    q = f.q
    wins = _coord_windows(f)
    dims = [hi - lo + 1 for lo, hi in wins]
    D = sum(dims)
    shape = (q,) * D
    terms = []
    for key, w in sorted(f.data.items(), key=lambda kv: tuple(map(str, kv[0]))):
        digs = sum((_digits_of(key[c], *wins[c]) for c in range(3)), ())
        terms.append((digs, w))
    axes = tuple(range(D))

    def apply_with(ts, v):
        out = np.zeros_like(v)
        for digs, w in ts:
            out += w * np.roll(v, digs, axis=axes)
        return out

    adj = [(tuple((-d) % q for d in digs), w.conjugate()) for digs, w in terms]
    return (lambda v: apply_with(terms, v)), (lambda v: apply_with(adj, v)), shape


def _h2_apply_factory(f: GroupFunction):
    """Returns (apply_conv, apply_adj, shape, to_hat) for the Heisenberg family.

    The state lives on the box group B_x x B_y x B_z (the z window is closed
    under the commutator products), with the central direction transformed to
    its dual: there convolution acts blockwise by (x, y) translations twisted
    by separable phases, which is what makes large windows tractable.  The
    change of basis is a scalar multiple of a unitary, so Rayleigh quotients
    and singular values are unchanged.
    """
    q = f.q
    inv2 = pow(2, q - 2, q)
    (xlo, xhi), (ylo, yhi), (zlo0, zhi0) = _coord_windows(f)
    zlo = min(zlo0, xlo + ylo)
    zhi = max(zhi0, xhi + yhi, 0)
    dx, dy, dz = xhi - xlo + 1, yhi - ylo + 1, zhi - zlo + 1
    xbox = all_tuples(q, dx).astype(np.int64)
    ybox = all_tuples(q, dy).astype(np.int64)
    lam = all_tuples(q, dz).astype(np.int64)
    Nx, Ny, Nz = len(xbox), len(ybox), len(lam)
    roots = np.asarray(base_character(q).roots)
    xradix = q ** np.arange(dx)
    yradix = q ** np.arange(dy)

    def hat_phase(digits_matrix: np.ndarray, sign: int) -> np.ndarray:
        """omega^(sign * lam . digits): (N, dz) digit rows -> (N, Nz)."""
        ph = (digits_matrix @ lam.T) % q
        return roots[(sign * ph) % q]

    def zdigs(poly: LaurentPoly) -> np.ndarray:
        return np.array(poly.digits(zlo, zhi), dtype=np.int64)

    def build_terms(fun_items):
        grouped: dict[tuple, list] = {}
        for (u, v, zz), w in fun_items:
            uv = (_digits_of(u, xlo, xhi), _digits_of(v, ylo, yhi))
            grouped.setdefault(uv, []).append((zz, w))
        terms = []
        for (udig, vdig), zparts in sorted(grouped.items()):
            coeff = np.zeros(Nz, dtype=complex)
            for zz, w in zparts:
                coeff += w * hat_phase(zdigs(zz)[None, :], -1)[0]
            # commutator correction: phase omega^(-lam . (u y - v x)/2)
            uy = np.zeros((Ny, dz), dtype=np.int64)
            for k, c in enumerate(udig):
                if c:
                    col = xlo + k + ylo - zlo
                    uy[:, col : col + dy] += (c * inv2) * ybox
            vx = np.zeros((Nx, dz), dtype=np.int64)
            for k, c in enumerate(vdig):
                if c:
                    col = ylo + k + xlo - zlo
                    vx[:, col : col + dx] += (c * inv2) * xbox
            py = hat_phase(uy % q, -1) * coeff[None, :]   # (Ny, Nz)
            px = hat_phase(vx % q, +1)                    # (Nx, Nz)
            xperm = ((xbox - np.array(udig)) % q) @ xradix
            yperm = ((ybox - np.array(vdig)) % q) @ yradix
            terms.append((xperm, yperm, px, py))
        return terms

    items = sorted(f.data.items(), key=lambda kv: tuple(map(str, kv[0])))
    adj_items = sorted(
            (((-u, -v, -zz), w.conjugate()) for (u, v, zz), w in items),
            key=lambda kv: tuple(map(str, kv[0])))
    terms = build_terms(items)
    adj_terms = build_terms(adj_items)

    def apply_with(ts, v):
        out = np.zeros_like(v)
        for xperm, yperm, px, py in ts:
            out += v[xperm][:, yperm] * px[:, None, :] * py[None, :, :]
        return out

    zmat = roots[(-(lam @ lam.T)) % q]                    # hat[l] = sum_z w^(-l.z) v[z]

    def to_hat(v):
        return v @ zmat.T

    shape = (Nx, Ny, Nz)
    return (lambda v: apply_with(terms, v)), (lambda v: apply_with(adj_terms, v)), shape, to_hat


def regular_rep_norm(op, seed: int = 0, tol: float = 1e-8, max_iter: int = 10_000) -> float:
    """Largest singular value of convolution by f, by power iteration.

    Iterates the self-adjoint composite (convolve by the adjoint after f)
    from an all-ones start plus a seeded perturbation, stopping once
    successive Rayleigh quotients differ by less than tol relative.
    """
    f = op.f if isinstance(op, ConvolutionOperator) else op
    if not f.data:
        return 0.0
    if f.family == "H1":
        conv, adj, shape = _h1_apply_factory(f)
        to_hat = None
    else:
        conv, adj, shape, to_hat = _h2_apply_factory(f)

    rng = np.random.default_rng(seed)
    v = np.ones(shape, dtype=complex)
    v += 1e-3 * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    if to_hat is not None:
        v = to_hat(v)
    v /= np.linalg.norm(v)

    prev = None
    for _ in range(max_iter):
        w = adj(conv(v))
        rayleigh = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if prev is not None and abs(rayleigh - prev) <= tol * max(abs(rayleigh), 1e-300):
            return float(np.sqrt(max(rayleigh, 0.0)))
        prev = rayleigh
    raise IterationLimit(f"no convergence within {max_iter} iterations")


# -- abelian character-sup engine ---------------------------------------------


def char_sup_norm(f: GroupFunction, max_dual: int = 2**22, chunk: int = 1 << 15) -> float:
    """Exact sup over characters of the coordinate digit box (abelian family)."""
    if f.family != "H1":
        raise ValueError("character-sup engine applies to the abelian family")
    if not f.data:
        return 0.0
    q = f.q
    wins = _coord_windows(f)
    items = sorted(f.data.items(), key=lambda kv: tuple(map(str, kv[0])))
    D = np.array(
        [sum((_digits_of(k[c], *wins[c]) for c in range(3)), ()) for k, _ in items],
        dtype=np.int64,
    )
    w = np.array([wt for _, wt in items])
    d = D.shape[1]
    if q**d > max_dual:
        raise ValueError(f"dual space too large: q^{d}")
    roots = np.asarray(base_character(q).roots)
    best = 0.0
    U = all_tuples(q, d).astype(np.int64)
    for lo in range(0, len(U), chunk):
        ph = (D @ U[lo : lo + chunk].T) % q
        vals = np.abs(w @ roots[ph])
        best = max(best, float(vals.max()))
    return best


def _batched_rank_modq(mats: np.ndarray, q: int) -> np.ndarray:
    """Ranks over F_q of a batch of small square matrices, by elimination."""
    A = (mats % q).astype(np.int64).copy()
    B, n, _ = A.shape
    inv = np.array([0] + [pow(a, q - 2, q) for a in range(1, q)], dtype=np.int64)
    rank = np.zeros(B, dtype=np.int64)
    prow = np.zeros(B, dtype=np.int64)
    rows = np.arange(n)
    for col in range(n):
        colv = A[:, :, col]
        valid = (rows[None, :] >= prow[:, None]) & (colv != 0)
        has = valid.any(axis=1)
        pick = np.argmax(valid, axis=1)
        b = np.nonzero(has)[0]
        if len(b) == 0:
            continue
        pr, pk = prow[b], pick[b]
        tmp = A[b, pr, :].copy()
        A[b, pr, :] = A[b, pk, :]
        A[b, pk, :] = tmp
        piv = A[b, pr, col]
        A[b, pr, :] = (A[b, pr, :] * inv[piv][:, None]) % q
        fac = A[b, :, col] * (rows[None, :] > pr[:, None])
        A[b] = (A[b] - fac[:, :, None] * A[b, pr, None, :]) % q
        rank[b] += 1
        prow[b] += 1
    return rank


def delta1_norm(q: int, i: int, j: int) -> float:
    """Exact C*-norm of the abelian delta at (i, j), via the factored sup.

    A character splits over the three coordinates; the norm is
        max over u  |u(pi^-j) - u(pi^-j-1)| * q^(-rank(Q_u)/2)
    where u runs over the characters of the z coordinate window, Q_u is the
    quadratic form a -> u([pi^-i a^2]) on O/pi^i O (a Hankel matrix in the
    digits of u), and the x-coordinate character has been maximized out: the
    average of a nondegenerate quadratic phase over F_q^rank has magnitude
    q^(-rank/2) after the optimal linear shift, achieved because the map
    a -> [pi^-i a] is an isomorphism onto its box.
    """
    L0 = max(i, j + 1)
    U = all_tuples(q, L0 + 1).astype(np.int64)        # position p <-> exponent -L0+p
    roots = np.asarray(base_character(q).roots)
    dj = np.abs(roots[U[:, L0 - j]] - roots[U[:, L0 - j - 1]])
    # Hankel matrices M[r,s] = u(exponent -i + r + s) for r+s <= i-1
    N = len(U)
    M = np.zeros((N, i, i), dtype=np.int64)
    for r in range(i):
        for s in range(i):
            if r + s <= i - 1:
                M[:, r, s] = U[:, L0 - i + r + s]
    ranks = _batched_rank_modq(M, q)
    vals = dj * np.power(float(q), -0.5 * ranks)
    return float(vals.max())


# -- central scalar and Heisenberg blocks -------------------------------------


def central_scalar(q: int, t: LaurentPoly, i: int) -> complex:
    """Average over c of chi([pi^-i(1+pi c)]) - chi([pi^(-i-1)(1+pi c)]).

    chi = chi_t with the O-side parameter t; c runs over O/pi^(i+1) O, the
    level both integral parts depend on.
    """
    chi = RationalCharacter(q, t)
    total = 0j
    from .field import ResidueClass

    one = LaurentPoly.one(q)
    for c in ResidueClass.all_classes(q, i + 1):
        w = one + c.rep.shift(1)
        total += chi.value(w.shift(-i).integral_part())
        total -= chi.value(w.shift(-i - 1).integral_part())
    return total / q ** (i + 1)


def central_scalar_closed(q: int, tdig, i: int) -> complex:
    """Closed form: c1 - c2 with c_k the averaged character of each z family.

    c1 = psi(t_i) if t vanishes at positions < i else 0;
    c2 = psi(t_{i+1}) if t vanishes at positions <= i else 0.
    """
    roots = base_character(q).roots
    tdig = list(tdig) + [0, 0]
    prefix_ok = all(d == 0 for d in tdig[:i])
    c1 = roots[tdig[i] % q] if prefix_ok else 0.0
    c2 = roots[tdig[i + 1] % q] if prefix_ok and tdig[i] % q == 0 else 0.0
    return c1 - c2


@dataclass
class BlockMatrix:
    """One block of the induced-representation image of the Heisenberg delta.

    Indexed by the digit box of [pi^-m O]; ``t`` parametrizes chi (position k
    pairs with argument exponent -k) and ``beta`` the combined functional of
    (chi', translate) on [pi^-m O] (position p pairs with pi^(-m+p))."""

    q: int
    i: int
    j: int
    m: int
    t: tuple[int, ...]
    beta: tuple[int, ...]
    scalar: complex
    mat: np.ndarray

    def norm(self) -> float:
        if not self.mat.any():
            return 0.0
        return float(np.linalg.norm(self.mat, 2))


def _block_ingredients(q: int, i: int, j: int):
    m = m_rule(i, j)
    dim = q ** (m + 1)
    basis = all_tuples(q, m + 1).astype(np.int64)      # xi digits at -m..0
    arange = np.arange(dim)
    radix = q ** np.arange(m + 1)
    aset = all_tuples(q, m).astype(np.int64)           # translation parameters
    A = np.zeros((len(aset), m + 1), dtype=np.int64)
    A[:, 0] = 1
    A[:, 1:] = aset
    return m, dim, basis, radix, A


def delta2_block(q: int, i: int, j: int, tdig, beta) -> BlockMatrix:
    """Assemble the block for chi = chi_t and combined functional beta.

    The two averaged terms share their translation and y-averages (each
    parameter is averaged over its full dependence level), so the block is
    C(chi) times the 0/1 translation pattern cut out by the triviality of
    beta + (t (xi + A/2))-functional on [pi^-m O].
    """
    m, dim, basis, radix, A = _block_ingredients(q, i, j)
    inv2 = pow(2, q - 2, q)
    tdig = np.asarray(tdig, dtype=np.int64)
    beta = np.asarray(beta, dtype=np.int64)
    C = central_scalar_closed(q, tdig, i)
    mat = np.zeros((dim, dim), dtype=complex)
    if abs(C) < 1e-15:
        return BlockMatrix(q, i, j, m, tuple(tdig), tuple(beta), C, mat)
    # pairing matrix: u_p(v) = (t v)_{m-p} = sum_r T[p, r] v_r, T[p,r] = t_{2m-p-r}
    T = np.zeros((m + 1, m + 1), dtype=np.int64)
    for p in range(m + 1):
        for r in range(m + 1):
            k = 2 * m - p - r
            if 0 <= k < len(tdig):
                T[p, r] = tdig[k]
    u0 = (basis @ T.T) % q                              # (dim, m+1)
    w_A = 1.0 / len(A)
    cols_all = ((basis[None, :, :] + A[:, None, :]) % q) @ radix
    for a_idx in range(len(A)):
        uA = ((A[a_idx] * inv2) % q @ T.T) % q
        cond = ((u0 + uA + beta) % q == 0).all(axis=1)
        rows = np.nonzero(cond)[0]
        mat[rows, cols_all[a_idx][rows]] += C * w_A
    return BlockMatrix(q, i, j, m, tuple(int(x) for x in tdig), tuple(int(x) for x in beta), C, mat)


def delta2_char_family(q: int, i: int, j: int):
    """Digit vectors t (positions 0..Lmax) with nonzero central scalar.

    The scalar vanishes unless positions < i are zero; nonvanishing then
    requires (t_i, t_{i+1}) != (0,0).  Positions above i+1 matter only
    through the pairing with [pi^-2m O] arguments, hence the cap
    Lmax = max(i+1, 2m)."""
    m = m_rule(i, j)
    Lmax = max(i + 1, 2 * m)
    head = all_tuples(q, 2)
    head = head[(head != 0).any(axis=1)]
    tail = all_tuples(q, Lmax - i - 1)
    out = []
    for h in head:
        for tl in tail:
            t = np.zeros(Lmax + 1, dtype=np.int64)
            t[i] = h[0]
            t[i + 1] = h[1]
            if Lmax > i + 1:
                t[i + 2 :] = tl
            out.append(t)
    return out


def beta_transversal(q: int, m: int, t_low: int):
    """Representatives of the (chi', translate) classes for a given chi.

    Conjugating a block by a translation of [pi^-m O] shifts beta by the
    functional v -> (t v)| of the translation, a subgroup of functionals
    supported on positions <= 2m - t_low (t_low = lowest nonzero position
    of t).  Representatives put free digits on the remaining positions."""
    lo_free = max(0, 2 * m - t_low + 1)
    free = all_tuples(q, m + 1 - lo_free)
    out = np.zeros((len(free), m + 1), dtype=np.int64)
    if free.shape[1]:
        out[:, lo_free:] = free
    return out


def delta2_norm(q: int, i: int, j: int, collect=None) -> float:
    """Sup of block norms over the full character family (exact engine).

    With the blocks unitarily deduplicated over translation classes this
    finite enumeration realizes every block any pair (chi, chi') with
    chi != 0 can produce, so the value is the reduced C*-norm of the delta
    under the block-sup formula.  ``collect``, if given, receives every
    nonzero BlockMatrix (used by the structural audits).
    """
    m = m_rule(i, j)
    best = 0.0
    for t in delta2_char_family(q, i, j):
        t_low = int(np.nonzero(t)[0][0])
        for beta in beta_transversal(q, m, t_low):
            blk = delta2_block(q, i, j, t, beta)
            if not blk.mat.any():
                continue
            if collect is not None:
                collect(blk)
            # cheap Schur bound: skip the SVD when it cannot win
            absm = np.abs(blk.mat)
            ub = np.sqrt(absm.sum(axis=0).max() * absm.sum(axis=1).max())
            if ub <= best + 1e-15:
                continue
            best = max(best, blk.norm())
    return best


def rho_block_generic(
    f: GroupFunction,
    t: LaurentPoly,
    tprime: LaurentPoly,
    x0: LaurentPoly,
    m: int,
) -> np.ndarray:
    """Direct block of the induced representation from the raw support.

    Oracle for ``delta2_block``: evaluates, entry by entry on the coset
    x0 + [pi^-m O],

        rho(h2(a,b,c)) F(x) = F(x+a) chi(xb) chi(c + ab/2) chi'(b)

    with chi = chi_t and chi' = chi_{t'}, summed over the support of f.
    """
    q = f.q
    chi = RationalCharacter(q, t)
    chip = RationalCharacter(q, tprime)
    dim = q ** (m + 1)
    basis_digits = all_tuples(q, m + 1)
    basis = [LaurentPoly.from_digits(q, dig, -m) for dig in basis_digits]
    index = {p: k for k, p in enumerate(basis)}
    mat = np.zeros((dim, dim), dtype=complex)
    for (a, b, c), w in f.data.items():
        phase_c = w
        for k, xi in enumerate(basis):
            target = xi + a
            col = index.get(target)
            if col is None:
                raise ValueError("translation escapes the coset box")
            x = x0 + xi
            val = (
                chi.value(x * b)
                * chi.value(c + (a * b).halve())
                * chip.value(b)
            )
            mat[k, col] += phase_c * val
    return mat


def block_structure_audit(blk: BlockMatrix, tol: float = 1e-12) -> dict:
    """Checks the sparsity pattern, magnitudes and norm of one block.

    * translation: nonzero entries sit at column = row + pi^-m + [pi^(-m+1) O];
    * magnitude: every nonzero entry equals |C| q^-m in absolute value (the
      translation average carries q^m equal weights);
    * sparsity: at most q^(i-m+1) nonzeros per row and per column;
    * anti-diagonal: row+column digit sums agree below exponent -(i-m);
    * rows and columns are constant where nonzero;
    * norm at most 2 q^(2-j), with the sharper ceiling 2 q^(i-2m+1).
    """
    q, i, m = blk.q, blk.i, blk.m
    basis = all_tuples(q, m + 1).astype(np.int64)
    rs, cs = np.nonzero(np.abs(blk.mat) > tol)
    report = {
        "q": q, "i": i, "j": blk.j, "m": m, "t": blk.t, "beta": blk.beta,
        "nonzeros": int(len(rs)),
        "dim": blk.mat.shape[0],
        "norm": blk.norm(),
        "norm_bound": delta2_bound(q, i, blk.j),
        "norm_bound_sharp": 2.0 * q ** (i - 2 * m + 1),
    }
    if len(rs) == 0:
        report.update(
            translation_ok=True, magnitude_ok=True, sparsity_ok=True,
            antidiagonal_ok=True, row_constancy_ok=True,
            norm_ok=True, norm_sharp_ok=True, magnitude_dev=0.0,
        )
        return report
    diff = (basis[cs] - basis[rs]) % q
    report["translation_ok"] = bool((diff[:, 0] == 1).all())
    mags = np.abs(blk.mat[rs, cs])
    expected = abs(blk.scalar) * q ** (-m)
    report["magnitude_dev"] = float(np.abs(mags - expected).max())
    report["magnitude_ok"] = report["magnitude_dev"] <= tol
    row_counts = np.bincount(rs, minlength=blk.mat.shape[0])
    col_counts = np.bincount(cs, minlength=blk.mat.shape[0])
    cap = q ** (i - m + 1)
    report["sparsity_ok"] = bool(row_counts.max() <= cap and col_counts.max() <= cap)
    sums = (basis[rs] + basis[cs]) % q
    head = 2 * m - i  # digit positions below exponent -(i-m)
    if head > 0:
        report["antidiagonal_ok"] = bool((sums[:, :head] == sums[0, :head]).all())
    else:
        report["antidiagonal_ok"] = True
    # rows constant where nonzero
    ok = True
    vals = blk.mat[rs, cs]
    for r in np.unique(rs):
        vr = vals[rs == r]
        if np.abs(vr - vr[0]).max() > tol:
            ok = False
            break
    report["row_constancy_ok"] = bool(ok)
    report["norm_ok"] = report["norm"] <= report["norm_bound"] + 1e-9
    report["norm_sharp_ok"] = report["norm"] <= report["norm_bound_sharp"] + 1e-9
    return report
