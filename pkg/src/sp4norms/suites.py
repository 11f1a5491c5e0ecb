"""Verification suites behind the command-line driver.

Each suite is a list of independent tasks (module-level functions plus
keyword arguments, so they cross process boundaries) producing CheckRecord
lists; results are concatenated in task order, which makes reports
independent of the worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sweeps
from .characters import RationalCharacter
from .field import LaurentPoly
from .functions import delta1, delta2, m_rule
from .norms import (
    block_structure_audit,
    central_scalar,
    central_scalar_closed,
    char_sup_norm,
    delta1_bound,
    delta1_norm,
    delta2_block,
    delta2_bound,
    delta2_char_family,
    delta2_norm,
    beta_transversal,
    regular_rep_norm,
)
from .report import CHECK_REGISTRY, CheckRecord, Timer
from .symplectic import CartanPair
from .walk import (
    DivergentBudget,
    WalkBudget,
    chamber_constant,
    decay_threshold,
    telescoped_bound,
)

__all__ = ["RunConfig", "SUITES", "build_suite", "run_suite"]


@dataclass
class RunConfig:
    q: int = 3
    max_len: int = 6          # i+j cap for delta grids
    gauss_levels: int = 6
    cells_i_max: int = 3
    cells_m_max: int = 2
    agree_len: int = 3        # i+j cap for power-iteration cross-checks
    tables: int = 100
    tol: float = 1e-8
    seed: int = 0
    jobs: int = 1
    out: str | None = None

    def validate(self):
        from .field import Fq

        Fq(self.q)
        if not 0 < self.tol <= 1e-3:
            raise ValueError("tol must lie in (0, 1e-3]")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


def _rec(check: str, params: dict, computed: dict, bound, passed, ms) -> CheckRecord:
    return CheckRecord(
        check=check,
        anchor=CHECK_REGISTRY[check]["anchor"],
        params=params,
        computed=computed,
        bound=bound,
        passed=bool(passed),
        runtime_ms=ms,
    )


# -- gauss ---------------------------------------------------------------------


def gauss_task(q: int, level: int, sample: int | None, seed: int) -> list[CheckRecord]:
    with Timer() as t:
        _, mags, nondeg = sweeps.gauss_magnitudes(q, level, sample=sample, seed=seed)
        expect = q ** (-level / 2)
        dev = float(np.abs(mags[nondeg] - expect).max()) if nondeg.any() else 0.0
    return [
        _rec(
            "gauss-magnitude",
            {"q": q, "level": level, "characters": int(len(mags)), "sampled": sample is not None},
            {"max_abs_dev": dev, "expected": expect},
            1e-9,
            dev <= 1e-9,
            t.ms,
        )
    ]


# -- cells -----------------------------------------------------------------------


def cells_h1_task(q: int, i: int) -> list[CheckRecord]:
    with Timer() as t:
        try:
            stats = sweeps.h1_cells_sweep(q, i)
            ok, err = True, None
        except AssertionError as exc:  # pragma: no cover - failure path
            stats, ok, err = {}, False, str(exc)
    comp = dict(stats)
    if err:
        comp["error"] = err
    return [_rec("cells-abelian", {"q": q, "i": i}, comp, None, ok, t.ms)]


def cells_h2_task(q: int, m: int, odd: bool) -> list[CheckRecord]:
    with Timer() as t:
        try:
            stats = sweeps.h2_cells_sweep(q, m, odd)
            ok, err = True, None
        except AssertionError as exc:  # pragma: no cover
            stats, ok, err = {}, False, str(exc)
    comp = dict(stats)
    if err:
        comp["error"] = err
    check = "cells-heisenberg-odd" if odd else "cells-heisenberg-even"
    return [_rec(check, {"q": q, "m": m}, comp, None, ok, t.ms)]


def window_ball_task(q: int, n: int) -> list[CheckRecord]:
    """H1 window inside the ball of length 2n; H2 window likewise."""
    with Timer() as t:
        box = sweeps.all_tuples(q, n + 1).astype(np.int32)
        idx = sweeps._product_grid(len(box), len(box), len(box))
        ia, ln = sweeps.h1_shape_cell(
            q, box[idx[0]], -n, box[idx[1]], -n, box[idx[2]], -n
        )
        h1_ok = bool((ln <= 2 * n).all())
        zbox = sweeps.all_tuples(q, 2 * n + 1).astype(np.int32)
        nx, nz = len(box), len(zbox)
        ix = np.repeat(np.arange(nx), nx)
        iy = np.tile(np.arange(nx), nx)
        worst = 0
        for zs in range(0, nz, max(1, nz // 8)):
            zsel = zbox[zs : zs + max(1, nz // 8)]
            for zrow in zsel:
                zz = np.broadcast_to(zrow, (len(ix), 2 * n + 1))
                ia2, ln2 = sweeps.h2_shape_cell(
                    q, box[ix], -n, box[iy], -n, zz, -2 * n, shifted=False
                )
                worst = max(worst, int(ln2.max()))
        h2_ok = worst <= 2 * n
    return [
        _rec(
            "window-in-ball",
            {"q": q, "n": n},
            {"h1_max_len": int(ln.max()), "h2_max_len": worst},
            2 * n,
            h1_ok and h2_ok,
            t.ms,
        )
    ]


# -- deltas ----------------------------------------------------------------------


def delta_support_task(q: int, i: int, j: int) -> list[CheckRecord]:
    with Timer() as t:
        ok = True
        comp = {}
        c1 = sweeps.h1_support_cells(q, i, j)
        ok &= set(c1) == {(i, j)}
        comp["h1_cells"] = sorted(c1)
        if j >= 1:
            eps = 1 if (i + j) % 2 else 0
            c2 = sweeps.h2_support_cells(q, i, j, shift_eps=eps)
            ok &= set(c2) == {(i, j)}
            comp["h2_cells"] = sorted(c2)
    return [_rec("delta-support-cells", {"q": q, "i": i, "j": j}, comp, None, ok, t.ms)]


def pairing_task(q: int, i: int, j: int, tables: int, seed: int) -> list[CheckRecord]:
    rng = np.random.default_rng(seed + 1000 * i + j)
    cells_needed = [(a, b) for a in range(0, i + j + 3) for b in range(0, a + 1)]
    out = []
    with Timer() as t:
        worst1 = worst2 = 0.0
        m1 = sweeps.delta1_cell_masses(q, i, j) if j + 1 <= i else None
        m2 = sweeps.delta2_cell_masses(q, i, j) if j >= 1 else None
        eps = 1 if (i + j) % 2 else 0
        for _ in range(tables):
            table = {
                c: complex(rng.standard_normal(), rng.standard_normal())
                for c in cells_needed
            }
            if m1 is not None:
                got = sum(table[c] * w for c, w in m1)
                worst1 = max(worst1, abs(got - (table[(i, j)] - table[(i, j + 1)])))
            if m2 is not None:
                got = sum(table[c] * w for c, w in m2)
                if eps and j == 1:
                    want = table[(i, 1)] - table[(i + 1, 1)]
                else:
                    want = table[(i, j)] - table[(i + 1, j - 1)]
                worst2 = max(worst2, abs(got - want))
    if m1 is not None:
        out.append(
            _rec("pairing-delta1", {"q": q, "i": i, "j": j, "tables": tables},
                 {"max_abs_dev": worst1}, 1e-12, worst1 <= 1e-12, t.ms)
        )
    if m2 is not None:
        out.append(
            _rec("pairing-delta2", {"q": q, "i": i, "j": j, "tables": tables},
                 {"max_abs_dev": worst2, "odd_wall": bool(eps and j == 1)},
                 1e-12, worst2 <= 1e-12, t.ms)
        )
    return out


# -- blocks ----------------------------------------------------------------------


def blocks_task(q: int, i: int, j: int) -> list[CheckRecord]:
    with Timer() as t:
        m = m_rule(i, j)
        audits = []
        nonzero = 0
        for tdig in delta2_char_family(q, i, j):
            t_low = int(np.nonzero(tdig)[0][0])
            for beta in beta_transversal(q, m, t_low):
                blk = delta2_block(q, i, j, tdig, beta)
                if not blk.mat.any():
                    continue
                nonzero += 1
                audits.append(block_structure_audit(blk))
        flags = [
            "translation_ok", "magnitude_ok", "sparsity_ok",
            "antidiagonal_ok", "row_constancy_ok", "norm_ok", "norm_sharp_ok",
        ]
        ok = all(all(a[f] for f in flags) for a in audits)
        comp = {
            "blocks": nonzero,
            "max_norm": max((a["norm"] for a in audits), default=0.0),
            "max_magnitude_dev": max((a["magnitude_dev"] for a in audits), default=0.0),
        }
    return [
        _rec("block-structure", {"q": q, "i": i, "j": j, "m": m}, comp,
             delta2_bound(q, i, j), ok, t.ms)
    ]


# -- norms -----------------------------------------------------------------------


def kernel_scalar_task(q: int, i: int) -> list[CheckRecord]:
    with Timer() as t:
        worst = 0.0
        agree = True
        for code in range(q ** (i + 2)):
            digs = [(code // q**k) % q for k in range(i + 2)]
            tp = LaurentPoly(q, {k: d for k, d in enumerate(digs)})
            direct = central_scalar(q, tp, i)
            closed = central_scalar_closed(q, digs, i)
            worst = max(worst, abs(direct - closed))
            trivial_low = all(d == 0 for d in digs[:i])
            nontrivial_high = any(d != 0 for d in digs[: i + 2])
            expect_nonzero = trivial_low and nontrivial_high
            agree &= (abs(direct) > 1e-12) == expect_nonzero
    return [
        _rec("kernel-scalar", {"q": q, "i": i},
             {"max_closed_dev": worst, "characters": q ** (i + 2)},
             1e-12, agree and worst <= 1e-12, t.ms)
    ]


def average_vanishing_task(q: int, i: int, m: int) -> list[CheckRecord]:
    with Timer() as t:
        worst = 0.0
        count = 0
        boxm = [LaurentPoly.from_digits(q, dig, -m) for dig in sweeps.all_tuples(q, m + 1)]
        for code in range(1, q**2):
            ti, tip = code % q, code // q
            tp = LaurentPoly(q, {i: ti, i + 1: tip})
            chi = RationalCharacter(q, tp)
            for w in boxm:
                if w.is_zero() or w.valuation() >= -(i - m):
                    continue
                count += 1
                avg = sum(chi.value((w * z).halve()) for z in boxm) / len(boxm)
                worst = max(worst, abs(avg))
    return [
        _rec("average-vanishing", {"q": q, "i": i, "m": m},
             {"max_abs_avg": worst, "pairs": count},
             1e-12, worst <= 1e-12, t.ms)
    ]


def delta1_bound_task(q: int, i: int, j: int) -> list[CheckRecord]:
    with Timer() as t:
        val = delta1_norm(q, i, j)
    if j >= 1:
        bound = delta1_bound(q, i, j)
        return [
            _rec("delta1-norm-bound", {"q": q, "i": i, "j": j},
                 {"norm": val, "margin": bound - val}, bound, val <= bound + 1e-9, t.ms)
        ]
    floor = max(abs(1 - np.exp(2j * np.pi * k / q)) for k in range(1, q))
    return [
        _rec("delta1-floor-j0", {"q": q, "i": i, "j": 0},
             {"norm": val, "floor": float(floor), "stated_bound": delta1_bound(q, i, 0)},
             None, abs(val - floor) <= 1e-9, t.ms)
    ]


def delta2_bound_task(q: int, i: int, j: int) -> list[CheckRecord]:
    with Timer() as t:
        val = delta2_norm(q, i, j)
        bound = delta2_bound(q, i, j)
    return [
        _rec("delta2-norm-bound", {"q": q, "i": i, "j": j},
             {"norm": val, "margin": bound - val}, bound, val <= bound + 1e-9, t.ms)
    ]


def engine_agree_abelian_task(q: int, i: int, j: int, seed: int, tol: float) -> list[CheckRecord]:
    with Timer() as t:
        d = delta1(q, i, j)
        a = delta1_norm(q, i, j)
        b = char_sup_norm(d)
        c = regular_rep_norm(d, seed=seed, tol=min(tol, 1e-9))
        dev = max(abs(a - b), abs(a - c))
    return [
        _rec("engine-agreement-abelian", {"q": q, "i": i, "j": j},
             {"closed_form": a, "char_sup": b, "power_iter": c, "max_dev": dev},
             1e-6, dev <= 1e-6, t.ms)
    ]


def engine_agree_heisenberg_task(q: int, i: int, j: int, seed: int, tol: float) -> list[CheckRecord]:
    with Timer() as t:
        a = delta2_norm(q, i, j)
        b = regular_rep_norm(delta2(q, i, j), seed=seed, tol=min(tol, 1e-9))
        dev = abs(a - b)
    return [
        _rec("engine-agreement-heisenberg", {"q": q, "i": i, "j": j},
             {"block_sup": a, "power_iter": b, "dev": dev},
             1e-4, dev <= 1e-4, t.ms)
    ]


# -- walk ------------------------------------------------------------------------


def walk_task(q: int, lmax: int = 40) -> list[CheckRecord]:
    out = []
    s0 = decay_threshold(q)
    with Timer() as t:
        ok = True
        comp = {}
        prev_cq = None
        for label, s in (("0", 0.0), ("s0/2", s0 / 2), ("0.99s0", 0.99 * s0)):
            budget = WalkBudget(q, s, 1.0)
            b1, _ = telescoped_bound(CartanPair(3, 1), budget)
            b2, _ = telescoped_bound(CartanPair(3, 1), WalkBudget(q, s, 2.0))
            ok &= math.isfinite(b1) and abs(b2 - 2 * b1) <= 1e-9 * b2
            cq = chamber_constant(budget, "sec3", lmax=lmax)
            comp[f"Cq[s={label}]"] = cq
            ok &= math.isfinite(cq)
            if prev_cq is not None:
                ok &= cq >= prev_cq * (1 - 1e-12)  # monotone in s at fixed start grid
            prev_cq = cq
        # variant dominance: sec4 M1 radius never exceeds sec3's for i >= j+1
        from .walk import m1_bound

        dom = all(
            m1_bound(i, j, WalkBudget(q, 0.99 * s0, 1.0), "sec4")
            <= m1_bound(i, j, WalkBudget(q, 0.99 * s0, 1.0), "sec3") + 1e-12
            for i in range(1, 12)
            for j in range(0, i)
        )
        ok &= dom
        comp["sec4_dominated"] = dom
    out.append(_rec("walk-telescoped", {"q": q, "lmax": lmax}, comp, None, ok, t.ms))
    with Timer() as t2:
        try:
            telescoped_bound(CartanPair(3, 1), WalkBudget(q, s0, 1.0))
            diverged = False
        except DivergentBudget:
            diverged = True
    out.append(
        _rec("walk-divergence", {"q": q}, {"raised": diverged}, None, diverged, t2.ms)
    )
    return out


# -- suite assembly ----------------------------------------------------------------


def _grid(cfg: RunConfig, jmin: int):
    return [
        (i, j)
        for i in range(1, cfg.max_len + 1)
        for j in range(jmin, i + 1)
        if i + j <= cfg.max_len
    ]


def build_suite(name: str, cfg: RunConfig) -> list[tuple]:
    """List of (function, kwargs) tasks for a suite name."""
    q = cfg.q
    tasks: list[tuple] = []
    if name in ("gauss", "all"):
        for level in range(1, cfg.gauss_levels + 1):
            sample = None if level <= 4 else 1000
            tasks.append((gauss_task, {"q": q, "level": level, "sample": sample, "seed": cfg.seed}))
    if name in ("cells", "all"):
        for i in range(1, cfg.cells_i_max + 1):
            tasks.append((cells_h1_task, {"q": q, "i": i}))
        for m in range(1, cfg.cells_m_max + 1):
            for odd in (False, True):
                tasks.append((cells_h2_task, {"q": q, "m": m, "odd": odd}))
        for n in (1, 2):
            tasks.append((window_ball_task, {"q": q, "n": n}))
    if name in ("deltas", "all"):
        for i, j in _grid(cfg, 0):
            tasks.append((delta_support_task, {"q": q, "i": i, "j": j}))
            tasks.append((pairing_task, {"q": q, "i": i, "j": j, "tables": cfg.tables, "seed": cfg.seed}))
    if name in ("blocks", "all"):
        pts = [(2, 1), (3, 1), (3, 2)]
        for i, j in pts:
            if i + j <= max(cfg.max_len, 4):
                tasks.append((blocks_task, {"q": q, "i": i, "j": j}))
    if name in ("norms", "all"):
        for i, j in _grid(cfg, 0):
            tasks.append((delta1_bound_task, {"q": q, "i": i, "j": j}))
        for i, j in _grid(cfg, 1):
            tasks.append((delta2_bound_task, {"q": q, "i": i, "j": j}))
        for i in range(1, min(3, cfg.cells_i_max) + 1):
            tasks.append((kernel_scalar_task, {"q": q, "i": i}))
        tasks.append((average_vanishing_task, {"q": q, "i": 3, "m": 2}))
        for i, j in _grid(cfg, 0):
            if i + j <= cfg.agree_len and i <= 3:
                tasks.append((engine_agree_abelian_task,
                              {"q": q, "i": i, "j": j, "seed": cfg.seed, "tol": cfg.tol}))
        for i, j in _grid(cfg, 1):
            if i + j <= cfg.agree_len:
                tasks.append((engine_agree_heisenberg_task,
                              {"q": q, "i": i, "j": j, "seed": cfg.seed, "tol": cfg.tol}))
    if name in ("walk", "all"):
        tasks.append((walk_task, {"q": q}))
    if not tasks:
        raise ValueError(f"unknown suite: {name}")
    return tasks


def _run_task(item):
    fn, kwargs = item
    return fn(**kwargs)


def run_suite(name: str, cfg: RunConfig) -> list[CheckRecord]:
    cfg.validate()
    tasks = build_suite(name, cfg)
    if cfg.jobs > 1:
        import multiprocessing as mp

        with mp.get_context("spawn").Pool(cfg.jobs) as pool:
            chunks = pool.map(_run_task, tasks)
    else:
        chunks = [_run_task(t) for t in tasks]
    return [rec for chunk in chunks for rec in chunk]


SUITES = ("gauss", "cells", "deltas", "blocks", "norms", "walk", "all")
