"""Machine-readable check records and the registry of verifiable claims.

Every check a suite runs is recorded with the claim it verifies (a
self-contained formula string), its parameters, the computed values, the
bound it was held against, and a pass flag.  Reports are JSON lines, one
record per line, with a final summary object.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

__all__ = ["CheckRecord", "Timer", "write_report", "CHECK_REGISTRY", "UnknownCheck"]


@dataclass
class CheckRecord:
    check: str
    anchor: str
    params: dict
    computed: dict
    bound: float | None
    passed: bool
    runtime_ms: float = 0.0

    def to_json(self) -> str:
        payload = {
            "check": self.check,
            "anchor": self.anchor,
            "params": self.params,
            "computed": self.computed,
            "bound": self.bound,
            "passed": self.passed,
            "runtime_ms": round(self.runtime_ms, 3),
        }
        return json.dumps(payload, sort_keys=True, default=_num)


def _num(x):
    import numpy as np

    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    raise TypeError(f"not JSON serializable: {type(x)}")


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self.t0) * 1000.0
        return False


def write_report(records: list[CheckRecord], path: str | None) -> dict:
    summary = {
        "summary": True,
        "total": len(records),
        "passed": sum(r.passed for r in records),
        "failed": sum(not r.passed for r in records),
        "all_passed": all(r.passed for r in records),
    }
    lines = [r.to_json() for r in records] + [json.dumps(summary, sort_keys=True)]
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return summary


class UnknownCheck(KeyError):
    pass


CHECK_REGISTRY: dict[str, dict] = {
    "gauss-magnitude": {
        "anchor": "|avg_{a in O/pi^l O} eta(a^2)| = q^(-l/2) for every nondegenerate eta",
        "grid": "q in {3,5}; exhaustive characters for l <= 4, seeded sample for l in {5,6}",
    },
    "cells-abelian": {
        "anchor": "alpha(a,b)beta(x,y) lies in cell (i, i-l) for l = val(y-ax-b) <= i; "
        "the distinguished 2x2 determinant is -pi^(-2i)(y-ax-b) mod pi^(-i+1)O",
        "grid": "exhaustive over the (s, v) reduction of all level-(i+1) tuples, i <= 3",
    },
    "cells-heisenberg-even": {
        "anchor": "alpha(a1,a2,b)beta(x1,x2,y) lies in cell (2m-l, l+2) for "
        "l = val(y-b-a1x1-a2x2) <= m-1; minor sup is q^(2m+2); "
        "eta = pi^(-2m)(y-b-a1x1-a2x2) mod pi^(-m+1)O",
        "grid": "exhaustive over the 5-coordinate reduction of all level-(m+1) tuples, m <= 2",
    },
    "cells-heisenberg-odd": {
        "anchor": "shear-twisted product lies in cell (2m-l, l+3) for l <= m-2 and in "
        "(m+2, m+1) at l = m-1 (the (2,4) entry w - x/pi caps the sup norm); "
        "minor sup is q^(2m+3)",
        "grid": "exhaustive over the 5-coordinate reduction of all level-(m+1) tuples, m <= 2",
    },
    "window-in-ball": {
        "anchor": "the window |x|,|y|,|z| <= q^n of the abelian family lies in the ball "
        "of length 2n; the Heisenberg window lies in the ball of length 2n",
        "grid": "exhaustive windows at n <= 2",
    },
    "delta-support-cells": {
        "anchor": "supp h1(i,j) meets exactly the cell (i,j); shear(1)-shifted supp "
        "h2(i,j) meets exactly (i,j) for odd i+j (unshifted for even)",
        "grid": "q = 3, i+j <= 6",
    },
    "pairing-delta1": {
        "anchor": "sum_h c(cell(h)) delta1(h) = c(i,j) - c(i,j+1) for chamber tables c",
        "grid": "q = 3, j+1 <= i, i+j <= 6, 100 seeded random tables each",
    },
    "pairing-delta2": {
        "anchor": "sum_h c(cell(shear^eps h)) delta2(h) = c(i,j) - c(i+1,j-1), eps = parity "
        "of i+j; at odd i+j with j = 1 the identity becomes c(i,1) - c(i+1,1) "
        "(the unshifted (i+1,0) support sits in cell (i+1,0) but its shifted copy in (i+1,1))",
        "grid": "q = 3, 1 <= j <= i, i+j <= 6, 100 seeded random tables each",
    },
    "kernel-scalar": {
        "anchor": "C = avg_c chi([pi^-i(1+pi c)]) - chi([pi^(-i-1)(1+pi c)]) is nonzero "
        "exactly when chi is trivial on [pi^(-i+1)O] and nontrivial on [pi^(-i-1)O]",
        "grid": "q = 3, i <= 3, exhaustive over character levels <= i+2",
    },
    "average-vanishing": {
        "anchor": "avg_{z in [pi^-m O]} chi(wz/2) = 0 whenever w in [pi^-m O] lies "
        "outside [pi^(-(i-m))O], for chi trivial on [pi^(-i+1)O] and nontrivial on [pi^(-i-1)O]",
        "grid": "q = 3, i = 3, m = 2, exhaustive",
    },
    "block-structure": {
        "anchor": "block entries lie in {0, |C| q^-m}; at most q^(i-m+1) nonzeros per row "
        "and column; row+column sums agree below exponent -(i-m) (anti-diagonal); "
        "nonzero rows are constant; block norm <= 2 q^(2-j) and <= 2 q^(i-2m+1)",
        "grid": "q = 3, (i,j) in {(2,1),(3,1),(3,2)}, full pruned family, all block classes",
    },
    "delta1-norm-bound": {
        "anchor": "||delta1(i,j)|| <= 2 q^(-(i-j)/2) for j >= 1 (character sup engine)",
        "grid": "q in {3,5}, 1 <= j <= i, i+j <= 6",
    },
    "delta1-floor-j0": {
        "anchor": "||delta1(i,0)|| = max_k |1 - omega_q^k|: at j = 0 the pi^0 marker is a "
        "constant and a character acting only on constant coefficients freezes the "
        "difference, so the 2 q^(-i/2) bound fails for every i >= 1",
        "grid": "q in {3,5}, (i,0) with i <= 6",
    },
    "delta2-norm-bound": {
        "anchor": "||delta2(i,j)|| <= 2 q^2 q^(-j) (block-sup engine)",
        "grid": "q in {3,5}, 1 <= j <= i, i+j <= 6",
    },
    "engine-agreement-abelian": {
        "anchor": "character-sup, closed-form and power-iteration norms of delta1 agree",
        "grid": "q = 3, i <= 3 (closed-form vs brute exact; vs power iteration to 1e-6)",
    },
    "engine-agreement-heisenberg": {
        "anchor": "block-sup and power-iteration norms of delta2 agree to 1e-4",
        "grid": "q = 3, i+j <= 4",
    },
    "walk-telescoped": {
        "anchor": "sum of per-move budgets along the zig-zag is finite for s < s0 = "
        "log(q)/6, monotone in C and s, and bounded by C C_q e^(-(i+j)(s0-s)/4)",
        "grid": "q in {3,5}, s in {0, s0/2, 0.99 s0}, starts with i+j <= 40",
    },
    "walk-divergence": {
        "anchor": "the budget sums diverge at s = s0 (geometric ratio e^(6s)/q reaches 1)",
        "grid": "q in {3,5}",
    },
}
