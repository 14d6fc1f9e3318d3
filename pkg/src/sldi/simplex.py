"""Dense two-phase simplex for small inequality systems.

Solves  min c·z  subject to  A z <= b,  z_i >= 0 for flagged variables
(others free).  Bland's rule throughout, so the method terminates; a
pivot-count cap turns numerically degenerate runs into an explicit
failure instead of a silent wrong verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9
MAX_PIVOTS = 200_000


class SimplexFailure(RuntimeError):
    """Raised when the pivot cap is hit; never a silent wrong answer."""


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float | None = None


def _pivot(t: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    piv = t[row]
    for r in range(t.shape[0]):
        if r != row and t[r, col] != 0.0:
            t[r] -= t[r, col] * piv
    basis[row] = col


def _run(t: np.ndarray, basis: np.ndarray, ncols: int) -> str:
    """Drive the objective (last row) to optimality over columns < ncols."""
    pivots = 0
    while True:
        red = t[-1, :ncols]
        entering = -1
        for j in range(ncols):  # Bland: first improving column
            if red[j] < -TOL:
                entering = j
                break
        if entering < 0:
            return "optimal"
        ratios = []
        for r in range(t.shape[0] - 1):
            a = t[r, entering]
            if a > TOL:
                ratios.append((t[r, -1] / a, basis[r], r))
        if not ratios:
            return "unbounded"
        ratios.sort()  # ties broken on smallest basis index (Bland)
        _pivot(t, basis, ratios[0][2], entering)
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise SimplexFailure("pivot cap exceeded (degenerate basis?)")


def solve_lp(
    c: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    nonneg: np.ndarray,
) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    nonneg = np.asarray(nonneg, dtype=bool)
    m, n = a.shape if a.size else (0, len(c))
    if m == 0:
        a = np.zeros((0, n))
        b = np.zeros(0)

    # split free variables z = p - q
    cols: list[tuple[int, float]] = []  # (original var, sign)
    for j in range(n):
        cols.append((j, 1.0))
        if not nonneg[j]:
            cols.append((j, -1.0))
    nw = len(cols)
    aw = np.empty((m, nw))
    cw = np.empty(nw)
    for k, (j, s) in enumerate(cols):
        aw[:, k] = s * a[:, j]
        cw[k] = s * c[j]

    # slacks, with rows flipped so the rhs is nonnegative
    neg = b < 0
    aw[neg] *= -1.0
    bw = np.abs(b)
    slack_sign = np.where(neg, -1.0, 1.0)

    art_rows = np.flatnonzero(neg)
    n_art = len(art_rows)
    total = nw + m + n_art
    t = np.zeros((m + 1, total + 1))
    t[:m, :nw] = aw
    for r in range(m):
        t[r, nw + r] = slack_sign[r]
    basis = np.empty(m, dtype=int)
    basis[:] = nw + np.arange(m)
    for k, r in enumerate(art_rows):
        t[r, nw + m + k] = 1.0
        basis[r] = nw + m + k
    t[:m, -1] = bw

    # phase 1: minimise the artificial sum
    if n_art:
        t[-1, nw + m : nw + m + n_art] = 1.0
        for r in art_rows:
            t[-1] -= t[r]
        status = _run(t, basis, nw + m)  # artificials never re-enter
        if status != "optimal" or t[-1, -1] < -TOL * 10:
            return SimplexResult("infeasible")
        # pivot surviving artificials out, or drop their (redundant) rows
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= nw + m:
                row = t[r, : nw + m]
                j = next((jj for jj in range(nw + m) if abs(row[jj]) > TOL), -1)
                if j < 0:
                    keep[r] = False
                else:
                    _pivot(t, basis, r, j)
        if not keep.all():
            t = np.vstack([t[:m][keep], t[-1:]])
            basis = basis[keep]
            m = keep.sum()
    t = np.hstack([t[:, : nw + m], t[:, -1:]])

    # phase 2
    t[-1, :] = 0.0
    t[-1, :nw] = cw
    for r in range(m):
        if t[-1, basis[r]] != 0.0:
            t[-1] -= t[-1, basis[r]] * t[r]
    status = _run(t, basis, nw + m)
    if status == "unbounded":
        return SimplexResult("unbounded")

    z = np.zeros(n)
    for r in range(m):
        if basis[r] < nw:
            j, s = cols[basis[r]]
            z[j] += s * t[r, -1]
    return SimplexResult("optimal", z, float(c @ z))
