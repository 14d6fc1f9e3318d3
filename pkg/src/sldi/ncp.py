"""Non-positive circuit weight problems.

`solve_pic_ncp` is the strongly polynomial interval algorithm for the
single-parameter problem on λP ⊕ λ⁻¹I ⊕ C; the multi-parameter variant
is handled by translating the precedence-graph inequalities to a linear
program over (x, λ) and running the bundled simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import maxplus as mp
from .maxplus import EPS, NEG_INF, POS_INF
from .simplex import SimplexResult, solve_lp


# ---------------------------------------------------------------------------
# intervals

@dataclass(frozen=True)
class Interval:
    """A closed interval of admissible parameters, intersected with ℝ.

    Infinite endpoints mean the set is unbounded on that side (the
    endpoint itself is never a member).
    """

    lo: float
    hi: float
    empty: bool

    @staticmethod
    def make(lo: float, hi: float) -> "Interval":
        if lo - hi > EPS or lo == POS_INF or hi == NEG_INF:
            return Interval(POS_INF, NEG_INF, True)
        return Interval(lo, hi, False)

    @staticmethod
    def empty_set() -> "Interval":
        return Interval(POS_INF, NEG_INF, True)

    @staticmethod
    def reals() -> "Interval":
        return Interval(NEG_INF, POS_INF, False)

    def contains(self, lam: float, tol: float = EPS) -> bool:
        return not self.empty and self.lo - tol <= lam <= self.hi + tol

    def clamp_nonneg(self) -> "Interval":
        return self if self.empty else Interval.make(max(self.lo, 0.0), self.hi)

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        left = "(-inf" if self.lo == NEG_INF else f"[{self.lo:g}"
        right = "+inf)" if self.hi == POS_INF else f"{self.hi:g}]"
        return f"{left}, {right}"


# ---------------------------------------------------------------------------
# instances

@dataclass(frozen=True)
class PicInstance:
    P: np.ndarray
    I: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        n = mp._check_square(self.P)
        for m in (self.I, self.C):
            if m.shape != (n, n):
                raise ValueError("P, I, C must have equal square dimensions")
            mp.check_rmax(m)
        mp.check_rmax(self.P)

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def at(self, lam: float) -> np.ndarray:
        """λP ⊕ λ⁻¹I ⊕ C for a concrete real λ."""
        return mp.mat_add(
            mp.mat_add(mp.scalar_mat_mul(lam, self.P), mp.scalar_mat_mul(-lam, self.I)),
            self.C,
        )


@dataclass(frozen=True)
class MpicInstance:
    P: tuple[np.ndarray, ...]
    I: tuple[np.ndarray, ...]
    C: np.ndarray

    def __post_init__(self):
        n = mp._check_square(self.C)
        if len(self.P) != len(self.I):
            raise ValueError("need as many proportional as inverse matrices")
        for m in (*self.P, *self.I):
            if m.shape != (n, n):
                raise ValueError("all matrices must share the same dimension")
            mp.check_rmax(m)

    @property
    def q(self) -> int:
        return len(self.P)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    def at(self, lam: np.ndarray) -> np.ndarray:
        a = self.C
        for k in range(self.q):
            a = mp.mat_add(a, mp.scalar_mat_mul(lam[k], self.P[k]))
            a = mp.mat_add(a, mp.scalar_mat_mul(-lam[k], self.I[k]))
        return a

    def as_pic(self) -> PicInstance:
        if self.q != 1:
            raise ValueError("only single-parameter instances reduce to a PIC")
        return PicInstance(self.P[0], self.I[0], self.C)


# ---------------------------------------------------------------------------
# the interval algorithm for the single-parameter problem

def solve_pic_ncp(inst: PicInstance) -> Interval:
    """Admissible λ's of λP ⊕ λ⁻¹I ⊕ C as a closed interval.

    Precomputes P ← C*PC*, I ← C*IC*, grows the path matrix S for at
    most ⌊n/2⌋ rounds (stopping early at a fixpoint, which cannot change
    the outcome), then reads the endpoints off two circuit means.
    """
    verdict, cstar = mp.kleene_star(inst.C)
    if not verdict.in_gamma:
        return Interval.empty_set()
    p = mp.mat_mul(mp.mat_mul(cstar, inst.P), cstar)
    i = mp.mat_mul(mp.mat_mul(cstar, inst.I), cstar)
    n = inst.n
    s = mp.eye(n)
    e = mp.eye(n)
    for _ in range(n // 2):
        s2 = mp.mat_mul(s, s)
        nxt = mp.mat_add(
            mp.mat_add(mp.mat_mul(mp.mat_mul(p, s2), i), mp.mat_mul(mp.mat_mul(i, s2), p)),
            e,
        )
        if np.array_equal(nxt, s):
            break
        s = nxt
    verdict, sstar = mp.kleene_star(s)
    if not verdict.in_gamma:
        return Interval.empty_set()
    lo = mp.mcm(mp.mat_mul(i, sstar))
    hi = -mp.mcm(mp.mat_mul(p, sstar))
    return Interval.make(lo, hi)


# ---------------------------------------------------------------------------
# linear-programming route for the multi-parameter problem

@dataclass(frozen=True)
class LinearInequality:
    """const + sign·λ_k + x_j <= x_i  (sign 0 and k None for the constant part)."""

    const: float
    i: int
    j: int
    k: int | None = None
    sign: int = 0

    def holds(self, x: np.ndarray, lam: np.ndarray, tol: float) -> bool:
        v = self.const + x[self.j] - x[self.i]
        if self.k is not None:
            v += self.sign * lam[self.k]
        return v <= tol


def mpic_to_lp(inst: MpicInstance) -> list[LinearInequality]:
    """One inequality per finite matrix entry; -inf entries emit nothing."""
    out: list[LinearInequality] = []
    n = inst.n
    for i in range(n):
        for j in range(n):
            for k in range(inst.q):
                if inst.P[k][i, j] > NEG_INF:
                    out.append(LinearInequality(float(inst.P[k][i, j]), i, j, k, +1))
                if inst.I[k][i, j] > NEG_INF:
                    out.append(LinearInequality(float(inst.I[k][i, j]), i, j, k, -1))
            if inst.C[i, j] > NEG_INF:
                out.append(LinearInequality(float(inst.C[i, j]), i, j))
    return out


@dataclass
class LpResult:
    status: str  # "feasible" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    lam: np.ndarray | None = None
    objective: float | None = None


def lp_solve(
    ineqs: list[LinearInequality],
    n: int,
    q: int,
    objective: np.ndarray | None = None,
    lambda_nonneg: bool = True,
) -> LpResult:
    """Feasibility / λ-objective minimisation over the inequality system.

    Variables are (x_1..x_n, λ_1..λ_q); x is always free, λ is
    nonnegative unless told otherwise.  The objective is a linear
    function of λ alone.
    """
    nv = n + q
    rows = []
    rhs = []
    for iq in ineqs:
        r = np.zeros(nv)
        r[iq.j] += 1.0
        r[iq.i] -= 1.0
        if iq.k is not None:
            r[n + iq.k] += float(iq.sign)
        rows.append(r)
        rhs.append(-iq.const)
    a = np.array(rows) if rows else np.zeros((0, nv))
    b = np.array(rhs)
    c = np.zeros(nv)
    if objective is not None:
        c[n:] = np.asarray(objective, dtype=float)
    nonneg = np.zeros(nv, dtype=bool)
    nonneg[n:] = lambda_nonneg
    res: SimplexResult = solve_lp(c, a, b, nonneg)
    if res.status == "infeasible":
        return LpResult("infeasible")
    if res.status == "unbounded":
        return LpResult("unbounded")
    return LpResult("feasible", res.x[:n], res.x[n:], res.objective)


def mpic_feasible_interval(inst: MpicInstance, lambda_nonneg: bool = False) -> Interval:
    """λ-interval of a q=1 instance obtained through the LP (tests/cross-checks)."""
    if inst.q != 1:
        raise ValueError("interval form only exists for q = 1")
    ineqs = mpic_to_lp(inst)
    lo_res = lp_solve(ineqs, inst.n, 1, np.array([1.0]), lambda_nonneg)
    if lo_res.status == "infeasible":
        return Interval.empty_set()
    lo = NEG_INF if lo_res.status == "unbounded" else lo_res.objective
    hi_res = lp_solve(ineqs, inst.n, 1, np.array([-1.0]), lambda_nonneg)
    hi = POS_INF if hi_res.status == "unbounded" else -hi_res.objective
    return Interval.make(lo, hi)
