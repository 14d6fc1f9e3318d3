"""Cycle-time sets of switched linear-dual inequalities.

Two routes exist for periodic schedules: assembling the full V·n block
matrix and solving one interval problem on it (reference path, O(V⁴n⁴)),
or the structured algorithm that sweeps the block cycle once and solves
an n-dimensional interval problem (O(Vn³ + n⁴)).  Intermittently
periodic schedules become multi-parameter instances; those can be
shrunk from (U₀+Σ(V_h+U_h))·n to q·n nodes by eliminating the chain
blocks through closed-form tridiagonal star formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import maxplus as mp
from .maxplus import EPS, NEG_INF
from .model import ModeMatrices, Schedule, SldiSystem
from .ncp import Interval, MpicInstance, PicInstance, solve_pic_ncp


# ---------------------------------------------------------------------------
# per-mode blocks

@dataclass(frozen=True)
class PeriodicBlocks:
    """P_h = B1♯, I_h = A1, C_h = A0 ⊕ B0♯ along a subschedule."""

    P: tuple[np.ndarray, ...]
    I: tuple[np.ndarray, ...]
    C: tuple[np.ndarray, ...]

    @property
    def V(self) -> int:
        return len(self.P)

    @property
    def n(self) -> int:
        return self.P[0].shape[0]


def mode_blocks(m: ModeMatrices) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return mp.sharp(m.B1), m.A1, mp.mat_add(m.A0, mp.sharp(m.B0))


def periodic_blocks(sys: SldiSystem, v) -> PeriodicBlocks:
    triples = [mode_blocks(sys.mode(sym)) for sym in v]
    if not triples:
        raise ValueError("empty subschedule")
    return PeriodicBlocks(*(tuple(t[k] for t in triples) for k in range(3)))


def _place(big: np.ndarray, n: int, i: int, j: int, block: np.ndarray) -> None:
    big[i * n : (i + 1) * n, j * n : (j + 1) * n] = np.maximum(
        big[i * n : (i + 1) * n, j * n : (j + 1) * n], block
    )


def periodic_pic(blocks: PeriodicBlocks) -> PicInstance:
    """The V·n-node instance whose admissible λ's are the cycle times."""
    v, n = blocks.V, blocks.n
    if v == 1:
        return PicInstance(blocks.P[0], blocks.I[0], blocks.C[0])
    big_c = mp.eps_matrix(v * n)
    for h in range(v):
        _place(big_c, n, h, h, blocks.C[h])
    for h in range(v - 1):
        _place(big_c, n, h, h + 1, blocks.P[h])
        _place(big_c, n, h + 1, h, blocks.I[h])
    big_p = mp.eps_matrix(v * n)
    big_i = mp.eps_matrix(v * n)
    _place(big_p, n, v - 1, 0, blocks.P[v - 1])
    _place(big_i, n, 0, v - 1, blocks.I[v - 1])
    return PicInstance(big_p, big_i, big_c)


# ---------------------------------------------------------------------------
# periodic schedules

def ldi_one_periodic(m: ModeMatrices) -> Interval:
    """Cycle times of the unswitched system (1-periodic trajectories)."""
    return solve_pic_ncp(PicInstance(*mode_blocks(m)))


def periodic_naive(sys: SldiSystem, v) -> Interval:
    """Reference path: interval problem on the assembled block matrix."""
    return solve_pic_ncp(periodic_pic(periodic_blocks(sys, v)))


def periodic_fast(sys: SldiSystem, v) -> Interval:
    """Structured path, linear in the subschedule length.

    Degenerate lengths fall back to the direct construction: for V = 1
    this is the plain one-mode analysis, for V = 2 the assembled matrix
    has only four blocks and the sweep recursions are empty.
    """
    blocks = periodic_blocks(sys, v)
    n, V = blocks.n, blocks.V
    if V == 1:
        return solve_pic_ncp(PicInstance(blocks.P[0], blocks.I[0], blocks.C[0]))
    if V == 2:
        return solve_pic_ncp(periodic_pic(blocks))

    # condition 1: every diagonal block closes
    cstar = []
    for c in blocks.C:
        verdict, s = mp.kleene_star(c)
        if not verdict.in_gamma:
            return Interval.empty_set()
        cstar.append(s)

    def pp(h):  # padded arc block h+1 -> h (indices mod V)
        return mp.mat_mul(mp.mat_mul(cstar[h], blocks.P[h]), cstar[(h + 1) % V])

    def ii(h):  # padded arc block h -> h+1
        return mp.mat_mul(mp.mat_mul(cstar[(h + 1) % V], blocks.I[h]), cstar[h])

    ppm = [pp(h) for h in range(V)]
    iim = [ii(h) for h in range(V)]

    # condition 2: the chain sweeps close in both directions
    cp: list[np.ndarray | None] = [None] * (V - 1)
    cp_star: list[np.ndarray | None] = [None] * (V - 1)
    for h in range(V - 2, -1, -1):
        acc = iim[h]
        if h + 1 <= V - 2:
            acc = mp.mat_mul(cp_star[h + 1], acc)
        cp[h] = mp.mat_mul(ppm[h], acc)
        verdict, s = mp.kleene_star(cp[h])
        if not verdict.in_gamma:
            return Interval.empty_set()
        cp_star[h] = s
    ci: list[np.ndarray | None] = [None] * V
    ci_star: list[np.ndarray | None] = [None] * V
    for h in range(1, V):
        acc = ppm[h]
        if h - 1 >= 1:
            acc = mp.mat_mul(ci_star[h - 1], acc)
        ci[h] = mp.mat_mul(iim[h], acc)
        verdict, s = mp.kleene_star(ci[h])
        if not verdict.in_gamma:
            return Interval.empty_set()
        ci_star[h] = s

    # condition 3: the n-node interval problem around the cycle closure
    m_p = ppm[0]
    for h in range(1, V - 1):
        m_p = mp.mat_mul(mp.mat_mul(m_p, cp_star[h]), ppm[h])
    m_p = mp.mat_mul(m_p, ppm[V - 1])
    m_i = iim[V - 1]
    for h in range(V - 2, 0, -1):
        m_i = mp.mat_mul(mp.mat_mul(m_i, ci_star[h]), iim[h])
    m_i = mp.mat_mul(m_i, iim[0])
    m_c = mp.mat_add(cp[0], ci[V - 1])
    return solve_pic_ncp(PicInstance(m_p, m_i, m_c))


# ---------------------------------------------------------------------------
# block-tridiagonal chains

class TridiagChain:
    """Structured Kleene star of a block-tridiagonal matrix.

    ``diag[k]`` is the k-th diagonal block, ``sub[k]`` the arc block
    k→k+1 (below the diagonal), ``sup[k]`` the arc block k+1→k.  Star
    blocks between arbitrary levels come out of one upward and one
    downward sweep; ``ok`` is False when the chain has a positive
    circuit (no star exists).
    """

    def __init__(self, diag, sub, sup, tol: float = EPS):
        self.m = len(diag)
        if len(sub) != self.m - 1 or len(sup) != self.m - 1:
            raise ValueError("need exactly m-1 off-diagonal blocks")
        self.sub = sub
        self.sup = sup
        self.ok = True
        self.dstar = []
        for d in diag:
            verdict, s = mp.kleene_star(d, tol)
            if not verdict.in_gamma:
                self.ok = False
                return
            self.dstar.append(s)
        self.pp = [
            mp.mat_mul(mp.mat_mul(self.dstar[k], sup[k]), self.dstar[k + 1])
            for k in range(self.m - 1)
        ]
        self.ii = [
            mp.mat_mul(mp.mat_mul(self.dstar[k + 1], sub[k]), self.dstar[k])
            for k in range(self.m - 1)
        ]
        n = diag[0].shape[0]
        self.up = [None] * self.m  # circuits above each level, and their stars
        self.up_star = [None] * self.m
        for k in range(self.m - 1, -1, -1):
            if k == self.m - 1:
                circ = mp.eps_matrix(n)
            else:
                circ = mp.mat_mul(mp.mat_mul(self.pp[k], self.up_star[k + 1]), self.ii[k])
            verdict, s = mp.kleene_star(circ, tol)
            if not verdict.in_gamma:
                self.ok = False
                return
            self.up[k] = circ
            self.up_star[k] = s
        self.dn = [None] * self.m
        self.dn_star = [None] * self.m
        for k in range(self.m):
            if k == 0:
                circ = mp.eps_matrix(n)
            else:
                circ = mp.mat_mul(mp.mat_mul(self.ii[k - 1], self.dn_star[k - 1]), self.pp[k - 1])
            verdict, s = mp.kleene_star(circ, tol)
            if not verdict.in_gamma:
                self.ok = False
                return
            self.dn[k] = circ
            self.dn_star[k] = s
        self._theta: dict[int, np.ndarray] = {}

    def theta(self, k: int) -> np.ndarray:
        """All paths k → k in the whole chain."""
        if k not in self._theta:
            both = mp.star(mp.mat_add(self.up[k], self.dn[k]))
            self._theta[k] = mp.mat_mul(self.dstar[k], both)
        return self._theta[k]

    def block(self, i: int, j: int) -> np.ndarray:
        """Block (i, j) of the chain's Kleene star (paths j → i)."""
        if not self.ok:
            raise mp.PositiveCircuitError(mp.GammaVerdict(False))
        if i == j:
            return self.theta(i)
        out = self.theta(i)
        if i < j:
            for k in range(i, j):
                out = mp.mat_mul(out, self.sup[k])
                out = mp.mat_mul(out, mp.mat_mul(self.dstar[k + 1], self.up_star[k + 1]))
        else:
            for k in range(i, j, -1):
                out = mp.mat_mul(out, self.sub[k - 1])
                out = mp.mat_mul(out, mp.mat_mul(self.dstar[k - 1], self.dn_star[k - 1]))
        return out


def tridiag_star_blocks(diag, sub, sup, pairs) -> dict[tuple[int, int], np.ndarray]:
    """Selected star blocks of a block-tridiagonal chain.

    Raises on a positive circuit; for an in-Γ chain the result agrees
    with slicing the directly computed full Kleene star.
    """
    chain = TridiagChain(list(diag), list(sub), list(sup))
    return {(i, j): chain.block(i, j) for i, j in pairs}


# ---------------------------------------------------------------------------
# intermittently periodic schedules

@dataclass(frozen=True)
class BlockLayout:
    """Where each block row of the big instance comes from."""

    modes: tuple[str, ...]  # one mode per block position (v_h appearing once)
    start: tuple[int, ...]  # first block of each periodic group
    end: tuple[int, ...]  # last block of each periodic group
    n: int


def intermittent_build(sys: SldiSystem, sched: Schedule) -> tuple[MpicInstance, BlockLayout]:
    """Multi-parameter instance for an intermittently periodic schedule.

    The construction rescales each v_h^{m_h} burst so the group appears
    once, with λ_h entering only on the wrap-around arcs of its block.
    """
    if sched.q == 0:
        raise ValueError("schedule has no periodic part")
    n = sys.n
    positions: list[str] = list(sched.u[0])
    start = []
    end = []
    for h, (v, _) in enumerate(sched.vm):
        start.append(len(positions))
        positions.extend(v)
        end.append(len(positions) - 1)
        positions.extend(sched.u[h + 1])
    L = len(positions)
    big_c = mp.eps_matrix(L * n)
    for k, sym in enumerate(positions):
        p, i, c = mode_blocks(sys.mode(sym))
        _place(big_c, n, k, k, c)
        if k + 1 < L:
            _place(big_c, n, k, k + 1, p)
            _place(big_c, n, k + 1, k, i)
    big_p = []
    big_i = []
    for h, (v, _) in enumerate(sched.vm):
        p, i, _ = mode_blocks(sys.mode(v[-1]))
        bp = mp.eps_matrix(L * n)
        bi = mp.eps_matrix(L * n)
        _place(bp, n, end[h], start[h], p)
        _place(bi, n, start[h], end[h], i)
        big_p.append(bp)
        big_i.append(bi)
    inst = MpicInstance(tuple(big_p), tuple(big_i), big_c)
    return inst, BlockLayout(tuple(positions), tuple(start), tuple(end), n)


@dataclass
class ReducedMpic:
    """q·n-node equivalent of a big intermittent instance.

    When ``infeasible`` is set no parameter vector is admissible at all
    (a positive circuit exists that avoids every λ-labelled arc).
    """

    instance: MpicInstance | None
    provenance: dict[int, int]  # reduced block -> original schedule position
    infeasible: bool = False
    reason: str = ""


def _cblock(c: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    return c[i * n : (i + 1) * n, j * n : (j + 1) * n]


def intermittent_reduce(inst: MpicInstance, layout: BlockLayout) -> ReducedMpic:
    """Eliminate the chain blocks, keeping one block per periodic group.

    The wrap blocks move to the front; the remainder splits into plain
    tridiagonal chains whose star blocks are composed in closed form, so
    the whole reduction is linear in the schedule length.
    """
    n = layout.n
    q = len(layout.start)
    L = len(layout.modes)
    prov = {h: layout.start[h] for h in range(q)}
    if any(layout.end[h] == layout.start[h] for h in range(q)):
        raise ValueError("reduction needs periodic groups of length >= 2")

    a_star = []
    for h in range(q):
        verdict, s = mp.kleene_star(_cblock(inst.C, n, layout.start[h], layout.start[h]))
        if not verdict.in_gamma:
            return ReducedMpic(None, prov, True, "positive circuit inside a wrap block")
        a_star.append(s)

    # the remaining positions split into independent tridiagonal chains
    bounds = [(0, layout.start[0] - 1)]
    for h in range(q):
        last = layout.start[h + 1] - 1 if h + 1 < q else L - 1
        bounds.append((layout.start[h] + 1, last))
    chains: dict[int, TridiagChain] = {}
    seg_of: dict[int, tuple[int, int]] = {}
    for g, (lo, hi) in enumerate(bounds):
        if lo > hi:
            continue
        ps = list(range(lo, hi + 1))
        chain = TridiagChain(
            [_cblock(inst.C, n, p, p) for p in ps],
            [_cblock(inst.C, n, ps[k + 1], ps[k]) for k in range(len(ps) - 1)],
            [_cblock(inst.C, n, ps[k], ps[k + 1]) for k in range(len(ps) - 1)],
        )
        if not chain.ok:
            return ReducedMpic(None, prov, True, "positive circuit in a transient chain")
        chains[g] = chain
        for k, p in enumerate(ps):
            seg_of[p] = (g, k)

    # arcs between the wrap blocks and the chains; tag is the λ slope
    into: list[list[tuple[int, np.ndarray, int | None]]] = [[] for _ in range(q)]
    outof: list[list[tuple[int, np.ndarray, int | None]]] = [[] for _ in range(q)]
    for h in range(q):
        s, e = layout.start[h], layout.end[h]
        if s > 0:
            into[h].append((s - 1, _cblock(inst.C, n, s, s - 1), None))
            outof[h].append((s - 1, _cblock(inst.C, n, s - 1, s), None))
        into[h].append((s + 1, _cblock(inst.C, n, s, s + 1), None))
        outof[h].append((s + 1, _cblock(inst.C, n, s + 1, s), None))
        into[h].append((e, _cblock(inst.I[h], n, s, e), h))  # λ_h^{-1} wrap
        outof[h].append((e, _cblock(inst.P[h], n, e, s), h))  # λ_h wrap

    red_c = mp.eps_matrix(q * n)
    red_p = [mp.eps_matrix(q * n) for _ in range(q)]
    red_i = [mp.eps_matrix(q * n) for _ in range(q)]
    for hi_ in range(q):
        for x, barc, btag in into[hi_]:
            gx, kx = seg_of[x]
            for hj in range(q):
                for y, carc, ctag in outof[hj]:
                    gy, ky = seg_of[y]
                    if gx != gy:
                        continue
                    term = mp.mat_mul(barc, chains[gx].block(kx, ky))
                    term = mp.mat_mul(term, carc)
                    term = mp.mat_mul(mp.mat_mul(a_star[hi_], term), a_star[hj])
                    if btag is None and ctag is None:
                        target = red_c
                    elif btag is None:
                        target = red_p[ctag]
                    elif ctag is None:
                        target = red_i[btag]
                    elif btag == ctag:
                        target = red_c
                    else:
                        if (term > NEG_INF).any():
                            raise AssertionError(
                                "cross-parameter path slipped through the reduction"
                            )
                        continue
                    _place(target, n, hi_, hj, term)
    return ReducedMpic(MpicInstance(tuple(red_p), tuple(red_i), red_c), prov)


# ---------------------------------------------------------------------------
# strict initial conditions and solver orchestration

def strict_one_periodic(pteg) -> Interval:
    """Periods of trajectories that respect the initial time tags."""
    from .model import strict_to_sldi

    sys, sched = strict_to_sldi(pteg)
    inst, _ = intermittent_build(sys, sched)
    return solve_pic_ncp(inst.as_pic())


def intermittent_interval(sys: SldiSystem, sched: Schedule, reduce: bool = True) -> Interval:
    """Exact period interval for single-parameter intermittent schedules."""
    inst, layout = intermittent_build(sys, sched)
    if inst.q != 1:
        raise ValueError("interval form only exists for q = 1")
    if reduce and layout.end[0] > layout.start[0]:
        red = intermittent_reduce(inst, layout)
        if red.infeasible:
            return Interval.empty_set()
        return solve_pic_ncp(red.instance.as_pic())
    return solve_pic_ncp(inst.as_pic())
