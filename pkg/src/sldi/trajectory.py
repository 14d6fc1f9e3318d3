"""Trajectory synthesis and verification.

Admissible periods come with explicit witnesses: any finite column of
the Kleene star of the λ-substituted block matrix unstacks into a
consistent trajectory, periodic pieces extend by adding λ per round,
and rescaled intermittent solutions are unrolled back into real time.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import maxplus as mp
from .cycletime import intermittent_build, periodic_blocks, periodic_pic
from .maxplus import EPS, NEG_INF
from .model import Schedule, SldiSystem


@dataclass
class Dater:
    """Event times, one row per schedule step (k is 1-based in reports)."""

    times: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 2:
            raise ValueError("dater needs a K x n array of times")
        if not np.isfinite(self.times).all():
            raise ValueError("dater entries must be finite")

    @property
    def K(self) -> int:
        return self.times.shape[0]

    @property
    def n(self) -> int:
        return self.times.shape[1]

    def shifted(self, t0: float) -> "Dater":
        return Dater(self.times + t0)


def _pick_column(star: np.ndarray, column: int | None) -> np.ndarray:
    if column is not None:
        x = star[:, column]
        if not np.isfinite(x).all():
            raise ValueError(f"column {column} reaches no finite value everywhere")
        return x.copy()
    for j in range(star.shape[1]):
        if np.isfinite(star[:, j]).all():
            return star[:, j].copy()
    # no single column is finite; the max of all columns still solves
    # the inequality and is finite thanks to the nonnegative diagonal
    return star.max(axis=1)


def _star_or_raise(a: np.ndarray, what: str) -> np.ndarray:
    verdict, s = mp.kleene_star(a)
    if not verdict.in_gamma:
        raise ValueError(
            f"{what}: positive circuit {verdict.witness} "
            f"(weight {verdict.witness_weight:g})"
        )
    return s


def synth_periodic(
    sys: SldiSystem, v, lam: float, column: int | None = None, periods: int = 3
) -> Dater:
    """A consistent v-periodic trajectory of period lam, K = periods·|v|."""
    blocks = periodic_blocks(sys, v)
    inst = periodic_pic(blocks)
    star = _star_or_raise(inst.at(lam), f"lambda={lam:g} is outside the cycle-time set")
    base = _pick_column(star, column).reshape(len(v), sys.n)
    rows = [base + k * lam for k in range(max(1, periods))]
    return Dater(np.vstack(rows))


def synth_intermittent(
    sys: SldiSystem,
    sched: Schedule,
    lam,
    column: int | None = None,
    reps_for_inf: int = 3,
) -> Dater:
    """A consistent intermittently periodic trajectory at the given periods.

    Undoes the per-group rescaling of the analysis instance: the h-th
    periodic group is unrolled m_h times with step λ_h, and every later
    block is delayed by the accumulated (m_h − 1)·λ_h.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    inst, layout = intermittent_build(sys, sched)
    if len(lam) != inst.q:
        raise ValueError(f"need {inst.q} period values, got {len(lam)}")
    star = _star_or_raise(
        inst.at(lam), f"periods {tuple(lam)} are outside the admissible set"
    )
    xi = _pick_column(star, column).reshape(len(layout.modes), sys.n)
    rows = []
    shift = 0.0
    pos = len(sched.u[0])
    rows.extend(xi[:pos])
    for h, (v, m) in enumerate(sched.vm):
        reps = reps_for_inf if m is None else m
        block = xi[pos : pos + len(v)] + shift
        for j in range(reps):
            rows.extend(block + j * lam[h])
        shift += (reps - 1) * lam[h]
        pos += len(v)
        tail = sched.u[h + 1]
        rows.extend(xi[pos : pos + len(tail)] + shift)
        pos += len(tail)
    return Dater(np.vstack(rows))


# ---------------------------------------------------------------------------
# verification

@dataclass
class Violation:
    k: int  # 1-based step
    constraint: str
    event: int  # 1-based component
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def __str__(self) -> str:
        return (
            f"k={self.k} {self.constraint}[{self.event}]: "
            f"{self.lhs:g} > {self.rhs:g} (slack {self.slack:g})"
        )


@dataclass
class VerificationReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)


def _modes_for(sched: Schedule | list, K: int) -> list[str]:
    if not isinstance(sched, Schedule):
        modes = list(sched)
        if len(modes) != K:
            raise ValueError(f"schedule length {len(modes)} != dater length {K}")
        return modes
    if sched.infinite:
        reps = 1
        while len(sched.expand(reps)) < K:
            reps += 1
        return sched.expand(reps)[:K]
    modes = sched.expand()
    if len(modes) != K:
        raise ValueError(f"schedule length {len(modes)} != dater length {K}")
    return modes


def verify(
    sys: SldiSystem,
    sched: Schedule | list,
    dater: Dater,
    check_nondecreasing: bool = True,
    tol: float = EPS,
) -> VerificationReport:
    """Check every two-sided constraint of the schedule along the dater.

    The optional monotonicity check compares only steps that execute the
    same mode; times may well decrease across different modes.
    """
    modes = _modes_for(sched, dater.K)
    x = dater.times
    out: list[Violation] = []

    def check(k, kind, lhs, rhs):
        for i in np.flatnonzero(lhs > rhs + tol):
            out.append(Violation(k + 1, kind, int(i) + 1, float(lhs[i]), float(rhs[i])))

    for k, sym in enumerate(modes):
        m = sys.mode(sym)
        check(k, "A0·x(k) <= x(k)", mp.mat_vec(m.A0, x[k]), x[k])
        check(k, "x(k) <= B0 dual x(k)", x[k], mp.dual_mat_vec(m.B0, x[k]))
        if k + 1 < len(modes):
            check(k, "A1·x(k) <= x(k+1)", mp.mat_vec(m.A1, x[k]), x[k + 1])
            check(k, "x(k+1) <= B1 dual x(k)", x[k + 1], mp.dual_mat_vec(m.B1, x[k]))
    if check_nondecreasing:
        by_mode: dict[str, int] = {}
        for k, sym in enumerate(modes):
            if sym in by_mode:
                check(k, f"same-mode monotonicity vs k={by_mode[sym] + 1}",
                      x[by_mode[sym]], x[k])
            by_mode[sym] = k
    return VerificationReport(not out, out)


# ---------------------------------------------------------------------------
# tabular export

def export_rows(dater: Dater, sched: Schedule | list, events=None):
    """Rows (k, mode, event, name, time), ordered by step then event."""
    modes = _modes_for(sched, dater.K)
    events = list(events) if events else [str(i + 1) for i in range(dater.n)]
    for k in range(dater.K):
        for i in range(dater.n):
            yield (k + 1, modes[k], i + 1, events[i], dater.times[k, i])


def export_dater(dater: Dater, sched: Schedule | list, path, events=None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "mode", "event", "name", "time"])
        for row in export_rows(dater, sched, events):
            w.writerow(row)


def load_dater(path: str | Path) -> tuple[Dater, list[str]]:
    """Read back an exported trajectory (times plus the mode word)."""
    by_k: dict[int, dict[int, float]] = {}
    modes: dict[int, str] = {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            k = int(row["k"])
            by_k.setdefault(k, {})[int(row["event"])] = float(row["time"])
            modes[k] = row["mode"]
    if not by_k:
        raise ValueError("empty dater file")
    ks = sorted(by_k)
    n = max(max(d) for d in by_k.values())
    times = np.full((len(ks), n), np.nan)
    for r, k in enumerate(ks):
        for i, t in by_k[k].items():
            times[r, i - 1] = t
    return Dater(times), [modes[k] for k in ks]
