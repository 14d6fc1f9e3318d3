"""Systems of switched linear-dual inequalities and their inputs.

A mode is the quadruple (A0, A1, B0, B1); a system maps mode names to
quadruples of a common dimension.  P-time event graphs arrive either as
explicit mode matrices or as a place list (optionally with time tags for
strict initial conditions) that is converted on load.  Schedules are
parsed from expressions like ``init (P1 P1 P3 P2 P4)^2 (P2 P4 P1 P3 P3)^inf``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import maxplus as mp
from .maxplus import NEG_INF, POS_INF

INIT_MODE = "init"


# ---------------------------------------------------------------------------
# modes and systems

@dataclass(frozen=True)
class ModeMatrices:
    A0: np.ndarray
    A1: np.ndarray
    B0: np.ndarray
    B1: np.ndarray

    def __post_init__(self):
        n = mp._check_square(self.A0)
        for m in (self.A1, self.B0, self.B1):
            if m.shape != (n, n):
                raise ValueError("mode matrices must share one square dimension")
        mp.check_rmax(self.A0, "A0")
        mp.check_rmax(self.A1, "A1")
        mp.check_rmin(self.B0, "B0")
        mp.check_rmin(self.B1, "B1")

    @property
    def n(self) -> int:
        return self.A0.shape[0]


def unconstrained_mode(n: int) -> ModeMatrices:
    return ModeMatrices(
        mp.eps_matrix(n), mp.eps_matrix(n), mp.top_matrix(n), mp.top_matrix(n)
    )


def enforce_nondecreasing(m: ModeMatrices) -> ModeMatrices:
    """Fold the dater monotonicity requirement into A1 (A1 ← A1 ⊕ E)."""
    return ModeMatrices(m.A0, mp.mat_add(m.A1, mp.eye(m.n)), m.B0, m.B1)


@dataclass(frozen=True)
class SldiSystem:
    n: int
    modes: dict[str, ModeMatrices]

    def __post_init__(self):
        for name, m in self.modes.items():
            if m.n != self.n:
                raise ValueError(f"mode {name!r} has dimension {m.n}, system has {self.n}")

    def mode(self, name: str) -> ModeMatrices:
        try:
            return self.modes[name]
        except KeyError:
            raise KeyError(f"unknown mode {name!r}") from None

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(self.modes)


# ---------------------------------------------------------------------------
# P-time event graphs

@dataclass(frozen=True)
class Place:
    src: int  # upstream transition (0-based)
    dst: int  # downstream transition
    marking: int  # initial tokens, 0 or 1 (normal form)
    lower: float
    upper: float

    def __post_init__(self):
        if self.marking not in (0, 1):
            raise ValueError("places must carry 0 or 1 initial tokens (normal form)")
        if not (0 <= self.lower <= self.upper):
            raise ValueError(f"bad holding window [{self.lower}, {self.upper}]")


@dataclass(frozen=True)
class Pteg:
    n: int
    places: tuple[Place, ...]
    rho: dict[tuple[int, int], float] | None = None  # time tags, keyed (dst, src)

    def __post_init__(self):
        for p in self.places:
            if not (0 <= p.src < self.n and 0 <= p.dst < self.n):
                raise ValueError("place endpoints out of range")
        if self.rho is not None:
            for (i, j), tag in self.rho.items():
                if tag < 0:
                    raise ValueError("time tags must be nonnegative")
                if not any(
                    p.dst == i and p.src == j and p.marking == 1 for p in self.places
                ):
                    raise ValueError(f"time tag on ({i}, {j}) without a marked place")

    @property
    def strict(self) -> bool:
        return self.rho is not None


def pteg_to_mode(p: Pteg) -> ModeMatrices:
    """Characteristic matrices: place (j→i, marking μ) sets A^μ_ij, B^μ_ij."""
    n = p.n
    a = [mp.eps_matrix(n), mp.eps_matrix(n)]
    b = [mp.top_matrix(n), mp.top_matrix(n)]
    seen = set()
    for pl in p.places:
        key = (pl.dst, pl.src, pl.marking)
        if key in seen:
            raise ValueError(
                f"duplicate place between t{pl.src + 1} and t{pl.dst + 1} "
                f"with marking {pl.marking}"
            )
        seen.add(key)
        a[pl.marking][pl.dst, pl.src] = pl.lower
        b[pl.marking][pl.dst, pl.src] = pl.upper
    return ModeMatrices(a[0], a[1], b[0], b[1])


def strict_deltas(p: Pteg) -> tuple[np.ndarray, np.ndarray]:
    """First-firing window matrices from the time tags of initial tokens."""
    if not p.strict:
        raise ValueError("P-TEG carries no time tags")
    m = pteg_to_mode(p)
    n = p.n
    lower = mp.eps_matrix(n)
    upper = mp.top_matrix(n)
    for pl in p.places:
        if pl.marking != 1:
            continue
        tag = p.rho.get((pl.dst, pl.src), 0.0)
        if m.A1[pl.dst, pl.src] > NEG_INF:
            lower[pl.dst, pl.src] = m.A1[pl.dst, pl.src] - tag
        if m.B1[pl.dst, pl.src] < POS_INF:
            upper[pl.dst, pl.src] = m.B1[pl.dst, pl.src] - tag
    return lower, upper


def strict_to_sldi(p: Pteg) -> tuple[SldiSystem, "Schedule"]:
    """Encode strict initial conditions as an extra first mode.

    The auxiliary mode pins all first-step events to a common instant
    (all-zero A0 = B0) and releases the real dynamics through the time
    tag windows; the original behaviour is the schedule init·A^inf.
    """
    lower, upper = strict_deltas(p)
    n = p.n
    init = ModeMatrices(mp.zeros(n), lower, mp.zeros(n), upper)
    sys = SldiSystem(n, {INIT_MODE: init, "A": pteg_to_mode(p)})
    return sys, parse_schedule(f"{INIT_MODE} (A)^inf", sys.alphabet)


# ---------------------------------------------------------------------------
# schedules

@dataclass(frozen=True)
class Schedule:
    """Factorized schedule u0 v1^m1 u1 ... vq^mq uq.

    ``m = None`` stands for an infinite final exponent; the factorization
    is taken verbatim from the input expression and never rewritten.
    """

    u: tuple[tuple[str, ...], ...]
    vm: tuple[tuple[tuple[str, ...], int | None], ...]

    def __post_init__(self):
        if len(self.u) != len(self.vm) + 1:
            raise ValueError("need one transient word around every periodic group")
        for h, (v, m) in enumerate(self.vm):
            if not v:
                raise ValueError("periodic groups cannot be empty")
            final = h == len(self.vm) - 1
            if m is None:
                if not final or self.u[-1]:
                    raise ValueError("an infinite exponent must end the schedule")
            elif m < 1 or (not final or self.u[-1]) and m < 2:
                raise ValueError(f"non-final exponents must be >= 2, got {m}")

    @property
    def q(self) -> int:
        return len(self.vm)

    @property
    def kind(self) -> str:
        if self.q == 0:
            return "finite"
        if self.q == 1 and not any(self.u):
            return "periodic"
        return "intermittent"

    @property
    def infinite(self) -> bool:
        return bool(self.vm) and self.vm[-1][1] is None

    def symbols(self):
        for word in self.u:
            yield from word
        for v, _ in self.vm:
            yield from v

    def expand(self, reps_for_inf: int = 1) -> list[str]:
        """The concrete mode word, unrolling ^inf a given number of times."""
        out: list[str] = list(self.u[0])
        for h, (v, m) in enumerate(self.vm):
            out.extend(v * (reps_for_inf if m is None else m))
            out.extend(self.u[h + 1])
        return out

    def render(self) -> str:
        parts = [" ".join(self.u[0])] if self.u[0] else []
        for h, (v, m) in enumerate(self.vm):
            parts.append(f"({' '.join(v)})^{'inf' if m is None else m}")
            if self.u[h + 1]:
                parts.append(" ".join(self.u[h + 1]))
        return " ".join(parts)


def finite_schedule(word) -> Schedule:
    return Schedule((tuple(word),), ())


def periodic_schedule(v, m: int | None = None) -> Schedule:
    return Schedule(((), ()), (((tuple(v)), m),))


_TOKEN = re.compile(r"\(|\)|\^|[^\s()^]+")


class ScheduleSyntaxError(ValueError):
    pass


def parse_schedule(text: str, alphabet) -> Schedule:
    """Parse  WORD? ( '(' WORD ')' '^' (INT|'inf') WORD? )*  into a Schedule."""
    alphabet = set(alphabet)
    toks = _TOKEN.findall(text)
    pos = 0

    def word() -> tuple[str, ...]:
        nonlocal pos
        out = []
        while pos < len(toks) and toks[pos] not in "()^":
            sym = toks[pos]
            if sym not in alphabet:
                raise ScheduleSyntaxError(f"unknown mode {sym!r}")
            out.append(sym)
            pos += 1
        return tuple(out)

    u = [word()]
    vm = []
    while pos < len(toks):
        if toks[pos] != "(":
            raise ScheduleSyntaxError(f"unexpected {toks[pos]!r}")
        pos += 1
        v = word()
        if not v:
            raise ScheduleSyntaxError("empty group")
        if pos >= len(toks) or toks[pos] != ")":
            raise ScheduleSyntaxError("missing ')'")
        pos += 1
        if pos >= len(toks) or toks[pos] != "^":
            raise ScheduleSyntaxError("groups need an explicit exponent")
        pos += 1
        if pos >= len(toks):
            raise ScheduleSyntaxError("missing exponent")
        exp_tok = toks[pos]
        pos += 1
        if exp_tok == "inf":
            m: int | None = None
        else:
            try:
                m = int(exp_tok)
            except ValueError:
                raise ScheduleSyntaxError(f"bad exponent {exp_tok!r}") from None
        vm.append((v, m))
        u.append(word())
        if m is None and (pos < len(toks) or u[-1]):
            raise ScheduleSyntaxError("nothing may follow a ^inf group")
    if len(u) == 1 and not u[0]:
        raise ScheduleSyntaxError("empty schedule")
    try:
        return Schedule(tuple(u), tuple(vm))
    except ValueError as exc:
        raise ScheduleSyntaxError(str(exc)) from None


# ---------------------------------------------------------------------------
# the JSON model format

@dataclass
class Model:
    system: SldiSystem
    events: list[str] = field(default_factory=list)
    pteg: Pteg | None = None
    schedule_hint: Schedule | None = None  # implied init·A^inf for strict inputs

    @property
    def n(self) -> int:
        return self.system.n


def _num(v, kind: str) -> float:
    if v == "-inf":
        return NEG_INF
    if v == "inf":
        return POS_INF
    if isinstance(v, (int, float)):
        return float(v)
    raise ValueError(f"bad {kind} entry {v!r}")


def _matrix(rows, n: int, kind: str) -> np.ndarray:
    a = np.array([[_num(v, kind) for v in row] for row in rows])
    if a.shape != (n, n):
        raise ValueError(f"{kind} must be {n}x{n}, got {a.shape}")
    return a


def _entry(v: float):
    if v == NEG_INF:
        return "-inf"
    if v == POS_INF:
        return "inf"
    return v if v != int(v) else int(v)


def _matrix_json(a: np.ndarray):
    return [[_entry(float(v)) for v in row] for row in a]


def load_model(path: str | Path) -> Model:
    with open(path) as fh:
        doc = json.load(fh)
    n = int(doc["n"])
    events = [str(e) for e in doc.get("events", [])] or [str(i + 1) for i in range(n)]
    if len(events) != n:
        raise ValueError("events list does not match dimension")

    if "pteg" in doc:
        if "modes" in doc:
            raise ValueError("give either mode matrices or a P-TEG, not both")
        places = tuple(
            Place(
                int(p["from"]) - 1,
                int(p["to"]) - 1,
                int(p.get("marking", 0)),
                _num(p["lower"], "place"),
                _num(p.get("upper", "inf"), "place"),
            )
            for p in doc["pteg"]
        )
        rho = None
        if "strict" in doc:
            rho = {
                (int(i) - 1, int(j) - 1): float(tag)
                for i, j, tag in doc["strict"]["rho"]
            }
        pteg = Pteg(n, places, rho)
        if pteg.strict:
            system, hint = strict_to_sldi(pteg)
            return Model(system, events, pteg, hint)
        return Model(SldiSystem(n, {"A": pteg_to_mode(pteg)}), events, pteg)

    modes = {}
    for name, mats in doc["modes"].items():
        modes[name] = ModeMatrices(
            _matrix(mats["A0"], n, "A0"),
            _matrix(mats["A1"], n, "A1"),
            _matrix(mats["B0"], n, "B0"),
            _matrix(mats["B1"], n, "B1"),
        )
    return Model(SldiSystem(n, modes), events)


def save_model(model: Model, path: str | Path) -> None:
    doc: dict = {"n": model.n, "events": model.events, "modes": {}}
    for name, m in model.system.modes.items():
        doc["modes"][name] = {
            "A0": _matrix_json(m.A0),
            "A1": _matrix_json(m.A1),
            "B0": _matrix_json(m.B0),
            "B1": _matrix_json(m.B1),
        }
    Path(path).write_text(json.dumps(doc, indent=1))
