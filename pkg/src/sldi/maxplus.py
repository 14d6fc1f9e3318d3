"""Extended-real max-plus / min-plus matrix algebra.

Matrices are plain 2-D numpy float64 arrays over the extended reals.
``-inf`` is the max-plus zero, ``+inf`` the min-plus zero; a matrix over
Rmax contains no ``+inf`` entry, one over Rmin no ``-inf`` entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

NEG_INF = float("-inf")
POS_INF = float("inf")

#: absolute tolerance for "positive circuit" and interval-endpoint tests
EPS = 1e-9

# chunk size (elements) for broadcasted matrix products
_CHUNK = 1 << 22


# ---------------------------------------------------------------------------
# scalar operations

def oplus(a: float, b: float) -> float:
    return max(a, b)


def otimes(a: float, b: float) -> float:
    """Max-plus product: a + b, with -inf absorbing (even against +inf)."""
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def dual_oplus(a: float, b: float) -> float:
    return min(a, b)


def dual_otimes(a: float, b: float) -> float:
    """Min-plus product: a + b, with +inf absorbing (even against -inf)."""
    if a == POS_INF or b == POS_INF:
        return POS_INF
    return a + b


# ---------------------------------------------------------------------------
# construction and validation

def as_matrix(entries) -> np.ndarray:
    a = np.asarray(entries, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def eps_matrix(rows: int, cols: int | None = None) -> np.ndarray:
    """The all -inf matrix (neutral element of oplus)."""
    return np.full((rows, cols if cols is not None else rows), NEG_INF)


def top_matrix(rows: int, cols: int | None = None) -> np.ndarray:
    """The all +inf matrix (neutral element of dual_oplus)."""
    return np.full((rows, cols if cols is not None else rows), POS_INF)


def eye(n: int) -> np.ndarray:
    """Max-plus identity: 0 on the diagonal, -inf elsewhere."""
    a = eps_matrix(n, n)
    np.fill_diagonal(a, 0.0)
    return a


def zeros(rows: int, cols: int | None = None) -> np.ndarray:
    """The all-zero matrix (used to pin all events of a step together)."""
    return np.zeros((rows, cols if cols is not None else rows))


def check_rmax(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    if np.isposinf(a).any():
        raise ValueError(f"{what} must be over Rmax (contains +inf)")
    return a


def check_rmin(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    if np.isneginf(a).any():
        raise ValueError(f"{what} must be over Rmin (contains -inf)")
    return a


def _check_square(a: np.ndarray) -> int:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a.shape[0]


# ---------------------------------------------------------------------------
# matrix operations

def mat_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return np.maximum(a, b)


def dual_mat_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return np.minimum(a, b)


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a ⊗ b)_ih = max_k a_ik + b_kh, with -inf absorbing."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimensions disagree: {a.shape} vs {b.shape}")
    m, k = a.shape
    p = b.shape[1]
    out = np.empty((m, p))
    step = max(1, _CHUNK // max(1, k * p))
    with np.errstate(invalid="ignore"):
        for r in range(0, m, step):
            blk = a[r : r + step, :, None] + b[None, :, :]
            bad = np.isnan(blk)
            if bad.any():
                blk[bad] = NEG_INF
            out[r : r + step] = blk.max(axis=1) if k else NEG_INF
    return out


def dual_mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a ⊛ b)_ih = min_k a_ik + b_kh, with +inf absorbing."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimensions disagree: {a.shape} vs {b.shape}")
    m, k = a.shape
    p = b.shape[1]
    out = np.empty((m, p))
    step = max(1, _CHUNK // max(1, k * p))
    with np.errstate(invalid="ignore"):
        for r in range(0, m, step):
            blk = a[r : r + step, :, None] + b[None, :, :]
            bad = np.isnan(blk)
            if bad.any():
                blk[bad] = POS_INF
            out[r : r + step] = blk.min(axis=1) if k else POS_INF
    return out


def mat_vec(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """a ⊗ x for a vector x (Rmax inputs, no +inf)."""
    return (a + x[None, :]).max(axis=1)


def dual_mat_vec(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """a ⊛ x for a vector x (Rmin inputs, no -inf)."""
    with np.errstate(invalid="ignore"):
        s = a + x[None, :]
    bad = np.isnan(s)
    if bad.any():
        s[bad] = POS_INF
    return s.min(axis=1)


def scalar_mat_mul(lam: float, a: np.ndarray) -> np.ndarray:
    """λ ⊗ A entrywise; -inf absorbs when λ is infinite."""
    if lam == NEG_INF:
        return eps_matrix(*a.shape)
    with np.errstate(invalid="ignore"):
        out = a + lam
    bad = np.isnan(out)
    if bad.any():
        out[bad] = NEG_INF
    return out


def scalar_dual_mat_mul(lam: float, a: np.ndarray) -> np.ndarray:
    """λ ⊛ A entrywise; +inf absorbs when λ is infinite."""
    if lam == POS_INF:
        return top_matrix(*a.shape)
    with np.errstate(invalid="ignore"):
        out = a + lam
    bad = np.isnan(out)
    if bad.any():
        out[bad] = POS_INF
    return out


def sharp(a: np.ndarray) -> np.ndarray:
    """A♯ = -Aᵀ; swaps the two infinities."""
    return (-a.T).copy()


def trace(a: np.ndarray) -> float:
    _check_square(a)
    return float(np.diag(a).max()) if a.shape[0] else NEG_INF


def mat_pow(a: np.ndarray, r: int) -> np.ndarray:
    n = _check_square(a)
    if r < 0:
        raise ValueError("negative matrix power")
    out = eye(n)
    for _ in range(r):
        out = mat_mul(out, a)
    return out


# ---------------------------------------------------------------------------
# Kleene star with positive-circuit detection

@dataclass(frozen=True)
class GammaVerdict:
    """Outcome of the no-positive-circuit test on a precedence graph.

    ``witness`` is a closed walk [v0, v1, ..., v0] (0-based nodes) of
    weight ``witness_weight`` > EPS when ``in_gamma`` is False.
    """

    in_gamma: bool
    witness: list[int] | None = None
    witness_weight: float | None = None


def _positive_circuit(a: np.ndarray) -> tuple[list[int], float]:
    """Extract a positive-weight circuit from G(a), assuming one exists.

    Longest-path Bellman-Ford from an implicit supersource; a relaxation
    still firing on the n-th pass pinpoints the circuit.
    """
    n = a.shape[0]
    d = np.zeros(n)
    parent = np.full(n, -1, dtype=int)
    last = -1
    for _ in range(n + 1):
        s = a + d[None, :]
        best = s.max(axis=1)
        improved = best > d + 1e-12
        if not improved.any():
            last = -1
            break
        arg = s.argmax(axis=1)
        d = np.where(improved, best, d)
        parent[improved] = arg[improved]
        last = int(np.flatnonzero(improved)[0])
    if last < 0:
        raise RuntimeError("no positive circuit found")  # pragma: no cover
    # walk back n steps to land on the circuit, then trace it out
    v = last
    for _ in range(n):
        v = int(parent[v])
    cyc = [v]
    u = int(parent[v])
    while u != v:
        cyc.append(u)
        u = int(parent[u])
    cyc.append(v)
    cyc.reverse()  # parent edges point backwards along the walk
    weight = sum(a[cyc[i + 1], cyc[i]] for i in range(len(cyc) - 1))
    return cyc, float(weight)


def kleene_star(a: np.ndarray, tol: float = EPS) -> tuple[GammaVerdict, np.ndarray | None]:
    """Floyd-Warshall closure A* = E ⊕ A ⊕ A² ⊕ ...

    Returns (verdict, star). When G(a) has a circuit of weight > tol the
    star is None and the verdict carries a witness circuit; the
    relaxation aborts early on the first positive diagonal.
    """
    n = _check_square(check_rmax(a))
    d = a.copy()
    for k in range(n):
        if d[k, k] > tol:
            cyc, w = _positive_circuit(a)
            return GammaVerdict(False, cyc, w), None
        d = np.maximum(d, d[:, k : k + 1] + d[k : k + 1, :])
    if n and np.diag(d).max() > tol:
        cyc, w = _positive_circuit(a)
        return GammaVerdict(False, cyc, w), None
    return GammaVerdict(True), np.maximum(d, eye(n))


def star(a: np.ndarray, tol: float = EPS) -> np.ndarray:
    """A*, raising if G(a) has a positive circuit."""
    verdict, s = kleene_star(a, tol)
    if not verdict.in_gamma:
        raise PositiveCircuitError(verdict)
    return s


class PositiveCircuitError(ValueError):
    def __init__(self, verdict: GammaVerdict):
        self.verdict = verdict
        super().__init__(
            f"positive circuit {verdict.witness} of weight {verdict.witness_weight}"
        )


def in_gamma(a: np.ndarray, tol: float = EPS) -> bool:
    return kleene_star(a, tol)[0].in_gamma


# ---------------------------------------------------------------------------
# maximum circuit mean (Karp, per strongly connected component)

def _karp_scc(a: np.ndarray) -> float:
    """Karp's minimum-mean formula, max-plus flavour, on one SCC."""
    m = a.shape[0]
    f = np.full((m + 1, m), NEG_INF)
    f[0, 0] = 0.0
    for k in range(1, m + 1):
        f[k] = mat_vec(a, f[k - 1])
    best = NEG_INF
    for v in range(m):
        if f[m, v] == NEG_INF:
            continue
        ratios = [
            (f[m, v] - f[k, v]) / (m - k)
            for k in range(m)
            if f[k, v] > NEG_INF
        ]
        best = max(best, min(ratios))
    return best


def mcm(a: np.ndarray) -> float:
    """Maximum circuit mean of G(a); -inf when the graph is acyclic.

    Agrees with the trace formula max_k tr(A^k)/k but runs Karp per
    strongly connected component.
    """
    n = _check_square(check_rmax(a))
    if n == 0:
        return NEG_INF
    finite = np.isfinite(a) | np.isposinf(a)
    ncomp, labels = connected_components(
        csr_matrix(finite.T), directed=True, connection="strong"
    )
    best = NEG_INF
    for c in range(ncomp):
        nodes = np.flatnonzero(labels == c)
        if len(nodes) == 1 and a[nodes[0], nodes[0]] == NEG_INF:
            continue  # isolated node, no circuit
        sub = a[np.ix_(nodes, nodes)]
        best = max(best, _karp_scc(sub))
    return best
