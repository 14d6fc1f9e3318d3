"""Shared brute-force oracles and random instance generators.

Everything here is deliberately independent of the library's fast paths:
paths and circuits are enumerated exhaustively so the oracles stay valid
even if the production algorithms are wrong.
"""

from __future__ import annotations

import itertools

import numpy as np

from sldi.maxplus import NEG_INF

INF = float("inf")


def random_rmax(rng, n, m=None, lo=-5, hi=5, density=0.6, integers=True):
    """Random Rmax matrix with -inf holes."""
    m = n if m is None else m
    if integers:
        vals = rng.randint(lo, hi + 1, size=(n, m)).astype(float)
    else:
        vals = rng.uniform(lo, hi, size=(n, m))
    mask = rng.rand(n, m) < density
    out = np.full((n, m), NEG_INF)
    out[mask] = vals[mask]
    return out


def simple_circuits(a):
    """All simple circuits of G(a) as node lists [v0, ..., v0]."""
    n = a.shape[0]
    out = []
    for size in range(1, n + 1):
        for nodes in itertools.permutations(range(n), size):
            if nodes[0] != min(nodes):
                continue  # canonical rotation only
            arcs = list(zip(nodes, nodes[1:] + (nodes[0],)))
            if all(a[i, j] > NEG_INF for j, i in arcs):
                out.append(list(nodes) + [nodes[0]])
    return out


def circuit_weight(a, cyc):
    return sum(a[cyc[i + 1], cyc[i]] for i in range(len(cyc) - 1))


def brute_mcm(a):
    """Max mean over exhaustively enumerated simple circuits."""
    best = NEG_INF
    for cyc in simple_circuits(a):
        best = max(best, circuit_weight(a, cyc) / (len(cyc) - 1))
    return best


def brute_has_positive_circuit(a, tol=1e-9):
    return any(circuit_weight(a, c) > tol for c in simple_circuits(a))


def brute_star(a):
    """A* by enumerating simple paths; valid when G(a) has no positive circuit."""
    n = a.shape[0]
    out = np.full((n, n), NEG_INF)
    np.fill_diagonal(out, 0.0)
    for size in range(2, n + 1):
        for nodes in itertools.permutations(range(n), size):
            w = 0.0
            ok = True
            for j, i in zip(nodes, nodes[1:]):
                if a[i, j] == NEG_INF:
                    ok = False
                    break
                w += a[i, j]
            if ok:
                i, j = nodes[-1], nodes[0]
                out[i, j] = max(out[i, j], w)
    # direct arcs of length 1 are covered by size=2 above; self-loops <= 0
    # never beat the 0 identity term on the diagonal
    return out
