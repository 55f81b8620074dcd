"""Brute-force chain minimisation, used as an independent check of the closure.

:func:`simple_chain_minimum` enumerates every simple chain through a
subset-indexed table (each chain's cost is summed step by step along the
chain); :func:`enumerate_chains` walks all ordered intermediate subsets
explicitly and is only practical for a handful of points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .expand import chain_infimum

MAX_ORACLE_POINTS = 12


def simple_chain_minimum(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n > MAX_ORACLE_POINTS:
        raise ValueError(f"exhaustive chains over {n} points are out of reach")
    out = np.full((n, n), np.inf)
    for s in range(n):
        best = np.full((1 << n, n), np.inf)
        best[1 << s, s] = 0.0
        for mask in range(1 << n):
            if not mask >> s & 1:
                continue
            row = best[mask]
            if not np.isfinite(row).any():
                continue
            np.minimum(out[s], row, out=out[s])
            step = (row[:, None] + m).min(axis=0)
            for w in range(n):
                if not mask >> w & 1:
                    nxt = mask | 1 << w
                    if step[w] < best[nxt, w]:
                        best[nxt, w] = step[w]
    return out


def enumerate_chains(m: np.ndarray) -> np.ndarray:
    """Literal enumeration over all ordered sets of distinct relay points."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    out = np.zeros((n, n))
    for x, y in itertools.permutations(range(n), 2):
        others = [z for z in range(n) if z not in (x, y)]
        best = np.inf
        for k in range(len(others) + 1):
            for relay in itertools.permutations(others, k):
                chain = (x, *relay, y)
                cost = 0.0
                for a, b in zip(chain, chain[1:]):
                    cost += m[a, b]
                best = min(best, cost)
        out[x, y] = best
    return out


def random_net(rng: np.random.Generator, n: int) -> np.ndarray:
    """Symmetric positive matrix with zero diagonal; usually far from a metric."""
    a = rng.uniform(0.1, 10.0, size=(n, n))
    a = np.triu(a, 1)
    return a + a.T


@dataclass(frozen=True)
class OracleTrial:
    trial: int
    points: int
    max_abs_diff: float


def oracle_suite(trials: int = 50, max_points: int = 10, seed: int = 0, tol: float = 1e-12) -> tuple[bool, list[OracleTrial]]:
    rng = np.random.default_rng(seed)
    rows = []
    for t in range(trials):
        n = int(rng.integers(2, max_points + 1))
        m = random_net(rng, n)
        diff = float(np.max(np.abs(chain_infimum(m) - simple_chain_minimum(m))))
        rows.append(OracleTrial(t, n, diff))
    return all(r.max_abs_diff <= tol for r in rows), rows
