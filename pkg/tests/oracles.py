"""Independent brute-force oracles used to freeze expected test values.

Everything here enumerates exhaustively with no pruning and no shared code
with the solvers under test (plain Python loops over numpy matrices only).
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np


def set_partitions(n: int, max_parts: int):
    """All partitions of range(n) into at most max_parts blocks."""

    def recurse(i: int, blocks: list[list[int]]):
        if i == n:
            yield [tuple(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from recurse(i + 1, blocks)
            b.pop()
        if len(blocks) < max_parts:
            blocks.append([i])
            yield from recurse(i + 1, blocks)
            blocks.pop()

    yield from recurse(0, [])


def partition_worst_diameter(dist: np.ndarray, blocks) -> float:
    worst = 0.0
    for block in blocks:
        for a in range(len(block)):
            for b in range(a + 1, len(block)):
                worst = max(worst, float(dist[block[a], block[b]]))
    return worst


def brute_minimax_partition(dist: np.ndarray, k: int) -> float:
    n = dist.shape[0]
    best = float("inf")
    for blocks in set_partitions(n, min(k, n)):
        best = min(best, partition_worst_diameter(dist, blocks))
    return best


def brute_kcenter(cross: np.ndarray, k: int) -> float:
    n_pool = cross.shape[1]
    k = min(k, n_pool)
    best = float("inf")
    for combo in combinations(range(n_pool), k):
        radius = 0.0
        for i in range(cross.shape[0]):
            radius = max(radius, min(float(cross[i, c]) for c in combo))
        best = min(best, radius)
    return best


def brute_max_min_separation(dist: np.ndarray, size: int) -> float:
    n = dist.shape[0]
    best = 0.0
    for combo in combinations(range(n), size):
        lo = float("inf")
        for a in range(len(combo)):
            for b in range(a + 1, len(combo)):
                lo = min(lo, float(dist[combo[a], combo[b]]))
        best = max(best, lo)
    return best


def pointwise_norm(diff: np.ndarray, tag: str) -> float:
    if tag == "l1":
        return float(np.abs(diff).sum())
    if tag == "l2":
        return float(np.sqrt((diff * diff).sum()))
    return float(np.abs(diff).max())


def family_conflict_matrix(values: np.ndarray, tag: str) -> np.ndarray:
    """values: (n_funcs, n_points, dim); max-over-functions pseudometric."""
    _, n_pts, _ = values.shape
    out = np.zeros((n_pts, n_pts))
    for x in range(n_pts):
        for y in range(n_pts):
            out[x, y] = max(
                pointwise_norm(values[f, x] - values[f, y], tag)
                for f in range(values.shape[0])
            )
    return out


def brute_omega(values: np.ndarray, tag: str, n_parts: int) -> float:
    """Min over domain partitions of max over (f, part) of image diameter."""
    n_pts = values.shape[1]
    best = float("inf")
    for blocks in set_partitions(n_pts, min(n_parts, n_pts)):
        worst = 0.0
        for f in range(values.shape[0]):
            for block in blocks:
                for a in range(len(block)):
                    for b in range(a + 1, len(block)):
                        worst = max(
                            worst,
                            pointwise_norm(values[f, block[a]] - values[f, block[b]], tag),
                        )
        best = min(best, worst)
    return best


def brute_omega_ext(
    values: np.ndarray, pool_values: np.ndarray, tag: str, n_parts: int, m_funcs: int
) -> float:
    """Min over (phi subset, assignment, partition) of the corrected omega."""
    n_funcs = values.shape[0]
    n_pool = pool_values.shape[0]
    m = min(m_funcs, n_pool)
    best = float("inf")
    for phi_combo in combinations(range(n_pool), m):
        for assign in product(range(m), repeat=n_funcs):
            corrected = np.stack(
                [values[f] - pool_values[phi_combo[assign[f]]] for f in range(n_funcs)]
            )
            best = min(best, brute_omega(corrected, tag, n_parts))
    return best


def brute_sup_dist(values_f: np.ndarray, values_g: np.ndarray, tag: str) -> float:
    return max(
        pointwise_norm(values_f[p] - values_g[p], tag) for p in range(values_f.shape[0])
    )
