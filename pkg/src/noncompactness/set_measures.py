"""Budget-constrained combinatorial measures of noncompactness on point sets.

Three budgeted surrogates of the classical measures:

* ``alpha_budget``  - minimax-diameter partition into at most k parts
  (Kuratowski-type).  Exact values come from a threshold search over the
  finite sorted list of pairwise distances with a graph-coloring decision
  oracle: parts of diameter <= eps exist iff the graph whose edges join
  pairs at distance > eps admits a proper k-coloring.
* ``gamma_budget``  - k-center with centers restricted to a declared pool
  (Hausdorff-type); exact by enumeration of k-subsets of the pool.
* ``beta_sep``      - maximum over (k+1)-subsets of the minimum pairwise
  distance (Istratescu-type); exact by pruned subset enumeration.

Every true infimum is 0 on finite data, so the budget is the only
meaningful control; all three are nonincreasing in it.  Witnesses are
canonical: lexicographically first among optima, never schedule-dependent.
The matrix-level solvers double as the entry point for precomputed metrics.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Literal, Sequence

import numpy as np

from .core import PointSet, cross_distances, distance_matrix
from .errors import CapacityError, InputError, UndefinedBudgetError
from .util import comb_count

DEFAULT_ALPHA_EXACT_CAP = 15
DEFAULT_COMB_CAP = 10**6

Kind = Literal["exact", "upper", "lower"]
Mode = Literal["exact", "heuristic", "upper", "lower"]


@dataclass(frozen=True)
class Partition:
    """Labeled partition of ``range(n)``; parts ordered by smallest member."""

    parts: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_labels(labels: Sequence[int]) -> "Partition":
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        parts = sorted((tuple(sorted(g)) for g in groups.values()), key=lambda p: p[0])
        return Partition(tuple(parts))

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    def labels(self, n: int) -> list[int]:
        out = [-1] * n
        for pi, part in enumerate(self.parts):
            for i in part:
                out[i] = pi
        return out

    def to_dict(self) -> dict:
        return {"parts": [list(p) for p in self.parts]}


@dataclass(frozen=True)
class CenterChoice:
    """Chosen pool indices plus a nearest-center assignment per point."""

    centers: tuple[int, ...]
    assignment: tuple[int, ...]  # per point: position within ``centers``

    def to_dict(self) -> dict:
        return {"centers": list(self.centers), "assignment": list(self.assignment)}


@dataclass(frozen=True)
class Subset:
    """Index subset certifying a separation lower bound."""

    indices: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"indices": list(self.indices)}


@dataclass(frozen=True)
class BudgetedValue:
    """Computed quantity: value, bound kind and the certifying witness."""

    value: float
    kind: Kind
    witness: object | None = None


def _check_budget(k: int, name: str = "k") -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InputError(f"budget {name} must be a positive integer, got {k!r}")


def _normalize_mode(mode: Mode, heuristic_kind: Kind) -> Kind:
    if mode == "exact":
        return "exact"
    if mode == "heuristic":
        return heuristic_kind
    if mode in ("upper", "lower"):
        return mode
    raise InputError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# graph coloring machinery (decision oracle for the threshold search)
# ---------------------------------------------------------------------------


def _threshold_graph(dist: np.ndarray, eps: float) -> np.ndarray:
    """Boolean adjacency: edges join pairs at distance strictly above eps."""
    g = dist > eps
    np.fill_diagonal(g, False)
    return g

def _adjacency_sets(g: np.ndarray) -> list[set[int]]:
    return [set(np.nonzero(row)[0].tolist()) for row in g]


def _bipartite_labels(g: np.ndarray) -> list[int] | None:
    """Lex-first proper 2-coloring (BFS parity, lowest-index roots), or None.

    The parity coloring is forced per component, so checking it for
    monochromatic edges decides 2-colorability in polynomial time.
    """
    n = g.shape[0]
    colors = np.full(n, -1, dtype=int)
    for root in range(n):
        if colors[root] != -1:
            continue
        colors[root] = 0
        frontier = np.zeros(n, dtype=bool)
        frontier[root] = True
        parity = 0
        while frontier.any():
            nxt = g[frontier].any(axis=0) & (colors == -1)
            colors[nxt] = 1 - parity
            frontier = nxt
            parity ^= 1
    if np.any(g & (colors[:, None] == colors[None, :])):
        return None
    return colors.tolist()


def _greedy_clique(adj: list[set[int]]) -> list[int]:
    """Greedy max clique, best over all seeds; a chromatic lower bound."""
    n = len(adj)
    best: list[int] = []
    order = sorted(range(n), key=lambda v: (-len(adj[v]), v))
    for seed in order:
        clique = [seed]
        cands = sorted(adj[seed])
        while cands:
            v = max(cands, key=lambda u: (len(adj[u].intersection(cands)), -u))
            clique.append(v)
            cands = [u for u in cands if u in adj[v]]
        if len(clique) > len(best):
            best = sorted(clique)
    return best


def _dsatur_coloring(adj: list[set[int]]) -> list[int]:
    """Greedy DSATUR coloring; number of colors used is an upper bound."""
    n = len(adj)
    colors = [-1] * n
    neighbor_colors: list[set[int]] = [set() for _ in range(n)]
    for _ in range(n):
        v = max(
            (u for u in range(n) if colors[u] == -1),
            key=lambda u: (len(neighbor_colors[u]), len(adj[u]), -u),
        )
        c = 0
        while c in neighbor_colors[v]:
            c += 1
        colors[v] = c
        for u in adj[v]:
            if colors[u] == -1:
                neighbor_colors[u].add(c)
    return colors


def _bb_colorable(adj: list[set[int]], k: int) -> bool:
    """DSATUR-ordered branch and bound deciding existence of a <=k-coloring."""
    n = len(adj)
    colors = [-1] * n
    neighbor_colors: list[set[int]] = [set() for _ in range(n)]

    def recurse(assigned: int, used: int) -> bool:
        if assigned == n:
            return True
        v = max(
            (u for u in range(n) if colors[u] == -1),
            key=lambda u: (len(neighbor_colors[u]), len(adj[u]), -u),
        )
        # symmetry break: at most one fresh color may be opened
        limit = min(used + 1, k)
        for c in range(limit):
            if c in neighbor_colors[v]:
                continue
            colors[v] = c
            touched = []
            for u in adj[v]:
                if colors[u] == -1 and c not in neighbor_colors[u]:
                    neighbor_colors[u].add(c)
                    touched.append(u)
            if recurse(assigned + 1, max(used, c + 1)):
                return True
            colors[v] = -1
            for u in touched:
                neighbor_colors[u].discard(c)
        return False

    return recurse(0, 0)


def _k_colorable(g: np.ndarray, k: int) -> bool:
    if not g.any():
        return True
    if k == 1:
        return False
    if k == 2:
        return _bipartite_labels(g) is not None
    adj = _adjacency_sets(g)
    if len(_greedy_clique(adj)) > k:
        return False
    if max(_dsatur_coloring(adj)) + 1 <= k:
        return True
    return _bb_colorable(adj, k)


def _lex_first_coloring(g: np.ndarray, k: int) -> list[int] | None:
    """Lexicographically first proper <=k-coloring in restricted growth form."""
    n = g.shape[0]
    if not g.any():
        return [0] * n
    if k == 2:
        return _bipartite_labels(g)
    adj = _adjacency_sets(g)
    colors = [-1] * n

    def recurse(v: int, used: int) -> bool:
        if v == n:
            return True
        for c in range(min(used + 1, k)):
            if any(colors[u] == c for u in adj[v] if u < v):
                continue
            colors[v] = c
            if recurse(v + 1, max(used, c + 1)):
                return True
            colors[v] = -1
        return False

    return colors if recurse(0, 0) else None


# ---------------------------------------------------------------------------
# matrix-level solvers (entry point for precomputed distance matrices)
# ---------------------------------------------------------------------------


def check_distance_matrix(dist: np.ndarray) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or dist.shape[0] == 0:
        raise InputError(f"distance matrix must be square and nonempty, got {dist.shape}")
    if not np.all(np.isfinite(dist)):
        raise InputError("distance matrix entries must be finite")
    return dist


def minimax_diameter_partition(
    dist: np.ndarray,
    k: int,
    mode: Mode = "exact",
    exact_cap: int | None = None,
) -> BudgetedValue:
    """Min over partitions into <= k parts of the max within-part distance.

    Works for any pseudometric matrix.  Exact mode binary-searches the sorted
    distinct distances; feasibility at each threshold is a coloring decision.
    """
    dist = check_distance_matrix(dist)
    _check_budget(k)
    n = dist.shape[0]
    kind = _normalize_mode(mode, "upper")

    # shortcut budgets are solved exactly no matter which mode was requested
    if k >= n:
        parts = Partition(tuple((i,) for i in range(n)))
        return BudgetedValue(0.0, "exact", parts)
    if k == 1:
        return BudgetedValue(float(dist.max()), "exact", Partition((tuple(range(n)),)))

    if kind == "exact":
        cap = DEFAULT_ALPHA_EXACT_CAP if exact_cap is None else exact_cap
        if k >= 3 and n > cap:
            # k = 2 stays polynomial (bipartiteness), so the cap gates only
            # budgets where branch-and-bound coloring may engage
            raise CapacityError(f"exact partition solve needs n <= {cap}, got {n}")
        candidates = np.unique(np.concatenate([[0.0], dist[np.triu_indices(n, 1)]]))
        lo, hi = 0, len(candidates) - 1
        # feasibility is monotone in the threshold
        while lo < hi:
            mid = (lo + hi) // 2
            if _k_colorable(_threshold_graph(dist, candidates[mid]), k):
                hi = mid
            else:
                lo = mid + 1
        eps = float(candidates[lo])
        labels = _lex_first_coloring(_threshold_graph(dist, eps), k)
        assert labels is not None
        return BudgetedValue(eps, "exact", Partition.from_labels(labels))

    if kind == "upper":
        labels = _gonzalez_partition(dist, k)
        labels = _local_move_refine(dist, labels, k)
        part = Partition.from_labels(labels)
        return BudgetedValue(_partition_value(dist, part), "upper", part)

    sub = _greedy_dispersion(dist, k + 1)
    val = _min_pairwise(dist, sub) if len(sub) == k + 1 else 0.0
    return BudgetedValue(val, "lower", Subset(tuple(sub)))


def _partition_value(dist: np.ndarray, part: Partition) -> float:
    worst = 0.0
    for block in part.parts:
        for a, i in enumerate(block):
            for j in block[a + 1 :]:
                worst = max(worst, float(dist[i, j]))
    return worst


def _gonzalez_partition(dist: np.ndarray, k: int) -> list[int]:
    """Farthest-first seeding: k seeds, points join the nearest seed."""
    n = dist.shape[0]
    seeds = [0]
    while len(seeds) < k:
        gap = dist[:, seeds].min(axis=1)
        nxt = int(gap.argmax())
        if gap[nxt] == 0.0:
            break
        seeds.append(nxt)
    labels = [int(dist[i, seeds].argmin()) for i in range(n)]
    return labels


def _local_move_refine(dist: np.ndarray, labels: list[int], k: int, passes: int = 4) -> list[int]:
    """Move single points between parts while the worst diameter improves."""
    n = dist.shape[0]
    labels = list(labels)

    def value(labs: list[int]) -> float:
        worst = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                if labs[i] == labs[j]:
                    worst = max(worst, float(dist[i, j]))
        return worst

    best = value(labels)
    for _ in range(passes):
        improved = False
        for i in range(n):
            orig = labels[i]
            for c in range(k):
                if c == orig:
                    continue
                labels[i] = c
                v = value(labels)
                if v < best:
                    best = v
                    orig = c
                    improved = True
            labels[i] = orig
        if not improved:
            break
    return labels


def _greedy_dispersion(dist: np.ndarray, size: int) -> list[int]:
    """Greedy max-min dispersion subset of the given size (clique surrogate)."""
    n = dist.shape[0]
    if size > n:
        return list(range(n))
    i, j = np.unravel_index(int(dist.argmax()), dist.shape)
    chosen = sorted((int(i), int(j)))[:size]
    while len(chosen) < size:
        gap = dist[:, chosen].min(axis=1)
        gap[chosen] = -1.0
        chosen.append(int(gap.argmax()))
    return sorted(chosen)


def _min_pairwise(dist: np.ndarray, subset: Sequence[int]) -> float:
    best = float("inf")
    for a, i in enumerate(subset):
        for j in subset[a + 1 :]:
            best = min(best, float(dist[i, j]))
    return best if best != float("inf") else 0.0


def kcenter_restricted(
    cross: np.ndarray,
    k: int,
    mode: Mode = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    """Min over k-subsets C of the pool of max over points of min dist to C.

    ``cross[i, c]`` is the distance from point i to pool candidate c.
    """
    cross = np.asarray(cross, dtype=float)
    if cross.ndim != 2 or cross.shape[0] == 0 or cross.shape[1] == 0:
        raise InputError(f"cross-distance matrix must be nonempty 2-D, got {cross.shape}")
    _check_budget(k)
    n_pool = cross.shape[1]
    k_eff = min(k, n_pool)
    kind = _normalize_mode(mode, "upper")

    if kind == "exact":
        cap = DEFAULT_COMB_CAP if comb_cap is None else comb_cap
        total = comb_count(n_pool, k_eff)
        if total > cap:
            raise CapacityError(
                f"exact k-center needs C({n_pool},{k_eff}) <= {cap}, got {total}"
            )
        best_val = float("inf")
        best: tuple[int, ...] | None = None
        for combo in combinations(range(n_pool), k_eff):
            val = float(cross[:, combo].min(axis=1).max())
            if val < best_val:
                best_val = val
                best = combo
        assert best is not None
        assign = tuple(int(cross[i, list(best)].argmin()) for i in range(cross.shape[0]))
        return BudgetedValue(best_val, "exact", CenterChoice(best, assign))

    if kind == "lower":
        raise InputError("k-center heuristics provide upper bounds only")

    chosen: list[int] = []
    current = np.full(cross.shape[0], np.inf)
    for _ in range(k_eff):
        best_c, best_v = 0, float("inf")
        for c in range(n_pool):
            if c in chosen:
                continue
            v = float(np.minimum(current, cross[:, c]).max())
            if v < best_v:
                best_v, best_c = v, c
        chosen.append(best_c)
        current = np.minimum(current, cross[:, best_c])
    centers = tuple(chosen)
    assign = tuple(int(cross[i, list(centers)].argmin()) for i in range(cross.shape[0]))
    return BudgetedValue(float(current.max()), "upper", CenterChoice(centers, assign))


def max_min_separation(
    dist: np.ndarray,
    size: int,
    mode: Mode = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    """Max over subsets of the given size of the min pairwise distance."""
    dist = check_distance_matrix(dist)
    n = dist.shape[0]
    if size < 2:
        raise InputError(f"separation subsets need size >= 2, got {size}")
    if size > n:
        raise UndefinedBudgetError(f"separation needs {size} points, set has {n}")
    kind = _normalize_mode(mode, "lower")

    seed = _greedy_dispersion(dist, size)
    seed_val = _min_pairwise(dist, seed)
    if kind != "exact":
        return BudgetedValue(seed_val, "lower", Subset(tuple(seed)))

    cap = DEFAULT_COMB_CAP if comb_cap is None else comb_cap
    total = comb_count(n, size)
    if total > cap:
        raise CapacityError(f"exact separation needs C({n},{size}) <= {cap}, got {total}")

    best_val = seed_val
    best = tuple(seed)

    # depth-first subset enumeration; adding points only lowers the min,
    # so prune any prefix whose running min cannot beat the incumbent
    def extend(prefix: list[int], run_min: float) -> None:
        nonlocal best_val, best
        if len(prefix) == size:
            if run_min > best_val:
                best_val = run_min
                best = tuple(prefix)
            return
        start = prefix[-1] + 1 if prefix else 0
        remaining = size - len(prefix)
        for j in range(start, n - remaining + 1):
            new_min = run_min
            ok = True
            for i in prefix:
                d = float(dist[i, j])
                if d <= best_val:
                    ok = False
                    break
                new_min = min(new_min, d)
            if ok:
                extend(prefix + [j], new_min)

    extend([], float("inf"))
    return BudgetedValue(best_val, "exact", Subset(best))


# ---------------------------------------------------------------------------
# point-set level API
# ---------------------------------------------------------------------------


def alpha_budget(
    ps: PointSet,
    k: int,
    mode: Mode = "exact",
    exact_cap: int | None = None,
) -> BudgetedValue:
    """Budgeted Kuratowski measure: best worst part diameter with <= k parts."""
    return minimax_diameter_partition(distance_matrix(ps), k, mode, exact_cap)


def gamma_budget(
    ps: PointSet,
    k: int,
    pool: PointSet,
    mode: Mode = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    """Budgeted Hausdorff measure: best k-center radius with pool-restricted centers.

    The pool realizes the inner/outer-space distinction: nets in a subspace
    are modeled by what the pool is allowed to contain.
    """
    return kcenter_restricted(cross_distances(ps, pool), k, mode, comb_cap)


def beta_sep(
    ps: PointSet,
    k: int,
    mode: Mode = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    """Budgeted Istratescu measure: max over (k+1)-subsets of min pairwise distance."""
    _check_budget(k)
    if len(ps) <= k:
        raise UndefinedBudgetError(
            f"beta needs at least k+1 = {k + 1} points, set has {len(ps)}"
        )
    return max_min_separation(distance_matrix(ps), k + 1, mode, comb_cap)
