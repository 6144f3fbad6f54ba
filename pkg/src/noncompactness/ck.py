"""Differentiable-family layer on 1-D grids: finite differences, BC^k norms,
order-maximized characteristics and windowed (compact-convergence) reports.

A ``CkFamily`` holds a base family on a uniform grid together with its
finite-difference differential families up to a fixed order.  The grid may
consist of several disjoint index segments (the open-set convention: the
domain is a union of open intervals sampled on one lattice); differentiation
never crosses a segment gap.

All order-k characteristics take maxima over the differentiation order p,
so for k = 0 every operation here reduces bit-for-bit to its counterpart on
plain function families.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .core import SpaceTag, rowwise_norms
from .errors import CapacityError, InputError
from .families import (
    DEFAULT_OMEGA_EXACT_CAP,
    DEFAULT_OMEGA_EXT_ENUM_CAP,
    Domain,
    FunctionFamily,
    OmegaBudget,
    OmegaWitness,
    conflict_matrix,
    mu_alpha_budget,
    mu_gamma_budget,
    omega_budget,
    sigma_alpha_budget,
    sigma_gamma_budget,
    sup_cross_matrix,
    sup_distance_matrix,
    sup_norm,
)
from .set_measures import (
    BudgetedValue,
    Partition,
    kcenter_restricted,
    minimax_diameter_partition,
)
from .util import comb_count


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Uniform 1-D lattice with active index segments (inclusive runs)."""

    start: float
    step: float
    count: int
    segments: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if not (self.step > 0):
            raise InputError(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise InputError(f"grid needs at least 2 points, got {self.count}")
        segs = self.segments or ((0, self.count - 1),)
        segs = tuple((int(a), int(b)) for a, b in segs)
        prev_end = -2
        for a, b in segs:
            if not (0 <= a <= b < self.count):
                raise InputError(f"segment {(a, b)} outside grid range 0..{self.count - 1}")
            if a <= prev_end + 1:
                raise InputError("segments must be sorted and separated by at least one gap index")
            prev_end = b
        object.__setattr__(self, "segments", segs)

    def active_indices(self) -> list[int]:
        out: list[int] = []
        for a, b in self.segments:
            out.extend(range(a, b + 1))
        return out

    def xs(self) -> np.ndarray:
        return self.start + self.step * np.asarray(self.active_indices(), dtype=float)

    def segment_slices(self) -> list[tuple[int, int]]:
        """Per segment: (offset, length) into the active-point axis."""
        out = []
        offset = 0
        for a, b in self.segments:
            length = b - a + 1
            out.append((offset, length))
            offset += length
        return out

    def to_domain(self) -> Domain:
        idx = self.active_indices()
        labels = tuple(f"g{i}" for i in idx)
        return Domain(labels, coords=self.xs()[:, None], metric="linf")

    def boundary_mask(self, width: int) -> np.ndarray:
        """Active points within ``width`` of a segment end (stencil-contaminated)."""
        mask = np.zeros(len(self.active_indices()), dtype=bool)
        for offset, length in self.segment_slices():
            w = min(width, length)
            mask[offset : offset + w] = True
            mask[offset + length - w : offset + length] = True
        return mask


def family_on_grid(
    grid: GridDomain,
    space: SpaceTag,
    items: Sequence[tuple[str, np.ndarray]],
) -> FunctionFamily:
    """Build a family from per-active-point value arrays of shape (n_active, dim)."""
    domain = grid.to_domain()
    names = tuple(name for name, _ in items)
    values = np.asarray([np.asarray(v, dtype=float) for _, v in items])
    return FunctionFamily(domain, space, names, values)


def _first_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Order-2 stencil: central inside, one-sided at segment ends. Needs >= 3 points."""
    n = values.shape[0]
    out = np.empty_like(values)
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    out[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h)
    if n > 2:
        out[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    return out


@dataclass(frozen=True, eq=False)
class CkFamily:
    """Base family plus its finite-difference differentials M^0..M^k."""

    grid: GridDomain
    order: int
    levels: tuple[FunctionFamily, ...]  # levels[p] holds d^p f sampled on the grid

    @property
    def base(self) -> FunctionFamily:
        return self.levels[0]

    @property
    def space(self) -> SpaceTag:
        return self.base.space

    @property
    def names(self) -> tuple[str, ...]:
        return self.base.names

    def boundary_mask(self) -> np.ndarray:
        return self.grid.boundary_mask(self.order)


def differentiate(base: FunctionFamily, k: int, grid: GridDomain) -> CkFamily:
    """Sample d^p f for p <= k by repeated first-derivative stencils per segment."""
    if k < 0:
        raise InputError(f"differentiation order must be >= 0, got {k}")
    expected = grid.to_domain().labels
    if base.domain.labels != expected:
        raise InputError("family domain does not match the grid's active points")
    for _, length in grid.segment_slices():
        if length < k + 2:
            raise InputError(
                f"order-{k} differentiation needs segments of >= {k + 2} points, got {length}"
            )
    levels = [base]
    for _ in range(k):
        prev = levels[-1]
        rows = np.empty_like(prev.values)
        for offset, length in grid.segment_slices():
            for f in range(len(base)):
                rows[f, offset : offset + length] = _first_derivative(
                    prev.values[f, offset : offset + length], grid.step
                )
        levels.append(FunctionFamily(base.domain, base.space, base.names, rows))
    return CkFamily(grid, k, tuple(levels))


def grid_from_domain(domain: Domain, rel_tol: float = 1e-9) -> GridDomain:
    """Reconstruct a GridDomain from uniformly spaced 1-D domain coordinates."""
    if domain.coords is None or domain.coords.shape[1] != 1:
        raise InputError("grid reconstruction needs 1-D domain coordinates")
    xs = domain.coords[:, 0]
    if len(xs) < 2:
        raise InputError("grid needs at least 2 points")
    gaps = np.diff(xs)
    if np.any(gaps <= 0):
        raise InputError("grid coordinates must be strictly increasing")
    h = float(gaps.min())
    steps = gaps / h
    if np.any(np.abs(steps - np.round(steps)) > rel_tol * np.abs(steps)):
        raise InputError("domain coordinates do not lie on a uniform lattice")
    idx = np.concatenate([[0], np.cumsum(np.round(steps).astype(int))])
    segments = []
    seg_start = int(idx[0])
    prev = seg_start
    for i in idx[1:]:
        i = int(i)
        if i == prev + 1:
            prev = i
            continue
        segments.append((seg_start, prev))
        seg_start = prev = i
    segments.append((seg_start, prev))
    return GridDomain(float(xs[0]), h, int(idx[-1]) + 1, tuple(segments))


# ---------------------------------------------------------------------------
# BC^k norms and metrics
# ---------------------------------------------------------------------------


def bck_norm(ck: CkFamily, func: int | str) -> float:
    """max over p of the sup norm of d^p f."""
    return max(sup_norm(level, func) for level in ck.levels)


def bck_distance_matrix(ck: CkFamily) -> np.ndarray:
    return np.maximum.reduce([sup_distance_matrix(level) for level in ck.levels])


def bck_cross_matrix(ck: CkFamily, pool: CkFamily) -> np.ndarray:
    _require_aligned(ck, pool)
    return np.maximum.reduce(
        [sup_cross_matrix(ck.levels[p], pool.levels[p]) for p in range(ck.order + 1)]
    )


def bck_conflict_matrix(ck: CkFamily) -> np.ndarray:
    return np.maximum.reduce([conflict_matrix(level) for level in ck.levels])


def _require_aligned(a: CkFamily, b: CkFamily) -> None:
    if a.order != b.order:
        raise InputError("families have different differentiation orders")
    if a.base.domain.labels != b.base.domain.labels or a.space != b.space:
        raise InputError("families live on different grids or spaces")


def as_ck_pool(ck: CkFamily, pool: CkFamily | FunctionFamily | None) -> CkFamily:
    """Differentiate a plain function pool alongside the family when needed."""
    if pool is None:
        return ck
    if isinstance(pool, CkFamily):
        _require_aligned(ck, pool)
        return pool
    return differentiate(pool, ck.order, ck.grid)


# ---------------------------------------------------------------------------
# order-maximized characteristics
# ---------------------------------------------------------------------------


def _max_over_levels(per_level: list[BudgetedValue]) -> BudgetedValue:
    best_p = 0
    for p, bv in enumerate(per_level):
        if bv.value > per_level[best_p].value:
            best_p = p
    chosen = per_level[best_p]
    return BudgetedValue(chosen.value, chosen.kind, (best_p, chosen.witness))


def mu_bar_alpha_budget(ck: CkFamily, k: int, mode: str = "exact") -> BudgetedValue:
    return _max_over_levels([mu_alpha_budget(level, k, mode) for level in ck.levels])


def mu_bar_gamma_budget(
    ck: CkFamily, k: int, pool: CkFamily | None = None, mode: str = "exact"
) -> BudgetedValue:
    if pool is not None:
        _require_aligned(ck, pool)
    return _max_over_levels(
        [
            mu_gamma_budget(
                ck.levels[p],
                k,
                phi_pool=None if pool is None else pool.levels[p],
                mode=mode,
            )
            for p in range(ck.order + 1)
        ]
    )


def sigma_bar_alpha_budget(
    ck: CkFamily, k: int, mode: str = "exact", exact_cap: int | None = None
) -> BudgetedValue:
    return _max_over_levels(
        [sigma_alpha_budget(level, k, mode, exact_cap) for level in ck.levels]
    )


def sigma_bar_gamma_budget(ck: CkFamily, k: int, mode: str = "exact") -> BudgetedValue:
    return _max_over_levels([sigma_gamma_budget(level, k, mode=mode) for level in ck.levels])


def omega_bar_budget(ck: CkFamily, n: int, mode: str = "exact") -> BudgetedValue:
    """max over p of the per-level modulus (per-p independent partitions)."""
    return _max_over_levels([omega_budget(level, n, mode) for level in ck.levels])


def bck_family_alpha_budget(
    ck: CkFamily, k: int, mode: str = "exact", exact_cap: int | None = None
) -> BudgetedValue:
    """Family-level minimax partition under the BC^k sup metric."""
    return minimax_diameter_partition(bck_distance_matrix(ck), k, mode, exact_cap)


def bck_family_gamma_budget(
    ck: CkFamily,
    k: int,
    pool: CkFamily | FunctionFamily | None = None,
    mode: str = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    pool_ck = as_ck_pool(ck, pool)
    return kcenter_restricted(bck_cross_matrix(ck, pool_ck), k, mode, comb_cap)


# ---------------------------------------------------------------------------
# the BC^k pool-corrected modulus (shared partition across orders)
# ---------------------------------------------------------------------------


def _bck_corrected_conflict(
    ck: CkFamily, pool_ck: CkFamily, phi_idx: Sequence[int], assignment: Sequence[int]
) -> np.ndarray:
    mats = []
    for p in range(ck.order + 1):
        corrected = (
            ck.levels[p].values - pool_ck.levels[p].values[list(phi_idx)][list(assignment)]
        )
        diffs = corrected[:, :, None, :] - corrected[:, None, :, :]
        mat = rowwise_norms(diffs, ck.space).max(axis=0)
        mat = np.triu(mat, 1)
        mats.append(mat + mat.T)
    return np.maximum.reduce(mats)


def _bck_difference_cost(ck: CkFamily, pool_ck: CkFamily) -> np.ndarray:
    """cost[f, phi] = max_p diam((d^p f - d^p phi)(Omega)); the n=1 reduction."""
    n_f, n_phi = len(ck.base), len(pool_ck.base)
    out = np.zeros((n_f, n_phi))
    for i in range(n_f):
        for j in range(n_phi):
            worst = 0.0
            for p in range(ck.order + 1):
                g = ck.levels[p].values[i] - pool_ck.levels[p].values[j]
                diffs = g[:, None, :] - g[None, :, :]
                worst = max(worst, float(rowwise_norms(diffs, ck.space).max()))
            out[i, j] = worst
    return out


def omega_bck_budget(
    ck: CkFamily,
    budget: OmegaBudget | tuple[int, int],
    pool: CkFamily | FunctionFamily | None = None,
    mode: str = "exact",
    enum_cap: int | None = None,
    exact_cap: int | None = None,
) -> BudgetedValue:
    """Pool-corrected modulus under the BC^k metric: one partition, max over p."""
    n_parts, m_funcs = OmegaBudget(*budget)
    if n_parts < 1 or m_funcs < 1:
        raise InputError(f"omega budgets must be positive, got {(n_parts, m_funcs)}")
    pool_ck = as_ck_pool(ck, pool)
    m_eff = min(m_funcs, len(pool_ck.base))
    n_funcs = len(ck.base)
    cap_pts = DEFAULT_OMEGA_EXACT_CAP if exact_cap is None else exact_cap

    if mode != "exact":
        raise InputError("omega_bck_budget implements exact mode only")

    if n_parts == 1:
        cost = _bck_difference_cost(ck, pool_ck)
        bv = kcenter_restricted(cost, m_eff)
        choice = bv.witness
        phi_idx = list(choice.centers)
        witness = OmegaWitness(
            Partition((tuple(range(len(ck.base.domain))),)),
            tuple(pool_ck.base.names[j] for j in phi_idx),
            pool_ck.base.values[phi_idx],
            choice.assignment,
            bv.value,
        )
        return BudgetedValue(bv.value, "exact", witness)

    cap = DEFAULT_OMEGA_EXT_ENUM_CAP if enum_cap is None else enum_cap
    total = comb_count(len(pool_ck.base), m_eff) * (m_eff**n_funcs)
    if total > cap:
        raise CapacityError(
            f"exact BC^k pool-corrected modulus needs subset x assignment count <= {cap}, got {total}"
        )
    best = None
    for phi_combo in combinations(range(len(pool_ck.base)), m_eff):
        for assign in product(range(m_eff), repeat=n_funcs):
            dist = _bck_corrected_conflict(ck, pool_ck, phi_combo, assign)
            bv = minimax_diameter_partition(dist, n_parts, "exact", cap_pts)
            if best is None or bv.value < best[0]:
                best = (bv.value, phi_combo, assign, bv.witness)
    assert best is not None
    val, phi_combo, assign, part = best
    witness = OmegaWitness(
        part,
        tuple(pool_ck.base.names[j] for j in phi_combo),
        pool_ck.base.values[list(phi_combo)],
        tuple(assign),
        val,
    )
    return BudgetedValue(val, "exact", witness)


# ---------------------------------------------------------------------------
# windowed (compact-convergence) evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowSpec:
    """Contiguous grid-index window [lo, hi], the compact set of a seminorm."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise InputError(f"window bounds out of order: {(self.lo, self.hi)}")


def restrict_to_window(
    ck: CkFamily, window: WindowSpec, exclude_boundary: bool = False
) -> CkFamily:
    """Restriction of the precomputed levels to a window; no re-differentiation."""
    active = ck.grid.active_indices()
    selected = [pos for pos, i in enumerate(active) if window.lo <= i <= window.hi]
    if exclude_boundary:
        mask = ck.boundary_mask()
        trimmed = [pos for pos in selected if not mask[pos]]
        if trimmed:
            selected = trimmed
    if not selected:
        raise InputError(f"window {(window.lo, window.hi)} contains no active grid points")
    kept = [active[pos] for pos in selected]
    segments = []
    seg_start = prev = kept[0]
    for i in kept[1:]:
        if i == prev + 1:
            prev = i
            continue
        segments.append((seg_start, prev))
        seg_start = prev = i
    segments.append((seg_start, prev))
    # count/step/start preserved so window indices keep their meaning
    new_grid = GridDomain(ck.grid.start, ck.grid.step, ck.grid.count, tuple(segments))
    domain = new_grid.to_domain()
    new_levels = tuple(
        FunctionFamily(domain, ck.space, level.names, level.values[:, selected, :])
        for level in ck.levels
    )
    return CkFamily(new_grid, ck.order, new_levels)


def dk_windowed_report(
    ck: CkFamily,
    windows: Sequence[WindowSpec],
    k_budget: int,
    n_budget: int,
    exclude_boundary: bool = False,
) -> list[dict]:
    """Per-window characteristic table; one row per window, deterministic order."""
    rows = []
    for w in windows:
        restricted = restrict_to_window(ck, w, exclude_boundary)
        rows.append(
            {
                "window": [w.lo, w.hi],
                "n_points": len(restricted.base.domain),
                "mu_bar_alpha": mu_bar_alpha_budget(restricted, k_budget).value,
                "mu_bar_gamma": mu_bar_gamma_budget(restricted, k_budget).value,
                "sigma_bar_alpha": sigma_bar_alpha_budget(restricted, k_budget).value,
                "sigma_bar_gamma": sigma_bar_gamma_budget(restricted, k_budget).value,
                "omega_bar": omega_bar_budget(restricted, n_budget).value,
                "budgets": {"k": k_budget, "n": n_budget},
            }
        )
    return rows
