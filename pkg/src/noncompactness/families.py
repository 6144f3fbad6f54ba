"""Finite families of vector-valued functions and their compactness characteristics.

A family M lives on a finite labeled domain and takes values in a tagged
finite-dimensional space.  The module computes, at explicit budgets:

* pointwise characteristics  mu_alpha, mu_gamma   (worst point-set measure
  over the domain),
* image characteristics      sigma_alpha, sigma_gamma  (measure of the total
  image),
* the non-equicontinuity modulus  omega  (best worst per-part image diameter
  over domain partitions), and
* the pool-corrected modulus  omega_ext  (like omega, but each function may
  first subtract its best match from a finite pool of correction functions).

The central algorithmic identity: omega is exactly the minimax-diameter
partition of the domain under the conflict pseudometric
``d(x, y) = max_f ||f(x) - f(y)||`` because the per-part diameter condition
is pairwise.  The same reduction applies to omega_ext once the correction
assignment is fixed, which is how the exact solver enumerates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .core import (
    Norm,
    PointSet,
    SpaceTag,
    deduplicate,
    rowwise_norms,
)
from .errors import CapacityError, InputError, UndefinedBudgetError
from .set_measures import (
    BudgetedValue,
    Partition,
    alpha_budget,
    gamma_budget,
    kcenter_restricted,
    max_min_separation,
    minimax_diameter_partition,
)
from .util import comb_count

DEFAULT_OMEGA_EXACT_CAP = 64
DEFAULT_OMEGA_EXT_ENUM_CAP = 200_000


@dataclass(frozen=True, eq=False)
class Domain:
    """Finite labeled domain, optionally metrized by per-label coordinates."""

    labels: tuple[str, ...]
    coords: np.ndarray | None = None
    metric: Norm | None = None

    def __post_init__(self) -> None:
        if not self.labels:
            raise InputError("domain must have at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("domain labels must be unique")
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if self.coords is not None:
            arr = np.asarray(self.coords, dtype=float)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.shape[0] != len(self.labels):
                raise InputError("domain coords must align with labels")
            if not np.all(np.isfinite(arr)):
                raise InputError("domain coords must be finite")
            if self.metric is None:
                object.__setattr__(self, "metric", "linf")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, "coords", arr)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown domain label {label!r}") from None

    def pair_distances(self) -> np.ndarray:
        if self.coords is None:
            raise InputError("domain carries no coordinates/metric")
        space = SpaceTag(self.coords.shape[1], self.metric or "linf")
        diffs = self.coords[:, None, :] - self.coords[None, :, :]
        return rowwise_norms(diffs, space)


@dataclass(frozen=True, eq=False)
class FunctionFamily:
    """Ordered finite family of total functions domain -> space."""

    domain: Domain
    space: SpaceTag
    names: tuple[str, ...]
    values: np.ndarray  # (n_funcs, n_points, dim)

    def __post_init__(self) -> None:
        if not self.names:
            raise InputError("family must contain at least one function")
        if len(set(self.names)) != len(self.names):
            raise InputError("function names must be unique")
        object.__setattr__(self, "names", tuple(str(x) for x in self.names))
        vals = np.asarray(self.values, dtype=float)
        expected = (len(self.names), len(self.domain), self.space.dim)
        if vals.shape != expected:
            raise InputError(f"family values must have shape {expected}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InputError("family values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @staticmethod
    def from_maps(
        domain: Domain,
        space: SpaceTag,
        items: Sequence[tuple[str, Mapping[str, Sequence[float]]]],
    ) -> "FunctionFamily":
        names = []
        rows = []
        for name, mapping in items:
            missing = [lab for lab in domain.labels if lab not in mapping]
            if missing:
                raise InputError(f"function {name!r} is not total: missing {missing}")
            names.append(name)
            rows.append([np.asarray(mapping[lab], dtype=float) for lab in domain.labels])
        return FunctionFamily(domain, space, tuple(names), np.asarray(rows))

    def __len__(self) -> int:
        return len(self.names)

    def func_index(self, func: int | str) -> int:
        if isinstance(func, str):
            try:
                return self.names.index(func)
            except ValueError:
                raise InputError(f"unknown function name {func!r}") from None
        if not 0 <= func < len(self):
            raise InputError(f"function index {func} out of range")
        return func

    def subfamily(self, funcs: Sequence[int | str]) -> "FunctionFamily":
        idx = [self.func_index(f) for f in funcs]
        return FunctionFamily(
            self.domain, self.space, tuple(self.names[i] for i in idx), self.values[idx]
        )


PhiPool = FunctionFamily


class OmegaBudget(NamedTuple):
    """Partition budget n and correction-pool budget m."""

    n: int
    m: int


@dataclass(frozen=True, eq=False)
class OmegaWitness:
    """Feasible data for the pool-corrected modulus: partition, corrections, assignment."""

    partition: Partition
    phi_names: tuple[str, ...]
    phi_values: np.ndarray  # (m, n_points, dim)
    assignment: tuple[int, ...]  # function index -> position in phi_values
    value: float

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.to_dict(),
            "phi_names": list(self.phi_names),
            "assignment": list(self.assignment),
            "value": self.value,
        }


def _require_compatible(a: FunctionFamily, b: FunctionFamily) -> None:
    if a.domain.labels != b.domain.labels:
        raise InputError("families live on different domains")
    if a.space != b.space:
        raise InputError("families take values in different spaces")


# ---------------------------------------------------------------------------
# sup norms and distance matrices
# ---------------------------------------------------------------------------


def sup_norm(family: FunctionFamily, func: int | str) -> float:
    """Max over the domain of the pointwise norm."""
    i = family.func_index(func)
    return float(rowwise_norms(family.values[i], family.space).max())


def sup_dist(family: FunctionFamily, f: int | str, g: int | str) -> float:
    i, j = family.func_index(f), family.func_index(g)
    return float(rowwise_norms(family.values[i] - family.values[j], family.space).max())


def sup_distance_matrix(family: FunctionFamily) -> np.ndarray:
    """Pairwise sup distances of the family members (symmetric, zero diagonal)."""
    diffs = family.values[:, None, :, :] - family.values[None, :, :, :]
    mat = rowwise_norms(diffs, family.space).max(axis=-1)
    mat = np.triu(mat, 1)
    return mat + mat.T


def sup_cross_matrix(family: FunctionFamily, pool: FunctionFamily) -> np.ndarray:
    _require_compatible(family, pool)
    diffs = family.values[:, None, :, :] - pool.values[None, :, :, :]
    return rowwise_norms(diffs, family.space).max(axis=-1)


def conflict_matrix(family: FunctionFamily) -> np.ndarray:
    """Conflict pseudometric on the domain: d(x,y) = max_f ||f(x) - f(y)||."""
    diffs = family.values[:, :, None, :] - family.values[:, None, :, :]
    mat = rowwise_norms(diffs, family.space).max(axis=0)
    mat = np.triu(mat, 1)
    return mat + mat.T


# ---------------------------------------------------------------------------
# value sets
# ---------------------------------------------------------------------------


def family_at_point(family: FunctionFamily, label: str) -> PointSet:
    """The value set M(x), multiset-collapsed, in canonical function order."""
    p = family.domain.index(label)
    return deduplicate(PointSet(family.values[:, p, :], family.space))


def family_image(family: FunctionFamily) -> PointSet:
    """The total image M(Omega), collapsed, function-major order."""
    flat = family.values.reshape(-1, family.space.dim)
    return deduplicate(PointSet(flat, family.space))


def function_image(family: FunctionFamily, func: int | str) -> PointSet:
    i = family.func_index(func)
    return deduplicate(PointSet(family.values[i], family.space))


# ---------------------------------------------------------------------------
# pointwise and image characteristics
# ---------------------------------------------------------------------------


def mu_alpha_budget(
    family: FunctionFamily, k: int, mode: str = "exact", exact_cap: int | None = None
) -> BudgetedValue:
    """Worst budgeted Kuratowski measure of the value sets M(x)."""
    best_val = -1.0
    best_witness = None
    for label in family.domain.labels:
        bv = alpha_budget(family_at_point(family, label), k, mode, exact_cap)
        if bv.value > best_val:
            best_val = bv.value
            best_witness = (label, bv.witness)
    return BudgetedValue(best_val, "exact" if mode == "exact" else "upper", best_witness)


def mu_gamma_budget(
    family: FunctionFamily,
    k: int,
    extras: np.ndarray | Sequence[Sequence[float]] | None = None,
    phi_pool: FunctionFamily | None = None,
    mode: str = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    """Worst budgeted Hausdorff measure of the value sets M(x).

    Per-point center pools follow the pool rule: values of M at the point
    plus the supplied extra vectors, or the pointwise values of ``phi_pool``.
    """
    if phi_pool is not None:
        _require_compatible(family, phi_pool)
    extra_arr = None
    if extras is not None:
        extra_arr = np.asarray(extras, dtype=float).reshape(-1, family.space.dim)
    best_val = -1.0
    best_witness = None
    for p, label in enumerate(family.domain.labels):
        pts = family_at_point(family, label)
        if phi_pool is not None:
            pool = deduplicate(PointSet(phi_pool.values[:, p, :], family.space))
        elif extra_arr is not None and len(extra_arr):
            pool = deduplicate(
                PointSet(np.vstack([pts.points, extra_arr]), family.space)
            )
        else:
            pool = pts
        bv = gamma_budget(pts, k, pool, mode, comb_cap)
        if bv.value > best_val:
            best_val = bv.value
            best_witness = (label, bv.witness)
    return BudgetedValue(best_val, "exact" if mode == "exact" else "upper", best_witness)


def sigma_alpha_budget(
    family: FunctionFamily, k: int, mode: str = "exact", exact_cap: int | None = None
) -> BudgetedValue:
    """Budgeted Kuratowski measure of the total image M(Omega)."""
    return alpha_budget(family_image(family), k, mode, exact_cap)


def sigma_gamma_budget(
    family: FunctionFamily,
    k: int,
    extras: np.ndarray | Sequence[Sequence[float]] | None = None,
    mode: str = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    """Budgeted Hausdorff measure of M(Omega); pool = image values + extras."""
    image = family_image(family)
    if extras is not None:
        extra_arr = np.asarray(extras, dtype=float).reshape(-1, family.space.dim)
        pool = deduplicate(PointSet(np.vstack([image.points, extra_arr]), family.space))
    else:
        pool = image
    return gamma_budget(image, k, pool, mode, comb_cap)


# ---------------------------------------------------------------------------
# family-level measures (M as a point set under the sup metric)
# ---------------------------------------------------------------------------


def family_alpha_budget(
    family: FunctionFamily, k: int, mode: str = "exact", exact_cap: int | None = None
) -> BudgetedValue:
    return minimax_diameter_partition(sup_distance_matrix(family), k, mode, exact_cap)


def family_gamma_budget(
    family: FunctionFamily,
    k: int,
    pool: FunctionFamily | None = None,
    mode: str = "exact",
    comb_cap: int | None = None,
) -> BudgetedValue:
    """Budgeted k-center on the family itself, centers from a function pool."""
    pool = family if pool is None else pool
    return kcenter_restricted(sup_cross_matrix(family, pool), k, mode, comb_cap)


def family_beta_sep(
    family: FunctionFamily, k: int, mode: str = "exact", comb_cap: int | None = None
) -> BudgetedValue:
    """Budgeted separation of the family under the sup metric."""
    if len(family) <= k:
        raise UndefinedBudgetError(
            f"beta needs at least k+1 = {k + 1} functions, family has {len(family)}"
        )
    return max_min_separation(sup_distance_matrix(family), k + 1, mode, comb_cap)


# ---------------------------------------------------------------------------
# the modulus omega and its pool-corrected extension
# ---------------------------------------------------------------------------


def omega_budget(
    family: FunctionFamily,
    n: int,
    mode: str = "exact",
    exact_cap: int | None = None,
) -> BudgetedValue:
    """Best worst per-part image diameter over domain partitions into <= n parts."""
    cap = DEFAULT_OMEGA_EXACT_CAP if exact_cap is None else exact_cap
    return minimax_diameter_partition(conflict_matrix(family), n, mode, cap)


def _difference_image_diameter(values_f: np.ndarray, values_phi: np.ndarray, space: SpaceTag) -> float:
    g = values_f - values_phi
    diffs = g[:, None, :] - g[None, :, :]
    return float(rowwise_norms(diffs, space).max())


def omega_ext_cross_matrix(family: FunctionFamily, pool: FunctionFamily) -> np.ndarray:
    """cost[f, phi] = diam((f - phi)(Omega)); the n=1 reduction of omega_ext."""
    _require_compatible(family, pool)
    out = np.zeros((len(family), len(pool)))
    for i in range(len(family)):
        for j in range(len(pool)):
            out[i, j] = _difference_image_diameter(
                family.values[i], pool.values[j], family.space
            )
    return out


def _corrected_conflict(
    family: FunctionFamily, phi_values: np.ndarray, assignment: Sequence[int]
) -> np.ndarray:
    corrected = family.values - phi_values[list(assignment)]
    diffs = corrected[:, :, None, :] - corrected[:, None, :, :]
    mat = rowwise_norms(diffs, family.space).max(axis=0)
    mat = np.triu(mat, 1)
    return mat + mat.T


def omega_ext_budget(
    family: FunctionFamily,
    budget: OmegaBudget | tuple[int, int],
    pool: FunctionFamily | None = None,
    mode: str = "exact",
    enum_cap: int | None = None,
    exact_cap: int | None = None,
) -> BudgetedValue:
    """Pool-corrected modulus at budget (n parts, m correction functions).

    Value: min over (subsets Phi of the pool with |Phi| <= m, assignments
    f -> phi in Phi, partitions of the domain into <= n parts) of the max
    over (f, part) of diam((f - phi_f)(part)).  The default pool is the
    family itself; by the replacement argument this loses at most a factor 2
    against any other pool.
    """
    n_parts, m_funcs = OmegaBudget(*budget)
    if n_parts < 1 or m_funcs < 1:
        raise InputError(f"omega budgets must be positive, got {(n_parts, m_funcs)}")
    pool = family if pool is None else pool
    _require_compatible(family, pool)
    m_eff = min(m_funcs, len(pool))

    if mode == "exact":
        if n_parts == 1:
            # per-function best correction decouples: a restricted k-center
            cross = omega_ext_cross_matrix(family, pool)
            bv = kcenter_restricted(cross, m_eff)
            choice = bv.witness
            phi_idx = list(choice.centers)
            witness = OmegaWitness(
                Partition((tuple(range(len(family.domain))),)),
                tuple(pool.names[j] for j in phi_idx),
                pool.values[phi_idx],
                choice.assignment,
                bv.value,
            )
            return BudgetedValue(bv.value, "exact", witness)

        cap = DEFAULT_OMEGA_EXT_ENUM_CAP if enum_cap is None else enum_cap
        total = comb_count(len(pool), m_eff) * (m_eff ** len(family))
        if total > cap:
            raise CapacityError(
                f"exact pool-corrected modulus needs subset x assignment count <= {cap}, got {total}"
            )
        best: tuple[float, tuple[int, ...], tuple[int, ...], Partition] | None = None
        for phi_combo in combinations(range(len(pool)), m_eff):
            phi_vals = pool.values[list(phi_combo)]
            for assign in product(range(m_eff), repeat=len(family)):
                dist = _corrected_conflict(family, phi_vals, assign)
                bv = minimax_diameter_partition(dist, n_parts, "exact", exact_cap or DEFAULT_OMEGA_EXACT_CAP)
                if best is None or bv.value < best[0]:
                    best = (bv.value, phi_combo, assign, bv.witness)
        assert best is not None
        val, phi_combo, assign, part = best
        witness = OmegaWitness(
            part,
            tuple(pool.names[j] for j in phi_combo),
            pool.values[list(phi_combo)],
            tuple(assign),
            val,
        )
        return BudgetedValue(val, "exact", witness)

    if mode in ("heuristic", "upper"):
        return _omega_ext_upper(family, n_parts, m_eff, pool)
    if mode == "lower":
        return omega_ext_lower_bound(family, n_parts, pool)
    raise InputError(f"unknown mode {mode!r}")


def _omega_ext_upper(
    family: FunctionFamily, n_parts: int, m_eff: int, pool: FunctionFamily
) -> BudgetedValue:
    """Alternating assignment/partition descent from a greedy correction choice."""
    cross = omega_ext_cross_matrix(family, pool)
    seed = kcenter_restricted(cross, m_eff, mode="upper")
    phi_idx = list(seed.witness.centers)
    phi_vals = pool.values[phi_idx]
    assign = list(seed.witness.assignment)

    def partition_for(a: Sequence[int]) -> tuple[float, Partition]:
        dist = _corrected_conflict(family, phi_vals, a)
        try:
            bv = minimax_diameter_partition(dist, n_parts, "exact")
        except CapacityError:
            bv = minimax_diameter_partition(dist, n_parts, "upper")
        return bv.value, bv.witness if isinstance(bv.witness, Partition) else Partition.from_labels(
            [0] * dist.shape[0]
        )

    def assign_cost(f: int, j: int, part: Partition) -> float:
        g = family.values[f] - phi_vals[j]
        worst = 0.0
        for block in part.parts:
            sub = g[list(block)]
            diffs = sub[:, None, :] - sub[None, :, :]
            worst = max(worst, float(rowwise_norms(diffs, family.space).max()))
        return worst

    value, part = partition_for(assign)
    for _ in range(20):
        new_assign = [
            min(range(len(phi_idx)), key=lambda j: (assign_cost(f, j, part), j))
            for f in range(len(family))
        ]
        new_value, new_part = partition_for(new_assign)
        if new_value >= value - 1e-15:
            break
        assign, part, value = new_assign, new_part, new_value
    witness = OmegaWitness(
        part,
        tuple(pool.names[j] for j in phi_idx),
        phi_vals,
        tuple(assign),
        value,
    )
    return BudgetedValue(value, "upper", witness)


def omega_ext_lower_bound(
    family: FunctionFamily, n_parts: int, pool: FunctionFamily | None = None
) -> BudgetedValue:
    """Relaxation: each function gets its own best correction and partition."""
    pool = family if pool is None else pool
    _require_compatible(family, pool)
    worst = 0.0
    for i in range(len(family)):
        best = float("inf")
        for j in range(len(pool)):
            g = family.values[i] - pool.values[j]
            diffs = g[:, None, :] - g[None, :, :]
            dist = rowwise_norms(diffs, family.space)
            dist = np.triu(dist, 1)
            dist = dist + dist.T
            bv = minimax_diameter_partition(dist, n_parts, "exact", DEFAULT_OMEGA_EXACT_CAP)
            best = min(best, bv.value)
        worst = max(worst, best)
    return BudgetedValue(worst, "lower", None)


# ---------------------------------------------------------------------------
# family algebra
# ---------------------------------------------------------------------------


def scale(lam: float, family: FunctionFamily) -> FunctionFamily:
    names = tuple(f"{lam:g}*{n}" for n in family.names)
    return FunctionFamily(family.domain, family.space, names, lam * family.values)


def minkowski_sum(a: FunctionFamily, b: FunctionFamily) -> FunctionFamily:
    """All pairwise sums f + g, a-major order."""
    _require_compatible(a, b)
    names = []
    rows = []
    for i, na in enumerate(a.names):
        for j, nb in enumerate(b.names):
            names.append(f"{na}+{nb}")
            rows.append(a.values[i] + b.values[j])
    return FunctionFamily(a.domain, a.space, tuple(names), np.asarray(rows))


def convex_combination(lam: float, a: FunctionFamily, b: FunctionFamily) -> FunctionFamily:
    """All pairwise combinations lam*f + (1-lam)*g."""
    if not 0.0 <= lam <= 1.0:
        raise InputError(f"convex weight must lie in [0, 1], got {lam}")
    _require_compatible(a, b)
    names = []
    rows = []
    for i, na in enumerate(a.names):
        for j, nb in enumerate(b.names):
            names.append(f"{lam:g}*{na}+{1 - lam:g}*{nb}")
            rows.append(lam * a.values[i] + (1.0 - lam) * b.values[j])
    return FunctionFamily(a.domain, a.space, tuple(names), np.asarray(rows))


def union(a: FunctionFamily, b: FunctionFamily) -> FunctionFamily:
    """Concatenation with collapse of value-identical duplicates (first name wins)."""
    _require_compatible(a, b)
    names = list(a.names)
    rows = [a.values[i] for i in range(len(a))]
    seen = {a.values[i].tobytes() for i in range(len(a))}
    for j in range(len(b)):
        key = b.values[j].tobytes()
        if key in seen:
            continue
        seen.add(key)
        name = b.names[j]
        if name in names:
            name = f"{name}'"
            while name in names:
                name += "'"
        names.append(name)
        rows.append(b.values[j])
    return FunctionFamily(a.domain, a.space, tuple(names), np.asarray(rows))


# ---------------------------------------------------------------------------
# metrized-domain modulus and diagnostics
# ---------------------------------------------------------------------------


def nussbaum_modulus(family: FunctionFamily, delta: float) -> float:
    """Max of ||f(x) - f(y)|| over domain pairs within delta; needs a metrized domain."""
    if delta < 0:
        raise InputError(f"delta must be nonnegative, got {delta}")
    pair = family.domain.pair_distances()
    within = pair <= delta
    np.fill_diagonal(within, False)
    worst = 0.0
    xs, ys = np.nonzero(within)
    for x, y in zip(xs.tolist(), ys.tolist()):
        if x >= y:
            continue
        d = float(rowwise_norms(family.values[:, x, :] - family.values[:, y, :], family.space).max())
        worst = max(worst, d)
    return worst


def heinz_lower_diagnostic(family: FunctionFamily, k: int) -> dict:
    """Diagnostic only: the classical lower combination vs the family alpha.

    Reports max(mu_alpha_k, (omega_k - sup_f sigma_alpha_k({f})) / 2) next to
    alpha_k at the same budget; nothing is asserted about their order.
    """
    mu = mu_alpha_budget(family, k).value
    om = omega_budget(family, k).value
    single = max(
        alpha_budget(function_image(family, i), k).value for i in range(len(family))
    )
    alpha = family_alpha_budget(family, k).value
    return {
        "mu_alpha": mu,
        "omega": om,
        "sup_single_sigma_alpha": single,
        "lower_combination": max(mu, 0.5 * (om - single)),
        "family_alpha": alpha,
    }


def ambrosetti_report(family: FunctionFamily, k: int, pool: FunctionFamily | None = None) -> dict:
    """Both sides of the equicontinuous-case formula at matched budgets, with the gap flagged."""
    mu = mu_alpha_budget(family, k).value
    alpha = family_alpha_budget(family, k).value
    om = omega_ext_budget(family, (1, k), pool=pool).value
    return {
        "mu_alpha": mu,
        "family_alpha": alpha,
        "omega_ext_1k": om,
        "gap": alpha - mu,
    }
