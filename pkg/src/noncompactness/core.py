"""Finite-dimensional normed vectors, point sets, distances and centers.

This is the metric substrate for every other module: l1/l2/linf norms,
distance matrices, diameters, coordinatewise Chebyshev centers in linf and
exact smallest enclosing balls in l2.  All values are immutable after
construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import InputError, UnsupportedSpaceError

Norm = Literal["l1", "l2", "linf"]

VALID_NORMS: tuple[Norm, ...] = ("l1", "l2", "linf")

DEFAULT_MEB_DIM_CAP = 16


@dataclass(frozen=True)
class SpaceTag:
    """Dimension plus norm tag, fixed for the lifetime of dependent objects."""

    dim: int
    norm: Norm

    def __post_init__(self) -> None:
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 1:
            raise InputError(f"space dim must be a positive integer, got {self.dim!r}")
        if self.norm not in VALID_NORMS:
            raise InputError(f"space norm must be one of {VALID_NORMS}, got {self.norm!r}")


def as_vector(coords: Sequence[float] | np.ndarray, space: SpaceTag) -> np.ndarray:
    arr = np.asarray(coords, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != space.dim:
        raise InputError(f"expected a vector of dim {space.dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("vector entries must be finite")
    return arr


def rowwise_norms(rows: np.ndarray, space: SpaceTag) -> np.ndarray:
    """Norms of the last axis of an array of vectors."""
    if space.norm == "l1":
        return np.abs(rows).sum(axis=-1)
    if space.norm == "l2":
        return np.sqrt((rows * rows).sum(axis=-1))
    return np.abs(rows).max(axis=-1)


def norm(v: Sequence[float] | np.ndarray, space: SpaceTag) -> float:
    """Norm of a single vector under the space tag; 0 exactly for the zero vector."""
    arr = as_vector(v, space)
    return float(rowwise_norms(arr, space))


def distance(u, v, space: SpaceTag) -> float:
    return norm(as_vector(u, space) - as_vector(v, space), space)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite nonempty list of vectors; list order is the canonical tie-break order."""

    points: np.ndarray  # (n, dim)
    space: SpaceTag

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InputError(f"point set must be a nonempty (n, dim) array, got shape {pts.shape}")
        if pts.shape[1] != self.space.dim:
            raise InputError(
                f"points have dim {pts.shape[1]}, space expects {self.space.dim}"
            )
        if not np.all(np.isfinite(pts)):
            raise InputError("point coordinates must be finite")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @staticmethod
    def build(points: Iterable[Sequence[float]] | np.ndarray, space: SpaceTag) -> "PointSet":
        arr = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        return PointSet(arr, space)

    def __len__(self) -> int:
        return self.points.shape[0]

    def vector(self, i: int) -> np.ndarray:
        return self.points[i]


def deduplicate(ps: PointSet) -> PointSet:
    """Collapse exactly-equal points, keeping first occurrences in order."""
    seen: dict[tuple, int] = {}
    keep: list[int] = []
    for i, row in enumerate(ps.points):
        key = tuple(row.tolist())
        if key not in seen:
            seen[key] = i
            keep.append(i)
    if len(keep) == len(ps):
        return ps
    return PointSet(ps.points[keep], ps.space)


def distance_matrix(ps: PointSet) -> np.ndarray:
    """Symmetric nonnegative (n, n) matrix of pairwise distances, zero diagonal."""
    diffs = ps.points[:, None, :] - ps.points[None, :, :]
    mat = rowwise_norms(diffs, ps.space)
    # mirror the upper triangle so the matrix is bit-for-bit symmetric
    mat = np.triu(mat, 1)
    return mat + mat.T


def cross_distances(ps: PointSet, pool: PointSet) -> np.ndarray:
    """(len(ps), len(pool)) matrix of distances; spaces must agree."""
    if ps.space != pool.space:
        raise InputError("point set and pool live in different spaces")
    diffs = ps.points[:, None, :] - pool.points[None, :, :]
    return rowwise_norms(diffs, ps.space)


def diameter(ps: PointSet) -> float:
    """Max pairwise distance; 0 for singletons."""
    if len(ps) == 1:
        return 0.0
    return float(distance_matrix(ps).max())


def scale_set(lam: float, ps: PointSet) -> PointSet:
    return PointSet(lam * ps.points, ps.space)


def minkowski_sum_sets(a: PointSet, b: PointSet) -> PointSet:
    """All pairwise sums, in a-major order (duplicates kept)."""
    if a.space != b.space:
        raise InputError("operands live in different spaces")
    sums = (a.points[:, None, :] + b.points[None, :, :]).reshape(-1, a.space.dim)
    return PointSet(sums, a.space)


def union_sets(a: PointSet, b: PointSet) -> PointSet:
    if a.space != b.space:
        raise InputError("operands live in different spaces")
    return deduplicate(PointSet(np.vstack([a.points, b.points]), a.space))


def pairwise_midpoints(ps: PointSet) -> np.ndarray:
    """Midpoints of all unordered pairs, lexicographic pair order."""
    n = len(ps)
    out = [(ps.points[i] + ps.points[j]) / 2.0 for i in range(n) for j in range(i + 1, n)]
    if not out:
        return np.empty((0, ps.space.dim))
    return np.asarray(out)


@dataclass(frozen=True, eq=False)
class BallSpec:
    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise InputError(f"ball radius must be nonnegative, got {self.radius}")
        c = np.asarray(self.center, dtype=float).copy()
        c.flags.writeable = False
        object.__setattr__(self, "center", c)


def chebyshev_center_linf(ps: PointSet) -> BallSpec:
    """Coordinatewise midrange center; radius is exactly half the linf diameter.

    Finite sets in linf are centrable, so this is a true Chebyshev center.
    """
    if ps.space.norm != "linf":
        raise UnsupportedSpaceError(
            f"exact Chebyshev centers require the linf tag, got {ps.space.norm!r}"
        )
    mins = ps.points.min(axis=0)
    maxs = ps.points.max(axis=0)
    center = (mins + maxs) / 2.0
    radius = float((maxs - mins).max() / 2.0)
    return BallSpec(center, radius)


def min_enclosing_ball_l2(ps: PointSet, dim_cap: int = DEFAULT_MEB_DIM_CAP) -> BallSpec:
    """Exact smallest enclosing Euclidean ball (Welzl's recursive method).

    The reported radius is the max distance from the optimal center to the
    input points, so containment holds by construction.
    """
    if ps.space.norm != "l2":
        raise UnsupportedSpaceError(
            f"min enclosing ball requires the l2 tag, got {ps.space.norm!r}"
        )
    if ps.space.dim > dim_cap:
        raise UnsupportedSpaceError(
            f"dim {ps.space.dim} above the enclosing-ball cap {dim_cap}"
        )
    pts = deduplicate(ps).points
    center = _welzl(pts, list(range(len(pts))), [])[0]
    radius = float(np.sqrt(((ps.points - center) ** 2).sum(axis=1).max()))
    return BallSpec(center, radius)


def _support_ball(pts: np.ndarray, support: list[int]) -> tuple[np.ndarray, float]:
    """Circumball of an affinely independent support set (center, radius^2)."""
    d = pts.shape[1]
    if not support:
        return np.zeros(d), -1.0
    base = pts[support[0]]
    if len(support) == 1:
        return base.copy(), 0.0
    rel = pts[support[1:]] - base
    gram = rel @ rel.T
    rhs = 0.5 * np.einsum("ij,ij->i", rel, rel)
    try:
        t = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        t = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = base + t @ rel
    r2 = float(((center - base) ** 2).sum())
    return center, r2


def _welzl(pts: np.ndarray, todo: list[int], support: list[int]) -> tuple[np.ndarray, float]:
    if not todo or len(support) == pts.shape[1] + 1:
        return _support_ball(pts, support)
    i = todo[0]
    center, r2 = _welzl(pts, todo[1:], support)
    gap = float(((pts[i] - center) ** 2).sum())
    if r2 >= 0 and gap <= r2 + 1e-12 * (1.0 + r2):
        return center, r2
    return _welzl(pts, todo[1:], support + [i])
