"""Executable certificate transforms for the constructive compactness arguments.

Each operation takes explicit witnesses (a feasible partition/correction
witness, pointwise nets, covers), builds the object the corresponding
constructive argument builds, measures the claimed bound by direct
recomputation with plain norms, and reports pass/fail.  Infeasible witnesses
are rejected with the violated constraint named; nothing here searches for
witnesses (the solvers do that).

Budget-transfer bookkeeping: every report records the cardinality of the
constructed object, so inequality checks always compare values at explicitly
transferred budgets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import (
    PointSet,
    chebyshev_center_linf,
    deduplicate,
    min_enclosing_ball_l2,
    rowwise_norms,
)
from .errors import InputError, UnsupportedSpaceError, WitnessRejected
from .families import FunctionFamily, OmegaWitness
from .set_measures import Partition
from .util import digest, jsonable

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PointwiseNets:
    """Representatives x_i per part and per-correction center lists of quality b.

    ``radius`` certifies two things at once for the cover transform: every
    fiber value at a representative lies within b of its nearest center, and
    the induced nearest-center cells have diameter at most b.  Exact nets
    (b = 0, centers = the distinct values) satisfy both trivially.
    """

    representatives: tuple[int, ...]
    centers: tuple[np.ndarray, ...]
    radius: float


@dataclass(frozen=True)
class CertificateReport:
    construction: str
    inputs_digest: str
    constructed: dict
    claimed: float
    measured: float
    passed: bool
    transfer_budget: int | None = None

    def to_dict(self) -> dict:
        return {
            "construction": self.construction,
            "inputs_digest": self.inputs_digest,
            "constructed": jsonable(self.constructed),
            "claimed": self.claimed,
            "measured": self.measured,
            "passed": self.passed,
            "transfer_budget": self.transfer_budget,
        }


# ---------------------------------------------------------------------------
# feasibility checks
# ---------------------------------------------------------------------------


def _check_partition(partition: Partition, n_points: int) -> None:
    seen: set[int] = set()
    for part in partition.parts:
        if not part:
            raise WitnessRejected("partition contains an empty part")
        for i in part:
            if not 0 <= i < n_points:
                raise WitnessRejected(f"partition refers to unknown domain index {i}")
            if i in seen:
                raise WitnessRejected(f"partition parts overlap at domain index {i}")
            seen.add(i)
    if len(seen) != n_points:
        missing = sorted(set(range(n_points)) - seen)
        raise WitnessRejected(f"partition does not cover domain indices {missing}")


def _check_omega_witness(family: FunctionFamily, w: OmegaWitness, tol: float) -> None:
    n_points = len(family.domain)
    _check_partition(w.partition, n_points)
    if w.value < 0:
        raise WitnessRejected("claimed modulus value is negative")
    m = w.phi_values.shape[0]
    if w.phi_values.shape[1:] != (n_points, family.space.dim):
        raise WitnessRejected("correction functions do not conform to the domain/space")
    if len(w.assignment) != len(family):
        raise WitnessRejected("assignment does not cover every family member")
    for f, j in enumerate(w.assignment):
        if not 0 <= j < m:
            raise WitnessRejected(f"assignment of function {family.names[f]!r} out of range")
    for f, j in enumerate(w.assignment):
        g = family.values[f] - w.phi_values[j]
        for pi, part in enumerate(w.partition.parts):
            sub = g[list(part)]
            diffs = sub[:, None, :] - sub[None, :, :]
            d = float(rowwise_norms(diffs, family.space).max())
            if d > w.value + tol:
                raise WitnessRejected(
                    f"corrected diameter of {family.names[f]!r} on part {pi} is "
                    f"{d:.12g} > claimed {w.value:.12g}"
                )


def _fibers(family: FunctionFamily, w: OmegaWitness) -> list[list[int]]:
    m = w.phi_values.shape[0]
    fibers: list[list[int]] = [[] for _ in range(m)]
    for f, j in enumerate(w.assignment):
        fibers[j].append(f)
    return fibers


def _check_nets(
    family: FunctionFamily, w: OmegaWitness, nets: PointwiseNets, tol: float, check_cells: bool
) -> None:
    if nets.radius < 0:
        raise WitnessRejected("net radius is negative")
    n_parts = w.partition.n_parts
    if len(nets.representatives) != n_parts:
        raise WitnessRejected(
            f"expected one representative per part ({n_parts}), got {len(nets.representatives)}"
        )
    for pi, (part, rep) in enumerate(zip(w.partition.parts, nets.representatives)):
        if rep not in part:
            raise WitnessRejected(f"representative {rep} is not a member of part {pi}")
    fibers = _fibers(family, w)
    if len(nets.centers) != len(fibers):
        raise WitnessRejected(
            f"expected one center list per correction ({len(fibers)}), got {len(nets.centers)}"
        )
    for j, members in enumerate(fibers):
        if not members:
            continue
        centers = np.asarray(nets.centers[j], dtype=float)
        if centers.ndim != 2 or centers.shape[0] == 0:
            raise WitnessRejected(f"net for correction {j} is empty while its fiber is not")
        vals = family.values[np.ix_(members, list(nets.representatives))].reshape(
            -1, family.space.dim
        )
        dists = rowwise_norms(vals[:, None, :] - centers[None, :, :], family.space)
        nearest = dists.min(axis=1)
        if float(nearest.max()) > nets.radius + tol:
            bad = int(nearest.argmax())
            raise WitnessRejected(
                f"net for correction {j} misses a fiber value at distance "
                f"{float(nearest.max()):.12g} > radius {nets.radius:.12g} (value row {bad})"
            )
        if check_cells:
            assign = dists.argmin(axis=1)
            for c in sorted(set(assign.tolist())):
                cell = vals[assign == c]
                diffs = cell[:, None, :] - cell[None, :, :]
                d = float(rowwise_norms(diffs, family.space).max())
                if d > nets.radius + tol:
                    raise WitnessRejected(
                        f"net cell {c} of correction {j} has diameter {d:.12g} "
                        f"> radius {nets.radius:.12g}"
                    )


# ---------------------------------------------------------------------------
# witness construction helpers (canonical, deterministic)
# ---------------------------------------------------------------------------


def exact_pointwise_nets(family: FunctionFamily, w: OmegaWitness) -> PointwiseNets:
    """Zero-radius nets: centers are the distinct fiber values at representatives."""
    reps = tuple(part[0] for part in w.partition.parts)
    centers = []
    for members in _fibers(family, w):
        if not members:
            centers.append(np.zeros((1, family.space.dim)))
            continue
        vals = family.values[np.ix_(members, list(reps))].reshape(-1, family.space.dim)
        centers.append(deduplicate(PointSet(vals, family.space)).points)
    return PointwiseNets(reps, tuple(centers), 0.0)


def budgeted_pointwise_nets(family: FunctionFamily, w: OmegaWitness, k: int) -> PointwiseNets:
    """Nets from a k-center solve on each fiber's representative values.

    The reported radius is the measured max of point-to-center distances and
    induced cell diameters, so the nets are feasible by construction.
    """
    from .set_measures import kcenter_restricted

    reps = tuple(part[0] for part in w.partition.parts)
    centers = []
    worst = 0.0
    for members in _fibers(family, w):
        if not members:
            centers.append(np.zeros((1, family.space.dim)))
            continue
        vals = family.values[np.ix_(members, list(reps))].reshape(-1, family.space.dim)
        pts = deduplicate(PointSet(vals, family.space))
        cross = rowwise_norms(
            pts.points[:, None, :] - pts.points[None, :, :], family.space
        )
        bv = kcenter_restricted(cross, k)
        chosen = pts.points[list(bv.witness.centers)]
        centers.append(chosen)
        dists = rowwise_norms(pts.points[:, None, :] - chosen[None, :, :], family.space)
        assign = dists.argmin(axis=1)
        worst = max(worst, float(dists.min(axis=1).max()))
        for c in sorted(set(assign.tolist())):
            cell = pts.points[assign == c]
            diffs = cell[:, None, :] - cell[None, :, :]
            worst = max(worst, float(rowwise_norms(diffs, family.space).max()))
    return PointwiseNets(reps, tuple(centers), worst)


# ---------------------------------------------------------------------------
# certificate transforms
# ---------------------------------------------------------------------------


def construct_alpha_cover(
    family: FunctionFamily,
    w: OmegaWitness,
    nets: PointwiseNets,
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Cover the family by pieces of functions agreeing at representatives.

    Functions in fiber j sharing, at every representative x_i, the same
    nearest net center form one piece; each piece has sup-norm diameter at
    most b + 2a.  The cover size Sum_j k_j^n is the transferred budget.
    """
    _check_omega_witness(family, w, tol)
    _check_nets(family, w, nets, tol, check_cells=True)
    a, b = w.value, nets.radius
    reps = list(nets.representatives)
    fibers = _fibers(family, w)

    pieces: dict[tuple, list[int]] = {}
    for j, members in enumerate(fibers):
        if not members:
            continue
        centers = np.asarray(nets.centers[j], dtype=float)
        for f in members:
            vals = family.values[f, reps]
            sig = tuple(
                int(rowwise_norms(vals[i] - centers, family.space).argmin())
                for i in range(len(reps))
            )
            pieces.setdefault((j, sig), []).append(f)

    measured = 0.0
    for members in pieces.values():
        sub = family.values[members]
        diffs = sub[:, None, :, :] - sub[None, :, :, :]
        if len(members) > 1:
            measured = max(
                measured, float(rowwise_norms(diffs, family.space).max(axis=-1).max())
            )
    claimed = b + 2.0 * a
    transfer = sum(
        len(np.asarray(nets.centers[j])) ** len(reps)
        for j, members in enumerate(fibers)
        if members
    )
    constructed = {
        "pieces": {str(k): sorted(v) for k, v in sorted(pieces.items())},
        "nonempty_pieces": len(pieces),
    }
    inputs = digest({"values": family.values, "witness": w.to_dict(), "radius": nets.radius})
    return CertificateReport(
        "alpha_cover", inputs, constructed, claimed, measured, measured <= claimed + tol, transfer
    )


def construct_gamma_net(
    family: FunctionFamily,
    w: OmegaWitness,
    nets: PointwiseNets,
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Materialize the piecewise-shifted correction functions as an (a+b)-net.

    psi_{j,h}(x) = phi_j(x) - phi_j(x_i) + y^j_{h(i)} on part i; every family
    member is within a + b of the psi built from its own assignment.
    """
    _check_omega_witness(family, w, tol)
    _check_nets(family, w, nets, tol, check_cells=False)
    a, b = w.value, nets.radius
    reps = list(nets.representatives)
    n_points = len(family.domain)
    part_of = [0] * n_points
    for pi, part in enumerate(w.partition.parts):
        for x in part:
            part_of[x] = pi

    psis: dict[tuple, np.ndarray] = {}
    measured = 0.0
    for f, j in enumerate(w.assignment):
        centers = np.asarray(nets.centers[j], dtype=float)
        vals = family.values[f, reps]
        h = tuple(
            int(rowwise_norms(vals[i] - centers, family.space).argmin())
            for i in range(len(reps))
        )
        key = (j, h)
        if key not in psis:
            psi = np.empty((n_points, family.space.dim))
            for x in range(n_points):
                i = part_of[x]
                psi[x] = w.phi_values[j, x] - w.phi_values[j, reps[i]] + centers[h[i]]
            psis[key] = psi
        dist = float(rowwise_norms(family.values[f] - psis[key], family.space).max())
        measured = max(measured, dist)

    claimed = a + b
    fibers = _fibers(family, w)
    transfer = sum(
        len(np.asarray(nets.centers[j])) ** len(reps)
        for j, members in enumerate(fibers)
        if members
    )
    constructed = {
        "net_functions": len(psis),
        "net_keys": [str(k) for k in sorted(psis)],
    }
    inputs = digest({"values": family.values, "witness": w.to_dict(), "radius": nets.radius})
    return CertificateReport(
        "gamma_net", inputs, constructed, claimed, measured, measured <= claimed + tol, transfer
    )


def refine_partition_tb(
    family: FunctionFamily,
    w: OmegaWitness,
    net_centers: np.ndarray | Sequence[Sequence[float]],
    delta: float,
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Refine the witness partition by preimages of a net over pooled corrections.

    With T the pooled correction images and a delta-net of T, the common
    refinement of the witness partition with the correction preimages keeps
    every plain image diameter below a + 2*delta.
    """
    _check_omega_witness(family, w, tol)
    if delta < 0:
        raise WitnessRejected("delta must be nonnegative")
    centers = np.asarray(net_centers, dtype=float)
    if centers.ndim != 2 or centers.shape[0] == 0 or centers.shape[1] != family.space.dim:
        raise WitnessRejected("delta-net must be a nonempty list of space vectors")
    m, n_points = w.phi_values.shape[0], len(family.domain)
    pooled = w.phi_values.reshape(-1, family.space.dim)
    dists = rowwise_norms(pooled[:, None, :] - centers[None, :, :], family.space)
    if float(dists.min(axis=1).max()) > delta + tol:
        raise WitnessRejected(
            f"delta-net misses a pooled correction value at distance "
            f"{float(dists.min(axis=1).max()):.12g} > delta {delta:.12g}"
        )

    part_of = [0] * n_points
    for pi, part in enumerate(w.partition.parts):
        for x in part:
            part_of[x] = pi
    cells: dict[tuple, list[int]] = {}
    for x in range(n_points):
        sig = (part_of[x],) + tuple(
            int(rowwise_norms(w.phi_values[j, x] - centers, family.space).argmin())
            for j in range(m)
        )
        cells.setdefault(sig, []).append(x)

    measured = 0.0
    for members in cells.values():
        sub = family.values[:, members, :]
        diffs = sub[:, :, None, :] - sub[:, None, :, :]
        if len(members) > 1:
            measured = max(measured, float(rowwise_norms(diffs, family.space).max()))
    claimed = w.value + 2.0 * delta
    bound = w.partition.n_parts * centers.shape[0] ** m
    constructed = {
        "cells": sorted(tuple(v) for v in cells.values()),
        "q": len(cells),
        "q_bound": bound,
    }
    inputs = digest(
        {"values": family.values, "witness": w.to_dict(), "centers": centers, "delta": delta}
    )
    return CertificateReport(
        "refine_partition_tb",
        inputs,
        constructed,
        claimed,
        measured,
        measured <= claimed + tol,
        len(cells),
    )


def _check_function_cover(
    family: FunctionFamily, cover: Partition, a: float, tol: float
) -> None:
    _check_partition(cover, len(family))
    if a < 0:
        raise WitnessRejected("claimed cover diameter is negative")
    for pi, piece in enumerate(cover.parts):
        sub = family.values[list(piece)]
        diffs = sub[:, None, :, :] - sub[None, :, :, :]
        d = float(rowwise_norms(diffs, family.space).max(axis=-1).max()) if len(piece) > 1 else 0.0
        if d > a + tol:
            raise WitnessRejected(
                f"cover piece {pi} has sup diameter {d:.12g} > claimed {a:.12g}"
            )


def sigma_cover_from_alpha(
    family: FunctionFamily,
    cover: Partition,
    a: float,
    delta_centers: np.ndarray | Sequence[Sequence[float]],
    delta: float,
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Balls around a delta-cover of representative images cover the total image.

    Representatives are the first function of each cover piece; the image
    M(Omega) is covered at radius a + delta.
    """
    _check_function_cover(family, cover, a, tol)
    if delta < 0:
        raise WitnessRejected("delta must be nonnegative")
    centers = np.asarray(delta_centers, dtype=float)
    if centers.ndim != 2 or centers.shape[0] == 0 or centers.shape[1] != family.space.dim:
        raise WitnessRejected("delta-cover must be a nonempty list of space vectors")
    reps = [piece[0] for piece in cover.parts]
    rep_values = family.values[reps].reshape(-1, family.space.dim)
    rep_dists = rowwise_norms(rep_values[:, None, :] - centers[None, :, :], family.space)
    if float(rep_dists.min(axis=1).max()) > delta + tol:
        raise WitnessRejected(
            f"delta-cover misses a representative image value at distance "
            f"{float(rep_dists.min(axis=1).max()):.12g} > delta {delta:.12g}"
        )
    all_values = family.values.reshape(-1, family.space.dim)
    dists = rowwise_norms(all_values[:, None, :] - centers[None, :, :], family.space)
    measured = float(dists.min(axis=1).max())
    claimed = a + delta
    constructed = {"ball_centers": centers, "n_balls": centers.shape[0]}
    inputs = digest(
        {
            "values": family.values,
            "cover": cover.to_dict(),
            "a": a,
            "centers": centers,
            "delta": delta,
        }
    )
    return CertificateReport(
        "sigma_cover_from_alpha",
        inputs,
        constructed,
        claimed,
        measured,
        measured <= claimed + tol,
        centers.shape[0],
    )


def lindenstrauss_phi(
    family: FunctionFamily,
    cover: Partition,
    a: float,
    delta: float = 0.0,
    point_nets: Mapping[tuple[int, int], np.ndarray] | None = None,
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Pointwise Chebyshev centers of inner nets correct each cover piece.

    For linf values the center radius is exactly half the net diameter, so
    every f in piece i satisfies ||f - phi_i||_inf <= a/2 + delta; the
    induced single-part modulus value <= a + 2*delta is reported alongside.
    With l2 values the enclosing-ball radius replaces a/2.
    """
    if family.space.norm not in ("linf", "l2"):
        raise UnsupportedSpaceError(
            f"pointwise Chebyshev construction needs linf or l2 values, got {family.space.norm!r}"
        )
    _check_function_cover(family, cover, a, tol)
    if delta < 0:
        raise WitnessRejected("delta must be nonnegative")
    n_points = len(family.domain)
    phis = np.empty((cover.n_parts, n_points, family.space.dim))
    max_radius = 0.0
    for pi, piece in enumerate(cover.parts):
        piece_vals = family.values[list(piece)]
        for x in range(n_points):
            value_set = piece_vals[:, x, :]
            if point_nets is not None:
                net = np.asarray(point_nets[(pi, x)], dtype=float)
                if net.ndim != 2 or net.shape[0] == 0:
                    raise WitnessRejected(f"inner net for piece {pi}, point {x} is empty")
                inner = rowwise_norms(
                    net[:, None, :] - value_set[None, :, :], family.space
                ).min(axis=1)
                if float(inner.max()) > tol:
                    raise WitnessRejected(
                        f"net for piece {pi}, point {x} is not inner (outside value set)"
                    )
                coverage = rowwise_norms(
                    value_set[:, None, :] - net[None, :, :], family.space
                ).min(axis=1)
                if float(coverage.max()) > delta + tol:
                    raise WitnessRejected(
                        f"net for piece {pi}, point {x} is not a delta-net of the value set"
                    )
            else:
                net = value_set
            pts = PointSet(net, family.space)
            ball = (
                chebyshev_center_linf(pts)
                if family.space.norm == "linf"
                else min_enclosing_ball_l2(pts)
            )
            phis[pi, x] = ball.center
            max_radius = max(max_radius, ball.radius)

    measured = 0.0
    omega_measured = 0.0
    for pi, piece in enumerate(cover.parts):
        for f in piece:
            diff = family.values[f] - phis[pi]
            measured = max(measured, float(rowwise_norms(diff, family.space).max()))
            spreads = diff[:, None, :] - diff[None, :, :]
            omega_measured = max(omega_measured, float(rowwise_norms(spreads, family.space).max()))
    claimed = (0.5 * a if family.space.norm == "linf" else max_radius) + delta
    constructed = {
        "phi_functions": cover.n_parts,
        "max_center_radius": max_radius,
        "omega_style_measured": omega_measured,
        "omega_style_claimed": a + 2.0 * delta,
    }
    inputs = digest(
        {"values": family.values, "cover": cover.to_dict(), "a": a, "delta": delta}
    )
    return CertificateReport(
        "lindenstrauss_phi",
        inputs,
        constructed,
        claimed,
        measured,
        measured <= claimed + tol,
        cover.n_parts,
    )
