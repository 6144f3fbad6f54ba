"""Parameterized generators for the worked example families.

Each generator builds a family (plus pools and, where relevant, a
differentiated grid family) at an explicit truncation scale, re-verifies its
structural facts at construction, and attaches a table of expected values.
Table rows carry provenance: values that hold exactly at any finite scale,
values derived for the generated truncation by direct evaluation, and
finite-scale forms of asymptotic limits.

``check_example`` recomputes every row through the public solvers and
reports pass/fail per row; the reproduce CLI command is a thin wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ck import CkFamily, GridDomain, WindowSpec, differentiate, family_on_grid, restrict_to_window
from .core import SpaceTag, pairwise_midpoints
from .errors import InputError
from .families import (
    Domain,
    FunctionFamily,
    family_alpha_budget,
    family_beta_sep,
    family_gamma_budget,
    family_image,
    mu_alpha_budget,
    mu_gamma_budget,
    nussbaum_modulus,
    omega_budget,
    omega_ext_budget,
    sigma_alpha_budget,
    sigma_gamma_budget,
    sup_cross_matrix,
    sup_dist,
    sup_distance_matrix,
)


@dataclass(frozen=True)
class ExpectedRow:
    quantity: str
    budget: dict
    expected: float
    relation: str = "eq"  # eq | le | ge
    provenance: str = "derived"  # paper | paper-asymptotic | derived | trivial
    note: str = ""


@dataclass(frozen=True, eq=False)
class GeneratedExample:
    name: str
    scale: dict
    family: FunctionFamily
    pools: dict = field(default_factory=dict)
    ck: CkFamily | None = None
    expected: tuple[ExpectedRow, ...] = ()


def _assert_structure(cond: bool, message: str) -> None:
    if not cond:
        raise RuntimeError(f"generator structural check failed: {message}")


# ---------------------------------------------------------------------------
# spike family in linf: pointwise compact, far from compact as a family
# ---------------------------------------------------------------------------


def gen_spike_linf(K: int, N: int) -> GeneratedExample:
    """K functions, each spiking through the N basis vectors at private domain points.

    Every pair of functions is at sup distance exactly 1; all value sets have
    at most two points, so pointwise characteristics die at budget 2 while the
    family-level measure stays at 1 below budget K.  The domain modulus stays
    at 1 until the partition budget exceeds the K*N spike points.
    """
    if K < 2 or N < 2:
        raise InputError(f"spike example needs K, N >= 2, got {(K, N)}")
    labels = [f"s{k}.{n}" for k in range(1, K + 1) for n in range(1, N + 1)] + ["base"]
    domain = Domain(tuple(labels))
    space = SpaceTag(N, "linf")
    values = np.zeros((K, len(labels), N))
    for k in range(K):
        for n in range(N):
            values[k, k * N + n, n] = 1.0
    family = FunctionFamily(
        domain, space, tuple(f"f{k}" for k in range(1, K + 1)), values
    )

    mat = sup_distance_matrix(family)
    off = mat[np.triu_indices(K, 1)]
    _assert_structure(np.all(off == 1.0), "pairwise sup distances must all equal 1")

    expected = (
        ExpectedRow("supdist_min", {}, 1.0, "eq", "paper"),
        ExpectedRow("supdist_max", {}, 1.0, "eq", "paper"),
        ExpectedRow("family_alpha", {"k": K - 1}, 1.0, "eq", "paper"),
        ExpectedRow("family_alpha", {"k": K}, 0.0, "eq", "trivial"),
        ExpectedRow("family_beta", {"k": K - 1}, 1.0, "eq", "paper"),
        ExpectedRow("mu_alpha", {"k": 1}, 1.0, "eq", "derived"),
        ExpectedRow("mu_alpha", {"k": 2}, 0.0, "eq", "paper", note="pointwise sets have <= 2 points"),
        ExpectedRow("omega", {"n": 1}, 1.0, "eq", "paper"),
        ExpectedRow("omega", {"n": K * N}, 1.0, "eq", "derived"),
        ExpectedRow("omega", {"n": K * N + 1}, 0.0, "eq", "derived"),
        ExpectedRow("sigma_alpha", {"k": 1}, 1.0, "eq", "derived"),
        ExpectedRow("omega_ext", {"n": 1, "m": K, "pool": "self"}, 0.0, "eq", "trivial"),
    )
    return GeneratedExample("spike", {"K": K, "N": N}, family, {}, None, expected)


# ---------------------------------------------------------------------------
# identity on a sampled ball: compact as a family, large image measures
# ---------------------------------------------------------------------------


def gen_identity_ball(d: int, samples: int | None = None, seed: int = 0) -> GeneratedExample:
    """The singleton family {identity} on a deterministic sample of the unit linf ball.

    Antipodal basis samples pin the image diameter at exactly 2 and the
    origin-centered net radius at exactly 1, the asymptotic values.
    """
    if d < 2:
        raise InputError(f"identity-ball example needs d >= 2, got {d}")
    pts: list[np.ndarray] = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        pts.append(e.copy())
        pts.append(-e)
    if d <= 3:
        from itertools import product

        for signs in product((-1.0, 1.0), repeat=d):
            pts.append(np.asarray(signs))
    target = samples if samples is not None else len(pts)
    if target < 2:
        raise InputError("identity-ball example needs at least 2 samples")
    rng = np.random.default_rng(seed)
    seen = {tuple(p.tolist()) for p in pts[:target]}
    pts = pts[:target]
    while len(pts) < target:
        cand = np.round(rng.uniform(-1.0, 1.0, size=d) * 4) / 4.0
        key = tuple(cand.tolist())
        if key in seen:
            continue
        seen.add(key)
        pts.append(cand)

    space = SpaceTag(d, "linf")
    domain = Domain(tuple(f"y{i}" for i in range(len(pts))))
    values = np.asarray(pts)[None, :, :]
    family = FunctionFamily(domain, space, ("identity",), values)

    _assert_structure(
        float(np.abs(values).max()) <= 1.0, "samples must lie in the unit ball"
    )
    _assert_structure(
        any(tuple((-p).tolist()) in seen for p in pts), "an antipodal pair is required"
    )

    expected = (
        ExpectedRow("family_alpha", {"k": 1}, 0.0, "eq", "paper"),
        ExpectedRow("mu_alpha", {"k": 1}, 0.0, "eq", "paper"),
        ExpectedRow("mu_gamma", {"k": 1}, 0.0, "eq", "paper"),
        ExpectedRow("sigma_alpha", {"k": 1}, 2.0, "eq", "paper-asymptotic",
                    note="exact here because antipodal samples are included"),
        ExpectedRow("sigma_gamma", {"k": 1, "pool": "zero"}, 1.0, "eq", "paper-asymptotic"),
        ExpectedRow("omega", {"n": 1}, 2.0, "eq", "paper-asymptotic"),
        ExpectedRow("omega_ext", {"n": 1, "m": 1, "pool": "self"}, 0.0, "eq", "trivial"),
    )
    pools = {"zero": np.zeros((1, d))}
    return GeneratedExample(
        "identity-ball", {"d": d, "samples": len(pts), "seed": seed}, family, pools, None, expected
    )


# ---------------------------------------------------------------------------
# l1 basis spikes: the half-net versus full-height-pool gap
# ---------------------------------------------------------------------------


def gen_l1_basis(K: int) -> GeneratedExample:
    """Basis-spike functions into l1 with the half-height diagonal as a 1/2-net.

    The diagonal correction g sits at sup distance exactly 1/2 from every
    member, but every full-height candidate in the restricted pool stays at
    distance >= 1, so the pool-restricted net radius is pinned at 1 for all
    budgets up to K.
    """
    if K < 2:
        raise InputError(f"l1 example needs K >= 2, got {K}")
    dim = K + 1
    space = SpaceTag(dim, "l1")
    domain = Domain(tuple(f"n{i}" for i in range(1, K + 2)))
    n_pts = K + 1

    values = np.zeros((K, n_pts, dim))
    for k in range(K):
        values[k, k, k] = 1.0
    family = FunctionFamily(domain, space, tuple(f"f{k}" for k in range(1, K + 1)), values)

    g_vals = np.zeros((1, n_pts, dim))
    for p in range(n_pts):
        g_vals[0, p, p] = 0.5
    pool_g = FunctionFamily(domain, space, ("g",), g_vals)

    # full-height candidates: constants e_j, the zero function, the diagonal
    names = [f"const_e{j}" for j in range(1, dim + 1)] + ["zero", "diag"]
    t_vals = np.zeros((dim + 2, n_pts, dim))
    for j in range(dim):
        t_vals[j, :, j] = 1.0
    for p in range(n_pts):
        t_vals[dim + 1, p, p] = 1.0
    pool_t = FunctionFamily(domain, space, tuple(names), t_vals)

    cross_g = sup_cross_matrix(family, pool_g)
    _assert_structure(np.all(cross_g == 0.5), "distance to the half-height diagonal must be 1/2")
    cross_t = sup_cross_matrix(family, pool_t)
    _assert_structure(np.all(cross_t >= 1.0), "full-height pool must stay at distance >= 1")
    image = family_image(family)
    _assert_structure(len(image) == K + 1, "image must be the K basis vectors plus the origin")

    mids = pairwise_midpoints(image)
    pools = {
        "g": pool_g,
        "tproxy": pool_t,
        "midpoints": np.vstack([image.points, mids]),
    }
    expected = (
        ExpectedRow("pool_supdist_max", {"pool": "g"}, 0.5, "eq", "paper"),
        ExpectedRow("family_gamma", {"k": 1, "pool": "g"}, 0.5, "eq", "paper"),
        ExpectedRow("supdist_min", {}, 1.0, "eq", "derived"),
        ExpectedRow("sigma_gamma", {"k": K - 1, "pool": "midpoints"}, 1.0, "eq", "paper"),
        ExpectedRow("family_gamma", {"k": 1, "pool": "tproxy"}, 1.0, "eq", "paper",
                    note="finite form of the full-height pool value"),
        ExpectedRow("family_gamma", {"k": K, "pool": "tproxy"}, 1.0, "eq", "derived"),
        ExpectedRow("omega", {"n": K}, 1.0, "eq", "derived"),
        ExpectedRow("omega", {"n": K + 1}, 0.0, "eq", "derived"),
    )
    return GeneratedExample("l1-basis", {"K": K}, family, pools, None, expected)


# ---------------------------------------------------------------------------
# Lindenstrauss bump family: translation bumps on disjoint balls
# ---------------------------------------------------------------------------


def gen_lindenstrauss_bumps(
    d: int = 4, n_balls: int = 3, samples_per_ball: int = 6, seed: int = 0
) -> GeneratedExample:
    """Bump functions y -> y - y_n on disjoint unit balls in linf.

    Pairwise sup distances are exactly 1, the single-part modulus is 2, and
    the averaged correction halves every bump, giving the pool-corrected
    modulus exactly 1 at budget (1, 1).
    """
    if d < 3:
        raise InputError(f"bump example needs d >= 3, got {d}")
    if n_balls < 2:
        raise InputError(f"bump example needs >= 2 balls, got {n_balls}")
    if samples_per_ball < 6:
        raise InputError(f"bump example needs >= 6 samples per ball, got {samples_per_ball}")
    centers = np.zeros((n_balls, d))
    for i in range(n_balls):
        centers[i, 0] = 3.0 * i
    for i in range(n_balls):
        for j in range(i + 1, n_balls):
            if float(np.abs(centers[i] - centers[j]).max()) < 2.0:
                raise InputError("ball centers too close: pairwise linf distance must be >= 2")

    offsets: list[np.ndarray] = [np.zeros(d)]
    for axis in range(1, d):
        e = np.zeros(d)
        e[axis] = 1.0
        offsets.append(e.copy())
        offsets.append(-e)
    rng = np.random.default_rng(seed)
    while len(offsets) < samples_per_ball:
        cand = np.round(rng.uniform(-1.0, 1.0, size=d) * 4) / 4.0
        if any(np.array_equal(cand, o) for o in offsets):
            continue
        offsets.append(cand)
    offsets = offsets[:samples_per_ball]

    labels = []
    sample_pts = []
    for i in range(n_balls):
        for j, off in enumerate(offsets):
            labels.append(f"b{i + 1}.s{j}")
            sample_pts.append(centers[i] + off)
    domain = Domain(tuple(labels))
    space = SpaceTag(d, "linf")
    samples_arr = np.asarray(sample_pts)

    n_pts = len(labels)
    values = np.zeros((n_balls, n_pts, d))
    ball_of_point = np.repeat(np.arange(n_balls), samples_per_ball)
    for f in range(n_balls):
        for p in range(n_pts):
            if ball_of_point[p] == f:
                values[f, p] = samples_arr[p] - centers[f]
    family = FunctionFamily(
        domain, space, tuple(f"f{i}" for i in range(1, n_balls + 1)), values
    )

    phi = 0.5 * values.sum(axis=0, keepdims=True)
    pool_phi = FunctionFamily(domain, space, ("phi",), phi)

    mat = sup_distance_matrix(family)
    off_diag = mat[np.triu_indices(n_balls, 1)]
    _assert_structure(np.all(off_diag == 1.0), "pairwise sup distances must all equal 1")
    _assert_structure(
        all(
            float(np.abs(samples_arr[p] - centers[ball_of_point[p]]).max()) <= 1.0
            for p in range(n_pts)
        ),
        "samples must stay inside their balls",
    )
    # the sample offsets must contain a +-v pair of full height
    has_antipodal = any(
        float(np.abs(o).max()) == 1.0
        and any(np.array_equal(o2, -o) for o2 in offsets)
        for o in offsets
    )
    _assert_structure(has_antipodal, "an antipodal sample pair is required in every ball")

    expected = (
        ExpectedRow("supdist_min", {}, 1.0, "eq", "paper"),
        ExpectedRow("supdist_max", {}, 1.0, "eq", "paper"),
        ExpectedRow("family_alpha", {"k": n_balls - 1}, 1.0, "eq", "paper"),
        ExpectedRow("omega", {"n": 1}, 2.0, "eq", "paper"),
        ExpectedRow("omega_ext", {"n": 1, "m": 1, "pool": "phi"}, 1.0, "eq", "paper",
                    note="exact because each ball holds an antipodal sample pair"),
    )
    return GeneratedExample(
        "lindenstrauss",
        {"d": d, "balls": n_balls, "samples_per_ball": samples_per_ball},
        family,
        {"phi": pool_phi},
        None,
        expected,
    )


# ---------------------------------------------------------------------------
# ramp family: vanishing pointwise/image characteristics, no compactness
# ---------------------------------------------------------------------------


def gen_ramp_family(n_max: int = 6, grid_points: int = 121) -> GeneratedExample:
    """Steepening ramps through 1/2 on a uniform grid of [0, 1].

    Every pointwise and image characteristic decays to 0 as the budget grows,
    yet the pairwise sup distances stay bounded below: the classical witness
    that those characteristics alone cannot detect noncompactness.
    """
    if n_max < 4:
        raise InputError(f"ramp example needs n_max >= 4, got {n_max}")
    L = grid_points - 1
    for m in range(2, n_max + 1):
        if L % m:
            raise InputError(
                f"grid too coarse: grid_points - 1 must be divisible by every m <= {n_max}"
            )
    ts = np.arange(grid_points) / L
    h = 1.0 / L

    def ramp(n: int, t: np.ndarray) -> np.ndarray:
        lo, hi = 0.5 - 1.0 / n, 0.5 + 1.0 / n
        out = np.where(t < lo, 0.0, np.where(t >= hi, 1.0, (t - lo) * n / 2.0))
        return out

    ns = list(range(3, n_max + 1))
    space = SpaceTag(1, "linf")
    domain = Domain(tuple(f"t{i}" for i in range(grid_points)), coords=ts[:, None], metric="linf")
    values = np.asarray([ramp(n, ts)[:, None] for n in ns])
    family = FunctionFamily(domain, space, tuple(f"r{n}" for n in ns), values)

    for ai, n in enumerate(ns):
        for bi in range(ai + 1, len(ns)):
            m = ns[bi]
            want = 0.5 - n / (2.0 * m)
            got = sup_dist(family, ai, bi)
            _assert_structure(
                abs(got - want) <= 1e-12, f"||r{n} - r{m}|| must be 1/2 - {n}/(2*{m})"
            )

    n_image = len(family_image(family))
    min_pair = 0.5 - (n_max - 1) / (2.0 * n_max)
    expected = (
        ExpectedRow("supdist_min", {}, min_pair, "eq", "derived",
                    note="family stays separated at every scale"),
        ExpectedRow("supdist_pair", {"f": "r3", "g": f"r{n_max}"}, 0.5 - 3 / (2.0 * n_max),
                    "eq", "derived"),
        ExpectedRow("nussbaum", {"delta": h}, (n_max / 2.0) * h, "eq", "derived",
                    note="steepest ramp slope times one grid step"),
        ExpectedRow("nussbaum", {"delta": 0.0}, 0.0, "eq", "trivial"),
        ExpectedRow("mu_alpha", {"k": len(ns)}, 0.0, "eq", "derived",
                    note="pointwise sets have at most one value per member"),
        ExpectedRow("sigma_alpha", {"k": n_image}, 0.0, "eq", "trivial"),
        ExpectedRow("mu_alpha", {"k": 1}, 1.0, "le", "paper-asymptotic",
                    note="decays toward 0 as the budget grows at fixed grid"),
    )
    return GeneratedExample(
        "ramp", {"n_max": n_max, "grid_points": grid_points}, family, {}, None, expected
    )


# ---------------------------------------------------------------------------
# interval spikes: compact function, noncompact differential
# ---------------------------------------------------------------------------


def gen_interval_spikes_ck(
    n_intervals: int = 3, points_per_interval: int = 9
) -> GeneratedExample:
    """One function, linear bumps (x - n) e_n on shrinking disjoint intervals.

    The base image shrinks with 1/(2n) per interval, but the first
    differential hits a fresh basis vector on every interval, so image
    measures of the differential level stay at 2 below budget n_intervals.
    """
    if n_intervals < 2:
        raise InputError(f"interval example needs >= 2 intervals, got {n_intervals}")
    if points_per_interval < 4:
        raise InputError(f"interval example needs >= 4 points per interval, got {points_per_interval}")
    N = n_intervals
    h = 1.0 / (N * points_per_interval)
    count = int(round((N + 1) / h)) + 1
    segments = []
    windows = []
    for n in range(1, N + 1):
        lo, hi = n - 0.5 / n, n + 0.5 / n
        idx = [i for i in range(count) if lo + 1e-12 < i * h < hi - 1e-12]
        if len(idx) < 4:
            raise InputError("grid misalignment: an interval holds fewer than 4 grid points")
        segments.append((idx[0], idx[-1]))
        windows.append(WindowSpec(idx[0], idx[-1]))
    grid = GridDomain(0.0, h, count, tuple(segments))

    xs = grid.xs()
    space = SpaceTag(N, "l1")
    vals = np.zeros((len(xs), N))
    spans = []
    amaxes = []
    for seg_i, (offset, length) in enumerate(grid.segment_slices()):
        n = seg_i + 1
        seg_x = xs[offset : offset + length]
        vals[offset : offset + length, seg_i] = seg_x - n
        spans.append(float(seg_x.max() - seg_x.min()))
        amaxes.append(float(np.abs(seg_x - n).max()))
    base = family_on_grid(grid, space, [("bump", vals)])
    ck = differentiate(base, 1, grid)

    level1 = ck.levels[1].values[0]
    for seg_i, (offset, length) in enumerate(grid.segment_slices()):
        expect = np.zeros(N)
        expect[seg_i] = 1.0
        _assert_structure(
            np.allclose(level1[offset : offset + length], expect, atol=1e-9),
            "differential must be the basis vector on each interval",
        )

    # base-image diameter in l1: within-interval spans versus cross-interval sums
    cross = max(
        amaxes[i] + amaxes[j] for i in range(N) for j in range(i + 1, N)
    )
    base_diam = max(max(spans), cross)
    expected_rows = [
        ExpectedRow("ck_sigma_alpha_level", {"p": 1, "k": N - 1}, 2.0, "eq", "paper-asymptotic",
                    note="finite form of the noncompact-differential witness"),
        ExpectedRow("ck_sigma_alpha_level", {"p": 1, "k": N}, 0.0, "eq", "trivial"),
        ExpectedRow("ck_sigma_alpha_level", {"p": 0, "k": 1}, base_diam, "eq", "derived"),
    ]
    # per-window image diameters shrink with the interval length
    for n, (w, span) in enumerate(zip(windows, spans), start=1):
        expected_rows.append(
            ExpectedRow(
                "window_sigma_alpha",
                {"p": 0, "k": 1, "window": [w.lo, w.hi]},
                span,
                "eq",
                "derived",
            )
        )
    return GeneratedExample(
        "interval-spikes-ck",
        {"intervals": N, "points_per_interval": points_per_interval},
        base,
        {},
        ck,
        tuple(expected_rows),
    )


# ---------------------------------------------------------------------------
# continuous-ramp spikes: the halved-correction example with value ramps
# ---------------------------------------------------------------------------


def gen_c01_ramp_spikes(K: int = 3, N: int = 2, d: int = 5) -> GeneratedExample:
    """Spike family whose values are ramp functions sampled on a d-point grid.

    The averaged correction leaves residues +-psi/2 which still collide at
    the right endpoint, so the single-part corrected modulus is 1; allowing K
    parts separates the spike groups and achieves exactly 1/2.
    """
    if K < 2 or N < 2:
        raise InputError(f"ramp-spike example needs K, N >= 2, got {(K, N)}")
    if d < 3:
        raise InputError(f"ramp-spike example needs a grid of >= 3 points, got {d}")
    ts = np.linspace(0.0, 1.0, d)

    def psi(n: int) -> np.ndarray:
        lo = 1.0 - 1.0 / n
        return np.where(ts <= lo, 0.0, (ts - lo) * n)

    labels = [f"s{k}.{n}" for k in range(1, K + 1) for n in range(1, N + 1)] + ["base"]
    domain = Domain(tuple(labels))
    space = SpaceTag(d, "linf")
    values = np.zeros((K, len(labels), d))
    for k in range(K):
        for n in range(1, N + 1):
            values[k, k * N + (n - 1)] = psi(n)
    family = FunctionFamily(domain, space, tuple(f"f{k}" for k in range(1, K + 1)), values)

    phi = 0.5 * values.sum(axis=0, keepdims=True)
    pool_phi = FunctionFamily(domain, space, ("phi",), phi)

    mat = sup_distance_matrix(family)
    _assert_structure(
        np.all(mat[np.triu_indices(K, 1)] == 1.0), "pairwise sup distances must equal 1"
    )
    _assert_structure(float(np.abs(psi(N)).max()) == 1.0, "ramps must reach height 1 on the grid")

    expected = (
        ExpectedRow("supdist_min", {}, 1.0, "eq", "paper"),
        ExpectedRow("family_alpha", {"k": K - 1}, 1.0, "eq", "paper"),
        ExpectedRow("omega_ext", {"n": 1, "m": 1, "pool": "phi"}, 1.0, "eq", "derived",
                    note="positive and negative residues collide at the endpoint"),
        ExpectedRow("omega_ext", {"n": K, "m": 1, "pool": "phi"}, 0.5, "eq", "derived",
                    note="separating the spike groups realizes the halved value"),
    )
    return GeneratedExample(
        "c01-ramp-spikes", {"K": K, "N": N, "d": d}, family, {"phi": pool_phi}, None, expected
    )


# ---------------------------------------------------------------------------
# evaluation of expected tables
# ---------------------------------------------------------------------------

GENERATORS = {
    "spike": gen_spike_linf,
    "identity-ball": gen_identity_ball,
    "l1-basis": gen_l1_basis,
    "lindenstrauss": gen_lindenstrauss_bumps,
    "ramp": gen_ramp_family,
    "interval-spikes-ck": gen_interval_spikes_ck,
    "c01-ramp-spikes": gen_c01_ramp_spikes,
}


def _resolve_phi_pool(ex: GeneratedExample, name: str) -> FunctionFamily:
    if name == "self":
        return ex.family
    pool = ex.pools.get(name)
    if not isinstance(pool, FunctionFamily):
        raise InputError(f"example {ex.name!r} has no function pool named {name!r}")
    return pool


def evaluate_quantity(ex: GeneratedExample, quantity: str, budget: dict) -> float:
    """Recompute one expected-table row through the public solvers."""
    fam = ex.family
    if quantity in ("supdist_min", "supdist_max"):
        mat = sup_distance_matrix(fam)
        off = mat[np.triu_indices(len(fam), 1)]
        return float(off.min() if quantity == "supdist_min" else off.max())
    if quantity == "supdist_pair":
        return sup_dist(fam, budget["f"], budget["g"])
    if quantity in ("pool_supdist_max", "pool_supdist_min"):
        cross = sup_cross_matrix(fam, _resolve_phi_pool(ex, budget["pool"]))
        return float(cross.max() if quantity == "pool_supdist_max" else cross.min())
    if quantity == "family_alpha":
        return family_alpha_budget(fam, budget["k"]).value
    if quantity == "family_beta":
        return family_beta_sep(fam, budget["k"]).value
    if quantity == "family_gamma":
        return family_gamma_budget(fam, budget["k"], _resolve_phi_pool(ex, budget["pool"])).value
    if quantity == "mu_alpha":
        return mu_alpha_budget(fam, budget["k"]).value
    if quantity == "mu_gamma":
        return mu_gamma_budget(fam, budget["k"]).value
    if quantity == "sigma_alpha":
        return sigma_alpha_budget(fam, budget["k"]).value
    if quantity == "sigma_gamma":
        extras = ex.pools.get(budget.get("pool", ""), None)
        if extras is not None and isinstance(extras, FunctionFamily):
            raise InputError("sigma_gamma pools must be vector pools")
        return sigma_gamma_budget(fam, budget["k"], extras=extras).value
    if quantity == "omega":
        return omega_budget(fam, budget["n"]).value
    if quantity == "omega_ext":
        pool = _resolve_phi_pool(ex, budget.get("pool", "self"))
        return omega_ext_budget(fam, (budget["n"], budget["m"]), pool=pool).value
    if quantity == "nussbaum":
        return nussbaum_modulus(fam, budget["delta"])
    if quantity == "ck_sigma_alpha_level":
        if ex.ck is None:
            raise InputError(f"example {ex.name!r} has no differentiated layer")
        level = ex.ck.levels[budget["p"]]
        return sigma_alpha_budget(level, budget["k"]).value
    if quantity == "window_sigma_alpha":
        if ex.ck is None:
            raise InputError(f"example {ex.name!r} has no differentiated layer")
        lo, hi = budget["window"]
        restricted = restrict_to_window(ex.ck, WindowSpec(lo, hi))
        return sigma_alpha_budget(restricted.levels[budget["p"]], budget["k"]).value
    raise InputError(f"unknown quantity {quantity!r}")


def check_example(ex: GeneratedExample, tol: float = 1e-9) -> list[dict]:
    """Evaluate every expected row; returns one result dict per row."""
    rows = []
    for row in ex.expected:
        computed = evaluate_quantity(ex, row.quantity, row.budget)
        if row.relation == "eq":
            ok = abs(computed - row.expected) <= tol
        elif row.relation == "le":
            ok = computed <= row.expected + tol
        else:
            ok = computed >= row.expected - tol
        rows.append(
            {
                "quantity": row.quantity,
                "budget": row.budget,
                "expected": row.expected,
                "computed": computed,
                "relation": row.relation,
                "provenance": row.provenance,
                "note": row.note,
                "passed": ok,
            }
        )
    return rows
