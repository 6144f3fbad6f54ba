"""Invariant battery behind the ``verify`` command.

Runs the budgeted sandwich inequalities, the partition-modulus identity for
singletons, axiom surrogates (homogeneity, union/sum budgets), heuristic
bracketing and the certificate transforms on a loaded family.  Every check
emits one row; a corrupted witness can be injected to exercise the negative
path end to end.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .certificates import (
    construct_alpha_cover,
    construct_gamma_net,
    exact_pointwise_nets,
    lindenstrauss_phi,
    refine_partition_tb,
    sigma_cover_from_alpha,
)
from .core import PointSet, minkowski_sum_sets, union_sets
from .errors import UndefinedBudgetError, WitnessRejected
from .families import (
    FunctionFamily,
    OmegaWitness,
    family_alpha_budget,
    family_beta_sep,
    family_gamma_budget,
    family_image,
    function_image,
    mu_alpha_budget,
    mu_gamma_budget,
    omega_budget,
    omega_ext_budget,
    scale,
)
from .set_measures import Partition, alpha_budget

CORRUPTION_MODES = ("partition-drop", "partition-overlap", "net-empty")


def _row(check: str, context: dict, passed: bool, detail: str = "") -> dict:
    return {"check": check, "context": context, "passed": bool(passed), "detail": detail}


def corrupt_witness(
    w: OmegaWitness, nets, mode: str
) -> tuple[OmegaWitness, object]:
    """Deliberately break a feasible witness; used by negative tests."""
    if mode == "partition-drop":
        parts = [list(p) for p in w.partition.parts]
        parts[0] = parts[0][1:]
        parts = [p for p in parts if p]
        if not parts:
            parts = [[0]]
        bad = Partition(tuple(tuple(p) for p in parts))
        return OmegaWitness(bad, w.phi_names, w.phi_values, w.assignment, w.value), nets
    if mode == "partition-overlap":
        parts = [tuple(p) for p in w.partition.parts]
        parts[-1] = parts[-1] + (parts[0][0],)
        bad = Partition(tuple(parts))
        return OmegaWitness(bad, w.phi_names, w.phi_values, w.assignment, w.value), nets
    if mode == "net-empty":
        fibers = [0] * w.phi_values.shape[0]
        for j in w.assignment:
            fibers[j] += 1
        target = next(j for j, c in enumerate(fibers) if c)
        centers = list(nets.centers)
        centers[target] = np.zeros((0, w.phi_values.shape[2]))
        from .certificates import PointwiseNets

        return w, PointwiseNets(nets.representatives, tuple(centers), nets.radius)
    raise ValueError(f"unknown corruption mode {mode!r}; choose from {CORRUPTION_MODES}")


def run_verification(
    family: FunctionFamily,
    ks: Sequence[int],
    ns: Sequence[int],
    tol: float = 1e-9,
    inject_corruption: str | None = None,
) -> list[dict]:
    rows: list[dict] = []

    alphas = {k: family_alpha_budget(family, k).value for k in ks}
    omegas = {n: omega_budget(family, n).value for n in ns}

    mono_a = all(alphas[b] <= alphas[a] + tol for a, b in zip(ks, list(ks)[1:]))
    rows.append(_row("alpha-nonincreasing-in-budget", {"k": list(ks)}, mono_a))
    mono_o = all(omegas[b] <= omegas[a] + tol for a, b in zip(ns, list(ns)[1:]))
    rows.append(_row("omega-nonincreasing-in-budget", {"n": list(ns)}, mono_o))

    for k in ks:
        mu = mu_alpha_budget(family, k).value
        rows.append(
            _row("mu-alpha-le-family-alpha", {"k": k}, mu <= alphas[k] + tol,
                 f"mu={mu:.12g} alpha={alphas[k]:.12g}")
        )
        oe = omega_ext_budget(family, (1, k)).value
        rows.append(
            _row("omega-ext-le-2-family-alpha", {"n": 1, "m": k}, oe <= 2 * alphas[k] + tol,
                 f"omega_ext={oe:.12g} alpha={alphas[k]:.12g}")
        )
        gam = family_gamma_budget(family, k).value
        rows.append(
            _row("gamma-alpha-sandwich", {"k": k},
                 gam <= alphas[k] + tol and alphas[k] <= 2 * gam + tol,
                 f"gamma={gam:.12g} alpha={alphas[k]:.12g}")
        )
        mg = mu_gamma_budget(family, k, phi_pool=family).value
        rows.append(
            _row("mu-gamma-le-family-gamma", {"k": k}, mg <= gam + tol,
                 f"mu_gamma={mg:.12g} gamma={gam:.12g}")
        )
        try:
            bet = family_beta_sep(family, k).value
            rows.append(
                _row("beta-alpha-sandwich", {"k": k},
                     bet <= alphas[k] + tol and alphas[k] <= 2 * bet + tol,
                     f"beta={bet:.12g} alpha={alphas[k]:.12g}")
            )
        except UndefinedBudgetError:
            pass

    # budgeted identity: singleton modulus equals the image partition measure
    for i, name in enumerate(family.names):
        single = family.subfamily([i])
        img = function_image(family, i)
        ok = True
        worst = ""
        for n in ns:
            lhs = omega_budget(single, n).value
            rhs = alpha_budget(img, n).value
            if abs(lhs - rhs) > tol:
                ok = False
                worst = f"n={n}: omega={lhs:.12g} alpha={rhs:.12g}"
                break
        rows.append(_row("singleton-modulus-identity", {"f": name}, ok, worst))

    # axiom surrogates
    doubled = scale(2.0, family)
    homog = all(
        abs(family_alpha_budget(doubled, k).value - 2 * alphas[k]) <= tol * (1 + alphas[k])
        for k in ks
    )
    rows.append(_row("homogeneity-alpha", {"lambda": 2.0}, homog))
    homog_o = all(
        abs(omega_budget(doubled, n).value - 2 * omegas[n]) <= tol * (1 + omegas[n])
        for n in ns
    )
    rows.append(_row("homogeneity-omega", {"lambda": 2.0}, homog_o))

    image = family_image(family)
    if len(image) >= 2:
        half = max(1, min(4, len(image) // 2))
        a_set = PointSet(image.points[:half], image.space)
        b_set = PointSet(image.points[half : 2 * half], image.space) if len(image) > half else a_set
        ka = kb = 2
        lhs = alpha_budget(union_sets(a_set, b_set), ka + kb).value
        rhs = max(alpha_budget(a_set, ka).value, alpha_budget(b_set, kb).value)
        rows.append(
            _row("union-max-at-summed-budgets", {"kA": ka, "kB": kb}, lhs <= rhs + tol,
                 f"union={lhs:.12g} max={rhs:.12g}")
        )
        small_a = PointSet(image.points[: min(3, len(image))], image.space)
        small_b = PointSet(image.points[-min(3, len(image)) :], image.space)
        lhs = alpha_budget(minkowski_sum_sets(small_a, small_b), 4).value
        rhs = alpha_budget(small_a, 2).value + alpha_budget(small_b, 2).value
        rows.append(
            _row("sum-subadditive-at-product-budgets", {"k": 2, "l": 2}, lhs <= rhs + tol,
                 f"sum={lhs:.12g} bound={rhs:.12g}")
        )

    for k in ks:
        lo = family_alpha_budget(family, k, mode="lower").value
        hi = family_alpha_budget(family, k, mode="upper").value
        rows.append(
            _row("heuristic-bracketing-alpha", {"k": k},
                 lo <= alphas[k] + tol and alphas[k] <= hi + tol,
                 f"lower={lo:.12g} exact={alphas[k]:.12g} upper={hi:.12g}")
        )

    # certificate transforms from a fresh exact witness
    k_star = min(3, len(family))
    witness = omega_ext_budget(family, (1, k_star)).witness
    nets = exact_pointwise_nets(family, witness)
    if inject_corruption is not None:
        witness, nets = corrupt_witness(witness, nets, inject_corruption)
    try:
        for label, report in (
            ("certificate-alpha-cover", construct_alpha_cover(family, witness, nets)),
            ("certificate-gamma-net", construct_gamma_net(family, witness, nets)),
        ):
            rows.append(
                _row(label, {"m": k_star}, report.passed,
                     f"measured={report.measured:.12g} claimed={report.claimed:.12g}")
            )
        pooled = np.unique(witness.phi_values.reshape(-1, family.space.dim), axis=0)
        report = refine_partition_tb(family, witness, pooled, 0.0)
        rows.append(
            _row("certificate-refine-partition", {"delta": 0.0}, report.passed,
                 f"measured={report.measured:.12g} claimed={report.claimed:.12g}")
        )
        cover = family_alpha_budget(family, k_star)
        reps = [p[0] for p in cover.witness.parts]
        rep_img = np.unique(family.values[reps].reshape(-1, family.space.dim), axis=0)
        report = sigma_cover_from_alpha(family, cover.witness, cover.value, rep_img, 0.0)
        rows.append(
            _row("certificate-sigma-cover", {"k": k_star}, report.passed,
                 f"measured={report.measured:.12g} claimed={report.claimed:.12g}")
        )
        if family.space.norm in ("linf", "l2"):
            report = lindenstrauss_phi(family, cover.witness, cover.value)
            rows.append(
                _row("certificate-lindenstrauss-phi", {"k": k_star}, report.passed,
                     f"measured={report.measured:.12g} claimed={report.claimed:.12g}")
            )
    except WitnessRejected as exc:
        rows.append(_row("certificate-witness", {}, False, exc.constraint))

    return rows
