"""Batch command-line front door: measure, verify, reproduce, sweep, export.

Reports are deterministic JSON: identical file + flags + seed give identical
rows, and the determinism hash covers exactly the rows (the environment
stamp's timestamp and thread setting are excluded).  Exit codes: 0 success,
1 invariant/reproduction failure, 2 input error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__
from .checks import CORRUPTION_MODES, run_verification
from .ck import (
    bck_family_alpha_budget,
    mu_bar_alpha_budget,
    mu_bar_gamma_budget,
    omega_bar_budget,
    omega_bck_budget,
    sigma_bar_alpha_budget,
    sigma_bar_gamma_budget,
)
from .errors import CapacityError, InputError
from .families import (
    FunctionFamily,
    family_alpha_budget,
    family_beta_sep,
    family_gamma_budget,
    heinz_lower_diagnostic,
    ambrosetti_report,
    mu_alpha_budget,
    mu_gamma_budget,
    omega_budget,
    omega_ext_budget,
    sigma_alpha_budget,
    sigma_gamma_budget,
)
from .family_io import LoadedFamily, load_family_file, save_family_file
from .generators import GENERATORS, check_example, evaluate_quantity
from .util import canonical_json, digest, jsonable

ENV_PREFIX = "MNC_"

DEFAULT_PANEL = (
    "alpha",
    "beta",
    "gamma",
    "mu_alpha",
    "mu_gamma",
    "sigma_alpha",
    "sigma_gamma",
    "omega",
    "omega_ext",
)
CK_PANEL = (
    "mu_bar_alpha",
    "mu_bar_gamma",
    "sigma_bar_alpha",
    "sigma_bar_gamma",
    "omega_bar",
    "omega_bck",
    "bck_alpha",
)

SCALE_FLAGS = {
    "K": int,
    "N": int,
    "d": int,
    "balls": int,
    "samples": int,
    "samples_per_ball": int,
    "n_max": int,
    "grid_points": int,
    "intervals": int,
    "points_per_interval": int,
    "seed_scale": int,
}

# generator keyword names for the scale flags above
SCALE_KEYWORDS = {
    "spike": {"K": "K", "N": "N"},
    "identity-ball": {"d": "d", "samples": "samples", "seed_scale": "seed"},
    "l1-basis": {"K": "K"},
    "lindenstrauss": {"d": "d", "balls": "n_balls", "samples_per_ball": "samples_per_ball"},
    "ramp": {"n_max": "n_max", "grid_points": "grid_points"},
    "interval-spikes-ck": {"intervals": "n_intervals", "points_per_interval": "points_per_interval"},
    "c01-ramp-spikes": {"K": "K", "N": "N", "d": "d"},
}

REQUIRED_DEFAULTS = {
    "spike": {"K": 3, "N": 2},
    "identity-ball": {"d": 2},
    "l1-basis": {"K": 3},
}


def _env(name: str, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise InputError(f"environment override {ENV_PREFIX + name}={raw!r} is not a valid value")


def _resolve(args: argparse.Namespace) -> dict:
    """Flag value if given, else environment override, else default."""
    return {
        "mode": args.mode if args.mode is not None else _env("MODE", str, "exact"),
        "tol": args.tol if args.tol is not None else _env("TOL", float, 1e-9),
        "seed": args.seed if args.seed is not None else _env("SEED", int, 0),
        "exact_cap": args.exact_cap if args.exact_cap is not None else _env("EXACT_CAP", int, None),
        "fmt": args.format if args.format is not None else _env("FORMAT", str, "json"),
        "threads": args.threads if args.threads is not None else _env("THREADS", int, 1),
    }


def _parse_budget_spec(spec: str | None, default: list[int]) -> list[int]:
    if spec is None:
        return default
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if lo_i < 1 or hi_i < lo_i:
            raise InputError(f"bad budget range {spec!r}")
        return list(range(lo_i, hi_i + 1))
    k = int(spec)
    if k < 1:
        raise InputError(f"budgets must be positive, got {spec!r}")
    return [k]


def _witness_digest(witness) -> str | None:
    if witness is None:
        return None
    return digest(witness)


def _stamp(settings: dict, extra: dict | None = None) -> dict:
    stamp = {
        "version": __version__,
        "seed": settings["seed"],
        "tol": settings["tol"],
        "mode": settings["mode"],
        "exact_cap": settings["exact_cap"],
        "threads": settings["threads"],
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if extra:
        stamp.update(extra)
    return stamp


def _report(rows: list[dict], settings: dict, extra_stamp: dict | None = None) -> dict:
    return {
        "rows": jsonable(rows),
        "stamp": _stamp(settings, extra_stamp),
        "determinism_hash": digest(rows, length=32),
    }


def _emit(doc: dict, settings: dict, out: str | None, csv_fields: Sequence[str] | None = None) -> None:
    if settings["fmt"] == "csv" and csv_fields:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(csv_fields), extrasaction="ignore")
        writer.writeheader()
        for row in doc["rows"]:
            flat = dict(row)
            for key, val in list(flat.items()):
                if isinstance(val, (dict, list)):
                    flat[key] = json.dumps(val, sort_keys=True)
            writer.writerow(flat)
        text = buf.getvalue()
    else:
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pool_from_flag(loaded: LoadedFamily, pool_names: list[str] | None) -> FunctionFamily | None:
    """Resolve --pool names against the phi pool and the family itself."""
    if not pool_names:
        return loaded.phi_pool
    if pool_names == ["self"]:
        return loaded.family
    items = []
    for name in pool_names:
        if loaded.phi_pool is not None and name in loaded.phi_pool.names:
            idx = loaded.phi_pool.func_index(name)
            items.append((name, loaded.phi_pool.values[idx]))
        elif name in loaded.family.names:
            idx = loaded.family.func_index(name)
            items.append((name, loaded.family.values[idx]))
        else:
            raise InputError(f"--pool {name!r} matches no pool or family function")
    values = np.asarray([v for _, v in items])
    return FunctionFamily(
        loaded.family.domain,
        loaded.family.space,
        tuple(n for n, _ in items),
        values,
    )


def _measure_rows(
    loaded: LoadedFamily,
    quantities: Sequence[str],
    ks: Sequence[int],
    ns: Sequence[int],
    ms: Sequence[int],
    pool: FunctionFamily | None,
    settings: dict,
) -> list[dict]:
    fam = loaded.family
    mode = settings["mode"]
    cap = settings["exact_cap"]
    rows: list[dict] = []

    def add(quantity: str, budgets: dict, bv) -> None:
        rows.append(
            {
                "quantity": quantity,
                "budgets": budgets,
                "value": bv.value,
                "kind": bv.kind,
                "witness": _witness_digest(bv.witness),
            }
        )

    for quantity in quantities:
        if quantity == "alpha":
            for k in ks:
                add(quantity, {"k": k}, family_alpha_budget(fam, k, mode, cap))
        elif quantity == "beta":
            for k in ks:
                if len(fam) > k:
                    add(quantity, {"k": k}, family_beta_sep(fam, k, mode))
        elif quantity == "gamma":
            for k in ks:
                add(quantity, {"k": k}, family_gamma_budget(fam, k, pool, mode))
        elif quantity == "mu_alpha":
            for k in ks:
                add(quantity, {"k": k}, mu_alpha_budget(fam, k, mode, cap))
        elif quantity == "mu_gamma":
            for k in ks:
                add(quantity, {"k": k}, mu_gamma_budget(fam, k, extras=loaded.gamma_centers, mode=mode))
        elif quantity == "sigma_alpha":
            for k in ks:
                add(quantity, {"k": k}, sigma_alpha_budget(fam, k, mode, cap))
        elif quantity == "sigma_gamma":
            for k in ks:
                add(quantity, {"k": k}, sigma_gamma_budget(fam, k, extras=loaded.gamma_centers, mode=mode))
        elif quantity == "omega":
            for n in ns:
                add(quantity, {"n": n}, omega_budget(fam, n, mode, cap))
        elif quantity == "omega_ext":
            seen = set()
            for m in ms:
                seen.add((1, m))
                add(quantity, {"n": 1, "m": m}, omega_ext_budget(fam, (1, m), pool=pool, mode=mode))
            for n in ns:
                if (n, 1) not in seen and n > 1:
                    add(quantity, {"n": n, "m": 1}, omega_ext_budget(fam, (n, 1), pool=pool, mode=mode))
        elif quantity == "heinz":
            for k in ks:
                diag = heinz_lower_diagnostic(fam, k)
                rows.append(
                    {"quantity": "heinz_lower_diag", "budgets": {"k": k},
                     "value": diag["lower_combination"], "kind": "diagnostic",
                     "witness": None, "detail": diag}
                )
        elif quantity == "ambrosetti":
            for k in ks:
                diag = ambrosetti_report(fam, k)
                rows.append(
                    {"quantity": "ambrosetti_gap", "budgets": {"k": k},
                     "value": diag["gap"], "kind": "diagnostic",
                     "witness": None, "detail": diag}
                )
        elif quantity in CK_PANEL:
            if loaded.ck is None:
                raise InputError(f"quantity {quantity!r} needs a grid block in the family file")
            ck = loaded.ck
            if quantity == "mu_bar_alpha":
                for k in ks:
                    add(quantity, {"k": k}, mu_bar_alpha_budget(ck, k, mode))
            elif quantity == "mu_bar_gamma":
                for k in ks:
                    add(quantity, {"k": k}, mu_bar_gamma_budget(ck, k, mode=mode))
            elif quantity == "sigma_bar_alpha":
                for k in ks:
                    add(quantity, {"k": k}, sigma_bar_alpha_budget(ck, k, mode, cap))
            elif quantity == "sigma_bar_gamma":
                for k in ks:
                    add(quantity, {"k": k}, sigma_bar_gamma_budget(ck, k, mode))
            elif quantity == "omega_bar":
                for n in ns:
                    add(quantity, {"n": n}, omega_bar_budget(ck, n, mode))
            elif quantity == "omega_bck":
                for m in ms:
                    add(quantity, {"n": 1, "m": m}, omega_bck_budget(ck, (1, m)))
            elif quantity == "bck_alpha":
                for k in ks:
                    add(quantity, {"k": k}, bck_family_alpha_budget(ck, k, mode, cap))
        else:
            raise InputError(f"unknown quantity {quantity!r}")
    return rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_measure(args: argparse.Namespace) -> int:
    settings = _resolve(args)
    loaded = load_family_file(args.file)
    fam = loaded.family
    ks = _parse_budget_spec(args.budget_k, list(range(1, min(6, len(fam)) + 1)))
    ns = _parse_budget_spec(args.budget_n, list(range(1, min(6, len(fam.domain)) + 1)))
    pool = _pool_from_flag(loaded, args.pool)
    pool_size = len(pool) if pool is not None else len(fam)
    ms = _parse_budget_spec(args.budget_m, list(range(1, min(3, pool_size) + 1)))
    quantities = args.quantity or list(DEFAULT_PANEL) + (list(CK_PANEL) if loaded.ck else [])
    rows = _measure_rows(loaded, quantities, ks, ns, ms, pool, settings)
    doc = _report(rows, settings, {"file": str(args.file)})
    _emit(doc, settings, args.out, csv_fields=("quantity", "budgets", "value", "kind", "witness"))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    settings = _resolve(args)
    loaded = load_family_file(args.file)
    fam = loaded.family
    ks = _parse_budget_spec(args.budget_k, list(range(1, min(6, len(fam)) + 1)))
    ns = _parse_budget_spec(args.budget_n, list(range(1, min(6, len(fam.domain)) + 1)))
    rows = run_verification(fam, ks, ns, settings["tol"], args.inject_corruption)
    doc = _report(rows, settings, {"file": str(args.file)})
    doc["passed"] = all(r["passed"] for r in rows)
    _emit(doc, settings, args.out, csv_fields=("check", "context", "passed", "detail"))
    return 0 if doc["passed"] else 1


def _example_kwargs(name: str, args: argparse.Namespace) -> dict:
    if name not in GENERATORS:
        known = ", ".join(sorted(GENERATORS))
        raise InputError(f"unknown example {name!r}; available: {known}")
    kwargs = {}
    for flag, keyword in SCALE_KEYWORDS[name].items():
        value = getattr(args, flag, None)
        if value is not None:
            kwargs[keyword] = value
    for flag, default in REQUIRED_DEFAULTS.get(name, {}).items():
        kwargs.setdefault(SCALE_KEYWORDS[name][flag], default)
    return kwargs


def cmd_reproduce(args: argparse.Namespace) -> int:
    settings = _resolve(args)
    ex = GENERATORS[args.name](**_example_kwargs(args.name, args)) if args.name in GENERATORS else None
    if ex is None:
        raise InputError(
            f"unknown example {args.name!r}; available: {', '.join(sorted(GENERATORS))}"
        )
    rows = check_example(ex, settings["tol"])
    doc = _report(rows, settings, {"example": ex.name, "scale": ex.scale})
    doc["passed"] = all(r["passed"] for r in rows)
    _emit(
        doc,
        settings,
        args.out,
        csv_fields=("quantity", "budget", "expected", "computed", "relation", "provenance", "passed"),
    )
    return 0 if doc["passed"] else 1


def _parse_param_spec(spec: str) -> tuple[str, list[int]]:
    if "=" not in spec:
        raise InputError(f"--param expects KEY=LO..HI, got {spec!r}")
    key, rng = spec.split("=", 1)
    return key.strip(), _parse_budget_spec(rng, [])


def cmd_sweep(args: argparse.Namespace) -> int:
    settings = _resolve(args)
    rows: list[dict] = []
    if args.example:
        if not args.quantity_single:
            raise InputError("example sweeps need --quantity")
        key, values = _parse_param_spec(args.param) if args.param else (None, [None])
        budget = dict(kv.split("=") for kv in args.budget) if args.budget else {}
        budget = {k: int(v) for k, v in budget.items()}
        for value in values:
            sweep_args = argparse.Namespace(**vars(args))
            if key is not None:
                setattr(sweep_args, key, value)
            ex = GENERATORS[args.example](**_example_kwargs(args.example, sweep_args))
            computed = evaluate_quantity(ex, args.quantity_single, budget)
            rows.append(
                {
                    "scale": value if value is not None else "-",
                    "budget": json.dumps(budget, sort_keys=True),
                    "quantity": args.quantity_single,
                    "value": computed,
                    "kind": "exact",
                }
            )
    elif args.file:
        loaded = load_family_file(args.file)
        quantities = [args.quantity_single] if args.quantity_single else ["alpha", "omega"]
        ks = _parse_budget_spec(args.budget_k, list(range(1, min(6, len(loaded.family)) + 1)))
        ns = _parse_budget_spec(args.budget_n, list(range(1, min(6, len(loaded.family.domain)) + 1)))
        pool = _pool_from_flag(loaded, args.pool)
        measured = _measure_rows(loaded, quantities, ks, ns, [1], pool, settings)
        for row in measured:
            rows.append(
                {
                    "scale": "-",
                    "budget": json.dumps(row["budgets"], sort_keys=True),
                    "quantity": row["quantity"],
                    "value": row["value"],
                    "kind": row["kind"],
                }
            )
    else:
        raise InputError("sweep needs --example or a family file")

    text_rows = ["scale,budget,quantity,value,kind"]
    for row in rows:
        text_rows.append(
            f"{row['scale']},\"{row['budget']}\",{row['quantity']},{row['value']},{row['kind']}"
        )
    text = "\n".join(text_rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    ex = GENERATORS[args.name](**_example_kwargs(args.name, args)) if args.name in GENERATORS else None
    if ex is None:
        raise InputError(
            f"unknown example {args.name!r}; available: {', '.join(sorted(GENERATORS))}"
        )
    phi_pool = None
    gamma_centers = None
    for pool in ex.pools.values():
        if isinstance(pool, FunctionFamily) and phi_pool is None:
            phi_pool = pool
        elif isinstance(pool, np.ndarray) and gamma_centers is None:
            gamma_centers = pool
    grid = ex.ck.grid if ex.ck is not None else None
    order = ex.ck.order if ex.ck is not None else 0
    save_family_file(args.out, ex.family, phi_pool, gamma_centers, grid, order)
    sys.stdout.write(f"wrote {args.out}\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("exact", "heuristic"), default=None,
                   help="solver mode (default exact; env MNC_MODE)")
    p.add_argument("--tol", type=float, default=None, help="comparison tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=None, help="seed recorded in the report stamp")
    p.add_argument("--exact-cap", type=int, default=None, help="override the exact-solve size cap")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="report format")
    p.add_argument("--threads", type=int, default=None,
                   help="worker hint, recorded in the stamp; results are schedule-independent")
    p.add_argument("--out", default=None, help="write the report to a file instead of stdout")
    p.add_argument("--budget-k", default=None, help="budget k, single value or LO..HI")
    p.add_argument("--budget-n", default=None, help="partition budget n, single value or LO..HI")
    p.add_argument("--budget-m", default=None, help="correction budget m, single value or LO..HI")


def _add_scale_flags(p: argparse.ArgumentParser) -> None:
    for flag, cast in SCALE_FLAGS.items():
        p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=cast, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mnc",
        description="Budget-constrained noncompactness measures for finite function families",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="compute characteristics of a family file")
    p.add_argument("file")
    p.add_argument("--quantity", action="append", default=None,
                   help="repeatable; default runs the full panel")
    p.add_argument("--pool", action="append", default=None,
                   help="function names forming the center/correction pool")
    _add_common(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", help="run the budgeted invariant battery")
    p.add_argument("file")
    p.add_argument("--inject-corruption", choices=CORRUPTION_MODES, default=None,
                   help="corrupt the certificate witness (negative test)")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reproduce", help="rebuild a worked example and check its expected table")
    p.add_argument("name")
    _add_scale_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("sweep", help="emit CSV trend data over scales or budgets")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--example", default=None)
    p.add_argument("--param", default=None, help="example scale sweep, KEY=LO..HI")
    p.add_argument("--budget", action="append", default=None,
                   help="example budget entries, e.g. k=1 (repeatable)")
    p.add_argument("--quantity", dest="quantity_single", default=None)
    p.add_argument("--pool", action="append", default=None)
    _add_scale_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="write a worked example as a family file")
    p.add_argument("name")
    p.add_argument("--out", required=True)
    _add_scale_flags(p)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
