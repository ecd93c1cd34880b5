"""Command-line front end: container ingestion, one subcommand per
verification family, CSV/JSON emission.

Exit codes: 0 success, 1 validation or usage error, 2 failed bound check.
Outputs are byte-identical across reruns with the same argv and seed; the
JSON timestamp field is the only exception and can be suppressed with
--no-timestamp.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

from . import chain as chain_mod
from . import corners as corners_mod
from . import experiments as exp_mod
from . import floating_body as fb_mod
from .geometry import (
    Polygon,
    polygon_metrics,
    normalize_to_unit_area,
    regular_polygon,
    unit_area_triangle,
    unit_square,
)
from .sampling import RandomStream

SCHEMA_VERSION = "1"


class CheckFailure(RuntimeError):
    """A verified bound or assertion failed; maps to exit code 2.

    May carry the rows and summary built so far, which are still emitted.
    """

    def __init__(self, message: str, rows: list | None = None, summary: dict | None = None):
        super().__init__(message)
        self.rows = rows or []
        self.summary = summary or {}


def parse_container(spec: str, normalize: bool = True) -> Polygon:
    """Resolve a container spec: builtin name or vertex file path.

    Builtins: "triangle", "square", "regular-k" for k >= 3. Vertex files are
    plain text with one "x y" pair per line and '#' comments. Validation
    errors name the offending vertex index.
    """
    if spec == "square":
        poly = unit_square()
    elif spec == "triangle":
        poly = unit_area_triangle()
    elif spec.startswith("regular-"):
        try:
            k = int(spec.split("-", 1)[1])
        except ValueError as exc:
            raise ValueError(f"bad regular polygon spec {spec!r}") from exc
        poly = regular_polygon(k)
    else:
        if not os.path.exists(spec):
            raise ValueError(f"unknown container {spec!r} (not a builtin or file)")
        rows = []
        with open(spec, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                parts = body.split()
                if len(parts) != 2:
                    raise ValueError(f"{spec}:{lineno}: expected 'x y'")
                rows.append((float(parts[0]), float(parts[1])))
        poly = Polygon(rows)
    return normalize_to_unit_area(poly) if normalize else poly


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if not rows:
            return
        writer = csv.writer(fh)
        header = list(rows[0].keys())
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _emit(args, rows: list[dict], summary: dict) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": {
            "seed": args.seed,
            "reps": getattr(args, "reps", None),
            "threads": args.threads,
        },
        "rows": rows,
        "summary": summary,
    }
    if not args.no_timestamp:
        payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    if args.csv:
        _write_csv(args.csv, rows)
    if args.json:
        _write_json(args.json, payload)
    if not args.csv and not args.json:
        for row in rows:
            print(" ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
        if summary:
            print("summary: " + " ".join(f"{k}={_fmt(v)}" for k, v in summary.items()))


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _cmd_chain(args) -> tuple[list[dict], dict]:
    # CSV columns: schema_version, model, size, reps, mc_mean, mc_var,
    # stderr_mean, stderr_var, exact_mean, exact_var, z_mean, z_var
    rows = []
    stream = RandomStream(args.seed)
    run = 0
    for k in _int_list(args.k) if args.k else []:
        stats = chain_mod.simulate_chain_batch(args.reps, stream.split(run), k=k)
        exact_mean = chain_mod.exact_chain_mean(k)
        exact_var = chain_mod.exact_chain_var(k)
        rows.append(
            _chain_row(
                "fixed-k", k, args.reps, stats, exact_mean, exact_var
            )
        )
        run += 1
    for m in _float_list(args.poisson_m) if args.poisson_m else []:
        stats = chain_mod.simulate_chain_batch(
            args.reps, stream.split(run), poisson_mean=m
        )
        ref_mean, ref_var = chain_mod.poisson_chain_expansion(m)
        rows.append(_chain_row("poisson", m, args.reps, stats, ref_mean, ref_var))
        run += 1
    if not rows:
        raise ValueError("chain needs --k and/or --poisson-m")
    return rows, {}


def _chain_row(model, size, reps, stats, ref_mean, ref_var) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "model": model,
        "size": size,
        "reps": reps,
        "mc_mean": stats.mean,
        "mc_var": stats.variance,
        "stderr_mean": stats.stderr_mean,
        "stderr_var": stats.stderr_var,
        "exact_mean": ref_mean,
        "exact_var": ref_var,
        "z_mean": (stats.mean - ref_mean) / stats.stderr_mean
        if stats.stderr_mean > 0
        else 0.0,
        "z_var": (stats.variance - ref_var) / stats.stderr_var
        if stats.stderr_var > 0
        else 0.0,
    }


def _cmd_polygon(args) -> tuple[list[dict], dict]:
    # CSV columns: schema_version, container, model, n, reps, mean, variance,
    # stderr_mean, stderr_var, ks, predicted_mean, predicted_var
    # (+ rate_regular, rate_covered, rate_wet_count_ok with --events)
    container = parse_container(args.container, not args.no_normalize)
    event_params = None
    if args.events:
        event_params = fb_mod.EventParams(b0=args.b0, c0=args.c0)
    cfg = exp_mod.ExperimentConfig(
        container=container,
        model=args.model,
        n=args.n,
        reps=args.reps,
        root_seed=args.seed,
        threads=args.threads,
        event_params=event_params,
    )
    summary = exp_mod.run_experiment(cfg)
    pred = exp_mod.predicted_moments(container, args.n, args.model)
    row = {
        "schema_version": SCHEMA_VERSION,
        "container": args.container,
        "model": args.model,
        "n": args.n,
        "reps": args.reps,
        "mean": summary.mean,
        "variance": summary.variance,
        "stderr_mean": summary.stderr_mean,
        "stderr_var": summary.stderr_var,
        "ks": summary.ks,
        "predicted_mean": pred.mean,
        "predicted_var": pred.variance,
    }
    if summary.event_rates is not None:
        row["rate_regular"] = summary.event_rates.regular
        row["rate_covered"] = summary.event_rates.covered
        row["rate_wet_count_ok"] = summary.event_rates.wet_count_ok
    meta = {
        "remainder_order": pred.remainder_order,
        "wall_time": round(summary.wall_time, 3),
    }
    return [row], meta


def _cmd_rate(args) -> tuple[list[dict], dict]:
    # CSV columns: schema_version, container, model, n, reps, mean, variance,
    # ks, ks_sqrt_log_n, noise, small_sample_warning
    container = parse_container(args.container, not args.no_normalize)
    rows = []
    table = exp_mod.berry_esseen_curve(
        container,
        _float_list(args.n_list),
        args.reps,
        RandomStream(args.seed),
        model=args.model,
        threads=args.threads,
        standardize=args.standardize,
    )
    for r in table:
        rows.append(
            {
                "schema_version": SCHEMA_VERSION,
                "container": args.container,
                "model": args.model,
                "n": r.n,
                "reps": r.reps,
                "mean": r.mean,
                "variance": r.variance,
                "ks": r.ks,
                "ks_sqrt_log_n": r.ks_scaled,
                "noise": r.noise,
                "small_sample_warning": r.small_sample_warning,
            }
        )
    return rows, {}


def _cmd_floating(args) -> tuple[list[dict], dict]:
    # CSV columns (wet mode): schema_version, container, delta, points,
    # estimate, stderr, reference_leading_term, ratio
    # CSV columns (--v-at mode): schema_version, container, x, y, v
    container = parse_container(args.container, not args.no_normalize)
    rows = []
    if args.v_at:
        for pair in args.v_at.split(";"):
            x, y = (float(t) for t in pair.split(","))
            rows.append(
                {
                    "schema_version": SCHEMA_VERSION,
                    "container": args.container,
                    "x": x,
                    "y": y,
                    "v": fb_mod.v_value(container, (x, y)),
                }
            )
        return rows, {}
    ell = len(container.vertices)
    stream = RandomStream(args.seed)
    for idx, delta in enumerate(_float_list(args.delta)):
        estimate, stderr = fb_mod.wet_part_area(
            container, delta, stream.split(idx), args.points
        )
        reference = ell / 4.0 * delta * math.log(1.0 / delta)
        rows.append(
            {
                "schema_version": SCHEMA_VERSION,
                "container": args.container,
                "delta": delta,
                "points": args.points,
                "estimate": estimate,
                "stderr": stderr,
                "reference_leading_term": reference,
                "ratio": estimate / reference,
            }
        )
    return rows, {}


def _cmd_corners(args) -> tuple[list[dict], dict]:
    # CSV columns: schema_version, kind, i, j, estimate, stderr, predicted
    # with kind in {log_arm_mean, log_area_mean, log_area_var, log_area_cov,
    # tail_exceedance}
    container = parse_container(args.container, not args.no_normalize)
    stream = RandomStream(args.seed)
    table = corners_mod.log_moment_estimates(
        container, args.n, args.reps, stream.split(0), condition=args.condition
    )
    ell = len(container.vertices)
    rows = []

    def add(kind, i, j, est, se, pred):
        rows.append(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": kind,
                "i": i,
                "j": j,
                "estimate": est,
                "stderr": se,
                "predicted": pred,
            }
        )

    for i in range(ell):
        for k in range(2):
            add(
                "log_arm_mean",
                i,
                (i + k) % ell,
                float(table.arm_mean[i, k]),
                float(table.arm_mean_stderr[i, k]),
                float(table.arm_mean_predicted[i, k]),
            )
    for i in range(ell):
        add(
            "log_area_mean",
            i,
            i,
            float(table.area_mean[i]),
            float(table.area_mean_stderr[i]),
            float(table.area_mean_predicted[i]),
        )
        add(
            "log_area_var",
            i,
            i,
            float(table.area_var[i]),
            float(table.area_var_stderr[i]),
            table.area_var_predicted,
        )
    for i in range(ell):
        for j in range(ell):
            if i == j:
                continue
            add(
                "log_area_cov",
                i,
                j,
                float(table.area_cov[i, j]),
                float(table.area_cov_stderr[i, j]),
                float(table.area_cov_predicted[i, j]),
            )
    metrics = polygon_metrics(container)
    x = args.tail_x if args.tail_x else 4.0 / (args.n * float(metrics.edge_lengths.min()))
    tail = corners_mod.tail_probability_check(
        container, args.n, x, args.reps, stream.split(1)
    )
    for i in range(ell):
        add(
            "tail_exceedance",
            i,
            i,
            float(tail.empirical[i]),
            float(tail.stderr[i]),
            float(tail.bound[i]),
        )
    rate = corners_mod.regularity_event_rate(container, args.n, args.reps, stream.split(2))
    summary = {
        "condition": table.condition,
        "kept_rate": table.kept_rate,
        "kept": table.kept,
        "event_failure_rate": rate.failure_rate,
        "event_failure_stderr": rate.stderr,
        "lower_curve_n^-1": rate.lower_curve,
        "upper_curve_n^-1/4": rate.upper_curve,
    }
    return rows, summary


def _cmd_identities(args) -> tuple[list[dict], dict]:
    # CSV columns: schema_version, identity, n, reps, lhs, rhs, diff,
    # combined_stderr, z
    container = parse_container(args.container, not args.no_normalize)
    stream = RandomStream(args.seed)
    rows = []
    for idx, check in enumerate(
        (
            exp_mod.efron_check(
                container, args.n, args.reps, stream.split(0), args.threads
            ),
            exp_mod.buchta_check(
                container, args.n, args.reps, stream.split(1), args.threads
            ),
        )
    ):
        se = check.combined_stderr
        rows.append(
            {
                "schema_version": SCHEMA_VERSION,
                "identity": check.name,
                "n": check.n,
                "reps": check.reps,
                "lhs": check.lhs,
                "rhs": check.rhs,
                "diff": check.diff,
                "combined_stderr": se,
                "z": check.diff / se if se > 0 else 0.0,
            }
        )
    return rows, {}


def _cmd_vervaat(args) -> tuple[list[dict], dict]:
    # CSV columns: schema_version, n, p, k, sum, bound, ok
    if args.grid == "default":
        grid = exp_mod.vervaat_default_grid()
    else:
        if args.n is None or args.p is None or args.k is None:
            raise ValueError("vervaat needs --grid default or all of --n --p --k")
        grid = [(args.n, args.p, args.k)]
    rows = []
    violations = 0
    for n, p, k in grid:
        check = exp_mod.vervaat_values(n, p, k)
        violations += not check.holds
        rows.append(
            {
                "schema_version": SCHEMA_VERSION,
                "n": n,
                "p": p,
                "k": k,
                "sum": check.total,
                "bound": check.bound,
                "ok": check.holds,
            }
        )
    summary = {"checks": len(rows), "violations": violations}
    if violations:
        raise CheckFailure(f"{violations} coupling bound checks failed", rows, summary)
    return rows, summary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hulllab",
        description="Monte Carlo verification lab for random polygons in polygons",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, container=True, reps_default=10_000):
        p.add_argument(
            "--seed",
            type=int,
            default=int(os.environ.get("HULLLAB_SEED", "0")),
            help="root seed (default: HULLLAB_SEED env var or 0)",
        )
        p.add_argument("--reps", type=int, default=reps_default)
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker processes (default: available parallelism)",
        )
        p.add_argument("--csv", help="write rows to this CSV file")
        p.add_argument("--json", help="write the full payload to this JSON file")
        p.add_argument("--no-timestamp", action="store_true")
        if container:
            p.add_argument("--container", default="square")
            p.add_argument(
                "--no-normalize",
                action="store_true",
                help="keep the container at its given scale",
            )

    p = sub.add_parser("chain", help="convex chain moments vs exact formulas")
    common(p, container=False, reps_default=200_000)
    p.add_argument("--k", help="comma list of fixed point counts")
    p.add_argument("--poisson-m", help="comma list of Poisson means")

    p = sub.add_parser("polygon", help="hull vertex moments vs predictions")
    common(p)
    p.add_argument("--model", choices=("binomial", "poisson"), default="binomial")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--events", action="store_true", help="also track event rates")
    p.add_argument("--b0", type=float, default=1.0)
    p.add_argument("--c0", type=float, default=4.0)

    p = sub.add_parser("rate", help="KS distance to normal across n")
    common(p)
    p.add_argument("--model", choices=("binomial", "poisson"), default="binomial")
    p.add_argument("--n-list", required=True, help="comma list of n values")
    p.add_argument(
        "--standardize", choices=("sample", "predicted"), default="sample"
    )

    p = sub.add_parser("floating", help="minimal cap values and wet-part areas")
    common(p)
    p.add_argument("--delta", default="1e-3", help="comma list of thresholds")
    p.add_argument("--points", type=int, default=1_000_000)
    p.add_argument("--v-at", help="evaluate v at 'x,y' (';'-separated pairs)")

    p = sub.add_parser("corners", help="corner decomposition log moments")
    common(p, reps_default=100_000)
    p.add_argument("--n", type=float, default=10_000.0)
    p.add_argument("--tail-x", type=float, help="tail check threshold")
    p.add_argument(
        "--condition",
        choices=("support", "regular"),
        default="support",
        help="conditioning for the log moments (see docs)",
    )

    p = sub.add_parser("identities", help="Efron and Buchta identity checks")
    common(p, reps_default=1_000_000)
    p.add_argument("--n", type=int, default=10)

    p = sub.add_parser("vervaat", help="Poisson-binomial coupling bounds")
    common(p, container=False)
    p.add_argument("--grid", help="'default' for the 27-point grid")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--k", type=int)

    return parser


_HANDLERS = {
    "chain": _cmd_chain,
    "polygon": _cmd_polygon,
    "rate": _cmd_rate,
    "floating": _cmd_floating,
    "corners": _cmd_corners,
    "identities": _cmd_identities,
    "vervaat": _cmd_vervaat,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if getattr(args, "threads", None) is None:
        args.threads = exp_mod.default_threads()
    try:
        rows, summary = _HANDLERS[args.command](args)
    except CheckFailure as exc:
        _emit(args, exc.rows, exc.summary)
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(args, rows, summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
