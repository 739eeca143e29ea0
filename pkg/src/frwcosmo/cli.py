"""Command-line front end: classify, solve, validate, hyp2f1, table.

Parameters come from long flags, or from a JSON config file passed as the
single positional argument; an explicit flag wins over a config entry.  All
numeric file output uses 17 significant digits and newline-terminated rows,
so identical inputs reproduce identical bytes.  Exit status is 0 on success,
1 when a validation or residual gate fails, and 2 for usage, parameter, or
domain errors.

The environment variable FRW_DEFAULT_TOL overrides the default tolerance of
the cross-method gates (the validate suite and the solve deviation check);
it does not touch the fixed per-check tolerances of the reference suite.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .closedform import closed_state, closed_trajectory, default_window
from .errors import FrwError, OutsideWindow
from .model import (
    CosmoParams,
    Family,
    classify,
    degenerate_index,
    derived_state,
    validate_params,
    z_of_a,
)
from .numeric import integrate_ode, quadrature_trajectory
from .specfun import Hyp2F1Args, hyp2f1, solution_coeffs
from .validate import (
    FAMILY_DRAWS,
    hypergeometric_state,
    run_reference_suite,
    suite_text,
)

CSV_HEADER = "t,a,adot,hubble,rho,p,friedmann_residual"
DEFAULT_CROSS_TOL = 1e-6
TABLE_GRID_POINTS = 201


class UsageError(Exception):
    """Bad invocation: wrong flags, malformed config, invalid environment."""


# -- parameter plumbing ------------------------------------------------------

PARAM_KEYS = ("gamma_bar", "kappa", "lambda_cc", "c_int", "a0", "t0")


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return cfg


def _merged(ns, cfg, key, default=None):
    val = getattr(ns, key, None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _params_from(ns, cfg) -> CosmoParams:
    record = {}
    for key in PARAM_KEYS:
        val = _merged(ns, cfg, key)
        if val is not None:
            record[key] = val
    if "c_int" not in record and "gamma_bar" in record:
        # Without an explicit integration constant, pin it so a(t0) = a0
        # solves the constraint, the same normalization reference_params uses.
        gb = float(record["gamma_bar"])
        a0 = float(record.get("a0", 1.0))
        record["c_int"] = a0**-2 if gb == -1.0 else a0 ** (2.0 * gb)
    try:
        return validate_params(record)
    except (FrwError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _grid_from(ns, cfg):
    t_start = _merged(ns, cfg, "t_start")
    t_end = _merged(ns, cfg, "t_end")
    n = _merged(ns, cfg, "n", 101)
    if t_start is None or t_end is None:
        raise UsageError("a time grid needs --t-start and --t-end")
    t_start, t_end, n = float(t_start), float(t_end), int(n)
    if not (math.isfinite(t_start) and math.isfinite(t_end) and t_start < t_end):
        raise UsageError(f"need finite t_start < t_end, got [{t_start}, {t_end}]")
    if n < 2:
        raise UsageError(f"need at least 2 grid points, got {n}")
    return np.linspace(t_start, t_end, n)


def _env_tolerance():
    raw = os.environ.get("FRW_DEFAULT_TOL")
    if raw is None:
        return None
    try:
        tol = float(raw)
    except ValueError as exc:
        raise UsageError(f"FRW_DEFAULT_TOL = {raw!r} does not parse as a real") from exc
    if not math.isfinite(tol) or tol <= 0.0:
        raise UsageError(f"FRW_DEFAULT_TOL = {raw!r} must be a positive real")
    return tol


def _write(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- row assembly ------------------------------------------------------------

def _fmt(x):
    return f"{float(x):.17g}"


def _params_comment(params: CosmoParams) -> str:
    parts = [f"{k}={_fmt(getattr(params, k))}" for k in PARAM_KEYS]
    return ", ".join(parts)


def _state_rows(params, times, a, adot):
    """Schema rows from sampled kinematics; singular samples are dropped."""
    rows = []
    dropped = 0
    for t, ai, di in zip(times, np.atleast_1d(a), np.atleast_1d(adot)):
        ai, di = float(ai), float(di)
        if not (ai > 0.0 and math.isfinite(di)):
            dropped += 1
            continue
        ds = derived_state(params, ai, di)
        res = di**2 - float(z_of_a(params, ai))
        rows.append(
            (float(t), ai, di, ds.hubble, ds.energy_density, ds.pressure, res)
        )
    return rows, dropped


def _analytic_methods(params):
    methods = []
    if classify(params).family in FAMILY_DRAWS:
        methods.append("closed")
    try:
        solution_coeffs(params)
        methods.append("hypergeometric")
    except FrwError:
        pass
    return methods


def _analytic_sample(params, method, times):
    """Per-sample analytic evaluation; out-of-window times are skipped.

    A sample landing exactly on a big-bang or big-crunch endpoint comes back
    singular (a = 0 or infinite rate) and is skipped too, so every method
    afterwards works from the same grid.
    """
    kept, a, adot = [], [], []
    for t in times:
        try:
            if method == "closed":
                ai, di = closed_state(params, float(t))
            else:
                arr_a, arr_d = hypergeometric_state(params, np.array([float(t)]))
                ai, di = float(arr_a[0]), float(arr_d[0])
        except OutsideWindow:
            continue
        if not (float(ai) > 0.0 and math.isfinite(float(di))):
            continue
        kept.append(float(t))
        a.append(float(ai))
        adot.append(float(di))
    return np.asarray(kept), np.asarray(a), np.asarray(adot)


def _method_samples(params, method, times):
    """One (times, a, adot) triple per requested method name.

    Integration engines are seeded from the first analytic sample, so the
    request must include a family with an analytic route; rows the analytic
    window cannot cover are omitted for every method alike.
    """
    analytic = _analytic_methods(params)
    if method == "all":
        wanted = analytic + ["ode", "quadrature"]
    else:
        wanted = [method]

    needs_seed = [m for m in wanted if m in ("ode", "quadrature")]
    seed_source = None
    for m in analytic:
        if m in wanted or needs_seed:
            seed_source = m
            break
    if needs_seed and seed_source is None:
        raise UsageError(
            "the ode and quadrature methods need an analytic solution to seed "
            f"initial data, and none covers this family ({classify(params).family.value})"
        )
    for m in wanted:
        if m in ("closed", "hypergeometric") and m not in analytic:
            raise UsageError(
                f"method {m} is not available for the {classify(params).family.value} family"
            )

    base = seed_source if seed_source is not None else wanted[0]
    kept, a0_arr, d0_arr = _analytic_sample(params, base, times)
    omitted = len(times) - kept.size
    if kept.size < 2:
        raise UsageError("fewer than two grid points fall inside the validity window")

    samples = {}
    for m in wanted:
        if m == base:
            samples[m] = (a0_arr, d0_arr)
        elif m in ("closed", "hypergeometric"):
            k2, a2, d2 = _analytic_sample(params, m, kept)
            if k2.size != kept.size:
                raise UsageError(
                    f"analytic windows of {base} and {m} disagree on the grid"
                )
            samples[m] = (a2, d2)
        elif m == "ode":
            traj = integrate_ode(params, float(a0_arr[0]), float(d0_arr[0]), kept)
            samples[m] = (traj.a, traj.adot)
        else:
            traj = quadrature_trajectory(
                params, kept, float(a0_arr[0]), float(d0_arr[0])
            )
            samples[m] = (traj.a, traj.adot)
    return kept, samples, omitted, wanted


# -- solve -------------------------------------------------------------------

def _solve_payload(params, times, method):
    kept, samples, omitted, methods = _method_samples(params, method, times)
    notes = []
    if omitted:
        notes.append(f"omitted {omitted} rows outside the validity window")

    blocks = {}
    for m in methods:
        a, adot = samples[m]
        rows, dropped = _state_rows(params, kept, a, adot)
        if dropped:
            notes.append(f"omitted {dropped} singular rows from the {m} block")
        blocks[m] = rows

    deviations = None
    if len(methods) > 1:
        pairs = [
            (l, r) for i, l in enumerate(methods) for r in methods[i + 1:]
        ]
        deviations = {
            "columns": ["t"] + [f"dev_{l}_{r}" for l, r in pairs],
            "rows": [
                [float(t)]
                + [abs(float(samples[l][0][i]) - float(samples[r][0][i])) for l, r in pairs]
                for i, t in enumerate(kept)
            ],
        }
    return blocks, deviations, notes, methods


def _solve_csv(params, family, blocks, deviations, notes, method):
    lines = [
        f"# frwcosmo solve {__version__}",
        f"# params: {_params_comment(params)}",
        f"# family: {family}",
        f"# method: {method}",
    ]
    for note in notes:
        lines.append(f"# note: {note}")
    for m, rows in blocks.items():
        if len(blocks) > 1:
            lines.append(f"# block: {m}")
        lines.append(CSV_HEADER)
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
    if deviations is not None:
        lines.append("# block: deviations")
        lines.append(",".join(deviations["columns"]))
        for row in deviations["rows"]:
            lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _solve_json(params, family, blocks, deviations, notes, method):
    cols = CSV_HEADER.split(",")
    payload = {
        "metadata": {
            "tool_version": __version__,
            "params": {k: getattr(params, k) for k in PARAM_KEYS},
            "family": family,
            "method": method,
            "notes": notes,
        },
    }
    as_records = {
        m: [dict(zip(cols, row)) for row in rows] for m, rows in blocks.items()
    }
    if len(blocks) == 1:
        payload["rows"] = next(iter(as_records.values()))
    else:
        payload["blocks"] = as_records
    if deviations is not None:
        dcols = deviations["columns"]
        payload["deviations"] = [dict(zip(dcols, row)) for row in deviations["rows"]]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def cmd_solve(ns, cfg, tol):
    params = _params_from(ns, cfg)
    times = _grid_from(ns, cfg)
    method = _merged(ns, cfg, "method", "closed")
    fmt = _merged(ns, cfg, "format", "csv")
    if method not in ("closed", "ode", "quadrature", "hypergeometric", "all"):
        raise UsageError(f"unknown method {method!r}")
    if fmt not in ("csv", "json"):
        raise UsageError(f"unknown format {fmt!r}")

    family = classify(params).family.value
    blocks, deviations, notes, _ = _solve_payload(params, times, method)
    render = _solve_csv if fmt == "csv" else _solve_json
    _write(render(params, family, blocks, deviations, notes, method), ns.out)

    gate = tol if tol is not None else DEFAULT_CROSS_TOL
    worst = 0.0
    for rows in blocks.values():
        for row in rows:
            scale = max(1.0, float(z_of_a(params, row[1])))
            worst = max(worst, abs(row[6]) / scale)
    if deviations is not None:
        for row in deviations["rows"]:
            worst = max(worst, max(row[1:]))
    if worst > gate:
        print(
            f"residual gate failed: {worst:.3e} above tolerance {gate:.3e}",
            file=sys.stderr,
        )
        return 1
    return 0


# -- classify ----------------------------------------------------------------

def cmd_classify(ns, cfg, tol):
    del tol
    params = _params_from(ns, cfg)
    regime = classify(params)
    routes = _analytic_methods(params)
    notes = []
    if "closed" in routes:
        notes.append("closed-form evaluator available")
    if "hypergeometric" in routes:
        notes.append("hypergeometric time solution available")
    if not routes:
        notes.append("numeric routes only")
    n_index = degenerate_index(params.gamma_bar)
    if regime.family is Family.LogarithmicDegenerate:
        notes.append("second solution is logarithmic; analytic routes excluded")
    record = {
        "family": regime.family.value,
        "discriminant": regime.discriminant,
        "lambda_scale": regime.lambda_scale,
        "degenerate_index": n_index,
        "params": {k: getattr(params, k) for k in PARAM_KEYS},
        "notes": notes,
    }
    _write(json.dumps(record, indent=2, sort_keys=True) + "\n", ns.out)
    return 0


# -- validate ----------------------------------------------------------------

def cmd_validate(ns, cfg, tol):
    subset = _merged(ns, cfg, "subset")
    try:
        results = run_reference_suite(subset=subset, cross_tolerance=tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(suite_text(results), ns.out)
    failing = sorted(name for name, rep in results.items() if not rep.passed)
    if failing:
        print("failing checks: " + ", ".join(failing), file=sys.stderr)
        return 1
    return 0


# -- hyp2f1 ------------------------------------------------------------------

def cmd_hyp2f1(ns, cfg, tol):
    del cfg, tol
    value = hyp2f1(Hyp2F1Args(ns.a, ns.b, ns.c, ns.x))
    print(f"{value:.16g}")
    return 0


# -- table -------------------------------------------------------------------

def _table_window(params):
    """Canonical plotting interval for one family: the finite window with a
    2 percent margin, or a few family timescales beside a singular edge."""
    w = default_window(params)
    lam = math.sqrt(abs(params.lambda_cc) / 3.0)
    unit = 1.0 / (2.0 * lam) if lam > 0.0 else params.a0
    if math.isfinite(w.t_min) and math.isfinite(w.t_max):
        margin = 0.02 * (w.t_max - w.t_min)
        return w.t_min + margin, w.t_max - margin
    if math.isfinite(w.t_min):
        return w.t_min + 0.02 * unit, w.t_min + 4.0 * unit
    if math.isfinite(w.t_max):
        return w.t_max - 4.0 * unit, w.t_max - 0.02 * unit
    return params.t0 - 2.0 * unit, params.t0 + 2.0 * unit


def _table_specs(family, kappa):
    if family == "zero-lambda-closed":
        return [
            (f"{family}-radiation", CosmoParams(1.0, 1, 0.0, 1.0)),
            (f"{family}-dust", CosmoParams(0.5, 1, 0.0, 1.0)),
            (f"{family}-vacuum", CosmoParams(-1.0, 1, 0.0, 1.0)),
        ]
    if family == "zero-lambda-open":
        return [
            (f"{family}-radiation", CosmoParams(1.0, -1, 0.0, 1.0)),
            (f"{family}-dust", CosmoParams(0.5, -1, 0.0, 1.0)),
            (f"{family}-vacuum", CosmoParams(-1.0, -1, 0.0, 1.0)),
        ]
    if family == "radiation-curved":
        k = 1 if kappa is None else int(kappa)
        if k not in (-1, 1):
            raise UsageError("radiation-curved tables need --kappa 1 or -1")
        return [
            (f"{family}-k{k}-sinh", CosmoParams(1.0, k, 3.0, 1.0)),
            (f"{family}-k{k}-critical", CosmoParams(1.0, k, 0.75, 1.0)),
            (f"{family}-k{k}-cosh", CosmoParams(1.0, k, 0.45, 1.0)),
            (f"{family}-k{k}-trig", CosmoParams(1.0, k, -1.5, 1.0)),
        ]
    if family == "flat-radiation":
        return [
            (f"{family}-positive-lambda", CosmoParams(1.0, 0, 3.0, 1.0)),
            (f"{family}-negative-lambda", CosmoParams(1.0, 0, -3.0, 1.0)),
        ]
    raise UsageError(
        f"unknown table family {family!r}; choose from zero-lambda-closed, "
        "zero-lambda-open, radiation-curved, flat-radiation"
    )


def _table_payload(spec):
    name, params = spec
    lo, hi = _table_window(params)
    grid = np.linspace(lo, hi, TABLE_GRID_POINTS)
    traj = closed_trajectory(params, grid)
    rows, _ = _state_rows(params, traj.times, traj.a, traj.adot)
    lines = [
        f"# frwcosmo table {__version__}",
        f"# params: {_params_comment(params)}",
        f"# family: {classify(params).family.value}",
        CSV_HEADER,
    ]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return name, "\n".join(lines) + "\n"


def _plot_script(family, filenames):
    lines = [
        "# Gnuplot commands regenerating the scale-factor figure for this",
        "# table family from the CSV files next to this script.",
        "set datafile separator ','",
        "set xlabel 't'",
        "set ylabel 'a(t)'",
        "set key left top",
        "plot \\",
    ]
    plots = [
        f"  '{name}.csv' using 1:2 with lines title '{name.split(family + '-', 1)[1]}'"
        for name in filenames
    ]
    lines.append(", \\\n".join(plots))
    return "\n".join(lines) + "\n"


def cmd_table(ns, cfg, tol):
    del tol
    family = _merged(ns, cfg, "family")
    if family is None:
        raise UsageError("table needs --family")
    out_dir = ns.out if ns.out is not None else "tables"
    jobs = int(_merged(ns, cfg, "jobs", 1))
    if jobs < 1:
        raise UsageError(f"--jobs must be at least 1, got {jobs}")
    specs = _table_specs(family, _merged(ns, cfg, "kappa"))

    if jobs == 1:
        payloads = [_table_payload(s) for s in specs]
    else:
        # Deterministic ordering: results are buffered and written in the
        # input order regardless of completion order.
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            payloads = list(pool.map(_table_payload, specs))

    os.makedirs(out_dir, exist_ok=True)
    for name, text in payloads:
        _write(text, os.path.join(out_dir, f"{name}.csv"))
    script = _plot_script(family, [name for name, _ in payloads])
    _write(script, os.path.join(out_dir, f"{family}.gp"))
    return 0


# -- entry point -------------------------------------------------------------

def _add_param_flags(sp):
    sp.add_argument("--gamma-bar", dest="gamma_bar", type=float)
    sp.add_argument("--kappa", dest="kappa", type=int)
    sp.add_argument("--lambda", dest="lambda_cc", type=float)
    sp.add_argument("--c", dest="c_int", type=float)
    sp.add_argument("--a0", dest="a0", type=float)
    sp.add_argument("--t0", dest="t0", type=float)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="frw",
        description="Closed-form and numeric FRW cosmology solutions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="map parameters to a solution family")
    sp.add_argument("config", nargs="?", help="JSON config file")
    _add_param_flags(sp)
    sp.add_argument("--out")
    sp.set_defaults(handler=cmd_classify)

    sp = sub.add_parser("solve", help="sample a(t) on a time grid")
    sp.add_argument("config", nargs="?", help="JSON config file")
    _add_param_flags(sp)
    sp.add_argument("--t-start", dest="t_start", type=float)
    sp.add_argument("--t-end", dest="t_end", type=float)
    sp.add_argument("--n", dest="n", type=int)
    sp.add_argument(
        "--method",
        choices=("closed", "ode", "quadrature", "hypergeometric", "all"),
    )
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--out")
    sp.set_defaults(handler=cmd_solve)

    sp = sub.add_parser("validate", help="run the cross-verification suite")
    sp.add_argument("config", nargs="?", help="JSON config file")
    sp.add_argument("--subset", help="check name or prefix, e.g. ermakov")
    sp.add_argument("--out")
    sp.set_defaults(handler=cmd_validate)

    sp = sub.add_parser("hyp2f1", help="evaluate 2F1(a, b; c; x)")
    sp.add_argument("a", type=float)
    sp.add_argument("b", type=float)
    sp.add_argument("c", type=float)
    sp.add_argument("x", type=float)
    sp.set_defaults(handler=cmd_hyp2f1)

    sp = sub.add_parser("table", help="regenerate canonical family data files")
    sp.add_argument("config", nargs="?", help="JSON config file")
    sp.add_argument("--family")
    sp.add_argument("--kappa", dest="kappa", type=int)
    sp.add_argument("--jobs", dest="jobs", type=int)
    sp.add_argument("--out", help="output directory (default: tables)")
    sp.set_defaults(handler=cmd_table)

    return parser


def main(argv=None):
    ns = _build_parser().parse_args(argv)
    try:
        tol = _env_tolerance()
        cfg = _load_config(ns.config) if getattr(ns, "config", None) else {}
        return ns.handler(ns, cfg, tol)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FrwError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
