"""Command-line surface.

Subcommands: thresholds, pd-check, bank {create,info}, laplace, kappa,
smalldev, bounds, verify.  Every artifact embeds the full run
configuration and a format version, carries no timestamps, and is
rebuilt byte-identically by a re-run with the same config.

Exit codes: 0 success, 1 verification gate failure, 2 usage or
parameter error, 3 numerical failure (factorization or quadrature).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import laplace as lap
from . import potential as pot
from . import smalldev as sd
from .bounds import bounds_report
from .config import RunConfig, load_config
from .errors import NumericalError, ParameterError
from .gmc import create_bank, load_bank, save_bank
from .params import ModelParams
from .verify import payload_bytes, run_acceptance

_FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# artifact plumbing
# ---------------------------------------------------------------------------

def _artifact(kind: str, cfg: RunConfig, data) -> dict:
    return {
        "formatVersion": _FORMAT_VERSION,
        "kind": kind,
        "config": cfg.to_flat(),
        "data": data,
    }


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_value(x) for x in v)
    return str(v)


def _write_csv(path: str, cfg: RunConfig, rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        f.write(f"# formatVersion = {_FORMAT_VERSION}\n")
        for k, v in cfg.to_flat().items():
            f.write(f"# {k} = {_csv_value(v)}\n")
        if not rows:
            return
        writer = csv.writer(f)
        cols = list(rows[0].keys())
        writer.writerow(cols)
        for row in rows:
            writer.writerow([_csv_value(row.get(c)) for c in cols])


def _emit(cfg: RunConfig, name: str, kind: str, data, rows: list[dict] | None = None):
    """Write the artifact in each configured format; returns the paths."""
    os.makedirs(cfg.out_directory, exist_ok=True)
    paths = []
    if "json" in cfg.out_formats:
        path = os.path.join(cfg.out_directory, f"{name}.json")
        with open(path, "w") as f:
            json.dump(_artifact(kind, cfg, data), f, indent=2, sort_keys=True)
            f.write("\n")
        paths.append(path)
    if "csv" in cfg.out_formats:
        path = os.path.join(cfg.out_directory, f"{name}.csv")
        if rows is None:
            # non-tabular report: one row of its scalar fields
            rows = [{k: v for k, v in data.items() if not isinstance(v, (dict, list))}] \
                if isinstance(data, dict) else [{"value": data}]
        _write_csv(path, cfg, rows)
        paths.append(path)
    return paths


def _load_effective_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    updates = {}
    if getattr(args, "out", None):
        updates["out_directory"] = args.out
    if getattr(args, "format", None):
        updates["out_formats"] = [args.format]
    if getattr(args, "seed_bank", None) is not None:
        updates["mc_bank_id"] = args.seed_bank
    if updates:
        import dataclasses

        cfg = dataclasses.replace(cfg, **updates)
    return cfg


def _get_bank(cfg: RunConfig, args):
    """Bank from --bank when given, otherwise built from the config."""
    path = getattr(args, "bank", None)
    if path:
        return load_bank(path)
    params = cfg.params()
    spacing = 2.0 * cfg.grid_radius / cfg.grid_cells_per_axis
    return create_bank(
        params,
        cfg.grid_radius,
        cfg.grid_cells_per_axis,
        cfg.mc_n,
        cfg.mc_bank_id,
        epsilon=cfg.epsilon(spacing),
        workers=getattr(args, "workers", None),
        repair_gate=cfg.tol_repair_gate,
    )


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad numeric list {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_thresholds(cfg: RunConfig, args) -> int:
    rows = []
    for d in range(args.dmin, args.dmax + 1):
        t = pot.pd_threshold(d)
        t_star = pot.boundary_threshold(d)
        t_zero = pot.uniform_energy_threshold(d)
        var = pot.ball_volume(d) ** 2 * (math.log(cfg.model_T) - math.log(t_zero))
        rows.append(
            {
                "d": d,
                "T": t,
                "TStar": t_star,
                "TZero": t_zero,
                # spatial-mean variance at the configured T; meaningless
                # (negative) when T sits below the zero-variance point
                "varOmega": var if var > 0 else None,
            }
        )
    paths = _emit(cfg, "thresholds", "thresholds", rows, rows=rows)
    print(json.dumps(rows, indent=2))
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_pd_check(cfg: RunConfig, args) -> int:
    params = cfg.params()
    cells = args.cells or min(cfg.grid_cells_per_axis**params.d, 4096)
    report = pot.pd_min_eigenvalue(params, cells)
    data = report.to_dict()
    row = {k: v for k, v in data.items() if k != "violatingDensity"}
    paths = _emit(cfg, "pd_report", "pd-report", data, rows=[row])
    print(json.dumps(row, indent=2))
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_bank(cfg: RunConfig, args) -> int:
    if args.bank_cmd == "info":
        bank = load_bank(args.path)
        info = dict(bank.header())
        info.update(mean=bank.mean(), stdError=bank.std_error())
        print(json.dumps(info, indent=2, sort_keys=True))
        return 0
    # create
    bank = _get_bank(cfg, args)
    os.makedirs(cfg.out_directory, exist_ok=True)
    path = os.path.join(cfg.out_directory, f"bank-{bank.bank_id}.bank")
    save_bank(bank, path)
    print(json.dumps(bank.header(), indent=2, sort_keys=True))
    print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_laplace(cfg: RunConfig, args) -> int:
    bank = _get_bank(cfg, args)
    params = bank.params
    xs = np.linspace(args.xmin, args.xmax, args.points)
    key = cfg.mc_stream_keys[0]
    if args.method == "mixture":
        ests = [
            lap.exponential_mixture_estimate(bank, params, args.r, math.exp(x), key)
            for x in xs
        ]
    else:
        ests = lap.laplace_curve(bank, args.r, xs, stream_key=key)
    rows = [
        {
            "x": e.x,
            "estimate": e.estimate,
            "stdError": e.std_error,
            "N": e.N,
            "method": e.method,
        }
        for e in ests
    ]
    paths = _emit(cfg, "laplace_curve", "laplace-curve", rows, rows=rows)
    print(json.dumps(rows, indent=2))
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_kappa(cfg: RunConfig, args) -> int:
    svals = _float_list(args.s)
    zvals = _float_list(args.z)
    rows = []
    if args.mode == "degenerate":
        b = cfg.params().b
        fn = lap.inverse_heat_factor_exact if args.inverse else lap.heat_factor_exact
        for s in svals:
            for z in zvals:
                point = fn(s, z, b, args.point_mass, tol=cfg.tol_quad)
                rows.append(
                    {"s": s, "z": z, "value": point.value, "stdError": 0.0, "mode": point.mode}
                )
    else:
        bank = _get_bank(cfg, args)
        params = bank.params
        fn = lap.inverse_heat_factor_mc if args.inverse else lap.heat_factor_mc
        key = cfg.mc_stream_keys[0]
        for s in svals:
            for z in zvals:
                point = fn(bank, params, s, z, stream_key=key)
                rows.append(
                    {
                        "s": s,
                        "z": z,
                        "value": point.value,
                        "stdError": point.std_error,
                        "mode": point.mode,
                        "tailFlag": point.tail_flag,
                        "regionNote": point.region_note,
                    }
                )
    name = "kappa2_points" if args.inverse else "kappa_points"
    paths = _emit(cfg, name, "heat-factor", rows, rows=rows)
    print(json.dumps(rows, indent=2))
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_smalldev(cfg: RunConfig, args) -> int:
    bank = _get_bank(cfg, args)
    deltas = np.geomspace(args.dmin, args.dmax, args.points)
    curve = sd.smalldev_curve(bank, deltas)
    rows = [
        {"delta": float(d), "prob": float(p), "ciHalfWidth": float(w), "N": curve.N}
        for d, p, w in zip(curve.deltas, curve.probs, curve.ci_half_widths)
    ]
    data = {"curve": rows}
    try:
        fit = sd.fit_lognormal_exponent(curve)
        data["fit"] = fit.to_dict()
    except ParameterError as exc:
        data["fit"] = None
        data["fitNote"] = str(exc)
    paths = _emit(cfg, "smalldev", "smalldev-curve", data, rows=rows)
    print(json.dumps(data, indent=2))
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_bounds(cfg: RunConfig, args) -> int:
    params = cfg.params()
    report = bounds_report(params, args.r, cbar1_input=args.cbar1)
    data = report.to_dict()
    paths = _emit(cfg, "bounds_report", "bounds-report", data)
    print(json.dumps(data, indent=2, sort_keys=True))
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    only = None
    if args.criteria:
        only = [tok.strip() for tok in args.criteria.split(",") if tok.strip()]
    payload = run_acceptance(cfg, workers=getattr(args, "workers", None), only=only)
    for crit in payload["criteria"]:
        status = "PASS" if crit["passed"] else "FAIL"
        print(f"criterion {crit['id']:02d} {crit['name']}: {status}")
    os.makedirs(cfg.out_directory, exist_ok=True)
    path = os.path.join(cfg.out_directory, "verify.json")
    with open(path, "wb") as f:
        f.write(payload_bytes(payload))
        f.write(b"\n")
    print(f"wrote {path}", file=sys.stderr)
    if not payload["allPass"]:
        failed = [str(c["id"]) for c in payload["criteria"] if not c["passed"]]
        print(f"failed criteria: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=argparse.SUPPRESS, help="run configuration file (text or JSON)")
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides config)")
    p.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="worker thread cap (results unchanged)")
    p.add_argument("--seed-bank", type=int, dest="seed_bank", default=argparse.SUPPRESS, help="bank id override (the reproducibility seed)")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS, help="artifact format (overrides config)")
    return p


def _build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="logchaos",
        description="Numerical laboratory for multiplicative chaos with a strictly logarithmic kernel.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", parents=[common], help="positive-definiteness thresholds per dimension")
    p.add_argument("--dmin", type=int, default=1)
    p.add_argument("--dmax", type=int, default=5)
    p.set_defaults(fn=cmd_thresholds)

    p = sub.add_parser("pd-check", parents=[common], help="Gram-matrix eigenvalue certificate")
    p.add_argument("--cells", type=int, default=None, help="target total cell count")
    p.set_defaults(fn=cmd_pd_check)

    p = sub.add_parser("bank", parents=[common], help="sample-bank management")
    bank_sub = p.add_subparsers(dest="bank_cmd", required=True)
    pc = bank_sub.add_parser("create", parents=[common], help="build and save a bank from the config")
    pc.set_defaults(fn=cmd_bank)
    pi = bank_sub.add_parser("info", parents=[common], help="print a saved bank's header")
    pi.add_argument("path")
    pi.set_defaults(fn=cmd_bank)

    p = sub.add_parser("laplace", parents=[common], help="Laplace-transform curve of a chaos mass")
    p.add_argument("--bank", default=None, help="saved bank file (default: build from config)")
    p.add_argument("--r", type=float, default=0.5, help="ball radius of the target mass")
    p.add_argument("--xmin", type=float, default=1.0)
    p.add_argument("--xmax", type=float, default=3.5)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--method", choices=("auto", "mixture"), default="auto")
    p.set_defaults(fn=cmd_laplace)

    p = sub.add_parser("kappa", parents=[common], help="heat-factor values on an (s, z) grid")
    p.add_argument("--bank", default=None)
    p.add_argument("--mode", choices=("degenerate", "mc"), default="degenerate")
    p.add_argument("--inverse", action="store_true", help="inverse-mass factor")
    p.add_argument("--s", default="1.0", help="comma-separated s values")
    p.add_argument("--z", default="6.0", help="comma-separated z values")
    p.add_argument("--point-mass", type=float, default=1.0, dest="point_mass")
    p.set_defaults(fn=cmd_kappa)

    p = sub.add_parser("smalldev", parents=[common], help="small-deviation curve and lognormal fit")
    p.add_argument("--bank", default=None)
    p.add_argument("--dmin", type=float, default=1e-3)
    p.add_argument("--dmax", type=float, default=0.5)
    p.add_argument("--points", type=int, default=12)
    p.set_defaults(fn=cmd_smalldev)

    p = sub.add_parser("bounds", parents=[common], help="exponent bounds report")
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--cbar1", type=float, default=None, help="externally estimated unit-ball rate")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", default=None, help="comma-separated criterion ids or names")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    for name in ("config", "out", "workers", "seed_bank", "format"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        cfg = _load_effective_config(args)
        return args.fn(cfg, args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
