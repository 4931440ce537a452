"""Command-line front end.

Exit status: 0 on success, 2 for unreadable or malformed input, 3 when the
input parses but fails validation.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence, TextIO

import numpy as np

from . import kernels
from .channel import load_channel_spec, validate_input
from .curves import (
    CHERNOFF,
    CKM,
    GALLAGER,
    PointSolver,
    all_curves,
    curve_chernoff_new,
    curve_ckm,
    curve_gallager,
)
from .ensemble import EXACT, MONTE_CARLO, MIN_TRIALS, EnumeratorModel, RateFunction, mc_report, quantized_exponent
from .errors import ExpurgateError, SpecFormatError
from .exponents import ExponentInputs, best_chernoff_parameter, ckm_E, gallager_EG
from .export import LN2, fmt, rounded, write_curve_csv, write_curves_json
from .gaussian import GaussianParams, gaussian_exponent_curve
from .optimize import DEFAULT_RHO_MAX, DEFAULT_TOL
from .ratedistortion import ORACLE_MAX_ALPHABET, RdProblem, ckm_oracle_exponent

SWEEP_Q = tuple(round(0.05 * k, 2) for k in range(1, 20))
MODE_ALIASES = {"exact": EXACT, EXACT: EXACT, "mc": MONTE_CARLO, MONTE_CARLO: MONTE_CARLO}


class UsageError(Exception):
    """Malformed command-line value (exit 2)."""


def parse_rates(text: str, bits: bool = False) -> np.ndarray:
    """``min:max:count`` to an evenly spaced grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--rates expects min:max:count, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--rates: {exc}") from None
    if n < 2:
        raise ValueError(f"rate grid needs at least 2 points, got {n}")
    if not (0 <= lo < hi) or not math.isfinite(hi):
        raise ValueError(f"rate grid needs 0 <= min < max, got {lo}:{hi}")
    scale = LN2 if bits else 1.0
    return np.linspace(lo * scale, hi * scale, n)


def parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: cannot parse {text!r}") from None


def parse_keyvals(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"cannot parse {item!r}") from None
    return out


def _inputs(args) -> ExponentInputs:
    if not args.channel:
        raise UsageError("--channel is required")
    ch, q = load_channel_spec(args.channel)
    if args.q:
        q = validate_input(parse_floats(args.q, "--q"), ch)
    return ExponentInputs(ch, q)


def _emit_table(rows: list[dict], args, out: TextIO, meta: dict | None = None) -> None:
    if args.format == "json":
        doc = dict(meta or {})
        doc["rows"] = [{k: rounded(v) if isinstance(v, float) else v for k, v in r.items()} for r in rows]
        json.dump(doc, out, indent=2)
        out.write("\n")
        return
    if meta:
        out.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    keys = list(rows[0])
    out.write(",".join(keys) + "\n")
    for r in rows:
        out.write(",".join(fmt(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys) + "\n")


def cmd_exponent(args, out: TextIO) -> int:
    inputs = _inputs(args)
    f = 1.0 / LN2 if args.bits else 1.0
    rows = []
    if args.rates:
        grid = parse_rates(args.rates, args.bits)
        sol = {
            GALLAGER: PointSolver(inputs, kernels.GALLAGER, 0.5, False, args.rho_max, args.tol),
            CKM: PointSolver(inputs, kernels.CKM, 0.5, False, args.rho_max, args.tol),
            CHERNOFF: PointSolver(
                inputs, kernels.CKM, 0.5 if args.s is None else args.s, args.s is None, args.rho_max, args.tol
            ),
        }
        for R in grid:
            row = {"R": float(R) * f}
            for name, solver in sol.items():
                raw, rho, s = solver.solve(float(R))
                row[name] = max(0.0, raw) * f
                row[f"rho_{name}"] = rho
            row["s_star"] = s
            rows.append(row)
    else:
        for rho in parse_floats(args.rho or "1", "--rho"):
            if args.s is None:
                best = best_chernoff_parameter(inputs, rho, args.tol)
                value, s = best.value, best.arg
            else:
                value, s = ckm_E(inputs, rho, args.s), args.s
            rows.append(
                {
                    "rho": float(rho),
                    GALLAGER: gallager_EG(inputs, rho) * f,
                    CKM: ckm_E(inputs, rho) * f,
                    CHERNOFF: value * f,
                    "s_star": s,
                }
            )
    _emit_table(rows, args, out, {"units": "bits" if args.bits else "nats"})
    return 0


def _write_curves(curves, args, out: TextIO, meta: dict | None = None) -> None:
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        if args.format == "json":
            with open(os.path.join(args.out_dir, "curves.json"), "w") as fh:
                write_curves_json(curves, fh, args.bits, meta)
        else:
            for c in curves:
                with open(os.path.join(args.out_dir, f"{c.kind}.csv"), "w") as fh:
                    write_curve_csv(c, fh, args.reproducible, args.bits)
        return
    if args.format == "json":
        write_curves_json(curves, out, args.bits, meta)
    else:
        for c in curves:
            write_curve_csv(c, out, args.reproducible, args.bits)


def _sweep(args, inputs: ExponentInputs, grid) -> list[dict]:
    ch = inputs.channel
    if ch.input_size != 2:
        raise ValueError("--sweep-q needs a binary-input channel")
    best = [(-math.inf, math.nan)] * len(grid)
    for q1 in SWEEP_Q:
        c = curve_chernoff_new(ExponentInputs(ch, validate_input([1 - q1, q1])), grid, args.rho_max, args.tol, args.s)
        best = [max(b, (v, q1)) for b, v in zip(best, c.values)]
    f = 1.0 / LN2 if args.bits else 1.0
    return [{"R": float(R) * f, "value": v * f, "q1": q1} for R, (v, q1) in zip(grid, best)]


def cmd_curve(args, out: TextIO) -> int:
    grid = parse_rates(args.rates, args.bits) if args.rates else None
    if args.gaussian is not None:
        kv = parse_keyvals(args.gaussian)
        p = GaussianParams(kv.get("S", 1.0), kv.get("sigma2", 1.0))
        _write_curves([gaussian_exponent_curve(p, grid)], args, out)
        return 0
    inputs = _inputs(args)
    if args.s is None:
        curves = all_curves(inputs, grid, args.rho_max, args.tol)
        ordered = [curves[GALLAGER], curves[CKM], curves[CHERNOFF]]
    else:
        new = curve_chernoff_new(inputs, grid, args.rho_max, args.tol, args.s)
        shared = new.rates if grid is None else grid
        ordered = [curve_gallager(inputs, shared, args.rho_max, args.tol), curve_ckm(inputs, shared, args.rho_max, args.tol), new]
    _write_curves(ordered, args, out)
    if args.sweep_q:
        rows = _sweep(args, inputs, ordered[-1].rates)
        if args.out_dir:
            with open(os.path.join(args.out_dir, f"sweep_q.{args.format}"), "w") as fh:
                _emit_table(rows, args, fh, {"kind": "sweep_q"})
        else:
            _emit_table(rows, args, out, {"kind": "sweep_q"})
    return 0


def cmd_gaussian(args, out: TextIO) -> int:
    grid = parse_rates(args.rates, args.bits) if args.rates else None
    p = GaussianParams(args.S, args.sigma2)
    curve = gaussian_exponent_curve(p, grid)
    meta = {"S": p.S, "sigma2": p.sigma2}
    if args.delta:
        rf = RateFunction.gaussian(p, args.delta)
        gap = max(abs(quantized_exponent(rf, pt.R, args.rho_max) - pt.value) for pt in curve.points)
        meta.update(delta=args.delta, quantized_max_gap=rounded(gap))
    if args.format == "json" or args.out_dir:
        _write_curves([curve], args, out, meta)
    else:
        if args.delta:
            out.write(f"# quantized delta={fmt(args.delta)} max_gap={fmt(gap)}\n")
        write_curve_csv(curve, out, args.reproducible, args.bits)
    return 0


def cmd_mc(args, out: TextIO) -> int:
    scale = LN2 if args.bits else 1.0
    mode = MODE_ALIASES.get(args.mode)
    if mode is None:
        raise UsageError(f"--mode must be one of {sorted(MODE_ALIASES)}")
    m = EnumeratorModel(args.n, args.R * scale, args.I * scale, args.rho)
    report = mc_report(m, mode, args.trials, args.seed)
    if args.bits:
        for key in ("theory_exponent", "empirical_exponent", "gap"):
            report[key] /= LN2
    report["units"] = "bits" if args.bits else "nats"
    if args.format == "csv":
        row = {k: v for k, v in report.items() if k != "model"} | {k: float(v) for k, v in m.as_dict().items()}
        _emit_table([{k: ("" if v is None else v) for k, v in row.items()}], args, out)
    else:
        json.dump(report, out, indent=2)
        out.write("\n")
    return 0


def cmd_compare(args, out: TextIO) -> int:
    inputs = _inputs(args)
    grid = parse_rates(args.rates, args.bits) if args.rates else None
    curves = all_curves(inputs, grid, args.rho_max, args.tol)
    f = 1.0 / LN2 if args.bits else 1.0
    g, c, n = curves[GALLAGER].values, curves[CKM].values, curves[CHERNOFF].values
    rows = []
    for kind, curve in curves.items():
        rows.append(
            {
                "kind": kind,
                "R1": curve.R1 * f,
                "value_R1": curve.value_R1 * f,
                "linear_constant": curve.zero_crossing * f,
                "zero_rate_value": curve.zero_rate_value * f,
            }
        )
    meta = {
        "min_slack_ckm_minus_gallager": rounded(float(np.min(c - g)) * f),
        "min_slack_new_minus_ckm": rounded(float(np.min(n - c)) * f),
    }
    if args.oracle:
        if inputs.channel.input_size > ORACLE_MAX_ALPHABET:
            raise ValueError(f"--oracle needs |X| <= {ORACLE_MAX_ALPHABET}")
        prob = RdProblem(inputs.q, inputs.distance(0.5))
        rates = curves[CKM].rates
        idx = np.linspace(0, len(rates) - 1, min(len(rates), args.oracle_points)).round().astype(int)
        gap = max(abs(ckm_oracle_exponent(prob, float(rates[i])) - c[i]) for i in idx)
        meta["oracle_max_gap"] = rounded(gap * f)
    _emit_table(rows, args, out, meta)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), help="default csv; json for mc")
    common.add_argument("--bits", action="store_true", help="rates and exponents in bits instead of nats")
    common.add_argument("--reproducible", action="store_true", help="omit the timestamp line")
    common.add_argument("--out-dir", help="write files here instead of stdout")
    common.add_argument("--seed", type=int)

    chan = argparse.ArgumentParser(add_help=False)
    chan.add_argument("--channel", metavar="PATH", help='JSON file {"transition": [[...]], "input": [...]}')
    chan.add_argument("--q", help='input distribution override, e.g. "0.9,0.1"')
    chan.add_argument("--rates", metavar="MIN:MAX:COUNT")
    chan.add_argument("--rho-max", type=float, default=DEFAULT_RHO_MAX)
    chan.add_argument("--tol", type=float, default=DEFAULT_TOL)
    smode = chan.add_mutually_exclusive_group()
    smode.add_argument("--s", type=float, help="fix the Chernoff parameter")
    smode.add_argument("--optimize-s", action="store_true", help="maximize over s (default)")

    ap = argparse.ArgumentParser(prog="expurgate", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponent", parents=[common, chan], help="E-functions at given rho, or exponents at given rates")
    p.add_argument("--rho", help="comma-separated rho values (default 1)")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("curve", parents=[common, chan], help="the three exponent curves")
    p.add_argument("--gaussian", nargs="*", metavar="KEY=VALUE", help="Gaussian curve instead, e.g. S=1 sigma2=1")
    p.add_argument("--sweep-q", action="store_true", help="best binary input distribution per rate")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("gaussian", parents=[common], help="Gaussian-channel curve")
    p.add_argument("--S", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--rates", metavar="MIN:MAX:COUNT")
    p.add_argument("--delta", type=float, help="also compare the quantized pipeline at this step")
    p.add_argument("--rho-max", type=float, default=DEFAULT_RHO_MAX)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("mc", parents=[common], help="fractional moment of the type enumerator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--I", type=float, required=True)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--mode", default=EXACT, help="exact_binomial (exact) or monte_carlo (mc)")
    p.add_argument("--trials", type=int, default=MIN_TRIALS)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("compare", parents=[common, chan], help="summary of the three curves")
    p.add_argument("--oracle", action="store_true", help="check the CKM curve against the joint-distribution scan")
    p.add_argument("--oracle-points", type=int, default=21)
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "json" if args.command == "mc" else "csv"
    out = sys.stdout if out is None else out
    try:
        return args.func(args, out)
    except (UsageError, SpecFormatError, OSError, json.JSONDecodeError) as exc:
        print(f"expurgate: error: {exc}", file=sys.stderr)
        return 2
    except (ExpurgateError, ValueError) as exc:
        print(f"expurgate: invalid input: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
