"""CSV and JSON emission of exponent curves.

Both formats carry 12 significant digits, so a value parsed back from either
gives the same double.
"""
from __future__ import annotations

import datetime as _dt
import io
import json
import math
from typing import Iterable, TextIO

from .curves import ExponentCurve

LN2 = math.log(2.0)
HEADER = ("R", "value", "rho_star", "s_star", "phase")


def fmt(x: float) -> str:
    return "%.12g" % x


def rounded(x: float) -> float | str:
    """Round to 12 significant digits; non-finite values become strings for valid JSON."""
    if not math.isfinite(x):
        return fmt(x)
    return float(fmt(x))


def _scale(curve: ExponentCurve, bits: bool):
    f = 1.0 / LN2 if bits else 1.0
    for p in curve.points:
        yield p.R * f, p.value * f, p.rho_star, p.s_star, p.phase


def write_curve_csv(curve: ExponentCurve, fh: TextIO, reproducible: bool = False, bits: bool = False) -> None:
    """One comment line with curve metadata, then ``R,value,rho_star,s_star,phase`` rows.

    A leading ``# generated`` timestamp is written unless ``reproducible``.
    """
    f = 1.0 / LN2 if bits else 1.0
    if not reproducible:
        fh.write(f"# generated {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}\n")
    fh.write(
        f"# kind={curve.kind} R1={fmt(curve.R1 * f)} value_R1={fmt(curve.value_R1 * f)} "
        f"zero_rate_value={fmt(curve.zero_rate_value * f)} units={'bits' if bits else 'nats'}\n"
    )
    fh.write(",".join(HEADER) + "\n")
    for R, v, rho, s, phase in _scale(curve, bits):
        fh.write(f"{fmt(R)},{fmt(v)},{fmt(rho)},{fmt(s)},{phase}\n")


def curve_to_dict(curve: ExponentCurve, bits: bool = False) -> dict:
    f = 1.0 / LN2 if bits else 1.0
    return {
        "kind": curve.kind,
        "units": "bits" if bits else "nats",
        "R1": rounded(curve.R1 * f),
        "value_R1": rounded(curve.value_R1 * f),
        "zero_rate_value": rounded(curve.zero_rate_value * f),
        "points": [
            {"R": rounded(R), "value": rounded(v), "rho_star": rounded(rho), "s_star": rounded(s), "phase": phase}
            for R, v, rho, s, phase in _scale(curve, bits)
        ],
    }


def write_curves_json(curves: Iterable[ExponentCurve], fh: TextIO, bits: bool = False, meta: dict | None = None) -> None:
    doc = dict(meta or {})
    doc["curves"] = [curve_to_dict(c, bits) for c in curves]
    json.dump(doc, fh, indent=2)
    fh.write("\n")


def curve_csv_text(curve: ExponentCurve, reproducible: bool = True, bits: bool = False) -> str:
    buf = io.StringIO()
    write_curve_csv(curve, buf, reproducible, bits)
    return buf.getvalue()


def read_curve_csv(text: str) -> list[dict]:
    """Parse rows written by :func:`write_curve_csv` (comment lines skipped)."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    keys = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        vals = ln.split(",")
        row = {k: (v if k == "phase" else float(v)) for k, v in zip(keys, vals)}
        rows.append(row)
    return rows
