import io
import json
import math

import numpy as np
import pytest

from expurgate.curves import curve_ckm
from expurgate.export import curve_csv_text, curve_to_dict, read_curve_csv, write_curve_csv, write_curves_json
from expurgate.gaussian import GaussianParams, gaussian_exponent_curve


@pytest.fixture
def curve(ex1):
    return curve_ckm(ex1, np.linspace(0, 0.07, 15))


def test_csv_header_and_rows(curve):
    text = curve_csv_text(curve)
    lines = text.splitlines()
    assert lines[0].startswith("# kind=ckm_bhatt")
    assert lines[1] == "R,value,rho_star,s_star,phase"
    assert len(lines) == 2 + 15


def test_timestamp_only_when_not_reproducible(curve):
    buf = io.StringIO()
    write_curve_csv(curve, buf)
    assert buf.getvalue().startswith("# generated ")
    assert curve_csv_text(curve, reproducible=True) == curve_csv_text(curve, reproducible=True)
    assert "generated" not in curve_csv_text(curve, reproducible=True)


def test_csv_and_json_parse_to_same_doubles(curve):
    rows = read_curve_csv(curve_csv_text(curve))
    buf = io.StringIO()
    write_curves_json([curve], buf)
    pts = json.loads(buf.getvalue())["curves"][0]["points"]
    for row, pt in zip(rows, pts):
        for key in ("R", "value", "rho_star", "s_star"):
            assert "%.17g" % row[key] == "%.17g" % pt[key]
        assert row["phase"] == pt["phase"]


def test_twelve_significant_digits(curve):
    rows = read_curve_csv(curve_csv_text(curve))
    for row, p in zip(rows, curve.points):
        assert row["value"] == pytest.approx(p.value, rel=1e-11, abs=1e-300)


def test_bits_conversion(curve):
    d = curve_to_dict(curve, bits=True)
    assert d["units"] == "bits"
    assert d["R1"] == pytest.approx(curve.R1 / math.log(2), rel=1e-11)
    assert d["points"][3]["value"] == pytest.approx(curve.points[3].value / math.log(2), rel=1e-11)
    assert d["points"][3]["rho_star"] == pytest.approx(curve.points[3].rho_star, rel=1e-11)


def test_infinite_values_stay_valid_json():
    c = gaussian_exponent_curve(GaussianParams(1, 1), [0.0, 0.1])
    buf = io.StringIO()
    write_curves_json([c], buf)
    doc = json.loads(buf.getvalue())
    assert doc["curves"][0]["points"][0]["rho_star"] == "inf"
