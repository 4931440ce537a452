import io
import json
import math
import os
import subprocess
import sys

import pytest

from expurgate.cli import main, parse_rates
from expurgate.export import read_curve_csv

from conftest import EX1_Q, EX1_TRANSITION

LN2 = math.log(2.0)


@pytest.fixture
def ex1_file(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(json.dumps({"transition": EX1_TRANSITION, "input": EX1_Q}))
    return str(path)


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def csv_blocks(text):
    blocks, cur = [], []
    for line in text.splitlines():
        if line.startswith("# kind=") and cur:
            blocks.append("\n".join(cur))
            cur = []
        cur.append(line)
    blocks.append("\n".join(cur))
    return blocks


def test_exponent_table(ex1_file):
    code, text = run(["exponent", "--channel", ex1_file, "--rho", "1", "--format", "json"])
    assert code == 0
    row = json.loads(text)["rows"][0]
    assert row["gallager"] == pytest.approx(0.0542, abs=5e-4)
    assert row["ckm_bhatt"] == pytest.approx(0.0574, abs=5e-4)
    assert row["chernoff_new"] == pytest.approx(0.0596, abs=5e-4)
    assert row["s_star"] == pytest.approx(0.76, abs=0.02)


def test_exponent_fixed_s_and_rates(ex1_file):
    code, text = run(["exponent", "--channel", ex1_file, "--s", "0.5", "--rates", "0.02:0.04:3"])
    assert code == 0
    rows = read_curve_csv(text)
    for r in rows:
        assert r["chernoff_new"] == pytest.approx(r["ckm_bhatt"], abs=1e-12)
        assert r["rho_ckm_bhatt"] == 1.0


def test_exponent_equal_rows(tmp_path):
    path = tmp_path / "eq.json"
    path.write_text(json.dumps({"transition": [[0.2, 0.8], [0.2, 0.8]]}))
    code, text = run(["exponent", "--channel", str(path), "--rho", "1,4"])
    assert code == 0
    for r in read_curve_csv(text):
        assert r["gallager"] == 0 and r["ckm_bhatt"] == 0 and r["chernoff_new"] == 0


def test_missing_file_exit_2(capsys):
    code, _ = run(["exponent", "--channel", "/nonexistent/ch.json"])
    assert code == 2
    assert "No such file" in capsys.readouterr().err


def test_malformed_json_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["exponent", "--channel", str(path)])[0] == 2
    path.write_text('{"rows": []}')
    assert run(["exponent", "--channel", str(path)])[0] == 2


def test_invalid_channel_exit_3(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"transition": [[0.6, 0.5], [0.5, 0.5]]}))
    assert run(["exponent", "--channel", str(path)])[0] == 3


def test_degenerate_grid_exit_3(ex1_file):
    assert run(["curve", "--channel", ex1_file, "--rates", "0:0.1:1"])[0] == 3


def test_malformed_grid_exit_2(ex1_file):
    assert run(["curve", "--channel", ex1_file, "--rates", "0:0.1"])[0] == 2


def test_curve_linear_rows(ex1_file):
    code, text = run(["curve", "--channel", ex1_file, "--rates", "0:0.07:36", "--reproducible"])
    assert code == 0
    blocks = csv_blocks(text)
    assert len(blocks) == 3
    for block, c in zip(blocks, (0.0542, 0.0574, 0.0596)):
        rows = [r for r in read_curve_csv(block) if r["phase"] == "paramagnetic"]
        assert rows
        for r in rows:
            assert r["value"] == pytest.approx(c - r["R"], abs=5e-4)


def test_curve_gaussian(tmp_path):
    code, _ = run(["curve", "--gaussian", "S=1", "sigma2=1", "--out-dir", str(tmp_path), "--reproducible"])
    assert code == 0
    rows = read_curve_csv((tmp_path / "gaussian.csv").read_text())
    assert rows[0]["R"] == 0 and rows[0]["value"] == 0.25


def test_curve_files_and_determinism(ex1_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["curve", "--channel", ex1_file, "--rates", "0:0.07:8", "--out-dir", str(d), "--reproducible"])[0] == 0
    for name in ("gallager.csv", "ckm_bhatt.csv", "chernoff_new.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_timestamp_is_the_only_difference(ex1_file):
    _, plain = run(["curve", "--channel", ex1_file, "--rates", "0:0.07:5"])
    _, repro = run(["curve", "--channel", ex1_file, "--rates", "0:0.07:5", "--reproducible"])
    stripped = "\n".join(ln for ln in plain.splitlines() if not ln.startswith("# generated"))
    assert stripped == repro.rstrip("\n")


def test_json_and_csv_agree(ex1_file):
    _, csv_text = run(["curve", "--channel", ex1_file, "--rates", "0:0.07:8", "--reproducible"])
    _, json_text = run(["curve", "--channel", ex1_file, "--rates", "0:0.07:8", "--format", "json"])
    curves = json.loads(json_text)["curves"]
    for block, c in zip(csv_blocks(csv_text), curves):
        for row, pt in zip(read_curve_csv(block), c["points"]):
            for key in ("R", "value", "rho_star", "s_star"):
                assert "%.17g" % row[key] == "%.17g" % pt[key]


def test_bits_flag(ex1_file):
    _, nats = run(["curve", "--channel", ex1_file, "--rates", "0:0.05:3", "--format", "json"])
    _, bits = run(["curve", "--channel", ex1_file, "--rates", "0:0.0721347520444:3", "--format", "json", "--bits"])
    for cn, cb in zip(json.loads(nats)["curves"], json.loads(bits)["curves"]):
        for pn, pb in zip(cn["points"], cb["points"]):
            assert pb["value"] == pytest.approx(pn["value"] / LN2, rel=1e-9, abs=1e-12)


def test_sweep_q(ex1_file):
    code, text = run(["curve", "--channel", ex1_file, "--rates", "0:0.1:5", "--sweep-q", "--format", "json"])
    assert code == 0
    docs = text.strip().split("\n}\n")
    sweep = json.loads(docs[-1])
    assert sweep["kind"] == "sweep_q" and len(sweep["rows"]) == 5
    for row in sweep["rows"]:
        assert 0.05 <= row["q1"] <= 0.95


def test_mc_reports(capsys):
    code, text = run(["mc", "--n", "12", "--R", str(1.5 * LN2), "--I", str(LN2), "--rho", "2"])
    assert code == 0
    rep = json.loads(text)
    assert rep["gap"] < 0.05 and rep["mode"] == "exact_binomial"
    code, text = run(["mc", "--n", "12", "--R", "0.5", "--I", "0.8", "--rho", "1"])
    assert json.loads(text)["gap"] < 1e-9
    code, _ = run(["mc", "--n", "30", "--R", str(LN2), "--I", "0.5", "--rho", "2"])
    assert code == 3
    assert "monte_carlo" in capsys.readouterr().err


def test_mc_seeded_monte_carlo():
    argv = ["mc", "--n", "10", "--R", "0.8", "--I", "0.5", "--rho", "2", "--mode", "mc", "--seed", "11"]
    a, b = run(argv), run(argv)
    assert a == b and json.loads(a[1])["seed"] == 11


def test_gaussian_subcommand_with_pipeline_check():
    code, text = run(["gaussian", "--S", "1", "--sigma2", "1", "--delta", "1e-4", "--format", "json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["quantized_max_gap"] < 1e-3
    assert doc["curves"][0]["points"][0]["value"] == 0.25


def test_compare_with_oracle(ex1_file):
    code, text = run(["compare", "--channel", ex1_file, "--oracle", "--oracle-points", "5", "--format", "json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["min_slack_ckm_minus_gallager"] >= -1e-9
    assert doc["min_slack_new_minus_ckm"] >= -1e-9
    assert {r["kind"] for r in doc["rows"]} == {"gallager", "ckm_bhatt", "chernoff_new"}


def test_parse_rates():
    assert list(parse_rates("0:1:3")) == [0.0, 0.5, 1.0]
    assert parse_rates("0:1:2", bits=True)[-1] == pytest.approx(LN2)


def test_module_entry_point(ex1_file):
    env = dict(os.environ)
    res = subprocess.run(
        [sys.executable, "-m", "expurgate", "exponent", "--channel", ex1_file],
        capture_output=True, text=True, env=env,
    )
    assert res.returncode == 0 and "chernoff_new" in res.stdout
