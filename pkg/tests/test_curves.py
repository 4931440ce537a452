import math

import numpy as np
import pytest

from expurgate.channel import expected_distance
from expurgate.curves import (
    CHERNOFF,
    CKM,
    GALLAGER,
    GLASSY,
    PARAMAGNETIC,
    ZERO,
    ExponentCurve,
    all_curves,
    classify_phase,
    curve_chernoff_new,
    curve_ckm,
    curve_gallager,
    e1_diagnostic,
    e2_value,
    zero_rate_limit,
)
from expurgate.ratedistortion import RdProblem, dq_of_r

from conftest import LN2, make_inputs, random_inputs


@pytest.fixture(scope="module")
def ex1_curves():
    from conftest import EX1_Q, EX1_TRANSITION

    return all_curves(make_inputs(EX1_TRANSITION, EX1_Q))


@pytest.mark.parametrize("kind,c", [(GALLAGER, 0.0542), (CKM, 0.0574), (CHERNOFF, 0.0596)])
def test_example_linear_region(ex1_curves, kind, c):
    curve = ex1_curves[kind]
    lin = [p for p in curve.points if p.phase == PARAMAGNETIC]
    assert len(lin) > 20
    for p in lin:
        assert p.value == pytest.approx(c - p.R, abs=5e-4)
        assert p.rho_star == 1.0


def test_example_chernoff_parameter(ex1_curves):
    for p in ex1_curves[CHERNOFF].points:
        if p.phase == PARAMAGNETIC:
            assert p.s_star == pytest.approx(0.76, abs=0.02)


def test_example_rate_in_linear_region(ex1_curves):
    assert classify_phase(ex1_curves[CHERNOFF], 0.03) == PARAMAGNETIC


def test_shared_grid(ex1_curves):
    g = ex1_curves[GALLAGER].rates
    assert np.array_equal(g, ex1_curves[CKM].rates) and np.array_equal(g, ex1_curves[CHERNOFF].rates)
    assert len(g) == 201 and g[0] == 0.0


def test_ordering_on_example(ex1_curves):
    g, c, n = (ex1_curves[k].values for k in (GALLAGER, CKM, CHERNOFF))
    assert np.all(c >= g - 1e-9) and np.all(n >= c - 1e-9)


def test_equal_rows_identically_zero(equal_rows):
    for build in (curve_gallager, curve_ckm, curve_chernoff_new):
        curve = build(equal_rows, np.linspace(0, 1, 11))
        assert np.all(curve.values == 0.0)
        assert curve.R1 == 0.0


def test_bsc_zero_rate_limit(bsc_uniform):
    curve = curve_gallager(bsc_uniform, [0.0, 0.1])
    zr = expected_distance(bsc_uniform.distance(0.5), bsc_uniform.q)
    assert curve.points[0].value == pytest.approx(zr, abs=1e-3)
    assert not curve.points[0].diverged


def test_zero_beyond_crossing(ex1):
    curve = curve_ckm(ex1, [0.0, 0.07, 0.1])
    assert curve.points[1].value == 0.0 and curve.points[1].phase == ZERO
    assert curve.points[2].value == 0.0


def test_symmetric_instance_new_equals_ckm(bsc_uniform):
    grid = np.linspace(0, 0.3, 13)
    new = curve_chernoff_new(bsc_uniform, grid)
    ckm = curve_ckm(bsc_uniform, grid)
    assert np.allclose(new.values, ckm.values, atol=1e-12)
    for p in new.points:
        assert p.s_star == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("seed", range(6))
def test_ordering_random(seed):
    rng = np.random.default_rng(100 + seed)
    inp = random_inputs(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)))
    curves = all_curves(inp, np.linspace(0, 1.0, 21))
    g, c, n = (curves[k].values for k in (GALLAGER, CKM, CHERNOFF))
    assert np.all(c >= g - 1e-9) and np.all(n >= c - 1e-9)


@pytest.mark.parametrize("kind", [GALLAGER, CKM, CHERNOFF])
def test_structure(ex1_curves, kind):
    curve = ex1_curves[kind]
    v, r = curve.values, curve.rates
    assert np.all(np.diff(v) <= 1e-12)
    slopes = np.diff(v) / np.diff(r)
    assert np.all(np.diff(slopes) >= -1e-7)
    for p in curve.points:
        if p.phase == GLASSY:
            assert p.rho_star > 1.0
        elif p.phase == PARAMAGNETIC:
            assert p.value == pytest.approx(curve.value_R1 + curve.R1 - p.R, abs=1e-6)
        else:
            assert p.value == 0.0


def test_right_slope_at_R1(ex1):
    for build in (curve_gallager, curve_ckm, curve_chernoff_new):
        c0 = build(ex1, None)
        h = 1e-4
        pts = build(ex1, [c0.R1, c0.R1 + h]).points
        assert (pts[1].value - pts[0].value) / h == pytest.approx(-1.0, abs=1e-3)


def test_identity_unbounded_below_entropy(identity2):
    curve = curve_ckm(identity2, [0.1, 0.5, 0.8])
    assert [p.diverged for p in curve.points] == [True, True, False]
    assert curve.R1 == pytest.approx(LN2, abs=1e-5)
    assert math.isinf(curve.zero_rate_value)


def test_zero_rate_limit_maximizes_over_s(ex1):
    zr = zero_rate_limit(ex1)
    for s in np.linspace(0, 1, 11):
        assert zr >= expected_distance(ex1.distance(s), ex1.q) - 1e-15


def test_bad_grid_rejected(ex1):
    with pytest.raises(ValueError):
        curve_ckm(ex1, [0.1, 0.0])
    with pytest.raises(ValueError):
        curve_ckm(ex1, [-0.1, 0.2])


def test_classify_phase_rules():
    c = ExponentCurve(CKM, R1=0.1, value_R1=0.2, zero_rate_value=0.5)
    assert classify_phase(c, 0.0) == GLASSY
    assert classify_phase(c, 0.1) == PARAMAGNETIC
    assert classify_phase(c, 0.3 + 0.1) == ZERO
    assert c.phase_at(0.299) == PARAMAGNETIC


def test_e1_large_rho_approaches_distortion_rate(ex1):
    prob = RdProblem(ex1.q, ex1.distance(0.5))
    for R in np.linspace(0, 0.3, 13):
        dq = dq_of_r(prob, R).value
        assert e1_diagnostic(ex1, 0.5, R, 1e4) == pytest.approx(dq, abs=1e-3)
        for rho in (1.0, 3.0, 30.0):
            assert e1_diagnostic(ex1, 0.5, R, rho) <= dq + 1e-9


def test_e2_governs_linear_region(ex1):
    curve = curve_ckm(ex1, np.linspace(0, 0.06, 25))
    for p in curve.points:
        if p.phase == PARAMAGNETIC:
            e2 = e2_value(ex1, 0.5, p.R)
            assert min(e1_diagnostic(ex1, 0.5, p.R, 1e4), e2) == pytest.approx(e2, abs=1e-12)
            assert e2 == pytest.approx(p.raw, abs=1e-12)
