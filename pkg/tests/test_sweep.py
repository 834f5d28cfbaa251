from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from paramlp.embedding import InducedPartition
from paramlp.lp_core import Status
from paramlp.sweep import PointKind, SweepReport, classify_point, refines, sweep

from conftest import example1, example2, random_parametric

P0 = InducedPartition(B=(0, 1), Bplus=(), Bminus=(3,), N=(2,), Nzero=())


def labels(report: SweepReport) -> list[str]:
    return [iv.label() for iv in report.intervals]


# ------------------------------------------------------------ classification


def test_classify_transition_change_both_neither():
    trans = replace(P0, B=(1,), N=(0, 2))
    change = replace(P0, Bminus=(), Nzero=(3,))
    assert classify_point(trans, P0, None) is PointKind.TRANSITION
    assert classify_point(None, P0, change) is PointKind.CHANGE
    assert classify_point(trans, P0, change) is PointKind.BOTH
    assert classify_point(P0, P0, P0) is PointKind.NEITHER


# ----------------------------------------------------------------- examples


@pytest.fixture(scope="module")
def ex1_report():
    return sweep(example1())


@pytest.fixture(scope="module")
def ex2_report():
    return sweep(example2())


def test_example1_structure(ex1_report):
    assert labels(ex1_report) == ["(-1,0)", "{0}", "(0,1)"]
    kinds = [(round(pt.lam, 9), pt.kind) for pt in ex1_report.points]
    assert kinds == [(-1.0, PointKind.UNBOUNDED), (0.0, PointKind.BOTH), (1.0, PointKind.UNBOUNDED)]
    assert ex1_report.intervals[0].partition.one_based()["Nzero"] == [4]
    assert ex1_report.intervals[2].partition.one_based()["Bminus"] == [4]


def test_example2_structure(ex2_report):
    assert labels(ex2_report) == ["{-1}", "(-1,0)", "{0}", "(0,0.5)", "{0.5}", "(0.5,1)", "{1}", "(1,inf)"]
    kinds = [pt.kind for pt in ex2_report.points]
    assert kinds == [PointKind.TRANSITION, PointKind.BOTH, PointKind.CHANGE, PointKind.TRANSITION]
    ends = ex2_report.terminations
    assert len(ends) == 1 and ends[0][0] == pytest.approx(-1.0) and ends[0][1] is Status.INFEASIBLE


def test_example2_singletons_have_lp_values(ex2_report):
    values = {round(iv.lo, 9): iv.zf(iv.lo) for iv in ex2_report.intervals if iv.is_singleton}
    assert values == pytest.approx({-1.0: -1.0, 0.0: -1.0, 0.5: -2.0, 1.0: -3.0})


def test_intervals_tile_the_domain(ex2_report):
    ivs = ex2_report.intervals
    for a, b in zip(ivs, ivs[1:]):
        assert a.hi == pytest.approx(b.lo, abs=1e-9)
    assert all(iv.lo <= iv.hi for iv in ivs)


def test_value_function_is_continuous_across_points(ex2_report):
    ivs = ex2_report.intervals
    for a, b in zip(ivs, ivs[1:]):
        x = b.lo
        za = a.zf(x) if a.is_singleton else float(a.zf.num(x) / a.zf.den(x))
        zb = b.zf(x) if b.is_singleton else float(b.zf.num(x) / b.zf.den(x))
        assert za == pytest.approx(zb, abs=1e-8)


def test_one_sided_sweeps_are_halves(ex2_report):
    right = sweep(example2(), direction="right")
    left = sweep(example2(), direction="left")
    assert labels(right) == labels(ex2_report)[2:]
    assert labels(left) == labels(ex2_report)[:3]


def test_lambda_cap_bounds_the_walk():
    report = sweep(example2(), lambda_cap=5.0)
    assert report.intervals[-1].hi == math.inf


def test_sweep_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sweep(example1(), epsilon=0.0)
    with pytest.raises(ValueError):
        sweep(example1(), direction="up")


# --------------------------------------------------------------- refinement


def test_report_refines_itself(ex2_report):
    assert refines(ex2_report, ex2_report)


def test_refinement_detects_missing_endpoint(ex2_report):
    coarse = replace(ex2_report, intervals=[replace(iv, hi=iv.hi + 0.1) for iv in ex2_report.intervals[:4]])
    assert not refines(ex2_report, coarse)


@pytest.mark.parametrize("seed", range(3))
def test_epsilon_refinement_on_random_instances(seed):
    p = random_parametric(np.random.default_rng(100 + seed), 3, 6)
    fine = sweep(p, epsilon=0.005, lambda_cap=20.0)
    coarse = sweep(p, epsilon=0.05, lambda_cap=20.0)
    assert refines(fine, coarse)
