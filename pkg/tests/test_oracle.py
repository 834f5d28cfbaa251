from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.polynomial import Polynomial

from paramlp.oracle import REL_TOL, grid_verify, probe_points, relative_error
from paramlp.sweep import sweep

from conftest import example1, example2, random_parametric


@pytest.fixture(scope="module")
def ex2():
    p = example2()
    return p, sweep(p)


def test_relative_error_has_unit_floor():
    assert relative_error(1e-9, 0.0) == pytest.approx(1e-9)
    assert relative_error(101.0, 100.0) == pytest.approx(0.01)


def test_probe_points_of_finite_interval(ex2):
    iv = ex2[1].intervals[3]  # (0, 0.5)
    pts = probe_points(iv, 5, 1e3)
    assert len(pts) == 5 and pts == sorted(pts)
    assert all(iv.lo < x < iv.hi for x in pts)
    # the outer nodes keep the margin from the endpoints
    assert pts[0] - iv.lo >= 1e-4 * 0.5 * 0.99


def test_probe_points_of_singleton_and_ray(ex2):
    ivs = ex2[1].intervals
    assert probe_points(ivs[0], 5, 1e3) == [ivs[0].lo]
    assert probe_points(ivs[-1], 5, 1e3) == pytest.approx([2.0, 3.0, 5.0, 9.0])
    assert probe_points(ivs[-1], 5, 2.5) == pytest.approx([2.0, 2.5])


def test_probe_points_need_a_positive_count(ex2):
    with pytest.raises(ValueError):
        probe_points(ex2[1].intervals[1], 0, 1e3)


@pytest.mark.parametrize("make", [example1, example2])
def test_examples_pass_grid_verification(make):
    p = make()
    result = grid_verify(p, sweep(p))
    assert result.passed
    assert result.max_rel_error <= 1e-9


def test_corrupted_value_function_is_detected(ex2):
    p, report = ex2
    iv = report.intervals[3]
    bad_zf = replace(iv.zf, num=iv.zf.num + Polynomial([1e-3]))
    bad = replace(report, intervals=report.intervals[:3] + [replace(iv, zf=bad_zf)] + report.intervals[4:])
    result = grid_verify(p, bad)
    assert not result.passed
    assert result.verdicts == [k != 3 for k in range(len(report.intervals))]
    assert result.max_rel_error > REL_TOL


def test_wrong_partition_is_detected(ex2):
    p, report = ex2
    ivs = list(report.intervals)
    ivs[5] = replace(ivs[5], partition=ivs[3].partition)
    result = grid_verify(p, replace(report, intervals=ivs))
    assert not result.verdicts[5]
    assert all(not pr.partitions_equal for pr in result.probes if pr.interval_id == 5)


def test_interval_past_infeasibility_is_detected(ex2):
    p, report = ex2
    ivs = list(report.intervals)
    ivs[1] = replace(ivs[1], lo=-3.0)
    result = grid_verify(p, replace(report, intervals=ivs))
    assert not result.verdicts[1]
    assert any(pr.error == "infeasible" for pr in result.probes)


@pytest.mark.parametrize("seed", range(5))
def test_random_instances_pass(seed):
    p = random_parametric(np.random.default_rng(200 + seed), 3, 6)
    report = sweep(p, lambda_cap=20.0)
    result = grid_verify(p, report, probes_per_interval=3)
    assert result.passed, [pr for pr in result.probes if not pr.passed]
    assert math.isfinite(result.max_rel_error)
