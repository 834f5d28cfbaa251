from __future__ import annotations

import numpy as np
import pytest

from paramlp import embedding as emb
from paramlp.embedding import InducedPartition, ParametricLP
from paramlp.invariancy import (
    ConditionKind,
    build_conditions,
    cond1_exclusions,
    cond1_function,
    cond2_function,
    cond3_function,
    eigen_path_obstruction,
    invariancy_interval,
)
from paramlp.linalg import real_roots

from conftest import example1, example2, random_parametric


def setup(p: ParametricLP, lambda0: float):
    e = emb.embed(p)
    return e, emb.induced_partition(e, lambda0).partition


# ------------------------------------------------------------------- Cond1


def test_example1_exclusions_stay_outside_interval():
    e, part = setup(example1(), 0.1)
    # the block loses rank only at the closing endpoint
    assert cond1_exclusions(e, part, 0.1) == pytest.approx([1.0], abs=1e-12)


def _square_instance(seed: int):
    """Random m = 2 data with a partition whose column block is 4 x 4."""
    rng = np.random.default_rng(seed)
    p = ParametricLP(
        A=rng.normal(size=(2, 3)), b=rng.normal(size=2), c=rng.normal(size=3),
        dA=rng.normal(size=(2, 3)), db=rng.normal(size=2),
    )
    part = InducedPartition(B=(0, 1), Bplus=(3,), Bminus=(4,), N=(2,), Nzero=())
    return emb.embed(p), part


@pytest.mark.parametrize("seed", range(5))
def test_cond1_against_determinant_polynomial(seed):
    # for a square block, prod(1 + t a) = det(M(lam)) / det(M(lam0))
    e, part = _square_instance(seed)
    lambda0 = 0.2
    cols = list(part.tau_bar)
    det = lambda lam: np.linalg.det(e.matrix(lam)[:, cols])
    f = cond1_function(e, part, lambda0)
    for lam in np.linspace(-2, 2, 9):
        assert f.num(lam) == pytest.approx(det(lam) / det(lambda0), rel=1e-8, abs=1e-10)
    # the determinant is a polynomial of degree <= 2 here; fit it exactly and compare roots
    grid = np.linspace(-1, 1, 5)
    coef = np.polynomial.polynomial.polyfit(grid, [det(x) for x in grid], 4)
    expected = real_roots(np.polynomial.Polynomial(coef))
    got = sorted(cond1_exclusions(e, part, lambda0))
    assert got == pytest.approx(expected, abs=1e-7)


# ------------------------------------------------------------------- Cond2


def test_example1_cond2_on_x2_flips_at_one():
    e, part = setup(example1(), 0.1)
    q = list(part.tau_bar).index(1)
    f = cond2_function(e, part, 0.1, q)
    assert f.kind is ConditionKind.COND2
    assert min(abs(x - 1.0) for x in f.breakpoints()) < 1e-9
    for lam in (0.2, 0.5, 0.9):
        assert f.value(lam) == pytest.approx((1 + lam) / (1 - lam), rel=1e-9)
        assert f.holds(lam)
    assert not f.holds(1.5)


def test_example2_cond2_on_first_auxiliary_crosses_at_half():
    e, part = setup(example2(), 0.25)
    q = list(part.tau_bar).index(4)
    f = cond2_function(e, part, 0.25, q)
    assert f.sign == -1.0
    assert min(abs(x - 0.5) for x in f.breakpoints()) < 1e-9
    assert f.holds(0.3) and not f.holds(0.7)


# ------------------------------------------------------------------- Cond3


def test_example1_cond3_reduced_cost_of_x1():
    e, part = setup(example1(), 0.1)
    f = cond3_function(e, part, 0.1, 0)
    assert min(abs(x) for x in f.breakpoints()) < 1e-9
    for lam in (0.1, 0.5, 0.8):
        assert f.value(lam) == pytest.approx(2 * lam / (1 - lam), rel=1e-9)
    assert not f.holds(-0.2)


def test_example2_cond3_matches_direct_dual_slack():
    e, part = setup(example2(), 0.25)
    p = 2
    f = cond3_function(e, part, 0.25, p)
    k = list(part.N).index(p)
    for lam in np.linspace(0.01, 0.49, 10):
        direct = emb.direct_reduced_costs(e, part, lam)[k]
        assert f.value(lam) == pytest.approx(direct, rel=1e-9, abs=1e-12)
        assert f.holds(lam)


# ---------------------------------------------------------------- intervals


@pytest.mark.parametrize(
    "make, lambda0, lo, hi",
    [(example1, 0.1, 0.0, 1.0), (example1, -0.5, -1.0, 0.0), (example2, 0.75, 0.5, 1.0), (example2, 0.25, 0.0, 0.5)],
)
def test_invariancy_interval_of_examples(make, lambda0, lo, hi):
    e, part = setup(make(), lambda0)
    cert = invariancy_interval(make(), e, part, lambda0)
    assert cert.method == "eigen"
    assert (cert.lo, cert.hi) == pytest.approx((lo, hi), abs=1e-9)
    assert cert.contains(lambda0)


def test_example2_last_interval_is_unbounded():
    e, part = setup(example2(), 2.0)
    cert = invariancy_interval(example2(), e, part, 2.0)
    assert cert.lo == pytest.approx(1.0, abs=1e-9)
    assert cert.hi == np.inf


def test_conditions_cover_every_index():
    e, part = setup(example2(), 0.25)
    conds = build_conditions(e, part, 0.25)
    kinds = [c.kind for c in conds]
    assert kinds.count(ConditionKind.COND1) == 1
    assert kinds.count(ConditionKind.COND2) == len(part.tau_bar)
    assert kinds.count(ConditionKind.COND3) == len(part.N)


def test_eigen_path_applies_to_examples():
    for make, lambda0 in ((example1, 0.1), (example2, 0.25), (example2, 2.0)):
        e, part = setup(make(), lambda0)
        assert eigen_path_obstruction(e, part, lambda0) is None


def test_bisection_fallback_agrees_with_direct_solves():
    # a degenerate instance where the eigen path does not apply
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = random_parametric(rng, 3, 7)
        e = emb.embed(p)
        res = emb.induced_partition(e, 0.05)
        if not res.optimal:
            continue
        if eigen_path_obstruction(e, res.partition, 0.05) is None:
            continue
        cert = invariancy_interval(p, e, res.partition, 0.05, lambda_cap=10.0)
        assert cert.method == "bisection"
        for lam in np.linspace(max(cert.lo, -10), min(cert.hi, 10), 7)[1:-1]:
            assert emb.induced_partition(e, lam).partition == res.partition
        return
    pytest.skip("no degenerate instance drawn")
