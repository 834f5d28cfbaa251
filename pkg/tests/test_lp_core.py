from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramlp import embedding as emb
from paramlp.errors import ShapeError
from paramlp.lp_core import StandardLP, Status, check_solution, optimal_partition, solve, strictly_complementary

from conftest import example1, example2


def test_infeasible_single_variable():
    res = solve(StandardLP(A=[[1.0]], b=[-1.0], c=[1.0]))
    assert res.status is Status.INFEASIBLE and not res.optimal


def test_unbounded_ray():
    res = solve(StandardLP(A=[[1.0, -1.0]], b=[0.0], c=[-1.0, 0.0]))
    assert res.status is Status.UNBOUNDED


def test_shape_validation():
    with pytest.raises(ShapeError):
        StandardLP(A=[[1.0, 2.0]], b=[1.0, 2.0], c=[1.0, 1.0])


def test_example1_embedded_at_zero_has_value_minus_one():
    e = emb.embed(example1())
    res = solve(emb.split_free(emb.instantiate(e, 0.0), e.n_orig))
    assert res.optimal
    assert res.solution.objective == pytest.approx(-1.0, abs=1e-9)


def test_example1_embedded_at_one_is_unbounded():
    e = emb.embed(example1())
    res = solve(emb.split_free(emb.instantiate(e, 1.0), e.n_orig))
    assert res.status is Status.UNBOUNDED


def test_example1_original_partition_at_zero():
    p = example1()
    lp = StandardLP(p.A, p.b, p.c)
    part = optimal_partition(lp, solve(lp).solution)
    assert (part.B, part.N) == ((0, 1), (2,))


def test_example2_original_partition_at_zero():
    p = example2()
    lp = StandardLP(p.A, p.b, p.c)
    part = optimal_partition(lp, solve(lp).solution)
    assert (part.B, part.N) == ((0, 1, 2), (3,))


def test_solution_satisfies_invariants():
    p = example2()
    lp = StandardLP(p.A, p.b, p.c)
    sol = solve(lp).solution
    check_solution(lp, sol)
    assert np.all(sol.x >= 0)
    assert sol.objective == pytest.approx(-1.0)


def _lp_with_partition(rng, m, n, nb):
    """LP whose unique optimal partition is (range(nb), rest)."""
    A = rng.normal(size=(m, n))
    x0 = np.zeros(n)
    x0[:nb] = rng.uniform(0.5, 2.0, size=nb)
    s0 = np.zeros(n)
    s0[nb:] = rng.uniform(0.5, 2.0, size=n - nb)
    c = A.T @ rng.normal(size=m) + s0
    return StandardLP(A, A @ x0, c), tuple(range(nb)), tuple(range(nb, n))


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 4), extra=st.integers(1, 5), frac=st.floats(0.0, 1.0), seed=st.integers(0, 2**32 - 1))
def test_partition_of_planted_complementary_pair(m, extra, frac, seed):
    # degenerate whenever nb != m: the optimal face is not a vertex or the vertex is degenerate
    n = m + extra
    nb = max(1, int(round(frac * n)))
    lp, B, N = _lp_with_partition(np.random.default_rng(seed), m, n, nb)
    res = solve(lp)
    assert res.optimal
    part, avg = strictly_complementary(lp, res.solution)
    assert (part.B, part.N) == (B, N)
    # the averaged pair is strictly complementary on its own
    assert np.all(avg.x[list(B)] > 0)
    assert np.all(avg.s[list(N)] > 1e-9)
