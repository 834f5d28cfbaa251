from __future__ import annotations

from importlib import resources

import numpy as np
import pytest

from paramlp.embedding import ParametricLP
from paramlp.mps import read_mps
from paramlp.perturbation import PerturbationSpec, generate_perturbation


def example1() -> ParametricLP:
    # x1 + x2 + x3 = 1 with x4 = x1 - x2 - 1 moving into the matrix
    return ParametricLP(A=[[1, 1, 1]], b=[1], c=[-1, -1, 0], dA=[[1, -1, 0]], db=[1])


def example2() -> ParametricLP:
    return ParametricLP(
        A=[[0, 1, 1, 0], [1, 1, 0, 1]],
        b=[1, 1],
        c=[-1, -1, 0, 0],
        dA=[[1, 1, 0, 0], [-1, -2, 0, 0]],
        db=[2, -1],
    )


def data_text(name: str) -> str:
    return resources.files("paramlp").joinpath("data", name).read_text()


def afiro(seed: int = 42) -> ParametricLP:
    lp = read_mps(data_text("afiro.mps")).lp
    dA, db = generate_perturbation(lp, PerturbationSpec.random(seed))
    return ParametricLP(lp.A, lp.b, lp.c, dA, db)


def random_parametric(rng: np.random.Generator, m: int, n: int) -> ParametricLP:
    """Feasible and bounded at 0: b = A x0 with x0 > 0 and c = A^T y0 + s0 with s0 > 0."""
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0.5, 2.0, size=n) * (rng.random(n) < 0.7)
    b = A @ x0
    s0 = rng.uniform(0.1, 1.0, size=n) * (x0 == 0)
    c = A.T @ rng.normal(size=m) + s0
    dA = np.zeros((m, n))
    pos = rng.choice(m * n, size=max(1, n // 2), replace=False)
    dA.flat[pos] = rng.normal(size=pos.size)
    db = rng.uniform(0.0, 3.0, size=m)
    return ParametricLP(A, b, c, dA, db)


@pytest.fixture
def ex1() -> ParametricLP:
    return example1()


@pytest.fixture
def ex2() -> ParametricLP:
    return example2()


# ------------------------------------------------------- acceptance reporting

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, title = marker.args
        results = item.config.stash.setdefault(_ACCEPTANCE, {})
        results[number] = (title, rep.passed, getattr(item, "acceptance_detail", ""))


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed, detail = results[number]
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
