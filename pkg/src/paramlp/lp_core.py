"""Standard-form LP solves and optimal partitions.

Problems are ``min c^T x  s.t.  A x = b, x >= 0``.  The solver backend is
HiGHS through :func:`scipy.optimize.linprog`; everything above the backend
(status disambiguation, invariant checks, optimal partition extraction) is
done here.

Index sets are 0-based tuples of column indices throughout the library.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import NumericFailure, ShapeError

log = logging.getLogger(__name__)

_METHODS = ("highs", "highs-ipm", "highs-ds")


@dataclass(frozen=True, eq=False)
class StandardLP:
    """``min c^T x  s.t.  A x = b, x >= 0``."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float, ndmin=2)
        b = np.array(self.b, dtype=float).ravel()
        c = np.array(self.c, dtype=float).ravel()
        m, n = A.shape
        if m < 1 or n < 1:
            raise ShapeError(f"LP needs at least one row and column, got {A.shape}")
        if b.size != m or c.size != n:
            raise ShapeError(f"A is {m}x{n} but b has {b.size} and c has {c.size} entries")
        for name, arr in (("A", A), ("b", b), ("c", c)):
            if not np.all(np.isfinite(arr)):
                raise ShapeError(f"{name} has non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


@dataclass(frozen=True, eq=False)
class PrimalDualSolution:
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    objective: float


@dataclass(frozen=True)
class OptimalPartition:
    """Split of (a subset of) the columns into ``B`` (positive somewhere on the
    optimal face) and ``N`` (zero on the whole face)."""

    B: tuple[int, ...]
    N: tuple[int, ...]


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class SolveResult:
    status: Status
    solution: PrimalDualSolution | None = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


INFEASIBLE = SolveResult(Status.INFEASIBLE)
UNBOUNDED = SolveResult(Status.UNBOUNDED)


def tol_feas(p: StandardLP) -> float:
    return 1e-7 * (1.0 + np.linalg.norm(p.b))


def tol_comp(objective: float) -> float:
    return 1e-6 * (1.0 + abs(objective))


def tol_supp(x: np.ndarray) -> float:
    return 1e-6 * (1.0 + (np.max(np.abs(x)) if x.size else 0.0))


def check_solution(p: StandardLP, sol: PrimalDualSolution) -> list[str]:
    """Names of violated solution invariants (empty when all hold)."""
    tf = tol_feas(p)
    bad = []
    if np.linalg.norm(p.A @ sol.x - p.b) > tf:
        bad.append("primal residual")
    if np.min(sol.x) < -tf:
        bad.append("primal sign")
    if np.linalg.norm(p.A.T @ sol.y + sol.s - p.c) > tf * (1.0 + np.linalg.norm(p.c)):
        bad.append("dual residual")
    if np.min(sol.s) < -tf * (1.0 + np.linalg.norm(p.c)):
        bad.append("dual sign")
    if abs(sol.x @ sol.s) > tol_comp(sol.objective):
        bad.append("complementarity")
    return bad


def _linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=(0, None), method="highs"):
    return linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method=method)


def _is_feasible(p: StandardLP, method: str) -> bool | None:
    res = _linprog(np.zeros(p.shape[1]), A_eq=p.A, b_eq=p.b, method=method)
    if res.status == 0:
        return True
    if res.status == 2:
        return False
    return None


def solve(p: StandardLP) -> SolveResult:
    """Solve ``p`` and return its status with a checked primal-dual pair.

    Infeasible and unbounded verdicts from the backend are confirmed by a
    zero-objective feasibility solve, since HiGHS may report either one for
    a problem that is only known to be "infeasible or unbounded".
    """
    last = None
    for method in _METHODS:
        res = _linprog(p.c, A_eq=p.A, b_eq=p.b, method=method)
        last = res
        if res.status in (2, 3):
            feasible = _is_feasible(p, method)
            if feasible is None:
                continue
            return UNBOUNDED if feasible else INFEASIBLE
        if res.status != 0:
            continue
        x = np.maximum(np.asarray(res.x, dtype=float), 0.0)
        y = np.asarray(res.eqlin.marginals, dtype=float)
        s = p.c - p.A.T @ y
        sol = PrimalDualSolution(x=x, y=y, s=s, objective=float(p.c @ x))
        bad = check_solution(p, sol)
        if not bad:
            return SolveResult(Status.OPTIMAL, sol)
        log.debug("solution from %s violates %s; retrying", method, bad)
    raise NumericFailure(
        "LP solve failed after retries",
        shape=p.shape,
        status=getattr(last, "status", None),
        message=getattr(last, "message", None),
    )


# ------------------------------------------------------------ face problems


@dataclass
class FaceWitness:
    """Outcome of a support-maximization sweep over the optimal face.

    ``positive[k]`` tells whether ``G[k] @ x`` can be made larger than the
    tolerance on the face, ``best[k]`` is the largest value seen and ``points``
    are the face points produced along the way (convex combinations of them
    stay on the face).
    """

    positive: np.ndarray
    best: np.ndarray
    points: list[np.ndarray] = field(default_factory=list)


def _face_objective_slack(objective: float) -> float:
    return 1.0 + abs(objective)


# any slack lets x_j grow like slack / s_j, so start from the exact optimum
_SLACK_ESCALATION = (0.0, 1e-12, 1e-10, 1e-8, 1e-6)
_FINE_SUPPORT = 1e-3
_AMBIGUOUS = 1e-2


def _solve_face_lp(cost, A_ub, b_ub, A_eq, b_eq, bounds, index, slack_row=None, slack=0.0):
    """Solve a face LP, widening the objective bound if the face looks empty.

    ``b_ub[slack_row]`` holds the exact optimal value; the solver may find
    that face infeasible through round-off, in which case the bound is
    relaxed by growing multiples of ``slack``.
    """
    res = None
    for grow in _SLACK_ESCALATION:
        rhs = b_ub
        if slack_row is not None and grow:
            rhs = b_ub.copy()
            rhs[slack_row] += grow * slack
        for method in _METHODS:
            res = _linprog(cost, A_ub=A_ub, b_ub=rhs, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method=method)
            if res.status == 0:
                return res
        if slack_row is None:
            break
    raise NumericFailure(
        "optimal-face support maximization failed",
        index=int(index),
        status=getattr(res, "status", None),
    )


def maximize_over_face(
    p: StandardLP,
    objective: float,
    G: np.ndarray,
    tol: float,
    zero_cols=(),
    cap: float = 1.0,
    nonneg: bool = True,
) -> FaceWitness:
    """Decide for each row ``g`` of ``G`` whether ``g @ x > tol`` somewhere on the optimal face.

    The face is ``{A x = b, x >= 0, c^T x <= objective + slack, x_j = 0 for
    j in zero_cols}``.  Each row is maximized through an epigraph variable
    ``t_k <= min(g_k @ x, cap)``.

    With ``nonneg`` (rows known to be nonnegative on the face, e.g. unit
    rows) the rows are handled in batches: each round maximizes
    ``sum_k t_k`` with ``t_k >= 0`` over the undecided rows, promotes every
    row whose ``t_k`` clears ``tol`` and repeats.  A round that promotes
    nothing proves the remaining rows stay below ``tol`` on the face, since
    their sum could not be raised.  Without ``nonneg`` every row gets its
    own LP.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    k = G.shape[0]
    m, n = p.shape
    positive = np.zeros(k, dtype=bool)
    best = np.full(k, -np.inf)
    points: list[np.ndarray] = []
    ub_obj = objective
    zero_cols = np.asarray(sorted(zero_cols), dtype=int)

    def run(rows: np.ndarray, t_low):
        r = rows.size
        cost = np.concatenate([np.zeros(n), -np.ones(r)])
        A_eq = np.hstack([p.A, np.zeros((m, r))])
        # t_k - g_k x <= 0 and c^T x <= ub_obj
        A_ub = np.vstack([
            np.hstack([-G[rows], np.eye(r)]),
            np.concatenate([p.c, np.zeros(r)])[None, :],
        ])
        b_ub = np.concatenate([np.zeros(r), [ub_obj]])
        bounds = [(0.0, None)] * n + [(t_low, cap)] * r
        for j in zero_cols:
            bounds[j] = (0.0, 0.0)
        res = _solve_face_lp(cost, A_ub, b_ub, A_eq, p.b, bounds, rows[0], r, _face_objective_slack(objective))
        x = np.maximum(res.x[:n], 0.0)
        points.append(x)
        vals = G[rows] @ x
        best[rows] = np.maximum(best[rows], vals)
        return vals > tol

    if nonneg:
        pending = np.arange(k)
        while pending.size:
            hit = run(pending, 0.0)
            if not np.any(hit):
                break
            positive[pending[hit]] = True
            pending = pending[~hit]
    else:
        for i in range(k):
            if positive[i]:
                continue
            run(np.array([i]), None)
            # every face point is a witness for all rows, not just the one maximized
            vals = G @ points[-1]
            best = np.maximum(best, vals)
            positive |= vals > tol
    return FaceWitness(positive=positive, best=best, points=points)


def _dual_face_rounds(
    p: StandardLP, objective: float, cols: np.ndarray, tied: np.ndarray, tol: float, cap: float
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Dual counterpart of :func:`maximize_over_face` for slacks ``s_j``.

    The dual face is ``{A^T y <= c, A_tied^T y = c_tied, b^T y >= objective - slack}``.
    """
    m, n = p.shape
    positive = np.zeros(cols.size, dtype=bool)
    best = np.full(cols.size, -np.inf)
    ys: list[np.ndarray] = []
    pending = np.arange(cols.size)
    lb_obj = objective
    free = np.setdiff1d(np.arange(n), tied)
    while pending.size:
        r = pending.size
        sel = cols[pending]
        cost = np.concatenate([np.zeros(m), -np.ones(r)])
        rows = [np.hstack([p.A[:, free].T, np.zeros((free.size, r))])]
        rhs = [p.c[free]]
        # t_k + A_j^T y <= c_j
        rows.append(np.hstack([p.A[:, sel].T, np.eye(r)]))
        rhs.append(p.c[sel])
        rows.append(np.concatenate([-p.b, np.zeros(r)])[None, :])
        rhs.append([-lb_obj])
        A_ub = np.vstack(rows)
        b_ub = np.concatenate(rhs)
        A_eq = b_eq = None
        if tied.size:
            A_eq = np.hstack([p.A[:, tied].T, np.zeros((tied.size, r))])
            b_eq = p.c[tied]
        bounds = [(None, None)] * m + [(0.0, cap)] * r
        res = _solve_face_lp(
            cost, A_ub, b_ub, A_eq, b_eq, bounds, sel[0], A_ub.shape[0] - 1, _face_objective_slack(objective)
        )
        y = np.asarray(res.x[:m])
        ys.append(y)
        vals = p.c[sel] - p.A[:, sel].T @ y
        best[pending] = np.maximum(best[pending], vals)
        hit = vals > tol
        if not np.any(hit):
            break
        positive[pending[hit]] = True
        pending = pending[~hit]
    return positive, best, ys


def strictly_complementary(
    p: StandardLP, sol: PrimalDualSolution, columns=None
) -> tuple[OptimalPartition, PrimalDualSolution]:
    """Optimal partition of ``columns`` plus a strictly complementary pair.

    Columns with ``x_j > tol`` go to ``B`` and those with ``s_j > tol`` to
    ``N`` straight away.  For every undecided index the largest ``x_j`` on
    the optimal face and the largest ``s_j`` on the dual optimal face (with
    only the solver's own support tied) are computed, and the side with the
    larger normalized value wins.  In exact arithmetic exactly one of them
    is nonzero.  A face LP the solver cannot finish is reported and treated
    as giving no support on that side.
    """
    m, n = p.shape
    cols = np.arange(n) if columns is None else np.asarray(sorted(columns), dtype=int)
    tol = tol_supp(sol.x)
    cap = max(1.0, float(np.max(np.abs(sol.x))))
    scap = max(1.0, float(np.max(np.abs(sol.s))))
    in_B = sol.x > tol
    in_N = (sol.s > tol) & ~in_B
    undecided = np.array([j for j in cols if not in_B[j] and not in_N[j]], dtype=int)

    xs = [sol.x]
    ys = [sol.y]
    if undecided.size:
        k = undecided.size
        # promote on a finer threshold so every index gets its own witness
        fine = _FINE_SUPPORT * tol
        xbest = np.maximum(sol.x[undecided], 0.0)
        sbest = np.maximum(sol.s[undecided], 0.0)
        try:
            wit = maximize_over_face(
                p, sol.objective, np.eye(n)[undecided], fine, zero_cols=np.flatnonzero(in_N), cap=cap
            )
            xs.extend(wit.points)
            xbest = np.maximum(xbest, wit.best)
        except NumericFailure as exc:
            log.warning("primal face rounds abandoned: %s", exc)
        try:
            _, sb, dual_pts = _dual_face_rounds(p, sol.objective, undecided, np.flatnonzero(in_B), fine, scap)
            ys.extend(dual_pts)
            sbest = np.maximum(sbest, sb)
        except NumericFailure as exc:
            log.warning("dual face rounds abandoned: %s", exc)
        xr, sr = xbest / cap, sbest / scap
        for i, j in enumerate(undecided):
            in_B[j] = xr[i] > sr[i]
            if min(xr[i], sr[i]) > _AMBIGUOUS * max(xr[i], sr[i]) or max(xr[i], sr[i]) <= fine / cap:
                log.warning(
                    "index %d: support on the optimal face is ambiguous (max x=%.3g, max s=%.3g)",
                    j, xbest[i], sbest[i],
                )

    x = np.mean(xs, axis=0)
    y = np.mean(ys, axis=0)
    s = p.c - p.A.T @ y
    avg = PrimalDualSolution(x=x, y=y, s=s, objective=float(p.c @ x))
    part = OptimalPartition(
        B=tuple(int(j) for j in cols if in_B[j]),
        N=tuple(int(j) for j in cols if not in_B[j]),
    )
    return part, avg


def optimal_partition(p: StandardLP, sol: PrimalDualSolution, columns=None) -> OptimalPartition:
    """Optimal partition ``(B, N)`` of ``columns`` (default: all columns)."""
    return strictly_complementary(p, sol, columns)[0]
