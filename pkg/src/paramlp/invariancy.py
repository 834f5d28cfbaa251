"""Invariancy interval of an induced optimal partition from eigenvalue data.

With ``A0 = bA_tau_bar(lambda0)``, ``P = pinv(A0)`` and ``D = bdA_tau_bar``,
the basic solution along the partition is

    x(lam) = (I + t P D)^{-1} P bb,      t = lam - lambda0,

so every coordinate, and likewise every reduced cost of the original
problem, is a ratio of products ``prod(1 + t * eig)`` (see
:func:`paramlp.linalg.realization_pair`).  Each requirement of the
partition becomes a real rational function whose sign must not change:

* ``Cond1``: ``prod(1 + t * a)`` over the eigenvalues ``a`` of ``P D`` is nonzero;
* ``Cond2``: ``x_q(lam)`` is positive on ``B`` and ``Bplus``, negative on ``Bminus``;
* ``Cond3``: the original reduced cost ``s_p(lam)`` is positive on ``N``.

All polynomials are built in the shifted variable ``t`` and converted to
``lam`` only for reporting.  Every eigenvalue problem is solved through an
exact low-rank factorization of the perturbation block, so its size is at
most one more than the rank of that block.

The eigenvalue route needs a unique dual and a unique, consistent primal
along the partition (see :func:`eigen_path_obstruction`).  When that fails,
the interval is found by bisection on LP solves instead.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from . import embedding as emb
from .embedding import EmbeddedLP, InducedPartition, ParametricLP
from .errors import InconsistencyError, NumericFailure
from .linalg import (
    make_poly,
    numerical_rank,
    pseudo_inverse,
    real_roots,
    shift_poly,
    shifted_factor_coeffs,
    smaller_product_eigenvalues,
)
from .timing import PhaseTimer, Stopwatch

log = logging.getLogger(__name__)

TOL_MERGE = 1e-7
CONSISTENCY_TOL = 1e-8
BISECT_TOL = 1e-10


class ConditionKind(enum.Enum):
    COND1 = "Cond1Exclusion"
    COND2 = "Cond2Sign"
    COND3 = "Cond3ReducedCost"


@dataclass(frozen=True, eq=False)
class ConditionFunction:
    """Rational predicate ``sign * num(t) / den(t) > 0`` with ``t = lam - lambda0``.

    ``index`` is the embedded column ``q`` (Cond2) or original column ``p``
    (Cond3).  For Cond1 the predicate is ``num(t) != 0`` and ``den`` is 1.
    """

    kind: ConditionKind
    index: int | None
    num_t: np.ndarray
    den_t: np.ndarray
    lambda0: float
    sign: float = 1.0

    @property
    def num(self):
        return shift_poly(self.num_t, self.lambda0)

    @property
    def den(self):
        return shift_poly(self.den_t, self.lambda0)

    def value(self, lam: float) -> float:
        t = lam - self.lambda0
        return float(P.polyval(t, self.num_t) / P.polyval(t, self.den_t))

    def holds(self, lam: float) -> bool:
        t = lam - self.lambda0
        nv = P.polyval(t, self.num_t)
        if self.kind is ConditionKind.COND1:
            return bool(nv != 0.0)
        return bool(self.sign * nv * P.polyval(t, self.den_t) > 0.0)

    def breakpoints(self) -> list[float]:
        """Real roots of numerator and denominator, in ``lam``."""
        pts = []
        for coeffs in (self.num_t, self.den_t):
            c = make_poly(coeffs)
            if c.degree() > 0:
                pts.extend(self.lambda0 + r for r in real_roots(c))
        return pts


@dataclass(frozen=True, eq=False)
class IntervalCertificate:
    lo: float
    hi: float
    lambda0: float
    breakpoint_lo: ConditionFunction | None = None
    breakpoint_hi: ConditionFunction | None = None
    method: str = "eigen"
    conditions: tuple[ConditionFunction, ...] = field(default=(), repr=False)
    note: str = ""

    def contains(self, lam: float) -> bool:
        return self.lo < lam < self.hi


# ------------------------------------------------------------ building blocks


def low_rank_factors(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact factorization ``M = L @ R`` through the nonzero columns or rows of ``M``."""
    M = np.asarray(M, dtype=float)
    rows = np.flatnonzero(np.any(M != 0.0, axis=1))
    cols = np.flatnonzero(np.any(M != 0.0, axis=0))
    if cols.size <= rows.size:
        return M[:, cols], np.eye(M.shape[1])[cols]
    return np.eye(M.shape[0])[:, rows], M[rows]


def rank_one_update_eigs(Pinv, L, R, u=None, v=None, clock: Stopwatch | None = None) -> np.ndarray:
    """Nonzero eigenvalues of ``Pinv (L R + u v^T)`` through the smaller product."""
    if u is not None:
        L = np.column_stack([L, u])
        R = np.vstack([R, v])
    if L.shape[1] == 0:
        return np.zeros(0, dtype=complex)
    clock = clock or Stopwatch()
    with clock.running():
        return smaller_product_eigenvalues(Pinv @ L, R)


def product_difference_quotient(num_eigs, den_eigs) -> np.ndarray:
    """Coefficients of ``(prod(1 + t num_eigs) - prod(1 + t den_eigs)) / t``."""
    diff = P.polysub(shifted_factor_coeffs(num_eigs), shifted_factor_coeffs(den_eigs))
    diff = np.atleast_1d(diff)
    return diff[1:] if diff.size > 1 else np.zeros(1)


@dataclass
class _Embedded:
    """Cached pieces of the embedded partition system at ``lambda0``."""

    cols: list[int]
    A0: np.ndarray
    Pinv: np.ndarray
    L: np.ndarray
    R: np.ndarray
    alphas: np.ndarray


def _embedded_system(e: EmbeddedLP, part: InducedPartition, lambda0: float, clock=None) -> _Embedded:
    cols = list(part.tau_bar)
    A0 = e.matrix(lambda0)[:, cols]
    Pinv = pseudo_inverse(A0)
    L, R = low_rank_factors(e.bdA[:, cols])
    alphas = rank_one_update_eigs(Pinv, L, R, clock=clock)
    return _Embedded(cols, A0, Pinv, L, R, alphas)


def cond1_function(e: EmbeddedLP, part: InducedPartition, lambda0: float, *, _sys=None, clock=None) -> ConditionFunction:
    sys_ = _sys or _embedded_system(e, part, lambda0, clock)
    return ConditionFunction(
        ConditionKind.COND1, None, shifted_factor_coeffs(sys_.alphas), np.array([1.0]), lambda0
    )


def cond1_exclusions(e: EmbeddedLP, part: InducedPartition, lambda0: float) -> list[float]:
    """Points ``lambda0 - 1/a`` for the nonzero real eigenvalues ``a`` of ``P D``."""
    sys_ = _embedded_system(e, part, lambda0)
    out = []
    for a in sys_.alphas:
        if abs(a.imag) <= 1e-8 * max(1.0, abs(a)):
            out.append(lambda0 - 1.0 / a.real)
    return sorted(out)


def cond2_function(
    e: EmbeddedLP, part: InducedPartition, lambda0: float, q: int, *, _sys=None, clock=None
) -> ConditionFunction:
    """Sign condition on ``x_q(lam)`` for the ``q``-th column of ``tau_bar`` (0-based position)."""
    sys_ = _sys or _embedded_system(e, part, lambda0, clock)
    col = sys_.cols[q]
    eq = np.zeros(len(sys_.cols))
    eq[q] = 1.0
    betas = rank_one_update_eigs(sys_.Pinv, sys_.L, sys_.R, e.bb, eq, clock)
    num = product_difference_quotient(betas, sys_.alphas)
    sign = -1.0 if col in part.Bminus else 1.0
    return ConditionFunction(
        ConditionKind.COND2, col, num, shifted_factor_coeffs(sys_.alphas), lambda0, sign
    )


@dataclass
class _Original:
    tau: list[int]
    Pinv: np.ndarray
    L: np.ndarray
    R: np.ndarray
    alphas: np.ndarray
    A_lam0: np.ndarray


def _original_system(e: EmbeddedLP, part: InducedPartition, lambda0: float, clock=None) -> _Original:
    tau = list(part.tau)
    A_lam0 = e.A + lambda0 * e.dA
    Pinv = pseudo_inverse(A_lam0[:, tau])
    L, R = low_rank_factors(e.dA[:, tau])
    alphas = rank_one_update_eigs(Pinv, L, R, clock=clock)
    return _Original(tau, Pinv, L, R, alphas, A_lam0)


def cond3_function(
    p_orig: ParametricLP | EmbeddedLP,
    part: InducedPartition,
    lambda0: float,
    p: int,
    *,
    _sys=None,
    clock=None,
) -> ConditionFunction:
    """Positivity of the original reduced cost of column ``p`` (0-based, in ``N``).

    Writing ``G(u) = 1 + t c_B^T (I + t C)^{-1} P u`` with ``C = P dA_B``,

        s_p = c_p + 1 - G(dA_p) - (G(A_p(lambda0)) - 1) / t,

    and each ``G`` is a ratio of eigenvalue products.  The predicate is
    assembled over the common denominator ``prod(1 + t a')``.
    """
    e = p_orig if isinstance(p_orig, EmbeddedLP) else emb.embed(p_orig)
    sys_ = _sys or _original_system(e, part, lambda0, clock)
    c_tau = e.c[sys_.tau]
    gammas = rank_one_update_eigs(sys_.Pinv, sys_.L, sys_.R, e.dA[:, p], c_tau, clock)
    deltas = rank_one_update_eigs(sys_.Pinv, sys_.L, sys_.R, sys_.A_lam0[:, p], c_tau, clock)
    den = shifted_factor_coeffs(sys_.alphas)
    num = P.polysub(P.polymul([e.c[p] + 1.0], den), shifted_factor_coeffs(gammas))
    num = P.polysub(num, product_difference_quotient(deltas, sys_.alphas))
    return ConditionFunction(ConditionKind.COND3, p, np.atleast_1d(num), den, lambda0, 1.0)


def eigen_path_obstruction(e: EmbeddedLP, part: InducedPartition, lambda0: float) -> str | None:
    """Why the eigenvalue route is not exact for ``part`` at ``lambda0`` (``None`` if it is).

    Requires a square nonsingular ``A_B(lambda0)`` (unique dual), a full
    column rank ``bA_tau_bar(lambda0)`` and a partition system that stays
    consistent as ``lam`` moves.
    """
    m = e.m_orig
    if part.l != m:
        return f"|B| = {part.l} differs from m = {m}"
    A_lam0 = e.A + lambda0 * e.dA
    if numerical_rank(A_lam0[:, list(part.tau)]) != m:
        return "A_B(lambda0) is singular"
    cols = list(part.tau_bar)
    if numerical_rank(e.matrix(lambda0)[:, cols]) != len(cols):
        return "partition system is column rank deficient"
    if len(cols) < 2 * m:
        scale = 1.0 + abs(lambda0)
        for off in (1e-3, -1e-3, 0.1, -0.07, 0.61):
            Al = e.matrix(lambda0 + off * scale)[:, cols]
            x = pseudo_inverse(Al) @ e.bb
            if np.linalg.norm(Al @ x - e.bb) > CONSISTENCY_TOL * (1.0 + np.linalg.norm(e.bb)):
                return "partition system is inconsistent away from lambda0"
    return None


def build_conditions(
    e: EmbeddedLP, part: InducedPartition, lambda0: float, timer: PhaseTimer | None = None
) -> list[ConditionFunction]:
    """All Cond1-3 functions for ``part`` around ``lambda0``."""
    clock = Stopwatch()
    t0 = time.perf_counter()
    sys_e = _embedded_system(e, part, lambda0, clock)
    conds = [cond1_function(e, part, lambda0, _sys=sys_e)]
    t1 = time.perf_counter()
    conds += [cond2_function(e, part, lambda0, q, _sys=sys_e, clock=clock) for q in range(len(sys_e.cols))]
    t2 = time.perf_counter()
    sys_o = _original_system(e, part, lambda0, clock)
    conds += [cond3_function(e, part, lambda0, p, _sys=sys_o, clock=clock) for p in part.N]
    t3 = time.perf_counter()
    if timer is not None:
        timer.add("cond1", t1 - t0)
        timer.add("cond2", t2 - t1)
        timer.add("cond3", t3 - t2)
        timer.add("eigen", clock.total)
    return conds


def _merge(points: list[tuple[float, ConditionFunction]]) -> list[tuple[float, ConditionFunction]]:
    points = sorted(points, key=lambda x: x[0])
    out: list[tuple[float, ConditionFunction]] = []
    for lam, cf in points:
        if out and abs(lam - out[-1][0]) <= TOL_MERGE * (1.0 + abs(lam)):
            continue
        out.append((lam, cf))
    return out


def _sample_points(lambda0: float, lo: float, hi: float) -> list[float]:
    pts = []
    for end, sgn in ((hi, 1.0), (lo, -1.0)):
        if math.isinf(end):
            pts.append(lambda0 + sgn * (1.0 + abs(lambda0)))
        else:
            pts.append(0.5 * (lambda0 + end))
    return pts


def _eigen_interval(e, part, lambda0, timer) -> IntervalCertificate:
    conds = build_conditions(e, part, lambda0, timer)
    for cf in conds:
        if not cf.holds(lambda0):
            raise InconsistencyError(
                "condition fails at its own anchor", kind=cf.kind.value, index=cf.index, lam=lambda0
            )
    tiny = 1e-12 * (1.0 + abs(lambda0))
    cand = [(lam, cf) for cf in conds for lam in cf.breakpoints() if abs(lam - lambda0) > tiny]
    cand = _merge(cand)
    above = [(lam, cf) for lam, cf in cand if lam > lambda0]
    below = [(lam, cf) for lam, cf in cand if lam < lambda0]
    hi, bhi = above[0] if above else (math.inf, None)
    lo, blo = below[-1] if below else (-math.inf, None)

    for lam in _sample_points(lambda0, lo, hi):
        bad = [cf for cf in conds if not cf.holds(lam)]
        if bad:
            raise InconsistencyError(
                "condition fails inside its own interval", kind=bad[0].kind.value, index=bad[0].index, lam=lam
            )
        direct = emb.check_induced_conditions(e, part, lambda0, lam)
        if not direct.all:
            raise InconsistencyError("direct evaluation rejects the eigenvalue interval", lam=lam, direct=tuple(direct))
    return IntervalCertificate(lo, hi, lambda0, blo, bhi, "eigen", tuple(conds))


def _same_partition(e: EmbeddedLP, part: InducedPartition, lam: float) -> bool:
    try:
        res = emb.induced_partition(e, lam, expect_original=part.original)
    except NumericFailure:
        return False
    return res.optimal and res.partition == part


def _bisect_end(e, part, lambda0, direction: float, lambda_cap: float) -> float:
    """Distance-doubling search, then bisection, for the end of the partition's region."""
    inside = lambda0
    step = 1e-3 * (1.0 + abs(lambda0))
    while True:
        trial = lambda0 + direction * step
        if abs(trial) > lambda_cap:
            edge = direction * lambda_cap
            if _same_partition(e, part, edge):
                return direction * math.inf
            outside = edge
            break
        if not _same_partition(e, part, trial):
            outside = trial
            break
        inside = trial
        step *= 2.0
    while abs(outside - inside) > BISECT_TOL * (1.0 + abs(inside)):
        mid = 0.5 * (inside + outside)
        if _same_partition(e, part, mid):
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def invariancy_interval(
    p_orig: ParametricLP | None,
    e: EmbeddedLP,
    part: InducedPartition,
    lambda0: float,
    *,
    lambda_cap: float = math.inf,
    timer: PhaseTimer | None = None,
) -> IntervalCertificate:
    """Maximal open interval around ``lambda0`` on which ``part`` stays the induced partition.

    ``p_orig`` is accepted for symmetry with the other constructors; the
    original data are read back from ``e``.  When the eigenvalue route is
    not exact the ends are located by LP bisection (``method="bisection"``);
    a region still unchanged at ``lambda_cap`` is reported as unbounded.
    """
    reason = eigen_path_obstruction(e, part, lambda0)
    if reason is None:
        return _eigen_interval(e, part, lambda0, timer)
    log.info("bisection fallback at lambda=%r: %s", lambda0, reason)
    start = time.perf_counter()
    hi = _bisect_end(e, part, lambda0, 1.0, lambda_cap)
    lo = _bisect_end(e, part, lambda0, -1.0, lambda_cap)
    if timer is not None:
        timer.add("bisection", time.perf_counter() - start)
    return IntervalCertificate(lo, hi, lambda0, method="bisection", note=reason)
