"""Enumerate invariancy intervals and boundary points on both sides of 0.

Each walk starts from a boundary ``lam_b`` whose LP has been solved, probes
``lam_b +/- eps``, computes the invariancy interval of the probe's partition
and checks that its near end is ``lam_b``.  If the probe jumped over a
narrower interval, ``eps`` is halved and the probe repeated.  The far end is
then solved: an optimal LP gives the next boundary point, an infeasible or
unbounded one ends the walk.

Afterwards points whose partition matches the neighboring intervals are
merged away, the rest become singleton intervals and classified boundary
points.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field, replace

from numpy.polynomial import Polynomial

from . import embedding as emb
from .embedding import EmbeddedLP, InducedPartition, InducedSolve, ParametricLP
from .errors import InconsistencyError, NumericFailure, ProbeFailure
from .invariancy import IntervalCertificate, invariancy_interval
from .lp_core import Status
from .timing import PhaseTimer
from .value_function import RationalFunction, build_value_function

log = logging.getLogger(__name__)

MAX_HALVINGS = 20


class PointKind(enum.Enum):
    TRANSITION = "Transition"
    CHANGE = "Change"
    BOTH = "Both"
    NEITHER = "Neither"
    INFEASIBLE = "Boundary(Infeasible)"
    UNBOUNDED = "Boundary(Unbounded)"


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    lam: float
    kind: PointKind
    partition_at: InducedPartition | None = None
    value_at: float | None = None


@dataclass(frozen=True, eq=False)
class InvariancyInterval:
    lo: float
    hi: float
    lo_included: bool
    hi_included: bool
    partition: InducedPartition
    zf: RationalFunction
    lambda_ref: float
    method: str = "eigen"
    epsilon_used: float | None = None

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def label(self) -> str:
        if self.is_singleton:
            return f"{{{self.lo:.10g}}}"
        left = "[" if self.lo_included else "("
        right = "]" if self.hi_included else ")"
        return f"{left}{_fmt(self.lo)},{_fmt(self.hi)}{right}"


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.10g}"


@dataclass(eq=False)
class SweepReport:
    intervals: list[InvariancyInterval]
    points: list[BoundaryPoint]
    epsilon: float
    lambda_cap: float
    timings: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    # (domain boundary, status at or just beyond it) for walks that ran out of domain
    terminations: list[tuple[float, Status]] = field(default_factory=list)


def classify_point(
    before: InducedPartition | None, at: InducedPartition, after: InducedPartition | None
) -> PointKind:
    """Transition if ``(B, N)`` differs from a neighbor, Change if ``(B+, B-, N0)`` does."""
    neighbors = [p for p in (before, after) if p is not None]
    trans = any(p.original != at.original for p in neighbors)
    change = any(p.auxiliary != at.auxiliary for p in neighbors)
    if trans and change:
        return PointKind.BOTH
    if trans:
        return PointKind.TRANSITION
    if change:
        return PointKind.CHANGE
    return PointKind.NEITHER


# ------------------------------------------------------------------- walking


@dataclass
class _Point:
    lam: float
    solve: InducedSolve


@dataclass
class _End:
    lam: float
    status: Status


@dataclass
class _Walker:
    p: ParametricLP
    e: EmbeddedLP
    epsilon: float
    lambda_cap: float
    timer: PhaseTimer
    warnings: list[str]
    terminations: list = field(default_factory=list)

    def gap_tol(self, lam: float) -> float:
        return 1e-6 * (1.0 + abs(lam))

    def step(self, lam_b: float, d: float):
        """Find the interval adjacent to ``lam_b`` on side ``d``.

        Returns ``(cert, zf, solve, probe, eps)`` or ``None`` when every probe
        beyond ``lam_b`` is infeasible or unbounded.  ``eps`` is halved at
        most 20 times and never below the gap tolerance.
        """
        eps = self.epsilon
        failure = None
        status = None
        for _ in range(MAX_HALVINGS + 1):
            if eps <= self.gap_tol(lam_b):
                # closer probes are below the resolution of the gap test
                break
            probe = lam_b + d * eps
            try:
                res = emb.induced_partition(self.e, probe)
            except NumericFailure as exc:
                self.warnings.append(f"probe at lambda={probe!r} failed: {exc}")
                failure = "solver"
                eps *= 0.5
                continue
            if not res.optimal:
                failure, status = "status", res.status
                eps *= 0.5
                continue
            try:
                cert = invariancy_interval(
                    self.p, self.e, res.partition, probe, lambda_cap=self.lambda_cap, timer=self.timer
                )
            except (InconsistencyError, NumericFailure) as exc:
                self.warnings.append(f"probe at lambda={probe!r} rejected: {exc}")
                failure = "inconsistent"
                eps *= 0.5
                continue
            near = cert.lo if d > 0 else cert.hi
            if (near - lam_b) * d > self.gap_tol(lam_b):
                failure = "gap"
                eps *= 0.5
                continue
            cert = replace(cert, lo=lam_b) if d > 0 else replace(cert, hi=lam_b)
            try:
                with self.timer.phase("value_function"):
                    zf = build_value_function(self.e, res.partition, probe, cert, res.solution.objective)
            except (InconsistencyError, NumericFailure) as exc:
                self.warnings.append(f"probe at lambda={probe!r} rejected: {exc}")
                failure = "inconsistent"
                eps *= 0.5
                continue
            return cert, zf, res, probe, eps
        if failure == "status":
            self.terminations.append((lam_b, status))
            return None
        raise ProbeFailure(f"no probe lands in the interval adjacent to the boundary ({failure})", lam_b)

    def walk(self, d: float) -> list:
        items: list = []
        lam_b = 0.0
        while abs(lam_b) < self.lambda_cap:
            found = self.step(lam_b, d)
            if found is None:
                break
            cert, zf, res, probe, eps = found
            items.append(
                InvariancyInterval(
                    lo=cert.lo,
                    hi=cert.hi,
                    lo_included=False,
                    hi_included=False,
                    partition=res.partition,
                    zf=zf,
                    lambda_ref=probe,
                    method=cert.method,
                    epsilon_used=eps,
                )
            )
            far = cert.hi if d > 0 else cert.lo
            if math.isinf(far) or abs(far) > self.lambda_cap:
                break
            at = emb.induced_partition(self.e, far)
            if not at.optimal:
                items.append(_End(far, at.status))
                self.terminations.append((far, at.status))
                break
            items.append(_Point(far, at))
            lam_b = far
        return items


def _singleton(lam: float, solve: InducedSolve) -> InvariancyInterval:
    obj = solve.solution.objective
    zf = RationalFunction(Polynomial([obj]), Polynomial([1.0]), lam, lam)
    return InvariancyInterval(lam, lam, True, True, solve.partition, zf, lam, method="point")


def _with_bounds(iv: InvariancyInterval, **kw) -> InvariancyInterval:
    iv = replace(iv, **kw)
    return replace(iv, zf=replace(iv.zf, lo=iv.lo, hi=iv.hi))


def _assemble(tokens: list) -> tuple[list[InvariancyInterval], list[BoundaryPoint]]:
    intervals: list[InvariancyInterval] = []
    points: list[BoundaryPoint] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if isinstance(tok, InvariancyInterval):
            intervals.append(tok)
        elif isinstance(tok, _End):
            kind = PointKind.INFEASIBLE if tok.status is Status.INFEASIBLE else PointKind.UNBOUNDED
            points.append(BoundaryPoint(tok.lam, kind))
        else:
            part = tok.solve.partition
            left = intervals[-1] if i > 0 and isinstance(tokens[i - 1], InvariancyInterval) else None
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            right = nxt if isinstance(nxt, InvariancyInterval) else None
            same_left = left is not None and left.partition == part
            same_right = right is not None and right.partition == part
            if (same_left or left is None) and (same_right or right is None) and (left or right):
                if left is not None and right is not None:
                    intervals[-1] = _with_bounds(left, hi=right.hi, hi_included=right.hi_included)
                    i += 2
                    continue
                if left is not None:
                    intervals[-1] = _with_bounds(left, hi_included=True)
                else:
                    tokens[i + 1] = _with_bounds(right, lo_included=True)
            else:
                intervals.append(_singleton(tok.lam, tok.solve))
                kind = classify_point(
                    left.partition if left else None, part, right.partition if right else None
                )
                points.append(BoundaryPoint(tok.lam, kind, part, tok.solve.solution.objective))
        i += 1
    return intervals, points


def sweep(
    p: ParametricLP,
    epsilon: float = 0.015,
    lambda_cap: float = 1e3,
    direction: str = "both",
) -> SweepReport:
    """All invariancy intervals reachable from 0 within ``|lam| <= lambda_cap``.

    ``direction`` is ``"both"``, ``"left"`` or ``"right"``.
    """
    if not epsilon > 0 or not lambda_cap > 0:
        raise ValueError("epsilon and lambda_cap must be positive")
    if direction not in ("both", "left", "right"):
        raise ValueError(f"unknown direction {direction!r}")
    timer = PhaseTimer()
    warnings: list[str] = []
    start = time.perf_counter()
    e = emb.embed(p)
    at0 = emb.induced_partition(e, 0.0)
    if not at0.optimal:
        kind = PointKind.INFEASIBLE if at0.status is Status.INFEASIBLE else PointKind.UNBOUNDED
        return SweepReport([], [BoundaryPoint(0.0, kind)], epsilon, lambda_cap, {"total": time.perf_counter() - start})
    walker = _Walker(p, e, epsilon, lambda_cap, timer, warnings)
    left = walker.walk(-1.0) if direction in ("both", "left") else []
    right = walker.walk(1.0) if direction in ("both", "right") else []
    tokens = list(reversed(left)) + [_Point(0.0, at0)] + right
    intervals, points = _assemble(tokens)
    timings = {"phases": timer.summary(), "total": time.perf_counter() - start}
    for w in warnings:
        log.warning(w)
    ends = sorted(walker.terminations, key=lambda t: t[0])
    return SweepReport(intervals, points, epsilon, lambda_cap, timings, warnings, ends)


def refines(fine: SweepReport, coarse: SweepReport, tol: float = 1e-5) -> bool:
    """True if every interval of ``coarse`` is a union of items of ``fine``.

    Both reports tile a contiguous range of lambda, so it suffices that each
    coarse endpoint matches a fine endpoint within ``tol`` and that the
    coarse range lies inside the fine one.
    """
    if not fine.intervals or not coarse.intervals:
        return not coarse.intervals
    ends = sorted({iv.lo for iv in fine.intervals} | {iv.hi for iv in fine.intervals})

    def matched(v: float) -> bool:
        if math.isinf(v):
            return v in ends
        return any(math.isfinite(w) and abs(w - v) <= tol for w in ends)

    lo, hi = ends[0], ends[-1]
    for iv in coarse.intervals:
        if not (matched(iv.lo) and matched(iv.hi)):
            return False
        if iv.lo < lo - tol or iv.hi > hi + tol:
            return False
    return True
