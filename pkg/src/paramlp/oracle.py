"""Brute-force check of a sweep report by re-solving the LP at probe points.

Only the LP solver and the embedding are used here; none of the eigenvalue
or value-function construction code is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import embedding as emb
from .embedding import ParametricLP
from .errors import ParamLPError
from .sweep import InvariancyInterval, SweepReport
from .value_function import evaluate

REL_TOL = 1e-6
UNBOUNDED_OFFSETS = (1.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True)
class Probe:
    interval_id: int
    lam: float
    oracle_value: float | None
    analytic_value: float | None
    partitions_equal: bool
    abs_rel_error: float
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.partitions_equal and self.abs_rel_error <= REL_TOL


@dataclass(eq=False)
class OracleReport:
    probes: list[Probe] = field(default_factory=list)
    verdicts: list[bool] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts)

    @property
    def max_rel_error(self) -> float:
        errs = [p.abs_rel_error for p in self.probes if math.isfinite(p.abs_rel_error)]
        return max(errs, default=0.0)


def relative_error(analytic: float, oracle: float) -> float:
    """``|a - o| / max(|o|, 1)``."""
    return abs(analytic - oracle) / max(abs(oracle), 1.0)


def probe_points(iv: InvariancyInterval, count: int, lambda_cap: float) -> list[float]:
    """Interior probe locations for one interval.

    Finite intervals use Chebyshev nodes shrunk by a margin of 1e-4 of the
    width; a singleton is probed at its point; an unbounded side is probed at
    ``end +/- {1, 2, 4, 8}`` clipped to the cap.
    """
    if count < 1:
        raise ValueError("need at least one probe per interval")
    lo, hi = iv.lo, iv.hi
    if lo == hi:
        return [lo]
    if math.isfinite(lo) and math.isfinite(hi):
        width = hi - lo
        margin = 1e-4 * width
        k = np.arange(count)
        nodes = np.cos((2 * k + 1) * np.pi / (2 * count))
        mid, half = 0.5 * (lo + hi), 0.5 * width - margin
        return sorted(float(mid + half * v) for v in nodes)
    pts = []
    if math.isfinite(lo):
        pts = [min(lo + off, lambda_cap) for off in UNBOUNDED_OFFSETS]
    elif math.isfinite(hi):
        pts = [max(hi - off, -lambda_cap) for off in UNBOUNDED_OFFSETS]
    else:
        pts = [s * off for off in UNBOUNDED_OFFSETS for s in (-1.0, 1.0)]
    return sorted({p for p in pts if lo < p < hi})


def grid_verify(p: ParametricLP, report: SweepReport, probes_per_interval: int = 5) -> OracleReport:
    e = emb.embed(p)
    out = OracleReport()
    for k, iv in enumerate(report.intervals):
        ok = True
        for lam in probe_points(iv, probes_per_interval, report.lambda_cap):
            try:
                res = emb.induced_partition(e, lam)
            except ParamLPError as exc:
                out.probes.append(Probe(k, lam, None, None, False, math.inf, f"solver: {exc}"))
                ok = False
                continue
            if not res.optimal:
                out.probes.append(Probe(k, lam, None, None, False, math.inf, res.status.value))
                ok = False
                continue
            oracle_value = res.solution.objective
            try:
                analytic = evaluate(iv.zf, lam)
            except ParamLPError as exc:
                out.probes.append(Probe(k, lam, oracle_value, None, False, math.inf, f"evaluate: {exc}"))
                ok = False
                continue
            probe = Probe(
                k,
                lam,
                oracle_value,
                analytic,
                res.partition == iv.partition,
                relative_error(analytic, oracle_value),
            )
            out.probes.append(probe)
            ok = ok and probe.passed
        out.verdicts.append(ok)
    return out
