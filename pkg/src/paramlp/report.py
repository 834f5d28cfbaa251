"""Machine-readable output: interval tables, plot data, timings and oracle verdicts.

JSON numbers are written with 17 significant digits so that every double
round-trips; infinities are written as the strings ``"inf"`` / ``"-inf"``
and NaN as ``"nan"``.  ``intervals.json`` contains nothing that depends on
wall-clock time, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import PoleError
from .oracle import REL_TOL, OracleReport
from .sweep import InvariancyInterval, SweepReport
from .value_function import evaluate

PLOT_POINTS = 1000


def _num(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with fixed-precision floats; keys keep insertion order."""
    out: list[str] = []

    def emit(o, depth: int) -> None:
        pad = " " * (indent * (depth + 1))
        end = " " * (indent * depth)
        if o is None or isinstance(o, bool):
            out.append({None: "null", True: "true", False: "false"}[o])
        elif isinstance(o, (int, np.integer)):
            out.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            out.append(_num(o))
        elif isinstance(o, str):
            out.append(_quote(o))
        elif isinstance(o, dict):
            if not o:
                out.append("{}")
                return
            out.append("{\n")
            for k, (key, val) in enumerate(o.items()):
                out.append(f"{pad}{_quote(str(key))}: ")
                emit(val, depth + 1)
                out.append(",\n" if k < len(o) - 1 else "\n")
            out.append(end + "}")
        elif isinstance(o, (list, tuple)):
            if not o:
                out.append("[]")
                return
            if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in o):
                out.append("[")
                for k, v in enumerate(o):
                    emit(v, depth + 1)
                    if k < len(o) - 1:
                        out.append(", ")
                out.append("]")
                return
            out.append("[\n")
            for k, val in enumerate(o):
                out.append(pad)
                emit(val, depth + 1)
                out.append(",\n" if k < len(o) - 1 else "\n")
            out.append(end + "]")
        else:
            raise TypeError(f"cannot serialize {type(o).__name__}")

    emit(obj, 0)
    return "".join(out) + "\n"


def _quote(s: str) -> str:
    return json.dumps(s)


# ------------------------------------------------------------------ records


def _sets(iv: InvariancyInterval) -> dict[str, list[int]]:
    return iv.partition.one_based()


def interval_records(report: SweepReport) -> list[dict]:
    """One record per interval with 1-based index sets and the reduced ``Z``."""
    recs = []
    for k, iv in enumerate(report.intervals):
        num, den = iv.zf.coefficients()
        recs.append({
            "id": k,
            "interval": iv.label(),
            "lo": iv.lo,
            "hi": iv.hi,
            "lo_included": iv.lo_included,
            "hi_included": iv.hi_included,
            **_sets(iv),
            "Z": {"num": num, "den": den, "display": iv.zf.display()},
            "method": iv.method,
            "lambda_ref": iv.lambda_ref,
        })
    return recs


def intervals_document(report: SweepReport, metadata: dict | None = None) -> dict:
    return {
        "metadata": dict(metadata or {}),
        "epsilon": report.epsilon,
        "lambda_cap": report.lambda_cap,
        "intervals": interval_records(report),
        "points": [
            {"lambda": pt.lam, "kind": pt.kind.value, "value": pt.value_at} for pt in report.points
        ],
        "domain_ends": [{"lambda": lam, "beyond": st.value} for lam, st in report.terminations],
        "warnings": list(report.warnings),
    }


_CSV_FIELDS = ("id", "interval", "lo", "hi", "B", "Bplus", "Bminus", "N", "Nzero", "Z", "num", "den", "method")


def _csv_num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".17g")


def intervals_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for rec in interval_records(report):
        w.writerow([
            rec["id"],
            rec["interval"],
            _csv_num(rec["lo"]),
            _csv_num(rec["hi"]),
            *(" ".join(map(str, rec[key])) for key in ("B", "Bplus", "Bminus", "N", "Nzero")),
            rec["Z"]["display"],
            " ".join(map(_csv_num, rec["Z"]["num"])),
            " ".join(map(_csv_num, rec["Z"]["den"])),
            rec["method"],
        ])
    return buf.getvalue()


def plot_rows(report: SweepReport, points: int = PLOT_POINTS) -> list[tuple[float, float, int]]:
    """``(lambda, Z, interval_id)`` samples; ``Z`` is NaN at poles and a NaN row marks gaps."""
    rows: list[tuple[float, float, int]] = []
    cap = report.lambda_cap
    prev_hi = None
    for k, iv in enumerate(report.intervals):
        lo, hi = max(iv.lo, -cap), min(iv.hi, cap)
        if prev_hi is not None and lo > prev_hi:
            rows.append((0.5 * (prev_hi + lo), math.nan, -1))
        grid = [lo] if lo == hi else np.linspace(lo, hi, points)
        for lam in grid:
            try:
                z = evaluate(iv.zf, float(lam))
            except PoleError:
                z = math.nan
            rows.append((float(lam), z, k))
        prev_hi = hi
    return rows


def plot_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("lambda", "Z", "interval_id"))
    for lam, z, k in plot_rows(report):
        w.writerow((_csv_num(lam), "nan" if math.isnan(z) else _csv_num(z), k))
    return buf.getvalue()


def timings_document(report: SweepReport, oracle_seconds: float | None = None) -> dict:
    """Per-phase timing summary; ``total_sweep`` excludes the oracle."""
    phases = report.timings.get("phases", {})
    methods = [iv.method for iv in report.intervals]
    return {
        "eigen": phases.get("eigen"),
        "cond1": phases.get("cond1"),
        "cond2": phases.get("cond2"),
        "cond3": phases.get("cond3"),
        "bisection": phases.get("bisection"),
        "value_function": phases.get("value_function"),
        "total_sweep": report.timings.get("total"),
        "oracle": oracle_seconds,
        "intervals": len(report.intervals),
        "intervals_by_method": {m: methods.count(m) for m in sorted(set(methods))},
    }


def oracle_document(oracle: OracleReport | None) -> dict:
    if oracle is None:
        return {"ran": False}
    return {
        "ran": True,
        "passed": oracle.passed,
        "rel_tol": REL_TOL,
        "max_rel_error": oracle.max_rel_error,
        "verdicts": [{"interval_id": k, "passed": v} for k, v in enumerate(oracle.verdicts)],
        "probes": [
            {
                "interval_id": p.interval_id,
                "lambda": p.lam,
                "oracle": p.oracle_value,
                "analytic": p.analytic_value,
                "partitions_equal": p.partitions_equal,
                "rel_error": p.abs_rel_error,
                "error": p.error,
            }
            for p in oracle.probes
        ],
    }


def write_reports(
    out_dir: str | Path,
    report: SweepReport,
    oracle: OracleReport | None,
    metadata: dict | None = None,
    oracle_seconds: float | None = None,
) -> dict[str, Path]:
    """Write all five report files into ``out_dir`` and return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "intervals.json": dumps(intervals_document(report, metadata)),
        "intervals.csv": intervals_csv(report),
        "plotdata.csv": plot_csv(report),
        "timings.json": dumps(timings_document(report, oracle_seconds)),
        "oracle.json": dumps(oracle_document(oracle)),
    }
    paths = {}
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        paths[name] = path
    return paths
