"""Reader and writer for a subset of the MPS format.

Supported: NAME, ROWS (one N row plus E/L/G rows), COLUMNS, RHS and a
BOUNDS section that only restates the default ``x >= 0``.  Fields are
split on whitespace, so names must not contain blanks.  Inequality rows
get a slack (L) or surplus (G) column with zero cost, appended after the
structural columns in row order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MPSParseError, UnsupportedFeature
from .lp_core import StandardLP

_SECTIONS = {"NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA", "OBJSENSE", "OBJSENS"}


@dataclass(frozen=True, eq=False)
class MPSModel:
    name: str
    lp: StandardLP
    row_names: tuple[str, ...]
    row_types: tuple[str, ...]
    column_names: tuple[str, ...]
    n_structural: int


def _float(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MPSParseError(f"expected a number, got {tok!r}", lineno) from None
    if not np.isfinite(v):
        raise MPSParseError(f"non-finite value {tok!r}", lineno)
    return v


def _pairs(tokens: list[str], lineno: int) -> list[tuple[str, float]]:
    if len(tokens) not in (2, 4):
        raise MPSParseError(f"expected 1 or 2 (name, value) pairs, got {len(tokens)} fields", lineno)
    return [(tokens[k], _float(tokens[k + 1], lineno)) for k in range(0, len(tokens), 2)]


def read_mps(text: str) -> MPSModel:
    name = ""
    section = None
    objective = None
    rows: dict[str, int] = {}
    row_names: list[str] = []
    row_types: list[str] = []
    cols: dict[str, int] = {}
    col_names: list[str] = []
    entries: dict[tuple[int, int], float] = {}
    cost: dict[int, float] = {}
    rhs: dict[int, float] = {}
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        if not raw[0].isspace():
            head, *rest = line.split()
            head = head.upper()
            if head not in _SECTIONS:
                raise MPSParseError(f"unknown section {head!r}", lineno)
            if head in ("RANGES", "OBJSENSE", "OBJSENS"):
                raise UnsupportedFeature(f"section {head} is not supported (line {lineno})")
            if head == "NAME":
                name = " ".join(rest)
            if head == "ENDATA":
                ended = True
                break
            section = head
            continue
        tok = line.split()
        if section == "ROWS":
            if len(tok) != 2:
                raise MPSParseError("ROWS entries need a type and a name", lineno)
            kind, rname = tok[0].upper(), tok[1]
            if rname in rows or rname == objective:
                raise MPSParseError(f"duplicate row {rname!r}", lineno)
            if kind == "N":
                if objective is not None:
                    raise UnsupportedFeature(f"second objective row {rname!r} (line {lineno})")
                objective = rname
            elif kind in ("E", "L", "G"):
                rows[rname] = len(row_names)
                row_names.append(rname)
                row_types.append(kind)
            else:
                raise MPSParseError(f"unknown row type {kind!r}", lineno)
        elif section == "COLUMNS":
            if "'MARKER'" in tok:
                raise UnsupportedFeature(f"integer markers are not supported (line {lineno})")
            if len(tok) < 3:
                raise MPSParseError("COLUMNS entries need a column and at least one (row, value) pair", lineno)
            cname = tok[0]
            if cname not in cols:
                cols[cname] = len(col_names)
                col_names.append(cname)
            elif cname != col_names[-1]:
                raise MPSParseError(f"entries of column {cname!r} are not contiguous", lineno)
            j = cols[cname]
            for rname, v in _pairs(tok[1:], lineno):
                if rname == objective:
                    cost[j] = v
                elif rname in rows:
                    entries[(rows[rname], j)] = v
                else:
                    raise MPSParseError(f"unknown row {rname!r}", lineno)
        elif section == "RHS":
            body = tok[1:] if len(tok) in (3, 5) else tok
            for rname, v in _pairs(body, lineno):
                if rname == objective:
                    raise UnsupportedFeature(f"RHS on the objective row (line {lineno})")
                if rname not in rows:
                    raise MPSParseError(f"unknown row {rname!r}", lineno)
                rhs[rows[rname]] = v
        elif section == "BOUNDS":
            if len(tok) < 3:
                raise MPSParseError("malformed BOUNDS entry", lineno)
            kind = tok[0].upper()
            cname = tok[2]
            if cname not in cols:
                raise MPSParseError(f"unknown column {cname!r}", lineno)
            value = _float(tok[3], lineno) if len(tok) > 3 else None
            default = (kind == "LO" and value == 0.0) or (kind == "PL") or (kind == "UP" and value == np.inf)
            if not default:
                raise UnsupportedFeature(f"BOUNDS type {kind} on {cname!r} is not supported (line {lineno})")
        else:
            raise MPSParseError("data line outside a section", lineno)

    if not ended:
        raise MPSParseError("missing ENDATA")
    if objective is None:
        raise MPSParseError("no objective (N) row")
    if not row_names or not col_names:
        raise MPSParseError("problem has no constraints or no columns")

    m, n = len(row_names), len(col_names)
    slack_rows = [i for i, t in enumerate(row_types) if t != "E"]
    A = np.zeros((m, n + len(slack_rows)))
    for (i, j), v in entries.items():
        A[i, j] = v
    names = list(col_names)
    for k, i in enumerate(slack_rows):
        A[i, n + k] = 1.0 if row_types[i] == "L" else -1.0
        names.append(f"_slack_{row_names[i]}")
    c = np.zeros(A.shape[1])
    for j, v in cost.items():
        c[j] = v
    b = np.array([rhs.get(i, 0.0) for i in range(m)])
    return MPSModel(name, StandardLP(A, b, c), tuple(row_names), tuple(row_types), tuple(names), n)


def parse_mps(text: str) -> StandardLP:
    """Standard-form LP from MPS text (slacks appended)."""
    return read_mps(text).lp


def write_mps(lp: StandardLP, name: str = "PROBLEM") -> str:
    """Canonical MPS text for ``lp``: all rows are equalities, columns ``C1..Cn``."""
    m, n = lp.shape
    out = [f"NAME          {name}", "ROWS", " N  OBJ"]
    out += [f" E  R{i + 1}" for i in range(m)]
    out.append("COLUMNS")
    for j in range(n):
        if lp.c[j] != 0.0:
            out.append(f"    C{j + 1}  OBJ  {float(lp.c[j])!r}")
        for i in np.flatnonzero(lp.A[:, j]):
            out.append(f"    C{j + 1}  R{i + 1}  {float(lp.A[i, j])!r}")
        if lp.c[j] == 0.0 and not np.any(lp.A[:, j]):
            out.append(f"    C{j + 1}  OBJ  0.0")
    out.append("RHS")
    for i in np.flatnonzero(lp.b):
        out.append(f"    RHS  R{i + 1}  {float(lp.b[i])!r}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"
