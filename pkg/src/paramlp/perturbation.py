"""Perturbation directions: explicit files and seeded random draws.

File grammar (``#`` starts a comment, blank lines are ignored)::

    explicit
    i j value      # dA[i, j] = value   (1-based, standard-form columns)
    i value        # db[i] = value

    random
    seed 42
    count 25       # optional, default floor(n / 2)
    mean 0         # optional, normal parameters of the dA values
    std 1
    db_low 0       # optional, uniform range of db
    db_high 3

Random draws use ``numpy.random.default_rng(seed)`` (PCG64): ``count``
distinct positions of ``dA`` chosen uniformly without replacement, values
from ``N(mean, std^2)`` and ``db`` entries iid uniform on ``[db_low, db_high]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import PerturbationParseError, ShapeError
from .lp_core import StandardLP

GENERATOR = "numpy.random.default_rng (PCG64)"


class Mode(enum.Enum):
    EXPLICIT = "explicit"
    RANDOM = "random"


@dataclass(frozen=True)
class PerturbationSpec:
    mode: Mode
    dA_entries: tuple[tuple[int, int, float], ...] = ()
    db_entries: tuple[tuple[int, float], ...] = ()
    seed: int = 0
    count: int | None = None
    mean: float = 0.0
    std: float = 1.0
    db_low: float = 0.0
    db_high: float = 3.0

    @classmethod
    def random(cls, seed: int, **kw) -> PerturbationSpec:
        return cls(Mode.RANDOM, seed=int(seed), **kw)

    @classmethod
    def explicit(cls, dA, db) -> PerturbationSpec:
        dA = np.asarray(dA, dtype=float)
        db = np.asarray(db, dtype=float).ravel()
        ent = tuple((int(i), int(j), float(dA[i, j])) for i, j in zip(*np.nonzero(dA)))
        bent = tuple((int(i), float(db[i])) for i in np.flatnonzero(db))
        return cls(Mode.EXPLICIT, dA_entries=ent, db_entries=bent)


_RANDOM_KEYS = {"seed": int, "count": int, "mean": float, "std": float, "db_low": float, "db_high": float}


def parse_perturbation(text: str) -> PerturbationSpec:
    mode = None
    dA: list[tuple[int, int, float]] = []
    db: list[tuple[int, float]] = []
    kv: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if mode is None:
            try:
                mode = Mode(tok[0].lower())
            except ValueError:
                raise PerturbationParseError(f"expected 'explicit' or 'random' header, got {tok[0]!r}", lineno) from None
            continue
        try:
            if mode is Mode.EXPLICIT:
                if len(tok) == 3:
                    dA.append((int(tok[0]) - 1, int(tok[1]) - 1, float(tok[2])))
                elif len(tok) == 2:
                    db.append((int(tok[0]) - 1, float(tok[1])))
                else:
                    raise PerturbationParseError(f"expected 'i j value' or 'i value', got {len(tok)} fields", lineno)
            else:
                if len(tok) != 2 or tok[0] not in _RANDOM_KEYS:
                    raise PerturbationParseError(f"expected one of {sorted(_RANDOM_KEYS)} followed by a value", lineno)
                kv[tok[0]] = _RANDOM_KEYS[tok[0]](tok[1])
        except ValueError:
            raise PerturbationParseError(f"malformed number in {line!r}", lineno) from None
    if mode is None:
        raise PerturbationParseError("empty perturbation file")
    if mode is Mode.EXPLICIT:
        if any(i < 0 or j < 0 for i, j, _ in dA) or any(i < 0 for i, _ in db):
            raise PerturbationParseError("indices are 1-based")
        return PerturbationSpec(mode, dA_entries=tuple(dA), db_entries=tuple(db))
    if "seed" not in kv:
        raise PerturbationParseError("random perturbation needs a seed")
    return PerturbationSpec(mode, **kv)


def generate_perturbation(lp: StandardLP, spec: PerturbationSpec) -> tuple[np.ndarray, np.ndarray]:
    m, n = lp.shape
    dA = np.zeros((m, n))
    db = np.zeros(m)
    if spec.mode is Mode.EXPLICIT:
        for i, j, v in spec.dA_entries:
            if not (0 <= i < m and 0 <= j < n):
                raise ShapeError(f"dA entry ({i + 1}, {j + 1}) outside the {m}x{n} matrix")
            dA[i, j] = v
        for i, v in spec.db_entries:
            if not 0 <= i < m:
                raise ShapeError(f"db entry {i + 1} outside 1..{m}")
            db[i] = v
        return dA, db
    count = n // 2 if spec.count is None else spec.count
    if not 0 <= count <= m * n:
        raise ShapeError(f"cannot perturb {count} entries of a {m}x{n} matrix")
    rng = np.random.default_rng(spec.seed)
    flat = rng.choice(m * n, size=count, replace=False)
    dA.flat[flat] = rng.normal(spec.mean, spec.std, size=count)
    db[:] = rng.uniform(spec.db_low, spec.db_high, size=m)
    return dA, db
