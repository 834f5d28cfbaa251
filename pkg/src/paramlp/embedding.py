"""Embedding of the doubly perturbed LP into a coefficient-only perturbation.

For ``min c^T x  s.t. (A + lam dA) x = b + lam db, x >= 0`` introduce the free
vector ``z = dA x - db``.  The constraints become

    [ A   lam I ] [x]   [ b]
    [ dA   -I   ] [z] = [db],

so ``lam`` only multiplies the identity block in the upper right.  The
embedded variables are ``(x, z)`` with ``x`` in columns ``0..n-1`` and ``z``
in columns ``n..n+m-1``; all index sets are 0-based.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import lp_core
from .errors import NumericFailure, ShapeError
from .linalg import numerical_rank, pseudo_inverse
from .lp_core import SolveResult, StandardLP, Status

log = logging.getLogger(__name__)


def _frozen(arr, ndim: int) -> np.ndarray:
    out = np.array(arr, dtype=float, ndmin=ndim)
    if ndim == 1:
        out = out.ravel()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ParametricLP:
    """``min c^T x  s.t. (A + lam dA) x = b + lam db, x >= 0``."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    dA: np.ndarray
    db: np.ndarray

    def __post_init__(self):
        A, dA = _frozen(self.A, 2), _frozen(self.dA, 2)
        b, c, db = _frozen(self.b, 1), _frozen(self.c, 1), _frozen(self.db, 1)
        m, n = A.shape
        if dA.shape != (m, n) or b.size != m or db.size != m or c.size != n:
            raise ShapeError(
                f"inconsistent shapes: A {A.shape}, dA {dA.shape}, b {b.size}, db {db.size}, c {c.size}"
            )
        if not all(np.all(np.isfinite(v)) for v in (A, b, c, dA, db)):
            raise ShapeError("parametric LP has non-finite data")
        if not (np.any(dA) or np.any(db)):
            raise ShapeError("perturbation direction (dA, db) is zero")
        for name, val in zip("A b c dA db".split(), (A, b, c, dA, db)):
            object.__setattr__(self, name, val)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def at(self, lam: float) -> StandardLP:
        """The unembedded LP at ``lam``."""
        return StandardLP(self.A + lam * self.dA, self.b + lam * self.db, self.c)


@dataclass(frozen=True, eq=False)
class EmbeddedLP:
    bc: np.ndarray
    bA: np.ndarray
    bdA: np.ndarray
    bb: np.ndarray
    n_orig: int
    m_orig: int

    # original blocks, read back from the embedding
    @property
    def A(self) -> np.ndarray:
        return self.bA[: self.m_orig, : self.n_orig]

    @property
    def dA(self) -> np.ndarray:
        return self.bA[self.m_orig :, : self.n_orig]

    @property
    def b(self) -> np.ndarray:
        return self.bb[: self.m_orig]

    @property
    def db(self) -> np.ndarray:
        return self.bb[self.m_orig :]

    @property
    def c(self) -> np.ndarray:
        return self.bc[: self.n_orig]

    def matrix(self, lam: float) -> np.ndarray:
        return self.bA + lam * self.bdA


@dataclass(frozen=True)
class InducedPartition:
    """Five-way split of the embedded columns.

    ``B``/``N`` cover the original columns ``0..n-1``; ``Bplus``, ``Bminus``
    and ``Nzero`` cover the auxiliary columns ``n..n+m-1``.
    """

    B: tuple[int, ...]
    Bplus: tuple[int, ...]
    Bminus: tuple[int, ...]
    N: tuple[int, ...]
    Nzero: tuple[int, ...]

    @property
    def tau_bar(self) -> tuple[int, ...]:
        return tuple(sorted(self.B + self.Bplus + self.Bminus))

    @property
    def tau(self) -> tuple[int, ...]:
        return tuple(sorted(self.B))

    @property
    def l(self) -> int:
        return len(self.B)

    @property
    def l_bar(self) -> int:
        return len(self.B) + len(self.Bplus) + len(self.Bminus)

    @property
    def original(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.B, self.N

    @property
    def auxiliary(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return self.Bplus, self.Bminus, self.Nzero

    def validate(self, n: int, m: int) -> None:
        orig = sorted(self.B + self.N)
        aux = sorted(self.Bplus + self.Bminus + self.Nzero)
        if orig != list(range(n)) or aux != list(range(n, n + m)):
            raise ShapeError(f"partition does not split 0..{n - 1} and {n}..{n + m - 1}: {self}")

    def one_based(self) -> dict[str, list[int]]:
        return {k: [j + 1 for j in getattr(self, k)] for k in ("B", "Bplus", "Bminus", "N", "Nzero")}


def embed(p: ParametricLP) -> EmbeddedLP:
    m, n = p.m, p.n
    bA = np.zeros((2 * m, n + m))
    bA[:m, :n] = p.A
    bA[m:, :n] = p.dA
    bA[m:, n:] = -np.eye(m)
    bdA = np.zeros((2 * m, n + m))
    bdA[:m, n:] = np.eye(m)
    bb = np.concatenate([p.b, p.db])
    bc = np.concatenate([p.c, np.zeros(m)])
    for arr in (bA, bdA, bb, bc):
        arr.setflags(write=False)
    return EmbeddedLP(bc=bc, bA=bA, bdA=bdA, bb=bb, n_orig=n, m_orig=m)


def instantiate(e: EmbeddedLP, lam: float) -> StandardLP:
    """Embedded LP at ``lam`` with the matrix ``bA + lam * bdA``.

    The auxiliary columns are free; use :func:`split_free` before handing the
    result to a solver that assumes ``x >= 0`` everywhere.
    """
    return StandardLP(e.matrix(lam), e.bb, e.bc)


def split_free(std: StandardLP, n_orig: int) -> StandardLP:
    """Replace every column from ``n_orig`` on by a ``(+col, -col)`` pair."""
    free = std.A[:, n_orig:]
    return StandardLP(
        np.hstack([std.A, -free]),
        std.b,
        np.concatenate([std.c, -std.c[n_orig:]]),
    )


def recombine(v: np.ndarray, n_orig: int, m_orig: int) -> np.ndarray:
    """Map a split vector ``(x, z+, z-)`` back to ``(x, z+ - z-)``."""
    return np.concatenate([v[:n_orig], v[n_orig : n_orig + m_orig] - v[n_orig + m_orig :]])


@dataclass(frozen=True, eq=False)
class InducedSolve:
    """Outcome of :func:`induced_partition`."""

    status: Status
    partition: InducedPartition | None = None
    solution: lp_core.PrimalDualSolution | None = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def induced_partition(e: EmbeddedLP, lam: float, expect_original=None) -> InducedSolve:
    """Solve the embedded LP at ``lam`` and classify every column.

    ``B``/``N`` come from the optimal partition of the original columns.  The
    sign of each ``z_i`` is then probed over the optimal face (with ``x_N``
    fixed at zero): ``z_i`` goes to ``Bplus`` if it can be positive, to
    ``Bminus`` if it can be negative, and to ``Nzero`` otherwise.  An index
    that can take both signs is put in ``Bplus`` with a warning.

    The returned solution is in embedded variables ``(x, z)`` and averages
    the face points found along the way.

    ``expect_original`` is a ``(B, N)`` pair; when the computed one differs,
    the sign probing is skipped and the auxiliary classes come back empty.
    """
    n, m = e.n_orig, e.m_orig
    split = split_free(instantiate(e, lam), n)
    res: SolveResult = lp_core.solve(split)
    if not res.optimal:
        return InducedSolve(res.status)
    part_x, avg = lp_core.strictly_complementary(split, res.solution, columns=range(n))
    if expect_original is not None and (part_x.B, part_x.N) != tuple(expect_original):
        part = InducedPartition(B=part_x.B, Bplus=(), Bminus=(), N=part_x.N, Nzero=())
        return InducedSolve(Status.OPTIMAL, part, res.solution)

    x0 = recombine(avg.x, n, m)
    tol = lp_core.tol_supp(x0)
    z0 = x0[n:]
    pos, neg = z0 > tol, z0 < -tol
    points: list[np.ndarray] = []
    A_lam = e.A + lam * e.dA
    B = list(part_x.B)
    varying = np.zeros(m, dtype=bool)
    if B:
        # z = dA x - db only moves along the face's null directions
        AB = A_lam[:, B]
        r = numerical_rank(AB)
        if r < len(B):
            null = np.linalg.svd(AB)[2][r:].T
            spread = np.linalg.norm(e.dA[:, B] @ null, axis=1)
            varying = spread > 1e-9 * (1.0 + np.linalg.norm(e.dA[:, B], axis=1))
    if np.any(varying):
        unit = np.zeros((m, n + 2 * m))
        unit[:, n : n + m] = np.eye(m)
        unit[:, n + m :] = -np.eye(m)
        ups = [i for i in range(m) if varying[i] and not pos[i]]
        downs = [i for i in range(m) if varying[i] and not neg[i]]
        rows = [unit[i] for i in ups] + [-unit[i] for i in downs]
        owners = [(i, True) for i in ups] + [(i, False) for i in downs]
        if rows:
            cap = max(1.0, float(np.max(np.abs(avg.x))))
            wit = None
            # fixing x_N = 0 sharpens the face but is empty if N is off by round-off
            for zero in (part_x.N, ()):
                try:
                    wit = lp_core.maximize_over_face(
                        split, res.solution.objective, np.array(rows), tol, zero_cols=zero, cap=cap, nonneg=False
                    )
                    break
                except NumericFailure as exc:
                    log.warning("sign probe at lambda=%r failed (%s)", lam, exc)
            if wit is not None:
                points = wit.points
                for (i, up), hit in zip(owners, wit.positive):
                    if hit:
                        (pos if up else neg)[i] = True

    Bplus, Bminus, Nzero = [], [], []
    for i in range(m):
        j = n + i
        if pos[i] and neg[i]:
            log.warning("auxiliary column %d takes both signs on the optimal face at lambda=%r", j, lam)
            Bplus.append(j)
        elif pos[i]:
            Bplus.append(j)
        elif neg[i]:
            Bminus.append(j)
        else:
            Nzero.append(j)
    part = InducedPartition(
        B=part_x.B, Bplus=tuple(Bplus), Bminus=tuple(Bminus), N=part_x.N, Nzero=tuple(Nzero)
    )

    x = recombine(np.mean([avg.x] + points, axis=0), n, m)
    y = avg.y
    s = e.bc - e.matrix(lam).T @ y
    sol = lp_core.PrimalDualSolution(x=x, y=y, s=s, objective=res.solution.objective)
    return InducedSolve(Status.OPTIMAL, part, sol)


@dataclass(frozen=True)
class ConditionCheck:
    cond1: bool
    cond2: bool
    cond3: bool

    def __iter__(self):
        return iter((self.cond1, self.cond2, self.cond3))

    @property
    def all(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3


def direct_primal(e: EmbeddedLP, part: InducedPartition, lam: float) -> np.ndarray:
    """``x_tau_bar(lam) = pinv(bA_tau_bar(lam)) bb`` in the order of ``tau_bar``."""
    cols = list(part.tau_bar)
    return pseudo_inverse(e.matrix(lam)[:, cols]) @ e.bb


def direct_reduced_costs(e: EmbeddedLP, part: InducedPartition, lam: float) -> np.ndarray:
    """``c_N - c_B^T pinv(A_B(lam)) A_N(lam)`` on the original data, in the order of ``N``."""
    A_lam = e.A + lam * e.dA
    B, N = list(part.B), list(part.N)
    if not N:
        return np.zeros(0)
    if not B:
        return e.c[N].copy()
    y = e.c[B] @ pseudo_inverse(A_lam[:, B])
    return e.c[N] - y @ A_lam[:, N]


def check_induced_conditions(
    e: EmbeddedLP, part: InducedPartition, lambda0: float, lam: float
) -> ConditionCheck:
    """Direct (eigenvalue-free) evaluation of the three invariancy conditions at ``lam``.

    1. ``bA_tau_bar(lam)`` has the same rank as at ``lambda0``.
    2. ``pinv(bA_tau_bar(lam)) bb`` is positive on ``B`` and ``Bplus`` and
       negative on ``Bminus``.
    3. The original reduced costs on ``N`` are positive.
    """
    cols = list(part.tau_bar)
    if cols:
        r0 = numerical_rank(e.matrix(lambda0)[:, cols])
        r = numerical_rank(e.matrix(lam)[:, cols])
        cond1 = r == r0
        x = direct_primal(e, part, lam)
        neg = set(part.Bminus)
        sign = np.array([-1.0 if j in neg else 1.0 for j in cols])
        cond2 = bool(np.all(sign * x > 0))
    else:
        cond1 = cond2 = True
    cond3 = bool(np.all(direct_reduced_costs(e, part, lam) > 0))
    return ConditionCheck(bool(cond1), cond2, cond3)
