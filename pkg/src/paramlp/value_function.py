"""Closed-form optimal value ``Z(lam)`` on an invariancy interval.

Along a partition the objective is ``Z(lam) = c_tau_bar^T x(lam)`` with
``x(lam) = (I + t P D)^{-1} P bb``, so

    1 + t Z(lam) = prod(1 + t a_x) / prod(1 + t a),

where ``a`` are the eigenvalues of ``P D`` and ``a_x`` those of
``P (D + bb c_tau_bar^T)``.  ``Z = (prod - 1) / t`` is formed with the
``t`` factor divided out exactly, converted to ``lam`` and reduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P
from scipy.linalg import qr

from .embedding import EmbeddedLP, InducedPartition
from .errors import InconsistencyError, PoleError
from .invariancy import IntervalCertificate, rank_one_update_eigs, product_difference_quotient, low_rank_factors
from .linalg import TOL_MERGE, make_poly, numerical_rank, pseudo_inverse, shift_poly, shifted_factor_coeffs

POLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``num(lam) / den(lam)`` on the open interval ``(lo, hi)``."""

    num: Polynomial
    den: Polynomial
    lo: float = -math.inf
    hi: float = math.inf

    def __call__(self, lam: float) -> float:
        return evaluate(self, lam)

    @property
    def is_constant(self) -> bool:
        return self.num.degree() == 0 and self.den.degree() == 0

    def coefficients(self) -> tuple[list[float], list[float]]:
        return [float(v) for v in self.num.coef], [float(v) for v in self.den.coef]

    def same_as(self, other: RationalFunction, tol: float = 1e-8) -> bool:
        """Coefficient-wise equality after normalization."""
        a_n, a_d = self.coefficients()
        b_n, b_d = other.coefficients()
        if len(a_n) != len(b_n) or len(a_d) != len(b_d):
            return False
        scale = max(1.0, *map(abs, a_n + a_d))
        return all(abs(x - y) <= tol * scale for x, y in zip(a_n + a_d, b_n + b_d))

    def display(self, digits: int = 6) -> str:
        num = _poly_str(self.num, digits)
        if self.den.degree() == 0 and self.den.coef[0] == 1.0:
            return num
        return f"({num})/({_poly_str(self.den, digits)})"


def _poly_str(p: Polynomial, digits: int) -> str:
    terms = []
    for k, a in enumerate(p.coef):
        if a == 0.0 and p.degree() > 0:
            continue
        mag = f"{abs(a):.{digits}g}"
        if k == 0:
            body = mag
        else:
            lam = "lambda" if k == 1 else f"lambda^{k}"
            body = lam if mag == "1" else f"{mag}*{lam}"
        sign = "-" if a < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def evaluate(zf: RationalFunction, lam: float) -> float:
    n = float(zf.num(lam))
    d = float(zf.den(lam))
    if abs(d) < POLE_TOL * (1.0 + abs(n)):
        raise PoleError(f"value function has a pole at lambda={lam!r}")
    return n / d


def derivative(zf: RationalFunction, lam: float) -> float:
    n, d = zf.num, zf.den
    dv = float(d(lam))
    if abs(dv) < POLE_TOL * (1.0 + abs(float(n(lam)))):
        raise PoleError(f"value function has a pole at lambda={lam!r}")
    return float(n.deriv()(lam) * dv - n(lam) * d.deriv()(lam)) / dv**2


def derivative_mismatch(left: RationalFunction, right: RationalFunction, at: float) -> float:
    return abs(derivative(left, at) - derivative(right, at))


# ----------------------------------------------------------------- reduction


def _divide_exact(p: np.ndarray, f: np.ndarray) -> np.ndarray:
    q, _ = P.polydiv(p, f)
    return np.atleast_1d(q)


def reduce_rational(num: Polynomial, den: Polynomial, tol: float = TOL_MERGE) -> tuple[Polynomial, Polynomial]:
    """Cancel common roots (real, or conjugate pairs) closer than ``tol`` and make ``den`` monic."""
    n = make_poly(num.coef).coef
    d = make_poly(den.coef).coef
    if np.all(n == 0.0):
        return Polynomial([0.0]), Polynomial([1.0])
    while n.size > 1 and d.size > 1:
        rn = P.polyroots(n)
        rd = P.polyroots(d)
        best = None
        for i, a in enumerate(rn):
            for j, b in enumerate(rd):
                dist = abs(a - b)
                if dist < tol * (1.0 + abs(a)) and (best is None or dist < best[0]):
                    best = (dist, i, j)
        if best is None:
            break
        _, i, j = best
        r = 0.5 * (rn[i] + rd[j])
        if abs(r.imag) <= 1e-8 * (1.0 + abs(r)):
            factor = np.array([-r.real, 1.0])
        else:
            factor = np.array([abs(r) ** 2, -2.0 * r.real, 1.0])
            if n.size < 3 or d.size < 3:
                break
        n = make_poly(_divide_exact(n, factor)).coef
        d = make_poly(_divide_exact(d, factor)).coef
    lead = d[-1]
    return make_poly(n / lead), make_poly(d / lead)


def _independent_rows(M: np.ndarray) -> list[int]:
    r = numerical_rank(M)
    _, _, piv = qr(M.T, pivoting=True, mode="economic")
    return sorted(int(i) for i in piv[:r])


def _independent_columns(M: np.ndarray) -> list[int]:
    return _independent_rows(M.T)


def build_value_function(
    e: EmbeddedLP,
    part: InducedPartition,
    lambda0: float,
    cert: IntervalCertificate | None = None,
    objective: float | None = None,
) -> RationalFunction:
    """Reduced ``Z(lam)`` for ``part``, anchored at ``lambda0``.

    If the partition system at ``lambda0`` lacks full column rank, the
    optimal face is not a point; ``c`` is constant on its affine hull, so a
    maximal independent column subset (and then row subset) gives the same
    value through a square system.  ``objective`` (the LP value at
    ``lambda0``) and an interior direct solve are used as checks.
    """
    lo = cert.lo if cert is not None else -math.inf
    hi = cert.hi if cert is not None else math.inf
    cols = list(part.tau_bar)
    if not cols:
        zf = RationalFunction(Polynomial([0.0]), Polynomial([1.0]), lo, hi)
        _check_anchor(zf, lambda0, objective)
        return zf
    A0 = e.matrix(lambda0)[:, cols]
    rows = list(range(A0.shape[0]))
    r = numerical_rank(A0)
    if r < len(cols):
        keep = _independent_columns(A0)
        cols = [cols[k] for k in keep]
        A0 = A0[:, keep]
    if r < A0.shape[0]:
        rows = _independent_rows(A0)
    A0 = A0[rows]
    D = e.bdA[np.ix_(rows, cols)]
    bb = e.bb[rows]
    c_bar = e.bc[cols]
    Pinv = pseudo_inverse(A0)
    L, R = low_rank_factors(D)
    alphas = rank_one_update_eigs(Pinv, L, R)
    crosses = rank_one_update_eigs(Pinv, L, R, bb, c_bar)
    num_t = product_difference_quotient(crosses, alphas)
    den_t = shifted_factor_coeffs(alphas)
    num, den = reduce_rational(shift_poly(num_t, lambda0), shift_poly(den_t, lambda0))
    zf = RationalFunction(num, den, lo, hi)

    _check_anchor(zf, lambda0, objective)
    for root in den.roots():
        if abs(root.imag) <= 1e-8 * (1.0 + abs(root)) and lo + TOL_MERGE < root.real < hi - TOL_MERGE:
            raise InconsistencyError("value function has a pole inside its interval", pole=float(root.real))
    _check_interior(e, list(part.tau_bar), zf, lambda0)
    return zf


def _check_anchor(zf: RationalFunction, lambda0: float, objective: float | None) -> None:
    if objective is None:
        return
    z = evaluate(zf, lambda0)
    if abs(z - objective) > 1e-7 * max(1.0, abs(objective)):
        raise InconsistencyError("value function misses the LP objective", lam=lambda0, z=z, objective=objective)


def _check_interior(e: EmbeddedLP, cols: list[int], zf: RationalFunction, lambda0: float) -> None:
    """Compare with a direct solve of the partition system at an interior point."""
    if math.isfinite(zf.hi):
        lam = 0.5 * (lambda0 + zf.hi)
    elif math.isfinite(zf.lo):
        lam = 0.5 * (lambda0 + zf.lo)
    else:
        lam = lambda0 + 0.5
    Al = e.matrix(lam)[:, cols]
    x = pseudo_inverse(Al) @ e.bb
    if np.linalg.norm(Al @ x - e.bb) > 1e-8 * (1.0 + np.linalg.norm(e.bb)):
        return
    direct = float(e.bc[cols] @ x)
    try:
        z = evaluate(zf, lam)
    except PoleError:
        return
    if abs(z - direct) > 1e-6 * max(1.0, abs(direct)):
        raise InconsistencyError("value function disagrees with a direct solve", lam=lam, z=z, direct=direct)
