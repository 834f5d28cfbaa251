"""Dense linear-algebra kernels.

Pseudo-inverses, eigenvalue multisets, the scalar realization identity

    1 + t c^T (I + t C)^{-1} b = prod_j (1 + t a_x[j]) / (1 + t a[j]),

with ``a`` the eigenvalues of ``C`` and ``a_x`` those of ``C + b c^T``, and
the polynomial plumbing (factor expansion, real roots) used to turn
eigenvalue lists into breakpoints.

Matrices are plain ``numpy.ndarray`` objects, eigenvalue multisets are 1-D
complex arrays and polynomials are ``numpy.polynomial.Polynomial`` with
ascending coefficients and identity domain/window.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from .errors import DegenerateInput, InconsistencyError, NumericFailure, ShapeError, UnsupportedSize

PINV_RCOND = 1e-10
TOL_MP = 1e-9
TOL_EIG = 1e-9
TOL_CONJ = 1e-8
TOL_TRIM = 1e-12
TOL_IMAG_ROOT = 1e-8
TOL_MERGE = 1e-7
NEWTON_STEPS = 5
VOLUME_ORACLE_MAX = 6


def _as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ShapeError("matrix has non-finite entries")
    return M


def pseudo_inverse(M, rcond: float = PINV_RCOND) -> np.ndarray:
    """Moore-Penrose inverse through the SVD.

    Singular values below ``rcond * sigma_max`` are treated as zero, so the
    all-zero matrix maps to the all-zero transpose.
    """
    M = _as_matrix(M)
    rows, cols = M.shape
    if M.size == 0:
        return np.zeros((cols, rows))
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure("SVD did not converge", rows=rows, cols=cols) from exc
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((cols, rows))
    keep = s > rcond * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (Vt.T * inv) @ U.T


def numerical_rank(M, rcond: float = PINV_RCOND) -> int:
    """Rank with the same relative singular-value cutoff as :func:`pseudo_inverse`."""
    M = _as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rcond * s[0]))


def penrose_residuals(M, X) -> tuple[float, float, float, float]:
    """Relative Frobenius residuals of the four Penrose equations.

    Returns the residuals of ``X M X = X``, ``M X M = M``, ``(X M)^T = X M``
    and ``(M X)^T = M X``, each divided by ``max(1, ||M||)`` (or ``||X||`` for
    the first).
    """
    M = np.asarray(M, dtype=float)
    X = np.asarray(X, dtype=float)
    nm = max(1.0, np.linalg.norm(M))
    nx = max(1.0, np.linalg.norm(X))
    XM = X @ M
    MX = M @ X
    return (
        float(np.linalg.norm(XM @ X - X) / nx),
        float(np.linalg.norm(M @ XM - M) / nm),
        float(np.linalg.norm(XM.T - XM) / max(1.0, np.linalg.norm(XM))),
        float(np.linalg.norm(MX.T - MX) / max(1.0, np.linalg.norm(MX))),
    )


def pinv_volume_oracle(M) -> np.ndarray:
    """Pseudo-inverse as the det^2-weighted mix of padded submatrix inverses.

    Enumerates every ``r x r`` submatrix (``r`` = rank) and combines the
    nonsingular ones with weights ``det^2 / sum det^2``.  The weighted
    inverse is formed as ``det * adj / sum det^2`` so near-singular
    submatrices contribute a vanishing term instead of a huge one.
    Exponential cost; restricted to at most 6 x 6 inputs.
    """
    M = _as_matrix(M)
    rows, cols = M.shape
    if rows > VOLUME_ORACLE_MAX or cols > VOLUME_ORACLE_MAX:
        raise UnsupportedSize(f"volume oracle supports at most 6x6, got {rows}x{cols}")
    out = np.zeros((cols, rows))
    r = numerical_rank(M)
    if r == 0:
        return out
    scale = np.max(np.abs(M)) ** r
    total = 0.0
    for I in combinations(range(rows), r):
        for J in combinations(range(cols), r):
            sub = M[np.ix_(I, J)]
            det = np.linalg.det(sub)
            if abs(det) <= 1e-14 * scale:
                continue
            # det * inv(sub) = adjugate(sub)
            out[np.ix_(J, I)] += det * (det * np.linalg.inv(sub))
            total += det * det
    if total == 0.0:
        raise NumericFailure("no nonsingular submatrix found", rows=rows, cols=cols)
    return out / total


def _eigvals(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure("eigenvalue solver did not converge", shape=M.shape) from exc


def _pad(values: np.ndarray, pad_to: int) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if pad_to > values.size:
        values = np.concatenate([values, np.zeros(pad_to - values.size, dtype=complex)])
    return values


def nonzero_eigenvalues(M, pad_to: int = 0) -> np.ndarray:
    """Eigenvalues of a square matrix with magnitude >= 1e-9 * max(1, ||M||_F).

    The survivors are padded with exact zeros up to ``pad_to`` entries.
    """
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got {M.shape}")
    if M.size == 0:
        return _pad(np.zeros(0, dtype=complex), pad_to)
    ev = _eigvals(M)
    tol = TOL_EIG * max(1.0, np.linalg.norm(M))
    return _pad(ev[np.abs(ev) >= tol], pad_to)


def smaller_product_eigenvalues(T, Q, pad_to: int = 0) -> np.ndarray:
    """Nonzero eigenvalues of ``T @ Q``, computed from the smaller of ``TQ`` and ``QT``."""
    T = _as_matrix(T)
    Q = _as_matrix(Q)
    a, b = T.shape
    if Q.shape != (b, a):
        raise ShapeError(f"T is {T.shape} so Q must be {(b, a)}, got {Q.shape}")
    prod = Q @ T if b < a else T @ Q
    return nonzero_eigenvalues(prod, pad_to)


def realization_pair(C, b, c) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of ``C`` and of ``C + b c^T``, both of full length ``l``."""
    C = _as_matrix(C)
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    l = C.shape[0]
    if C.shape != (l, l) or b.size != l or c.size != l:
        raise ShapeError(f"C must be square and b, c match its side; got {C.shape}, {b.size}, {c.size}")
    return _eigvals(C), _eigvals(C + np.outer(b, c))


def product_ratio(num_eigs, den_eigs, t) -> complex:
    """Evaluate ``prod(1 + t*num_eigs) / prod(1 + t*den_eigs)``."""
    num = np.prod(1.0 + t * np.asarray(num_eigs, dtype=complex))
    den = np.prod(1.0 + t * np.asarray(den_eigs, dtype=complex))
    return num / den


# ---------------------------------------------------------------- polynomials


def make_poly(coeffs) -> Polynomial:
    """Build a polynomial, dropping coefficients below 1e-12 of the largest."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
    if c.size == 0:
        return Polynomial([0.0])
    big = np.max(np.abs(c))
    if big == 0.0:
        return Polynomial([0.0])
    c[np.abs(c) < TOL_TRIM * big] = 0.0
    c = P.polytrim(c)
    return Polynomial(c)


def is_zero_poly(p: Polynomial) -> bool:
    return bool(np.all(p.coef == 0.0))


def _pair_conjugates(eigs: np.ndarray) -> tuple[list[float], list[complex]]:
    """Split a conjugate-closed multiset into real values and one member per pair."""
    eigs = np.asarray(eigs, dtype=complex)
    reals: list[float] = []
    pending: list[complex] = []
    for z in eigs:
        if abs(z.imag) <= TOL_CONJ * max(1.0, abs(z)):
            reals.append(float(z.real))
        else:
            pending.append(complex(z))
    upper = [z for z in pending if z.imag > 0]
    lower = [z for z in pending if z.imag < 0]
    if len(upper) != len(lower):
        raise InconsistencyError("eigenvalue list is not closed under conjugation", count=len(pending))
    pairs: list[complex] = []
    for z in upper:
        k = int(np.argmin([abs(w - z.conjugate()) for w in lower]))
        w = lower.pop(k)
        if abs(w - z.conjugate()) > TOL_CONJ * max(1.0, abs(z)):
            raise InconsistencyError("eigenvalue has no conjugate partner", value=z)
        pairs.append(0.5 * (z + w.conjugate()))
    return reals, pairs


def shifted_factor_coeffs(eigs) -> np.ndarray:
    """Ascending coefficients in ``t`` of ``prod_j (1 + t * eigs[j])``.

    Conjugate pairs enter as real quadratics ``1 + 2 Re(a) t + |a|^2 t^2``.
    """
    reals, pairs = _pair_conjugates(eigs)
    out = np.array([1.0])
    for a in reals:
        if a != 0.0:
            out = P.polymul(out, [1.0, a])
    for z in pairs:
        out = P.polymul(out, [1.0, 2.0 * z.real, abs(z) ** 2])
    return np.asarray(out, dtype=float)


def shift_poly(coeffs_t, lambda0: float) -> Polynomial:
    """Re-express a polynomial in ``t = lam - lambda0`` as a polynomial in ``lam``."""
    q = Polynomial(np.asarray(coeffs_t, dtype=float))
    return make_poly(q(Polynomial([-lambda0, 1.0])).coef)


def poly_from_factors(eigs, lambda0: float) -> Polynomial:
    """Expand ``prod_j (1 + (lam - lambda0) * eigs[j])`` as a real polynomial in ``lam``."""
    return shift_poly(shifted_factor_coeffs(eigs), lambda0)


def _newton_polish(c: np.ndarray, x: float, steps: int = NEWTON_STEPS) -> float:
    dc = P.polyder(c)
    fx = abs(P.polyval(x, c))
    for _ in range(steps):
        d = P.polyval(x, dc)
        if d == 0.0 or not np.isfinite(d):
            break
        x_new = x - P.polyval(x, c) / d
        f_new = abs(P.polyval(x_new, c))
        if not np.isfinite(x_new) or f_new > fx:
            break
        x, fx = x_new, f_new
    return float(x)


def real_roots_with_multiplicity(p) -> list[tuple[float, int]]:
    """Distinct real roots of ``p`` with their multiplicities, sorted ascending.

    Roots come from companion-matrix eigenvalues; a root is accepted as real
    when ``|imag| <= 1e-8 * (1 + |real|)`` and is then polished by five Newton
    steps.  Roots within 1e-7 (relative) of each other are merged, and a merged
    root of multiplicity k is re-polished on the (k-1)-th derivative.
    """
    c = make_poly(p.coef if isinstance(p, Polynomial) else p).coef
    if np.all(c == 0.0):
        raise DegenerateInput("zero polynomial has no well-defined roots")
    if c.size == 1:
        return []
    try:
        roots = P.polyroots(c)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure("companion eigenvalues did not converge", degree=c.size - 1) from exc
    cand = sorted(
        _newton_polish(c, float(r.real))
        for r in np.atleast_1d(roots)
        if abs(r.imag) <= TOL_IMAG_ROOT * (1.0 + abs(r.real))
    )
    out: list[tuple[float, int]] = []
    for r in cand:
        if out and abs(r - out[-1][0]) <= TOL_MERGE * (1.0 + abs(r)):
            root, mult = out[-1]
            out[-1] = (root, mult + 1)
        else:
            out.append((r, 1))
    # Newton is only linear at a multiple root; a root of multiplicity k is simple in the (k-1)-th derivative
    return [(_newton_polish(P.polyder(c, k - 1), r) if k > 1 else r, k) for r, k in out]


def real_roots(p) -> list[float]:
    """Distinct real roots of ``p`` in ascending order."""
    return [r for r, _ in real_roots_with_multiplicity(p)]
