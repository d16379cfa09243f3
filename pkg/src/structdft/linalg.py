"""
Small dense complex linear algebra: LU with partial pivoting, determinants,
and 2-norm condition numbers by power / inverse iteration.

Matrices are 2-D complex numpy arrays.  No refinement is applied on purpose:
the solvers should expose the conditioning of the systems they are given.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidInputError, SingularMatrixError

SINGULAR_TOL = 1e-10


def _square(a):
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    return a


def lu_factor(a, singular_tol=SINGULAR_TOL, ops=None, check=True):
    """
    Factor ``a[piv] = L @ U`` with unit lower-triangular L.

    Returns ``(lu, piv, sign)`` where ``lu`` packs L below the diagonal and U
    on and above it.  With ``check`` set, a pivot smaller than
    ``singular_tol * max|a_ij|`` raises :class:`SingularMatrixError`.
    """
    lu = _square(a)
    n = lu.shape[0]
    scale = float(np.abs(lu).max()) if n else 0.0
    piv = np.arange(n)
    sign = 1
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = abs(lu[p, k])
        if check and (scale == 0.0 or pivot < singular_tol * scale):
            raise SingularMatrixError(f"pivot {pivot:.3e} at column {k} below tolerance")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
            sign = -sign
        rest = n - k - 1
        if rest and lu[k, k] != 0:
            lu[k + 1:, k] /= lu[k, k]
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
            if ops is not None:
                ops.count(divs=rest, mults=rest * rest, adds=rest * rest)
    return lu, piv, sign


def _substitute(lu, piv, b):
    # small systems: plain forward/back substitution beats the call overhead
    n = lu.shape[0]
    y = b[piv].copy()
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
    return y


def lu_solve_factored(factors, b, ops=None):
    """Solve with precomputed factors; ``b`` may be a vector or a matrix of columns."""
    lu, piv, _ = factors
    n = lu.shape[0]
    b = np.asarray(b, dtype=complex)
    if b.ndim == 1 and n <= 32:
        x = _substitute(lu, piv, b)
    else:
        y = solve_triangular(lu, b[piv], lower=True, unit_diagonal=True, check_finite=False)
        x = solve_triangular(lu, y, lower=False, check_finite=False)
    if ops is not None:
        cols = 1 if b.ndim == 1 else b.shape[1]
        tri = n * (n - 1) // 2
        ops.count(adds=2 * tri * cols, mults=2 * tri * cols, divs=n * cols)
    return x


def lu_solve(a, b, singular_tol=SINGULAR_TOL, ops=None):
    """Solve ``a x = b``; raises :class:`SingularMatrixError` on a tiny pivot."""
    a = _square(a)
    b = np.asarray(b, dtype=complex)
    if b.shape != (a.shape[0],):
        raise InvalidInputError(f"rhs of shape {b.shape} does not match {a.shape}")
    if a.shape[0] == 1:
        if a[0, 0] == 0:
            raise SingularMatrixError("zero 1x1 system")
        if ops is not None:
            ops.count(divs=1)
        return b / a[0, 0]
    factors = lu_factor(a, singular_tol, ops=ops)
    return lu_solve_factored(factors, b, ops=ops)


def determinant(a):
    """Product of the LU pivots with the permutation sign; 0 for singular input."""
    lu, _, sign = lu_factor(a, check=False)
    return complex(sign * np.prod(np.diag(lu))) if lu.shape[0] else 1.0 + 0j


def _norm(v):
    return float(np.sqrt(np.vdot(v, v).real))


def _power_sigma(op, a, start, max_iter, rtol):
    # largest singular value of ``a`` along the dominant direction of ``op``
    v = start / _norm(start)
    est = 0.0
    for _ in range(max_iter):
        w = op(v)
        v = w / _norm(w)
        new = _norm(a @ v)
        done = abs(new - est) <= rtol * new
        est = new
        if done:
            break
    return est


def cond2(a, rng=None, max_iter=200, rtol=1e-6, singular_tol=SINGULAR_TOL):
    """
    2-norm condition number sigma_max / sigma_min.

    1x1 and 2x2 matrices use closed forms.  Larger ones run power iteration
    on ``a^H a`` for sigma_max and inverse iteration (with the inverse built
    from the LU factors) for sigma_min, stopping after ``max_iter`` steps or
    when the estimate changes by less than ``rtol``.  A pivot below
    ``singular_tol`` (relative) raises :class:`SingularMatrixError`; pass
    ``singular_tol=0`` to measure badly conditioned matrices anyway.
    """
    a = _square(a)
    n = a.shape[0]
    scale = float(np.abs(a).max()) if n else 0.0
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    if n == 1:
        return 1.0
    if n == 2:
        fro2 = float(np.sum(np.abs(a) ** 2))
        det = abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
        first_pivot = max(abs(a[0, 0]), abs(a[1, 0]))
        if det == 0 or det / first_pivot < singular_tol * scale:
            raise SingularMatrixError("2x2 matrix below the pivot tolerance")
        smax2 = fro2 / 2 + np.sqrt(max(fro2 * fro2 / 4 - det * det, 0.0))
        return float(max(smax2 / det, 1.0))

    factors = lu_factor(a, singular_tol)
    if np.any(np.diag(factors[0]) == 0):
        raise SingularMatrixError("exactly singular matrix")
    inv = lu_solve_factored(factors, np.eye(n, dtype=complex))
    inv_h = inv.conj().T
    ah = a.conj().T
    rng = np.random.default_rng(0) if rng is None else rng
    start = rng.standard_normal(n) + 1j * rng.standard_normal(n)

    smax = _power_sigma(lambda v: ah @ (a @ v), a, start, max_iter, rtol)
    smin = _power_sigma(lambda v: inv @ (inv_h @ v), a, start, max_iter, rtol)
    if smin == 0:
        raise SingularMatrixError("zero smallest singular value")
    return float(max(smax / smin, 1.0))
