"""Small dense real linear algebra helpers.

Everything here operates on plain ``numpy`` arrays of modest size (the models
in this package have at most a few hundred states).  Direct methods only:
quasi-stochastic matrices can have complex spectrum outside the unit disk, so
power iteration is deliberately avoided.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateFixedSpace,
    NoUnitEigenvalue,
    NonFiniteEntries,
    NotSymmetric,
    SingularMatrix,
)

#: structural checks (row sums, symmetry)
STRUCT_TOL = 1e-10
#: eigen-residual checks
EIGEN_TOL = 1e-8


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntries("matrix has NaN or infinite entries")
    return a


def row_sum_residual(m) -> float:
    """Largest absolute deviation of a row sum from 1."""
    a = _as_matrix(m)
    return float(np.max(np.abs(a.sum(axis=1) - 1.0)))


def left_fixed_vector(m, tol: float = STRUCT_TOL, eigen_tol: float = EIGEN_TOL) -> np.ndarray:
    """Left eigenvector of ``m`` at eigenvalue 1, normalized to unit sum.

    ``m`` must be quasi-stochastic (each row sums to 1; signed entries are
    fine).  The vector is found by a direct bordered solve of ``v (m - I) = 0``
    with the normalization ``sum(v) = 1`` appended.  If the eigenvalue 1 has
    algebraic multiplicity above one there is no canonical choice, so the
    degenerate case is rejected rather than silently picking a representative.
    """
    a = _as_matrix(m)
    res = row_sum_residual(a)
    if res > tol:
        raise ValueError(f"matrix is not quasi-stochastic: row-sum residual {res:.3e}")

    # detection tolerance scales with the matrix norm: eigensolver error grows
    # with it, while the unit eigenvalue itself is exact (rows sum to 1)
    scale = max(1.0, float(np.max(np.abs(a).sum(axis=1))))
    eigvals = np.linalg.eigvals(a)
    near_one = np.sum(np.abs(eigvals - 1.0) <= scale * max(eigen_tol, 100 * np.finfo(float).eps))
    if near_one == 0:
        raise NoUnitEigenvalue(f"no eigenvalue within {eigen_tol:g} of 1")
    if near_one > 1:
        raise DegenerateFixedSpace(f"eigenvalue 1 has multiplicity {near_one}")

    n = a.shape[0]
    # v (a - I) = 0 row-stacked with the normalization row; least squares on
    # the (n+1) x n system is exact because the solution space is 1-dimensional.
    system = np.vstack([(a - np.eye(n)).T, np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    v, *_ = np.linalg.lstsq(system, rhs, rcond=None)

    residual = float(np.max(np.abs(v @ a - v)))
    if residual > 10 * eigen_tol:
        raise NoUnitEigenvalue(f"fixed-vector residual {residual:.3e} exceeds tolerance")
    return v / v.sum()


def solve_linear(a, b) -> np.ndarray:
    """Solve ``a x = b`` for square nonsingular ``a``."""
    a = _as_matrix(a)
    b = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(b)):
        raise NonFiniteEntries("right-hand side has NaN or infinite entries")
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("solution is non-finite (numerically singular system)")
    return x


def invert(a) -> np.ndarray:
    """Inverse of a square matrix, rejecting numerically singular input."""
    a = _as_matrix(a)
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.all(np.isfinite(inv)):
        raise SingularMatrix("inverse is non-finite")
    return inv


def symmetric_eigenvalues(m, tol: float = STRUCT_TOL) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in descending order."""
    a = _as_matrix(m)
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > tol:
        raise NotSymmetric(f"matrix asymmetry {asym:.3e} exceeds tolerance {tol:g}")
    vals = np.linalg.eigvalsh(0.5 * (a + a.T))
    return vals[::-1]
