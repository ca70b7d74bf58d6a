"""Dense complex linear algebra used by the precoder constructions.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Rank decisions are relative: a singular value counts when it exceeds
``tol * sigma_max``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NotHermitian,
    NotPSD,
    Singular,
    ZeroMatrix,
)

DEFAULT_TOL = 1e-9


def _check_tol(tol: float) -> float:
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tol!r}")
    return float(tol)


def as_matrix(A) -> np.ndarray:
    """Coerce ``A`` to a finite 2-D complex128 array."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _svd_rank(s: np.ndarray, tol: float, floor: float = 0.0) -> int:
    if s.size == 0:
        return 0
    thresh = tol * max(s[0], floor)
    if thresh == 0.0:
        return 0
    return int(np.count_nonzero(s > thresh))


def rank(A, tol: float = DEFAULT_TOL) -> int:
    A = as_matrix(A)
    tol = _check_tol(tol)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return _svd_rank(s, tol)


def _null_from_svd(A: np.ndarray, tol: float, floor: float = 0.0) -> np.ndarray:
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    r = _svd_rank(s, tol, floor)
    return vh[r:].conj().T.copy()


def nullspace(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the kernel of ``A``.

    Returns an ``n x 0`` array when the kernel is trivial.
    """
    A = as_matrix(A)
    return _null_from_svd(A, _check_tol(tol))


def orth(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column span of ``A``.

    Raises
    ------
    ZeroMatrix
        If ``||A||_F <= tol``.
    """
    A = as_matrix(A)
    tol = _check_tol(tol)
    if np.linalg.norm(A) <= tol:
        raise ZeroMatrix("cannot take the span of a (numerically) zero matrix")
    return range_basis(A, tol)


def range_basis(A, tol: float = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Like :func:`orth` but judged against ``max(sigma_max, scale)``.

    Used where ``A`` is a product with a known reference scale (a channel
    times an orthonormal precoder): a product that is zero up to round-off
    then yields an empty basis instead of a spurious span.
    """
    A = as_matrix(A)
    tol = _check_tol(tol)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    return u[:, : _svd_rank(s, tol, scale)].copy()


def complement(Q, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(Q)``.

    Accepts an ``n x 0`` input, in which case the identity is returned.
    """
    Q = np.asarray(Q, dtype=np.complex128)
    if Q.shape[1] == 0:
        return np.eye(Q.shape[0], dtype=np.complex128)
    return nullspace(Q.conj().T, tol)


def intersect(bases, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the intersection of the spans of ``bases``.

    Each input must have orthonormal columns.  A vector lies in every span
    iff it is annihilated by every projector complement ``I - B B^H``, so the
    intersection is the kernel of those complements stacked vertically.
    The rank threshold is taken against ``max(sigma_max, 1)`` since the
    stacked projectors have unit scale; this keeps the all-full-space case
    (stack numerically zero) from being judged relative to round-off.
    """
    bases = [np.asarray(B, dtype=np.complex128) for B in bases]
    if not bases:
        raise ValueError("need at least one basis")
    tol = _check_tol(tol)
    n = bases[0].shape[0]
    for B in bases:
        if B.ndim != 2 or B.shape[0] != n:
            raise DimensionMismatch(
                f"all bases need {n} rows, got shape {B.shape}"
            )
    eye = np.eye(n, dtype=np.complex128)
    stacked = np.vstack([eye - B @ B.conj().T for B in bases])
    return _null_from_svd(stacked, tol, floor=1.0)


def projector(Q) -> np.ndarray:
    Q = np.asarray(Q, dtype=np.complex128)
    return Q @ Q.conj().T


def subspace_residual(A, B, tol: float = DEFAULT_TOL) -> float:
    """Distance between ``span(A)`` and ``span(B)``.

    For equal dimensions this is the Frobenius distance of the orthogonal
    projectors.  Otherwise it measures how far the smaller span is from
    being contained in the larger one.
    """
    qa, qb = orth(A, tol), orth(B, tol)
    if qa.shape[1] == qb.shape[1]:
        return float(np.linalg.norm(projector(qa) - projector(qb)))
    small, big = (qa, qb) if qa.shape[1] < qb.shape[1] else (qb, qa)
    return float(np.linalg.norm(small - big @ (big.conj().T @ small)))


def logdet_psd(A, tol: float = DEFAULT_TOL) -> float:
    """``log2 det(A)`` for a Hermitian positive semidefinite ``A``.

    Returns ``-inf`` for a singular PSD input.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"logdet needs a square matrix, got {A.shape}")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > 1e-10 * max(scale, 1e-300):
        raise NotHermitian("matrix is not Hermitian")
    w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
    if w.size and w[0] < -tol * scale:
        raise NotPSD(f"negative eigenvalue {w[0]:.3e}")
    if np.any(w <= 0.0):
        return float("-inf")
    return float(np.sum(np.log2(w)))


def solve(A, B, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Solve ``A X = B`` for square full-rank ``A``."""
    A = as_matrix(A)
    B = as_matrix(B)
    tol = _check_tol(tol)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"solve needs a square matrix, got {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatch(
            f"right-hand side has {B.shape[0]} rows, expected {A.shape[0]}"
        )
    if rank(A, tol) < A.shape[0]:
        raise Singular("coefficient matrix is rank deficient")
    return np.linalg.solve(A, B)


def invariant_subspace(T, k: int) -> np.ndarray:
    """Orthonormal basis of a ``k``-dimensional invariant subspace of ``T``.

    Uses the leading ``k`` Schur vectors of the complex Schur form, which span
    the invariant subspace of the first ``k`` eigenvalues in LAPACK order.
    """
    T = as_matrix(T)
    if T.shape[0] != T.shape[1]:
        raise DimensionMismatch(f"need a square matrix, got {T.shape}")
    if not 0 <= k <= T.shape[0]:
        raise ValueError(f"invalid subspace dimension {k}")
    _, Z = scipy.linalg.schur(T, output="complex")
    return Z[:, :k].copy()
