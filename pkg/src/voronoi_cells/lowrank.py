"""Nearest low-rank matrices and their Voronoi cells.

The nearest rank-r matrix to U is its truncated singular value
decomposition, so the Voronoi cell of a rank-r matrix V consists of the
matrices that agree with V on V's singular frame and whose free block is
bounded by sigma_r(V) in the spectral norm.  This module implements the
decomposition (one-sided Jacobi, small dense matrices), Eckart-Young
truncation, the exact cell-membership test, and the symmetric variant
where the Frobenius geometry restricts to eigenvalue conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9
_SWEEP_CAP = 60
_ROTATION_EPS = 1e-12


@dataclass(eq=False)
class SVDFactors:
    """Full factors A = sigma1 @ diag(values) @ sigma2.

    sigma1 is m x m orthogonal, sigma2 is n x n orthogonal, and values
    holds the min(m, n) singular values in nonincreasing order.
    """

    sigma1: np.ndarray
    values: np.ndarray
    sigma2: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = len(self.values)
        return (self.sigma1[:, :k] * self.values) @ self.sigma2[:k, :]


@dataclass(eq=False)
class CellDescription:
    """The Voronoi cell of a rank-r matrix in its own singular frame.

    Members agree with the diagonal block, vanish on the two mixed blocks,
    and fill the free (m-r) x (n-r) block with anything of spectral norm
    at most the radius (the r-th singular value).
    """

    aligned_diagonal: np.ndarray
    free_shape: tuple
    radius: float


def _as_matrix(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def _one_sided_jacobi(b: np.ndarray):
    """Orthogonalize the columns of a tall matrix by plane rotations.

    Returns (w, rot) with b @ rot = w and w's columns pairwise orthogonal;
    rot accumulates the rotations and stays orthogonal.
    """
    w = b.copy()
    cols = w.shape[1]
    rot = np.eye(cols)
    for _ in range(_SWEEP_CAP):
        largest = 0.0
        # pairs of columns that are both negligible against the dominant
        # one carry no direction information; rotating them only stalls
        # convergence
        scale = max((float(w[:, j] @ w[:, j]) for j in range(cols)),
                    default=0.0)
        floor = scale * 5e-32
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                wp = w[:, p]
                wq = w[:, q]
                aa = float(wp @ wp)
                bb = float(wq @ wq)
                cross = float(wp @ wq)
                if aa == 0.0 or bb == 0.0:
                    continue
                if aa <= floor and bb <= floor:
                    continue
                correlation = abs(cross) / math.sqrt(aa * bb)
                if correlation <= _ROTATION_EPS:
                    continue
                largest = max(largest, correlation)
                theta = 0.5 * math.atan2(2.0 * cross, aa - bb)
                c = math.cos(theta)
                s = math.sin(theta)
                new_p = c * wp + s * wq
                w[:, q] = -s * wp + c * wq
                w[:, p] = new_p
                rp = rot[:, p].copy()
                rot[:, p] = c * rp + s * rot[:, q]
                rot[:, q] = -s * rp + c * rot[:, q]
        if largest < _ROTATION_EPS:
            break
    return w, rot


def _complete_orthonormal(columns: list, dim: int) -> list:
    """Extend orthonormal columns to a full basis with Gram-Schmidt."""
    basis = list(columns)
    for i in range(dim):
        if len(basis) == dim:
            break
        v = np.zeros(dim)
        v[i] = 1.0
        for u in basis:
            v = v - (u @ v) * u
        norm = float(np.hypot.reduce(v))
        if norm > 1e-6:
            basis.append(v / norm)
    if len(basis) != dim:
        raise RuntimeError("orthonormal completion failed")
    return basis


def _first_nonzero_sign(v: np.ndarray) -> float:
    for entry in v:
        if abs(entry) > 1e-12:
            return 1.0 if entry > 0 else -1.0
    return 1.0


def svd(matrix) -> SVDFactors:
    """Singular value decomposition by one-sided Jacobi rotations.

    Deterministic conventions: singular values nonincreasing, first
    nonzero entry of every left singular vector positive.
    """
    a = _as_matrix(matrix)
    m, n = a.shape
    transposed = m < n
    b = a.T if transposed else a
    w, rot = _one_sided_jacobi(b)

    norms = np.array([float(np.hypot.reduce(w[:, j]))
                      for j in range(w.shape[1])])
    order = sorted(range(len(norms)), key=lambda j: (-norms[j], j))
    # directions below relative rounding noise come from the orthonormal
    # completion rather than from the (meaningless) residual columns
    cutoff = norms.max(initial=0.0) * 1e-14
    left_cols = []
    kept = []
    for j in order:
        kept.append(j)
        if norms[j] > cutoff:
            left_cols.append(w[:, j] / norms[j])
    rows = b.shape[0]
    full_left = np.column_stack(_complete_orthonormal(left_cols, rows))
    values = norms[kept]
    right = rot[:, kept].T  # b = full_left[:, :cols] @ diag(values) @ right

    if transposed:
        sigma1, sigma2 = right.T, full_left.T
    else:
        sigma1, sigma2 = full_left, right

    k = min(m, n)
    for j in range(m):
        if _first_nonzero_sign(sigma1[:, j]) < 0:
            sigma1[:, j] = -sigma1[:, j]
            if j < k:
                sigma2[j, :] = -sigma2[j, :]
    for i in range(k, n):
        if _first_nonzero_sign(sigma2[i, :]) < 0:
            sigma2[i, :] = -sigma2[i, :]
    return SVDFactors(sigma1, values[:k], sigma2)


def spectral_norm(matrix) -> float:
    a = _as_matrix(matrix)
    if a.size == 0:
        return 0.0
    return float(svd(a).values[0])


def eckart_young_truncate(matrix, r: int) -> np.ndarray:
    """The nearest matrix of rank at most r, via truncated singular values."""
    a = _as_matrix(matrix)
    k = min(a.shape)
    if not 1 <= r <= k:
        raise ValueError(f"rank must be between 1 and {k}")
    factors = svd(a)
    vals = factors.values.copy()
    vals[r:] = 0.0
    return (factors.sigma1[:, :k] * vals) @ factors.sigma2[:k, :]


def describe_cell(v_matrix, r: int, tol: float = DEFAULT_TOL):
    """Validate rank(V) = r and return (factors of V, CellDescription)."""
    v = _as_matrix(v_matrix)
    factors = svd(v)
    vals = factors.values
    if r < 1 or r > len(vals) or vals[r - 1] <= tol:
        raise ValueError(f"matrix is not of rank {r} within tolerance")
    if r < len(vals) and vals[r] > tol:
        raise ValueError(f"matrix is not of rank {r} within tolerance")
    m, n = v.shape
    return factors, CellDescription(vals[:r].copy(), (m - r, n - r),
                                    float(vals[r - 1]))


def cell_membership(u_matrix, v_matrix, r: int,
                    tol: float = DEFAULT_TOL) -> str:
    """Is V the unique nearest rank-r matrix to U?

    Aligns U to V's singular frame; membership requires the top block to
    reproduce V's singular values, the mixed blocks to vanish, and the
    free block to stay inside the spectral ball of radius sigma_r(V).
    Returns "inside", "boundary" (within tol of the ball's sphere), or
    "outside".
    """
    u = _as_matrix(u_matrix)
    v = _as_matrix(v_matrix)
    if u.shape != v.shape:
        raise ValueError("shape mismatch")
    factors, cell = describe_cell(v, r, tol)
    aligned = factors.sigma1.T @ u @ factors.sigma2.T
    top = aligned[:r, :r] - np.diag(cell.aligned_diagonal)
    if np.abs(top).max() > tol:
        return "outside"
    if aligned[:r, r:].size and np.abs(aligned[:r, r:]).max() > tol:
        return "outside"
    if aligned[r:, :r].size and np.abs(aligned[r:, :r]).max() > tol:
        return "outside"
    free = aligned[r:, r:]
    if free.size == 0:
        return "inside"
    return _classify_against_radius(spectral_norm(free), cell.radius, tol)


def spectral_ball_membership(matrix, radius: float,
                             tol: float = DEFAULT_TOL) -> bool:
    """Whether the matrix lies in the spectral-norm ball of the radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return spectral_norm(matrix) <= radius + tol


def symmetric_frobenius_membership(v_matrix, u_matrix, r: int,
                                   tol: float = DEFAULT_TOL) -> str:
    """Membership test for symmetric matrices under the Frobenius norm.

    V must be symmetric of rank r; the test works in V's eigenframe and
    compares the complementary block's extreme eigenvalue magnitude with
    V's smallest nonzero eigenvalue magnitude.
    """
    v = _as_matrix(v_matrix)
    u = _as_matrix(u_matrix)
    for name, mat in (("V", v), ("U", u)):
        if mat.shape[0] != mat.shape[1] or np.abs(mat - mat.T).max() > tol:
            raise ValueError(f"{name} must be symmetric")
    if u.shape != v.shape:
        raise ValueError("shape mismatch")

    eigvals, eigvecs = np.linalg.eigh(v)
    order = sorted(range(len(eigvals)), key=lambda i: (-abs(eigvals[i]), i))
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    if r < 1 or r > len(eigvals) or abs(eigvals[r - 1]) <= tol:
        raise ValueError(f"matrix is not of rank {r} within tolerance")
    if r < len(eigvals) and abs(eigvals[r]) > tol:
        raise ValueError(f"matrix is not of rank {r} within tolerance")

    aligned = eigvecs.T @ u @ eigvecs
    top = aligned[:r, :r] - np.diag(eigvals[:r])
    if np.abs(top).max() > tol:
        return "outside"
    if aligned[:r, r:].size and np.abs(aligned[:r, r:]).max() > tol:
        return "outside"
    free = aligned[r:, r:]
    if free.size == 0:
        return "inside"
    extreme = float(np.abs(np.linalg.eigvalsh(free)).max())
    return _classify_against_radius(extreme, abs(eigvals[r - 1]), tol)


def _classify_against_radius(value: float, radius: float, tol: float) -> str:
    if value < radius - tol:
        return "inside"
    if value <= radius + tol:
        return "boundary"
    return "outside"
