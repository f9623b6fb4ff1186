"""Normalized graph Laplacians and their dominant eigenspaces.

The Laplacian used throughout is the degree-normalized affinity
``L = D^{-1/2} A D^{-1/2}`` whose spectrum lies in [-1, 1]; for a graph
with c connected components the eigenvalue 1 has multiplicity exactly c.
Eigendecompositions are dense and deterministic: LAPACK's symmetric
solver (tridiagonalization plus implicitly shifted iterations) followed by
a full-spectrum residual check and a sign canonicalization of every
eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError

_DEGREE_FLOOR = 1e-12


@dataclass(frozen=True)
class NormalizedLaplacian:
    """Degree-normalized affinity matrix plus the degree vector it came from."""

    L: np.ndarray
    degree: np.ndarray

    def __post_init__(self):
        if np.abs(self.L - self.L.T).max() > 1e-12:
            raise DataError("Laplacian must be symmetric within 1e-12")

    @property
    def n(self) -> int:
        return self.L.shape[0]


@dataclass(frozen=True)
class Subspace:
    """Top-k orthonormal eigenvectors U with eigenvalues Sigma (descending)."""

    U: np.ndarray
    Sigma: np.ndarray

    def __post_init__(self):
        U, Sigma = self.U, self.Sigma
        if U.ndim != 2 or Sigma.shape != (U.shape[1],):
            raise DataError("subspace shape mismatch between U and Sigma")
        gram = U.T @ U
        if np.abs(gram - np.eye(U.shape[1])).max() > 1e-10:
            raise DataError("subspace basis is not orthonormal within 1e-10")
        if np.any(np.diff(Sigma) > 1e-10):
            raise DataError("eigenvalues must be sorted in descending order")

    @property
    def k(self) -> int:
        return self.U.shape[1]


def normalized_laplacian(A) -> NormalizedLaplacian:
    """Build ``D^{-1/2} A D^{-1/2}`` from a symmetric nonnegative affinity.

    Accepts a CompleteSimilarity or a raw square array.  Rows whose degree
    falls below 1e-12 get a zero scaling factor, so isolated vertices
    contribute zero rows/columns instead of dividing by zero.
    """
    vals = np.asarray(getattr(A, "values", A), dtype=float)
    if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
        raise DataError("affinity matrix must be square")
    if np.abs(vals - vals.T).max() > 1e-10:
        raise DataError("affinity matrix must be symmetric")
    if vals.min() < 0:
        raise DataError("affinity matrix must be nonnegative")
    degree = vals.sum(axis=1)
    inv_sqrt = np.where(degree > _DEGREE_FLOOR, 1.0 / np.sqrt(np.maximum(degree, _DEGREE_FLOOR)), 0.0)
    L = vals * inv_sqrt[:, None] * inv_sqrt[None, :]
    L = (L + L.T) / 2.0
    return NormalizedLaplacian(L=L, degree=degree)


def _canonical_signs(U: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude coordinate is positive.

    np.argmax picks the lowest index on exact ties, which is the
    tie-breaking rule we want.
    """
    U = np.array(U, copy=True)
    for j in range(U.shape[1]):
        lead = np.argmax(np.abs(U[:, j]))
        if U[lead, j] < 0:
            U[:, j] = -U[:, j]
    return U


def top_k_eigen(L: NormalizedLaplacian, k: int) -> Subspace:
    """Top-k eigenpairs of a normalized Laplacian, largest eigenvalues first.

    The decomposition is validated against the full-spectrum residual
    ``||L V - V diag(w)||_F <= 1e-8 * n`` before the leading block is
    returned; repeated eigenvalues yield a solver-dependent basis of the
    invariant subspace, so under degeneracy only subspace-level quantities
    are meaningful downstream.
    """
    mat = L.L
    n = mat.shape[0]
    if not 1 <= k <= n:
        raise DataError(f"k must be in [1, {n}], got {k}")
    try:
        w, V = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver failed to converge: {exc}") from exc
    residual = np.linalg.norm(mat @ V - V * w)
    if residual > 1e-8 * n:
        raise NumericalError(
            f"eigendecomposition residual {residual:.3e} exceeds {1e-8 * n:.3e}"
        )
    order = np.argsort(-w, kind="stable")[:k]
    U = _canonical_signs(V[:, order])
    return Subspace(U=U, Sigma=w[order])
