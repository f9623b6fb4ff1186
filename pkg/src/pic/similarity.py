"""Adaptive-neighbor similarity graphs over partially observed views.

Each observed instance gets a sparse similarity row by solving

    min_a  || a + d / (2*alpha) ||^2   s.t.  a_i = 0,  0 <= a <= 1,  sum(a) = 1

over its squared Euclidean distances d to the other observed instances.
With the per-row alpha chosen so that exactly ``k_nn`` entries stay
positive, the minimizer has the closed form

    a_(h) = (d_(k+1) - d_(h)) / (k * d_(k+1) - sum_{h<=k} d_(h)),  h = 1..k

on the k nearest neighbors and zero elsewhere.  Entries between pairs
where either instance is unobserved are not computable from the data at
all; they are carried as explicitly undefined (a boolean mask, not NaN
payloads) and filled later by cross-view completion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class DistanceRow:
    """Squared Euclidean distances from one instance to all others in a view.

    ``defined[j]`` is False when instance j is unobserved in the view, in
    which case ``d[j]`` is meaningless (stored as 0).
    """

    d: np.ndarray
    defined: np.ndarray


@dataclass(frozen=True)
class MaskedSimilarity:
    """Per-view n x n similarity with an explicit definedness mask.

    An entry (i, j) is defined exactly when both i and j are observed in
    the view.  Defined entries lie in [0, 1], the diagonal is zero, and
    each observed row sums to 1 over its defined entries.
    """

    values: np.ndarray
    defined: np.ndarray
    view_id: int = 0


def distance_row(X: np.ndarray, mask_col: np.ndarray, i: int) -> DistanceRow:
    """Squared distances from observed instance i to every column of the view."""
    X = np.asarray(X, dtype=float)
    mask_col = np.asarray(mask_col, dtype=bool)
    if not mask_col[i]:
        raise DataError(f"instance {i} is unobserved in this view")
    diff = X - X[:, i : i + 1]
    d = np.einsum("ij,ij->j", diff, diff)
    d[~mask_col] = 0.0
    d[i] = 0.0
    return DistanceRow(d=d, defined=mask_col.copy())


def adaptive_row(dr: DistanceRow, i: int, k_nn: int) -> np.ndarray:
    """Closed-form similarity row for instance i from its distance row.

    Uses the ``min(k_nn, available)`` nearest defined non-self distances.
    When fewer than k_nn + 1 candidates exist the k+1-st threshold
    distance is unavailable and the row degenerates to uniform weight over
    everything available (the limit of the closed form as the threshold
    grows); the same uniform fallback covers exact distance ties through
    position k+1, where the closed-form denominator vanishes.
    """
    if k_nn < 1:
        raise DataError(f"k_nn must be >= 1, got {k_nn}")
    cand = np.flatnonzero(dr.defined)
    cand = cand[cand != i]
    s = cand.size
    if s == 0:
        raise DataError(f"instance {i} has no defined non-self distances (isolated)")
    k = min(k_nn, s)
    dists = dr.d[cand]
    order = np.argsort(dists, kind="stable")
    a = np.zeros_like(dr.d, dtype=float)
    nearest = cand[order[:k]]
    d_near = dists[order[:k]]
    if s >= k + 1:
        d_next = dists[order[k]]
        denom = k * d_next - d_near.sum()
        if denom > 1e-12 * max(d_next, 1.0):
            a[nearest] = (d_next - d_near) / denom
        else:
            a[nearest] = 1.0 / k
    else:
        a[nearest] = 1.0 / k
    return a


def build_similarity(
    X: np.ndarray, mask_col: np.ndarray, k_nn: int = 9, view_id: int = 0
) -> MaskedSimilarity:
    """Assemble the masked similarity matrix of one view, row by row.

    ``k_nn`` is clamped to (observed count - 1), the largest possible
    neighbor count.  Rows and columns of unobserved instances are fully
    undefined.  Rows are mutually independent, so any execution order
    yields the same matrix.
    """
    X = np.asarray(X, dtype=float)
    mask_col = np.asarray(mask_col, dtype=bool)
    n = X.shape[1]
    if mask_col.shape != (n,):
        raise DataError(f"mask column length {mask_col.shape} != n = {n}")
    observed = np.flatnonzero(mask_col)
    if observed.size < 2:
        raise DataError(
            f"view {view_id} has {observed.size} observed instances; need >= 2"
        )
    k_eff = min(k_nn, observed.size - 1)
    values = np.zeros((n, n))
    for i in observed:
        values[i] = adaptive_row(distance_row(X, mask_col, i), i, k_eff)
    defined = np.outer(mask_col, mask_col)
    return MaskedSimilarity(values=values, defined=defined, view_id=view_id)
